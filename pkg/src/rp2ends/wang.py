"""Wang's equation on a w-cylinder.

    L(u) = e^{-phi} (u_xx + u_yy) + 4 e^{-2u} ||U||^2 - 2 e^u - 2 kappa = 0,

with ||U||^2 = |U_w|^2 e^{-3 phi}. Grids are periodic in x in [0, 2 pi) and
carry Dirichlet data on the two rows y = y0, y1. Arrays have shape (Ny, Nx).
"""

import csv
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from . import geometry as geo
from .errors import (
    BarrierFailure,
    BracketsViolated,
    NeckTooWide,
    NewtonDivergence,
    PreconditionError,
    UnpopulatedField,
)

HEADER = ["x", "y", "phi", "u", "U_re", "U_im", "kappa"]
MAX_DOUBLINGS = 40
MAX_HALVINGS = 30


@dataclass(frozen=True)
class CylinderGrid:
    """Node samples of the background metric, u, U_w and curvature."""

    Nx: int
    Ny: int
    y0: float
    y1: float
    phi: np.ndarray = field(repr=False)
    u: np.ndarray = field(repr=False)
    U: np.ndarray = field(repr=False)
    kappa: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.Nx < 8 or self.Ny < 8:
            raise PreconditionError("need Nx, Ny >= 8")
        if not self.y1 > self.y0:
            raise PreconditionError("need y1 > y0")
        for name in ("phi", "u", "U", "kappa"):
            a = getattr(self, name)
            if a is None or np.shape(a) != (self.Ny, self.Nx):
                raise UnpopulatedField("%s must have shape (%d, %d)" % (name, self.Ny, self.Nx))
        if not np.all(np.isfinite(self.phi)):
            raise UnpopulatedField("phi is not finite at every node")

    @property
    def hx(self):
        return 2 * np.pi / self.Nx

    @property
    def hy(self):
        return (self.y1 - self.y0) / (self.Ny - 1)

    @property
    def x(self):
        return self.hx * np.arange(self.Nx)

    @property
    def y(self):
        return np.linspace(self.y0, self.y1, self.Ny)

    @property
    def U_re(self):
        return self.U.real

    @property
    def U_im(self):
        return self.U.imag

    def mesh(self):
        return np.meshgrid(self.x, self.y)

    def normU2(self):
        return np.abs(self.U) ** 2 * np.exp(-3 * self.phi)

    def with_u(self, u):
        return replace(self, u=np.array(u, dtype=float))

    def to_csv(self, path):
        X, Y = self.mesh()
        cols = [X, Y, self.phi, self.u, self.U.real, self.U.imag, self.kappa]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(HEADER)
            for row in zip(*(c.ravel() for c in cols)):
                w.writerow([repr(float(v)) for v in row])

    @classmethod
    def from_csv(cls, path):
        with open(path, newline="") as fh:
            rd = csv.reader(fh)
            head = next(rd)
            if [h.strip() for h in head] != HEADER:
                raise ValueError("expected header %s" % ",".join(HEADER))
            data = np.array([[float(v) for v in row] for row in rd if row])
        y = data[:, 1]
        Nx = int(np.sum(y == y[0]))
        Ny = len(y) // Nx
        if Nx * Ny != len(y):
            raise ValueError("rows do not form a full grid")
        f = lambda k: data[:, k].reshape(Ny, Nx)
        return cls(Nx, Ny, float(y[0]), float(y[-1]), f(2), f(3),
                   f(4) + 1j * f(5), f(6))


def grid_from_end(metric, field_w, Nx, Ny, y0, y1, u=None):
    """Sample a radial metric and an upstairs field U_w(w) on a grid."""
    g_y = np.linspace(y0, y1, Ny)
    x = 2 * np.pi / Nx * np.arange(Nx)
    X, Y = np.meshgrid(x, g_y)
    phi = np.repeat(metric.phi(g_y)[:, None], Nx, axis=1)
    kap = np.repeat(np.asarray(metric.curvature_y(g_y), dtype=float)[:, None], Nx, axis=1)
    U = np.asarray(field_w(X + 1j * Y), dtype=complex) * np.ones_like(X)
    u = np.zeros_like(X) if u is None else np.asarray(u, dtype=float)
    return CylinderGrid(Nx, Ny, float(y0), float(y1), phi, u, U, kap)


def flat_collar_grid(R, Nx, Ny, y0, y1, perturbation=0.0, orientation="conjugate"):
    """Exact flat end for residue R, U_w optionally multiplied by (1 + p e^{iw})."""
    m = geo.FlatEndMetric(abs(R))
    base = lambda w: geo.upstairs_coefficient({-3: R}, w, orientation)
    fw = lambda w: base(w) * (1 + perturbation * np.exp(1j * w))
    return grid_from_end(m, fw, Nx, Ny, y0, y1)


def cusp_grid(Nx, Ny, y0, y1, U=None, orientation="conjugate"):
    """Cusp metric e^phi = 1/y^2 (y0 > 0) with a residue-free differential."""
    if U is not None and U.residue() != 0:
        raise PreconditionError("cusp grids need a differential without residue")
    fw = (lambda w: 0 * w) if U is None else (lambda w: U.upstairs(w, orientation))
    return grid_from_end(geo.CuspMetric(), fw, Nx, Ny, y0, y1)


# ---------------------------------------------------------------------------
# operator


def _lap(u, hx, hy):
    uxx = (np.roll(u, 1, axis=1) - 2 * u + np.roll(u, -1, axis=1)) / hx**2
    uyy = np.empty_like(u)
    uyy[1:-1] = (u[2:] - 2 * u[1:-1] + u[:-2]) / hy**2
    # boundary rows: one-sided second difference
    uyy[0] = (u[0] - 2 * u[1] + u[2]) / hy**2
    uyy[-1] = (u[-1] - 2 * u[-2] + u[-3]) / hy**2
    return uxx + uyy


def wang_residual(grid, u=None):
    """L_h(u) at every node (defaults to grid.u)."""
    u = grid.u if u is None else np.asarray(u, dtype=float)
    for name, a in (("u", u), ("U", grid.U), ("kappa", grid.kappa)):
        if not np.all(np.isfinite(a)):
            raise UnpopulatedField("field %s has non-finite nodes" % name)
    return (np.exp(-grid.phi) * _lap(u, grid.hx, grid.hy)
            + 4 * np.exp(-2 * u) * grid.normU2() - 2 * np.exp(u) - 2 * grid.kappa)


def _laplacian_matrix(grid):
    """e^{-phi} Delta_h on interior rows (Dirichlet rows eliminated)."""
    nx, ny = grid.Nx, grid.Ny - 2
    ex = np.ones(nx)
    Dxx = sp.diags([ex[:-1], -2 * ex, ex[:-1]], [-1, 0, 1], format="lil")
    Dxx[0, nx - 1] = 1.0
    Dxx[nx - 1, 0] = 1.0
    ey = np.ones(ny)
    Dyy = sp.diags([ey[:-1], -2 * ey, ey[:-1]], [-1, 0, 1])
    A = (sp.kron(sp.identity(ny), Dxx.tocsr()) / grid.hx**2
         + sp.kron(Dyy, sp.identity(nx)) / grid.hy**2)
    return sp.diags(np.exp(-grid.phi[1:-1].ravel())) @ A


# ---------------------------------------------------------------------------
# barriers


@dataclass(frozen=True)
class BarrierPair:
    S: np.ndarray = field(repr=False)
    s: np.ndarray = field(repr=False)
    alpha: float
    beta: float
    kind: str
    doublings: int = 0


def sampled_residue(grid):
    """|R| read off as the x-mean of U_w on the far row."""
    return float(abs(np.mean(grid.U[-1])))


def _exp_ok(grid, S, tol_b):
    with np.errstate(over="ignore"):
        rs = wang_residual(grid, S)[1:-1]
        ri = wang_residual(grid, -S)[1:-1]
    return np.all(rs <= tol_b) and np.all(ri >= -tol_b)


def constant_barrier_level(grid, hi=1e6):
    """Smallest E >= 1 with 4||U||^2 - 2E^3 - 2 kappa E^2 <= 0 everywhere."""
    nu, k = grid.normU2(), grid.kappa
    f = lambda E: np.max(4 * nu - 2 * E**3 - 2 * k * E**2)
    if f(1.0) <= 0:
        return 1.0
    lo, top = 1.0, 2.0
    while f(top) > 0:
        lo, top = top, 2 * top
        if top > hi:
            raise BarrierFailure("no constant supersolution below e^M = %g" % hi)
    for _ in range(200):
        mid = 0.5 * (lo + top)
        if f(mid) > 0:
            lo = mid
        else:
            top = mid
        if top - lo < 1e-14 * top:
            break
    return top


def build_barriers(grid, alpha=0.25, beta_init=1.0, kind="auto", tol_b=0.0):
    """Super/subsolution pair S >= 0 >= s, checked nodewise with L_h.

    ``exponential``: S = beta e^{-2 alpha y}, s = -S with beta doubled until
    L_h(S) <= tol_b and L_h(s) >= -tol_b on interior nodes.
    ``constant``: S = M, s = -M with e^M from the cubic inequality.
    ``auto`` picks exponential when the sampled residue is nonzero.
    """
    if kind == "auto":
        kind = "exponential" if sampled_residue(grid) > 1e-10 else "constant"
    if kind == "constant":
        M = np.log(constant_barrier_level(grid))
        S = np.full(grid.phi.shape, M)
        lo = wang_residual(grid, -S)
        if np.any(lo < -tol_b):
            raise BarrierFailure("constant subsolution -M fails (min L = %.3e)" % lo.min())
        return BarrierPair(S, -S, 0.0, float(M), "constant")
    if kind != "exponential":
        raise ValueError("kind must be auto, exponential or constant")
    if not alpha > 0 or not beta_init > 0:
        raise PreconditionError("alpha and beta must be positive")
    Y = np.repeat(grid.y[:, None], grid.Nx, axis=1)
    prof = np.exp(-2 * alpha * Y)
    beta = float(beta_init)
    for k in range(MAX_DOUBLINGS + 1):
        S = beta * prof
        if _exp_ok(grid, S, tol_b):
            return BarrierPair(S, -S, float(alpha), beta, "exponential", k)
        beta *= 2
    raise BarrierFailure("barrier checks still fail after %d doublings (alpha = %g)"
                         % (MAX_DOUBLINGS, alpha))


# ---------------------------------------------------------------------------
# Newton solve


@dataclass(frozen=True)
class SolveReport:
    u: np.ndarray = field(repr=False)
    residual_inf: float
    newton_iters: int
    bracketed: bool
    barriers: BarrierPair = field(default=None, repr=False)


def solve_wang(grid, bc="dirichlet_zero", tol=1e-10, barriers=None, u0=None, max_iter=60):
    """Damped Newton for L_h(u) = 0 with Dirichlet rows at y0 and y1.

    ``dirichlet_zero`` puts u = 0 on both rows, ``dirichlet_field`` keeps the
    boundary rows of grid.u. Interior initial guess is u0 (default 0).
    """
    if tol < 1e-12:
        raise PreconditionError("tol must be >= 1e-12")
    if bc not in ("dirichlet_zero", "dirichlet_field"):
        raise ValueError("bc must be dirichlet_zero or dirichlet_field")
    u = np.zeros(grid.phi.shape) if u0 is None else np.array(u0, dtype=float)
    if bc == "dirichlet_zero":
        u[0] = u[-1] = 0.0
    else:
        u[0], u[-1] = grid.u[0], grid.u[-1]
    lap = _laplacian_matrix(grid)
    nu = grid.normU2()[1:-1].ravel()
    res = lambda v: wang_residual(grid, v)[1:-1]
    r = res(u)
    rn = np.max(np.abs(r))
    it = 0
    while rn > tol:
        if it >= max_iter:
            raise NewtonDivergence("no convergence in %d iterations (residual %.3e)" % (max_iter, rn))
        ui = u[1:-1].ravel()
        J = lap + sp.diags(-8 * np.exp(-2 * ui) * nu - 2 * np.exp(ui))
        du = splu(J.tocsc()).solve(-r.ravel()).reshape(r.shape)
        lam = 1.0
        for _ in range(MAX_HALVINGS + 1):
            v = u.copy()
            v[1:-1] += lam * du
            rv = res(v)
            rvn = np.max(np.abs(rv))
            if np.isfinite(rvn) and (rvn < rn or rvn <= tol):
                break
            lam *= 0.5
        else:
            raise NewtonDivergence("line search exhausted at residual %.3e" % rn)
        u, r, rn = v, rv, rvn
        it += 1
    bracketed = False
    if barriers is not None:
        lo, hi = barriers.s, barriers.S
        viol = max(np.max(lo - u), np.max(u - hi))
        bracketed = bool(viol <= 0)
        edge_ok = np.all(lo[[0, -1]] <= u[[0, -1]]) and np.all(u[[0, -1]] <= hi[[0, -1]])
        if viol > max(10 * tol, 1e-12) and edge_ok:
            raise BracketsViolated("solution leaves the barriers by %.3e" % viol)
    return SolveReport(u, float(rn), it, bracketed, barriers)


def refinement_ratio(u_h, u_h2, u_h4):
    """||u_h - u_{h/2}|| / ||u_{h/2} - u_{h/4}|| on the coarse nodes."""
    a = np.max(np.abs(u_h - u_h2[::2, ::2]))
    b = np.max(np.abs(u_h2[::2, ::2] - u_h4[::4, ::4]))
    return float(a / b)


# ---------------------------------------------------------------------------
# neck barrier and gradient bounds


def neck_barrier(t, alpha, beta, mu, K=0.5):
    """beta |t|^alpha e^{2 alpha |mu|} for |mu| >= 1, quartic in mu on [-1, 1]."""
    at = abs(complex(t))
    if not 0 < at < K**2:
        raise NeckTooWide("need 0 < |t| < K^2")
    mu = np.asarray(mu, dtype=float)
    a = alpha
    Q = beta * at**a * np.exp(2 * a)
    m = np.abs(mu)
    inner = Q * ((1 - 1.25 * a + 0.5 * a * a) + (1.5 * a - a * a) * m**2
                 + (-0.25 * a + 0.5 * a * a) * m**4)
    outer = beta * at**a * np.exp(2 * a * m)
    return np.where(m >= 1, outer, inner)


def _grad_norm(u, grid):
    u = u.u if isinstance(u, SolveReport) else np.asarray(u, dtype=float)
    ux = (np.roll(u, -1, axis=1) - np.roll(u, 1, axis=1)) / (2 * grid.hx)
    uy = np.gradient(u, grid.hy, axis=0, edge_order=2)
    return np.exp(-0.5 * grid.phi) * np.hypot(ux, uy)


def gradient_bound_check(report, grid, alpha=None):
    """max of e^{-phi/2} |grad u| e^{2 alpha y} over the nodes."""
    if alpha is None:
        alpha = report.barriers.alpha
    g = _grad_norm(report, grid)
    return float(np.max(g * np.exp(2 * alpha * grid.y)[:, None]))


def gradient_decay_rate(report, grid, window):
    """Exponent c in max_x |grad u| ~ e^{-c y}, least squares on y in window."""
    g = _grad_norm(report, grid).max(axis=1)
    y = grid.y
    sel = (y >= window[0]) & (y <= window[1]) & (g > 0)
    if sel.sum() < 3:
        raise PreconditionError("decay window holds fewer than 3 rows")
    slope = np.polyfit(y[sel], np.log(g[sel]), 1)[0]
    return float(-slope)
