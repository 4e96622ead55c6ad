"""Frame transport for the affine sphere, holonomy and developed rays.

The frame X = (f, f_w, f_wbar) is a 3x3 complex matrix whose rows are
vectors in C^3; f is real. On the w-plane it satisfies

    dX/dx = A X,    dX/dy = B X,

    A = [[0, 1, 1], [e^psi/2, psi_w, U e^-psi], [e^psi/2, conj(U) e^-psi, conj(psi_w)]]
    B = [[0, i, -i], [-i e^psi/2, i psi_w, i U e^-psi], [i e^psi/2, -i conj(U) e^-psi, -i conj(psi_w)]]

with det X = (i/2) e^psi. Developed points are the f rows, i.e. points of
RP^2 in the coordinates of the initial frame. Holonomy acts on row vectors
on the right: f(gamma p) = f(p) H.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import RectBivariateSpline

from . import geometry as geo
from . import projlin
from .errors import (
    FieldDomainError,
    InconsistentWitness,
    NoConvergenceByYmax,
    PreconditionError,
    StepTooLarge,
)
from .residue import MINUS, PLUS, is_snapped, xi_branch

OMEGA = np.exp(2j * np.pi / 3)
S3 = np.sqrt(3.0)
# rows f, f_w, f_wbar of the model eigenframe; P_BAR = conj(P) = 3 P^{-1}
P = np.array([[1, 1, 1], [1, OMEGA**2, OMEGA], [1, OMEGA, OMEGA**2]])
P_BAR = P.conj()
# (f, f_x, f_y) = C (f, f_w, f_wbar)
C = np.array([[1, 0, 0], [0, 1, 1], [0, 1j, -1j]])
C_INV = np.linalg.inv(C)
MAX_STEP = 0.01


# ---------------------------------------------------------------------------
# frames


@dataclass(frozen=True)
class AffineFrame:
    rows: np.ndarray = field(repr=False)
    psi_at: float = np.nan

    @property
    def f(self):
        return self.rows[0].real


def initial_frame(psi0):
    """Model eigenframe (1/sqrt3) P scaled so that det = (i/2) e^psi0."""
    c = (0.5 * np.exp(psi0)) ** (1.0 / 3.0)
    return AffineFrame(c * P / S3, float(psi0))


def frame_invariants(frame):
    """Reality of f, conjugacy of f_w and f_wbar, and volume drift."""
    X = frame.rows
    sc = np.max(np.abs(X))
    return {"reality": float(np.max(np.abs(X[0].imag)) / sc),
            "conjugacy": float(np.max(np.abs(X[1] - X[2].conj())) / sc),
            "volume": volume_drift([frame])}


def volume_drift(frames):
    """max |det X / ((i/2) e^psi) - 1| over a trajectory."""
    if len(frames) == 0:
        raise PreconditionError("empty trajectory")
    out = 0.0
    for F in frames:
        d = np.linalg.det(F.rows) / (0.5j * np.exp(F.psi_at))
        out = max(out, abs(d - 1))
    return float(out)


def limit_matrix(R):
    """Limit of the x-coefficient matrix as y -> infinity on an end with residue R."""
    R = complex(R)
    if R == 0:
        return np.array([[0, 1, 1], [0, 0, 0], [0, 0, 0]], dtype=complex)
    a = abs(R)
    d = 2 ** (-2 / 3) * a ** (2 / 3)
    e = 2 ** (-1 / 3) * a ** (-2 / 3)
    return np.array([[0, 1, 1], [d, 0, -1j * e * R], [d, 1j * e * R.conjugate(), 0]])


def triangle_model_frame(sigma, tau):
    """Closed-form frame of the triangle model at nu = sigma + i tau."""
    D = np.exp([2 * sigma, -sigma + S3 * tau, -sigma - S3 * tau])
    return AffineFrame(P * D[None, :] / S3, np.log(2.0))


# ---------------------------------------------------------------------------
# transport fields


class TransportField:
    """Coefficients of the frame system at points (x, y)."""

    whole_plane = False

    def coeffs(self, x, y):
        """(e^psi, psi_w, U) at the given points."""
        raise NotImplementedError

    def contains(self, x, y):
        return np.ones(np.shape(x), dtype=bool)

    def psi(self, x, y):
        ep, _, _ = self.coeffs(np.atleast_1d(x), np.atleast_1d(y))
        v = np.log(ep)
        return float(v[0]) if np.ndim(x) == 0 else v

    def matrices(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if not np.all(self.contains(x, y)):
            raise FieldDomainError("path leaves the field domain")
        ep, pw, U = self.coeffs(x, y)
        n = x.shape[0]
        ue = U / ep
        A = np.zeros((n, 3, 3), dtype=complex)
        B = np.zeros((n, 3, 3), dtype=complex)
        A[:, 0, 1] = A[:, 0, 2] = 1
        A[:, 1, 0] = A[:, 2, 0] = 0.5 * ep
        A[:, 1, 1], A[:, 1, 2] = pw, ue
        A[:, 2, 1], A[:, 2, 2] = ue.conj(), pw.conj()
        B[:, 0, 1], B[:, 0, 2] = 1j, -1j
        B[:, 1, 0], B[:, 2, 0] = -0.5j * ep, 0.5j * ep
        B[:, 1, 1], B[:, 1, 2] = 1j * pw, 1j * ue
        B[:, 2, 1], B[:, 2, 2] = -1j * ue.conj(), -1j * pw.conj()
        return A, B

    def holomorphic_defect(self, x, y, h=1e-5):
        """|U_x + i U_y| / |U| by centered differences at one point."""
        X = np.array([x + h, x - h, x, x], dtype=float)
        Y = np.array([y, y, y + h, y - h], dtype=float)
        U = self.coeffs(X, Y)[2]
        d = (U[0] - U[1]) / (2 * h) + 1j * (U[2] - U[3]) / (2 * h)
        return float(abs(d) / max(np.max(np.abs(U)), 1e-300))


class AnalyticEndField(TransportField):
    """Radial metric e^phi |dw|^2 with closed-form U and optional u = u(x, y) callable."""

    def __init__(self, metric, coeffs, orientation="conjugate", u=None):
        self.metric = metric
        self.coeffs_z = dict(coeffs)
        self.orientation = orientation
        self.u = u

    def contains(self, x, y):
        return self.metric.contains(y)

    def coeffs(self, x, y):
        phi = self.metric.phi(y)
        pw = self.metric.phi_w(y) + 0j
        if self.u is not None:
            uu, uw = self.u(x, y)
            phi = phi + uu
            pw = pw + uw
        U = geo.upstairs_coefficient(self.coeffs_z, x + 1j * y, self.orientation)
        return np.exp(phi), pw * np.ones_like(phi), U * np.ones_like(phi)


class ModelEndField(AnalyticEndField):
    """Exact model end: flat metric and U_w constant (u = 0 solves Wang's equation)."""

    def __init__(self, R, orientation="conjugate"):
        super().__init__(geo.FlatEndMetric(abs(R)), {-3: complex(R)}, orientation)
        self.R = complex(R)
        self.xi = xi_branch(R)


def model_end_field(R, orientation="conjugate"):
    return ModelEndField(R, orientation)


class TriangleModelField(TransportField):
    """e^psi = 2, U = 2 on the whole (sigma, tau) plane."""

    whole_plane = True

    def coeffs(self, x, y):
        one = np.ones(np.shape(x))
        return 2 * one, 0j * one, 2 + 0j * one


class ConstantField(TransportField):
    """Constant coefficient matrices, e.g. the limit systems."""

    whole_plane = True

    def __init__(self, A, B):
        self.A = np.asarray(A, dtype=complex)
        self.B = np.asarray(B, dtype=complex)

    def psi(self, x, y):
        return np.nan

    def matrices(self, x, y):
        n = np.shape(x)[0]
        return (np.broadcast_to(self.A, (n, 3, 3)), np.broadcast_to(self.B, (n, 3, 3)))


class GridField(TransportField):
    """Solved Wang grid: analytic phi and U, bicubic u and centered-difference u_w."""

    def __init__(self, grid, metric, U_w, u=None, pad=4):
        self.grid = grid
        self.metric = metric
        self.U_w = U_w
        u = grid.u if u is None else np.asarray(u, dtype=float)
        hx, hy = grid.hx, grid.hy
        ux = (np.roll(u, -1, axis=1) - np.roll(u, 1, axis=1)) / (2 * hx)
        uy = np.gradient(u, hy, axis=0, edge_order=2)
        x = grid.x
        xe = np.concatenate([x[-pad:] - 2 * np.pi, x, x[:pad] + 2 * np.pi])
        ext = lambda a: np.concatenate([a[:, -pad:], a, a[:, :pad]], axis=1)
        self._sp = [RectBivariateSpline(grid.y, xe, ext(a), kx=3, ky=3) for a in (u, ux, uy)]

    def contains(self, x, y):
        g = self.grid
        eps = 1e-12 * (1 + abs(g.y1))
        return (y >= g.y0 - eps) & (y <= g.y1 + eps)

    def coeffs(self, x, y):
        xm = np.mod(x, 2 * np.pi)
        yc = np.clip(y, self.grid.y0, self.grid.y1)
        uu, ux, uy = (s.ev(yc, xm) for s in self._sp)
        phi = self.metric.phi(yc)
        pw = self.metric.phi_w(yc) + 0.5 * (ux - 1j * uy)
        U = np.asarray(self.U_w(x + 1j * y), dtype=complex) * np.ones_like(phi)
        return np.exp(phi + uu), pw, U


class SampledGridField(TransportField):
    """Field read entirely from grid samples: bicubic psi = phi + u and U_w."""

    def __init__(self, grid, pad=4):
        self.grid = grid
        psi = grid.phi + grid.u
        x = grid.x
        xe = np.concatenate([x[-pad:] - 2 * np.pi, x, x[:pad] + 2 * np.pi])
        ext = lambda a: np.concatenate([a[:, -pad:], a, a[:, :pad]], axis=1)
        self._sp = [RectBivariateSpline(grid.y, xe, ext(a), kx=3, ky=3)
                    for a in (psi, grid.U.real, grid.U.imag)]

    def contains(self, x, y):
        g = self.grid
        eps = 1e-12 * (1 + abs(g.y1))
        return (y >= g.y0 - eps) & (y <= g.y1 + eps)

    def coeffs(self, x, y):
        xm = np.mod(x, 2 * np.pi)
        yc = np.clip(y, self.grid.y0, self.grid.y1)
        sp_psi, sp_re, sp_im = self._sp
        psi = sp_psi.ev(yc, xm)
        px = sp_psi.ev(yc, xm, dx=0, dy=1)
        py = sp_psi.ev(yc, xm, dx=1, dy=0)
        U = sp_re.ev(yc, xm) + 1j * sp_im.ev(yc, xm)
        return np.exp(psi), 0.5 * (px - 1j * py), U


class CompositeField(TransportField):
    """``inner`` for y <= y_cut, ``outer`` beyond."""

    def __init__(self, inner, outer, y_cut):
        self.inner, self.outer, self.y_cut = inner, outer, float(y_cut)

    def contains(self, x, y):
        lo = y <= self.y_cut
        return np.where(lo, self.inner.contains(x, y), self.outer.contains(x, y))

    def coeffs(self, x, y):
        lo = y <= self.y_cut
        out = [np.zeros(np.shape(x)), np.zeros(np.shape(x), complex), np.zeros(np.shape(x), complex)]
        for mask, fld in ((lo, self.inner), (~lo, self.outer)):
            if np.any(mask):
                vals = fld.coeffs(x[mask], y[mask])
                for o, v in zip(out, vals):
                    o[mask] = v
        return tuple(out)


# ---------------------------------------------------------------------------
# RK4 transport


def _segment_propagators(fld, p0, p1, step):
    """Per-step RK4 propagators along the straight segment p0 -> p1."""
    p0 = np.asarray(p0, dtype=float)
    d = np.asarray(p1, dtype=float) - p0
    L = float(np.hypot(*d))
    if L == 0:
        return np.zeros((0, 3, 3), dtype=complex), np.zeros((0, 2))
    n = int(np.ceil(L / step - 1e-9))
    h = L / n
    u = d / L
    s = np.linspace(0.0, L, 2 * n + 1)
    pts = p0[None, :] + s[:, None] * u[None, :]
    A, B = fld.matrices(pts[:, 0], pts[:, 1])
    M = u[0] * A + u[1] * B
    M0, Mh, M1 = M[0:-1:2], M[1::2], M[2::2]
    eye = np.eye(3)
    K1 = M0
    K2 = Mh @ (eye + 0.5 * h * K1)
    K3 = Mh @ (eye + 0.5 * h * K2)
    K4 = M1 @ (eye + h * K3)
    Pk = eye + h / 6 * (K1 + 2 * K2 + 2 * K3 + K4)
    return Pk, pts[2::2]


def _path_propagators(fld, path, step):
    if not step > 0:
        raise PreconditionError("step must be positive")
    if step > MAX_STEP:
        raise StepTooLarge("step %g exceeds %g" % (step, MAX_STEP))
    path = [tuple(map(float, p)) for p in path]
    Ps, pts = [], []
    for a, b in zip(path[:-1], path[1:]):
        Pk, q = _segment_propagators(fld, a, b, step)
        Ps.append(Pk)
        pts.append(q)
    if not Ps:
        return np.zeros((0, 3, 3), complex), np.zeros((0, 2))
    return np.concatenate(Ps), np.concatenate(pts)


def transport(frame, fld, path, step=1e-3, trajectory=False):
    """RK4 transport of a frame along a polyline of (x, y) points.

    Returns the final AffineFrame, or every step's frame if ``trajectory``.
    """
    Pk, pts = _path_propagators(fld, path, step)
    X = np.array(frame.rows, dtype=complex)
    if len(Pk) == 0:
        return [frame] if trajectory else AffineFrame(X, frame.psi_at)
    psis = fld.psi(pts[:, 0], pts[:, 1]) if not isinstance(fld, ConstantField) \
        else np.full(len(pts), np.nan)
    if trajectory:
        out = [frame]
        for k in range(len(Pk)):
            X = Pk[k] @ X
            out.append(AffineFrame(X, float(psis[k])))
        return out
    for k in range(len(Pk)):
        X = Pk[k] @ X
    return AffineFrame(X, float(psis[-1]))


# ---------------------------------------------------------------------------
# holonomy


@dataclass(frozen=True)
class Holonomy:
    """Loop holonomy in the requested frame, with an accurate determinant.

    ``complex_matrix`` is the fundamental solution Phi in the frame
    (f, f_w, f_wbar); ``real_matrix`` is C Phi C^-1 in (f, f_x, f_y);
    ``std_matrix`` = X0^-1 Phi X0 acts on developed points (row vectors).
    ``det`` is the product of the per-step propagator determinants.
    """

    matrix: np.ndarray = field(repr=False)
    complex_matrix: np.ndarray = field(repr=False)
    real_matrix: np.ndarray = field(repr=False)
    std_matrix: np.ndarray = field(repr=False)
    det: float
    eigenvalues: tuple
    base: tuple


def _fundamental(Pk):
    Phi = np.eye(3, dtype=complex)
    for k in range(len(Pk)):
        Phi = Pk[k] @ Phi
    det = complex(np.prod(np.linalg.det(Pk))) if len(Pk) else 1 + 0j
    return Phi, det


def loop_holonomy_along(fld, path, step=1e-3, frame="real"):
    """Holonomy of a closed loop (end point = start point + 2 pi in x)."""
    Pk, _ = _path_propagators(fld, path, step)
    Phi, det = _fundamental(Pk)
    x0, y0 = map(float, path[0])
    real = (C @ Phi @ C_INV)
    if np.max(np.abs(real.imag)) > 1e-8 * max(1.0, np.max(np.abs(real))):
        raise PreconditionError("holonomy is not real; field violates the reality structure")
    real = real.real
    psi0 = fld.psi(x0, y0)
    if np.isfinite(psi0):
        X0 = initial_frame(psi0).rows
        std = (np.linalg.solve(X0, Phi @ X0)).real
    else:
        std = np.full((3, 3), np.nan)
    ev = tuple(float(v.real) for v in projlin.eigenvalues(real))
    mat = {"real": real, "complex": Phi, "std": std}[frame]
    return Holonomy(mat, Phi, real, std, float(det.real), ev, (x0, y0))


def holonomy_loop(fld, y, step=1e-3, frame="real", x0=0.0):
    """Holonomy of the horizontal loop x: x0 -> x0 + 2 pi at height y."""
    return loop_holonomy_along(fld, [(x0, y), (x0 + 2 * np.pi, y)], step, frame)


# ---------------------------------------------------------------------------
# developed rays


@dataclass(frozen=True)
class DevelopedCurve:
    samples: list
    limit: object = None
    iota: float = None

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write("parameter,p1,p2,p3\n")
            for s, p in self.samples:
                fh.write("%r,%r,%r,%r\n" % ((float(s),) + tuple(p.coords)))

    def to_svg(self, path, triangle=None, size=400, clip=1e3):
        """Affine chart x1 = 1 with the curve and an optional triangle (columns).

        Points off the chart or beyond ``clip`` times the triangle's extent
        are dropped; returns the number of dropped curve points.
        """
        tri = []
        if triangle is not None:
            for v in np.asarray(triangle, dtype=float).T:
                if abs(v[0]) > 1e-12:
                    tri.append((v[1] / v[0], v[2] / v[0]))
        box = clip * max(1.0, float(np.max(np.abs(tri)))) if tri else clip
        pts, clipped = [], 0
        for _, p in self.samples:
            v = p.vector
            if abs(v[0]) <= 1e-12 or max(abs(v[1]), abs(v[2])) > box * abs(v[0]):
                clipped += 1
            else:
                pts.append((v[1] / v[0], v[2] / v[0]))
        allp = np.array(pts + tri) if pts or tri else np.zeros((1, 2))
        lo, hi = allp.min(axis=0), allp.max(axis=0)
        span = max(float(np.max(hi - lo)), 1e-9)
        m = lambda q: (20 + (q[0] - lo[0]) / span * (size - 40),
                       size - 20 - (q[1] - lo[1]) / span * (size - 40))
        out = ['<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d">' % (size, size)]
        if len(tri) >= 2:
            out.append('<polygon points="%s" fill="none" stroke="gray"/>'
                       % " ".join("%.3f,%.3f" % m(q) for q in tri))
        if pts:
            out.append('<polyline points="%s" fill="none" stroke="black"/>'
                       % " ".join("%.3f,%.3f" % m(q) for q in pts))
        out.append("</svg>")
        with open(path, "w") as fh:
            fh.write("\n".join(out) + "\n")
        return clipped


def _cauchy(samples, window, tol):
    if len(samples) < window:
        return False
    tail = [p for _, p in samples[-window:]]
    return all(projlin.chart_distance(tail[-1], q) <= tol for q in tail[:-1])


def develop_ray(fld, iota, y_max=40.0, step=1e-3, start=(0.0, 1.0), length=None,
                sample_every=0.25, window=10, tol=1e-6, frame=None):
    """Develop the ray start + s (cos iota, sin iota) and look for its limit in RP^2.

    End fields need iota in (0, pi) and run until y = y_max; whole-plane
    fields accept any angle and run for path length ``length``.
    """
    x0, y0 = map(float, start)
    if fld.whole_plane and length is not None:
        L = float(length)
    else:
        if not 0 < iota < np.pi:
            raise PreconditionError("iota must lie in (0, pi)")
        if not y_max > y0:
            raise PreconditionError("y_max must exceed the start height")
        L = (y_max - y0) / np.sin(iota)
    if frame is None:
        frame = initial_frame(fld.psi(x0, y0)) if not isinstance(fld, TriangleModelField) \
            else triangle_model_frame(x0, y0)
    d = np.array([np.cos(iota), np.sin(iota)])
    n_chunks = max(1, int(np.ceil(L / sample_every - 1e-9)))
    ds = L / n_chunks
    X = np.array(frame.rows, dtype=complex)
    samples = [(0.0, projlin.project(X[0].real))]
    for k in range(n_chunks):
        a = (x0 + k * ds * d[0], y0 + k * ds * d[1])
        b = (x0 + (k + 1) * ds * d[0], y0 + (k + 1) * ds * d[1])
        Pk, _ = _segment_propagators(fld, a, b, _check_step(step))
        for j in range(len(Pk)):
            X = Pk[j] @ X
        X = X / np.max(np.abs(X))
        samples.append(((k + 1) * ds, projlin.project(X[0].real)))
    if not _cauchy(samples, window, tol):
        raise NoConvergenceByYmax("ray at angle %.6g has not settled (Cauchy window %d, tol %g)"
                                  % (iota, window, tol))
    return DevelopedCurve(samples, samples[-1][1], float(iota))


def _check_step(step):
    if step > MAX_STEP:
        raise StepTooLarge("step %g exceeds %g" % (step, MAX_STEP))
    return step


def locate_in_triangle(T, p, tol=1e-6):
    """("vertex", i), ("segment", (i, j)) or ("interior", None) for p in triangle T (columns)."""
    c = np.linalg.solve(np.asarray(T, dtype=float), np.asarray(getattr(p, "vector", p), float))
    c = c / np.max(np.abs(c))
    small = np.abs(c) <= tol
    if small.sum() == 2:
        return "vertex", int(np.argmax(~small))
    if small.sum() == 1:
        i, j = (int(k) for k in np.flatnonzero(~small))
        return "segment", (i, j)
    return "interior", None


# rows of the limit-point table on the triangle model: angle range -> landing
TABLE_ROWS = (
    ("(-pi/3, pi/3)", "vertex", 0),
    ("pi/3", "segment", (0, 1)),
    ("(pi/3, pi)", "vertex", 1),
    ("pi", "segment", (1, 2)),
    ("(pi, 5pi/3)", "vertex", 2),
    ("5pi/3", "segment", (0, 2)),
)


def table_row(theta, tol=1e-9):
    """Expected landing (label, kind, where) of the theta-ray on the triangle model."""
    th = float(np.mod(theta + np.pi / 3, 2 * np.pi) - np.pi / 3)
    for k, edge in ((1, np.pi / 3), (3, np.pi), (5, -np.pi / 3), (5, 5 * np.pi / 3)):
        if abs(th - edge) <= tol:
            return TABLE_ROWS[k]
    if th < np.pi / 3:
        return TABLE_ROWS[0]
    if th < np.pi:
        return TABLE_ROWS[2]
    return TABLE_ROWS[4]


def base_change(fld, base):
    """Real matrix T with columns the triangle-model vertices in developed coordinates.

    For an exact model end (conjugate orientation) with the initial frame at
    ``base``, the nu-plane vertices v_k develop to T[:, k].
    """
    if not isinstance(fld, ModelEndField) or fld.orientation != "conjugate":
        raise PreconditionError("base_change needs an exact model end in the conjugate orientation")
    X0 = initial_frame(fld.psi(*base)).rows
    Z0 = np.diag([1, 1 / fld.xi, 1 / np.conj(fld.xi)]) @ X0
    T = (P_BAR @ Z0).real / 3
    return T.T


# ---------------------------------------------------------------------------
# twist detection

SEGMENTS = {"G+0": (0, 1), "G0-": (1, 2), "G+-": (0, 2)}


@dataclass(frozen=True)
class Witness:
    segment: str
    iota: float
    limit: object
    coords: tuple
    defect: float


@dataclass(frozen=True)
class TwistResult:
    sign: str
    witnesses: list
    holonomy: Holonomy = field(repr=False)


def _witness(tri, curve, segment, iota, tol):
    c = tri.coordinates(curve.limit.vector)
    c = c / np.max(np.abs(c))
    j, k = SEGMENTS[segment]
    m = 3 - j - k
    defect = abs(c[m])
    if defect > tol or abs(c[j]) < tol or abs(c[k]) < tol:
        raise InconsistentWitness(
            "ray at iota = %.6g lands at principal coordinates (%.3e, %.3e, %.3e), "
            "not on the open segment %s" % (iota, c[0], c[1], c[2], segment))
    return Witness(segment, float(iota), curve.limit, tuple(float(v) for v in c), float(defect))


def detect_twist(fld, R, y_max=40.0, y_base=2.0, step=1e-3, tol=1e-4):
    """Vertical twist sign of an end from developed rays and the loop holonomy.

    Re R > 0: the rays at iota = pi/3 - arg xi and pi - arg xi must land on
    the boundary segments G+0 and G0- of the principal triangle.
    Re R < 0: the ray at iota = pi/3 - arg xi must land on G+-.
    """
    R = complex(R)
    if R == 0 or is_snapped(R):
        raise PreconditionError("twist detection needs Re R != 0")
    a = np.angle(xi_branch(R))
    base = (0.0, float(y_base))
    H = holonomy_loop(fld, y_base, step=step)
    tri = projlin.principal_triangle(H.std_matrix.T)
    ray = lambda io: develop_ray(fld, io, y_max=y_max, step=step, start=base)
    if R.real > 0:
        io, ih = np.pi / 3 - a, np.pi - a
        w = [_witness(tri, ray(io), "G+0", io, tol), _witness(tri, ray(ih), "G0-", ih, tol)]
        return TwistResult(PLUS, w, H)
    io = np.pi / 3 - a
    return TwistResult(MINUS, [_witness(tri, ray(io), "G+-", io, tol)], H)
