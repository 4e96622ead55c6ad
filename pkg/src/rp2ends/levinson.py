"""Asymptotic solutions of dX/dy = (c(s) B + R(s, y)) X with B diagonal.

For each k the solution X^(k) ~ e^{c mu_k y} v_k is the fixed point of

    X_i = delta_ik e^{c mu_k y} - int_y^inf e^{c mu_i (y - t)} (R X)_i dt   (i <= q)
    X_i = int_T^y e^{c mu_i (y - t)} (R X)_i dt                            (i > q)

where q is the last index with mu_q = mu_k. Iterates are stored scaled,
Y = X e^{-c mu_k y}, so that every kernel is bounded by one.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad_vec, simpson

from .errors import IterationStall, NonIntegrablePerturbation, PreconditionError

# one-panel cubic rules on a uniform grid, weights for four consecutive nodes
_MID = np.array([-1.0, 13.0, 13.0, -1.0]) / 24   # panel between nodes 1 and 2
_FIRST = np.array([9.0, 19.0, -5.0, 1.0]) / 24   # panel between nodes 0 and 1
_LAST = np.array([1.0, -5.0, 19.0, 9.0]) / 24    # panel between nodes 2 and 3


@dataclass(frozen=True)
class PerturbedSystem:
    """mu descending, R(s, y) -> (..., n, n) for array y, c(s) > 0, start T."""

    mu: tuple
    R: object = field(repr=False)
    c: object = field(default=lambda s: 1.0, repr=False)
    T: float = 0.0

    def __post_init__(self):
        mu = tuple(float(m) for m in self.mu)
        if any(a < b for a, b in zip(mu, mu[1:])):
            raise PreconditionError("mu must be ordered descending")
        object.__setattr__(self, "mu", mu)

    @property
    def n(self):
        return len(self.mu)


def split_index(mu, k, tol=1e-12):
    """Largest (1-based) q with mu_q = mu_k (up to tol)."""
    mu = list(mu)
    q = k
    while q < len(mu) and abs(mu[q] - mu[k - 1]) <= tol * max(1.0, abs(mu[k - 1])):
        q += 1
    return q


def _panels(g, h, lam, future):
    """One-panel integrals of e^{lam (ref - t)} g(t), ref the left (future) or right end."""
    N = g.shape[-1]
    if N < 4:
        raise PreconditionError("need at least 4 grid points")
    out = np.empty(g.shape[:-1] + (N - 1,), dtype=g.dtype)
    off = np.arange(-1, 3)
    base = np.arange(1, N - 2)
    if len(base):
        ref = 0.0 if future else 1.0  # in units of h relative to the panel's left node
        wt = _MID * np.exp(lam * h * (ref - off))
        G = np.stack([g[..., base + o] for o in off], axis=-1)
        out[..., base] = h * (G @ wt)
    for p, idx, w in ((0, np.arange(0, 4), _FIRST), (N - 2, np.arange(N - 4, N), _LAST)):
        ref = p if future else p + 1
        wt = w * np.exp(lam * h * (ref - idx))
        out[..., p] = h * (g[..., idx] @ wt)
    return out


def _future(g, h, lam):
    """F(y_n) = int_{y_n}^{y_N} e^{lam (y_n - t)} g dt, lam >= 0."""
    pan = _panels(g, h, lam, True)
    N = g.shape[-1]
    F = np.zeros(g.shape, dtype=g.dtype)
    decay = np.exp(-lam * h)
    for n in range(N - 2, -1, -1):
        F[..., n] = decay * F[..., n + 1] + pan[..., n]
    return F


def _past(g, h, lam):
    """P(y_n) = int_{y_0}^{y_n} e^{lam (y_n - t)} g dt, lam < 0."""
    pan = _panels(g, h, lam, False)
    N = g.shape[-1]
    Pv = np.zeros(g.shape, dtype=g.dtype)
    decay = np.exp(lam * h)
    for n in range(1, N):
        Pv[..., n] = decay * Pv[..., n - 1] + pan[..., n - 1]
    return Pv


def _quad(f, a, b):
    # absolute floor: R is often evaluated with cancellation near 1e-16
    return quad_vec(f, a, b, epsabs=1e-15, epsrel=1e-10, limit=400)[0]


def _sampled(sys, s, a, b, n=4001):
    """int_a^b ||R|| from one vectorized evaluation of R."""
    t = np.linspace(a, b, n)
    return float(simpson(_norm(np.asarray(sys.R(s, t))), x=t))


def _norm(Rm):
    """Max row sum of |R| per sample."""
    return np.max(np.sum(np.abs(Rm), axis=-1), axis=-1)


def tail_integral(sys, s, y_max):
    """Bound on int_{y_max}^inf ||R||, checking decay on two doubling intervals."""
    L = max(y_max - sys.T, 1.0)
    f = lambda a, b: _sampled(sys, s, a, b)
    t1 = f(y_max, y_max + L)
    t2 = f(y_max + L, y_max + 3 * L)
    if t1 > 1e-14 and t2 > 0.5 * t1:
        raise NonIntegrablePerturbation(
            "||R|| does not decay: %.3e on [Y, Y+L] vs %.3e on [Y+L, Y+3L]" % (t1, t2))
    r = t2 / t1 if t1 > 0 else 0.0
    return float(t1 + t2 / (1 - r)) if r < 1 else float(t1 + 2 * t2)


@dataclass(frozen=True)
class AsymptoticSolution:
    k: int
    q: int
    y: np.ndarray = field(repr=False)
    Y: np.ndarray = field(repr=False)
    iterates_kept: int
    diffs: list
    tail_error: float
    c: float
    mu_k: float

    @property
    def X(self):
        return self.Y * np.exp(self.c * self.mu_k * self.y)[None, :]

    @property
    def samples(self):
        return self.X

    @property
    def majorization_ratio(self):
        """max d_{m+1} / d_m over iterates after the first."""
        d = [v for v in self.diffs if v > 0]
        if len(d) < 3:
            return 0.0
        return float(max(b / a for a, b in zip(d[1:], d[2:])))


def iterate_solution(sys, s, k, y_grid, m_max=60, rtol=1e-12):
    """Successive approximation for X^(k) on a uniform grid from T to Y_max."""
    y = np.asarray(y_grid, dtype=float)
    if y[0] < sys.T - 1e-12:
        raise PreconditionError("grid starts before T")
    h = y[1] - y[0]
    if np.max(np.abs(np.diff(y) - h)) > 1e-9 * max(h, 1.0):
        raise PreconditionError("y_grid must be uniform")
    n = sys.n
    c = float(sys.c(s))
    if not c > 0:
        raise PreconditionError("c(s) must be positive")
    mu = np.array(sys.mu)
    q = split_index(mu, k)
    Rm = np.asarray(sys.R(s, y))
    cplx = np.iscomplexobj(Rm)
    tail = tail_integral(sys, s, y[-1]) if np.any(Rm != 0) else 0.0
    lam = c * (mu - mu[k - 1])
    Y = np.zeros((n, len(y)), dtype=complex if cplx else float)
    Y[k - 1] = 1.0
    diffs = []
    m = 0
    while True:
        g = np.einsum("nij,jn->in", Rm, Y)
        Ynew = np.zeros_like(Y)
        for i in range(n):
            if i < q:
                Ynew[i] = (1.0 if i == k - 1 else 0.0) - _future(g[i], h, lam[i])
            else:
                Ynew[i] = _past(g[i], h, lam[i])
        d = float(np.max(np.abs(Ynew - Y)))
        diffs.append(d)
        Y = Ynew
        m += 1
        scale = max(1.0, float(np.max(np.abs(Y))))
        if not np.isfinite(d):
            raise IterationStall("iterates overflow after %d steps" % m)
        if d <= rtol * scale:
            break
        if m >= m_max:
            raise IterationStall("change %.3e after %d iterates" % (d, m))
    return AsymptoticSolution(k, q, y, Y, m, diffs[:-1] if len(diffs) > 1 else diffs,
                              tail * float(np.max(np.abs(Y))), c, float(mu[k - 1]))


def l1_norm(sys, s, a=None, b=np.inf):
    a = sys.T if a is None else a
    return float(_quad(lambda t: _norm(sys.R(s, np.array([t])))[0], a, b))


def error_bound(sys, s, k, y, eps=None):
    """e^{-eps y} ||R||_{L1} + 2 max_i sum_j int_{y/2}^inf |R_ij|."""
    mu = np.array(sys.mu)
    c = abs(float(sys.c(s)))
    if eps is None:
        gaps = np.abs(mu[:, None] - mu[None, :])
        gaps = gaps[gaps > 0]
        eps = 0.5 * c * gaps.min() if gaps.size else 0.0
    total = l1_norm(sys, s)
    if total == 0:
        return 0.0
    rows = _quad(lambda t: np.sum(np.abs(sys.R(s, np.array([t]))[0]), axis=-1), y / 2, np.inf)
    return float(np.exp(-eps * y) * total + 2 * np.max(rows))


def parameter_continuity_scan(sys, s_list, k, y_probe, y_grid):
    """Max adjacent difference of X^(k)(s, y_probe) across s_list."""
    y = np.asarray(y_grid, dtype=float)
    j = int(np.argmin(np.abs(y - y_probe)))
    vals = [iterate_solution(sys, s, k, y).X[:, j] for s in s_list]
    return float(max(np.max(np.abs(a - b)) for a, b in zip(vals, vals[1:])))


# ---------------------------------------------------------------------------
# ray systems from transport fields


@dataclass(frozen=True)
class RaySystem(PerturbedSystem):
    """Frame system along a ray, written in the eigenbasis of its limit.

    ``perm`` maps Levinson indices to triangle vertex indices.
    """

    perm: tuple = (0, 1, 2)

    def with_scale(self):
        """Family s -> s * R, for continuity scans."""
        R = self.R
        return PerturbedSystem(self.mu, lambda s, y: s * R(0.0, y), self.c, self.T)


def ray_system(fld, R, iota, y_base, x_base=0.0):
    """Levinson system for the ray (x_base, y_base) + t (cos iota, sin iota).

    The frame is moved to the nu-plane (f_nu = f_w / xi) and then to the
    eigenbasis of the limiting direction matrix; the remainder is R(t).
    """
    from .developing import P_BAR, ModelEndField

    model = ModelEndField(R, getattr(fld, "orientation", "conjugate"))
    xi = model.xi
    Dg = np.diag([1, 1 / xi, 1 / np.conj(xi)])
    Dg_inv = np.diag([1, xi, np.conj(xi)])
    ci, si = np.cos(iota), np.sin(iota)
    # the model system is constant; its nu-frame is diagonal in the vertex basis
    E0 = P_BAR / np.sqrt(3)
    A0, B0 = model.matrices(np.array([0.0]), np.array([1.0]))
    W0 = np.linalg.solve(E0, Dg @ (ci * A0[0] + si * B0[0]) @ Dg_inv @ E0)
    d0 = np.diag(W0)
    if np.max(np.abs(W0 - np.diag(d0))) > 1e-10 * max(1.0, np.max(np.abs(d0))) \
            or np.max(np.abs(d0.imag)) > 1e-10:
        raise PreconditionError("limit system is not diagonal in the vertex basis")
    order = tuple(int(i) for i in np.argsort(-d0.real, kind="stable"))
    # snap eigenvalues that agree to rounding so that repeated pairs split cleanly
    mu_sorted = [float(d0[i].real) for i in order]
    for j in range(1, len(mu_sorted)):
        if abs(mu_sorted[j] - mu_sorted[j - 1]) <= 1e-12 * max(1.0, abs(mu_sorted[j])):
            mu_sorted[j] = mu_sorted[j - 1]
    mu_sorted = tuple(mu_sorted)
    E = E0[:, list(order)]
    E_inv = np.linalg.inv(E)
    D = np.diag(mu_sorted)

    def Rt(s, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        A, B = fld.matrices(x_base + t * ci, y_base + t * si)
        M = ci * A + si * B
        W = E_inv @ Dg @ M @ Dg_inv @ E
        return W - D

    return RaySystem(mu_sorted, Rt, lambda s: 1.0, 0.0, order)
