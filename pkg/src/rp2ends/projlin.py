"""Points of RP^2 and unimodular 3x3 matrices.

Points are column vectors and matrices act on the left (``p -> M p``).
Holonomy matrices produced by :mod:`rp2ends.developing` act on row vectors
on the right, so callers pass their transpose here.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import (
    NonPositiveSpectrum,
    NonUnimodular,
    NotHyperbolic,
    NumericallyAmbiguous,
    UnsupportedHolonomy,
    ZeroVector,
)

HYPERBOLIC = "Hyperbolic"
QUASI_HYPERBOLIC = "QuasiHyperbolic"
PARABOLIC = "Parabolic"

DEFAULT_TOL = 1e-7
DEFAULT_TOL_DET = 1e-9


@dataclass(frozen=True)
class ProjPoint:
    """Unit representative with first nonzero coordinate positive."""

    coords: tuple

    @property
    def vector(self):
        return np.array(self.coords, dtype=float)

    def __repr__(self):
        return "ProjPoint(%.6g, %.6g, %.6g)" % self.coords


@dataclass(frozen=True)
class TwistParams:
    sigma: float
    tau: float


@dataclass(frozen=True)
class HolonomyClass:
    kind: str
    eigenvalues: tuple  # descending

    @property
    def log_eigenvalues(self):
        return tuple(np.log(self.eigenvalues))


def project(v):
    """Normalize a nonzero triple to its ProjPoint representative."""
    v = np.asarray(v, dtype=float).reshape(3)
    n = np.linalg.norm(v)
    if not np.isfinite(n) or n < 1e-300:
        raise ZeroVector("cannot project %r" % (v,))
    v = v / n
    # sign from the first coordinate that is not rounding noise
    idx = np.flatnonzero(np.abs(v) > 1e-12)
    if v[idx[0]] < 0:
        v = -v
    v = v + 0.0  # drop negative zeros
    return ProjPoint(tuple(float(c) for c in v))


def chart_distance(p, q):
    """Distance between two points of RP^2 on the unit sphere modulo sign."""
    a = p.vector if isinstance(p, ProjPoint) else project(p).vector
    b = q.vector if isinstance(q, ProjPoint) else project(q).vector
    return float(min(np.linalg.norm(a - b), np.linalg.norm(a + b)))


def twist_matrix(sigma, tau=None):
    """Goldman's twist matrix D(e^{-sigma-tau}, e^{2 tau}, e^{sigma-tau})."""
    if isinstance(sigma, TwistParams):
        sigma, tau = sigma.sigma, sigma.tau
    return np.diag(np.exp([-sigma - tau, 2.0 * tau, sigma - tau]))


def adjugate(M):
    """Transposed cofactor matrix; equals M^{-1} when det M = 1.

    Built from 2x2 minors, so for unimodular but badly conditioned M the
    small eigenvalues of M are recovered far more accurately as
    reciprocals of the large eigenvalues of adj(M) than from eig(M).
    """
    a, b, c = np.asarray(M, dtype=float).T
    return np.array([np.cross(b, c), np.cross(c, a), np.cross(a, b)])


def check_unimodular(M, tol_det=DEFAULT_TOL_DET):
    M = np.asarray(M, dtype=float)
    if M.shape != (3, 3) or not np.all(np.isfinite(M)):
        raise NonUnimodular("expected a finite 3x3 matrix")
    d = np.linalg.det(M)
    if abs(d - 1.0) > tol_det:
        raise NonUnimodular("det = %.3e" % d)
    return M


def _spectrum(M):
    """Eigenvalues (descending by real part) with condition numbers.

    Large eigenvalues are read from M, those below 1/2 from adj(M).
    """
    w, vl, vr = sla.eig(M, left=True, right=True)
    kappa = 1.0 / np.maximum(np.abs(np.sum(vl.conj() * vr, axis=0)), 1e-300)
    order = np.lexsort((-w.imag, -w.real))
    w, kappa = w[order], kappa[order]
    winv = np.linalg.eigvals(adjugate(M))
    small = 1.0 / winv
    small = small[np.lexsort((-small.imag, -small.real))]
    lam = np.where(np.abs(w) >= 0.5, w, small)
    return lam, kappa


def eigenvalues(M):
    """Eigenvalues of a real 3x3 matrix, descending, small ones via the adjugate."""
    return _spectrum(np.asarray(M, dtype=float))[0]


def _clusters(lam, kappa, tol):
    """Group eigenvalues whose conditioned relative gap is below tol.

    Dividing the relative gap by the smaller eigenvalue condition number
    estimates the relative perturbation needed to merge the pair, so
    split Jordan blocks of conjugated matrices are recognized.
    """
    n = len(lam)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            scale = max(abs(lam[i]), abs(lam[j]))
            gap = abs(lam[i] - lam[j]) / scale / min(kappa[i], kappa[j])
            if gap < tol:
                parent[find(j)] = find(i)
            elif gap <= 10 * tol:
                raise NumericallyAmbiguous(
                    "eigenvalue gap %.3e in gray zone [%.1e, %.1e]" % (gap, tol, 10 * tol))
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _rank(A, thresh):
    return int(np.sum(np.linalg.svd(A, compute_uv=False) > thresh))


def _analyze(M, tol):
    M = np.asarray(M, dtype=float)
    lam, kappa = _spectrum(M)
    groups = _clusters(lam, kappa, tol)
    means = []
    for g in groups:
        m = np.mean(lam[g])
        if m.real <= 0 or abs(m.imag) > 10 * tol * abs(m):
            raise NonPositiveSpectrum("eigenvalue %r is not real positive" % complex(m))
        means.append((float(m.real), len(g)))
    means.sort(key=lambda t: -t[0])
    sizes = sorted(k for _, k in means)
    normM = np.linalg.norm(M, 2)
    if sizes == [1, 1, 1]:
        kind = HYPERBOLIC
    elif sizes == [1, 2]:
        alpha = next(a for a, k in means if k == 2)
        if _rank(M - alpha * np.eye(3), tol * normM) != 2:
            raise UnsupportedHolonomy("repeated eigenvalue %.6g is semisimple" % alpha)
        kind = QUASI_HYPERBOLIC
    else:
        alpha = means[0][0]
        if abs(alpha - 1.0) > 10 * tol:
            raise NonPositiveSpectrum("triple eigenvalue %.6g differs from 1" % alpha)
        if _rank(M - alpha * np.eye(3), tol * normM) != 2:
            raise UnsupportedHolonomy("triple eigenvalue without a full Jordan block")
        kind = PARABOLIC
    eig = []
    for a, k in means:
        eig.extend([a] * k)
    return kind, tuple(eig), means


def classify_matrix(M, tol=DEFAULT_TOL):
    """Holonomy class of a unimodular matrix from its Jordan structure."""
    kind, eig, _ = _analyze(M, tol)
    return HolonomyClass(kind, eig)


def _null_vector(M, lam):
    """Real eigenvector for the real eigenvalue lam."""
    M = np.asarray(M, dtype=float)
    if lam >= 0.5:
        A = M - lam * np.eye(3)
    else:
        A = adjugate(M) - np.eye(3) / lam
    A = A / max(np.linalg.norm(A), 1e-300)
    _, _, vh = np.linalg.svd(A)
    return vh[-1]


def fixed_points(M, tol=DEFAULT_TOL):
    """Fixed points in RP^2 labelled by eigenvalue rank."""
    kind, eig, means = _analyze(M, tol)
    if kind == HYPERBOLIC:
        labels = ["attracting", "saddle", "repelling"]
        return [(project(_null_vector(M, a)), s) for (a, _), s in zip(means, labels)]
    if kind == PARABOLIC:
        return [(project(_null_vector(M, 1.0)), "parabolic")]
    out = []
    rep = next(a for a, k in means if k == 2)
    simple = next(a for a, k in means if k == 1)
    for a, k in means:
        if k == 2:
            out.append((project(_null_vector(M, a)), "parabolic"))
        else:
            out.append((project(_null_vector(M, a)), "attracting" if simple > rep else "repelling"))
    return out


@dataclass(frozen=True)
class PrincipalTriangle:
    """Triangle spanned by Fix+, Fix0, Fix- of a hyperbolic matrix.

    ``basis`` holds representatives of the vertices as columns; the
    triangle is the projection of their positive cone.
    """

    vertices: tuple
    basis: np.ndarray

    def coordinates(self, p):
        return np.linalg.solve(self.basis, np.asarray(p, dtype=float).reshape(3))

    def contains(self, p, tol=0.0):
        c = self.coordinates(p)
        c = c / np.max(np.abs(c))
        return bool(np.all(c > -tol) or np.all(c < tol))

    def with_signs(self, signs):
        """Same vertices with representative signs flipped to `signs`."""
        B = self.basis * np.asarray(signs, dtype=float)[None, :]
        return PrincipalTriangle(self.vertices, B)


def principal_triangle(M, tol=DEFAULT_TOL):
    kind, _, _ = _analyze(M, tol)
    if kind != HYPERBOLIC:
        raise NotHyperbolic("principal triangle needs hyperbolic holonomy, got %s" % kind)
    fps = fixed_points(M, tol)
    verts = tuple(p for p, _ in fps)
    basis = np.column_stack([p.vector for p in verts])
    return PrincipalTriangle(verts, basis)
