"""Background conformal metrics, cubic differentials and plumbing data.

Metrics here are radial. They are stored in the end coordinate w = x + iy
with z = e^{iw}, so |z| = e^{-y} and the metric is e^{phi(y)} |dw|^2.
The z-chart factor is e^{phi(y)} / |z|^2. ``phi``, ``dphi`` and ``d2phi``
are derivatives with respect to y.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadRadii,
    DomainError,
    NeckTooWide,
    OutsideCollar,
    ZeroOnRing,
    ZeroPoint,
    ZeroResidue,
)

CUSP, FLAT, ANSATZ, GRAFTED = "Cusp", "FlatEnd", "Ansatz", "GraftedCollar"


def flat_log_factor(R_abs):
    """log(2^{1/3} |R|^{2/3}), the flat-end log factor in w."""
    return np.log(2.0) / 3.0 + 2.0 / 3.0 * np.log(R_abs)


def smoothstep(u):
    """Quintic smoothstep and its first two derivatives, clamped to [0, 1]."""
    u = np.clip(u, 0.0, 1.0)
    s = u**3 * (10 - 15 * u + 6 * u**2)
    ds = 30 * u**2 * (1 - u) ** 2
    d2s = 60 * u * (1 - u) * (1 - 2 * u)
    return s, ds, d2s


# ---------------------------------------------------------------------------
# radial profiles in s = log|z| = -y; each returns (phi, phi_s, phi_ss)


def _cusp_s(s):
    s = np.asarray(s, dtype=float)
    return -2 * np.log(np.abs(s)), -2 / s, 2 / s**2


def _const_s(c):
    def f(s):
        s = np.asarray(s, dtype=float)
        z = np.zeros_like(s)
        return c + z, z, z
    return f


def _csc_s(L):
    a = np.pi / L

    def f(s):
        s = np.asarray(s, dtype=float)
        sn = np.sin(a * s)
        return (2 * np.log(np.pi / abs(L)) - 2 * np.log(sn),
                -2 * a * np.cos(a * s) / sn,
                2 * a**2 / sn**2)
    return f


def _mirror_cusp_s(L):
    def f(s):
        s = np.asarray(s, dtype=float)
        d = L - s
        return -2 * np.log(np.abs(d)), 2 / d, 2 / d**2
    return f


def _blend(f1, f2, s0, s1):
    """f1 for s <= s0, f2 for s >= s1, quintic blend of log factors between."""
    def f(s):
        s = np.asarray(s, dtype=float)
        p1, q1, r1 = f1(s)
        p2, q2, r2 = f2(s)
        W, dW, d2W = smoothstep((s - s0) / (s1 - s0))
        dW = dW / (s1 - s0)
        d2W = d2W / (s1 - s0) ** 2
        return ((1 - W) * p1 + W * p2,
                (1 - W) * q1 + W * q2 + dW * (p2 - p1),
                (1 - W) * r1 + W * r2 + 2 * dW * (q2 - q1) + d2W * (p2 - p1))
    return f


@dataclass(frozen=True)
class ConformalMetric:
    """Radial metric e^{phi(y)} |dw|^2 on y_range.

    ``pieces`` is a list of (s_lo, s_hi, profile) covering the domain in
    s = -y; profiles return (phi, phi_s, phi_ss).
    """

    kind: str
    params: dict
    y_range: tuple
    pieces: tuple = field(repr=False)

    def _eval(self, y):
        y = np.asarray(y, dtype=float)
        s = -y
        out = [np.full(s.shape, np.nan) for _ in range(3)]
        for lo, hi, prof in self.pieces:
            mask = (s >= lo) & (s <= hi)
            if np.any(mask):
                vals = prof(s[mask])
                for o, v in zip(out, vals):
                    o[mask] = v
        return out

    def contains(self, y):
        y = np.asarray(y, dtype=float)
        return (y >= self.y_range[0]) & (y <= self.y_range[1])

    def _check(self, y):
        if not np.all(self.contains(y)):
            raise DomainError("%s metric evaluated outside y in %s" % (self.kind, self.y_range))

    def phi(self, y):
        self._check(y)
        return self._eval(y)[0]

    def dphi(self, y):
        self._check(y)
        return -self._eval(y)[1]

    def d2phi(self, y):
        self._check(y)
        return self._eval(y)[2]

    def phi_w(self, y):
        """Complex derivative d(phi)/dw = (phi_x - i phi_y)/2 of the radial factor."""
        return -0.5j * self.dphi(y)

    def curvature_y(self, y):
        p, _, pss = self._eval(np.asarray(y, dtype=float))
        self._check(y)
        return -0.5 * np.exp(-p) * pss

    def factor(self, z):
        """z-chart conformal factor e^phi / |z|^2."""
        z = complex(z)
        if z == 0:
            raise ZeroPoint("metric factor at z = 0")
        y = -np.log(abs(z))
        return float(np.exp(self.phi(y)) / abs(z) ** 2)


def _y_of(z):
    z = complex(z)
    if z == 0:
        raise ZeroPoint("z = 0")
    return -np.log(abs(z))


def CuspMetric():
    return ConformalMetric(CUSP, {}, (0.0, np.inf), ((-np.inf, -1e-300, _cusp_s),))


def FlatEndMetric(R_abs):
    if not R_abs > 0:
        raise ZeroResidue("flat end needs |R| > 0")
    c = flat_log_factor(R_abs)
    return ConformalMetric(FLAT, {"R_abs": float(R_abs)}, (-np.inf, np.inf),
                           ((-np.inf, np.inf, _const_s(c)),))


def cusp_factor(z):
    """4 / (|z|^2 (log|z|^2)^2) on the punctured unit disk."""
    r = abs(complex(z))
    if not 0 < r < 1:
        raise DomainError("cusp metric needs 0 < |z| < 1, got %g" % r)
    return 4.0 / (r**2 * np.log(r**2) ** 2)


def flat_factor(R_abs, z):
    """2^{1/3} |R|^{2/3} / |z|^2."""
    if not R_abs > 0:
        raise ZeroResidue("flat metric needs |R| > 0")
    r = abs(complex(z))
    if r == 0:
        raise ZeroPoint("flat metric at z = 0")
    return 2 ** (1 / 3) * R_abs ** (2 / 3) / r**2


def norm_U_squared(U, ephi):
    """|U|^2 e^{-3 phi}."""
    return np.abs(U) ** 2 / np.asarray(ephi, dtype=float) ** 3


# ---------------------------------------------------------------------------
# cubic differentials


def upstairs_coefficient(coeffs, w, orientation="conjugate"):
    """dw^3 coefficient of sum a_m z^m dz^3 pulled back to the w-cylinder.

    ``holomorphic``: the literal pullback under z = e^{iw},
        U_w = -i sum a_m e^{i(m+3)w}.
    ``conjugate``: U_w = i sum conj(a_m) e^{i(m+3)w}, the member of the
        R <-> -conj(R) pair for which the twist sign equals sign(Re R) with
        theta = iota + arg xi. |U_conj(x, y)| = |U_hol(-x, y)|, so Wang
        solutions are mirror images and holonomy spectra agree.
    """
    w = np.asarray(w, dtype=complex)
    out = np.zeros(w.shape, dtype=complex)
    for m, a in coeffs.items():
        c = np.conj(a) if orientation == "conjugate" else a
        out = out + c * np.exp(1j * (m + 3) * w)
    if orientation == "conjugate":
        return 1j * out
    if orientation == "holomorphic":
        return -1j * out
    raise ValueError("orientation must be 'conjugate' or 'holomorphic'")


def _fmt(x):
    return repr(float(x))


def _parse_coeff_line(line):
    parts = line.split()
    if len(parts) != 3:
        raise ValueError("coefficient line needs 'm re im': %r" % line)
    return int(parts[0]), complex(float(parts[1]), float(parts[2]))


@dataclass(frozen=True)
class CubicLaurent:
    """U = sum_{m >= -3} a_m z^m dz^3, truncated at degree M."""

    coeffs: dict
    M: int = 16

    def __post_init__(self):
        c = {int(m): complex(a) for m, a in self.coeffs.items() if complex(a) != 0}
        if any(m < -3 for m in c):
            raise ValueError("pole order above 3")
        object.__setattr__(self, "coeffs", c)

    def residue(self):
        return self.coeffs.get(-3, 0j)

    def value(self, z):
        z = np.asarray(z, dtype=complex)
        return sum(a * z**m for m, a in self.coeffs.items() if m <= self.M)

    def upstairs(self, w, orientation="conjugate"):
        c = {m: a for m, a in self.coeffs.items() if m <= self.M}
        return upstairs_coefficient(c, w, orientation)

    def to_text(self):
        lines = ["# cubic differential: m re im per line", "M = %d" % self.M]
        for m in sorted(self.coeffs):
            a = self.coeffs[m]
            lines.append("%d %s %s" % (m, _fmt(a.real), _fmt(a.imag)))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        coeffs, M = {}, 16
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" in line:
                k, v = (p.strip() for p in line.split("=", 1))
                if k != "M":
                    raise ValueError("unknown key %r" % k)
                M = int(v)
                continue
            m, a = _parse_coeff_line(line)
            coeffs[m] = a
        return cls(coeffs, M)


def _ring_check(U, metric, c, C, delta):
    r = np.linspace(c, C, 65)
    th = np.linspace(0, 2 * np.pi, 128, endpoint=False)
    Z = r[:, None] * np.exp(1j * th[None, :])
    y = -np.log(r)
    F = Z**3 * U.value(Z)  # coefficient of (dz/z)^3, same modulus as U_w
    nrm = np.abs(F) / np.exp(1.5 * metric.phi(y))[:, None]
    return float(nrm.min())


def ansatz_metric(U, c=0.1, C=0.5, delta=0.05):
    """Flat for |z| < c, cusp for |z| > C, quintic blend of log factors between."""
    if not 0 < c < C < 1:
        raise BadRadii("need 0 < c < C < 1, got c=%g C=%g" % (c, C))
    R = U.residue()
    if R == 0:
        return CuspMetric()
    sc, sC = np.log(c), np.log(C)
    flat = _const_s(flat_log_factor(abs(R)))
    pieces = ((-np.inf, sc, flat), (sc, sC, _blend(flat, _cusp_s, sc, sC)),
              (sC, -1e-300, _cusp_s))
    m = ConformalMetric(ANSATZ, {"R_abs": abs(R), "c": c, "C": C}, (0.0, np.inf), pieces)
    lo = _ring_check(U, m, c, C, delta)
    if lo < delta:
        raise ZeroOnRing("min ||U|| = %.3g < %.3g on the ring %g <= |z| <= %g" % (lo, delta, c, C))
    return m


def interpolation_curvature_bound(metric, n=2001):
    """sup |kappa| over the blend annulus, sampled."""
    if metric.kind != ANSATZ:
        return float(np.max(np.abs(metric.curvature_y(np.linspace(*_finite_range(metric), n)))))
    y = np.linspace(-np.log(metric.params["C"]), -np.log(metric.params["c"]), n)
    return float(np.max(np.abs(metric.curvature_y(y))))


def _finite_range(metric):
    y0, y1 = metric.y_range
    return max(y0, 1e-3), min(y1, 50.0)


def curvature(metric, z):
    """kappa = -(1/2) e^{-phi} Laplacian(phi), from the analytic profile."""
    y = _y_of(z)
    return float(metric.curvature_y(y))


def curvature_fd(metric, z, rel_step=1e-4):
    """Same quantity by centered differences of log(factor) in the z-plane."""
    z = complex(z)
    h = rel_step * abs(z)
    lf = lambda zz: np.log(metric.factor(zz))
    lap = (lf(z + h) + lf(z - h) + lf(z + 1j * h) + lf(z - 1j * h) - 4 * lf(z)) / h**2
    return float(-0.5 * lap / metric.factor(z))


# ---------------------------------------------------------------------------
# plumbing


@dataclass(frozen=True)
class PlumbingDatum:
    """Neck zz' = t with bilateral coefficients.

    a[m], b[m] (m >= -3) are the Laurent coefficients on the z and z'
    sides; regularity across the node forces b[-3] = -a[-3].
    """

    t: complex
    a: dict
    b: dict
    K: float = 0.5
    branch: int = 0
    M: int = 16

    def __post_init__(self):
        a = {int(m): complex(v) for m, v in self.a.items()}
        b = {int(m): complex(v) for m, v in self.b.items()}
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "t", complex(self.t))
        A, B = a.get(-3, 0j), b.get(-3, 0j)
        if abs(A + B) > 1e-14 * (1 + abs(A)):
            raise ValueError("residues must match: b[-3] = -a[-3]")
        if not 0 < abs(self.t) < self.K**2:
            raise NeckTooWide("need 0 < |t| < K^2")

    @property
    def log_t(self):
        return np.log(self.t) + 2j * np.pi * self.branch

    def at(self, t):
        return PlumbingDatum(t, self.a, self.b, self.K, self.branch, self.M)

    def swapped(self):
        """Same neck seen from the z' side."""
        return PlumbingDatum(self.t, self.b, self.a, self.K, self.branch, self.M)

    def z_coefficients(self):
        """Bilateral Laurent coefficients of U in the z chart."""
        out = {}
        for m, v in self.a.items():
            if m <= self.M:
                out[m] = out.get(m, 0) + v
        for m, v in self.b.items():
            n = m + 3
            if 1 <= n <= self.M:
                out[-n - 3] = out.get(-n - 3, 0) - v * self.t**n
        return out

    def residue(self):
        return self.a.get(-3, 0j)

    def to_text(self):
        lines = ["# plumbing datum", "t = %s %s" % (_fmt(self.t.real), _fmt(self.t.imag)),
                 "K = %s" % _fmt(self.K), "branch = %d" % self.branch, "M = %d" % self.M]
        for name, d in (("a", self.a), ("b", self.b)):
            lines.append("[%s]" % name)
            for m in sorted(d):
                lines.append("%d %s %s" % (m, _fmt(d[m].real), _fmt(d[m].imag)))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        keys, sec, data = {}, None, {"a": {}, "b": {}}
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line in ("[a]", "[b]"):
                sec = line[1]
            elif "=" in line:
                k, v = (p.strip() for p in line.split("=", 1))
                keys[k] = v
            elif sec is None:
                raise ValueError("coefficient line outside [a]/[b]: %r" % line)
            else:
                m, c = _parse_coeff_line(line)
                data[sec][m] = c
        unknown = set(keys) - {"t", "K", "branch", "M"}
        if unknown:
            raise ValueError("unknown keys %s" % sorted(unknown))
        tp = keys["t"].split()
        t = complex(float(tp[0]), float(tp[1]) if len(tp) > 1 else 0.0)
        return cls(t, data["a"], data["b"], float(keys.get("K", 0.5)),
                   int(keys.get("branch", 0)), int(keys.get("M", 16)))


def plumbing_differential(d, ell, with_error=False):
    """dl^3 coefficient of U_t at the collar point ell = log z - (1/2) log t."""
    ell = complex(ell)
    lt = d.log_t
    bound = np.log(d.K) - 0.5 * lt.real
    if abs(ell.real) > bound * (1 + 1e-12):
        raise OutsideCollar("|Re l| = %g exceeds collar half-length %g" % (abs(ell.real), bound))
    val = d.a.get(-3, 0j)
    err = 0.0
    for src, sign, e in ((d.a, 1.0, ell), (d.b, -1.0, -ell)):
        for m, c in src.items():
            n = m + 3
            if n < 1:
                continue
            term = sign * c * np.exp(0.5 * n * lt + n * e)
            if n <= d.M:
                val += term
            else:
                err += abs(term)
    return (complex(val), err) if with_error else complex(val)


def grafted_metric(t, K=0.5):
    """Cusp metrics at both collar ends joined through the csc collar metric.

    Zones in |z|: cusp on [2K/3, K], csc on [3|t|/K, K/3], cusp in z' on
    [|t|/K, 3|t|/(2K)], with quintic blends of the log factors between.
    """
    t = complex(t)
    if not 0 < abs(t) < (K / 3) ** 2:
        raise NeckTooWide("grafting needs 0 < |t| < (K/3)^2")
    L = np.log(abs(t))
    k1, k2, k3 = np.log(K / 3), np.log(2 * K / 3), np.log(K)
    csc = _csc_s(L)
    mir = _mirror_cusp_s(L)
    pieces = (
        (L - k3, L - k2, mir),
        (L - k2, L - k1, _blend(mir, csc, L - k2, L - k1)),
        (L - k1, k1, csc),
        (k1, k2, _blend(csc, _cusp_s, k1, k2)),
        (k2, k3, _cusp_s),
    )
    return ConformalMetric(GRAFTED, {"t": t, "K": K}, (-k3, k3 - L), pieces)
