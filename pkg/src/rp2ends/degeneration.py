"""Plumbing families: neck grids, holonomy sweeps as t -> 0, parabolic necks.

A neck zz' = t is stored in the z-end coordinate: x = arg z, y = -log|z|,
so the collar |t|/K <= |z| <= K is y in [-log K, log K - log|t|] and the
core loop |z| = |t|^{1/2} sits at y = -(1/2) log|t|. The symmetric collar
coordinate is mu = -y - (1/2) log|t|.
"""

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from . import developing as dev
from . import geometry as geo
from . import projlin
from . import wang
from .errors import (
    BarrierFailure,
    DecayHypothesisViolated,
    PreconditionError,
)
from .fileio import atomic_write
from .residue import chi_roots

QH, PARABOLIC = "QHNeck", "ParabolicNeck"
CSV_HEADER = ["t", "lambda1", "lambda2", "lambda3", "dev1", "dev2", "dev3", "residual",
              "barrier_sup"]


def mu_of(y, t):
    return -y - 0.5 * np.log(abs(t))


def y_of(mu, t):
    return -mu - 0.5 * np.log(abs(t))


@dataclass(frozen=True)
class FamilySpec:
    """One-neck plumbing family t -> (a_m(t), b_m(t)).

    ``b`` defaults to the residue-matched b[-3] = -a[-3](t) with no other
    terms. ``decay_C`` is the constant of the parabolic decay hypothesis.
    """

    a: object = field(repr=False)
    t_sweep: tuple
    kind: str = QH
    b: object = field(default=None, repr=False)
    Nx: int = 32
    per_unit: int = 8
    K: float = 0.5
    branch: int = 0
    alpha: float = 0.5
    beta: float = 1.0
    step: float = 1e-3
    tol: float = 1e-10
    orientation: str = "conjugate"
    decay_C: float = None

    def __post_init__(self):
        ts = tuple(complex(t) if np.iscomplexobj(t) and complex(t).imag != 0 else float(np.real(t))
                   for t in self.t_sweep)
        object.__setattr__(self, "t_sweep", ts)
        if self.kind not in (QH, PARABOLIC):
            raise PreconditionError("kind must be %s or %s" % (QH, PARABOLIC))
        if not ts:
            raise PreconditionError("empty t sweep")
        mods = [abs(t) for t in ts]
        if any(b >= a for a, b in zip(mods, mods[1:])):
            raise PreconditionError("|t| must be strictly decreasing along the sweep")
        a0 = abs(self.a_at(0.0).get(-3, 0))
        if self.kind == QH:
            lo = min([a0] + [abs(self.a_at(t).get(-3, 0)) for t in ts])
            if lo < 1e-3:
                raise PreconditionError("QH neck needs a_-3(t) bounded away from 0 (min %.3g)" % lo)
        elif a0 != 0:
            raise PreconditionError("parabolic neck needs a_-3(0) = 0, got %r" % a0)

    def a_at(self, t):
        return {int(m): complex(v) for m, v in self.a(t).items()}

    def b_at(self, t):
        if self.b is not None:
            return {int(m): complex(v) for m, v in self.b(t).items()}
        a3 = self.a_at(t).get(-3, 0j)
        return {-3: -a3} if a3 != 0 else {}

    def datum(self, t):
        return geo.PlumbingDatum(t, self.a_at(t), self.b_at(t), self.K, self.branch)

    @property
    def limit_residue(self):
        return self.a_at(0.0).get(-3, 0j)


def _collar(datum):
    y0 = -np.log(datum.K)
    y1 = np.log(datum.K) - np.log(abs(datum.t))
    return y0, y1


def neck_field_w(datum, orientation="conjugate"):
    """U_w(w) on the neck, from the bilateral Laurent coefficients in z."""
    coeffs = datum.z_coefficients()
    return lambda w: geo.upstairs_coefficient(coeffs, w, orientation)


def neck_metric(datum, kind=QH):
    if kind == QH:
        return geo.FlatEndMetric(abs(datum.a.get(-3, 0j)))
    return geo.grafted_metric(datum.t, datum.K)


def neck_grid(datum, Nx=32, per_unit=8, orientation="conjugate", kind=QH):
    """CylinderGrid over the whole collar; rows grow with the neck length."""
    y0, y1 = _collar(datum)
    Ny = int(np.ceil(per_unit * (y1 - y0))) + 1
    return wang.grid_from_end(neck_metric(datum, kind), neck_field_w(datum, orientation),
                              Nx, Ny, y0, y1)


def neck_barriers(grid, t, alpha=0.5, beta=1.0, K=0.5):
    """S_t = beta |t|^alpha e^{2 alpha |mu|} (quartic core), beta doubled until checked."""
    S0 = wang.neck_barrier(t, alpha, 1.0, mu_of(grid.y, t), K)
    prof = np.repeat(S0[:, None], grid.Nx, axis=1)
    b = float(beta)
    for k in range(wang.MAX_DOUBLINGS + 1):
        S = b * prof
        if wang._exp_ok(grid, S, 0.0):
            return wang.BarrierPair(S, -S, float(alpha), b, "neck", k)
        b *= 2
    raise BarrierFailure("neck barrier fails after %d doublings (alpha = %g)"
                         % (wang.MAX_DOUBLINGS, alpha))


def parabolic_barriers(grid):
    """Constant pair log E_hi >= u >= log min(-kappa), valid while kappa < 0."""
    hi = np.log(wang.constant_barrier_level(grid))
    k_max = float(np.max(grid.kappa))
    if not k_max < 0:
        raise BarrierFailure("kappa reaches %.3g >= 0: no constant subsolution" % k_max)
    lo = min(0.0, np.log(-k_max))
    S = np.full(grid.phi.shape, hi)
    s = np.full(grid.phi.shape, lo)
    if np.any(wang.wang_residual(grid, S)[1:-1] > 0) or np.any(wang.wang_residual(grid, s)[1:-1] < 0):
        raise BarrierFailure("constant barrier check fails on the grid")
    return wang.BarrierPair(S, s, 0.0, float(hi), "constant")


# ---------------------------------------------------------------------------
# quasi-hyperbolic sweeps


@dataclass(frozen=True)
class SweepRow:
    t: complex
    eigenvalues: tuple
    deviation: tuple
    residual: float
    barrier_sup: float
    bracketed: bool
    homotopy_defect: float = float("nan")


def limit_spectrum(R):
    return tuple(sorted(np.exp(2 * np.pi * np.array(chi_roots(R))), reverse=True))


def solve_neck(spec, t):
    """Grid, barriers, Wang solution and transport field for one sweep row."""
    d = spec.datum(t)
    g = neck_grid(d, spec.Nx, spec.per_unit, spec.orientation, spec.kind)
    if spec.kind == QH:
        bar = neck_barriers(g, t, spec.alpha, spec.beta, spec.K)
    else:
        # the model grafting can have kappa > 0 on its blend annuli for larger |t|,
        # where no constant subsolution exists; solve unbracketed there
        try:
            bar = parabolic_barriers(g)
        except BarrierFailure:
            bar = None
    rep = wang.solve_wang(g, bc="dirichlet_zero", tol=spec.tol, barriers=bar)
    fld = dev.GridField(g.with_u(rep.u), neck_metric(d, spec.kind),
                        neck_field_w(d, spec.orientation))
    return d, g, rep, fld


def _qh_row(spec, t, homotopy_check):
    d, g, rep, fld = solve_neck(spec, t)
    yc = y_of(0.0, t)
    H = dev.holonomy_loop(fld, yc, step=spec.step)
    ev = tuple(sorted(H.eigenvalues, reverse=True))
    lim = limit_spectrum(spec.limit_residue)
    devs = tuple(float(abs(a / b - 1)) for a, b in zip(ev, lim))
    hd = float("nan")
    if homotopy_check:
        H2 = dev.holonomy_loop(fld, y_of(0.5, t), step=spec.step)
        e2 = sorted(H2.eigenvalues, reverse=True)
        hd = float(max(abs(a / b - 1) for a, b in zip(ev, e2)))
    return SweepRow(t, ev, devs, rep.residual_inf, float(np.max(rep.barriers.S)),
                    rep.bracketed, hd)


def qh_sweep(spec, homotopy_check=False, workers=1):
    """Core-loop holonomy eigenvalues along the sweep, against e^{2 pi lambda_i(a_-3(0))}."""
    if spec.kind != QH:
        raise PreconditionError("qh_sweep needs a %s family" % QH)
    run = lambda t: _qh_row(spec, t, homotopy_check)
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            return list(ex.map(run, spec.t_sweep))
    return [run(t) for t in spec.t_sweep]


def deviations_monotone(rows, tail=3, slack=0.1):
    """Max deviation non-increasing (within a relative slack) on the last rows."""
    d = [max(r.deviation) for r in rows[-tail:]]
    return all(b <= a * (1 + slack) for a, b in zip(d, d[1:]))


def _fmt_t(t):
    t = complex(t)
    return repr(t.real) if t.imag == 0 else "%r%+ri" % (t.real, t.imag)


def sweep_csv_text(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([_fmt_t(r.t)] + [repr(float(v)) for v in r.eigenvalues]
                   + [repr(float(v)) for v in r.deviation]
                   + [repr(float(r.residual)), repr(float(r.barrier_sup))])
    return buf.getvalue()


def write_sweep_csv(rows, path):
    atomic_write(path, sweep_csv_text(rows))


# ---------------------------------------------------------------------------
# parabolic necks


@dataclass(frozen=True)
class ParabolicRow:
    t: complex
    A: np.ndarray = field(repr=False)
    row_norm: float
    exp_eigenvalues: tuple
    kappa_sup: float
    residual: float
    bracketed: object = None


def decay_sup(spec, t, n_theta=64):
    """|log|t||^3 sup |z^3 (U_t - U_0) / dz^3| over the collar boundary circles."""
    d = spec.datum(t)
    c_t = d.z_coefficients()
    c_0 = spec.a_at(0.0)
    diff = {m: c_t.get(m, 0) - c_0.get(m, 0) for m in set(c_t) | set(c_0)}
    th = 2 * np.pi * np.arange(n_theta) / n_theta
    out = 0.0
    for r in (abs(t) / spec.K, spec.K):
        z = r * np.exp(1j * th)
        v = sum(c * z ** (m + 3) for m, c in diff.items()) if diff else 0 * z
        out = max(out, float(np.max(np.abs(v))))
    return out * abs(np.log(abs(t))) ** 3


def check_decay_hypothesis(spec):
    if spec.decay_C is None:
        raise DecayHypothesisViolated("parabolic family carries no decay constant C")
    for t in spec.t_sweep:
        v = decay_sup(spec, t)
        if v > spec.decay_C:
            raise DecayHypothesisViolated(
                "|log|t||^3 sup|z^3 (U_t - U_0)| = %.3e exceeds C = %.3e at t = %s"
                % (v, spec.decay_C, _fmt_t(t)))


def parabolic_neck_matrix(fld, t, x=0.0):
    """x-coefficient matrix of the frame system on the core loop at angle x."""
    A, _ = fld.matrices(np.array([float(x)]), np.array([y_of(0.0, t)]))
    return A[0]


def parabolic_sweep(spec):
    """A_t on the core loop of grafted necks, with e^{2 pi A_t} spectra."""
    if spec.kind != PARABOLIC:
        raise PreconditionError("parabolic_sweep needs a %s family" % PARABOLIC)
    check_decay_hypothesis(spec)
    rows = []
    for t in spec.t_sweep:
        d, g, rep, fld = solve_neck(spec, t)
        A = parabolic_neck_matrix(fld, t)
        rn = float(np.max(np.sum(np.abs(A[1:]), axis=1)))
        ev = np.linalg.eigvals(expm(2 * np.pi * A))
        ev = tuple(sorted((complex(v) for v in ev), key=lambda v: -v.real))
        rows.append(ParabolicRow(t, A, rn, ev, kappa_sup(t, spec.K), rep.residual_inf,
                                rep.bracketed if rep.barriers is not None else None))
    return rows


@dataclass(frozen=True)
class CurvatureFit:
    t: tuple
    sup: tuple
    gamma: float
    delta: float


def kappa_sup(t, K=0.5, n=20001):
    """sup |kappa_t + 1| of the grafted metric over the collar."""
    m = geo.grafted_metric(t, K)
    y = np.linspace(m.y_range[0], m.y_range[1], n)
    return float(np.max(np.abs(m.curvature_y(y) + 1)))


def curvature_fit(ts, K=0.5):
    """Fit sup|kappa_t + 1| <= gamma |t|^delta: log-log slope, then the smallest gamma."""
    at = np.array([abs(t) for t in ts])
    sup = np.array([kappa_sup(t, K) for t in ts])
    delta = float(np.polyfit(np.log(at), np.log(sup), 1)[0])
    gamma = float(np.max(sup / at**delta))
    return CurvatureFit(tuple(at), tuple(sup), gamma, delta)


# ---------------------------------------------------------------------------
# twist witnesses along a family


@dataclass(frozen=True)
class WitnessRow:
    t: complex
    witnesses: list
    y_cut: float


@dataclass(frozen=True)
class WitnessReport:
    rows: list
    adjacent_deviation: tuple

    @property
    def max_adjacent_deviation(self):
        return max(self.adjacent_deviation) if self.adjacent_deviation else 0.0


def cutoff_field(spec, t):
    """Solved neck field for y <= -1 - (1/2) log|t|, exact model end beyond."""
    _, _, _, fld = solve_neck(spec, t)
    y_cut = -1.0 - 0.5 * np.log(abs(t))
    R = spec.a_at(t)[-3]
    return dev.CompositeField(fld, dev.model_end_field(R, spec.orientation), y_cut), y_cut


def twist_witness_sweep(spec, y_base=1.2, y_max=40.0, step=1e-3, tol=1e-2):
    """detect_twist on the cutoff field for each t, and adjacent witness deviations."""
    if spec.kind != QH:
        raise PreconditionError("twist witnesses need a %s family" % QH)
    if not spec.limit_residue.real > 0:
        raise PreconditionError("witness sweep needs Re a_-3(0) > 0; for Re < 0 sweep the "
                                "swapped family, whose twist tends to minus infinity")
    rows = []
    for t in spec.t_sweep:
        fld, y_cut = cutoff_field(spec, t)
        if y_base > y_cut:
            raise PreconditionError("base height %.3g lies beyond the cutoff %.3g" % (y_base, y_cut))
        res = dev.detect_twist(fld, spec.a_at(t)[-3], y_max=y_max, y_base=y_base, step=step,
                               tol=tol)
        rows.append(WitnessRow(t, res.witnesses, float(y_cut)))
    adj = []
    for r0, r1 in zip(rows, rows[1:]):
        w0 = {w.segment: w for w in r0.witnesses}
        dmax = 0.0
        for w in r1.witnesses:
            if w.segment in w0:
                dmax = max(dmax, projlin.chart_distance(w.limit, w0[w.segment].limit))
        adj.append(float(dmax))
    return WitnessReport(rows, tuple(adj))
