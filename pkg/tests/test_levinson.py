import numpy as np
import pytest
from scipy.integrate import solve_ivp

from rp2ends import levinson as lev
from rp2ends.errors import IterationStall, NonIntegrablePerturbation, PreconditionError


def e_upper(s, y):
    y = np.asarray(y, dtype=float)
    out = np.zeros(y.shape + (2, 2))
    out[..., 0, 1] = np.exp(-y)
    return out


def full_pert(s, y):
    y = np.asarray(y, dtype=float)
    M = s * np.array([[0.5, 0.5], [0.5, 0.5]])
    return np.exp(-y)[..., None, None] * M


def test_split_index():
    assert lev.split_index([1, 1, -2], 1) == 2
    assert lev.split_index([3, 1, 0], 2) == 2
    assert lev.split_index([1, 1, 1], 1) == 3
    assert lev.split_index([1, 1, -2], 3) == 3


def test_ordering_enforced():
    with pytest.raises(PreconditionError):
        lev.PerturbedSystem([-1, 1], e_upper)


def test_zero_perturbation_exact():
    sys = lev.PerturbedSystem([2.0, 0.5, -1.0], lambda s, y: np.zeros(np.shape(y) + (3, 3)),
                              c=lambda s: 1.5)
    y = np.linspace(0, 5, 501)
    for k in (1, 2, 3):
        sol = lev.iterate_solution(sys, 0.0, k, y)
        ex = np.zeros((3, len(y)))
        ex[k - 1] = np.exp(1.5 * sys.mu[k - 1] * y)
        assert np.array_equal(sol.X, ex)
        assert sol.iterates_kept == 1


def test_closed_form_two_by_two():
    sys = lev.PerturbedSystem([1.0, -1.0], e_upper)
    y = np.linspace(0, 20, 20001)
    s1 = lev.iterate_solution(sys, 0.0, 1, y)
    assert np.allclose(s1.X[0], np.exp(y), rtol=1e-14) and np.all(s1.X[1] == 0)
    s2 = lev.iterate_solution(sys, 0.0, 2, y)
    # future integrals are truncated at y_max = 20
    trunc = -(np.exp(-y) - np.exp(2 * y - 60)) / 3
    assert np.allclose(s2.Y[0], trunc, atol=1e-12)
    sel = y <= 12
    assert np.allclose(s2.Y[0][sel], -np.exp(-y[sel]) / 3, atol=1e-12)
    assert np.allclose(s2.Y[1], 1.0, atol=1e-14)


def backward_oracle(sys, s, sol):
    y = sol.y
    f = lambda t, x: (sys.c(s) * np.diag(sys.mu) + sys.R(s, t)) @ x
    r = solve_ivp(f, (y[-1], y[0]), sol.X[:, -1], t_eval=y[::-1], rtol=1e-12, atol=1e-30,
                  method="DOP853")
    return r.y[:, ::-1]


def test_backward_oracle():
    sys = lev.PerturbedSystem([1.0, -1.0], e_upper)
    y = np.linspace(0, 20, 20001)
    sol = lev.iterate_solution(sys, 0.0, 2, y)
    Xo = backward_oracle(sys, 0.0, sol)
    sel = (y >= 2) & (y <= 18)
    scale = np.exp(sys.mu[1] * y[sel])
    assert np.max(np.abs(Xo[:, sel] - sol.X[:, sel]) / scale) < 1e-6


def test_majorization_and_residual():
    sys = lev.PerturbedSystem([1.0, -1.0], full_pert, T=1.0)
    y = np.linspace(1, 25, 24001)
    for k in (1, 2):
        sol = lev.iterate_solution(sys, 1.0, k, y)
        assert sol.iterates_kept > 3
        assert sol.majorization_ratio <= 0.5 + 1e-3
        d = sol.diffs
        assert all(d[m] <= 2.0**-m * d[0] * (1 + 1e-9) for m in range(len(d)))
        # finite-difference residual of the ODE
        X = sol.X
        h = y[1] - y[0]
        dX = (X[:, 2:] - X[:, :-2]) / (2 * h)
        M = np.diag(sys.mu)[None] + sys.R(1.0, y[1:-1])
        rhs = np.einsum("nij,jn->in", M, X[:, 1:-1])
        assert np.max(np.abs(dX - rhs) / np.max(np.abs(X[:, 1:-1]), axis=0)) < 1e-6


def test_basis_property():
    sys = lev.PerturbedSystem([1.0, 0.0, -1.0], lambda s, y: np.exp(-np.asarray(y))[..., None, None]
                              * np.full((3, 3), 0.3), T=0.5)
    y = np.linspace(0.5, 20, 19501)
    cols = [lev.iterate_solution(sys, 0.0, k, y).X[:, 0] for k in (1, 2, 3)]
    assert np.linalg.cond(np.column_stack(cols)) < 1e6


def test_error_bound():
    sys = lev.PerturbedSystem([1.0, -1.0], e_upper, T=0.0)
    assert lev.error_bound(lev.PerturbedSystem([1.0, -1.0], lambda s, y: np.zeros(np.shape(y) + (2, 2))),
                           0.0, 1, 3.0) == 0
    for yy in (1.0, 4.0, 9.0):
        b = lev.error_bound(sys, 0.0, 2, yy)
        assert b == pytest.approx(np.exp(-yy) + 2 * np.exp(-yy / 2), rel=1e-8)
    y = np.linspace(0, 20, 20001)
    sol = lev.iterate_solution(sys, 0.0, 2, y)
    for yy in np.linspace(0.5, 19, 20):
        j = int(round(yy * 1000))
        obs = np.max(np.abs(sol.Y[:, j] - np.array([0, 1])))
        assert lev.error_bound(sys, 0.0, 2, y[j]) >= obs


def test_non_integrable():
    bad = lambda s, y: np.asarray(1.0 / (1.0 + np.asarray(y)))[..., None, None] * np.array([[0, 1], [0, 0]])
    sys = lev.PerturbedSystem([1.0, -1.0], bad)
    with pytest.raises(NonIntegrablePerturbation):
        lev.iterate_solution(sys, 0.0, 2, np.linspace(0, 10, 1001))


def test_iteration_stall():
    big = lambda s, y: np.asarray(50 * np.exp(-np.asarray(y)))[..., None, None] * np.ones((2, 2))
    sys = lev.PerturbedSystem([1.0, -1.0], big)
    with pytest.raises(IterationStall):
        lev.iterate_solution(sys, 0.0, 1, np.linspace(0, 5, 501), m_max=20)


def test_parameter_continuity():
    sys = lev.PerturbedSystem([1.0, -1.0], full_pert, T=1.0)
    y = np.linspace(1, 15, 7001)
    const = lev.PerturbedSystem([1.0, -1.0], lambda s, yy: full_pert(1.0, yy), T=1.0)
    assert lev.parameter_continuity_scan(const, np.linspace(0, 1, 5), 2, 3.0, y) <= 1e-10
    d1 = lev.parameter_continuity_scan(sys, np.linspace(0, 1, 5), 2, 3.0, y)
    d2 = lev.parameter_continuity_scan(sys, np.linspace(0, 1, 9), 2, 3.0, y)
    assert 0.45 <= d2 / d1 <= 0.55


def test_repeated_leading_pair_ray_system():
    from rp2ends import developing as dev
    # model end plus a decaying perturbation of psi: mu = (1, 1, -2) along iota = pi/6
    base = dev.model_end_field(2.0)
    pert = dev.AnalyticEndField(base.metric, {-3: 2.0, -2: 0.3})
    rs = lev.ray_system(pert, 2.0, np.pi / 6, y_base=1.0)
    assert np.allclose(rs.mu, [1, 1, -2])
    y = np.linspace(0, 16, 8001)
    for k in (1, 2):
        assert lev.split_index(rs.mu, k) == 2
    d1 = lev.parameter_continuity_scan(rs.with_scale(), np.linspace(0, 1, 5), 1, 2.0, y)
    d2 = lev.parameter_continuity_scan(rs.with_scale(), np.linspace(0, 1, 9), 1, 2.0, y)
    assert d2 < 0.6 * d1
    # exact model: zero perturbation
    rs0 = lev.ray_system(base, 2.0, np.pi / 6, y_base=1.0)
    assert np.max(np.abs(rs0.R(0.0, np.linspace(0, 5, 11)))) < 1e-12
