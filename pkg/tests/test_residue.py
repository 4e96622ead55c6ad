import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rp2ends import residue
from rp2ends.errors import InvalidSpectrum, ZeroResidue

S3 = np.sqrt(3.0)


def chi(R, lam):
    return lam**3 - 3 * 2 ** (-2 / 3) * abs(R) ** (2 / 3) * lam - complex(R).imag


def test_chi_roots_examples():
    assert np.allclose(residue.chi_roots(0), [0, 0, 0])
    assert np.allclose(residue.chi_roots(2j), [2, -1, -1], atol=1e-14)
    assert np.allclose(residue.chi_roots(2), [S3, 0, -S3], atol=1e-14)
    # repeated pair is snapped exactly
    r = residue.chi_roots(2j)
    assert r[1] == r[2]


def test_chi_roots_residuals_random():
    rng = np.random.default_rng(0)
    rad = 100 * np.sqrt(rng.uniform(size=10_000))
    ang = rng.uniform(0, 2 * np.pi, size=10_000)
    for R in rad * np.exp(1j * ang):
        lam = residue.chi_roots(R)
        assert lam[0] >= lam[1] >= lam[2]
        assert abs(sum(lam)) <= 1e-12 * (1 + abs(R))
        assert max(abs(chi(R, l)) for l in lam) <= 1e-10 * (1 + abs(R))


def test_discriminant():
    assert residue.discriminant(0) == 0
    assert residue.discriminant(2) == pytest.approx(-1)
    assert residue.discriminant(2j) == pytest.approx(0, abs=1e-15)
    # sign transition across Re R = 0
    for re in [-1e-3, -1e-6, 0.0, 1e-6, 1e-3]:
        d = residue.discriminant(re + 3j)
        assert d <= 1e-12
        assert (d == 0) == (re == 0)


def test_classify_residue_table():
    cls = residue.classify_residue
    assert cls(0).kind == "Parabolic"
    assert np.allclose(cls(0).eigenvalues, [1, 1, 1])
    c = cls(2j)
    assert c.kind == "QuasiHyperbolic"
    assert np.allclose(c.eigenvalues, np.exp(2 * np.pi * np.array([2, -1, -1])))
    assert cls(-3 + 4j).kind == "Hyperbolic"


def test_class_symmetry():
    assert residue.class_symmetry_check(2)
    assert residue.class_symmetry_check(1 + 1j)
    assert residue.class_symmetry_check(0)
    assert np.allclose(residue.classify_residue(2).eigenvalues,
                       residue.classify_residue(-2).eigenvalues)


def test_xi_branch():
    assert residue.xi_branch(2j) == pytest.approx(1)
    assert residue.xi_branch(2) == pytest.approx(np.exp(1j * np.pi / 6))
    assert residue.xi_branch(-2) == pytest.approx(np.exp(-1j * np.pi / 6))
    assert np.angle(residue.xi_branch(-2j)) == pytest.approx(np.pi / 3)
    with pytest.raises(ZeroResidue):
        residue.xi_branch(0)


@settings(max_examples=500, deadline=None)
@given(st.floats(-50, 50), st.floats(-50, 50))
def test_xi_branch_properties(a, b):
    R = complex(a, b)
    if abs(R) < 1e-6:
        return
    xi = residue.xi_branch(R)
    target = 1j * np.conj(R) / 2
    assert abs(xi**3 - target) <= 1e-13 * abs(target)
    # same argument as 2i/R
    assert abs(np.exp(1j * np.angle(xi**3)) - np.exp(1j * np.angle(2j / R))) < 1e-12
    arg = np.angle(xi)
    assert -np.pi / 3 < arg <= np.pi / 3 + 1e-15
    if not residue.is_snapped(R):
        assert abs(arg) < np.pi / 3
        assert np.sign(arg) == np.sign(a)


def test_direction_eigenvalues_example():
    mu, rho = residue.direction_eigenvalues(2, np.pi / 6)
    assert np.allclose(mu, [1, 1, -2])
    assert np.allclose(rho, [S3, 0, -S3])
    for iota in np.linspace(0.1, 3.0, 7):
        mu, rho = residue.direction_eigenvalues(2, iota)
        assert abs(sum(mu)) < 1e-14 and abs(sum(rho)) < 1e-14


def test_rho_matches_lambda_random():
    rng = np.random.default_rng(1)
    for _ in range(500):
        R = complex(*rng.normal(size=2) * 10)
        xi = residue.xi_branch(R)
        iota = np.pi / 3 - np.angle(xi)
        mu, rho = residue.direction_eigenvalues(R, iota)
        lam = residue.chi_roots(R)
        assert np.allclose(np.sort(np.exp(2 * np.pi * np.array(rho))),
                           np.sort(np.exp(2 * np.pi * np.array(lam))), rtol=1e-10, atol=0)
        # at the segment direction the top pair is double
        m = np.sort(mu)[::-1]
        assert abs(m[0] - m[1]) < 1e-12 * (1 + abs(m[0])) and m[1] > m[2]


def test_twist_sign():
    assert residue.twist_sign(1) == "plus_infinity"
    assert residue.twist_sign(-1 + 5j) == "minus_infinity"
    assert residue.twist_sign(3j) == "undefined"
    assert residue.twist_sign(0) == "undefined"


def test_residues_for_spectrum_examples():
    assert residue.residues_for_spectrum([2, -1, -1]) == [pytest.approx(2j)]
    got = residue.residues_for_spectrum([S3, 0, -S3])
    assert len(got) == 2
    assert sorted(got, key=lambda z: z.real) == [pytest.approx(-2), pytest.approx(2)]
    assert residue.residues_for_spectrum([0, 0, 0]) == [0j]
    with pytest.raises(InvalidSpectrum):
        residue.residues_for_spectrum([1, 1, 1])


def test_round_trip():
    rng = np.random.default_rng(2)
    for _ in range(300):
        R = complex(*rng.normal(size=2) * 5)
        got = residue.residues_for_spectrum(residue.chi_roots(R))
        assert any(abs(g - R) < 1e-9 * (1 + abs(R)) for g in got)
        assert all(abs(g.imag - R.imag) < 1e-9 * (1 + abs(R)) for g in got)
        assert all(abs(abs(g) - abs(R)) < 1e-9 * (1 + abs(R)) for g in got)
