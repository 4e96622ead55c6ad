"""Holonomy of an end read off from the residue of the cubic differential.

For U = R z^{-3} dz^3 + ..., the limit holonomy eigenvalues are e^{2 pi lambda}
with lambda the roots of

    chi(lambda) = lambda^3 - 3 * 2^{-2/3} |R|^{2/3} lambda - Im R,

which are always real. ``xi`` is the scale factor of the linear change of
coordinates nu = xi w that turns the model end into the triangle model
(U = 2 dnu^3, e^psi = 2); see ``xi_branch`` for the normalization used.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidSpectrum, ZeroResidue
from .projlin import HYPERBOLIC, PARABOLIC, QUASI_HYPERBOLIC, HolonomyClass

C23 = 2.0 ** (-2.0 / 3.0)
SNAP = 1e-14
PLUS, MINUS, UNDEFINED = "plus_infinity", "minus_infinity", "undefined"


def discriminant(R):
    """-|R|^2/4 + (Im R)^2/4, written as -(Re R)^2/4 so that it vanishes exactly on Re R = 0."""
    R = complex(R)
    return -0.25 * R.real * R.real


def is_snapped(R):
    """True when Re R is treated as zero (repeated root of chi)."""
    R = complex(R)
    return abs(discriminant(R)) <= SNAP * (1.0 + abs(R) ** 2)


def chi_roots(R):
    """Real roots of chi, descending, by the trigonometric method."""
    R = complex(R)
    a = abs(R)
    if a == 0.0:
        return (0.0, 0.0, 0.0)
    p = -3.0 * C23 * a ** (2.0 / 3.0)
    q = -R.imag
    if is_snapped(R):
        simple, double = 3.0 * q / p, -1.5 * q / p
        return tuple(sorted([simple, double, double], reverse=True))
    m = 2.0 * np.sqrt(-p / 3.0)
    c = np.clip(1.5 * q / p * np.sqrt(-3.0 / p), -1.0, 1.0)
    theta = np.arccos(c) / 3.0
    roots = m * np.cos(theta - 2.0 * np.pi * np.arange(3) / 3.0)
    return tuple(float(r) for r in sorted(roots, reverse=True))


def chi(R, lam):
    R = complex(R)
    return lam**3 - 3.0 * C23 * abs(R) ** (2.0 / 3.0) * lam - R.imag


def classify_residue(R):
    """Table of end types: R = 0 parabolic, Re R = 0 quasi-hyperbolic, else hyperbolic."""
    R = complex(R)
    if R == 0:
        kind = PARABOLIC
    elif is_snapped(R):
        kind = QUASI_HYPERBOLIC
    else:
        kind = HYPERBOLIC
    lam = chi_roots(R)
    return HolonomyClass(kind, tuple(float(np.exp(2 * np.pi * l)) for l in lam))


def class_symmetry_check(R):
    """R and -conj(R) give the same class and eigenvalues."""
    a = classify_residue(R)
    b = classify_residue(-np.conj(complex(R)))
    return a.kind == b.kind and np.allclose(a.eigenvalues, b.eigenvalues, rtol=1e-12, atol=0)


def xi_branch(R):
    """Scale factor xi with xi^3 = i conj(R) / 2 and arg xi in (-pi/3, pi/3].

    xi^3 has the argument of 2i/R; the modulus (|R|/2)^{1/3} is the one for
    which 2 Re(xi omega^k) reproduces the roots of chi for every R.
    """
    R = complex(R)
    if R == 0:
        raise ZeroResidue("xi is undefined for R = 0")
    target = 0.5j * np.conj(R)
    arg = np.angle(target)
    if arg <= -np.pi * (1 - 1e-15):
        arg = np.pi  # keep the half-open branch (-pi/3, pi/3]
    return abs(target) ** (1.0 / 3.0) * np.exp(1j * arg / 3.0)


def segment_angles(R):
    """(iota, iota_hat) = (pi/3 - arg xi, pi - arg xi)."""
    a = np.angle(xi_branch(R))
    return np.pi / 3 - a, np.pi - a


def direction_eigenvalues(R, iota):
    """Eigenvalues (mu) along cos(iota) d/dx + sin(iota) d/dy and the loop eigenvalues (rho)."""
    xi = xi_branch(R)
    w = np.exp(2j * np.pi / 3)
    mu = tuple(float(2 * (xi * np.exp(1j * iota) * r).real) for r in (1, 1 / w, w))
    rho = tuple(float(2 * (xi * r).real) for r in (1, 1 / w, w))
    return mu, rho


def twist_sign(R):
    R = complex(R)
    if R == 0 or is_snapped(R):
        return UNDEFINED
    return PLUS if R.real > 0 else MINUS


def residues_for_spectrum(lam):
    """All residues whose chi has the given roots (one if Re R = 0, else two)."""
    lam = np.asarray(lam, dtype=float).reshape(3)
    scale = max(1.0, float(np.max(np.abs(lam))))
    if abs(lam.sum()) > 1e-12 * scale:
        raise InvalidSpectrum("roots must sum to zero, got %.3e" % lam.sum())
    im = float(np.prod(lam))
    e2 = float(lam[0] * lam[1] + lam[0] * lam[2] + lam[1] * lam[2])
    if e2 > 0:
        raise InvalidSpectrum("second symmetric function must be <= 0")
    absR = (-e2 / (3.0 * C23)) ** 1.5
    diff = absR**2 - im**2
    if diff < -1e-12 * (1.0 + absR**2):
        raise InvalidSpectrum("|R|^2 < (Im R)^2")
    re = np.sqrt(max(diff, 0.0))
    if absR == 0.0:
        return [0j]
    if 0.25 * re * re <= SNAP * (1.0 + absR**2):
        return [complex(0.0, im)]
    return [complex(re, im), complex(-re, im)]


@dataclass(frozen=True)
class SpectrumReport:
    R: complex
    lam: tuple
    alpha: tuple
    holonomy: HolonomyClass
    discriminant: float
    xi: complex = None
    iota: float = None
    iota_hat: float = None
    mu: tuple = None
    rho: tuple = None
    twist: str = UNDEFINED


def spectrum_report(R, iota=None):
    """Everything the residue determines; mu is evaluated at iota (default pi/3 - arg xi)."""
    R = complex(R)
    cls = classify_residue(R)
    lam = chi_roots(R)
    out = dict(R=R, lam=lam, alpha=cls.eigenvalues, holonomy=cls,
               discriminant=discriminant(R), twist=twist_sign(R))
    if R != 0:
        xi = xi_branch(R)
        i0, i1 = segment_angles(R)
        mu, rho = direction_eigenvalues(R, i0 if iota is None else iota)
        out.update(xi=xi, iota=i0, iota_hat=i1, mu=mu, rho=rho)
    return SpectrumReport(**out)
