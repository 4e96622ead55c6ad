"""Residues and their holonomy classes.

The cubic coefficient R of z^-3 alone fixes the conjugacy class of an
end's holonomy. This walk-through classifies a ring of residues, checks
that the direction eigenvalues along a ray give the same spectrum, and
inverts the map from residues back to spectra.
"""

import numpy as np

from rp2ends import residue


def main():
    print("Residue ring: class, log-eigenvalues lambda, twist sign")
    for R in (0, 2, -2, 2j, -2j, 1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j):
        rep = residue.spectrum_report(R)
        lam = ", ".join("%+.4f" % v for v in rep.lam)
        name = "%g%+gi" % (rep.R.real + 0.0, rep.R.imag + 0.0)
        print("  R = %-8s %-16s (%s)  %s" % (name, rep.holonomy.kind, lam, rep.twist))

    # along the ray iota = pi/6 the frame system has constant coefficients
    mu, rho = residue.direction_eigenvalues(2.0, np.pi / 6)
    print("\nR = 2, iota = pi/6: mu = %s, rho = %s" % (np.round(mu, 6), np.round(rho, 6)))
    print("sorted e^{2 pi rho}    :", np.sort(np.exp(2 * np.pi * np.array(rho))))
    print("sorted e^{2 pi lambda} :", np.sort(np.exp(2 * np.pi * np.array(residue.chi_roots(2.0)))))

    print("\nInverse problem: which residues produce a given spectrum?")
    for lam in ([np.sqrt(3), 0, -np.sqrt(3)], [2, -1, -1], [0.5, 0.2, -0.7]):
        rs = residue.residues_for_spectrum(lam)
        print("  %-28s -> %s" % (np.round(lam, 4), ", ".join("%.4f%+.4fi" % (r.real, r.imag) for r in rs)))
    print("A distinct triple comes from a mirror pair R, -conj(R); a repeated pair from one R.")


if __name__ == "__main__":
    main()
