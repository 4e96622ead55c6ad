"""Pinching a neck.

A family of plumbed surfaces with residue 2 + t across the node keeps a
hyperbolic core-loop holonomy whose eigenvalues settle onto those of the
limiting residue as t -> 0. When the residue vanishes the neck becomes a
long hyperbolic collar and the core holonomy drifts toward the identity
only like a power of 1/|log t|.
"""

import os
import sys

import numpy as np

from rp2ends import degeneration as deg


def main(out_dir):
    os.makedirs(out_dir, exist_ok=True)
    spec = deg.FamilySpec(a=lambda t: {-3: 2.0 + t, -2: 1.0},
                          t_sweep=list(np.geomspace(1e-2, 1e-6, 5)), kind=deg.QH)
    rows = deg.qh_sweep(spec)
    print("QH neck, a_-3 = 2 + t, a_-2 = 1")
    for r in rows:
        print("  t = %.0e: eigenvalues %s, deviation %.2e, residual %.1e"
              % (r.t, np.array2string(np.array(r.eigenvalues), precision=5),
                 max(r.deviation), r.residual))
    path = os.path.join(out_dir, "qh_sweep.csv")
    deg.write_sweep_csv(rows, path)
    print("  wrote", path)

    rep = deg.twist_witness_sweep(deg.FamilySpec(a=spec.a, t_sweep=[1e-3, 1e-4, 1e-5],
                                                 kind=deg.QH), y_max=30.0, step=2e-3, tol=1e-3)
    print("  witnesses per t:", [sorted(w.segment for w in r.witnesses) for r in rep.rows])

    par = deg.FamilySpec(a=lambda t: {}, t_sweep=[1e-2, 1e-4, 1e-8], kind=deg.PARABOLIC,
                         decay_C=1.0)
    print("\nparabolic neck, U = 0")
    for r in deg.parabolic_sweep(par):
        ev = sorted(complex(v).real for v in r.exp_eigenvalues)
        print("  t = %.0e: |log t| * row norm = %.3f, e^{2 pi A_t} eigenvalues %s, "
              "expected e^{+-2 pi^2/|log t|} = %.3f, %.3f"
              % (r.t, r.row_norm * abs(np.log(r.t)), np.round(ev, 4),
                 np.exp(-2 * np.pi**2 / abs(np.log(r.t))), np.exp(2 * np.pi**2 / abs(np.log(r.t)))))
    fit = deg.curvature_fit([1e-2, 1e-4, 1e-8])
    print("  curvature fit sup|kappa + 1| <= %.3g |t|^%.3f" % (fit.gamma, fit.delta))


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "demo_output")
