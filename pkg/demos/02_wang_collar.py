"""Solving Wang's equation on a flat collar.

On the exact flat end the background metric already solves the equation,
so u = 0. Multiplying U by (1 + 0.1 e^{iw}) breaks this; the solver then
needs barriers, and the answer converges at second order under refinement.
"""

import numpy as np

from rp2ends import wang


def main():
    g = wang.flat_collar_grid(2.0, 64, 256, 0.0, 10.0)
    r = wang.solve_wang(g, tol=1e-12)
    print("exact collar: |U|^2 = %.15f, max |u| = %.1e" % (g.normU2().max(), np.abs(r.u).max()))

    g = wang.flat_collar_grid(2.0, 32, 81, 0.0, 10.0, perturbation=0.1)
    b = wang.build_barriers(g)
    r = wang.solve_wang(g, tol=1e-11, barriers=b)
    print("perturbed collar: %s barriers (alpha %.2f, beta %g after %d doublings)"
          % (b.kind, b.alpha, b.beta, b.doublings))
    print("  residual %.1e in %d Newton steps, bracketed: %s, max |u| = %.3e"
          % (r.residual_inf, r.newton_iters, r.bracketed, np.abs(r.u).max()))
    row = np.abs(r.u).max(axis=1)
    for y in (1.0, 3.0, 5.0, 7.0):
        j = int(round(y / g.hy))
        print("  y = %.0f: max_x |u| = %.3e, barrier %.3e" % (y, row[j], b.S[j].max()))

    us = [wang.solve_wang(wang.flat_collar_grid(2.0, n, 2 * n + 1, 0.0, 8.0, perturbation=0.1),
                          tol=1e-12).u for n in (16, 32, 64)]
    print("refinement ratio |u_h - u_h/2| / |u_h/2 - u_h/4| = %.3f (4 for second order)"
          % wang.refinement_ratio(*us))


if __name__ == "__main__":
    main()
