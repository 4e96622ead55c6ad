"""Asymptotic solutions of perturbed constant-coefficient systems.

For dX/dy = (B + R(y)) X with R integrable, each eigen-direction of B has
a solution that behaves like e^{mu_k y} v_k. The successive approximation
splits the integrals into a future part for fast directions and a past
part for slow ones; the iterates contract geometrically.
"""

import numpy as np

from rp2ends import developing as dev
from rp2ends import levinson as lev


def upper(s, y):
    y = np.asarray(y, dtype=float)
    out = np.zeros(y.shape + (2, 2))
    out[..., 0, 1] = np.exp(-y)
    return out


def main():
    sys_ = lev.PerturbedSystem([1.0, -1.0], upper)
    y = np.linspace(0, 20, 20001)
    sol = lev.iterate_solution(sys_, 0.0, 2, y)
    j = 3000
    print("upper system, k = 2: X(3) = %s, closed form (-e^{-6}/3, e^{-3}) = (%.6e, %.6e)"
          % (sol.X[:, j], -np.exp(-6) / 3, np.exp(-3)))
    for yy in (1.0, 4.0, 9.0):
        print("  error bound at y = %.0f: %.3e" % (yy, lev.error_bound(sys_, 0.0, 2, yy)))

    base = dev.model_end_field(2.0)
    fld = dev.AnalyticEndField(base.metric, {-3: 2.0, -2: 0.3})
    rs = lev.ray_system(fld, 2.0, np.pi / 6, y_base=1.0)
    print("\nray system along iota = pi/6 on a perturbed end: mu = %s" % (rs.mu,))
    yr = np.linspace(0, 16, 8001)
    for k in (1, 3):
        s = lev.iterate_solution(rs, 0.0, k, yr)
        print("  k = %d (split q = %d): %d iterates, diffs %s, ratio %.3f"
              % (k, s.q, s.iterates_kept, ", ".join("%.1e" % d for d in s.diffs[:4]),
                 s.majorization_ratio))
    d1 = lev.parameter_continuity_scan(rs.with_scale(), np.linspace(0, 1, 5), 1, 2.0, yr)
    d2 = lev.parameter_continuity_scan(rs.with_scale(), np.linspace(0, 1, 9), 1, 2.0, yr)
    print("  scaling s * R: adjacent deviation %.3e on 5 points, %.3e on 9" % (d1, d2))


if __name__ == "__main__":
    main()
