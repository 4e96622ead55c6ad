"""Developing rays and reading off the twist sign.

Transport of the affine frame along rays maps the end into RP^2. On the
triangle model the limit of a ray depends only on its angle; on a model
end with residue R the same picture appears after the rotation by arg xi,
and the segments hit by two special rays decide the vertical twist.
"""

import os
import sys

import numpy as np

from rp2ends import developing as dev
from rp2ends import residue


def main(out_dir):
    os.makedirs(out_dir, exist_ok=True)
    tri = dev.TriangleModelField()
    print("Triangle model: where does the ray at angle theta land?")
    for theta in (0.0, np.pi / 3, np.pi / 2, np.pi, 4.0, 5 * np.pi / 3):
        c = dev.develop_ray(tri, theta, length=40.0, step=2e-3, start=(0.0, 0.3))
        kind, where = dev.locate_in_triangle(np.eye(3), c.limit)
        label = dev.table_row(theta)[0]
        print("  theta = %.4f  row %-14s -> %s %s" % (theta, label, kind, where))

    fld = dev.model_end_field(2.0)
    H = dev.holonomy_loop(fld, 5.0, step=1e-3)
    print("\nModel end R = 2: loop holonomy eigenvalues %s, det %.12f"
          % (np.array2string(np.array(H.eigenvalues), precision=6), H.det))
    print("expected e^{2 pi lambda}:", np.exp(2 * np.pi * np.array(residue.chi_roots(2.0))))

    for R in (2.0, -2.0):
        t = dev.detect_twist(dev.model_end_field(R), R, y_max=30.0, y_base=2.0, step=2e-3)
        segs = ", ".join("%s at iota = %.4f (defect %.1e)" % (w.segment, w.iota, w.defect)
                         for w in t.witnesses)
        print("R = %+.0f: twist %s; witnesses %s" % (R, t.sign, segs))

    io = residue.segment_angles(2.0)[0]
    c = dev.develop_ray(fld, io, y_max=30.0, step=2e-3, start=(0.0, 2.0))
    path = os.path.join(out_dir, "segment_ray.svg")
    clipped = c.to_svg(path, triangle=dev.base_change(fld, (0.0, 2.0)))
    print("wrote %s (%d points clipped)" % (path, clipped))


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "demo_output")
