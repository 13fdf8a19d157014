"""
Pinching sweep over perturbed spheres
=====================================

Bump a geodesic sphere by delta * P_2 along one axis and shrink delta.
The pinching deficit eps = n (1 + ||H||_inf^2) - lambda_1 and the
Hausdorff distance to the model sphere S(p0, R0) shrink together.
Set PINCHLAB_THREADS to run the rows in parallel.
"""

import numpy as np

from pinchlab.report import sweep

deltas = [0.1, 0.05, 0.025, 0.0125]
rows, summary = sweep(deltas, R=np.pi / 4, mode=2, refine=4)

print("   delta        eps   lambda_1        d_H   min<X,nu>")
for r in rows:
    print(f"{r['delta']:8.4f} {r['eps']:10.4f} {r['lambda1']:10.5f} {r['d_hausdorff']:10.4f} {r['min_X_normal']:11.4f}")

print(f"\neps of the unperturbed mesh (discretization floor): {summary['eps_floor']:.4g}")
print(f"log-log slope of d_H against eps: {summary['slope_log_dH_vs_log_eps']:.3f}")
print(f"reference exponents: 1/(2(2n+1)) = {summary['exponent_hausdorff']:.3f}, "
      f"(q-n)/(q-n+qn) = {summary['exponent_distortion_q']:.3f}")
