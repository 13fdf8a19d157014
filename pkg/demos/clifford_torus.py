"""
The minimal Clifford torus
==========================

S^1(1/sqrt 2) x S^1(1/sqrt 2) is minimal in S^3 with lambda_1 = 2, so it
attains equality in lambda_1 <= n (1 + ||H||_2^2) without being a sphere.
Its gravity energy is constant, every point is a center of gravity, and
no choice of center puts it inside an open hemisphere.
"""

import numpy as np

from pinchlab import analyze, make_clifford_torus
from pinchlab.barycenter import gravity_energy
from pinchlab.sphere import random_points

torus = make_clifford_torus(1, 1, 96, 96)
result = analyze(torus)
rep = result.report

print(f"vertices {rep.n_vertices}, genus {rep.genus}")
print(f"lambda_1 = {rep.lambda1:.5f}   n(1 + ||H||_2^2) = {rep.reilly_rhs:.5f}")

# E(p) is flat on S^3: sample it
probes = random_points(np.random.default_rng(0), 10)
energies = [gravity_energy(result.ops, torus, p) for p in probes]
print(f"E over 10 random points: {min(energies):.6f} .. {max(energies):.6f}  (2 pi^2 = {2 * np.pi ** 2:.6f})")
print(f"flat energy landscape detected: {rep.flat_flag}")

# the enclosing radius around any center is at least 3 pi / 4
print(f"enclosing radius {rep.R_enclosing:.4f} >= 3 pi / 4 = {3 * np.pi / 4:.4f}; beta = cot R = {rep.beta:.3f}")
for entry in rep.lemma_entries[:3]:
    print(f"  {entry.name:<24s} not applicable: {entry.reason}")
print(f"diffeomorphic-to-sphere verdict: {rep.diffeomorphic_to_sphere}")
