"""Centers of gravity of meshes on the sphere.

A center of gravity is a critical point of the energy
``E(p) = int_M (1 - cos d(p, x)) dv(x)``. Its negative Riemannian gradient,
normalized by the area, is the moment field
``m(p) = (1/|M|) int_M (sin r / r) exp_p^{-1}(x) dv``; a zero of m is a
center of mass.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, PreconditionError
from .sphere import exp_map, log_map, random_points, sinc, tangent_frame

ANTIPODAL_TOL = 1e-12


@dataclass(frozen=True)
class GravityResult:
    p0: np.ndarray
    energy: float
    moment_residual: float
    iterations: int
    flat_flag: bool


def gravity_energy(ops, mesh, p):
    """``E(p)`` by mass-matrix quadrature; ``cos d(p, x) = <p, x>``."""
    p = np.asarray(p, dtype=float)
    return float(ops.weights @ (1.0 - mesh.vertices @ p))


def moment_residual(ops, mesh, p):
    """Moments ``(1/|M|) int (sin r / r) exp_p^{-1}(x) dv`` and their norm.

    The moments are returned as an ambient vector tangent at p. Vertices
    antipodal to p have no logarithm; they are dropped with a warning.
    """
    p = np.asarray(p, dtype=float)
    x = mesh.vertices
    antipodal = x @ p < -1.0 + ANTIPODAL_TOL
    w = ops.weights.copy()
    if np.any(antipodal):
        warnings.warn(f"barycenter: {int(antipodal.sum())} vertices antipodal to p excluded from the moments", stacklevel=2)
        w[antipodal] = 0.0
    v, r = log_map(p[None, :], x)
    v[antipodal] = 0.0
    m = (w * sinc(r)) @ v / ops.total_area
    return m, float(np.linalg.norm(m))


def coarse_centroid(ops, mesh):
    """Normalized area-weighted Euclidean centroid, or None if it vanishes."""
    s = ops.weights @ mesh.vertices
    ns = np.linalg.norm(s)
    if ns < 1e-9 * ops.total_area:
        return None
    return s / ns


def _energy_probe_spread(ops, mesh, p, radius=0.5):
    frame = tangent_frame(p)
    probes = [p] + [exp_map(p, sgn * radius * frame[:, k]) for k in range(frame.shape[1]) for sgn in (1, -1)]
    vals = [gravity_energy(ops, mesh, q) for q in probes]
    return max(vals) - min(vals)


def center_of_gravity(ops, mesh, init, tol=1e-10, max_iter=500, step=1.0):
    """Descend E from ``init`` by ``p <- exp_p(eta * m(p))``.

    The step starts at ``step`` and is halved whenever the energy would
    increase. Stops once ``|m(p)| <= tol``.

    ``flat_flag`` is raised when the energy is flat around the returned
    point: the spread of E over the iterates and over probes at distance
    0.5 in every tangent direction stays below ``1e-12 |M|``.

    Raises
    ------
    ConvergenceError
        After ``max_iter`` steps, carrying the last iterate.
    """
    p = np.asarray(init, dtype=float)
    p = p / np.linalg.norm(p)
    centroid = coarse_centroid(ops, mesh)
    if centroid is not None and p @ centroid < -1.0 + 1e-9:
        raise PreconditionError("barycenter: init is antipodal to the mesh centroid direction")
    area = ops.total_area
    energy = gravity_energy(ops, mesh, p)
    energies = [energy]
    m, norm = moment_residual(ops, mesh, p)
    it = 0
    while norm > tol:
        if it >= max_iter:
            raise ConvergenceError(f"barycenter: no convergence in {max_iter} steps (|m| = {norm:.3e})", last_iterate=p, residual=norm)
        eta = step
        while True:
            q = exp_map(p, eta * m)
            e_q = gravity_energy(ops, mesh, q)
            if e_q <= energy + 1e-15 * area or eta < 1e-12:
                break
            eta *= 0.5
        p, energy = q, e_q
        energies.append(energy)
        m, norm = moment_residual(ops, mesh, p)
        it += 1
    spread = max(max(energies) - min(energies), _energy_probe_spread(ops, mesh, p))
    flat = bool(norm <= 10 * tol and spread < 1e-12 * area)
    return GravityResult(p, energy, norm, it, flat)


def default_init(ops, mesh, seed=0):
    """Centroid direction when it exists, else a seeded random point."""
    c = coarse_centroid(ops, mesh)
    if c is not None:
        return c
    return random_points(np.random.default_rng(seed), 1, mesh.vertices.shape[1])[0]
