"""Unit normal, mean curvature and second fundamental form of meshes in S^3.

Curvature is that of the immersion into the sphere, not into R^4. Sign
convention: for the outward normal of a geodesic sphere ``S(c, R)`` (the
one pointing away from c) the mean curvature is ``+cot R``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PreconditionError
from .mesh import CliffordTorus, GeodesicSphere, clifford_normal, face_normals
from .operators import lp_norm, spherical_area, face_side_lengths
from .sphere import great_circle_distance, log_map

COND_LIMIT = 1e8


@dataclass(frozen=True)
class CurvatureField:
    """Per-vertex normal ``nu``, mean curvature ``H`` and ``|B|``.

    ``H`` is the trace of the shape operator divided by n; ``B_norm`` is the
    Frobenius norm of the second fundamental form. ``flagged`` marks vertices
    whose local fit was rank deficient and whose values were borrowed from
    their neighbours.
    """

    nu: np.ndarray
    H: np.ndarray
    B_norm: np.ndarray
    source: str
    flagged: np.ndarray = None
    n: int = 2

    def H_inf(self):
        return float(np.max(np.abs(self.H)))

    def H_2(self, ops):
        return lp_norm(ops, self.H, 2)

    def B_q(self, ops, q=4.0):
        return lp_norm(ops, self.B_norm, q)


def analytic_curvature(mesh):
    """Exact curvature for geodesic spheres and the Clifford torus."""
    tag = mesh.family_tag
    x = mesh.vertices
    nv = len(x)
    if isinstance(tag, GeodesicSphere):
        c = np.asarray(tag.center)
        R = tag.radius
        nu = (np.cos(R) * x - c) / np.sin(R)
        nu /= np.linalg.norm(nu, axis=1, keepdims=True)
        k = 1.0 / np.tan(R)
        return CurvatureField(nu, np.full(nv, k), np.full(nv, np.sqrt(2.0) * k), "analytic", np.zeros(nv, bool))
    if isinstance(tag, CliffordTorus):
        nu = clifford_normal(x)
        nu /= np.linalg.norm(nu, axis=1, keepdims=True)
        # principal curvatures r2/r1 and -r1/r2, i.e. +1 and -1
        k1, k2 = tag.r2 / tag.r1, -tag.r1 / tag.r2
        H = np.full(nv, (k1 + k2) / 2.0)
        return CurvatureField(nu, H, np.full(nv, np.hypot(k1, k2)), "analytic", np.zeros(nv, bool))
    raise DomainError("curvature: analytic curvature needs a GeodesicSphere or CliffordTorus tag; use discrete_curvature")


def _neighbourhoods(mesh, rings):
    a = mesh.adjacency()
    reach = a.copy()
    step = a
    for _ in range(rings - 1):
        step = step @ a
        reach = reach + step
    reach = reach.tocsr()
    reach.setdiag(0)
    reach.eliminate_zeros()
    counts = np.diff(reach.indptr)
    k = counts.max()
    idx = np.zeros((mesh.n_vertices, k), dtype=np.int64)
    mask = np.zeros((mesh.n_vertices, k), dtype=bool)
    for row in range(mesh.n_vertices):
        cols = reach.indices[reach.indptr[row]:reach.indptr[row + 1]]
        idx[row, :len(cols)] = cols
        mask[row, :len(cols)] = True
    return idx, mask


def _tangent_planes(x, nu):
    proj = np.eye(4)[None] - x[:, :, None] * x[:, None, :] - nu[:, :, None] * nu[:, None, :]
    _, vecs = np.linalg.eigh(proj)
    # eigenvalues sorted ascending: 0, 0, 1, 1
    return vecs[:, :, 2], vecs[:, :, 3]


def vertex_normals(mesh):
    """Area-weighted face normals, projected onto each vertex's tangent space."""
    x = mesh.vertices
    fn, _ = face_normals(x, mesh.faces)
    area = spherical_area(face_side_lengths(mesh))
    acc = np.zeros_like(x)
    for k in range(3):
        np.add.at(acc, mesh.faces[:, k], area[:, None] * fn)
    acc -= np.sum(acc * x, axis=1, keepdims=True) * x
    return acc / np.linalg.norm(acc, axis=1, keepdims=True)


def discrete_curvature(mesh, rings=2, iterations=2):
    """Curvature from weighted quadric fits in geodesic normal coordinates.

    At each vertex the neighbours within ``rings`` edges are mapped to the
    tangent space of S^3 by the Riemannian logarithm and split into tangent
    coordinates (u, v) and height h along the current normal. The fit
    ``h = a u^2 + b u v + c v^2 + d u + e v`` tilts the normal by its linear
    part and is repeated ``iterations`` times. Since normal coordinates
    have vanishing Christoffel symbols at the origin, the Hessian of h is
    the second fundamental form in the sphere.
    """
    x = mesh.vertices
    nv = len(x)
    nu = vertex_normals(mesh)
    idx, mask = _neighbourhoods(mesh, rings)
    y = x[idx]  # (V, K, 4)
    w_log, dist = log_map(x[:, None, :], y)
    scale = np.mean(mesh.edge_lengths())
    wts = mask.astype(float)

    for it in range(iterations + 1):
        t1, t2 = _tangent_planes(x, nu)
        u = np.einsum("vkd,vd->vk", w_log, t1) / scale
        v = np.einsum("vkd,vd->vk", w_log, t2) / scale
        h = np.einsum("vkd,vd->vk", w_log, nu) / scale
        design = np.stack([u * u, u * v, v * v, u, v], axis=-1)  # (V, K, 5)
        dw = design * wts[..., None]
        normal_mat = np.einsum("vki,vkj->vij", dw, design)
        rhs = np.einsum("vki,vk->vi", dw, h)
        cond = np.linalg.cond(normal_mat)
        flagged = ~(cond < COND_LIMIT)
        safe = np.where(flagged[:, None, None], np.eye(5)[None], normal_mat)
        coef = np.linalg.solve(safe, rhs[..., None])[..., 0]
        if it == iterations:
            break
        tilt = nu - coef[:, 3:4] * t1 - coef[:, 4:5] * t2
        tilt -= np.sum(tilt * x, axis=1, keepdims=True) * x
        nu = np.where(flagged[:, None], nu, tilt / np.linalg.norm(tilt, axis=1, keepdims=True))

    # coefficients live in units of `scale`; h'' scales like 1/scale
    a, b, c = coef[:, 0] / scale, coef[:, 1] / scale, coef[:, 2] / scale
    hess = np.stack([np.stack([2 * a, b], -1), np.stack([b, 2 * c], -1)], -2)
    shape = -hess
    H = 0.5 * (shape[:, 0, 0] + shape[:, 1, 1])
    B = np.sqrt(np.sum(shape ** 2, axis=(1, 2)))

    if np.any(flagged):
        ring_idx, ring_mask = _neighbourhoods(mesh, 1)
        good = ring_mask & ~flagged[ring_idx]
        cnt = np.maximum(good.sum(axis=1), 1)
        H_avg = np.sum(np.where(good, H[ring_idx], 0.0), axis=1) / cnt
        B_avg = np.sum(np.where(good, B[ring_idx], 0.0), axis=1) / cnt
        H = np.where(flagged, H_avg, H)
        B = np.where(flagged, B_avg, B)
    return CurvatureField(nu, H, B, "discrete", flagged)


def curvature_for(mesh, prefer="auto"):
    """Analytic curvature when the family allows it, discrete otherwise."""
    if prefer == "discrete":
        return discrete_curvature(mesh)
    if isinstance(mesh.family_tag, (GeodesicSphere, CliffordTorus)):
        return analytic_curvature(mesh)
    if prefer == "analytic":
        raise DomainError("curvature: no analytic curvature for this mesh")
    return discrete_curvature(mesh)


def jorge_xavier_check(mesh, curvature, p0, R_enclosing, tol=1e-8):
    """Compare ``||H||_inf`` with ``cot R`` for a mesh inside ``B(p0, R)``.

    Returns ``(H_inf, cot R, passed)``.
    """
    if not (0 < R_enclosing < np.pi / 2):
        raise PreconditionError(f"curvature: enclosing radius must lie in (0, pi/2), got {R_enclosing!r}")
    r = great_circle_distance(np.asarray(p0)[None, :], mesh.vertices)
    if r.max() > R_enclosing + 1e-12:
        raise PreconditionError(f"curvature: mesh reaches distance {r.max():.6g} > R_enclosing = {R_enclosing:.6g}")
    lhs = curvature.H_inf()
    rhs = 1.0 / np.tan(R_enclosing)
    return lhs, rhs, bool(lhs >= rhs - tol)
