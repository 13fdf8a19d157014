"""Intrinsic piecewise-linear Laplace-Beltrami operators on immersed meshes.

Every triangle is the geodesic triangle spanned by its vertices, so its
angles and area follow from the three great-circle side lengths by
spherical trigonometry. The stiffness matrix uses cotangents of those
angles; the mass matrix is barycentric-lumped unless the consistent
(Galerkin) variant is requested.
"""

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .errors import AssemblyError, DomainError, PreconditionError
from .sphere import great_circle_distance

MIN_FACE_AREA = 1e-14


@dataclass(frozen=True)
class OperatorPair:
    """Stiffness and mass matrices of a mesh.

    Attributes
    ----------
    stiffness : csr_matrix
        Symmetric positive semidefinite, ``u.T @ S @ v = int <grad u, grad v>``.
    mass : csr_matrix
        Symmetric positive definite.
    total_area : float
        Sum of the geodesic triangle areas.
    face_areas : ndarray
    lengths : ndarray
        (F, 3) great-circle side lengths; column k is the side opposite
        corner k.
    """

    stiffness: sparse.csr_matrix
    mass: sparse.csr_matrix
    total_area: float
    face_areas: np.ndarray
    lengths: np.ndarray
    mass_kind: str = "lumped"

    @property
    def weights(self):
        """Quadrature weights: row sums of the mass matrix."""
        return np.asarray(self.mass.sum(axis=1)).ravel()

    @property
    def n_vertices(self):
        return self.stiffness.shape[0]


def face_side_lengths(mesh):
    """Great-circle side lengths, column k opposite corner k."""
    v, f = mesh.vertices, mesh.faces
    a, b, c = v[f[:, 0]], v[f[:, 1]], v[f[:, 2]]
    return np.column_stack([
        great_circle_distance(b, c),
        great_circle_distance(c, a),
        great_circle_distance(a, b),
    ])


def spherical_area(lengths):
    """Area (spherical excess) of geodesic triangles by l'Huilier's theorem."""
    a, b, c = lengths[:, 0], lengths[:, 1], lengths[:, 2]
    s = 0.5 * (a + b + c)
    prod = np.tan(s / 2) * np.tan((s - a) / 2) * np.tan((s - b) / 2) * np.tan((s - c) / 2)
    return 4.0 * np.arctan(np.sqrt(np.clip(prod, 0.0, None)))


def spherical_angle_cotangents(lengths):
    """Cotangents of the corner angles of geodesic triangles.

    Uses the haversine form of the spherical law of cosines,
    ``hav A = (hav a - hav(b - c)) / (sin b sin c)``, which stays accurate
    for short sides where the plain cosine form cancels.
    """
    out = np.empty_like(lengths)
    hav = lambda t: np.sin(t / 2.0) ** 2  # noqa: E731
    for k in range(3):
        a = lengths[:, k]
        b = lengths[:, (k + 1) % 3]
        c = lengths[:, (k + 2) % 3]
        ha = (hav(a) - hav(b - c)) / (np.sin(b) * np.sin(c))
        ha = np.clip(ha, 0.0, 1.0)
        cos_a = 1.0 - 2.0 * ha
        sin_a = 2.0 * np.sqrt(ha * (1.0 - ha))
        out[:, k] = cos_a / sin_a
    return out


def assemble(mesh, mass="lumped"):
    """Build the :class:`OperatorPair` of ``mesh``.

    Parameters
    ----------
    mesh : ImmersedMesh
    mass : {"lumped", "consistent"}

    Raises
    ------
    AssemblyError
        If a face has area below ``1e-14``.
    """
    if mass not in ("lumped", "consistent"):
        raise DomainError(f"operators: unknown mass kind {mass!r}")
    f = mesh.faces
    nv = mesh.n_vertices
    lengths = face_side_lengths(mesh)
    area = spherical_area(lengths)
    tiny = np.flatnonzero(~(area >= MIN_FACE_AREA))
    if len(tiny):
        raise AssemblyError(f"operators: degenerate face {tiny[0]} {f[tiny[0]].tolist()} (area {area[tiny[0]]:.3e})")
    cot = spherical_angle_cotangents(lengths)

    # the angle at corner k sits opposite edge (k+1, k+2)
    i = np.concatenate([f[:, 1], f[:, 2], f[:, 0]])
    j = np.concatenate([f[:, 2], f[:, 0], f[:, 1]])
    w = 0.5 * np.concatenate([cot[:, 0], cot[:, 1], cot[:, 2]])
    off = sparse.coo_matrix((np.r_[-w, -w], (np.r_[i, j], np.r_[j, i])), shape=(nv, nv)).tocsr()
    off.sum_duplicates()
    diag = -np.asarray(off.sum(axis=1)).ravel()
    stiffness = (off + sparse.diags(diag)).tocsr()

    if mass == "lumped":
        m = np.zeros(nv)
        np.add.at(m, f.ravel(), np.repeat(area / 3.0, 3))
        mass_mat = sparse.diags(m).tocsr()
    else:
        ii = np.concatenate([f[:, 0], f[:, 1], f[:, 2], i, j])
        jj = np.concatenate([f[:, 0], f[:, 1], f[:, 2], j, i])
        vals = np.concatenate([np.tile(area / 6.0, 3), np.tile(area / 12.0, 6)])
        mass_mat = sparse.coo_matrix((vals, (ii, jj)), shape=(nv, nv)).tocsr()
    return OperatorPair(stiffness, mass_mat, float(area.sum()), area, lengths, mass)


def _check_field(ops, f):
    f = np.asarray(f, dtype=float)
    if f.shape[0] != ops.n_vertices:
        raise PreconditionError(f"operators: field has {f.shape[0]} values, mesh has {ops.n_vertices} vertices")
    return f


def integrate(ops, f):
    """Quadrature of a vertex field, ``f.T @ mass @ 1``."""
    f = _check_field(ops, f)
    return float(f @ ops.weights)


def pointwise_norm(f):
    """Per-vertex magnitude: |f| for scalars, Euclidean length for vector rows."""
    f = np.asarray(f, dtype=float)
    return np.abs(f) if f.ndim == 1 else np.linalg.norm(f, axis=1)


def lp_norm(ops, f, p):
    """Normalized ``L^p`` norm ``((1/|M|) int |f|^p)^(1/p)``; ``p = inf`` gives max |f|.

    Vector-valued fields (shape (V, k)) are measured by their pointwise length.
    """
    if not (p >= 1):
        raise DomainError(f"operators: L^p norm needs p >= 1, got {p!r}")
    g = pointwise_norm(_check_field(ops, f))
    top = g.max(initial=0.0)
    if np.isinf(p):
        return float(top)
    if top == 0.0:
        return 0.0
    w = ops.weights
    # scaling by the max keeps |f|^p finite for large p
    s = np.sum(w * (g / top) ** p) / ops.total_area
    return float(top * s ** (1.0 / p))


def dirichlet_energy(ops, f):
    f = _check_field(ops, f)
    return float(f @ (ops.stiffness @ f))


def face_gradients(ops, mesh, values):
    """Piecewise-linear gradients of vertex data in each face's intrinsic chart.

    Each face is laid flat with its great-circle side lengths; vertex 0 at
    the origin, vertex 1 on the positive x axis.

    Parameters
    ----------
    values : (V,) or (V, k) array

    Returns
    -------
    (F, 2) or (F, k, 2) array of gradients in the face charts.
    """
    vals = np.asarray(values, dtype=float)
    scalar = vals.ndim == 1
    if scalar:
        vals = vals[:, None]
    f = mesh.faces
    l0, l1, l2 = ops.lengths[:, 0], ops.lengths[:, 1], ops.lengths[:, 2]
    # corner 0 at origin, corner 1 at (l2, 0), corner 2 at (px, py)
    px = (l2 ** 2 + l1 ** 2 - l0 ** 2) / (2 * l2)
    py = np.sqrt(np.clip(l1 ** 2 - px ** 2, 0.0, None))
    d1 = vals[f[:, 1]] - vals[f[:, 0]]
    d2 = vals[f[:, 2]] - vals[f[:, 0]]
    gx = d1 / l2[:, None]
    gy = (d2 - px[:, None] * gx) / py[:, None]
    g = np.stack([gx, gy], axis=-1)
    return g[:, 0, :] if scalar else g


def face_to_vertex(ops, mesh, face_values):
    """Area-weighted average of per-face data onto vertices."""
    fv = np.asarray(face_values, dtype=float)
    f = mesh.faces
    acc = np.zeros((mesh.n_vertices,) + fv.shape[1:])
    wsum = np.zeros(mesh.n_vertices)
    for k in range(3):
        np.add.at(acc, f[:, k], ops.face_areas.reshape((-1,) + (1,) * (fv.ndim - 1)) * fv)
        np.add.at(wsum, f[:, k], ops.face_areas)
    return acc / wsum.reshape((-1,) + (1,) * (fv.ndim - 1))


def dump_coo(matrix, path):
    """Write a sparse matrix as ``i j value`` lines (zero-based)."""
    m = sparse.coo_matrix(matrix)
    with open(path, "w") as fh:
        for i, j, val in zip(m.row, m.col, m.data):
            fh.write(f"{i} {j} {val:.17g}\n")
