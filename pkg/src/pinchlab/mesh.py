"""Triangulated hypersurfaces immersed in the unit sphere S^3.

Vertices are stored as unit vectors in R^4 and faces as index triples.
Edges are read as great-circle arcs, so a mesh is a piecewise-geodesic
surface whose induced metric is given by the arc lengths.

Three families are generated with exact parametric metadata:

* geodesic spheres ``S(c, R)`` by icosahedral subdivision,
* the minimal Clifford torus ``S^1(1/sqrt 2) x S^1(1/sqrt 2)``,
* radial graphs ``r(u) = R + delta * P_mode(u_z)`` over a geodesic sphere.

The module also reads and writes the S4OFF text format.
"""

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components
from scipy.special import eval_legendre

from .errors import DomainError, MeshError
from .sphere import great_circle_distance, log_map, tangent_frame

UNIT_TOL = 1e-12


@dataclass(frozen=True)
class GeodesicSphere:
    center: tuple
    radius: float


@dataclass(frozen=True)
class CliffordTorus:
    p: int = 1
    q: int = 1
    r1: float = float(np.sqrt(0.5))
    r2: float = float(np.sqrt(0.5))


@dataclass(frozen=True)
class PerturbedSphere:
    center: tuple
    radius: float
    delta: float
    mode: int


FamilyTag = Union[GeodesicSphere, CliffordTorus, PerturbedSphere]


@dataclass(frozen=True, eq=False)
class ImmersedMesh:
    """Closed oriented triangle mesh with vertices on the unit sphere S^{n+1}.

    Parameters
    ----------
    vertices : (V, n+2) array
        Unit ambient positions.
    faces : (F, 3) int array
        Counter-clockwise index triples; orientation is global and
        consistent across the mesh.
    family_tag : GeodesicSphere | CliffordTorus | PerturbedSphere | None
        Exact description of the generating family, if any.
    """

    vertices: np.ndarray
    faces: np.ndarray
    family_tag: Optional[FamilyTag] = None
    n: int = 2
    _edges: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        f = np.array(self.faces, dtype=np.int64)
        v.setflags(write=False)
        f.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "faces", f)

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_faces(self):
        return len(self.faces)

    @property
    def edges(self):
        """Unique undirected edges as a sorted (E, 2) array."""
        if self._edges is None:
            e = np.concatenate([self.faces[:, [0, 1]], self.faces[:, [1, 2]], self.faces[:, [2, 0]]])
            e = np.unique(np.sort(e, axis=1), axis=0)
            e.setflags(write=False)
            object.__setattr__(self, "_edges", e)
        return self._edges

    def edge_lengths(self):
        """Great-circle lengths of :attr:`edges`."""
        e = self.edges
        return great_circle_distance(self.vertices[e[:, 0]], self.vertices[e[:, 1]])

    def euler_characteristic(self):
        return self.n_vertices - len(self.edges) + self.n_faces

    def genus(self):
        return (2 - self.euler_characteristic()) // 2

    def adjacency(self):
        """Symmetric vertex adjacency as a CSR matrix of ones."""
        e = self.edges
        nv = self.n_vertices
        data = np.ones(2 * len(e))
        a = sparse.coo_matrix((data, (np.r_[e[:, 0], e[:, 1]], np.r_[e[:, 1], e[:, 0]])), shape=(nv, nv))
        return a.tocsr()

    def flipped(self):
        """Same surface with the opposite orientation."""
        return ImmersedMesh(self.vertices, self.faces[:, ::-1], self.family_tag, self.n)

    def transformed(self, q):
        """Image under an ambient orthogonal map ``x -> q x``; the tag is dropped."""
        return ImmersedMesh(self.vertices @ np.asarray(q).T, self.faces, None, self.n)

    def validate(self):
        """Raise :class:`MeshError` unless every immersed-mesh invariant holds."""
        v, f = self.vertices, self.faces
        if v.ndim != 2 or v.shape[1] != self.n + 2:
            raise MeshError(f"mesh: vertices must have shape (V, {self.n + 2}), got {v.shape}")
        if f.ndim != 2 or f.shape[1] != 3 or len(f) == 0:
            raise MeshError(f"mesh: faces must have shape (F, 3), got {f.shape}")
        if not np.all(np.isfinite(v)):
            raise MeshError("mesh: non-finite vertex coordinate")
        norms = np.linalg.norm(v, axis=1)
        bad = np.flatnonzero(np.abs(norms - 1.0) > UNIT_TOL)
        if len(bad):
            raise MeshError(f"mesh: vertex {bad[0]} is off the unit sphere (|v| = {norms[bad[0]]!r})")
        if f.min() < 0 or f.max() >= len(v):
            raise MeshError("mesh: face index out of range")
        distinct = (f[:, 0] != f[:, 1]) & (f[:, 1] != f[:, 2]) & (f[:, 2] != f[:, 0])
        if not np.all(distinct):
            raise MeshError(f"mesh: face {np.flatnonzero(~distinct)[0]} repeats a vertex")

        directed = np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]])
        uniq, counts = np.unique(directed, axis=0, return_counts=True)
        if np.any(counts > 1):
            a, b = uniq[np.argmax(counts > 1)]
            raise MeshError(f"mesh: directed edge ({a}, {b}) used twice (inconsistent orientation or non-manifold)")
        # closed + oriented: each directed edge has its reverse exactly once
        key = uniq[:, 0] * len(v) + uniq[:, 1]
        rkey = uniq[:, 1] * len(v) + uniq[:, 0]
        missing = ~np.isin(rkey, key)
        if np.any(missing):
            a, b = uniq[np.argmax(missing)]
            raise MeshError(f"mesh: edge ({a}, {b}) is a boundary edge or orientation flips across it")

        used = np.zeros(len(v), dtype=bool)
        used[f.ravel()] = True
        if not np.all(used):
            raise MeshError(f"mesh: vertex {np.flatnonzero(~used)[0]} is not referenced by any face")
        ncomp, _ = connected_components(self.adjacency(), directed=False)
        if ncomp != 1:
            raise MeshError(f"mesh: {ncomp} connected components, expected 1")
        return self


@dataclass(frozen=True)
class PositionFields:
    """Distance and position fields of a mesh relative to a basepoint p0.

    ``X = sin r * grad r`` where ``r = d(p0, .)`` and the gradient is taken in
    the ambient sphere. ``X_tan`` and ``X_normal`` split X against the unit
    normal of the surface. ``degenerate`` marks vertices at p0 or its
    antipode, where the gradient of r is undefined.
    """

    p0: np.ndarray
    r: np.ndarray
    X: np.ndarray
    X_tan: np.ndarray
    X_normal: np.ndarray
    degenerate: np.ndarray

    @property
    def X_norm(self):
        return np.linalg.norm(self.X, axis=1)

    @property
    def X_tan_norm(self):
        return np.linalg.norm(self.X_tan, axis=1)


def _as_point(c, dim=4):
    c = np.asarray(c, dtype=float).reshape(-1)
    if c.shape != (dim,):
        raise DomainError(f"mesh: expected a point of R^{dim}, got shape {c.shape}")
    nc = np.linalg.norm(c)
    if nc == 0:
        raise DomainError("mesh: zero vector is not a point of the sphere")
    return c / nc


def north_pole(dim=4):
    p = np.zeros(dim)
    p[-1] = 1.0
    return p


def icosphere(refine):
    """Unit icosphere in R^3 after ``refine`` midpoint subdivisions.

    Faces are counter-clockwise seen from outside.
    """
    if refine < 0:
        raise DomainError("mesh: refine must be >= 0")
    t = (1.0 + np.sqrt(5.0)) / 2.0
    v = np.array([
        [-1, t, 0], [1, t, 0], [-1, -t, 0], [1, -t, 0],
        [0, -1, t], [0, 1, t], [0, -1, -t], [0, 1, -t],
        [t, 0, -1], [t, 0, 1], [-t, 0, -1], [-t, 0, 1],
    ], dtype=float)
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    f = np.array([
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ], dtype=np.int64)
    for _ in range(refine):
        nf = len(f)
        e = np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]])
        uniq, inv = np.unique(np.sort(e, axis=1), axis=0, return_inverse=True)
        inv = inv.reshape(-1)
        mid = v[uniq[:, 0]] + v[uniq[:, 1]]
        mid /= np.linalg.norm(mid, axis=1, keepdims=True)
        m = len(v) + inv.reshape(3, nf)
        ab, bc, ca = m[0], m[1], m[2]
        a, b, c = f[:, 0], f[:, 1], f[:, 2]
        f = np.concatenate([
            np.column_stack([a, ab, ca]),
            np.column_stack([b, bc, ab]),
            np.column_stack([c, ca, bc]),
            np.column_stack([ab, bc, ca]),
        ])
        v = np.vstack([v, mid])
    return v, f


def face_normals(vertices, faces):
    """Unit normals of the great 2-spheres carrying each geodesic face.

    The normal n of face (a, b, c) satisfies ``<n, y> ~ det[a, b, c, y]``;
    it is orthogonal to the three vertices and hence tangent to S^3 along
    the whole face. Also returns the raw determinant magnitudes.
    """
    a = vertices[faces[:, 0]]
    b = vertices[faces[:, 1]]
    c = vertices[faces[:, 2]]
    rows = np.stack([a, b, c], axis=1)  # (F, 3, 4)
    cof = np.empty((len(faces), 4))
    for i in range(4):
        keep = [j for j in range(4) if j != i]
        cof[:, i] = (-1) ** (i + 3) * np.linalg.det(rows[:, :, keep])
    size = np.linalg.norm(cof, axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        unit = cof / size[:, None]
    return unit, size


def _radial_mesh(center, radius_of_direction, refine, tag):
    c = _as_point(center)
    frame = tangent_frame(c)
    u, f = icosphere(refine)
    rr = radius_of_direction(u)
    dirs = u @ frame.T
    verts = np.cos(rr)[:, None] * c + np.sin(rr)[:, None] * dirs
    verts /= np.linalg.norm(verts, axis=1, keepdims=True)
    # orientation decided on the unperturbed base so every radial graph over
    # the same (center, refine) shares one face list
    base = icosphere(0)
    bv = np.cos(tag.radius) * c + np.sin(tag.radius) * (base[0] @ frame.T)
    n0, _ = face_normals(bv, base[1][:1])
    outward = np.cos(tag.radius) * bv[base[1][0, 0]] - c
    if np.dot(n0[0], outward) < 0:
        f = f[:, ::-1].copy()
    return ImmersedMesh(verts, f, tag)


def make_geodesic_sphere(center, R, refine):
    """Geodesic sphere ``S(center, R)`` in S^3 from an icosphere of level ``refine``."""
    if not (0.0 < R < np.pi / 2):
        raise DomainError(f"mesh: sphere radius must lie in (0, pi/2), got {R!r}")
    c = _as_point(center)
    tag = GeodesicSphere(tuple(c.tolist()), float(R))
    return _radial_mesh(c, lambda u: np.full(len(u), float(R)), refine, tag)


def perturbation_profile(u, mode):
    """Zonal profile ``P_mode(u_z)`` on unit directions u; max |value| is 1."""
    return eval_legendre(int(mode), np.clip(u[:, 2], -1.0, 1.0))


def make_perturbed_sphere(center, R, delta, mode, refine):
    """Radial graph ``r(u) = R + delta * P_mode(u_z)`` over ``S(center, R)``.

    With ``delta == 0`` the vertices coincide bit for bit with
    :func:`make_geodesic_sphere`.
    """
    if delta < 0:
        raise DomainError("mesh: delta must be >= 0")
    if int(mode) < 1:
        raise DomainError("mesh: mode must be >= 1")
    if not (R - delta > 0.0 and R + delta < np.pi / 2):
        raise DomainError(f"mesh: radii R +/- delta = {R - delta!r}, {R + delta!r} leave (0, pi/2)")
    c = _as_point(center)
    tag = PerturbedSphere(tuple(c.tolist()), float(R), float(delta), int(mode))
    return _radial_mesh(c, lambda u: R + delta * perturbation_profile(u, mode), refine, tag)


def make_clifford_torus(p=1, q=1, res_u=64, res_v=64):
    """Minimal Clifford torus ``S^1(1/sqrt 2) x S^1(1/sqrt 2)`` in S^3.

    Vertex ``(i, j)`` sits at angles ``(2 pi i / res_u, 2 pi j / res_v)``;
    each grid cell is split along one diagonal.
    """
    if p + q != 2 or p != 1 or q != 1:
        raise DomainError(f"mesh: only the p = q = 1 Clifford torus (n = 2) is supported, got p={p}, q={q}")
    if res_u < 3 or res_v < 3:
        raise DomainError("mesh: torus resolution must be >= 3 in each direction")
    r1 = np.sqrt(p / 2.0)
    r2 = np.sqrt(q / 2.0)
    th = 2 * np.pi * np.arange(res_u) / res_u
    be = 2 * np.pi * np.arange(res_v) / res_v
    T, Bt = np.meshgrid(th, be, indexing="ij")
    verts = np.column_stack([
        r1 * np.cos(T).ravel(), r1 * np.sin(T).ravel(),
        r2 * np.cos(Bt).ravel(), r2 * np.sin(Bt).ravel(),
    ])
    verts /= np.linalg.norm(verts, axis=1, keepdims=True)
    i, j = np.meshgrid(np.arange(res_u), np.arange(res_v), indexing="ij")
    i, j = i.ravel(), j.ravel()
    idx = lambda a, b: (a % res_u) * res_v + (b % res_v)  # noqa: E731
    v00, v10, v11, v01 = idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)
    f = np.concatenate([np.column_stack([v00, v10, v11]), np.column_stack([v00, v11, v01])])
    tag = CliffordTorus(p, q, float(r1), float(r2))
    n0, _ = face_normals(verts, f[:1])
    if np.dot(n0[0], clifford_normal(verts[f[0, 0]][None])[0]) < 0:
        f = f[:, ::-1].copy()
    return ImmersedMesh(verts, f, tag)


def clifford_normal(x):
    """Product normal ``(x1, x2, -x3, -x4)`` of the minimal Clifford torus."""
    return np.column_stack([x[:, 0], x[:, 1], -x[:, 2], -x[:, 3]])


def position_fields(mesh, p0, normals):
    """Distance r, position field X and its split against the normal field.

    Parameters
    ----------
    mesh : ImmersedMesh
    p0 : array_like
        Basepoint on the sphere.
    normals : CurvatureField or (V, 4) array
        Unit normals of the surface.
    """
    p0 = _as_point(p0, mesh.n + 2)
    nu = getattr(normals, "nu", normals)
    x = mesh.vertices
    c = x @ p0
    r = great_circle_distance(p0[None, :], x)
    # sin r * grad r = cos r * x - p0, exact and smooth through r = 0
    X = c[:, None] * x - p0[None, :]
    degenerate = (r < 1e-12) | (r > np.pi - 1e-12)
    X[degenerate] = 0.0
    X_normal = np.sum(X * nu, axis=1)
    X_tan = X - X_normal[:, None] * nu
    X_normal[degenerate] = 0.0
    X_tan[degenerate] = 0.0
    return PositionFields(p0, r, X, X_tan, X_normal, degenerate)


def radial_directions(mesh, p0):
    """Unit initial velocities of the geodesics from p0 to each vertex."""
    v, r = log_map(p0[None, :], mesh.vertices)
    with np.errstate(invalid="ignore", divide="ignore"):
        return v / r[:, None], r


# ---------------------------------------------------------------- S4OFF I/O

def write_s4off(mesh, path):
    """Write ``mesh`` in S4OFF text format (17 significant digits)."""
    v = mesh.vertices / np.linalg.norm(mesh.vertices, axis=1, keepdims=True)
    with open(path, "w") as fh:
        fh.write(format_s4off(ImmersedMesh(v, mesh.faces)))


def format_s4off(mesh):
    lines = ["S4OFF", f"{mesh.n_vertices} {mesh.n_faces}"]
    lines += [" ".join(f"{c:.17g}" for c in row) for row in mesh.vertices]
    lines += [f"3 {a} {b} {c}" for a, b, c in mesh.faces]
    return "\n".join(lines) + "\n"


def read_s4off(path):
    """Read and validate an S4OFF file; raises :class:`MeshError` on any defect."""
    with open(path) as fh:
        text = fh.read()
    return parse_s4off(text)


def parse_s4off(text):
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != "S4OFF":
        raise MeshError("mesh: missing S4OFF header")
    try:
        nv, nf = (int(t) for t in lines[1].split())
    except (IndexError, ValueError):
        raise MeshError("mesh: malformed count line") from None
    if len(lines) != 2 + nv + nf:
        raise MeshError(f"mesh: expected {nv} vertex and {nf} face lines, got {len(lines) - 2} lines")
    try:
        vrows = [[float(t) for t in ln.split()] for ln in lines[2:2 + nv]]
        rows = [[int(t) for t in ln.split()] for ln in lines[2 + nv:]]
    except ValueError as exc:
        raise MeshError(f"mesh: unparsable number ({exc})") from None
    short = [i for i, rw in enumerate(vrows) if len(rw) != 4]
    if short:
        raise MeshError(f"mesh: vertex line {short[0]} must carry 4 coordinates")
    v = np.array(vrows, dtype=float).reshape(nv, 4)
    if any(len(rw) != 4 or rw[0] != 3 for rw in rows):
        raise MeshError("mesh: face lines must read '3 i j k'")
    f = np.array([rw[1:] for rw in rows], dtype=np.int64)
    return ImmersedMesh(v, f).validate()
