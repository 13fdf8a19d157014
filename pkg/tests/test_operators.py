import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pinchlab.errors import AssemblyError, DomainError, PreconditionError
from pinchlab.mesh import ImmersedMesh, make_geodesic_sphere
from pinchlab.operators import (assemble, dirichlet_energy, dump_coo, face_gradients, face_side_lengths,
                                integrate, lp_norm, spherical_angle_cotangents, spherical_area)
from pinchlab.sphere import exp_map, random_points, tangent_frame

from conftest import random_rotation

E = np.eye(4)


def test_octant_triangle_has_area_pi_over_two_and_right_angles():
    lengths = np.array([[np.pi / 2] * 3])
    assert np.isclose(spherical_area(lengths)[0], np.pi / 2, rtol=1e-14)
    assert np.allclose(spherical_angle_cotangents(lengths), 0.0, atol=1e-15)


def _euclidean_cotans(p):
    out = []
    for k in range(3):
        a, b, c = p[k], p[(k + 1) % 3], p[(k + 2) % 3]
        u, v = b - a, c - a
        out.append(u @ v / np.linalg.norm(np.cross(u, v)))
    return np.array(out)


@pytest.mark.parametrize("scale", [1e-2, 1e-4, 1e-6])
def test_tiny_triangles_match_the_flat_cotan_formula(scale):
    rng = np.random.default_rng(5)
    p = random_points(rng, 1)[0]
    frame = tangent_frame(p)
    flat = rng.standard_normal((3, 2)) * scale
    verts = exp_map(p[None], flat @ frame[:, :2].T)
    m = ImmersedMesh(verts, np.array([[0, 1, 2]]))
    cot = spherical_angle_cotangents(face_side_lengths(m))[0]
    ref = _euclidean_cotans(np.c_[flat, np.zeros(3)])
    assert np.allclose(cot, ref, rtol=10 * scale ** 2 + 1e-7)
    area = spherical_area(face_side_lengths(m))[0]
    u, v = flat[1] - flat[0], flat[2] - flat[0]
    flat_area = 0.5 * abs(u[0] * v[1] - u[1] * v[0])
    assert np.isclose(area, flat_area, rtol=10 * scale ** 2 + 1e-7)


def test_stiffness_is_symmetric_psd_and_kills_constants(ops_sphere4):
    S = ops_sphere4.stiffness
    assert abs(S - S.T).max() < 1e-14
    assert np.abs(S @ np.ones(S.shape[0])).max() < 1e-12
    rng = np.random.default_rng(0)
    for _ in range(5):
        f = rng.standard_normal(S.shape[0])
        assert dirichlet_energy(ops_sphere4, f) >= 0


@pytest.mark.parametrize("refine, tol", [(3, 0.02), (4, 5e-3)])
def test_sphere_area_converges_to_4pi_sin2R(pole, refine, tol):
    ops = assemble(make_geodesic_sphere(pole, np.pi / 4, refine))
    assert abs(ops.total_area - 2 * np.pi) / (2 * np.pi) < tol


def test_torus_area(ops_torus48):
    assert abs(ops_torus48.total_area - 2 * np.pi ** 2) / (2 * np.pi ** 2) < 5e-3


def test_mass_kinds_agree_on_totals(sphere3):
    lumped, consistent = assemble(sphere3), assemble(sphere3, "consistent")
    assert np.isclose(lumped.mass.sum(), lumped.total_area)
    assert np.isclose(consistent.mass.sum(), consistent.total_area)
    assert abs(consistent.mass - consistent.mass.T).max() == 0
    assert np.all(np.linalg.eigvalsh(consistent.mass.toarray()) > 0)
    with pytest.raises(DomainError):
        assemble(sphere3, "diagonal")


def test_coordinate_energy_matches_the_smooth_value(ops_sphere4, sphere4):
    # ambient coordinates orthogonal to the centre restrict to eigenfunctions
    # with eigenvalue n / sin^2 R = 4 on S(c, pi/4)
    y = sphere4.vertices[:, 0]
    ratio = dirichlet_energy(ops_sphere4, y) / integrate(ops_sphere4, y ** 2)
    assert abs(ratio - 4.0) / 4.0 < 0.01


def test_degenerate_face_is_named():
    v = np.array([[1.0, 0, 0, 0], [0, 1.0, 0, 0], [np.sqrt(0.5), np.sqrt(0.5), 0, 0]])
    m = ImmersedMesh(v, np.array([[0, 1, 2], [0, 2, 1]]))
    with pytest.raises(AssemblyError, match="degenerate face 0"):
        assemble(m)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2 ** 31 - 1))
def test_assembly_is_rotation_invariant(seed):
    m = make_geodesic_sphere(E[3], 0.9, 1)
    q = random_rotation(np.random.default_rng(seed))
    a, b = assemble(m), assemble(m.transformed(q))
    assert abs(a.stiffness - b.stiffness).max() < 1e-11
    assert abs(a.mass - b.mass).max() < 1e-13


def test_lp_norms(ops_sphere4):
    n = ops_sphere4.n_vertices
    assert np.isclose(lp_norm(ops_sphere4, np.full(n, -3.0), 2.5), 3.0)
    rng = np.random.default_rng(2)
    f = rng.standard_normal(n)
    w = ops_sphere4.weights / ops_sphere4.total_area
    assert np.isclose(lp_norm(ops_sphere4, f, 2), np.sqrt(w @ f ** 2))
    assert lp_norm(ops_sphere4, f, np.inf) == np.abs(f).max()
    # huge exponents stay finite and approach the max
    assert np.isfinite(lp_norm(ops_sphere4, 1e3 * f, 400.0))
    vec = rng.standard_normal((n, 3))
    assert np.isclose(lp_norm(ops_sphere4, vec, 1), w @ np.linalg.norm(vec, axis=1))
    with pytest.raises(DomainError):
        lp_norm(ops_sphere4, f, 0.5)
    with pytest.raises(PreconditionError):
        lp_norm(ops_sphere4, f[:-1], 2)


def test_face_gradients_of_a_linear_field_on_small_faces(pole):
    m = make_geodesic_sphere(pole, 0.05, 3)
    ops = assemble(m)
    # a tiny cap is nearly flat: |grad x_0| is 1 up to the cap curvature
    g = face_gradients(ops, m, m.vertices[:, 0])
    norms = np.linalg.norm(g, axis=1)
    x0 = m.vertices[m.faces, 0].mean(axis=1)
    expect = np.sqrt(np.clip(1 - x0 ** 2 / np.sin(0.05) ** 2, 0, None))
    assert np.median(np.abs(norms - expect)) < 0.05


def test_dump_coo(tmp_path, sphere3):
    ops = assemble(sphere3)
    path = tmp_path / "s.coo"
    dump_coo(ops.stiffness, path)
    rows = np.loadtxt(path)
    assert len(rows) == ops.stiffness.nnz
    assert np.isclose(rows[:, 2].sum(), ops.stiffness.sum(), atol=1e-10)
