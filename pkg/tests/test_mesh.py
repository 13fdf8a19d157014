import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pinchlab.errors import DomainError, MeshError
from pinchlab.mesh import (ImmersedMesh, clifford_normal, face_normals, icosphere, make_clifford_torus,
                           make_geodesic_sphere, make_perturbed_sphere, north_pole, parse_s4off, format_s4off,
                           perturbation_profile, position_fields, read_s4off, write_s4off)
from pinchlab.sphere import great_circle_distance, random_points

from conftest import random_rotation


@pytest.mark.parametrize("refine", [0, 1, 2, 3])
def test_icosphere_counts(refine):
    v, f = icosphere(refine)
    assert len(v) == 10 * 4 ** refine + 2
    assert len(f) == 20 * 4 ** refine


def test_sphere_vertices_sit_at_the_radius(sphere3, pole):
    r = great_circle_distance(pole[None], sphere3.vertices)
    assert np.max(np.abs(r - np.pi / 4)) < 1e-14
    assert sphere3.genus() == 0
    sphere3.validate()


def test_sphere_faces_point_outward(sphere3, pole):
    n, _ = face_normals(sphere3.vertices, sphere3.faces)
    x = sphere3.vertices[sphere3.faces[:, 0]]
    outward = np.cos(np.pi / 4) * x - pole
    assert np.all(np.sum(n * outward, axis=1) > 0)


def test_torus_vertices_and_orientation(torus24):
    x = torus24.vertices
    assert np.allclose(x[:, 0] ** 2 + x[:, 1] ** 2, 0.5)
    assert torus24.genus() == 1
    n, _ = face_normals(x, torus24.faces)
    assert np.all(np.sum(n * clifford_normal(x[torus24.faces[:, 0]]), axis=1) > 0)


def test_face_normal_is_tangent_and_orthogonal_to_the_face():
    rng = np.random.default_rng(4)
    v = random_points(rng, 3)
    n, _ = face_normals(v, np.array([[0, 1, 2]]))
    assert np.allclose(v @ n[0], 0, atol=1e-14)
    assert abs(np.linalg.norm(n[0]) - 1) < 1e-14


def test_zero_delta_reproduces_the_sphere_bit_for_bit(pole):
    a = make_geodesic_sphere(pole, 0.7, 2)
    b = make_perturbed_sphere(pole, 0.7, 0.0, 3, 2)
    assert np.array_equal(a.vertices, b.vertices) and np.array_equal(a.faces, b.faces)


def test_perturbed_radii_follow_the_profile(bumpy3, pole):
    r = great_circle_distance(pole[None], bumpy3.vertices)
    assert np.all(np.abs(r - np.pi / 4) <= 0.05 + 1e-14)
    assert np.isclose(np.max(np.abs(r - np.pi / 4)), 0.05, atol=1e-12)
    u = np.array([[0, 0, 1.0], [1.0, 0, 0]])
    assert np.allclose(perturbation_profile(u, 2), [1.0, -0.5])


@pytest.mark.parametrize("args", [(0.0,), (np.pi / 2,), (-0.3,), (2.0,)])
def test_sphere_radius_domain(pole, args):
    with pytest.raises(DomainError):
        make_geodesic_sphere(pole, args[0], 1)


def test_perturbation_domain(pole):
    with pytest.raises(DomainError):
        make_perturbed_sphere(pole, 1.5, 0.1, 2, 1)
    with pytest.raises(DomainError):
        make_perturbed_sphere(pole, 0.5, -0.1, 2, 1)
    with pytest.raises(DomainError):
        make_clifford_torus(1, 2, 8, 8)


def test_antipodal_centers_give_congruent_meshes():
    c = random_points(np.random.default_rng(9), 1)[0]
    a = make_geodesic_sphere(c, 0.6, 2)
    b = make_geodesic_sphere(-c, 0.6, 2)
    assert np.array_equal(a.vertices, -b.vertices)


def test_validate_rejects_defects(sphere3):
    v, f = sphere3.vertices.copy(), sphere3.faces.copy()
    off = v.copy()
    off[5] *= 1 + 1e-9
    with pytest.raises(MeshError, match="off the unit sphere"):
        ImmersedMesh(off, f).validate()
    with pytest.raises(MeshError, match="used twice|boundary|orientation"):
        ImmersedMesh(v, np.vstack([f[:-1], f[-1, ::-1]])).validate()
    with pytest.raises(MeshError, match="boundary"):
        ImmersedMesh(v, f[:-1]).validate()
    with pytest.raises(MeshError, match="not referenced"):
        ImmersedMesh(np.vstack([v, [[1.0, 0, 0, 0]]]), f).validate()
    with pytest.raises(MeshError, match="out of range"):
        bad = f.copy()
        bad[0, 0] = len(v)
        ImmersedMesh(v, bad).validate()


def test_two_components_are_rejected(pole):
    a = make_geodesic_sphere(pole, 0.3, 0)
    b = make_geodesic_sphere(-pole, 0.3, 0)
    m = ImmersedMesh(np.vstack([a.vertices, b.vertices]), np.vstack([a.faces, b.faces + a.n_vertices]))
    with pytest.raises(MeshError, match="components"):
        m.validate()


def test_arrays_are_read_only(sphere3):
    with pytest.raises(ValueError):
        sphere3.vertices[0, 0] = 0.0


def test_s4off_round_trip_is_exact(tmp_path, bumpy3):
    path = tmp_path / "m.s4off"
    write_s4off(bumpy3, path)
    back = read_s4off(path)
    assert np.array_equal(back.vertices, bumpy3.vertices)
    assert np.array_equal(back.faces, bumpy3.faces)


@pytest.mark.parametrize("mutate, message", [
    (lambda t: t.replace("S4OFF", "OFF", 1), "header"),
    (lambda t: "\n".join(t.splitlines()[:-1]), "expected"),
    (lambda t: t.rsplit("\n3 ", 1)[0] + "\n4 0 1 2\n", "3 i j k"),
    (lambda t: t.replace(t.splitlines()[2], "1 0 0", 1), "4 coordinates"),
    (lambda t: t.replace(t.splitlines()[2], "abc 0 0 1", 1), "unparsable"),
])
def test_corrupted_s4off_is_named(sphere3, mutate, message):
    with pytest.raises(MeshError, match=message):
        parse_s4off(mutate(format_s4off(sphere3)))


def test_position_field_identities(sphere3, pole):
    p0 = random_points(np.random.default_rng(1), 1)[0]
    nu = np.tile([0, 0, 0, 1.0], (sphere3.n_vertices, 1))
    pf = position_fields(sphere3, p0, nu)
    assert np.allclose(pf.X_norm, np.sin(pf.r), atol=1e-14)
    assert np.allclose(np.sum(pf.X * sphere3.vertices, axis=1), 0, atol=1e-14)


def test_position_fields_of_the_model_sphere(sphere3, pole):
    from pinchlab.curvature import analytic_curvature

    pf = position_fields(sphere3, pole, analytic_curvature(sphere3))
    assert np.allclose(pf.X_normal, np.sin(np.pi / 4), atol=1e-14)
    assert np.max(pf.X_tan_norm) < 1e-14


def test_degenerate_vertex_is_flagged(sphere3):
    x0 = sphere3.vertices[0]
    pf = position_fields(sphere3, x0, sphere3.vertices)
    assert pf.degenerate[0] and pf.X_norm[0] == 0.0


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2 ** 31 - 1))
def test_edge_lengths_are_rotation_invariant(seed):
    m = make_clifford_torus(1, 1, 8, 8)
    q = random_rotation(np.random.default_rng(seed))
    assert np.allclose(m.transformed(q).edge_lengths(), m.edge_lengths(), atol=1e-13)


def test_flipped_keeps_validity(torus24):
    torus24.flipped().validate()
