"""Pinching quantities, identities and inequalities for hypersurfaces in S^3.

Given a mesh, its operators, curvature, first eigenvalue and a center of
gravity p0, this module evaluates

* the Heintze identities for the test functions ``(sin r / r) x_i`` and for
  ``div X^T``,
* the chain of L^2 estimates that lead from the pinching defect
  ``eps = n (1 + ||H||_inf^2) - lambda_1`` to roundness,
* the radial projection ``F`` onto the model sphere ``S(p0, R0)``,
  ``R0 = arcsin(1 / h)``, ``h = sqrt(1 + ||H||_inf^2)``, together with
  Hausdorff distance, edge distortion and starshapedness,

and aggregates them into a :class:`PinchingReport`.
"""

import datetime
from dataclasses import asdict, dataclass, field
from typing import List, Optional

import numpy as np
from scipy.spatial import cKDTree

from . import barycenter, curvature as curv
from .errors import PreconditionError
from .mesh import ImmersedMesh, face_normals, position_fields, radial_directions
from .operators import (assemble, face_gradients, face_side_lengths, face_to_vertex, lp_norm,
                        spherical_area)
from .spectral import first_nonzero_eigenvalue
from .sphere import exp_map, fibonacci_sphere, great_circle_distance, log_map, sinc, tangent_frame

DEFAULT_TOL = 0.05
ABS_FLOOR = 1e-10


@dataclass
class LemmaEntry:
    """One inequality ``lhs <= rhs`` evaluated on a mesh."""

    name: str
    lhs: float
    rhs: float
    passed: bool
    not_applicable: bool = False
    reason: str = ""

    def to_dict(self):
        return {"name": self.name, "lhs": self.lhs, "rhs": self.rhs, "pass": self.passed,
                "not_applicable": self.not_applicable, "reason": self.reason}


def verdict(lhs, rhs, tol):
    """``lhs <= rhs`` with relative slack ``tol`` on rhs and a tiny absolute floor."""
    return bool(lhs <= rhs + tol * abs(rhs) + ABS_FLOOR)


# ------------------------------------------------------------------ identities

def gravity_test_functions(mesh, p0):
    """Normal-coordinate test functions ``(sin r / r) x_i`` centred at p0, shape (V, n+1)."""
    v, r = log_map(p0[None, :], mesh.vertices)
    coords = v @ tangent_frame(p0)
    return sinc(r)[:, None] * coords


def heintze_identity_check(mesh, fields, ops=None):
    """Pointwise residual of ``sum_i |grad((sin r / r) x_i)|^2 = n - |X^T|^2``.

    Gradients are piecewise linear per face (intrinsic chart) and averaged
    onto vertices with face-area weights.
    """
    ops = ops if ops is not None else assemble(mesh)
    f = gravity_test_functions(mesh, fields.p0)
    g = face_gradients(ops, mesh, f)  # (F, n+1, 2)
    per_face = np.sum(g ** 2, axis=(1, 2))
    lhs = face_to_vertex(ops, mesh, per_face)
    target = mesh.n - fields.X_tan_norm ** 2
    return np.abs(lhs - target)


def smooth_test_fields(mesh, count=32, seed=0, degree=3):
    """Positive smooth fields ``1 + 0.5 P(x) / max|P|`` with random cubic P.

    Each is a combination of hat functions with nodal values from a random
    polynomial in the ambient coordinates.
    """
    rng = np.random.default_rng(seed)
    x = mesh.vertices
    monos = [np.ones(len(x))]
    for d in range(1, degree + 1):
        for combo in np.ndindex(*([x.shape[1]] * d)):
            if list(combo) == sorted(combo):
                monos.append(np.prod(x[:, list(combo)], axis=1))
    basis = np.column_stack(monos)
    out = []
    for _ in range(count):
        poly = basis @ rng.standard_normal(basis.shape[1])
        poly -= poly.mean()
        out.append(1.0 + 0.5 * poly / np.abs(poly).max())
    return np.column_stack(out)


@dataclass(frozen=True)
class WeakDivergence:
    relative: np.ndarray
    absolute: np.ndarray
    global_residual: float
    global_relative: float


def weak_divergence_check(mesh, ops, fields, curvature, count=32, seed=0):
    """Weak form of ``div X^T = n cos r - n H <X, nu>``.

    Since ``X^T = -grad cos r``, the left side tested against phi is
    ``-int <X^T, grad phi> = phi.T S cos r``. Each residual is divided by
    ``int |phi| (n |cos r| + n |H <X, nu>|)``, the size of the two terms
    that cancel. The constant test function gives the global residual,
    relative to ``|M|``.
    """
    n = mesh.n
    cos_r = np.cos(fields.r)
    source = n * cos_r - n * curvature.H * fields.X_normal
    scale_field = n * np.abs(cos_r) + n * np.abs(curvature.H * fields.X_normal)
    phis = smooth_test_fields(mesh, count, seed)
    w = ops.weights
    lhs = phis.T @ (ops.stiffness @ cos_r)
    rhs = phis.T @ (w * source)
    scale = np.abs(phis).T @ (w * scale_field)
    absolute = np.abs(lhs - rhs)
    glob = abs(float(w @ source))
    return WeakDivergence(absolute / scale, absolute, glob, glob / ops.total_area)


# ------------------------------------------------------------- inequality chain

@dataclass(frozen=True)
class Norms:
    """Normalized norms of the position fields used by the estimates."""

    X2sq: float
    Xt2sq: float
    X_inf: float
    Xt_inf: float
    Y2sq: float
    W2sq: float
    psi1: float
    psi_inf: float
    mean_n_minus_Xt2: float


def position_norms(ops, fields, curvature, h, n=2):
    Xn = fields.X_norm
    H_inf = curvature.H_inf()
    cos_r = np.cos(fields.r)
    nu = curvature.nu
    X = fields.X
    Y = n * (cos_r * curvature.H)[:, None] * nu - n * H_inf ** 2 * X
    with np.errstate(divide="ignore", invalid="ignore"):
        inner = X * Xn[:, None] + (Xn * cos_r * curvature.H)[:, None] * nu - h * X
        W = inner / np.sqrt(Xn)[:, None]
    W[Xn == 0] = 0.0
    psi = np.sqrt(Xn) * np.abs(Xn - 1.0 / h)
    return Norms(
        X2sq=lp_norm(ops, X, 2) ** 2,
        Xt2sq=lp_norm(ops, fields.X_tan, 2) ** 2,
        X_inf=lp_norm(ops, X, np.inf),
        Xt_inf=lp_norm(ops, fields.X_tan, np.inf),
        Y2sq=lp_norm(ops, Y, 2) ** 2,
        W2sq=lp_norm(ops, W, 2) ** 2,
        psi1=lp_norm(ops, psi, 1),
        psi_inf=lp_norm(ops, psi, np.inf),
        mean_n_minus_Xt2=float(ops.weights @ (n - fields.X_tan_norm ** 2)) / ops.total_area,
    )


def inequality_chain(mesh, ops, fields, curvature, eig, p0=None, tol=DEFAULT_TOL, R_enclosing=None):
    """Evaluate every inequality of the estimate chain as a :class:`LemmaEntry`.

    ``eps`` is clamped at 0; the estimates that assume ``eps <= beta^2`` are
    marked not applicable when that fails. If the mesh is not inside an
    open hemisphere around p0 (``beta <= 0``) every entry is skipped.
    """
    n = mesh.n
    lam = eig.lambda1 if hasattr(eig, "lambda1") else float(eig)
    R = float(fields.r.max()) if R_enclosing is None else R_enclosing
    H_inf = curvature.H_inf()
    H_2 = curvature.H_2(ops)
    h = np.sqrt(1.0 + H_inf ** 2)
    eps = max(n * h ** 2 - lam, 0.0)
    names = ["jorge_xavier", "reilly", "x_l2_lower_bound", "rayleigh_position", "position_energy_bound",
             "tangential_l2", "x_l2_lower", "x_l2_upper", "x_l2_unit", "y_l2", "w_l2", "psi_l1"]
    if not R < np.pi / 2:
        why = f"enclosing radius {R:.6g} >= pi/2 (beta <= 0): mesh not in an open hemisphere around p0"
        return [LemmaEntry(nm, float("nan"), float("nan"), False, True, why) for nm in names]
    beta = 1.0 / np.tan(R)
    nm = position_norms(ops, fields, curvature, h, n)
    pairs = {
        "jorge_xavier": (beta, H_inf),
        "reilly": (lam, n * (1.0 + H_2 ** 2)),
        "x_l2_lower_bound": (1.0, h ** 2 * nm.X2sq + (1.0 - beta ** 2) * nm.Xt2sq / n),
        "rayleigh_position": (lam * nm.X2sq, nm.mean_n_minus_Xt2),
        "position_energy_bound": (nm.mean_n_minus_Xt2, n * h ** 2 * nm.X2sq - beta ** 2 * nm.Xt2sq),
        "tangential_l2": (nm.Xt2sq, eps / beta ** 2 * nm.X2sq),
        "x_l2_lower": (n / ((n + 1) * h ** 2), nm.X2sq),
        "x_l2_upper": (nm.X2sq, (1.0 + eps) / h ** 2),
        "x_l2_unit": ((1.0 + eps) / h ** 2, 1.0),
        "y_l2": (nm.Y2sq, 4 * n ** 2 * h ** 2 * eps * (1.0 + 1.0 / beta ** 2)),
        "w_l2": (nm.W2sq, 4 * h * eps * (1.0 + 1.0 / beta ** 2)),
        "psi_l1": (nm.psi1, 5 * np.sqrt(eps) / h ** 1.5 * np.sqrt(1.0 + 1.0 / beta ** 2)),
    }
    needs_small_eps = {"tangential_l2", "x_l2_lower", "x_l2_upper", "x_l2_unit", "y_l2", "w_l2", "psi_l1"}
    out = []
    for name in names:
        lhs, rhs = (float(v) for v in pairs[name])
        if name in needs_small_eps and eps > beta ** 2:
            out.append(LemmaEntry(name, lhs, rhs, False, True, f"eps = {eps:.6g} > beta^2 = {beta ** 2:.6g}"))
        else:
            out.append(LemmaEntry(name, lhs, rhs, verdict(lhs, rhs, tol)))
    return out


def reilly_check(eig, curvature, ops, tol=1e-3):
    """``lambda_1 <= n (1 + ||H||_2^2)`` with slack ``tol * lambda_1``."""
    lam = eig.lambda1 if hasattr(eig, "lambda1") else float(eig)
    rhs = curvature.n * (1.0 + curvature.H_2(ops) ** 2)
    return lam, rhs, bool(lam <= rhs + tol * lam)


# ------------------------------------------------------------ projection map F

@dataclass(frozen=True)
class ProjectedMesh:
    """Images of the vertices under F and per-face / per-edge diagnostics."""

    images: np.ndarray
    jacobian_ok: np.ndarray
    edges: np.ndarray
    edge_source_length: np.ndarray
    edge_image_length: np.ndarray

    @property
    def edge_distortion(self):
        return np.abs(self.edge_image_length - self.edge_source_length)

    @property
    def edge_ratio(self):
        return self.edge_image_length / self.edge_source_length


def project_F(mesh, p0, R0):
    """Radial projection ``x -> exp_p0(R0 Y / |Y|)``, ``Y = exp_p0^{-1}(x)``.

    A face's Jacobian is accepted when its image is a non-degenerate
    geodesic triangle whose orientation, read against the outward normal of
    ``S(p0, R0)``, agrees with the degree of the map.
    """
    p0 = np.asarray(p0, dtype=float)
    dirs, r = radial_directions(mesh, p0)
    bad = np.flatnonzero((r < 1e-12) | (r > np.pi - 1e-12))
    if len(bad):
        raise PreconditionError(f"pinching: vertex {bad[0]} sits at p0 or its antipode; F is undefined there")
    images = exp_map(p0[None, :], R0 * dirs)
    fn, _ = face_normals(images, mesh.faces)
    z = images[mesh.faces[:, 0]]
    outward = np.cos(R0) * z - p0
    sign = np.sign(np.sum(fn * outward, axis=1))
    sign[~np.isfinite(sign)] = 0.0
    img_area = spherical_area(face_side_lengths(ImmersedMesh(images, mesh.faces)))
    degree = np.sign(np.sum(sign * img_area)) or 1.0
    ok = (img_area > 1e-14) & (sign == degree)
    e = mesh.edges
    d1 = great_circle_distance(mesh.vertices[e[:, 0]], mesh.vertices[e[:, 1]])
    d2 = great_circle_distance(images[e[:, 0]], images[e[:, 1]])
    return ProjectedMesh(images, ok, e, d1, d2)


def edge_bracket(mesh, fields, projected, h, slack=0.05):
    """Fraction of edges whose stretch lies in the predicted |dF| bracket.

    The bracket at a point is ``[sqrt(1 - ||grad r||_inf^2), 1] / (h sin r)``;
    for an edge the lower end uses the smaller and the upper end the larger
    of its two endpoint values. Returns ``(fraction, ratio, lower, upper)``.
    """
    s = np.sin(fields.r)
    with np.errstate(divide="ignore", invalid="ignore"):
        grad_r = np.where(s > 0, fields.X_tan_norm / s, 0.0)
    g_inf = min(float(grad_r.max()), 1.0)
    e = projected.edges
    lo_v = np.sqrt(1.0 - g_inf ** 2) / (h * s)
    hi_v = 1.0 / (h * s)
    lower = np.minimum(lo_v[e[:, 0]], lo_v[e[:, 1]])
    upper = np.maximum(hi_v[e[:, 0]], hi_v[e[:, 1]])
    ratio = projected.edge_ratio
    ok = (ratio >= lower * (1 - slack)) & (ratio <= upper * (1 + slack))
    return float(ok.mean()), ratio, lower, upper


# --------------------------------------------------------- distances & shapes

def hausdorff_distance(mesh, p0, R0, sphere_samples=None):
    """Hausdorff distance between the vertex set and ``S(p0, R0)``.

    The mesh-to-sphere direction is exact, ``max |r - R0|``. The other
    direction samples the model sphere quasi-uniformly and takes the distance
    to the nearest vertex; it over-estimates by at most the mesh resolution
    (max edge length), which is returned as ``resolution_bound``.

    Returns
    -------
    d_H, resolution_bound, forward, backward
    """
    p0 = np.asarray(p0, dtype=float)
    nv = mesh.n_vertices
    count = 10 * nv if sphere_samples is None else int(sphere_samples)
    if count < 10 * nv:
        raise PreconditionError(f"pinching: need at least {10 * nv} sphere samples, got {count}")
    r = great_circle_distance(p0[None, :], mesh.vertices)
    forward = float(np.max(np.abs(r - R0)))
    dirs = fibonacci_sphere(count) @ tangent_frame(p0).T
    samples = np.cos(R0) * p0[None, :] + np.sin(R0) * dirs
    chord, _ = cKDTree(mesh.vertices).query(samples)
    backward = float(np.max(2.0 * np.arcsin(np.clip(chord / 2.0, 0.0, 1.0))))
    return max(forward, backward), float(mesh.edge_lengths().max()), forward, backward


def starshaped_check(fields):
    """``min <X, nu>`` over vertices and whether it is positive."""
    m = float(np.min(fields.X_normal))
    return m, bool(m > 0)


def radius_pinching_check(fields, h, R0):
    """``(max | |X| - 1/h |, max |r - R0|)``."""
    return float(np.max(np.abs(fields.X_norm - 1.0 / h))), float(np.max(np.abs(fields.r - R0)))


def chi_infinity(fields):
    """``||X^T||_inf``."""
    return float(np.max(fields.X_tan_norm))


# -------------------------------------------------------------------- report

@dataclass
class PinchingReport:
    lambda1: float
    H_inf: float
    H_2: float
    B_q: float
    q: float
    h: float
    beta: float
    eps: float
    eps_raw: float
    eps_clamped: bool
    R_enclosing: float
    R0: float
    A: float
    area: float
    reilly_rhs: float
    reilly_pass: bool
    hausdorff: Optional[float]
    hausdorff_forward: Optional[float]
    hausdorff_backward: Optional[float]
    resolution_bound: float
    max_edge_distortion: Optional[float]
    jacobian_ok_all: Optional[bool]
    edge_bracket_fraction: Optional[float]
    min_X_normal: float
    starshaped: bool
    max_X_dev: float
    max_r_dev: float
    chi_inf: float
    psi_inf: float
    X_inf_over_X_2: float
    psi_inf_h32: float
    heintze_max_residual: float
    weak_divergence_max_relative: float
    weak_divergence_global_relative: float
    p0: List[float]
    moment_residual: float
    flat_flag: bool
    gravity_iterations: int
    eig_residual: float
    eig_iterations: int
    curvature_source: str
    n_vertices: int
    n_faces: int
    genus: int
    theorem_applicable: bool
    diffeomorphic_to_sphere: bool
    lemma_entries: List[LemmaEntry] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)
    timestamp: str = ""

    def to_dict(self):
        d = asdict(self)
        d["lemma_entries"] = [e.to_dict() for e in self.lemma_entries]
        return _jsonable(d)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


@dataclass
class Analysis:
    """Everything computed by :func:`analyze`, for callers that need the fields."""

    report: PinchingReport
    ops: object
    eig: object
    curvature: object
    gravity: object
    fields: object
    projected: Optional[ProjectedMesh]


def analyze(mesh, q=4.0, tol=DEFAULT_TOL, mass="lumped", seed=0, sphere_samples=None,
            curvature_kind="auto", init=None, reilly_tol=1e-3):
    """Run the whole pipeline on ``mesh`` and return an :class:`Analysis`."""
    n = mesh.n
    if not q > n:
        raise PreconditionError(f"pinching: q must exceed n = {n}, got {q}")
    mesh.validate()
    notes = []
    ops = assemble(mesh, mass)
    eig = first_nonzero_eigenvalue(ops, seed=seed)
    cf = curv.curvature_for(mesh, curvature_kind)
    start = barycenter.default_init(ops, mesh, seed) if init is None else np.asarray(init, dtype=float)
    grav = barycenter.center_of_gravity(ops, mesh, start)
    p0 = grav.p0
    fields = position_fields(mesh, p0, cf)
    if np.any(fields.degenerate):
        notes.append(f"{int(fields.degenerate.sum())} vertices at p0 or its antipode")

    H_inf, H_2, B_q = cf.H_inf(), cf.H_2(ops), cf.B_q(ops, q)
    h = float(np.sqrt(1.0 + H_inf ** 2))
    eps_raw = n * h ** 2 - eig.lambda1
    eps = max(eps_raw, 0.0)
    if eps_raw < 0:
        notes.append(f"eps = {eps_raw:.3e} < 0 clamped to 0 (discrete lambda_1 overshoot)")
    R_enc = float(fields.r.max())
    beta = float(1.0 / np.tan(R_enc))
    R0 = float(np.arcsin(1.0 / h))
    entries = inequality_chain(mesh, ops, fields, cf, eig, p0, tol, R_enc)
    lam, reilly_rhs, reilly_ok = reilly_check(eig, cf, ops, reilly_tol)

    try:
        proj = project_F(mesh, p0, R0)
        distortion = float(proj.edge_distortion.max())
        jac_all = bool(proj.jacobian_ok.all())
        frac_edges = edge_bracket(mesh, fields, proj, h, tol)[0]
    except PreconditionError as exc:
        proj, distortion, jac_all, frac_edges = None, None, None, None
        notes.append(str(exc))
    d_H, res_bound, fwd, bwd = hausdorff_distance(mesh, p0, R0, sphere_samples)
    min_xn, star = starshaped_check(fields)
    x_dev, r_dev = radius_pinching_check(fields, h, R0)
    nm = position_norms(ops, fields, cf, h, n)
    heintze = heintze_identity_check(mesh, fields, ops)
    weak = weak_divergence_check(mesh, ops, fields, cf)

    genus = int(mesh.genus())
    applicable = bool(R_enc < np.pi / 2 and eps <= beta ** 2)
    diffeo = bool(applicable and genus == 0 and jac_all and star)
    if not applicable:
        notes.append("pinching hypotheses fail (need R_enclosing < pi/2 and eps <= beta^2); no topological conclusion drawn")

    report = PinchingReport(
        lambda1=eig.lambda1, H_inf=H_inf, H_2=H_2, B_q=B_q, q=float(q), h=h, beta=beta,
        eps=eps, eps_raw=eps_raw, eps_clamped=bool(eps_raw < 0), R_enclosing=R_enc, R0=R0,
        A=float(ops.total_area ** (1.0 / n) * (1.0 + B_q)), area=ops.total_area,
        reilly_rhs=reilly_rhs, reilly_pass=reilly_ok,
        hausdorff=d_H, hausdorff_forward=fwd, hausdorff_backward=bwd, resolution_bound=res_bound,
        max_edge_distortion=distortion, jacobian_ok_all=jac_all, edge_bracket_fraction=frac_edges,
        min_X_normal=min_xn, starshaped=star, max_X_dev=x_dev, max_r_dev=r_dev,
        chi_inf=chi_infinity(fields), psi_inf=nm.psi_inf,
        X_inf_over_X_2=nm.X_inf / np.sqrt(nm.X2sq), psi_inf_h32=nm.psi_inf * h ** 1.5,
        heintze_max_residual=float(heintze.max()),
        weak_divergence_max_relative=float(weak.relative.max()),
        weak_divergence_global_relative=weak.global_relative,
        p0=[float(t) for t in p0], moment_residual=grav.moment_residual, flat_flag=grav.flat_flag,
        gravity_iterations=grav.iterations, eig_residual=eig.residual, eig_iterations=eig.iterations,
        curvature_source=cf.source, n_vertices=mesh.n_vertices, n_faces=mesh.n_faces, genus=genus,
        theorem_applicable=applicable, diffeomorphic_to_sphere=diffeo,
        lemma_entries=entries, notes=notes,
        timestamp=datetime.datetime.now(datetime.timezone.utc).isoformat(),
    )
    return Analysis(report, ops, eig, cf, grav, fields, proj)
