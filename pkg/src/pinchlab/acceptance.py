"""End-to-end acceptance checks.

Each check builds its meshes, runs the relevant part of the pipeline and
returns a :class:`CheckResult`. Discretization tolerances are multiplied
by ``tol_scale``; exact-arithmetic tolerances (1e-8, 1e-10, 1e-12) are not.
``run_all`` drives them for ``pinchlab verify`` and the test suite.
"""

import time
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import barycenter
from .curvature import analytic_curvature
from .mesh import (make_clifford_torus, make_geodesic_sphere, make_perturbed_sphere, north_pole,
                   position_fields, read_s4off)
from .operators import assemble, lp_norm
from .pinching import DEFAULT_TOL, analyze, heintze_identity_check, weak_divergence_check
from .report import sweep
from .sphere import great_circle_distance, random_points
from .spectral import first_nonzero_eigenvalue

QUARTER = np.pi / 4
TORUS_RES = {3: 24, 4: 48, 5: 96}
SWEEP_DELTAS = (0.1, 0.05, 0.025, 0.0125)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self):
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name:<22s} {self.detail}  ({self.seconds:.1f}s)"


@lru_cache(maxsize=None)
def _sphere(refine, center=None):
    c = north_pole() if center is None else np.array(center)
    return make_geodesic_sphere(c, QUARTER, refine)


@lru_cache(maxsize=None)
def _torus(res):
    return make_clifford_torus(1, 1, res, res)


@lru_cache(maxsize=None)
def _perturbed(delta, refine=5):
    return make_perturbed_sphere(north_pole(), QUARTER, delta, 2, refine)


@lru_cache(maxsize=None)
def _analysis(kind, param, tol):
    mesh = {"sphere": _sphere, "torus": _torus, "perturbed": _perturbed}[kind](param)
    return analyze(mesh, tol=tol)


@lru_cache(maxsize=None)
def _sweep(tol):
    return sweep(SWEEP_DELTAS, R=QUARTER, mode=2, refine=5, tol=tol)


def _timed_eig(mesh):
    t = time.perf_counter()
    lam = first_nonzero_eigenvalue(assemble(mesh)).lambda1
    return lam, time.perf_counter() - t


def sphere_spectrum(s=1.0):
    lam, sec = _timed_eig(_sphere(5))
    rel = abs(lam - 4.0) / 4.0
    return rel <= 0.01 * s and sec <= 60, f"lambda1={lam:.6f} rel.err={rel:.2e} time={sec:.1f}s"


def torus_spectrum(s=1.0):
    lam, sec = _timed_eig(_torus(96))
    rel = abs(lam - 2.0) / 2.0
    return rel <= 0.02 * s and sec <= 120, f"lambda1={lam:.6f} rel.err={rel:.2e} time={sec:.1f}s"


def reilly_equality(s=1.0):
    out = []
    ok = True
    for label, rep in (("sphere", _analysis("sphere", 5, DEFAULT_TOL * s).report),
                       ("torus", _analysis("torus", 96, DEFAULT_TOL * s).report)):
        gap = abs(rep.lambda1 - rep.reilly_rhs) / rep.lambda1
        ok &= gap <= 0.02 * s
        out.append(f"{label} |gap|/lambda1={gap:.2e}")
    rep = _analysis("perturbed", 0.1, DEFAULT_TOL * s).report
    gap = rep.reilly_rhs - rep.lambda1
    ok &= gap >= 0.01
    out.append(f"perturbed(0.1) gap={gap:.4f}")
    return ok, "; ".join(out)


def _heintze_max(mesh, kind):
    ops = assemble(mesh)
    cf = analytic_curvature(mesh)
    init = barycenter.default_init(ops, mesh, seed=0)
    p0 = barycenter.center_of_gravity(ops, mesh, init).p0
    return float(heintze_identity_check(mesh, position_fields(mesh, p0, cf), ops).max())


def heintze_identity(s=1.0):
    ok = True
    out = []
    for label, build in (("sphere", _sphere), ("torus", lambda k: _torus(TORUS_RES[k]))):
        res = [_heintze_max(build(k), label) for k in (3, 4, 5)]
        ok &= res[-1] <= 0.05 * s and res[0] > res[1] > res[2]
        out.append(f"{label} " + ",".join(f"{v:.2e}" for v in res))
    return ok, "; ".join(out)


def weak_divergence(s=1.0):
    mesh = _perturbed(0.05)
    a = _analysis("perturbed", 0.05, DEFAULT_TOL * s)
    wd = weak_divergence_check(mesh, a.ops, a.fields, a.curvature)
    worst = float(wd.relative.max())
    return len(wd.relative) == 32 and worst <= 0.02 * s, f"32 tests, max relative={worst:.2e}"


def gravity_constancy(s=1.0):
    mesh = _torus(96)
    ops = assemble(mesh)
    probes = random_points(np.random.default_rng(7), 50)
    e = np.array([barycenter.gravity_energy(ops, mesh, p) for p in probes])
    spread = (e.max() - e.min()) / e.mean()
    off = abs(e.mean() - 2 * np.pi ** 2) / (2 * np.pi ** 2)
    return spread <= 0.005 * s and off <= 0.005 * s, f"spread={spread:.2e} mean vs 2pi^2={off:.2e}"


def center_recovery(s=1.0):
    rng = np.random.default_rng(11)
    c = random_points(rng, 1)[0]
    mesh = _sphere(4, tuple(c))
    ops = assemble(mesh)
    worst_d = worst_m = 0.0
    for init in random_points(rng, 10):
        g = barycenter.center_of_gravity(ops, mesh, init, tol=1e-10)
        worst_d = max(worst_d, float(great_circle_distance(g.p0, c)))
        worst_m = max(worst_m, g.moment_residual)
    ok = worst_d <= 1e-8 and worst_m <= 1e-10 * ops.total_area
    return ok, f"max dist={worst_d:.2e} max moment={worst_m:.2e}"


def equality_pinching(s=1.0):
    rep = _analysis("sphere", 5, DEFAULT_TOL * s).report
    applicable = [e for e in rep.lemma_entries if not e.not_applicable]
    checks = {
        "eps": rep.eps <= 0.05 * s,
        "psi_inf": rep.psi_inf <= 0.02 * s,
        "chi_inf": rep.chi_inf <= 0.02 * s,
        "hausdorff": rep.hausdorff <= rep.resolution_bound,
        "lemmas": bool(applicable) and all(e.passed for e in applicable),
        "starshaped": rep.starshaped,
        "distortion": rep.max_edge_distortion <= 1e-10,
    }
    bad = [k for k, v in checks.items() if not v]
    return not bad, (f"eps={rep.eps:.2e} psi_inf={rep.psi_inf:.1e} chi_inf={rep.chi_inf:.1e} "
                     f"d_H={rep.hausdorff:.3e}<=edge {rep.resolution_bound:.3e} distortion={rep.max_edge_distortion:.1e}"
                     + (f" failing={bad}" if bad else ""))


def edge_bracket(s=1.0):
    from .pinching import edge_bracket as bracket

    a = _analysis("perturbed", 0.05, DEFAULT_TOL * s)
    frac, *_ = bracket(_perturbed(0.05), a.fields, a.projected, a.report.h, slack=0.05 * s)
    return frac == 1.0, f"edges inside bracket: {100 * frac:.2f}%"


def scaling_trend(s=1.0):
    rows, summary = _sweep(DEFAULT_TOL * s)
    eps = [r["eps"] for r in rows]
    dh = [r["d_hausdorff"] for r in rows]
    dec = all(a > b for a, b in zip(eps, eps[1:])) and all(a > b for a, b in zip(dh, dh[1:]))
    slope = summary["slope_log_dH_vs_log_eps"]
    ok = dec and np.isfinite(slope) and slope > 0
    return ok, "eps=" + ",".join(f"{v:.3g}" for v in eps) + " d_H=" + ",".join(f"{v:.3g}" for v in dh) + f" slope={slope:.3f}"


def optimality_torus(s=1.0):
    rep = _analysis("torus", 96, DEFAULT_TOL * s).report
    checks = {
        "radius_near_pi/2": abs(rep.R_enclosing - np.pi / 2) <= 0.05,
        "flat_center": rep.flat_flag,
        "genus_1": rep.genus == 1,
        "chain_not_applicable": all(e.not_applicable for e in rep.lemma_entries),
        "no_sphere_verdict": not rep.diffeomorphic_to_sphere,
    }
    bad = [k for k, v in checks.items() if not v]
    return not bad, (f"R_enclosing={rep.R_enclosing:.4f} (pi/2={np.pi / 2:.4f}) beta={rep.beta:.3f} "
                     f"genus={rep.genus} flat={rep.flat_flag}" + (f" failing={bad}" if bad else ""))


def norm_monotonicity(s=1.0):
    rng = np.random.default_rng(3)
    meshes = [_sphere(3), _torus(24), _perturbed(0.05, 3)]
    ps = [1.0, 1.5, 2.0, 3.0, 4.0, 8.0, 16.0, 64.0, np.inf]
    violations = 0
    for mesh in meshes:
        ops = assemble(mesh)
        for _ in range(200):
            f = rng.standard_normal(mesh.n_vertices) * rng.uniform(0.1, 10)
            norms = [lp_norm(ops, f, p) for p in ps]
            violations += sum(a > b + 1e-12 * max(abs(b), 1.0) for a, b in zip(norms, norms[1:]))
    return violations == 0, f"{violations} violations over 600 fields x {len(ps) - 1} exponent pairs"


CHECKS = {
    "sphere_spectrum": sphere_spectrum,
    "torus_spectrum": torus_spectrum,
    "reilly_equality": reilly_equality,
    "heintze_identity": heintze_identity,
    "weak_divergence": weak_divergence,
    "gravity_constancy": gravity_constancy,
    "center_recovery": center_recovery,
    "equality_pinching": equality_pinching,
    "edge_bracket": edge_bracket,
    "scaling_trend": scaling_trend,
    "optimality_torus": optimality_torus,
    "norm_monotonicity": norm_monotonicity,
}


def run_check(name, tol_scale=1.0):
    t = time.perf_counter()
    try:
        ok, detail = CHECKS[name](tol_scale)
    except Exception as exc:  # a crash is a failed check, reported by name
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return CheckResult(name, bool(ok), detail, time.perf_counter() - t)


def check_mesh_file(path):
    t = time.perf_counter()
    try:
        mesh = read_s4off(path)
        detail = f"{mesh.n_vertices} vertices, {mesh.n_faces} faces, genus {mesh.genus()}"
        ok = True
    except Exception as exc:
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return CheckResult(f"mesh_file[{path}]", ok, detail, time.perf_counter() - t)


def run_all(tol_scale=1.0, only=None, mesh_files=()):
    names = list(CHECKS) if not only else list(only)
    results = [check_mesh_file(p) for p in mesh_files]
    results += [run_check(n, tol_scale) for n in names]
    return results
