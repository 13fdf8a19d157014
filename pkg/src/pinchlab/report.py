"""Report serialization and perturbation sweeps."""

import csv
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .errors import DomainError
from .mesh import make_perturbed_sphere, north_pole
from .pinching import DEFAULT_TOL, analyze

SWEEP_COLUMNS = ["delta", "eps", "lambda1", "h", "beta", "d_hausdorff", "max_r_dev", "chi_inf",
                 "min_X_normal", "max_edge_distortion"]


def report_json(report, indent=2):
    return json.dumps(report.to_dict(), indent=indent, sort_keys=False)


def thread_cap():
    """Worker count from ``PINCHLAB_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("PINCHLAB_THREADS", "1")))
    except ValueError:
        return 1


def _sweep_row(args):
    delta, R, mode, refine, center, q, tol, mass, seed = args
    mesh = make_perturbed_sphere(center, R, delta, mode, refine)
    rep = analyze(mesh, q=q, tol=tol, mass=mass, seed=seed).report
    return {
        "delta": delta, "eps": rep.eps, "lambda1": rep.lambda1, "h": rep.h, "beta": rep.beta,
        "d_hausdorff": rep.hausdorff, "max_r_dev": rep.max_r_dev, "chi_inf": rep.chi_inf,
        "min_X_normal": rep.min_X_normal, "max_edge_distortion": rep.max_edge_distortion,
    }


def loglog_slope(x, y):
    x, y = np.asarray(x, float), np.asarray(y, float)
    keep = (x > 0) & (y > 0)
    if keep.sum() < 2:
        return float("nan")
    return float(np.polyfit(np.log(x[keep]), np.log(y[keep]), 1)[0])


def sweep(deltas, R=np.pi / 4, mode=2, refine=5, center=None, q=4.0, tol=DEFAULT_TOL, mass="lumped", seed=0,
          workers=None):
    """Analyze ``make_perturbed_sphere`` for each delta.

    Rows come back sorted by decreasing delta. The pinching floor is the
    eps of the unperturbed sphere at the same resolution; slopes of
    ``log d_H`` and ``log distortion`` against ``log eps`` are fitted over
    rows strictly above it and are NaN when fewer than 3 such rows exist.

    Returns
    -------
    rows : list of dict
    summary : dict
    """
    if len(deltas) == 0:
        raise DomainError("report: sweep needs at least one delta")
    center = north_pole() if center is None else np.asarray(center, float)
    wanted = {float(d) for d in deltas}
    every = sorted(wanted | {0.0}, reverse=True)
    jobs = [(d, R, mode, refine, center, q, tol, mass, seed) for d in every]
    workers = thread_cap() if workers is None else workers
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_row, jobs))
    else:
        rows = [_sweep_row(j) for j in jobs]
    floor = rows[-1]["eps"]
    rows = [r for r in rows if r["delta"] in wanted]
    return rows, _summary(rows, floor, q)


def _summary(rows, floor, q, n=2):
    above = [r for r in rows if r["eps"] > floor]
    if len(above) >= 3:
        eps = [r["eps"] for r in above]
        s_dh = loglog_slope(eps, [r["d_hausdorff"] for r in above])
        s_dist = loglog_slope(eps, [r["max_edge_distortion"] for r in above])
    else:
        s_dh = s_dist = float("nan")
    return {
        "eps_floor": floor,
        "rows_above_floor": len(above),
        "slope_log_dH_vs_log_eps": s_dh,
        "slope_log_distortion_vs_log_eps": s_dist,
        "exponent_hausdorff": 1.0 / (2 * (2 * n + 1)),
        "exponent_distortion_q": (q - n) / (q - n + q * n),
    }


def sweep_csv(rows, summary):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for r in rows:
        w.writerow([repr(float(r[c])) if r[c] is not None else "" for c in SWEEP_COLUMNS])
    for key in ("slope_log_dH_vs_log_eps", "slope_log_distortion_vs_log_eps", "eps_floor",
                "exponent_hausdorff", "exponent_distortion_q"):
        buf.write(f"# {key},{summary[key]!r}\n")
    return buf.getvalue()
