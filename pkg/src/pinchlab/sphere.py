"""Elementary geometry of the unit sphere S^{n+1} inside R^{n+2}.

All functions broadcast over leading axes; the last axis is the ambient
coordinate axis.
"""

import numpy as np

# below this radius sin(r)/r and r/sin(r) are evaluated by Taylor series
SMALL_ANGLE = 1e-6


def great_circle_distance(a, b):
    """Intrinsic distance ``arccos<a, b>`` between unit vectors.

    Evaluated through the chord, ``2 arcsin(|a - b| / 2)``, for short arcs
    and through the antipodal chord for long ones, which keeps full relative
    accuracy at both ends of ``[0, pi]``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    near = np.linalg.norm(a - b, axis=-1)
    far = np.linalg.norm(a + b, axis=-1)
    d_near = 2.0 * np.arcsin(np.clip(near / 2.0, 0.0, 1.0))
    d_far = np.pi - 2.0 * np.arcsin(np.clip(far / 2.0, 0.0, 1.0))
    return np.where(near <= far, d_near, d_far)


def sinc(r):
    """``sin(r) / r`` with the removable singularity at 0 filled in."""
    r = np.asarray(r, dtype=float)
    r2 = r * r
    series = 1.0 - r2 / 6.0 + r2 * r2 / 120.0 - r2 * r2 * r2 / 5040.0
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = np.sin(r) / r
    return np.where(np.abs(r) < SMALL_ANGLE, series, direct)


def inverse_sinc(r):
    """``r / sin(r)``; series near 0, undefined (inf) at ``r = pi``."""
    r = np.asarray(r, dtype=float)
    r2 = r * r
    series = 1.0 + r2 / 6.0 + 7.0 * r2 * r2 / 360.0 + 31.0 * r2 * r2 * r2 / 15120.0
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = r / np.sin(r)
    return np.where(np.abs(r) < SMALL_ANGLE, series, direct)


def log_map(p, x):
    """Riemannian logarithm ``exp_p^{-1}(x)`` as an ambient vector tangent at p.

    Returns ``(v, r)`` with ``|v| = r = d(p, x)``.
    """
    p = np.asarray(p, dtype=float)
    x = np.asarray(x, dtype=float)
    c = np.sum(x * p, axis=-1, keepdims=True)
    w = x - c * p
    r = great_circle_distance(p, x)
    return inverse_sinc(r)[..., None] * w, r


def exp_map(p, v):
    """Riemannian exponential ``exp_p(v)`` for v tangent at p."""
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    t = np.linalg.norm(v, axis=-1, keepdims=True)
    out = np.cos(t) * p + sinc(t) * v
    return out / np.linalg.norm(out, axis=-1, keepdims=True)


def tangent_frame(p):
    """Orthonormal basis of the tangent space ``p^perp`` as columns of a matrix.

    The frame is odd in p, ``tangent_frame(-p) == -tangent_frame(p)``
    bit for bit, so constructions built from it commute with the antipodal
    map.
    """
    p = np.asarray(p, dtype=float)
    k = int(np.argmax(np.abs(p)))
    s = 1.0 if p[k] > 0 else -1.0
    q = s * p
    # Householder reflection sending e_k to q; its other columns span q^perp
    e = np.zeros_like(q)
    e[k] = 1.0
    w = q - e
    nw = np.linalg.norm(w)
    if nw < 1e-15:
        refl = np.eye(len(q))
    else:
        w = w / nw
        refl = np.eye(len(q)) - 2.0 * np.outer(w, w)
    cols = [j for j in range(len(q)) if j != k]
    return s * refl[:, cols]


def fibonacci_sphere(count):
    """Quasi-uniform unit vectors on S^2 (golden-angle spiral)."""
    i = np.arange(count, dtype=float) + 0.5
    z = 1.0 - 2.0 * i / count
    rho = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    phi = np.pi * (3.0 - np.sqrt(5.0)) * i
    return np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])


def random_points(rng, count, dim=4):
    """Uniform random points on the unit sphere in R^dim."""
    g = rng.standard_normal((count, dim))
    return g / np.linalg.norm(g, axis=1, keepdims=True)
