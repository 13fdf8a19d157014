"""First nonzero eigenvalue of the pencil (stiffness, mass)."""

from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh, splu

from .errors import DomainError, EigenSolveError, PreconditionError


@dataclass(frozen=True)
class EigenResult:
    lambda1: float
    eigenvector: np.ndarray
    residual: float
    iterations: int


def _constant_projector(ops):
    m1 = ops.mass @ np.ones(ops.n_vertices)
    c2 = float(m1.sum())

    def project(x):
        # M-orthogonal projection onto the complement of constants
        return x - (m1 @ x) / c2

    return project


def _check_mass(ops):
    d = ops.mass.diagonal()
    if np.any(d <= 0) or abs(ops.mass - ops.mass.T).max() > 1e-14 * d.max():
        raise PreconditionError("spectral: mass matrix is not symmetric positive definite")


def first_nonzero_eigenvalue(ops, tol=1e-9, max_iter=None, seed=0, block=4):
    """Smallest nonzero eigenvalue of ``S phi = lambda M phi``.

    Shift-invert Lanczos (ARPACK) below the spectrum. The constant mode is
    removed M-orthogonally from the start vector and from every application
    of the inverse operator, so it never enters the Krylov space; ``block``
    Ritz pairs are requested to cope with multiplicity.

    Raises
    ------
    EigenSolveError
        If ARPACK does not converge or the final relative residual
        ``|S phi - lambda M phi| / |M phi|`` exceeds ``tol``.
    """
    _check_mass(ops)
    S, M = ops.stiffness, ops.mass
    nv = ops.n_vertices
    project = _constant_projector(ops)
    # Hersch: lambda_1 <= 8 pi / |M| on spheres; the shift sits that far below 0
    sigma = -8.0 * np.pi / ops.total_area
    lu = splu((S - sigma * M).tocsc())
    opinv = LinearOperator((nv, nv), matvec=lambda x: project(lu.solve(np.asarray(x, dtype=float).ravel())), dtype=float)
    rng = np.random.default_rng(seed)
    v0 = project(rng.standard_normal(nv))
    k = min(block, nv - 2)
    counter = {"n": 0}

    def counted(x):
        counter["n"] += 1
        return opinv.matvec(x)

    op = LinearOperator((nv, nv), matvec=counted, dtype=float)
    try:
        vals, vecs = eigsh(S, k=k, M=M, sigma=sigma, which="LM", OPinv=op, v0=v0, maxiter=max_iter, tol=0)
    except ArpackNoConvergence as exc:
        best = float(np.min(exc.eigenvalues)) if len(exc.eigenvalues) else None
        raise EigenSolveError(f"spectral: no convergence after {counter['n']} solves", best_ritz=best) from None

    order = np.argsort(vals)
    lam = float(vals[order[0]])
    phi = vecs[:, order[0]]
    phi = project(phi)
    phi /= np.sqrt(phi @ (M @ phi))
    # normalize the sign for reproducible output
    if phi[np.argmax(np.abs(phi))] < 0:
        phi = -phi
    Mphi = M @ phi
    residual = float(np.linalg.norm(S @ phi - lam * Mphi) / np.linalg.norm(Mphi))
    if not lam > 0:
        raise EigenSolveError(f"spectral: non-positive Ritz value {lam!r}", best_ritz=lam, residual=residual)
    if residual > tol:
        raise EigenSolveError(f"spectral: residual {residual:.3e} above tolerance {tol:.1e}", best_ritz=lam, residual=residual)
    return EigenResult(lam, phi, residual, counter["n"])


def rayleigh_quotient(ops, f):
    """``(f.T S f) / (g.T M g)`` with g = f minus its mass-weighted mean."""
    f = np.asarray(f, dtype=float)
    g = _constant_projector(ops)(f)
    denom = float(g @ (ops.mass @ g))
    scale = float(f @ (ops.mass @ f))
    if denom <= 1e-24 * max(scale, 1e-300):
        raise DomainError("spectral: Rayleigh quotient of a constant field")
    return float(f @ (ops.stiffness @ f)) / denom
