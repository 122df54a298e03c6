"""CG with residual history, extreme eigenvalue estimators, dense oracle."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from . import _kernels


class SolverError(RuntimeError):
    """Iterative method failed; ``estimate`` holds the best value so far."""

    def __init__(self, msg, estimate=None, iteration=None):
        super().__init__(msg)
        self.estimate = estimate
        self.iteration = iteration


@dataclass(frozen=True)
class SolveReport:
    solution: np.ndarray
    residuals: np.ndarray  # relative residual at start and after each step
    iterations: int
    converged: bool


@dataclass(frozen=True)
class SpectrumReport:
    lambda_min: float
    lambda_max: float
    cond: float
    method: str


def _csr(system_or_matrix):
    a = getattr(system_or_matrix, "matrix", system_or_matrix)
    a = a.tocsr() if hasattr(a, "tocsr") else a
    return a.indptr, a.indices, a.data, a.shape[0]


def _cg(a, b, tol, maxit):
    ip, ix, data, n = a
    x, hist, breakdown = _kernels.cg(ip, ix, data, np.asarray(b, dtype=float), float(tol), int(maxit))
    if breakdown:
        raise SolverError(f"non-positive curvature p.Ap at CG iteration {breakdown}",
                          estimate=x, iteration=breakdown)
    return x, hist


def cg_solve(system, tol: float = 1e-8, maxit: int | None = None, rhs=None) -> SolveReport:
    """Unpreconditioned CG from the zero vector.

    Stops once ``||b - A x_k|| / ||b|| <= tol`` (recursive residual) or after
    ``maxit`` steps (default ``10 * dof``).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = _csr(system)
    b = system.rhs if rhs is None else rhs
    maxit = 10 * a[3] if maxit is None else maxit
    x, hist = _cg(a, b, tol, maxit)
    return SolveReport(x, hist, len(hist) - 1, bool(hist[-1] <= tol))


def lcg_vector(n: int, seed: int = 12345) -> np.ndarray:
    """Deterministic start vector in (0.5, 1.5) from a 32-bit LCG."""
    out = np.empty(n)
    s = seed & 0xFFFFFFFF
    for i in range(n):
        s = (1664525 * s + 1013904223) & 0xFFFFFFFF
        out[i] = 0.5 + s / 2.0**32
    return out


_WINDOW = 20


def _ritz_iteration(apply, matvec, n, block, tol, maxit, largest, what):
    """Block power iteration on ``apply`` with Rayleigh-Ritz on ``matvec``.

    ``block=1`` is the plain power method and its Rayleigh quotient. A
    block resolves clustered extreme eigenvalues, which the symmetric
    quadrant layouts produce.
    """
    p = max(1, min(block, n))
    x = lcg_vector(n * p).reshape(p, n).T
    x, _ = np.linalg.qr(x)
    lam = None
    steps = deque(maxlen=_WINDOW + 1)
    for it in range(1, maxit + 1):
        y = np.column_stack([apply(x[:, j]) for j in range(p)])
        x, _ = np.linalg.qr(y)
        ax = np.column_stack([matvec(x[:, j]) for j in range(p)])
        h = x.T @ ax
        theta, vecs = np.linalg.eigh(0.5 * (h + h.T))
        k = p - 1 if largest else 0
        new = float(theta[k])
        x = x @ vecs
        if lam is None:
            lam = new
            continue
        step = abs(new - lam)
        lam = new
        steps.append(step)
        if step == 0.0:
            return new, it
        # gate on a small step so the window sees the slowest mode, then
        # bound the rest by the geometric tail step*q/(1-q)
        if len(steps) <= _WINDOW or step > 1e-2 * tol * abs(new) or steps[0] == 0.0:
            continue
        q = (step / steps[0]) ** (1.0 / _WINDOW)
        if q < 1.0 and step * q / (1.0 - q) <= tol * abs(new):
            return new, it
    raise SolverError(f"{what}: no convergence in {maxit} iterations", estimate=lam, iteration=maxit)


def largest_eigenvalue(system, tol: float = 1e-8, maxit: int = 100_000, block: int = 4) -> float:
    """Power iteration from a seeded start block; Ritz value change <= tol."""
    ip, ix, data, n = _csr(system)

    def matvec(v):
        return _kernels.csr_matvec(ip, ix, data, v)

    return _ritz_iteration(matvec, matvec, n, block, tol, maxit, True, "power iteration")[0]


def smallest_eigenvalue(system, tol: float = 1e-8, maxit: int = 10_000,
                        inner_tol: float = 1e-12, block: int = 4) -> float:
    """Inverse iteration; every solve with A is CG to ``inner_tol``."""
    a = _csr(system)
    ip, ix, data, n = a

    def matvec(v):
        return _kernels.csr_matvec(ip, ix, data, v)

    def solve(v):
        x, hist = _cg(a, v, inner_tol, 20 * n)
        if hist[-1] > inner_tol:
            raise SolverError(f"inner CG stalled at relative residual {hist[-1]:.3e}")
        return x

    return _ritz_iteration(solve, matvec, n, block, tol, maxit, False, "inverse iteration")[0]


def condition_number(system, tol: float = 1e-8) -> SpectrumReport:
    lmax = largest_eigenvalue(system, tol)
    lmin = smallest_eigenvalue(system, tol)
    return SpectrumReport(lmin, lmax, lmax / lmin, "power+inverse")


DENSE_LIMIT = 400


def dense_spectrum(system, tol: float = 1e-14, max_sweeps: int = 50) -> np.ndarray:
    """All eigenvalues, ascending, by cyclic Jacobi rotations (dof <= 400)."""
    a = getattr(system, "matrix", system)
    a = a.toarray() if hasattr(a, "toarray") else np.asarray(a, dtype=float)
    if a.shape[0] > DENSE_LIMIT:
        raise ValueError(f"dense oracle refuses dof={a.shape[0]} > {DENSE_LIMIT}")
    lam, sweeps, off = _kernels.jacobi_eigenvalues(a, tol, max_sweeps)
    if off > 1e-12 * np.linalg.norm(a):
        raise SolverError(f"Jacobi stalled after {sweeps} sweeps, off-norm {off:.3e}")
    return np.sort(lam)


def dense_condition(system) -> SpectrumReport:
    lam = dense_spectrum(system)
    return SpectrumReport(float(lam[0]), float(lam[-1]), float(lam[-1] / lam[0]), "dense")
