"""Pure numpy implementations of the hot kernels.

Signatures mirror the compiled ``_ckernels`` module exactly.
"""

import numpy as np


def _row_ids(indptr):
    return np.repeat(np.arange(len(indptr) - 1), np.diff(indptr))


def csr_matvec(indptr, indices, data, x):
    n = len(indptr) - 1
    return np.bincount(_row_ids(indptr), weights=data * x[indices], minlength=n)


def cg(indptr, indices, data, b, tol, maxit):
    """Unpreconditioned CG from a zero start.

    Returns ``(x, residuals, breakdown)`` where ``residuals`` holds the
    relative residual before the first step and after every step, and
    ``breakdown`` is the 1-based iteration at which a non-positive
    curvature ``p.Ap`` was met (0 if none).
    """
    n = len(indptr) - 1
    rows = _row_ids(indptr)
    x = np.zeros(n)
    r = np.array(b, dtype=float, copy=True)
    bnorm = np.sqrt(r @ r)
    if bnorm == 0.0:
        return x, np.zeros(1), 0
    p = r.copy()
    rr = r @ r
    hist = [1.0]
    for k in range(1, maxit + 1):
        if hist[-1] <= tol:
            break
        ap = np.bincount(rows, weights=data * p[indices], minlength=n)
        pap = p @ ap
        if not pap > 0.0:
            return x, np.asarray(hist), k
        alpha = rr / pap
        x += alpha * p
        r -= alpha * ap
        rr_new = r @ r
        hist.append(np.sqrt(rr_new) / bnorm)
        p *= rr_new / rr
        p += r
        rr = rr_new
    return x, np.asarray(hist), 0


def _offnorm(a):
    off = a - np.diag(np.diag(a))
    return np.sqrt(np.sum(off * off))


def jacobi_eigenvalues(a, tol, max_sweeps):
    """Cyclic Jacobi rotations on a dense symmetric copy.

    Returns ``(eigenvalues, sweeps, offnorm)``; eigenvalues unsorted.
    """
    a = np.array(a, dtype=float, copy=True)
    n = a.shape[0]
    target = tol * np.sqrt(np.sum(a * a))
    sweeps = 0
    off = _offnorm(a)
    while off > target and sweeps < max_sweeps:
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.copysign(1.0, theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap = a[p, :].copy()
                aq = a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                a[p, q] = a[q, p] = 0.0
        sweeps += 1
        off = _offnorm(a)
    return np.diag(a).copy(), sweeps, off
