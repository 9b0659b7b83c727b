"""Dense SPD linear algebra: Gram assembly and jitter-stabilised Cholesky solves."""

import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import scipy.linalg

from .exceptions import InputError, SingularMatrixError
from .kernels import as_points, cross

log = logging.getLogger(__name__)

JITTER_LEVELS = (0.0, 1e-12, 1e-11, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6)


def gram(kernel, X, workers=1, blocks=None):
    """Gram matrix ``G[i, j] = K(x_i, x_j)``.

    Rows are assembled in ``blocks`` contiguous blocks (default: one per
    worker). Entries do not depend on the blocking, so the result is
    bit-identical for any ``workers``/``blocks``.
    """
    X = as_points(X, kernel)
    n = X.shape[0]
    if n < 1:
        raise InputError("gram needs at least one point")
    blocks = max(1, min(n, blocks or workers))
    if blocks == 1:
        return cross(kernel, X, X)
    G = np.empty((n, n))
    bounds = np.linspace(0, n, blocks + 1).astype(int)

    def fill(b):
        lo, hi = bounds[b], bounds[b + 1]
        G[lo:hi] = cross(kernel, X[lo:hi], X)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill, range(blocks)))
    else:
        for b in range(blocks):
            fill(b)
    return G


def cholesky(A, shift=0.0):
    """Lower Cholesky factor of ``A + shift*I`` with escalating diagonal jitter.

    Returns ``(L, jitter)`` where ``jitter`` is the relative level that was
    needed (0.0 when none was). On failure a jitter
    ``delta * tr(A)/n`` is added, with ``delta`` going from 1e-12 up to 1e-6
    by factors of ten.

    Raises
    ------
    SingularMatrixError
        If the factorisation fails at the largest jitter level.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InputError(f"expected a square matrix, got shape {A.shape}")
    if shift < 0:
        raise InputError(f"shift must be >= 0, got {shift}")
    n = A.shape[0]
    scale = np.trace(A) / n
    if not scale > 0:
        scale = 1.0
    diag = np.diag_indices(n)
    for delta in JITTER_LEVELS:
        M = np.array(A, order="F")
        M[diag] += shift + delta * scale
        try:
            L = scipy.linalg.cholesky(M, lower=True, overwrite_a=True, check_finite=False)
            piv = np.diagonal(L)
            if np.all(np.isfinite(piv)) and np.all(piv > 0):
                if delta:
                    log.debug("cholesky needed relative jitter %g", delta)
                return L, delta
        except np.linalg.LinAlgError:
            pass
    raise SingularMatrixError(
        f"Cholesky failed for n={n} even with relative jitter {delta:g}", jitter=delta
    )


def cho_solve(L, B):
    """Solve ``L L^T X = B`` given the lower factor ``L``."""
    return scipy.linalg.cho_solve((L, True), B, check_finite=False)


def spd_solve(A, shift, B):
    """Solve ``(A + shift*I) X = B`` for symmetric positive (semi)definite ``A``."""
    B = np.asarray(B, dtype=float)
    A = np.asarray(A, dtype=float)
    if B.shape[0] != A.shape[0]:
        raise InputError(f"right-hand side has {B.shape[0]} rows, matrix has order {A.shape[0]}")
    L, _ = cholesky(A, shift)
    return cho_solve(L, B)
