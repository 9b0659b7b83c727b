"""Kernel ridge regression on a single machine.

The estimator minimises ``(1/n) sum (f(x_i) - y_i)^2 + lam * |f|_H^2`` and,
by the representer theorem, has the form ``f = sum_i alpha_i K(x_i, .)``
with ``alpha = (G + lam * n * I)^{-1} y``.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import InputError
from .kernels import KernelSpec, as_points, cross
from .linalg import gram, spd_solve

PREDICT_BLOCK = 4096


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Dataset:
    """Covariates ``X`` of shape ``(N, dim)`` and responses ``y`` of shape ``(N,)``."""

    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        y = np.asarray(self.y, dtype=float).reshape(-1)
        if X.ndim != 2:
            raise InputError(f"X must be 2-D, got shape {X.shape}")
        if X.shape[0] != y.shape[0]:
            raise InputError(f"X has {X.shape[0]} rows but y has {y.shape[0]} entries")
        object.__setattr__(self, "X", _frozen(X))
        object.__setattr__(self, "y", _frozen(y))

    def __len__(self):
        return self.y.shape[0]

    @property
    def dim(self):
        return self.X.shape[1]

    def subset(self, idx):
        return Dataset(self.X[idx], self.y[idx])


@dataclass(frozen=True, eq=False)
class KrrModel:
    """A fitted kernel expansion ``f(x) = sum_i alpha[i] K(support[i], x)``."""

    kernel: KernelSpec
    support: np.ndarray
    alpha: np.ndarray
    lam: float

    def __post_init__(self):
        object.__setattr__(self, "support", _frozen(self.support))
        object.__setattr__(self, "alpha", _frozen(self.alpha))
        if self.support.shape[0] != self.alpha.shape[0]:
            raise InputError("alpha and support lengths differ")

    @property
    def n(self):
        return self.alpha.shape[0]

    def predict(self, X):
        return krr_predict(self, X)

    def hilbert_norm2(self):
        """Squared RKHS norm ``alpha^T G alpha``."""
        G = gram(self.kernel, self.support)
        return float(self.alpha @ G @ self.alpha)


def krr_fit(kernel, data, lam):
    """Fit KRR with ridge parameter ``lam``; the linear system is ``(G + lam*n*I) alpha = y``."""
    if len(data) < 1:
        raise InputError("cannot fit on an empty dataset")
    if not lam > 0:
        raise InputError(f"lambda must be > 0, got {lam!r}")
    X = as_points(data.X, kernel)
    n = X.shape[0]
    G = gram(kernel, X)
    alpha = spd_solve(G, lam * n, data.y)
    return KrrModel(kernel, X, alpha, float(lam))


def krr_predict(model, X):
    """Evaluate the fitted expansion at the rows of ``X``."""
    X = as_points(X, model.kernel)
    out = np.empty(X.shape[0])
    for lo in range(0, X.shape[0], PREDICT_BLOCK):
        hi = lo + PREDICT_BLOCK
        out[lo:hi] = cross(model.kernel, X[lo:hi], model.support) @ model.alpha
    return out
