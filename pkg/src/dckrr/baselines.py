"""Approximate-KRR baselines: Nystrom subsampling and random Fourier features."""

from dataclasses import dataclass

import numpy as np

from .exceptions import InputError, UnsupportedError
from .kernels import KernelSpec, as_points, cross
from .krr import _frozen
from .linalg import gram, spd_solve


@dataclass(frozen=True, eq=False)
class NystromModel:
    kernel: KernelSpec
    landmarks: np.ndarray
    weights: np.ndarray
    lam: float
    seed: int

    def __post_init__(self):
        object.__setattr__(self, "landmarks", _frozen(self.landmarks))
        object.__setattr__(self, "weights", _frozen(self.weights))

    def predict(self, X):
        X = as_points(X, self.kernel)
        return cross(self.kernel, X, self.landmarks) @ self.weights


def nystrom_fit(kernel, data, lam, D, seed):
    """Nystrom-reduced KRR on ``D`` landmarks drawn uniformly without replacement.

    Solves ``(K_nD^T K_nD + lam * n * K_DD) w = K_nD^T y``; the fitted
    function is ``sum_j w_j K(landmark_j, .)``.
    """
    X = as_points(data.X, kernel)
    n = X.shape[0]
    if not 1 <= D <= n:
        raise InputError(f"need 1 <= D <= N, got D={D}, N={n}")
    if not lam > 0:
        raise InputError(f"lambda must be > 0, got {lam!r}")
    idx = np.sort(np.random.default_rng(seed).choice(n, size=D, replace=False))
    L = X[idx]
    KnD = cross(kernel, X, L)
    A = KnD.T @ KnD
    # symmetrise: the BLAS product is only symmetric to rounding
    A = 0.5 * (A + A.T) + lam * n * gram(kernel, L)
    w = spd_solve(A, 0.0, KnD.T @ data.y)
    return NystromModel(kernel, L, w, float(lam), int(seed))


@dataclass(frozen=True, eq=False)
class RffModel:
    frequencies: np.ndarray
    phases: np.ndarray
    coef: np.ndarray
    sigma: float
    lam: float
    seed: int

    def __post_init__(self):
        for name in ("frequencies", "phases", "coef"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))

    @property
    def D(self):
        return self.coef.shape[0]

    def features(self, X):
        """``z(x) = sqrt(2/D) cos(W x + b)``, one row per point."""
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1) if self.frequencies.shape[1] == 1 else X.reshape(1, -1)
        if X.shape[1] != self.frequencies.shape[1]:
            raise InputError(f"points have dim {X.shape[1]}, model expects {self.frequencies.shape[1]}")
        return np.sqrt(2.0 / self.D) * np.cos(X @ self.frequencies.T + self.phases)

    def predict(self, X):
        return self.features(X) @ self.coef


def rff_features(dim, D, sigma, seed):
    """Frequencies ``W ~ N(0, I / sigma^2)`` and phases ``b ~ U[0, 2 pi)``."""
    rng = np.random.default_rng(seed)
    W = rng.normal(scale=1.0 / sigma, size=(D, dim))
    b = rng.uniform(0.0, 2.0 * np.pi, size=D)
    return W, b


def rff_fit(data, lam, D, sigma=None, seed=0, kernel=None):
    """Ridge regression on ``D`` random Fourier features of the Gaussian kernel.

    Solves ``(Z^T Z + lam * n * I) c = Z^T y``. ``kernel`` may be given
    instead of ``sigma``; only the Gaussian family is supported.
    """
    if kernel is not None:
        if kernel.family != "gaussian":
            raise UnsupportedError(f"random Fourier features need a gaussian kernel, got {kernel.family}")
        sigma = kernel.sigma if sigma is None else sigma
    if sigma is None or not sigma > 0:
        raise InputError(f"bandwidth must be > 0, got {sigma!r}")
    if D < 1:
        raise InputError(f"D must be >= 1, got {D}")
    if not lam > 0:
        raise InputError(f"lambda must be > 0, got {lam!r}")
    n = len(data)
    W, b = rff_features(data.dim, D, sigma, seed)
    Z = np.sqrt(2.0 / D) * np.cos(data.X @ W.T + b)
    A = Z.T @ Z
    A = 0.5 * (A + A.T)
    coef = spd_solve(A, lam * n, Z.T @ data.y)
    return RffModel(W, b, coef, float(sigma), float(lam), int(seed))
