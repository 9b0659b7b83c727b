"""Kernel families and eigenvalue-decay profiles.

A :class:`KernelSpec` is an immutable description of a positive semidefinite
kernel. Evaluation is vectorised through :func:`cross`, which builds the
matrix ``K(x_i, y_j)`` for two point sets; every other evaluation routine
(single pairs, Gram matrices, predictions) goes through it so all code paths
produce bitwise-identical values.

The decay profiles (:class:`FiniteRank`, :class:`PolynomialDecay`,
:class:`ExponentialDecay`) model the Mercer eigenvalues of a kernel and feed
the quantities in :mod:`dckrr.theory`.
"""

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist

from .exceptions import InputError

FAMILIES = ("sobolev1", "gaussian", "linear", "polynomial")


@dataclass(frozen=True)
class KernelSpec:
    """A kernel family with its parameters.

    Parameters
    ----------
    family : str
        One of ``sobolev1``, ``gaussian``, ``linear``, ``polynomial``.
    dim : int
        Expected input dimension (always 1 for ``sobolev1``).
    sigma : float, optional
        Gaussian bandwidth, ``K(x, y) = exp(-|x - y|^2 / (2 sigma^2))``.
    degree, offset : int, float
        Polynomial kernel ``(offset + <x, y>)^degree``.
    """

    family: str
    dim: int = 1
    sigma: float | None = None
    degree: int = 2
    offset: float = 1.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InputError(f"unknown kernel family {self.family!r}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise InputError(f"dim must be a positive integer, got {self.dim!r}")
        if self.family == "sobolev1" and self.dim != 1:
            raise InputError("sobolev1 kernel is defined on [0, 1] only (dim=1)")
        if self.family == "gaussian":
            if self.sigma is None or not self.sigma > 0:
                raise InputError(f"gaussian bandwidth must be > 0, got {self.sigma!r}")
        if self.family == "polynomial":
            if int(self.degree) != self.degree or self.degree < 1:
                raise InputError(f"polynomial degree must be a positive integer, got {self.degree!r}")
            if self.offset < 0:
                raise InputError(f"polynomial offset must be >= 0, got {self.offset!r}")

    @classmethod
    def sobolev1(cls):
        return cls("sobolev1", dim=1)

    @classmethod
    def gaussian(cls, sigma, dim=1):
        return cls("gaussian", dim=dim, sigma=float(sigma))

    @classmethod
    def linear(cls, dim=1):
        return cls("linear", dim=dim)

    @classmethod
    def polynomial(cls, degree, offset=1.0, dim=1):
        return cls("polynomial", dim=dim, degree=int(degree), offset=float(offset))

    def to_dict(self):
        d = {"family": self.family, "dim": self.dim}
        if self.family == "gaussian":
            d["sigma"] = self.sigma
        if self.family == "polynomial":
            d.update(degree=self.degree, offset=self.offset)
        return d


def as_points(X, kernel):
    """Coerce ``X`` to a float array of shape ``(n, kernel.dim)``.

    A 1-D array is read as ``n`` scalar points when ``dim == 1`` and as a
    single point otherwise.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 0:
        X = X.reshape(1, 1)
    elif X.ndim == 1:
        X = X.reshape(-1, 1) if kernel.dim == 1 else X.reshape(1, -1)
    if X.ndim != 2 or X.shape[1] != kernel.dim:
        raise InputError(
            f"points have shape {X.shape}, expected (n, {kernel.dim}) for {kernel.family} kernel"
        )
    if kernel.family == "sobolev1" and X.size and (X.min() < 0.0 or X.max() > 1.0):
        raise InputError("sobolev1 kernel requires inputs in [0, 1]")
    return X


def cross(kernel, X, Y):
    """Kernel matrix ``out[i, j] = K(X[i], Y[j])``.

    Coordinates are accumulated one dimension at a time with commutative
    elementwise operations, so ``cross(k, X, Y) == cross(k, Y, X).T`` holds
    bitwise and each entry is independent of how the rows are blocked.
    """
    X = as_points(X, kernel)
    Y = as_points(Y, kernel)
    fam = kernel.family
    if fam == "sobolev1":
        return 1.0 + np.minimum(X[:, 0, None], Y[None, :, 0])
    if fam == "gaussian":
        sq = np.zeros((X.shape[0], Y.shape[0]))
        for k in range(kernel.dim):
            diff = X[:, k, None] - Y[None, :, k]
            sq += diff * diff
        sq *= -1.0 / (2.0 * kernel.sigma**2)
        return np.exp(sq, out=sq)
    dot = np.zeros((X.shape[0], Y.shape[0]))
    for k in range(kernel.dim):
        dot += X[:, k, None] * Y[None, :, k]
    if fam == "linear":
        return dot
    return (kernel.offset + dot) ** kernel.degree


def kernel_eval(kernel, x, y):
    """Evaluate ``K(x, y)`` for a single pair of points."""
    x = np.asarray(x, dtype=float).reshape(1, -1)
    y = np.asarray(y, dtype=float).reshape(1, -1)
    return float(cross(kernel, x, y)[0, 0])


def median_bandwidth(X, max_points=1000, seed=0):
    """Median pairwise Euclidean distance over a random subsample of ``X``."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.shape[0] < 2:
        raise InputError("median heuristic needs at least two points")
    if X.shape[0] > max_points:
        idx = np.random.default_rng(seed).choice(X.shape[0], size=max_points, replace=False)
        X = X[np.sort(idx)]
    med = float(np.median(pdist(X)))
    if med <= 0:
        raise InputError("median pairwise distance is zero; set the bandwidth explicitly")
    return med


# ---------------------------------------------------------------------------
# eigenvalue decay profiles


@dataclass(frozen=True)
class FiniteRank:
    """``mu_j`` given explicitly for ``j <= r``, zero afterwards."""

    mu: tuple

    variant = "finite_rank"

    def __post_init__(self):
        mu = tuple(float(v) for v in np.atleast_1d(self.mu))
        object.__setattr__(self, "mu", mu)
        if not mu:
            raise InputError("finite_rank needs at least one eigenvalue")
        if any(not v > 0 for v in mu):
            raise InputError("finite_rank eigenvalues must be > 0")
        if any(a < b for a, b in zip(mu, mu[1:])):
            raise InputError("finite_rank eigenvalues must be non-increasing")

    @classmethod
    def ones(cls, r):
        return cls(tuple([1.0] * int(r)))

    @property
    def r(self):
        return len(self.mu)

    def eigenvalue(self, j):
        j = np.asarray(j)
        mu = np.concatenate([[0.0], self.mu, [0.0]])
        return mu[np.clip(j, 0, self.r + 1)] * (j >= 1)

    def to_dict(self):
        return {"variant": self.variant, "r": self.r, "mu": list(self.mu)}


@dataclass(frozen=True)
class PolynomialDecay:
    """``mu_j = c * j^(-2 nu)``; the trace is finite only for ``nu > 1/2``."""

    nu: float
    c: float = 1.0

    variant = "polynomial"

    def __post_init__(self):
        if not self.nu > 0:
            raise InputError(f"nu must be > 0, got {self.nu!r}")
        if not self.c > 0:
            raise InputError(f"c must be > 0, got {self.c!r}")

    def eigenvalue(self, j):
        return self.c * np.asarray(j, dtype=float) ** (-2.0 * self.nu)

    def to_dict(self):
        return {"variant": self.variant, "nu": self.nu, "c": self.c}


@dataclass(frozen=True)
class ExponentialDecay:
    """``mu_j = c1 * exp(-c2 * j^2)``."""

    c1: float = 1.0
    c2: float = 1.0

    variant = "exponential"

    def __post_init__(self):
        if not (self.c1 > 0 and self.c2 > 0):
            raise InputError("exponential decay needs c1 > 0 and c2 > 0")

    def eigenvalue(self, j):
        j = np.asarray(j, dtype=float)
        return self.c1 * np.exp(-self.c2 * j * j)

    def to_dict(self):
        return {"variant": self.variant, "c1": self.c1, "c2": self.c2}


def decay_from_dict(d):
    """Build a decay profile from its config-file form."""
    d = dict(d)
    variant = d.pop("variant", None)
    try:
        if variant == "finite_rank":
            if "mu" in d:
                mu = d.pop("mu")
                r = d.pop("r", len(mu))
                if r != len(mu):
                    raise InputError("finite_rank: r does not match len(mu)")
                out = FiniteRank(tuple(mu))
            else:
                out = FiniteRank.ones(d.pop("r"))
        elif variant == "polynomial":
            out = PolynomialDecay(float(d.pop("nu")), float(d.pop("c", 1.0)))
        elif variant == "exponential":
            out = ExponentialDecay(float(d.pop("c1", 1.0)), float(d.pop("c2", 1.0)))
        else:
            raise InputError(f"unknown decay variant {variant!r}")
    except KeyError as exc:
        raise InputError(f"decay {variant!r} is missing key {exc.args[0]!r}") from None
    if d:
        raise InputError(f"unknown decay keys: {sorted(d)}")
    return out


def default_decay(kernel):
    """Eigenvalue profile assumed for a kernel family.

    The Gaussian constants ``c1 = c2 = 1`` are a placeholder profile: the
    true constants depend on the input distribution.
    """
    fam = kernel.family
    if fam == "sobolev1":
        return PolynomialDecay(nu=1.0, c=1.0)
    if fam == "gaussian":
        return ExponentialDecay(c1=1.0, c2=1.0)
    if fam == "linear":
        return FiniteRank.ones(kernel.dim)
    return FiniteRank.ones(kernel.degree + 1)
