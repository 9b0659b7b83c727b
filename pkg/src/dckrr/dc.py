"""Divide-and-conquer kernel ridge regression.

The sample is split uniformly at random into ``m`` balanced parts, a local
KRR estimate is fitted on each part with the *same* ridge parameter (chosen
for the full sample size, so each part is under-regularised), and the local
estimates are averaged.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from threadpoolctl import threadpool_limits

from .exceptions import InputError, PartitionFitError
from .kernels import KernelSpec, as_points
from .krr import KrrModel, krr_fit, krr_predict

SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True, eq=False)
class Partition:
    """Assignment of ``N`` sample indices to ``num_parts`` balanced parts."""

    num_parts: int
    assignment: np.ndarray
    seed: int

    def __post_init__(self):
        a = np.array(self.assignment, dtype=np.int64)
        a.setflags(write=False)
        object.__setattr__(self, "assignment", a)

    @property
    def N(self):
        return self.assignment.shape[0]

    def indices(self, part):
        return np.flatnonzero(self.assignment == part)

    def sizes(self):
        return np.bincount(self.assignment, minlength=self.num_parts)


def make_partition(N, m, seed):
    """Random balanced partition of ``range(N)`` into ``m`` parts.

    The indices are shuffled with a generator seeded by ``seed`` and the
    permutation is cut into ``m`` contiguous slices whose sizes differ by at
    most one.
    """
    N, m = int(N), int(m)
    if N < 1:
        raise InputError(f"N must be >= 1, got {N}")
    if not 1 <= m <= N:
        raise InputError(f"number of parts must satisfy 1 <= m <= N, got m={m}, N={N}")
    seed = int(seed) & SEED_MASK
    perm = np.random.default_rng(seed).permutation(N)
    assignment = np.empty(N, dtype=np.int64)
    for part, chunk in enumerate(np.array_split(perm, m)):
        assignment[chunk] = part
    return Partition(m, assignment, seed)


@dataclass(frozen=True, eq=False)
class DcKrrModel:
    """Average of ``m`` local KRR models sharing a kernel and ridge parameter."""

    locals: tuple
    partition: Partition
    lam: float

    @property
    def kernel(self) -> KernelSpec:
        return self.locals[0].kernel

    @property
    def m(self):
        return len(self.locals)

    def predict(self, X):
        return dc_predict(self, X)


def _fit_part(kernel, data, lam, partition, part):
    try:
        return krr_fit(kernel, data.subset(partition.indices(part)), lam)
    except Exception as exc:
        raise PartitionFitError(part, exc) from exc


def dc_fit(kernel, data, lam, m, seed, workers=1):
    """Fit the divide-and-conquer estimator.

    ``lam`` is used unchanged on every part; pass the value appropriate for
    the full sample size. Local fits run on a pool of ``workers`` threads.
    For ``m > 1`` BLAS is pinned to one thread per fit so the result is
    bit-identical for every worker count.
    """
    if not lam > 0:
        raise InputError(f"lambda must be > 0, got {lam!r}")
    if workers < 1:
        raise InputError(f"workers must be >= 1, got {workers}")
    as_points(data.X, kernel)
    partition = make_partition(len(data), m, seed)

    def fit(part):
        return _fit_part(kernel, data, lam, partition, part)

    if m == 1:
        models = [fit(0)]
    else:
        with threadpool_limits(limits=1, user_api="blas"):
            if workers == 1:
                models = [fit(p) for p in range(m)]
            else:
                with ThreadPoolExecutor(max_workers=min(workers, m)) as pool:
                    models = list(pool.map(fit, range(m)))
    return DcKrrModel(tuple(models), partition, float(lam))


def local_predictions(model, X):
    """Array of shape ``(m, len(X))`` with each local model's predictions."""
    X = as_points(X, model.kernel)
    return np.stack([krr_predict(loc, X) for loc in model.locals])


def dc_predict(model, X):
    """Uniform ``1/m`` average of the local predictions, summed in part order."""
    X = as_points(X, model.kernel)
    acc = np.zeros(X.shape[0])
    for loc in model.locals:
        acc += krr_predict(loc, X)
    return acc / model.m


