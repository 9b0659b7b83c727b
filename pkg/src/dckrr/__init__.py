"""Divide-and-conquer kernel ridge regression.

Split the sample into ``m`` random parts, fit kernel ridge regression on
each part with the ridge parameter chosen for the *full* sample size, and
average the local predictors. The package also evaluates the spectral
quantities that govern the estimator's risk and reproduces the reference
simulations.
"""

from .baselines import NystromModel, RffModel, nystrom_fit, rff_fit
from .dc import DcKrrModel, Partition, dc_fit, dc_predict, make_partition
from .exceptions import (
    DivergentTraceError,
    InputError,
    PartitionFitError,
    SingularMatrixError,
    UnsupportedError,
)
from .kernels import (
    ExponentialDecay,
    FiniteRank,
    KernelSpec,
    PolynomialDecay,
    default_decay,
    kernel_eval,
    median_bandwidth,
)
from .krr import Dataset, KrrModel, krr_fit, krr_predict
from .linalg import gram, spd_solve
from .theory import (
    BoundReport,
    TheoryInputs,
    effective_dimension,
    lambda_star,
    m_budget,
    maxlog_b,
    tail_sum,
    theorem1_bound,
    trace_k,
)

__version__ = "0.1.0"
