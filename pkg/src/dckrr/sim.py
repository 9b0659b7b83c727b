"""Synthetic regression problems and the experiment drivers.

The reference simulation draws ``x ~ Uni[0, 1]`` and
``y = min(x, 1 - x) + eps`` with ``eps ~ N(0, sigma2)``, fits with the
first-order Sobolev kernel ``1 + min(x, x')`` and measures the squared
``L2`` error against the noiseless function by Gauss-Legendre quadrature.

Randomness is derived from the master seed per experiment coordinate:
the data for ``(N, trial)`` and the partition for ``(N, trial, m)`` each
get their own seed, so the same data is reused across ``m`` and lambda
rules (paired comparisons) and nothing depends on execution order.
"""

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from .baselines import nystrom_fit, rff_fit
from .dc import dc_fit, dc_predict
from .exceptions import InputError
from .kernels import KernelSpec, PolynomialDecay
from .krr import Dataset
from .theory import lambda_star

log = logging.getLogger(__name__)

SIGMA2 = 0.2
TRIALS = 20
QUAD_NODES = 1024
MEMORY_CAP = 2 * 1024**3
SOBOLEV_DECAY = PolynomialDecay(1.0)

# two 512-node Gauss-Legendre panels, split at the kink of min(x, 1 - x)
_nodes, _weights = np.polynomial.legendre.leggauss(QUAD_NODES // 2)
UNIT_NODES = np.concatenate([0.25 * (_nodes + 1.0), 0.5 + 0.25 * (_nodes + 1.0)])
UNIT_WEIGHTS = np.concatenate([0.25 * _weights, 0.25 * _weights])


def f_star(x):
    """Noiseless regression function ``min(x, 1 - x)``."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 2:
        x = x[:, 0]
    return np.minimum(x, 1.0 - x)


def derive_seed(*key):
    """64-bit seed derived from a tuple of non-negative integers."""
    return int(np.random.SeedSequence([int(k) for k in key]).generate_state(1, np.uint64)[0])


def gen_sobolev(N, sigma2=SIGMA2, seed=0):
    """``N`` samples of the reference problem."""
    if N < 1:
        raise InputError(f"N must be >= 1, got {N}")
    if sigma2 < 0:
        raise InputError(f"sigma2 must be >= 0, got {sigma2}")
    rng = np.random.default_rng(seed)
    x = rng.uniform(0.0, 1.0, size=N)
    y = f_star(x) + rng.normal(0.0, np.sqrt(sigma2), size=N)
    return Dataset(x.reshape(-1, 1), y)


def smooth_target(X):
    """Smooth test function on ``R^dim`` used by the Gaussian-kernel simulation."""
    X = np.atleast_2d(X)
    s = X.sum(axis=1) / np.sqrt(X.shape[1])
    return np.sin(s) + 0.5 * np.cos(X[:, 0])


def gen_gaussian_sim(N, dim=3, sigma2=SIGMA2, seed=0):
    """``x ~ N(0, I_dim)``, ``y = smooth_target(x) + eps``."""
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(N, dim))
    y = smooth_target(X) + rng.normal(0.0, np.sqrt(sigma2), size=N)
    return Dataset(X, y)


def l2_error(predict, reference, domain="unit_interval"):
    """Squared ``L2`` distance between two functions.

    ``domain="unit_interval"`` integrates over ``[0, 1]`` with 1024
    Gauss-Legendre nodes (512 on each half, so the kink of the reference
    function at 1/2 falls on a panel boundary); passing an array of points instead gives the
    mean squared difference over those points.
    """
    if isinstance(domain, str):
        if domain != "unit_interval":
            raise InputError(f"unknown domain {domain!r}")
        x = UNIT_NODES.reshape(-1, 1)
        diff = np.asarray(predict(x), dtype=float) - np.asarray(reference(x), dtype=float)
        return float(UNIT_WEIGHTS @ (diff * diff))
    pts = np.asarray(domain, dtype=float)
    if pts.shape[0] == 0:
        raise InputError("holdout set is empty")
    diff = np.asarray(predict(pts), dtype=float) - np.asarray(reference(pts), dtype=float)
    return float(np.mean(diff * diff))


# ---------------------------------------------------------------------------
# experiment records


@dataclass(frozen=True)
class ErrorRecord:
    N: int
    m: int
    lam: float
    trial: int
    mse: float
    fit_seconds: float
    status: str = "ok"

    def sort_key(self):
        return (self.N, self.m, self.trial, self.lam)


@dataclass
class SimConfig:
    """Configuration shared by the sweep drivers.

    ``lambda_rule`` is ``"global"`` (``N^(-2/3)``), ``"local"``
    (``(N/m)^(-2/3)``) or a positive float used as is.
    """

    m_list: list = field(default_factory=lambda: [1])
    trials: int = TRIALS
    sigma2: float = SIGMA2
    seed: int = 0
    lambda_rule: object = "global"
    workers: int = 1
    N: int | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise InputError("trials must be >= 1")
        if self.sigma2 < 0:
            raise InputError("sigma2 must be >= 0")
        if any(int(m) != m or m < 1 for m in self.m_list):
            raise InputError(f"m_list entries must be positive integers, got {self.m_list}")
        if self.N is not None and any(m > self.N for m in self.m_list):
            raise InputError(f"every m must be <= N={self.N}")
        lambda_value(self.lambda_rule, 2, 1)


def lambda_value(rule, N, m):
    """Ridge parameter for a rule at total size ``N`` split ``m`` ways."""
    if rule == "global":
        return lambda_star(SOBOLEV_DECAY, int(N))
    if rule == "local":
        return lambda_star(SOBOLEV_DECAY, int(N) // int(m))
    if isinstance(rule, str):
        if rule.startswith("explicit:"):
            rule = rule.split(":", 1)[1]
        try:
            rule = float(rule)
        except ValueError:
            raise InputError(f"unknown lambda rule {rule!r}") from None
    if isinstance(rule, (int, float)) and not isinstance(rule, bool) and rule > 0:
        return float(rule)
    raise InputError(f"unknown lambda rule {rule!r}")


def _sobolev_trial(N, m, trial, cfg, rule=None):
    rule = cfg.lambda_rule if rule is None else rule
    data = gen_sobolev(N, cfg.sigma2, derive_seed(cfg.seed, N, trial))
    lam = lambda_value(rule, N, m)
    t0 = time.perf_counter()
    model = dc_fit(KernelSpec.sobolev1(), data, lam, m, derive_seed(cfg.seed, N, trial, m), cfg.workers)
    secs = time.perf_counter() - t0
    mse = l2_error(lambda x: dc_predict(model, x), f_star)
    return ErrorRecord(int(N), int(m), lam, int(trial), mse, secs)


def run_rate_sweep(cfg, N_list):
    """Error versus sample size: every ``(N, m, trial)`` with ``m <= N``."""
    out = []
    for N in N_list:
        for m in cfg.m_list:
            if m > N:
                raise InputError(f"m={m} exceeds N={N}")
            for t in range(cfg.trials):
                try:
                    out.append(_sobolev_trial(N, m, t, cfg))
                except Exception as exc:
                    raise RuntimeError(f"rate sweep failed at N={N}, m={m}, trial={t}: {exc}") from exc
            log.info("rate sweep N=%d m=%d done", N, m)
    return sorted(out, key=ErrorRecord.sort_key)


def run_partition_sweep(cfg, N, m_list):
    """Error versus number of partitions at fixed ``N``."""
    sub = SimConfig(
        m_list=list(m_list),
        trials=cfg.trials,
        sigma2=cfg.sigma2,
        seed=cfg.seed,
        lambda_rule=cfg.lambda_rule,
        workers=cfg.workers,
        N=N,
    )
    return run_rate_sweep(sub, [N])


def dense_solve_bytes(n):
    """Memory of one dense local solve: Gram matrix plus its factor."""
    return 2 * 8 * n * n


def run_timing_table(N_list, m_list, trials, seed=0, sigma2=SIGMA2, memory_cap_bytes=MEMORY_CAP, workers=1):
    """Error and fit time over an ``(N, m)`` grid.

    Cells whose largest local solve would exceed ``memory_cap_bytes`` are
    recorded with ``status="fail"`` and NaN error/time instead of being run.
    """
    cfg = SimConfig(m_list=list(m_list), trials=trials, sigma2=sigma2, seed=seed, workers=workers)
    out = []
    for N in N_list:
        for m in m_list:
            n_max = -(-N // m)
            for t in range(trials):
                if dense_solve_bytes(n_max) > memory_cap_bytes:
                    out.append(ErrorRecord(N, m, lambda_value("global", N, m), t, float("nan"), float("nan"), "fail"))
                    continue
                out.append(_sobolev_trial(N, m, t, cfg, rule="global"))
    return sorted(out, key=ErrorRecord.sort_key)


def summarize(records):
    """Mean error, its standard error and mean time per ``(N, m, lam)``.

    Returns a dict ``{(N, m, lam): {"mse", "se", "seconds", "trials", "status"}}``.
    """
    groups = {}
    for r in records:
        groups.setdefault((r.N, r.m, r.lam), []).append(r)
    out = {}
    for key, rs in sorted(groups.items()):
        ok = [r for r in rs if r.status == "ok"]
        if not ok:
            out[key] = {"mse": float("nan"), "se": float("nan"), "seconds": float("nan"), "trials": 0, "status": "fail"}
            continue
        e = np.array([r.mse for r in ok])
        se = float(e.std(ddof=1) / np.sqrt(len(e))) if len(e) > 1 else float("nan")
        out[key] = {
            "mse": float(e.mean()),
            "se": se,
            "seconds": float(np.mean([r.fit_seconds for r in ok])),
            "trials": len(ok),
            "status": "ok",
        }
    return out


def mean_mse(records, N, m):
    """Mean error over all records at ``(N, m)`` (any lambda)."""
    e = [r.mse for r in records if r.N == N and r.m == m and r.status == "ok"]
    if not e:
        raise KeyError((N, m))
    return float(np.mean(e))


# ---------------------------------------------------------------------------
# time/accuracy frontier


@dataclass(frozen=True)
class FrontierRecord:
    method: str
    setting: int
    lam: float
    mse: float
    fit_seconds: float

    def sort_key(self):
        return (self.method, self.setting)


def split_holdout(data, test_fraction, seed):
    n = len(data)
    n_test = int(round(test_fraction * n))
    if not 1 <= n_test < n:
        raise InputError(f"test fraction {test_fraction} leaves an empty train or test set")
    perm = np.random.default_rng(seed).permutation(n)
    return data.subset(np.sort(perm[n_test:])), data.subset(np.sort(perm[:n_test]))


def run_baseline_frontier(data, method_grid, kernel, lam=None, seed=0, test_fraction=0.2, workers=1):
    """Holdout MSE and fit time for divide-and-conquer KRR and both baselines.

    ``method_grid`` maps ``"dc"`` to a list of partition counts and
    ``"nystrom"``/``"rff"`` to lists of feature counts ``D``. ``lam``
    defaults to ``1/N_train``.
    """
    train, test = split_holdout(data, test_fraction, derive_seed(seed, 0))
    lam = 1.0 / len(train) if lam is None else float(lam)
    fits = {
        "dc": lambda s: dc_fit(kernel, train, lam, s, derive_seed(seed, 1, s), workers),
        "nystrom": lambda s: nystrom_fit(kernel, train, lam, s, derive_seed(seed, 2, s)),
        "rff": lambda s: rff_fit(train, lam, s, seed=derive_seed(seed, 3, s), kernel=kernel),
    }
    unknown = set(method_grid) - set(fits)
    if unknown:
        raise InputError(f"unknown methods {sorted(unknown)}")
    out = []
    for method, settings in method_grid.items():
        for s in settings:
            t0 = time.perf_counter()
            model = fits[method](int(s))
            secs = time.perf_counter() - t0
            mse = float(np.mean((model.predict(test.X) - test.y) ** 2))
            out.append(FrontierRecord(method, int(s), lam, mse, secs))
    return sorted(out, key=FrontierRecord.sort_key)
