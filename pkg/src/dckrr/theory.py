"""Spectral quantities, the mean-squared-error bound and partition budgets.

Every function here is a pure function of an eigenvalue profile from
:mod:`dckrr.kernels` plus scalars. Infinite sums are evaluated as follows:

* finite rank: direct sums;
* polynomial decay ``mu_j = c j^(-2 nu)``: the trace and tail sums are Hurwitz
  zeta values; the effective dimension is summed directly for ``j < 64`` and
  the remainder is an Euler-Maclaurin expansion with an analytic integral;
* exponential decay: direct summation until the next term falls below
  ``1e-16`` of the accumulated value (terms decay like ``exp(-c2 j^2)``, so
  this takes at most a few dozen terms for moderate ``c2``).

Logarithms are natural. Universal constants that the error bound leaves
unspecified are set to 1 and every report carries ``constant_caveat=True``.
"""

import math
from fractions import Fraction
from dataclasses import asdict, dataclass

import numpy as np
from scipy import optimize, special

from .exceptions import DivergentTraceError, InputError
from .kernels import ExponentialDecay, FiniteRank, PolynomialDecay

EM_START = 64
# Bernoulli numbers B_2, B_4, ..., B_10
_BERNOULLI = (1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66)
_EXP_CUTOFF = 45.0  # exp(-45) ~ 2.9e-20 < 1e-16 * eps
_GL80 = np.polynomial.legendre.leggauss(80)
D_GRID_MIN_EXP = 20


def _check_poly(decay):
    if decay.nu <= 0.5:
        raise DivergentTraceError(f"polynomial decay with nu={decay.nu} <= 1/2 has infinite trace")


def _check_lam(lam):
    if not lam > 0:
        raise InputError(f"lambda must be > 0, got {lam!r}")


def eigenvalue(decay, j):
    """``mu_j`` (1-based); zero past the rank of a finite-rank profile."""
    j = int(j)
    if isinstance(decay, FiniteRank):
        return decay.mu[j - 1] if 1 <= j <= decay.r else 0.0
    return float(decay.eigenvalue(float(j)))


# ---------------------------------------------------------------------------
# trace, tail sums


def trace_k(decay):
    """Kernel trace ``sum_j mu_j``."""
    if isinstance(decay, FiniteRank):
        return math.fsum(decay.mu)
    if isinstance(decay, PolynomialDecay):
        _check_poly(decay)
        return decay.c * float(special.zeta(2.0 * decay.nu, 1.0))
    if isinstance(decay, ExponentialDecay):
        return tail_sum(decay, 0)
    raise InputError(f"unsupported decay {decay!r}")


def tail_sum(decay, d):
    """``beta_d = sum_{j > d} mu_j``; ``beta_0`` is the trace."""
    d = int(d)
    if d < 0:
        raise InputError(f"d must be >= 0, got {d}")
    if isinstance(decay, FiniteRank):
        return math.fsum(decay.mu[d:])
    if isinstance(decay, PolynomialDecay):
        _check_poly(decay)
        return decay.c * float(special.zeta(2.0 * decay.nu, d + 1.0))
    if isinstance(decay, ExponentialDecay):
        # factor out the leading term so the relative cutoff is exact
        j0 = d + 1
        c2 = decay.c2
        lead = decay.c1 * math.exp(-c2 * j0 * j0)
        if lead == 0.0:
            return 0.0
        imax = 1
        while c2 * ((j0 + imax) ** 2 - j0 * j0) <= _EXP_CUTOFF:
            imax += 1
        i = np.arange(imax + 1, dtype=float)
        rel = np.exp(-c2 * ((j0 + i) ** 2 - j0 * j0))
        return lead * math.fsum(rel)
    raise InputError(f"unsupported decay {decay!r}")


# ---------------------------------------------------------------------------
# effective dimension


def _power_integral_tail(p, s):
    """``int_s^inf du / (1 + u^p)`` for ``p > 1``, ``s >= 0``."""
    if s >= 2.0:
        # alternating series in u^-p, ratio s^-p <= 2^-p
        k = np.arange(200, dtype=float)
        e = p * (k + 1) - 1.0
        terms = (-1.0) ** k * s ** (-e) / e
        terms = terms[np.abs(terms) > 0]
        return math.fsum(terms)
    full = math.pi / (p * math.sin(math.pi / p))
    if s <= 0.5:
        k = np.arange(200, dtype=float)
        e = p * k + 1.0
        terms = (-1.0) ** k * s**e / e
        terms = terms[np.abs(terms) > 0]
        return full - math.fsum(terms)
    # integrand is analytic on [s, 2]; poles lie at distance >= ~0.5 from it
    x, w = _GL80
    u = s + (2.0 - s) * 0.5 * (x + 1.0)
    mid = 0.5 * (2.0 - s) * math.fsum(w / (1.0 + u**p))
    return _power_integral_tail(p, 2.0) + mid


def _g_derivatives(a, p, t, order):
    """Derivatives ``g^(0..order)(t)`` of ``g(t) = 1 / (1 + a t^p)``.

    From ``g * (1 + a t^p) = 1`` and Leibniz' rule,
    ``g^(k) = -sum_{i=1..k} C(k,i) g^(k-i) a (p)_i t^(p-i) / (1 + a t^p)``
    with ``(p)_i`` the falling factorial.
    """
    h0 = 1.0 + a * t**p
    hd = [0.0] * (order + 1)
    falling = 1.0
    for i in range(1, order + 1):
        falling *= p - i + 1
        hd[i] = a * falling * t ** (p - i)
    g = [1.0 / h0]
    for k in range(1, order + 1):
        acc = 0.0
        for i in range(1, k + 1):
            acc += math.comb(k, i) * g[k - i] * hd[i]
        g.append(-acc / h0)
    return g


def _poly_effective_dimension(decay, lam):
    p = 2.0 * decay.nu
    a = lam / decay.c
    j = np.arange(1, EM_START, dtype=float)
    head = math.fsum(1.0 / (1.0 + a * j**p))
    J = float(EM_START)
    scale = a ** (-1.0 / p)
    integral = scale * _power_integral_tail(p, J / scale)
    g = _g_derivatives(a, p, J, 2 * len(_BERNOULLI) - 1)
    corr = [integral, 0.5 * g[0]]
    for k, b in enumerate(_BERNOULLI, start=1):
        corr.append(-b / math.factorial(2 * k) * g[2 * k - 1])
    return head + math.fsum(corr)


def effective_dimension(decay, lam):
    """``gamma(lam) = sum_j 1 / (1 + lam / mu_j)``."""
    _check_lam(lam)
    if isinstance(decay, FiniteRank):
        mu = np.array(decay.mu)
        return math.fsum(mu / (mu + lam))
    if isinstance(decay, PolynomialDecay):
        _check_poly(decay)
        return _poly_effective_dimension(decay, lam)
    if isinstance(decay, ExponentialDecay):
        shift = math.log(lam / decay.c1)
        jmax = math.ceil(math.sqrt((max(-shift, 0.0) + _EXP_CUTOFF) / decay.c2 + 1.0))
        j = np.arange(1, jmax + 1, dtype=float)
        return math.fsum(special.expit(-(shift + decay.c2 * j * j)))
    raise InputError(f"unsupported decay {decay!r}")


# ---------------------------------------------------------------------------
# the error bound


def maxlog_b(n, d, k):
    """``max{ sqrt(max(k, log d)), max(k, log d) / n^(1/2 - 1/k) }``."""
    if n < 1 or d < 1:
        raise InputError("maxlog_b needs n >= 1 and d >= 1")
    M = max(k, math.log(d))
    return max(math.sqrt(M), M / n ** (0.5 - 1.0 / k))


@dataclass(frozen=True)
class TheoryInputs:
    """Inputs to :func:`theorem1_bound`.

    ``hnorm2`` and ``l2norm2`` are the squared RKHS and L2 norms of the
    regression function; ``rho`` bounds the ``2k``-th moments of the
    eigenfunctions (or their sup-norm when ``bounded_basis``).
    """

    decay: object
    N: int
    m: int
    lam: float
    k: float = 4.0
    rho: float = 1.0
    sigma2: float = 0.2
    hnorm2: float = 1.0
    l2norm2: float = 1.0
    bounded_basis: bool = False

    def __post_init__(self):
        if not (int(self.N) == self.N and int(self.m) == self.m and self.N >= self.m >= 1):
            raise InputError(f"need integers N >= m >= 1, got N={self.N}, m={self.m}")
        _check_lam(self.lam)
        if not self.k >= 2:
            raise InputError(f"k must be >= 2, got {self.k}")
        if not self.rho >= 1:
            raise InputError(f"rho must be >= 1, got {self.rho}")
        if not self.sigma2 >= 0:
            raise InputError(f"sigma2 must be >= 0, got {self.sigma2}")
        if self.hnorm2 < 0 or self.l2norm2 < 0:
            raise InputError("norms must be >= 0")

    @property
    def n(self):
        return int(self.N) // int(self.m)

    @property
    def k_eff(self):
        """Moment order used in the bound; bounded eigenfunctions have all moments."""
        if self.bounded_basis:
            return max(self.k, math.log(self.N))
        return self.k


@dataclass(frozen=True)
class BoundReport:
    N: int
    m: int
    lam: float
    gamma: float
    trace: float
    best_d: int
    T1: float
    T2: float
    T3: float
    leading: float
    total: float
    constant_caveat: bool = True
    decay: str = ""

    def as_row(self):
        return asdict(self)


def leading_terms(inp, gamma=None):
    """``(8 + 12/m) lam |f|_H^2 + 12 sigma^2 gamma(lam) / N``."""
    if gamma is None:
        gamma = effective_dimension(inp.decay, inp.lam)
    return (8.0 + 12.0 / inp.m) * inp.lam * inp.hnorm2 + 12.0 * inp.sigma2 * gamma / inp.N


def bound_terms(inp, d, gamma=None, trace=None, C=1.0):
    """``(T1(d), T2(d), T3(d))`` with the universal constant ``C``."""
    decay, lam, m = inp.decay, inp.lam, inp.m
    if gamma is None:
        gamma = effective_dimension(decay, lam)
    if trace is None:
        trace = trace_k(decay)
    beta = tail_sum(decay, d)
    mu_next = eigenvalue(decay, d + 1)
    rho4 = inp.rho**4
    k = inp.k_eff
    T1 = 8.0 * rho4 * inp.hnorm2 * trace * beta / lam
    T2 = (4.0 * inp.hnorm2 + 2.0 * inp.sigma2 / lam) / m * (mu_next + 12.0 * rho4 * trace * beta / lam)
    base = C * maxlog_b(inp.n, d, k) * inp.rho**2 * gamma / math.sqrt(inp.n)
    with np.errstate(over="ignore"):
        powk = float(np.power(base, k))
    T3 = powk * inp.l2norm2 * (1.0 + 2.0 * inp.sigma2 / (m * lam) + 4.0 * inp.hnorm2 / m)
    return T1, T2, T3


def d_grid(decay, N):
    """Truncation levels ``2^0 .. 2^E`` with ``E = max(20, ceil(3 log2 N))``, plus ``r``.

    The cubic reach covers ``d ~ N^3``, where the tail terms of a
    ``nu = 1`` polynomial profile become negligible.
    """
    top = max(D_GRID_MIN_EXP, math.ceil(3 * math.log2(N)))
    grid = {2**i for i in range(top + 1)}
    if isinstance(decay, FiniteRank):
        grid.add(decay.r)
    return sorted(grid)


def theorem1_bound(inp):
    """Evaluate the averaged-estimator MSE bound.

    The infimum over the truncation level ``d`` is taken over the
    geometric grid of :func:`d_grid`.
    """
    gamma = effective_dimension(inp.decay, inp.lam)
    trace = trace_k(inp.decay)
    leading = leading_terms(inp, gamma)
    best = None
    for d in d_grid(inp.decay, inp.N):
        T = bound_terms(inp, d, gamma=gamma, trace=trace)
        s = sum(T)
        if best is None or s < best[0]:
            best = (s, d, T)
    s, d, (T1, T2, T3) = best
    return BoundReport(
        N=int(inp.N),
        m=int(inp.m),
        lam=float(inp.lam),
        gamma=gamma,
        trace=trace,
        best_d=d,
        T1=T1,
        T2=T2,
        T3=T3,
        leading=leading,
        total=leading + s,
        constant_caveat=True,
        decay=inp.decay.variant,
    )


# ---------------------------------------------------------------------------
# regularisation rules and partition budgets


def lambda_star(decay, N):
    """Rate-optimal ridge parameter for the decay family.

    ``r/N`` (finite rank), ``N^(-2nu/(2nu+1))`` (polynomial), ``1/N``
    (exponential).
    """
    if N < 1:
        raise InputError(f"N must be >= 1, got {N}")
    if isinstance(decay, FiniteRank):
        return decay.r / N
    if isinstance(decay, PolynomialDecay):
        return _rational_power(N, decay.nu)
    if isinstance(decay, ExponentialDecay):
        return 1.0 / N
    raise InputError(f"unsupported decay {decay!r}")


def _rational_power(N, nu):
    # N^(-2nu/(2nu+1)), exact when nu is a simple fraction and N a perfect power
    nu_frac = Fraction(nu).limit_denominator(1000)
    if isinstance(N, (int, np.integer)) and float(nu_frac) == nu:
        e = 2 * nu_frac / (2 * nu_frac + 1)
        r = round(float(N) ** (1.0 / e.denominator))
        for root in (r - 1, r, r + 1):
            if root > 0 and root**e.denominator == N:
                return float(Fraction(1, root**e.numerator))
    return float(N) ** (-2.0 * nu / (2.0 * nu + 1.0))


def lambda_balance(decay, N, sigma2, hnorm2):
    """Solve ``lam * |f|_H^2 = sigma^2 * gamma(lam) / N`` for ``lam``.

    The left side increases and the right side decreases in ``lam``, so the
    root is unique; it is bracketed on a log scale.
    """
    if not (sigma2 > 0 and hnorm2 > 0):
        raise InputError("balancing needs sigma2 > 0 and hnorm2 > 0")

    def f(loglam):
        lam = math.exp(loglam)
        return math.log(lam * hnorm2) - math.log(sigma2 * effective_dimension(decay, lam) / N)

    lo, hi = -60.0, 10.0
    return math.exp(optimize.brentq(f, lo, hi, xtol=1e-12))


def poly_gamma_estimate(nu, N):
    """Partial-sum upper estimate ``N^(1/(2nu+1)) (1 + 1/(2nu-1))`` at ``lam = N^(-2nu/(2nu+1))``."""
    if nu <= 0.5:
        raise DivergentTraceError("estimate needs nu > 1/2")
    return float(N) ** (1.0 / (2.0 * nu + 1.0)) * (1.0 + 1.0 / (2.0 * nu - 1.0))


def general_m_budget(N, lam, gamma, d, k, rho):
    """Largest ``m`` keeping the ``T3`` term at order ``gamma/N`` (universal constant 1).

    ``lam^(2/(k-2)) N / (gamma^(2(k-1)/(k-2)) rho^(4k/(k-2)) log(d)^(k/(k-2)))``
    """
    if not k > 2:
        raise InputError(f"general budget needs k > 2, got {k}")
    if d < 2:
        raise InputError("general budget needs d >= 2 (log d > 0)")
    e = 1.0 / (k - 2.0)
    return (
        lam ** (2.0 * e)
        * N
        / (gamma ** (2.0 * (k - 1.0) * e) * rho ** (4.0 * k * e) * math.log(d) ** (k * e))
    )


def m_budget(decay, N, k=4.0, rho=1.0, bounded_basis=True):
    """Largest partition count that keeps the optimal rate for the decay family (constant ``c = 1``).

    With ``bounded_basis`` the sup-norm regime applies; otherwise the
    ``k``-moment regime, which needs ``k > 2``.
    """
    if N < 2:
        raise InputError("budgets need N >= 2")
    if rho < 1:
        raise InputError(f"rho must be >= 1, got {rho}")
    logN = math.log(N)
    if bounded_basis:
        if isinstance(decay, FiniteRank):
            return N / (decay.r**2 * rho**4 * logN)
        if isinstance(decay, PolynomialDecay):
            nu = decay.nu
            return N ** ((2 * nu - 1) / (2 * nu + 1)) / (rho**4 * logN)
        if isinstance(decay, ExponentialDecay):
            return N / (rho**4 * logN**2)
        raise InputError(f"unsupported decay {decay!r}")
    if not k > 2:
        raise InputError(f"the moment regime needs k > 2, got {k}")
    e = 1.0 / (k - 2.0)
    if isinstance(decay, FiniteRank):
        r = decay.r
        if r < 2:
            raise InputError("moment-regime finite-rank budget needs r >= 2 (log r > 0)")
        return N ** ((k - 4) * e) / (r**2 * rho ** (4 * k * e) * math.log(r) ** (k * e))
    if isinstance(decay, PolynomialDecay):
        nu = decay.nu
        inner = N ** ((2 * (k - 4) * nu - k) / (2 * nu + 1)) / (rho ** (4 * k) * logN**k)
        return inner**e
    if isinstance(decay, ExponentialDecay):
        return N ** ((k - 4) * e) / (rho ** (4 * k * e) * logN ** ((2 * k - 1) * e))
    raise InputError(f"unsupported decay {decay!r}")
