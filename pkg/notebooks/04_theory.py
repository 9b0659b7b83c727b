# %% [markdown]
# # Spectral quantities and the risk bound
#
# The bound depends on the kernel only through its eigenvalue decay. We
# compute the effective dimension, the ridge parameter that balances bias
# and variance, and the partition budget for the three decay families.

# %%
from dckrr import (
    ExponentialDecay,
    FiniteRank,
    PolynomialDecay,
    TheoryInputs,
    effective_dimension,
    lambda_star,
    m_budget,
    theorem1_bound,
)

N = 2**14
for decay in (FiniteRank((1.0,) * 10), PolynomialDecay(1.0), ExponentialDecay(1.0, 1.0)):
    lam = lambda_star(decay, N)
    print(f"{decay!r}: lambda={lam:.3e} gamma={effective_dimension(decay, lam):.2f} budget={m_budget(decay, N):.1f}")

# %% [markdown]
# The leading terms of the bound follow N^(-2/3) for the first-order
# Sobolev kernel. The higher-order terms carry unspecified constants (set to
# one here) and only become negligible at very large N.

# %%
sob = PolynomialDecay(1.0)
for N in (2**8, 2**13, 2**20, 2**32):
    r = theorem1_bound(TheoryInputs(sob, N, 1, lambda_star(sob, N), l2norm2=1 / 12, bounded_basis=True))
    print(f"N=2^{N.bit_length() - 1:<3} leading={r.leading:.3e} total={r.total:.3e}")
