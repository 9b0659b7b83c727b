# %% [markdown]
# # Error versus sample size
#
# Fit the averaged estimator on the Sobolev benchmark (f(x) = min(x, 1 - x),
# noise variance 0.2) for a few partition counts and watch the L2 error fall
# at the minimax rate N^(-2/3). Every part uses the ridge parameter chosen
# for the full sample.

# %%
import numpy as np

from dckrr.sim import SimConfig, mean_mse, run_rate_sweep

N_list = [256, 512, 1024, 2048]
cfg = SimConfig(m_list=[1, 4, 16], trials=5, seed=0)
records = run_rate_sweep(cfg, N_list)

# %%
print(f"{'N':>6} " + " ".join(f"m={m:<9}" for m in cfg.m_list))
for N in N_list:
    print(f"{N:>6} " + " ".join(f"{mean_mse(records, N, m):<11.3e}" for m in cfg.m_list))

# %% [markdown]
# The log-log slope of the m = 1 column should sit near -2/3.

# %%
errs = [mean_mse(records, N, 1) for N in N_list]
print("slope:", np.polyfit(np.log(N_list), np.log(errs), 1)[0])
