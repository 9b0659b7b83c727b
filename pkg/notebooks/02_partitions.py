# %% [markdown]
# # How many parts can we afford?
#
# At fixed N the averaged estimator keeps the full-sample error until the
# parts get too small to resolve the function. We also compare against the
# naive choice of tuning each part for its own sample size, which
# over-regularises and inflates the bias.

# %%
from dckrr.sim import SimConfig, mean_mse, run_partition_sweep

N = 2048
m_list = [1, 2, 4, 8, 16, 32, 64, 128, 256]
glob = run_partition_sweep(SimConfig(trials=5, seed=1), N, m_list)
local = run_partition_sweep(SimConfig(trials=5, seed=1, lambda_rule="local"), N, m_list)

# %%
base = mean_mse(glob, N, 1)
print(f"{'m':>5} {'global':>10} {'local':>10}")
for m in m_list:
    print(f"{m:>5} {mean_mse(glob, N, m) / base:>10.2f} {mean_mse(local, N, m) / base:>10.2f}")
