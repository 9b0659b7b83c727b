# %% [markdown]
# # Accuracy versus time against low-rank baselines
#
# On a smooth 3-d target with a Gaussian kernel, compare the averaged
# estimator with Nystrom and random Fourier features at several sizes.

# %%
from dckrr import KernelSpec, median_bandwidth
from dckrr.sim import gen_gaussian_sim, run_baseline_frontier

data = gen_gaussian_sim(2000, dim=3, seed=0)
kernel = KernelSpec.gaussian(median_bandwidth(data.X), dim=3)
grid = {"dc": [1, 4, 16], "nystrom": [50, 200], "rff": [256, 1024]}
for r in run_baseline_frontier(data, grid, kernel, seed=0):
    print(f"{r.method:>8} {r.setting:>5}  mse={r.mse:.4f}  seconds={r.fit_seconds:.3f}")
