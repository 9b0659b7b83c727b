# %% [markdown]
# # Fit time
#
# A single dense solve costs O(N^3) time and O(N^2) memory. Splitting into m
# parts cuts both by m^2 and m^3 respectively. Cells whose local solve would
# not fit the memory cap are reported as failures instead of being run.

# %%
from dckrr.sim import run_timing_table, summarize

records = run_timing_table([1024, 4096], [1, 16, 64], trials=2, seed=0, memory_cap_bytes=2 * 8 * 2048**2)
for (N, m, lam), s in summarize(records).items():
    print(f"N={N:>5} m={m:>3}  mse={s['mse']:.3e}  seconds={s['seconds']:.3f}  {s['status']}")
