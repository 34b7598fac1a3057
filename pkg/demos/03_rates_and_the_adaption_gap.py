# %% [markdown]
# # Error rates and the adaption gap
#
# `estimate_error` averages the L_q error over trials, drawing a fresh
# instance and fresh algorithm randomness each time. Sweeping the budget n
# and fitting a line in log2-log2 coordinates gives an empirical rate.

# %%
from vecmean.harness import ExperimentPlan, fit_rate, gap_csv, gap_experiment, predicted_rate, sweep
from vecmean.tensor_space import INF

plan = ExperimentPlan([256, 512, 1024, 2048], ["a2"], trials=300, seed=1, n1=4, n2=16384, p=2, q=2)
records = sweep(plan, "a2", "mu2")
for r in records:
    print(f"n={r.n:5d}  err={r.mean_err:.4f}  envelope={predicted_rate('ran_non', 2, 2, 4, 16384, r.n):.4f}")
print(fit_rate([(r.n, r.mean_err) for r in records]).line())

# %% [markdown]
# For p=4, q=inf the adaptive algorithm should win by a factor growing like
# n^(1/8) once N1 is about sqrt(n). `gap_experiment` couples the dimensions
# to n, charges the adaptive method a deflated budget and takes the worst
# family for each algorithm. At this small scale the flat mu1 family
# dominates, so expect the ratio to be noisy rather than clearly growing.

# %%
print(gap_csv(gap_experiment(4, INF, [256, 1024, 4096], trials=40, m=9, seed=2)))
