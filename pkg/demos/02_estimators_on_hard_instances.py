# %% [markdown]
# # Two Monte Carlo estimators and the instances that stress them
#
# `a2_mean` samples ceil(n/N1) columns once and averages every row over
# them. `a3_mean` first estimates each row's L2 norm, then gives noisy rows
# more samples, boosting both stages with a median over m repetitions.
# Both report an audit of the oracle calls they used.

# %%
import numpy as np

from vecmean import AdaptiveConfig, InstanceSpec, a2_mean, a3_mean, derive, draw, lp_norm, mean_rows
from vecmean.tensor_space import INF

spec = InstanceSpec("mu4", 4, 1024, 32, 1000)
f = draw(spec, derive(11))
print("nonzero rows:", np.flatnonzero(np.any(f.matrix != 0, axis=1)))
print("||f||_4 =", lp_norm(f, 4))

# %% [markdown]
# mu4 hides all its mass in one row. The non-adaptive estimator spreads its
# budget evenly, while the adaptive one spends stage one locating the heavy
# row. Note the audits: at the same nominal n, a3 may use up to 6mn calls,
# so comparing raw errors here is not an equal-budget comparison.

# %%
truth = mean_rows(f)
out2, audit2 = a2_mean(f, 1024, derive(12))
out3, audit3 = a3_mean(f, AdaptiveConfig(1024, m=9), derive(13))
print(f"a2: sup error {lp_norm(truth - out2, INF):.4f} with {audit2.total_calls} calls")
print(f"a3: sup error {lp_norm(truth - out3, INF):.4f} with {audit3.total_calls} calls "
      f"({audit3.stage1_calls} + {audit3.stage2_calls})")

# %% [markdown]
# The other families: mu1 puts random signs on blocks of every row, mu2 one
# signed block in one row, mu3 a block per row of normalized height.

# %%
for family in ("mu1", "mu2", "mu3"):
    g = draw(InstanceSpec(family, 4, 1024, 32, 1000), derive(14))
    print(family, "rows touched:", int(np.any(g.matrix != 0, axis=1).sum()), " ||g||_4 =", round(lp_norm(g, 4), 6))
