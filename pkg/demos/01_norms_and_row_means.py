# %% [markdown]
# # Norms and the row-mean operator
#
# A function on an N1 x N2 grid is stored as a matrix. Norms use the
# normalized counting measure: the L_p norm is the p-th root of the *mean*
# of |f|^p, so a constant function of value c has norm |c| for every p.

# %%
import numpy as np

from vecmean import DiscreteFunction, lp_norm, mean_rows, norm_witness, operator_norm
from vecmean.tensor_space import INF

f = DiscreteFunction(np.array([[1.0, -1.0, 3.0, 1.0], [0.0, 2.0, 2.0, 0.0]]))
for p in (1, 2, 4, INF):
    print(f"||f||_{p} = {lp_norm(f, p):.4f}")

# %% [markdown]
# The operator S maps f to the vector of its row means. Going from L_p on
# the grid to L_q on the rows, its norm is N1^(1/p - 1/q) when p <= q and 1
# otherwise. A single spiked column attains it.

# %%
print("S(f) =", mean_rows(f))
for p, q, n1 in [(1, INF, 8), (4, INF, 16), (2, 2, 32)]:
    w = norm_witness(p, q, n1, 6)
    attained = lp_norm(mean_rows(w), q) / lp_norm(w, p)
    print(f"p={p}, q={q}, N1={n1}: ||S|| = {operator_norm(p, q, n1):g}, witness ratio = {attained:g}")
