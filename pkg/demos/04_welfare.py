# %% [markdown]
# # From signal counts to welfare
#
# Under quadratic loss an agent with r signals has expected utility v(r),
# which depends on r only through r/s2.

# %%
import numpy as np

from aggnet.equilibrium import equilibrium
from aggnet.netcore import build_maximal
from aggnet.welfare import WelfareWeights, accuracy_prob, attainment, patient_compare, utility_curve, utility_series

for s2 in (0.5, 1.0, 4.0):
    c = utility_curve(s2, [1, 2, 5, 10, 20])
    print(f"s2={s2}: v = {np.round(c.v, 5)}")
print("P[a > 0.9 | state 1] with one signal:", accuracy_prob(1, 1.0, 0.1))

# %% [markdown]
# Fewer, larger generations start faster but fall behind.  Compare when
# each network reaches a utility target and how a patient welfare
# function ranks them.

# %%
r2 = equilibrium(build_maximal(2, 250))[2].as_float()
r5 = equilibrium(build_maximal(5, 100))[2].as_float()
for s2 in (0.5, 4.0, 16.0):
    a, b = attainment(r2, s2, -0.05), attainment(r5, s2, -0.05)
    print(f"s2={s2}: K=2 strong {a.strong}, K=5 weak {b.weak}")

T = int(np.flatnonzero(r2 < r5)[-1]) + 2
w = WelfareWeights.discounted(500, T, 0.99)
print("from agent", T, "on, K=2 dominates; welfare:", patient_compare(utility_series(r2, 1.0), utility_series(r5, 1.0), w))
