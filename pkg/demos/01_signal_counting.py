# %% [markdown]
# # Counting signals in a small network
#
# Agent 3 sees agents 1 and 2, and agent 2 already saw agent 1.  Agent 1's
# action is then redundant, and the equilibrium weight on it is zero.

# %%
import numpy as np

from aggnet.equilibrium import LogSignalParams, action_moments, equilibrium
from aggnet.netcore import Network, complete_prefix

net = Network(3, [(), (1,), (1, 2)])
W, B, r = equilibrium(net, backend="rational")
print("weights on observed actions of agent 3:", B[3])
print("signal counts:", r.r)

# %% [markdown]
# Each log-action is Gaussian with mean r(2/s2) and variance r(4/s2).
# Off equilibrium the two no longer line up.

# %%
params = LogSignalParams(1.0)
for i in range(1, 4):
    mean, var = action_moments(W, i, params)
    print(f"agent {i}: mean {mean}, variance {var}, variance/2 - mean = {var / 2 - mean}")

# %% [markdown]
# When everyone sees everyone, every private signal can be backed out.

# %%
_, _, r = equilibrium(complete_prefix(10), backend="rational")
print(list(r.r))
print("float and rational agree:", np.allclose(equilibrium(complete_prefix(10))[2].r, r.as_float()))
