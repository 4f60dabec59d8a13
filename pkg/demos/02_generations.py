# %% [markdown]
# # Generations networks
#
# Agents arrive in generations of K and each position observes a fixed
# subset of the previous generation.  Compare exact counts with the
# long-run formulas.

# %%
from aggnet.closedform import (
    increment_series,
    maximal_efficiency,
    moment_recursion,
    silo_rates,
    symmetric_efficiency,
)
from aggnet.equilibrium import efficiency_estimate, equilibrium
from aggnet.netcore import GenerationsSpec, build_generations, build_maximal, build_silo

for K in (1, 2, 3, 5):
    _, _, r = equilibrium(build_maximal(K, 300))
    est = efficiency_estimate(r, 2 * K)
    print(f"K={K}: tail r_i/i {est:.4f}  formula {float(maximal_efficiency(K)):.4f}")

# %% [markdown]
# Each of three positions sees two agents, and two positions share one
# agent (d=2, c=1).  The symmetric recursion over (Var, Cov) reproduces the
# full engine.

# %%
spec = GenerationsSpec(3, ({1, 2}, {2, 3}, {1, 3}), 300)
_, _, r = equilibrium(build_generations(spec))
mom = moment_recursion(2, 1, 1.0, 300)
print("engine tail", efficiency_estimate(r, 6), "formula", float(symmetric_efficiency(2, 1, 3)))
print("last generation r: engine", r.r[-1], "recursion", mom[-1].r)
print("per-generation gains near the end:", increment_series(r, 3).per_generation()[-3:])

# %% [markdown]
# Silos: the executive (position 1) sees every silo, others only their own.

# %%
_, _, r = equilibrium(build_silo(4, [{2}, {3, 4}], 200))
g = r.by_generation(4)
print("gains in the last generation:", g[-1] - g[-2])
print("formula:", silo_rates([{2}, {3, 4}]))
