# %% [markdown]
# # A planner's weights and random networks
#
# In a maximal network with K=5 equilibrium play gathers under two new
# signals per generation.  Overweighting one's own signal lets later
# agents unpick the overlap and gather almost K.

# %%
from aggnet.closedform import planner_counts
from aggnet.equilibrium import equilibrium
from aggnet.montecarlo import random_ensemble
from aggnet.netcore import build_maximal, maximal_spec

_, _, r_eq = equilibrium(build_maximal(5, 100))
_, _, r_pl = planner_counts(maximal_spec(5, 100))
for name, r in (("equilibrium", r_eq), ("planner", r_pl)):
    g = r.by_generation(5)
    print(f"{name:12s} r at t=100: {g[-1][0]:8.2f}  gain in last generation: {g[-1][0] - g[-2][0]:.3f}")

# %% [markdown]
# With two random earlier neighbors per agent, counts keep growing but
# ever more slowly relative to the population.

# %%
res = random_ensemble((100, 300, 1000), d=2, draws=40, seed=7)
for n, (q1, med, q3) in zip(res.n_grid, res.summary()):
    print(f"n={n:5d}  median r_n {med:6.2f}  IQR [{q1:.2f}, {q3:.2f}]  r_n/n {med / n:.4f}")
