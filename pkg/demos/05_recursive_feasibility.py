"""Losing feasibility with a short horizon, and keeping it with a terminal set.

Run with ``python3 demos/05_recursive_feasibility.py`` (takes a few seconds).
"""
# %%
import numpy as np

from mpckit import (CostWeights, HPolyhedron, MpcConfig, closed_loop_simulate, double_integrator,
                    max_stabilizing_set, solve_dare)

sys = double_integrator(0.05)
weights = CostWeights(np.eye(2), np.eye(1))
X = HPolyhedron.symmetric_box([10.0, 10.0])
U = HPolyhedron.symmetric_box([20.0])
Qf = solve_dare(sys, weights).Qf

# %% [markdown]
# With N = 5 and only the state box on the last predicted state, the
# controller brakes too late. After five steps no admissible input exists.

# %%
plain = MpcConfig(sys, 5, weights, Qf, X, U)
for x0 in ([7.3, 10.0], [7.24, 10.0]):
    t = closed_loop_simulate(plain, x0, 100)
    print(x0, "-> infeasible after", t.feasible_steps, "steps; last state", t.states[-1])
print("last prediction before the failure:\n", np.round(t.predictions[-1], 4))

# %% [markdown]
# The maximal stabilizing set as terminal constraint keeps every problem solvable.

# %%
Xf = max_stabilizing_set(sys, X, U).set
safe = MpcConfig(sys, 5, weights, Qf, X, U, Xf)
t = closed_loop_simulate(safe, [7.24, 10.0], 100)
_, u, _ = t.as_arrays()
print("feasible steps:", t.feasible_steps, "| first inputs:", np.round(u[:12, 0], 3))
print("final state", t.states[-1])

# From (7.3, 10) even full braking overshoots the terminal set.
print("from (7.3, 10):", closed_loop_simulate(safe, [7.3, 10.0], 5).terminated_infeasible)
