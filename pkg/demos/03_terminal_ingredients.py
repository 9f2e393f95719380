"""Terminal cost from the Riccati equation and terminal set from a backward iteration.

Run with ``python3 demos/03_terminal_ingredients.py`` (takes a few seconds).
"""
# %%
import numpy as np

from mpckit import (CostWeights, HPolyhedron, build_lifted, certify_control_invariant,
                    double_integrator, feasible_initial_set, max_stabilizing_set, set_equal,
                    solve_dare, MpcConfig)

sys = double_integrator(0.05)
weights = CostWeights(np.eye(2), np.eye(1))
X = HPolyhedron.symmetric_box([10.0, 10.0])
U = HPolyhedron.symmetric_box([20.0])

# %% [markdown]
# Fixed-point iteration on the Riccati recursion from P = Q.

# %%
dare = solve_dare(sys, weights)
print("Qf =\n", np.round(dare.Qf, 4))
print("K =", dare.K, "| residual", dare.residual, "| iterations", dare.iterations)
print("closed-loop spectral radius", dare.closed_loop_spectral_radius)

# %% [markdown]
# Starting from {0}, each step collects the states of X that one admissible
# input can push into the previous set. The iterates grow until they stop.

# %%
res = max_stabilizing_set(sys, X, U)
print(f"converged={res.converged} after {res.iterations} iterations, {res.set.n_rows} rows")
print("row counts:", res.history_sizes)
print("control invariant:", certify_control_invariant(sys, res.set, X, U))
print("X itself is not:", certify_control_invariant(sys, X, X, U))

# %% [markdown]
# With this set as terminal constraint, the feasible initial states for any
# horizon are the set itself.

# %%
for N in (1, 3, 5):
    cfg = MpcConfig(sys, N, weights, dare.Qf, X, U, res.set)
    print(N, set_equal(feasible_initial_set(build_lifted(cfg)), res.set))
