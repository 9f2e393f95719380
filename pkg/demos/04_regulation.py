"""Steering the double integrator to the origin with a horizon of 10.

Run with ``python3 demos/04_regulation.py``.
"""
# %%
import numpy as np

from mpckit import (CostWeights, HPolyhedron, MpcConfig, closed_loop_simulate, double_integrator,
                    solve_dare)

sys = double_integrator(0.05)
weights = CostWeights(np.eye(2), np.eye(1))
cfg = MpcConfig(sys, 10, weights, solve_dare(sys, weights).Qf,
                HPolyhedron.symmetric_box([10.0, 10.0]), HPolyhedron.symmetric_box([20.0]))

# %%
trace = closed_loop_simulate(cfg, [0.0, 10.0], 100)
states, inputs, costs = trace.as_arrays()
for k in (0, 10, 30, 60, 99):
    print(f"k={k:3d}  x={np.round(states[k], 3)}  u={inputs[k, 0]:8.3f}  J*={costs[k]:9.3f}")
print("final state", states[-1])
print("optimal cost never increases:", bool(np.all(np.diff(costs) <= 1e-6)))

# %% [markdown]
# The prediction made at step 10: the red circles of a phase-plane plot.

# %%
print(np.round(trace.predictions[10], 3))
