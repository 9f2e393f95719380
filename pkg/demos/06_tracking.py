"""Tracking a moving reference instead of regulating to the origin.

Run with ``python3 demos/06_tracking.py``.
"""
# %%
import numpy as np

from mpckit import (CostWeights, HPolyhedron, MpcConfig, ReferenceTrajectory,
                    closed_loop_simulate, double_integrator, solve_dare)

sys = double_integrator(0.05)
weights = CostWeights(np.diag([10.0, 1.0]), np.eye(1))
N = 10
cfg = MpcConfig(sys, N, weights, solve_dare(sys, weights).Qf,
                HPolyhedron.symmetric_box([10.0, 10.0]), HPolyhedron.symmetric_box([20.0]))

# %% [markdown]
# A slow sine for the position; velocity and input references follow from
# the dynamics, so the reference is consistent but not exactly reachable.

# %%
T = 0.05


def window(k):
    t = (k + np.arange(N + 1)) * T
    pos, vel = 5 * np.sin(0.5 * t), 2.5 * np.cos(0.5 * t)
    acc = -1.25 * np.sin(0.5 * t[:-1])
    return ReferenceTrajectory(np.column_stack([pos, vel]), acc)


trace = closed_loop_simulate(cfg, [0.0, 0.0], 300, window)
states, inputs, costs = trace.as_arrays()
ref = np.array([window(k).Xref[:2] for k in range(len(states))])
err = np.abs(states[:, 0] - ref[:, 0])
print("max position error after step 50:", err[50:].max())
print("tracking cost at k = 0, 100, 299:", costs[[0, 100, 299]])
