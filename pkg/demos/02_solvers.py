"""The two dense solvers: a tableau simplex for LPs and a primal active-set QP method.

Run with ``python3 demos/02_solvers.py``.
"""
# %%
import numpy as np

from mpckit import LpProblem, QpProblem, check_kkt, solve_lp, solve_qp

# %% [markdown]
# An LP over a polygon. The solver works on the dual standard form, so its
# tableau has only as many rows as the problem has variables.

# %%
normals = np.array([[1.0, 2.0], [3.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
offsets = np.array([8.0, 9.0, 0.0, 0.0])
lp = solve_lp(LpProblem([-1.0, -1.0], normals, offsets))
print(lp.status.value, lp.point, lp.value, "active rows", lp.active_rows)

# Infeasible problems come back with a Farkas certificate y >= 0, A'y = 0, b'y < 0.
bad = solve_lp(LpProblem([0.0], [[1.0], [-1.0]], [0.0, -1.0]))
print(bad.status.value, "certificate", bad.certificate)

# %% [markdown]
# A QP ``min x'Hx + 2 f'x`` clipped by a bound, with its KKT report.

# %%
qp = QpProblem([[1.0]], [3.0], [[-1.0]], [1.0])
out = solve_qp(qp)
print("u* =", out.point, "value", out.value, "multipliers", out.multipliers)
print(check_kkt(qp, out))

# %%
rng = np.random.default_rng(0)
M = rng.normal(size=(4, 4))
qp = QpProblem(M @ M.T + np.eye(4), rng.normal(size=4), np.vstack([np.eye(4), -np.eye(4)]),
               0.3 * np.ones(8))
out = solve_qp(qp)
print("4-variable box QP:", np.round(out.point, 4), "iterations", out.iterations)
