"""Condensed linear MPC: lifted prediction matrices, dense QPs, receding horizon.

The predicted state sequence is ``X = calA x + calB U`` with
``X = (x_0, ..., x_N)`` and ``U = (u_0, ..., u_{N-1})``. Both the
regulation and the tracking problem become

    min_U  U'HU + 2 f'U   s.t.  U in U_ad(x),

with ``H = calB' Qt calB + Rt`` and a constant term that is added back to
the reported optimal cost.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np
from scipy.linalg import block_diag

from .lp import Status
from .polytope import HPolyhedron, contains
from .qp import QpProblem, solve_qp
from .riccati import CostWeights


@dataclass(frozen=True)
class DiscreteLtiSystem:
    """``x+ = A x + B u``."""

    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        if A.shape[0] != A.shape[1]:
            raise ValueError(f"A must be square, got {A.shape}")
        B = np.asarray(self.B, dtype=float)
        if B.ndim == 1:
            B = B.reshape(-1, 1)
        if B.shape[0] != A.shape[0]:
            raise ValueError(f"B has {B.shape[0]} rows, A has {A.shape[0]}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]

    def step(self, x, u) -> np.ndarray:
        return self.A @ np.asarray(x, dtype=float) + self.B @ np.atleast_1d(np.asarray(u, dtype=float))


def double_integrator(T: float = 0.05) -> DiscreteLtiSystem:
    return DiscreteLtiSystem([[1.0, T], [0.0, 1.0]], [[0.0], [T]])


@dataclass(frozen=True)
class MpcConfig:
    """Horizon, weights and constraint sets of the finite-horizon problem.

    ``Xf=None`` constrains the terminal state by ``X`` only.
    """

    sys: DiscreteLtiSystem
    N: int
    weights: CostWeights
    Qf: np.ndarray
    X: HPolyhedron
    U: HPolyhedron
    Xf: Optional[HPolyhedron] = None

    def __post_init__(self):
        if int(self.N) < 1:
            raise ValueError("horizon must be ≥ 1")
        Qf = np.atleast_2d(np.asarray(self.Qf, dtype=float))
        n, m = self.sys.n, self.sys.m
        if Qf.shape != (n, n) or self.weights.Q.shape != (n, n) or self.weights.R.shape != (m, m):
            raise ValueError("weight dimensions do not match the system")
        if np.abs(Qf - Qf.T).max() > 1e-9 or np.linalg.eigvalsh(0.5 * (Qf + Qf.T)).min() < -1e-9:
            raise ValueError("Qf must be symmetric positive semidefinite")
        if self.X.dim != n or self.U.dim != m or (self.Xf is not None and self.Xf.dim != n):
            raise ValueError("constraint set dimensions do not match the system")
        for name, S in (("X", self.X), ("U", self.U), ("Xf", self.Xf)):
            if S is not None and not contains(S, np.zeros(S.dim)):
                raise ValueError(f"{name} must contain the origin")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "Qf", Qf)


@dataclass(frozen=True)
class LiftedProblem:
    calA: np.ndarray
    calB: np.ndarray
    Qtilde: np.ndarray
    Rtilde: np.ndarray
    Ftilde: np.ndarray
    ftilde: np.ndarray
    Gtilde: np.ndarray
    gtilde: np.ndarray
    n: int
    m: int
    N: int


@dataclass(frozen=True)
class ReferenceTrajectory:
    Xref: np.ndarray
    Uref: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "Xref", np.asarray(self.Xref, dtype=float).reshape(-1))
        object.__setattr__(self, "Uref", np.asarray(self.Uref, dtype=float).reshape(-1))

    @classmethod
    def constant(cls, x_ref, u_ref, N: int) -> "ReferenceTrajectory":
        return cls(np.tile(np.asarray(x_ref, dtype=float), N + 1),
                   np.tile(np.atleast_1d(np.asarray(u_ref, dtype=float)), N))


@dataclass
class StepResult:
    status: Status
    u_applied: Optional[np.ndarray] = None
    U_opt: Optional[np.ndarray] = None
    X_pred: Optional[np.ndarray] = None
    cost: Optional[float] = None
    active_rows: tuple = ()

    @property
    def feasible(self) -> bool:
        return self.status is Status.OPTIMAL


@dataclass
class SimTrace:
    states: list = field(default_factory=list)
    inputs: list = field(default_factory=list)
    costs: list = field(default_factory=list)
    predictions: list = field(default_factory=list)
    feasible_steps: int = 0
    terminated_infeasible: bool = False

    def as_arrays(self):
        states = np.array(self.states, dtype=float)
        inputs = np.array(self.inputs, dtype=float) if self.inputs else np.zeros((0, 0))
        return states, inputs, np.array(self.costs, dtype=float)


def build_lifted(cfg: MpcConfig) -> LiftedProblem:
    A, B = cfg.sys.A, cfg.sys.B
    n, m, N = cfg.sys.n, cfg.sys.m, cfg.N
    powers = [np.eye(n)]
    for _ in range(N):
        powers.append(A @ powers[-1])
    calA = np.vstack(powers)
    calB = np.zeros((n * (N + 1), m * N))
    for i in range(1, N + 1):
        for j in range(i):
            calB[i * n:(i + 1) * n, j * m:(j + 1) * m] = powers[i - j - 1] @ B
    Qtilde = block_diag(*([cfg.weights.Q] * N + [cfg.Qf]))
    Rtilde = block_diag(*([cfg.weights.R] * N))
    term = cfg.Xf if cfg.Xf is not None else cfg.X
    Ftilde = block_diag(*([cfg.X.normals] * N + [term.normals]))
    ftilde = np.concatenate([cfg.X.offsets] * N + [term.offsets])
    Gtilde = block_diag(*([cfg.U.normals] * N))
    gtilde = np.concatenate([cfg.U.offsets] * N)
    return LiftedProblem(calA, calB, Qtilde, Rtilde, Ftilde, ftilde, Gtilde, gtilde, n, m, N)


def admissible_input_set(lp: LiftedProblem, x):
    """Rows and offsets of ``U_ad(x) = {U | [Ft calB; Gt] U <= [ft; gt] - [Ft calA; 0] x}``."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != lp.n:
        raise ValueError(f"state has dimension {x.size}, expected {lp.n}")
    normals = np.vstack([lp.Ftilde @ lp.calB, lp.Gtilde])
    offsets = np.concatenate([lp.ftilde - lp.Ftilde @ (lp.calA @ x), lp.gtilde])
    return normals, offsets


def _hessian(lp: LiftedProblem) -> np.ndarray:
    H = lp.calB.T @ lp.Qtilde @ lp.calB + lp.Rtilde
    return 0.5 * (H + H.T)


def build_regulation_qp(lp: LiftedProblem, x):
    """Condensed regulation QP and its constant term ``x'calA'Qt calA x``."""
    x = np.asarray(x, dtype=float).reshape(-1)
    free = lp.calA @ x
    f = lp.calB.T @ (lp.Qtilde @ free)
    const = float(free @ lp.Qtilde @ free)
    normals, offsets = admissible_input_set(lp, x)
    return QpProblem(_hessian(lp), f, normals, offsets), const


def build_tracking_qp(lp: LiftedProblem, x, ref: ReferenceTrajectory):
    """Condensed tracking QP; the constant collects every term free of ``U``."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if ref.Xref.size != lp.n * (lp.N + 1) or ref.Uref.size != lp.m * lp.N:
        raise ValueError("reference dimensions do not match the lifted problem")
    free = lp.calA @ x - ref.Xref
    f = lp.calB.T @ (lp.Qtilde @ free) - lp.Rtilde @ ref.Uref
    const = float(free @ lp.Qtilde @ free + ref.Uref @ lp.Rtilde @ ref.Uref)
    normals, offsets = admissible_input_set(lp, x)
    return QpProblem(_hessian(lp), f, normals, offsets), const


def trajectory_cost(cfg: MpcConfig, X, U, ref: Optional[ReferenceTrajectory] = None) -> float:
    """Stage-by-stage sum of quadratic costs plus the terminal cost."""
    n, m, N = cfg.sys.n, cfg.sys.m, cfg.N
    X = np.asarray(X, dtype=float).reshape(N + 1, n)
    U = np.asarray(U, dtype=float).reshape(N, m)
    if ref is not None:
        X = X - ref.Xref.reshape(N + 1, n)
        U = U - ref.Uref.reshape(N, m)
    Q, R = cfg.weights.Q, cfg.weights.R
    J = sum(X[i] @ Q @ X[i] + U[i] @ R @ U[i] for i in range(N))
    return float(J + X[N] @ cfg.Qf @ X[N])


def mpc_step(cfg: MpcConfig, lp: LiftedProblem, x, ref: Optional[ReferenceTrajectory] = None,
             hint=None) -> StepResult:
    """Solve the condensed problem at state ``x`` and return its first input."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if ref is None:
        qp, const = build_regulation_qp(lp, x)
    else:
        qp, const = build_tracking_qp(lp, x, ref)
    out = solve_qp(qp, x0_hint=hint)
    if out.status is not Status.OPTIMAL:
        return StepResult(out.status)
    U = out.point
    return StepResult(Status.OPTIMAL, u_applied=U[:lp.m].copy(), U_opt=U,
                      X_pred=lp.calA @ x + lp.calB @ U, cost=out.value + const,
                      active_rows=out.active_rows)


RefSource = Union[None, ReferenceTrajectory, Callable[[int], ReferenceTrajectory]]


def closed_loop_simulate(cfg: MpcConfig, x0, steps: int, ref: RefSource = None,
                         lp: Optional[LiftedProblem] = None) -> SimTrace:
    """Receding-horizon loop; stops at the first infeasible problem.

    ``ref`` is a fixed reference window or a function of the step index.
    """
    if steps < 1:
        raise ValueError("steps must be ≥ 1")
    lp = lp if lp is not None else build_lifted(cfg)
    x = np.asarray(x0, dtype=float).reshape(-1)
    trace = SimTrace(states=[x.copy()])
    hint = None
    for k in range(steps):
        r = ref(k) if callable(ref) else ref
        res = mpc_step(cfg, lp, x, r, hint=hint)
        if not res.feasible:
            trace.terminated_infeasible = True
            break
        trace.inputs.append(res.u_applied)
        trace.costs.append(res.cost)
        trace.predictions.append(res.X_pred.reshape(cfg.N + 1, cfg.sys.n))
        trace.feasible_steps += 1
        x = cfg.sys.step(x, res.u_applied)
        trace.states.append(x.copy())
        # shifted previous solution as a starting guess
        hint = np.concatenate([res.U_opt[lp.m:], res.U_opt[-lp.m:]])
    return trace
