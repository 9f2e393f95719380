"""Primal active-set method for strictly convex dense QPs.

The objective convention is ``x'Hx + 2 f'x``, so the gradient is
``2 (H x + f)`` and multipliers satisfy ``2 (H x + f) + A' lam = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lp import TOL_FEAS, LpProblem, SolveOutcome, Status, solve_lp

TOL_KKT = 1e-8


class QpCyclingError(RuntimeError):
    pass


@dataclass(frozen=True)
class QpProblem:
    """``min x'Hx + 2 f'x`` subject to ``normals x <= offsets``.

    The Hessian must be symmetric (within 1e-10) and positive definite;
    both are checked here.
    """

    hessian: np.ndarray
    linear: np.ndarray
    normals: np.ndarray
    offsets: np.ndarray

    def __post_init__(self):
        H = np.atleast_2d(np.asarray(self.hessian, dtype=float))
        f = np.asarray(self.linear, dtype=float).reshape(-1)
        n = f.size
        if H.shape != (n, n):
            raise ValueError(f"hessian shape {H.shape} does not match {n} variables")
        if np.max(np.abs(H - H.T), initial=0.0) > 1e-10 * max(1.0, np.abs(H).max(initial=0.0)):
            raise ValueError("hessian is not symmetric")
        try:
            np.linalg.cholesky(H)
        except np.linalg.LinAlgError:
            raise ValueError("hessian is not positive definite") from None
        A = np.asarray(self.normals, dtype=float)
        if A.size == 0:
            A = A.reshape(0, n)
        b = np.asarray(self.offsets, dtype=float).reshape(-1)
        if A.ndim != 2 or A.shape[1] != n or A.shape[0] != b.size:
            raise ValueError(f"constraint shapes {A.shape} / {b.shape} do not match {n} variables")
        object.__setattr__(self, "hessian", H)
        object.__setattr__(self, "linear", f)
        object.__setattr__(self, "normals", A)
        object.__setattr__(self, "offsets", b)

    @property
    def n(self) -> int:
        return self.linear.size

    def objective(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(x @ self.hessian @ x + 2.0 * self.linear @ x)


@dataclass(frozen=True)
class KktReport:
    stationarity: float
    violation: float
    min_multiplier: float

    def within(self, tol_kkt: float = TOL_KKT, tol_feas: float = TOL_FEAS) -> bool:
        return (self.stationarity <= tol_kkt and self.violation <= tol_feas
                and self.min_multiplier >= -tol_kkt)


def check_kkt(p: QpProblem, out: SolveOutcome) -> KktReport:
    """Stationarity norm, largest constraint violation and smallest multiplier."""
    if out.status is not Status.OPTIMAL:
        raise ValueError("KKT residuals are only defined for optimal outcomes")
    x = out.point
    lam = out.multipliers if out.multipliers is not None else np.zeros(p.offsets.size)
    grad = 2.0 * (p.hessian @ x + p.linear) + p.normals.T @ lam
    viol = float(np.max(p.normals @ x - p.offsets, initial=0.0))
    active = list(out.active_rows)
    min_mult = float(lam[active].min()) if active else math.inf
    return KktReport(float(np.linalg.norm(grad)), max(viol, 0.0), min_mult)


def _independent_subset(A, rows, tol=1e-10):
    chosen = []
    for i in rows:
        trial = A[chosen + [i]]
        if np.linalg.matrix_rank(trial, tol=tol) == len(chosen) + 1:
            chosen.append(i)
        if len(chosen) == A.shape[1]:
            break
    return chosen


def _eqp_step(H, g, AW):
    """Solve ``min p'Hp + g'p s.t. AW p = 0``; returns ``(p, lam)`` with
    ``2 H (x + p) + 2 f + AW' lam = 0``."""
    n = H.shape[0]
    k = AW.shape[0]
    K = np.zeros((n + k, n + k))
    K[:n, :n] = 2.0 * H
    K[:n, n:] = AW.T
    K[n:, :n] = AW
    rhs = np.concatenate([-g, np.zeros(k)])
    sol = np.linalg.solve(K, rhs)
    return sol[:n], sol[n:]


def solve_qp(p: QpProblem, x0_hint=None, tol_feas: float = TOL_FEAS,
             tol_kkt: float = TOL_KKT) -> SolveOutcome:
    """Minimize ``x'Hx + 2 f'x`` over the polyhedron of ``p``.

    Starts from ``x0_hint`` when it is feasible, from the unconstrained
    minimizer when that is feasible, and from a phase-1 LP vertex otherwise.
    Blocking constraints are added one at a time (smallest ratio, lowest
    index on ties); the most negative multiplier is dropped.
    """
    H, f = p.hessian, p.linear
    norms = np.linalg.norm(p.normals, axis=1)
    zero = norms <= 1e-14
    if np.any(p.offsets[zero] < -tol_feas):
        return SolveOutcome(Status.INFEASIBLE)
    rows = np.flatnonzero(~zero)
    A = p.normals[rows] / norms[rows, None]
    b = p.offsets[rows] / norms[rows]
    m = rows.size

    def feasible(x):
        return m == 0 or np.max(A @ x - b) <= tol_feas

    x = None
    if x0_hint is not None:
        hint = np.asarray(x0_hint, dtype=float).reshape(-1)
        if hint.size == p.n and feasible(hint):
            x = hint.copy()
    if x is None:
        unc = np.linalg.solve(H, -f)
        if feasible(unc):
            x = unc
    if x is None:
        lp = solve_lp(LpProblem(np.zeros(p.n), A, b), tol_feas=tol_feas)
        if lp.status is not Status.OPTIMAL:
            return SolveOutcome(Status.INFEASIBLE, certificate=lp.certificate,
                                phase1_value=lp.phase1_value)
        x = lp.point

    slack = b - A @ x if m else np.zeros(0)
    W = _independent_subset(A, [int(i) for i in np.flatnonzero(np.abs(slack) <= tol_feas)])
    scale = max(1.0, float(np.abs(H).max()), float(np.abs(f).max(initial=0.0)))
    limit = 50 * max(m, 1)
    lam = np.zeros(0)
    for it in range(limit):
        g = 2.0 * (H @ x + f)
        AW = A[W] if W else np.zeros((0, p.n))
        step, lam = _eqp_step(H, g, AW)
        if np.linalg.norm(step) <= 1e-12 * max(1.0, np.linalg.norm(x)):
            if not W or lam.min() >= -tol_kkt * scale:
                break
            drop = int(np.argmin(lam))
            W.pop(drop)
            continue
        alpha = 1.0
        block = None
        if m:
            Ap = A @ step
            for i in range(m):
                if i in W or Ap[i] <= 1e-12:
                    continue
                ratio = max(b[i] - A[i] @ x, 0.0) / Ap[i]
                if ratio < alpha:
                    alpha, block = ratio, i
        x = x + alpha * step
        if block is not None:
            W.append(block)
    else:
        raise QpCyclingError(
            f"active-set method did not terminate after {limit} iterations "
            f"({m} constraint rows, working set {sorted(rows[W].tolist())})")

    lam_full = np.zeros(p.offsets.size)
    for k, i in enumerate(W):
        lam_full[rows[i]] = lam[k] / norms[rows[i]]
    active = tuple(sorted(int(rows[i]) for i in W))
    return SolveOutcome(Status.OPTIMAL, point=x, value=p.objective(x), active_rows=active,
                        multipliers=lam_full, iterations=it + 1)
