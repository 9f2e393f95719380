"""Terminal cost and LQR gain from the discrete algebraic Riccati equation.

Sign convention: ``K = (B'Qf B + R)^-1 B'Qf A`` is applied as ``u = -K x``,
so the closed loop is ``A - B K``. With that sign

    Q + K'RK - Qf + (A - BK)' Qf (A - BK) = 0

holds at the fixed point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class RiccatiConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class CostWeights:
    Q: np.ndarray
    R: np.ndarray

    def __post_init__(self):
        Q = np.atleast_2d(np.asarray(self.Q, dtype=float))
        R = np.atleast_2d(np.asarray(self.R, dtype=float))
        if Q.shape[0] != Q.shape[1] or R.shape[0] != R.shape[1]:
            raise ValueError("weights must be square")
        if np.abs(Q - Q.T).max() > 1e-10:
            raise ValueError("Q must be symmetric")
        if np.linalg.eigvalsh(Q).min() < -1e-10:
            raise ValueError("Q must be positive semidefinite")
        if np.abs(R - R.T).max() > 1e-10:
            raise ValueError("R must be symmetric")
        if np.linalg.eigvalsh(R).min() <= 0:
            raise ValueError("R must be positive definite")
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "R", R)


@dataclass(frozen=True)
class TerminalIngredients:
    Qf: np.ndarray
    K: np.ndarray
    residual: float
    closed_loop_spectral_radius: float
    iterations: int = 0
    step_norms: tuple = ()


def _system_matrices(sys):
    A = np.atleast_2d(np.asarray(sys.A, dtype=float))
    B = np.asarray(sys.B, dtype=float).reshape(A.shape[0], -1)
    return A, B


def lqr_gain(sys, Qf, w: CostWeights) -> np.ndarray:
    A, B = _system_matrices(sys)
    Qf = np.atleast_2d(np.asarray(Qf, dtype=float))
    return np.linalg.solve(B.T @ Qf @ B + w.R, B.T @ Qf @ A)


def riccati_residual(sys, w: CostWeights, Qf, K) -> float:
    A, B = _system_matrices(sys)
    Acl = A - B @ K
    res = w.Q + K.T @ w.R @ K - Qf + Acl.T @ Qf @ Acl
    return float(np.linalg.norm(res, "fro"))


def solve_dare(sys, w: CostWeights, tol: float = 1e-12, max_iter: int = 100_000) -> TerminalIngredients:
    """Value iteration ``P <- Q + A'PA - A'PB (B'PB + R)^-1 B'PA`` from ``P = Q``."""
    A, B = _system_matrices(sys)
    if w.Q.shape != A.shape or w.R.shape[0] != B.shape[1]:
        raise ValueError("weight dimensions do not match the system")
    P = w.Q.copy()
    steps = []
    for it in range(1, max_iter + 1):
        BtP = B.T @ P
        Pn = w.Q + A.T @ P @ A - A.T @ P @ B @ np.linalg.solve(BtP @ B + w.R, BtP @ A)
        Pn = 0.5 * (Pn + Pn.T)
        step = float(np.linalg.norm(Pn - P, "fro"))
        steps.append(step)
        P = Pn
        if step <= tol:
            break
    else:
        K = lqr_gain(sys, P, w)
        rho = float(np.abs(np.linalg.eigvals(A - B @ K)).max())
        raise RiccatiConvergenceError(
            f"Riccati iteration did not converge in {max_iter} steps "
            f"(last step {steps[-1]:.3e}, closed-loop spectral radius {rho:.6f})")
    K = lqr_gain(sys, P, w)
    rho = float(np.abs(np.linalg.eigvals(A - B @ K)).max())
    return TerminalIngredients(P, K, riccati_residual(sys, w, P, K), rho, it, tuple(steps))
