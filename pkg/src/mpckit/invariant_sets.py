"""Maximal stabilizing set of the origin and sets of feasible initial states."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .polytope import (PROJECTION_ROW_CAP, TOL_SET, HPolyhedron, affine_image, affine_preimage,
                       contains, fourier_motzkin_project, intersect, is_subset, minkowski_sum)

log = logging.getLogger(__name__)


@dataclass
class StabilizingSetResult:
    set: HPolyhedron
    iterations: int
    converged: bool
    history_sizes: list = field(default_factory=list)
    history: list = field(default_factory=list)


def one_step_backward(sys, S: HPolyhedron, X: HPolyhedron, neg_BU: HPolyhedron) -> HPolyhedron:
    """States of ``X`` that some admissible input steers into ``S``:
    ``((S + (-B U)) o A) & X``."""
    return intersect(affine_preimage(minkowski_sum(S, neg_BU), sys.A), X)


def max_stabilizing_set(sys, X: HPolyhedron, U: HPolyhedron, max_iter: int = 500,
                        tol: float = TOL_SET, keep_history: bool = False) -> StabilizingSetResult:
    """Iterate ``K_0 = {0}``, ``K_{i+1} = ((K_i + (-B U)) o A) & X`` to a fixed point.

    Convergence is two-sided containment within ``tol``. When ``max_iter``
    is hit the last iterate is returned with ``converged=False``.
    """
    if not contains(X, np.zeros(X.dim)) or not contains(U, np.zeros(U.dim)):
        raise ValueError("state and input sets must contain the origin")
    neg_BU = affine_image(-sys.B, U)
    K = HPolyhedron.origin(sys.n)
    sizes = [K.n_rows]
    history = [K] if keep_history else []
    for i in range(1, max_iter + 1):
        K_next = one_step_backward(sys, K, X, neg_BU)
        sizes.append(K_next.n_rows)
        if keep_history:
            history.append(K_next)
        done = is_subset(K_next, K, tol) and is_subset(K, K_next, tol)
        log.debug("iteration %d: %d rows, converged=%s", i, K_next.n_rows, done)
        K = K_next
        if done:
            return StabilizingSetResult(K, i, True, sizes, history)
    return StabilizingSetResult(K, max_iter, False, sizes, history)


def certify_control_invariant(sys, S: HPolyhedron, X: HPolyhedron, U: HPolyhedron,
                              tol: float = TOL_SET) -> bool:
    """True iff every point of ``S`` has an admissible successor in ``S``."""
    if not is_subset(S, X, tol):
        raise ValueError("candidate set is not contained in the state constraints")
    pre = affine_preimage(minkowski_sum(S, affine_image(-sys.B, U)), sys.A)
    return is_subset(S, pre, tol)


def feasible_initial_set(lifted, row_cap: int = PROJECTION_ROW_CAP) -> HPolyhedron:
    """Project ``{(x, U) | Ft calA x + Ft calB U <= ft, Gt U <= gt}`` onto ``x``."""
    n, mN = lifted.n, lifted.m * lifted.N
    top = np.hstack([lifted.Ftilde @ lifted.calA, lifted.Ftilde @ lifted.calB])
    bottom = np.hstack([np.zeros((lifted.Gtilde.shape[0], n)), lifted.Gtilde])
    joint = HPolyhedron(np.vstack([top, bottom]),
                        np.concatenate([lifted.ftilde, lifted.gtilde]), n + mN)
    return fourier_motzkin_project(joint, range(n), row_cap=row_cap)
