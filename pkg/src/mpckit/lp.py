"""Dense linear programming by a two-phase tableau simplex.

Problems are posed in inequality form ``min c'x s.t. A x <= b`` with ``x``
free. Internally the solver works on the dual standard-form problem
``min b'y s.t. A'y = -c, y >= 0``, whose tableau has only ``len(x) + 1`` rows.
The primal point is read off the simplex multipliers of the final dual
basis, so it is always a vertex of the feasible set.

Primal feasibility is decided first by minimizing the largest constraint
violation ``t`` over ``A x - t <= b``; a positive optimum above ``tol_feas``
marks the problem infeasible and the dual optimum of that problem is kept
as a Farkas certificate.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

TOL_FEAS = 1e-8
TOL_PIVOT = 1e-11


class Status(enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


@dataclass(frozen=True)
class SolveOutcome:
    """Result of an LP or QP solve.

    ``point`` and ``value`` are ``None`` unless the status is optimal.
    ``multipliers`` holds one nonnegative entry per constraint row when
    available. ``certificate`` is a Farkas witness ``y >= 0`` with
    ``A'y = 0`` and ``b'y < 0``, set only for infeasible problems.
    """

    status: Status
    point: np.ndarray | None = None
    value: float | None = None
    active_rows: tuple[int, ...] = ()
    multipliers: np.ndarray | None = None
    certificate: np.ndarray | None = None
    phase1_value: float | None = None
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


@dataclass(frozen=True)
class LpProblem:
    """``min cost'x`` subject to ``normals x <= offsets``."""

    cost: np.ndarray
    normals: np.ndarray
    offsets: np.ndarray

    def __post_init__(self):
        cost = np.asarray(self.cost, dtype=float).reshape(-1)
        normals = np.asarray(self.normals, dtype=float)
        if normals.ndim == 1:
            normals = normals.reshape(-1, cost.size) if normals.size else np.zeros((0, cost.size))
        offsets = np.asarray(self.offsets, dtype=float).reshape(-1)
        if normals.shape[1] != cost.size:
            raise ValueError(
                f"cost has {cost.size} entries but normals have {normals.shape[1]} columns")
        if normals.shape[0] != offsets.size:
            raise ValueError(
                f"normals have {normals.shape[0]} rows but offsets have {offsets.size} entries")
        object.__setattr__(self, "cost", cost)
        object.__setattr__(self, "normals", normals)
        object.__setattr__(self, "offsets", offsets)


@dataclass
class _StandardResult:
    status: Status
    y: np.ndarray | None = None
    basis: list[int] = field(default_factory=list)
    pivots: int = 0


def _pivot(T, r, j):
    T[r] /= T[r, j]
    col = T[:, j].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r])


def _run_simplex(T, basis, ncols, tol):
    """Bland's-rule pivoting on tableau ``T`` (last row = reduced costs,
    last column = right-hand side). Columns ``>= ncols`` never enter."""
    pivots = 0
    m = T.shape[0] - 1
    while True:
        red = T[-1, :ncols]
        cand = np.flatnonzero(red < -tol)
        if cand.size == 0:
            return Status.OPTIMAL, pivots
        j = int(cand[0])
        col = T[:m, j]
        pos = np.flatnonzero(col > tol)
        if pos.size == 0:
            return Status.UNBOUNDED, pivots
        ratios = T[pos, -1] / col[pos]
        best = ratios.min()
        ties = pos[ratios <= best + 1e-12 * max(1.0, abs(best))]
        r = int(min(ties, key=lambda i: basis[i]))
        _pivot(T, r, j)
        basis[r] = j
        pivots += 1


def simplex_standard(A, b, c, tol: float = TOL_PIVOT, tol_feas: float = TOL_FEAS) -> _StandardResult:
    """Two-phase simplex for ``min c'y s.t. A y = b, y >= 0``."""
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    c = np.asarray(c, dtype=float)
    m, n = A.shape
    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0

    # phase 1: artificial identity block, minimize their sum
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    T[-1, :n] = -A.sum(axis=0)
    T[-1, -1] = -b.sum()
    basis = list(range(n, n + m))
    _, pivots = _run_simplex(T, basis, n, tol)
    scale = max(1.0, float(np.abs(b).max(initial=0.0)))
    if -T[-1, -1] > tol_feas * scale:
        return _StandardResult(Status.INFEASIBLE, pivots=pivots)

    # drive remaining artificials out of the basis; drop rows that are redundant
    keep = []
    for r in range(m):
        if basis[r] >= n:
            nz = np.flatnonzero(np.abs(T[r, :n]) > 1e-9)
            if nz.size:
                _pivot(T, r, int(nz[0]))
                basis[r] = int(nz[0])
                pivots += 1
            else:
                continue
        keep.append(r)
    T = np.vstack([T[keep][:, list(range(n)) + [n + m]], np.zeros((1, n + 1))])
    basis = [basis[r] for r in keep]

    # phase 2
    cb = c[basis]
    T[-1, :n] = c - cb @ T[:-1, :n]
    T[-1, -1] = -cb @ T[:-1, -1]
    status, p2 = _run_simplex(T, basis, n, tol)
    pivots += p2
    if status is Status.UNBOUNDED:
        return _StandardResult(Status.UNBOUNDED, basis=basis, pivots=pivots)
    y = np.zeros(n)
    y[basis] = T[:-1, -1]
    return _StandardResult(Status.OPTIMAL, y=y, basis=basis, pivots=pivots)


def _normalize(normals, offsets):
    norms = np.linalg.norm(normals, axis=1)
    zero = norms <= 1e-14
    scale = np.where(zero, 1.0, norms)
    return normals / scale[:, None], offsets / scale, zero, scale


def max_violation(normals, offsets):
    """Phase-1 problem ``min t s.t. A x - t <= b`` solved through its dual.

    Returns ``(t*, y)``: ``t*`` is ``-inf`` when the violation can be driven
    arbitrarily negative (the set has interior and is unbounded in some
    sense), and ``y`` is the dual optimizer (a Farkas witness when
    ``t* > 0``), or ``None`` when ``t* = -inf``.
    """
    A = np.asarray(normals, dtype=float)
    b = np.asarray(offsets, dtype=float)
    m, d = A.shape
    if m == 0:
        return -np.inf, None
    Aeq = np.vstack([A.T, np.ones((1, m))])
    beq = np.zeros(d + 1)
    beq[-1] = 1.0
    res = simplex_standard(Aeq, beq, b)
    if res.status is Status.INFEASIBLE:
        return -np.inf, None
    y = res.y
    return float(-(b @ y)), y


def solve_lp(p: LpProblem, tol_feas: float = TOL_FEAS) -> SolveOutcome:
    """Minimize ``p.cost @ x`` over ``p.normals @ x <= p.offsets``.

    >>> out = solve_lp(LpProblem([-1.0], [[1.0], [-1.0]], [1.0, 0.0]))
    >>> out.status.value, float(out.point[0]), out.value
    ('Optimal', 1.0, -1.0)
    """
    A, b, zero, scale = _normalize(p.normals, p.offsets)
    d = p.cost.size
    if np.any(b[zero] < -tol_feas):
        i = int(np.flatnonzero(zero & (b < -tol_feas))[0])
        cert = np.zeros(b.size)
        cert[i] = 1.0
        return SolveOutcome(Status.INFEASIBLE, certificate=cert, phase1_value=float(-b[i]))
    rows = np.flatnonzero(~zero)
    A, b = A[rows], b[rows]

    t, y1 = max_violation(A, b)
    if t > tol_feas:
        cert = np.zeros(p.offsets.size)
        cert[rows] = y1 / scale[rows]
        return SolveOutcome(Status.INFEASIBLE, certificate=cert, phase1_value=t)

    if rows.size == 0:
        if np.any(p.cost != 0):
            return SolveOutcome(Status.UNBOUNDED, phase1_value=t)
        x = np.zeros(d)
        return SolveOutcome(Status.OPTIMAL, point=x, value=0.0, phase1_value=t,
                            multipliers=np.zeros(p.offsets.size))

    res = simplex_standard(A.T, -p.cost, b)
    if res.status is Status.INFEASIBLE:
        return SolveOutcome(Status.UNBOUNDED, phase1_value=t, iterations=res.pivots)
    if res.status is Status.UNBOUNDED:
        # dual unbounded below means the primal has no feasible point
        return SolveOutcome(Status.INFEASIBLE, phase1_value=t, iterations=res.pivots)

    B = A[res.basis]
    x, *_ = np.linalg.lstsq(B, b[res.basis], rcond=None)
    # polish: the multipliers of the dual basis solve B x = b_B exactly
    slack = b - A @ x
    active = tuple(int(rows[i]) for i in np.flatnonzero(np.abs(slack) <= 1e-9 * max(1.0, np.abs(b).max())))
    lam = np.zeros(p.offsets.size)
    lam[rows] = res.y / scale[rows]
    return SolveOutcome(Status.OPTIMAL, point=x, value=float(p.cost @ x), active_rows=active,
                        multipliers=lam, phase1_value=t, iterations=res.pivots)


def lp_maximize(direction, normals, offsets):
    """Support function value ``max direction'x`` over ``normals x <= offsets``.

    Returns ``(status, value)``; ``value`` is ``+inf`` when unbounded and
    ``None`` when infeasible.
    """
    out = solve_lp(LpProblem(-np.asarray(direction, dtype=float), normals, offsets))
    if out.status is Status.OPTIMAL:
        return out.status, -out.value
    if out.status is Status.UNBOUNDED:
        return out.status, np.inf
    return out.status, None
