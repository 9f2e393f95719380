"""H-representation polyhedra ``{x | F x <= f}`` and their set algebra.

Every row is scaled to a unit-norm normal on construction, so offsets are
signed distances and tolerances are geometric. Equalities are stored as two
opposing inequalities. Projections use Fourier-Motzkin elimination with LP
redundancy removal after each eliminated variable.
"""

from __future__ import annotations

import numpy as np

from .lp import TOL_FEAS, LpProblem, Status, lp_maximize, max_violation, solve_lp

TOL_SET = 1e-6
PROJECTION_ROW_CAP = 20000


class ProjectionBlowupError(RuntimeError):
    pass


class HPolyhedron:
    """Immutable polyhedron ``{x in R^dim | normals @ x <= offsets}``.

    Zero rows with a nonnegative offset are dropped. A zero row with a
    negative offset makes the set empty; build such sets with
    :meth:`empty` instead.
    """

    __slots__ = ("normals", "offsets", "dim", "_empty")

    def __init__(self, normals, offsets, dim: int | None = None):
        offsets = np.asarray(offsets, dtype=float).reshape(-1)
        normals = np.asarray(normals, dtype=float)
        if normals.size == 0:
            if dim is None:
                raise ValueError("dim is required for a polyhedron without rows")
            normals = normals.reshape(0, dim)
        normals = np.atleast_2d(normals)
        if dim is None:
            dim = normals.shape[1]
        if normals.ndim != 2 or normals.shape[1] != dim:
            raise ValueError(f"normals must have {dim} columns, got shape {normals.shape}")
        if normals.shape[0] != offsets.size:
            raise ValueError(
                f"normals have {normals.shape[0]} rows but offsets have {offsets.size} entries")
        if dim < 1:
            raise ValueError("dimension must be positive")
        norms = np.linalg.norm(normals, axis=1)
        zero = norms <= 1e-12
        if np.any(offsets[zero] < -TOL_FEAS):
            raise ValueError("contradictory zero row; use HPolyhedron.empty(dim)")
        keep = ~zero
        A = normals[keep] / norms[keep, None]
        b = offsets[keep] / norms[keep]
        A.setflags(write=False)
        b.setflags(write=False)
        self.normals = A
        self.offsets = b
        self.dim = int(dim)
        self._empty = False

    @classmethod
    def empty(cls, dim: int) -> "HPolyhedron":
        """Explicit empty set: ``x_1 <= -1`` and ``-x_1 <= -1``."""
        e = np.zeros((2, dim))
        e[0, 0], e[1, 0] = 1.0, -1.0
        P = cls(e, [-1.0, -1.0])
        P._empty = True
        return P

    @classmethod
    def box(cls, lower, upper) -> "HPolyhedron":
        lower = np.atleast_1d(np.asarray(lower, dtype=float))
        upper = np.atleast_1d(np.asarray(upper, dtype=float))
        n = lower.size
        rows, offs = [], []
        for i in range(n):
            e = np.zeros(n)
            e[i] = 1.0
            rows += [e, -e]
            offs += [upper[i], -lower[i]]
        return cls(np.array(rows), offs)

    @classmethod
    def symmetric_box(cls, bounds) -> "HPolyhedron":
        bounds = np.atleast_1d(np.asarray(bounds, dtype=float))
        return cls.box(-bounds, bounds)

    @classmethod
    def origin(cls, dim: int) -> "HPolyhedron":
        """The singleton ``{0}`` as paired inequalities."""
        return cls.box(np.zeros(dim), np.zeros(dim))

    @classmethod
    def _from_rows(cls, normals, offsets, dim) -> "HPolyhedron":
        normals = np.asarray(normals, dtype=float).reshape(-1, dim)
        offsets = np.asarray(offsets, dtype=float).reshape(-1)
        norms = np.linalg.norm(normals, axis=1)
        if np.any((norms <= 1e-12) & (offsets < -TOL_FEAS)):
            return cls.empty(dim)
        return cls(normals, offsets, dim)

    @property
    def n_rows(self) -> int:
        return self.offsets.size

    @property
    def is_marked_empty(self) -> bool:
        return self._empty

    def __repr__(self):
        tag = " empty" if self._empty else ""
        return f"HPolyhedron(dim={self.dim}, rows={self.n_rows}{tag})"

    def __contains__(self, x):
        return contains(self, x)

    def to_text(self) -> str:
        return to_text(self)


def _check_dims(P, Q):
    if P.dim != Q.dim:
        raise ValueError(f"dimension mismatch: {P.dim} vs {Q.dim}")


def contains(P: HPolyhedron, x, tol: float = TOL_FEAS) -> bool:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != P.dim:
        raise ValueError(f"point has dimension {x.size}, polyhedron has {P.dim}")
    if P.n_rows == 0:
        return True
    return bool(np.all(P.normals @ x <= P.offsets + tol))


def is_empty(P: HPolyhedron, tol: float = TOL_FEAS) -> bool:
    if P._empty:
        return True
    if P.n_rows == 0:
        return False
    t, _ = max_violation(P.normals, P.offsets)
    return t > tol


def _dedupe(A, b, decimals=12):
    """Among rows with identical (rounded) normals keep the tightest."""
    if A.shape[0] < 2:
        return A, b
    key = np.round(A, decimals) + 0.0
    _, first, inverse = np.unique(key, axis=0, return_index=True, return_inverse=True)
    inverse = inverse.reshape(-1)
    tight = np.full(first.size, np.inf)
    np.minimum.at(tight, inverse, b)
    order = np.argsort(first)
    return A[first[order]], tight[order]


def _irredundant_rows(A, b, tol):
    """Indices of a minimal row subset describing the same (nonempty) set."""
    keep = np.ones(A.shape[0], dtype=bool)
    for i in range(A.shape[0]):
        keep[i] = False
        others = np.flatnonzero(keep)
        # cap the tested row loosely so the LP stays bounded
        rows = np.vstack([A[others], A[i]])
        offs = np.concatenate([b[others], [b[i] + 1.0]])
        status, value = lp_maximize(A[i], rows, offs)
        if status is not Status.OPTIMAL:
            raise RuntimeError(f"redundancy LP for row {i} returned {status.value}")
        if value > b[i] + tol:
            keep[i] = True
    return np.flatnonzero(keep)


def remove_redundant(P: HPolyhedron, tol: float = TOL_FEAS) -> HPolyhedron:
    """Drop every row that can be removed without enlarging the set."""
    if P._empty or is_empty(P):
        return HPolyhedron.empty(P.dim)
    if P.n_rows <= 1:
        return P
    A, b = _dedupe(P.normals, P.offsets)
    keep = _irredundant_rows(A, b, tol)
    return HPolyhedron(A[keep], b[keep], P.dim)


def intersect(P: HPolyhedron, Q: HPolyhedron) -> HPolyhedron:
    _check_dims(P, Q)
    if P._empty or Q._empty:
        return HPolyhedron.empty(P.dim)
    R = HPolyhedron(np.vstack([P.normals, Q.normals]),
                    np.concatenate([P.offsets, Q.offsets]), P.dim)
    return remove_redundant(R)


def affine_preimage(P: HPolyhedron, M) -> HPolyhedron:
    """``{x | M x in P}``."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.shape[0] != P.dim:
        raise ValueError(f"map has {M.shape[0]} rows, polyhedron has dimension {P.dim}")
    if P._empty:
        return HPolyhedron.empty(M.shape[1])
    return HPolyhedron._from_rows(P.normals @ M, P.offsets, M.shape[1])


def _eliminate(A, b, j, tol_eq=1e-10):
    """Fourier-Motzkin step removing column ``j`` from ``A x <= b``.

    An implicit equality (a row together with its exact negation) that
    involves ``x_j`` is used to substitute ``x_j`` instead of pairing rows.
    """
    col = A[:, j]
    nz = np.flatnonzero(np.abs(col) > 1e-12)
    for i in nz:
        partner = np.flatnonzero((np.abs(A + A[i]).max(axis=1) <= tol_eq)
                                 & (np.abs(b + b[i]) <= tol_eq))
        if partner.size:
            # x_j = (b_i - A_i,-j x_-j) / A_ij on the hyperplane
            factor = col / col[i]
            A2 = A - np.outer(factor, A[i])
            b2 = b - factor * b[i]
            drop = np.zeros(A.shape[0], dtype=bool)
            drop[i] = True
            drop[partner] = True
            A2 = np.delete(A2[~drop], j, axis=1)
            return A2, b2[~drop]
    pos = np.flatnonzero(col > 1e-12)
    neg = np.flatnonzero(col < -1e-12)
    zer = np.flatnonzero(np.abs(col) <= 1e-12)
    Ap = A[pos] / col[pos, None]
    bp = b[pos] / col[pos]
    An = A[neg] / -col[neg, None]
    bn = b[neg] / -col[neg]
    comb_A = (Ap[:, None, :] + An[None, :, :]).reshape(-1, A.shape[1])
    comb_b = (bp[:, None] + bn[None, :]).reshape(-1)
    A2 = np.vstack([A[zer], comb_A])
    b2 = np.concatenate([b[zer], comb_b])
    return np.delete(A2, j, axis=1), b2


def _elimination_cost(A, b, j):
    col = A[:, j]
    npos = int(np.sum(col > 1e-12))
    nneg = int(np.sum(col < -1e-12))
    return npos * nneg


def fourier_motzkin_project(P: HPolyhedron, keep, row_cap: int = PROJECTION_ROW_CAP) -> HPolyhedron:
    """Orthogonal projection of ``P`` onto the coordinates listed in ``keep``.

    Coordinates are eliminated greedily, cheapest pair count first, and the
    intermediate system is pruned after every step.
    """
    keep = [int(k) for k in keep]
    if not keep or len(set(keep)) != len(keep) or any(k < 0 or k >= P.dim for k in keep):
        raise ValueError(f"invalid coordinate selection {keep} for dimension {P.dim}")
    if len(keep) == P.dim:
        raise ValueError("keep must be a strict subset of the coordinates")
    if P._empty or is_empty(P):
        return HPolyhedron.empty(len(keep))

    labels = list(range(P.dim))
    A, b = P.normals.copy(), P.offsets.copy()
    while len(labels) > len(keep):
        cands = [c for c, lab in enumerate(labels) if lab not in keep]
        j = min(cands, key=lambda c: (_elimination_cost(A, b, c), labels[c]))
        A, b = _eliminate(A, b, j)
        labels.pop(j)
        if A.shape[0] > row_cap:
            raise ProjectionBlowupError(
                f"Fourier-Motzkin produced {A.shape[0]} rows (cap {row_cap}) "
                f"with {len(labels)} coordinates left")
        A, b, status = _prune(A, b, len(labels))
        if status == "empty":
            return HPolyhedron.empty(len(keep))
    order = [labels.index(k) for k in keep]
    return HPolyhedron._from_rows(A[:, order], b, len(keep))


def _prune(A, b, dim):
    norms = np.linalg.norm(A, axis=1)
    zero = norms <= 1e-12
    if np.any(b[zero] < -TOL_FEAS):
        return A, b, "empty"
    A = A[~zero] / norms[~zero, None]
    b = b[~zero] / norms[~zero]
    if A.shape[0] == 0:
        return A, b, "ok"
    A, b = _dedupe(A, b)
    keep = _irredundant_rows(A, b, TOL_FEAS)
    return A[keep], b[keep], "ok"


def affine_image(M, P: HPolyhedron) -> HPolyhedron:
    """``{M u | u in P}`` via the lifted system ``y = M u``, ``u in P``."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.shape[1] != P.dim:
        raise ValueError(f"map has {M.shape[1]} columns, polyhedron has dimension {P.dim}")
    d, k = M.shape
    if P._empty:
        return HPolyhedron.empty(d)
    eye = np.eye(d)
    A = np.vstack([
        np.hstack([np.zeros((P.n_rows, d)), P.normals]),
        np.hstack([eye, -M]),
        np.hstack([-eye, M]),
    ])
    b = np.concatenate([P.offsets, np.zeros(2 * d)])
    lifted = HPolyhedron(A, b, d + k)
    return fourier_motzkin_project(lifted, range(d))


def minkowski_sum(P: HPolyhedron, Q: HPolyhedron) -> HPolyhedron:
    """``{p + q | p in P, q in Q}`` by eliminating ``q`` from
    ``F_P (x - q) <= f_P, F_Q q <= f_Q``."""
    _check_dims(P, Q)
    if P._empty or Q._empty or is_empty(P) or is_empty(Q):
        return HPolyhedron.empty(P.dim)
    d = P.dim
    A = np.vstack([
        np.hstack([P.normals, -P.normals]),
        np.hstack([np.zeros((Q.n_rows, d)), Q.normals]),
    ])
    b = np.concatenate([P.offsets, Q.offsets])
    lifted = HPolyhedron(A, b, 2 * d)
    return fourier_motzkin_project(lifted, range(d))


def is_subset(P: HPolyhedron, Q: HPolyhedron, tol: float = TOL_SET) -> bool:
    """True iff every row of ``Q`` holds over ``P`` within ``tol``."""
    _check_dims(P, Q)
    if P._empty or is_empty(P):
        return True
    if Q._empty:
        return False
    for g, h in zip(Q.normals, Q.offsets):
        status, value = lp_maximize(g, P.normals, P.offsets)
        if status is Status.INFEASIBLE:
            return True
        if value > h + tol:
            return False
    return True


def set_equal(P: HPolyhedron, Q: HPolyhedron, tol: float = TOL_SET) -> bool:
    return is_subset(P, Q, tol) and is_subset(Q, P, tol)


def chebyshev_center(P: HPolyhedron):
    """Center and radius of the largest inscribed ball (radius ``inf`` when
    unbounded, ``None`` center when empty)."""
    if P._empty:
        return None, -np.inf
    A = np.hstack([P.normals, np.ones((P.n_rows, 1))])
    cost = np.zeros(P.dim + 1)
    cost[-1] = -1.0
    cap = np.zeros((1, P.dim + 1))
    cap[0, -1] = -1.0
    out = solve_lp(LpProblem(cost, np.vstack([A, cap]), np.concatenate([P.offsets, [0.0]])))
    if out.status is Status.UNBOUNDED:
        return None, np.inf
    if out.status is not Status.OPTIMAL:
        return None, -np.inf
    return out.point[:-1], float(out.point[-1])


def to_text(P: HPolyhedron) -> str:
    """``dim k rows r`` header followed by ``r`` lines of ``k`` normal
    coefficients and the offset."""
    lines = [f"dim {P.dim} rows {P.n_rows}"]
    for a, b in zip(P.normals, P.offsets):
        lines.append(" ".join(f"{v + 0.0:.17g}" for v in (*a, b)))  # no "-0"
    return "\n".join(lines) + "\n"


def from_text(text: str) -> HPolyhedron:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty polyhedron text")
    head = lines[0].split()
    if len(head) != 4 or head[0] != "dim" or head[2] != "rows":
        raise ValueError(f"bad header line: {lines[0]!r}")
    dim, nrows = int(head[1]), int(head[3])
    if len(lines) - 1 != nrows:
        raise ValueError(f"header announces {nrows} rows, found {len(lines) - 1}")
    data = np.array([[float(v) for v in ln.split()] for ln in lines[1:]]).reshape(nrows, dim + 1)
    return HPolyhedron._from_rows(data[:, :dim], data[:, dim], dim)
