import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mpckit import LpProblem, QpProblem, Status, check_kkt, solve_lp, solve_qp
from mpckit.lp import lp_maximize, max_violation, simplex_standard
from mpckit.qp import QpCyclingError

from oracles import lp_by_vertices, qp_by_enumeration, random_polytope


# --- LP ---------------------------------------------------------------

def test_lp_interval():
    out = solve_lp(LpProblem([-1.0], [[1.0], [-1.0]], [1.0, 0.0]))
    assert out.status is Status.OPTIMAL
    assert out.point == pytest.approx([1.0])
    assert out.value == pytest.approx(-1.0)


def test_lp_infeasible_has_farkas_certificate():
    A = np.array([[1.0], [-1.0]])
    b = np.array([0.0, -1.0])
    out = solve_lp(LpProblem([1.0], A, b))
    assert out.status is Status.INFEASIBLE
    y = out.certificate
    assert np.all(y >= -1e-12)
    np.testing.assert_allclose(A.T @ y, 0.0, atol=1e-12)
    assert b @ y < 0


def test_lp_unbounded():
    out = solve_lp(LpProblem([-1.0, 0.0], [[0.0, 1.0], [0.0, -1.0]], [1.0, 1.0]))
    assert out.status is Status.UNBOUNDED


def test_lp_no_rows():
    assert solve_lp(LpProblem([0.0, 0.0], np.zeros((0, 2)), [])).status is Status.OPTIMAL
    assert solve_lp(LpProblem([1.0, 0.0], np.zeros((0, 2)), [])).status is Status.UNBOUNDED


def test_lp_matches_vertices_2d():
    rng = np.random.default_rng(0)
    for _ in range(20):
        A, b = random_polytope(rng, 2, 6)
        c = np.array([-1.0, -1.0])
        out = solve_lp(LpProblem(c, A, b))
        assert out.value == pytest.approx(lp_by_vertices(c, A, b), abs=1e-8)
        # returned point is a feasible vertex achieving the value
        assert np.all(A @ out.point <= b + 1e-9)
        assert c @ out.point == pytest.approx(out.value, abs=1e-9)


def test_lp_degenerate_vertex():
    # many constraints through the optimum; Bland's rule must not cycle
    angles = np.linspace(0, np.pi / 2, 9)
    A = np.vstack([np.column_stack([np.cos(angles), np.sin(angles)]), -np.eye(2)])
    b = np.concatenate([np.cos(angles) + np.sin(angles), [0, 0]])
    out = solve_lp(LpProblem([-1.0, -1.0], A, b))
    assert out.point == pytest.approx([1.0, 1.0])


def test_simplex_standard_form():
    # min -x1 - 2 x2, x1 + x2 + s = 4, x >= 0
    res = simplex_standard(np.array([[1.0, 1.0, 1.0]]), np.array([4.0]), np.array([-1.0, -2.0, 0.0]))
    assert res.status is Status.OPTIMAL
    np.testing.assert_allclose(res.y, [0, 4, 0], atol=1e-12)


def test_max_violation():
    t, _ = max_violation(np.array([[1.0], [-1.0]]), np.array([1.0, 1.0]))
    assert t == pytest.approx(-1.0)
    t, _ = max_violation(np.array([[1.0], [-1.0]]), np.array([0.0, -2.0]))
    assert t == pytest.approx(1.0)


def test_lp_maximize_values():
    A = np.vstack([np.eye(2), -np.eye(2)])
    status, value = lp_maximize([1.0, 1.0], A, np.ones(4))
    assert status is Status.OPTIMAL and value == pytest.approx(2.0)
    status, value = lp_maximize([1.0, 0.0], A[[1, 2, 3]], np.ones(3))
    assert status is Status.UNBOUNDED and value == np.inf


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 4))
def test_lp_property_vs_vertices(seed, n):
    rng = np.random.default_rng(seed)
    A, b = random_polytope(rng, n, 5)
    c = rng.normal(size=n)
    assert solve_lp(LpProblem(c, A, b)).value == pytest.approx(lp_by_vertices(c, A, b), abs=1e-8)


# --- QP ---------------------------------------------------------------

def test_qp_unconstrained_parabola():
    out = solve_qp(QpProblem([[1.0]], [3.0], np.zeros((0, 1)), []))
    assert out.point == pytest.approx([-3.0])
    assert out.value == pytest.approx(-9.0)
    assert out.active_rows == ()


def test_qp_clipped_at_bound():
    p = QpProblem([[1.0]], [3.0], [[-1.0]], [1.0])
    out = solve_qp(p)
    assert out.point == pytest.approx([-1.0])
    assert out.value == pytest.approx(-5.0)
    rep = check_kkt(p, out)
    assert rep.stationarity == pytest.approx(0.0, abs=1e-12)
    assert rep.violation == pytest.approx(0.0, abs=1e-12)
    assert rep.min_multiplier == pytest.approx(4.0)


def test_qp_unconstrained_kkt():
    p = QpProblem(np.diag([2.0, 1.0]), [1.0, -1.0], [[1.0, 0.0]], [10.0])
    out = solve_qp(p)
    rep = check_kkt(p, out)
    assert out.active_rows == ()
    assert rep.stationarity <= 1e-12


def test_qp_infeasible():
    out = solve_qp(QpProblem([[1.0]], [0.0], [[1.0], [-1.0]], [0.0, -1.0]))
    assert out.status is Status.INFEASIBLE


def test_qp_rejects_indefinite_and_asymmetric():
    with pytest.raises(ValueError):
        QpProblem([[1.0, 0.0], [0.0, -1.0]], [0, 0], np.zeros((0, 2)), [])
    with pytest.raises(ValueError):
        QpProblem([[1.0, 0.5], [0.0, 1.0]], [0, 0], np.zeros((0, 2)), [])


def test_qp_box_three_vars_vs_enumeration():
    rng = np.random.default_rng(3)
    A = np.vstack([np.eye(3), -np.eye(3)])
    for _ in range(30):
        M = rng.normal(size=(3, 3))
        H = M @ M.T + 0.1 * np.eye(3)
        f = rng.normal(size=3) * 4
        b = rng.uniform(0.2, 2.0, size=6)
        p = QpProblem(H, f, A, b)
        out = solve_qp(p)
        x_ref, v_ref = qp_by_enumeration(H, f, A, b)
        np.testing.assert_allclose(out.point, x_ref, atol=1e-7)
        assert out.value == pytest.approx(v_ref, abs=1e-7)
        assert check_kkt(p, out).within()


def test_qp_same_answer_from_any_hint():
    rng = np.random.default_rng(4)
    A, b = random_polytope(rng, 3, 6)
    H = np.diag([1.0, 2.0, 3.0])
    f = np.array([5.0, -4.0, 3.0])
    p = QpProblem(H, f, A, b)
    base = solve_qp(p)
    for hint in (np.zeros(3), np.array([0.1, -0.2, 0.3]), np.array([50.0, 50.0, 50.0])):
        np.testing.assert_allclose(solve_qp(p, x0_hint=hint).point, base.point, atol=1e-9)


def test_qp_degenerate_active_rows():
    # duplicated and dependent constraints at the solution
    A = np.array([[1.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    b = np.array([-1.0, -1.0, -2.0, -1.0])
    p = QpProblem(np.eye(2), [0.0, 0.0], A, b)
    out = solve_qp(p)
    np.testing.assert_allclose(out.point, [-1.0, -1.0], atol=1e-10)
    assert check_kkt(p, out).within()


def test_qp_cycling_error_is_importable():
    assert issubclass(QpCyclingError, RuntimeError)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 4))
def test_qp_property_kkt_and_oracle(seed, n):
    rng = np.random.default_rng(seed)
    M = rng.normal(size=(n, n))
    H = M @ M.T + 0.05 * np.eye(n)
    f = rng.normal(size=n) * 3
    A, b = random_polytope(rng, n, 4)
    p = QpProblem(H, f, A, b)
    out = solve_qp(p)
    assert check_kkt(p, out).within()
    assert out.value == pytest.approx(qp_by_enumeration(H, f, A, b)[1], abs=1e-7)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_qp_small_regularization_is_continuous(seed):
    # adding eps*I to H moves the optimum by O(eps)
    rng = np.random.default_rng(seed)
    M = rng.normal(size=(3, 3))
    H = M @ M.T + 0.5 * np.eye(3)
    f = rng.normal(size=3)
    A, b = random_polytope(rng, 3, 4)
    x1 = solve_qp(QpProblem(H, f, A, b)).point
    x2 = solve_qp(QpProblem(H + 1e-9 * np.eye(3), f, A, b)).point
    np.testing.assert_allclose(x1, x2, atol=1e-6)
