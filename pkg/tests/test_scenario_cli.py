import csv
import dataclasses
import io

import numpy as np
import pytest

from mpckit import set_equal
from mpckit.cli import main
from mpckit.polytope import from_text
from mpckit.scenario import (ScenarioError, bundled_scenarios, format_scenario, load_scenario,
                             parse_scenario, read_scenario_text)

from conftest import DATA

BASE = """\
A = [[1.0, 0.05], [0.0, 1.0]]
B = [[0.0], [0.05]]
N = 5
Q = [[1, 0], [0, 1]]
R = [[1]]
F = [[1, 0], [-1, 0], [0, 1], [0, -1]]
f = [10, 10, 10, 10]
G = [[1], [-1]]
g = [20, 20]
x0 = [0, 10]
steps = 20
"""


def fields_equal(a, b):
    for f in dataclasses.fields(a):
        if not f.compare:
            continue
        u, v = getattr(a, f.name), getattr(b, f.name)
        if isinstance(u, np.ndarray) or isinstance(v, np.ndarray):
            if u is None or v is None or not np.array_equal(u, v):
                return False
        elif u != v:
            return False
    return True


def read_trace(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_bundled_scenarios_parse():
    assert bundled_scenarios() == ["loss_of_feasibility.scn", "recursive_feasibility.scn",
                                   "regulation.scn"]
    s = load_scenario("regulation.scn")
    assert s.N == 10
    np.testing.assert_array_equal(s.x0, [0.0, 10.0])
    np.testing.assert_array_equal(s.A, [[1.0, 0.05], [0.0, 1.0]])
    np.testing.assert_array_equal(s.B, [[0.0], [0.05]])


def test_missing_key_is_named():
    text = "\n".join(l for l in BASE.splitlines() if not l.startswith("B "))
    with pytest.raises(ScenarioError) as err:
        parse_scenario(text)
    assert err.value.key == "B"
    assert "'B'" in str(err.value)


def test_zero_horizon():
    with pytest.raises(ScenarioError, match="horizon must be ≥ 1") as err:
        parse_scenario(BASE.replace("N = 5", "N = 0"))
    assert err.value.line == 3 and err.value.key == "N"


@pytest.mark.parametrize("extra", ["colour = red", "N = 6", "just some words"])
def test_rejected_lines(extra):
    with pytest.raises(ScenarioError) as err:
        parse_scenario(BASE + extra + "\n")
    assert err.value.line == 12


def test_bad_shapes():
    with pytest.raises(ScenarioError, match="columns"):
        parse_scenario(BASE.replace("G = [[1], [-1]]", "G = [[1, 0], [-1, 0]]"))
    with pytest.raises(ScenarioError, match="origin"):
        parse_scenario(BASE.replace("f = [10, 10, 10, 10]", "f = [-1, 10, 10, 10]"))


def test_row_vector_input_matrix():
    s = parse_scenario(BASE.replace("B = [[0.0], [0.05]]", "B = [0.0, 0.05]"))
    np.testing.assert_array_equal(s.B, [[0.0], [0.05]])


@pytest.mark.parametrize("name", ["regulation.scn", "loss_of_feasibility.scn",
                                  "recursive_feasibility.scn"])
def test_round_trip_bundled(name):
    s = load_scenario(name)
    assert fields_equal(parse_scenario(format_scenario(s)), s)


def test_round_trip_with_optional_fields():
    text = BASE + """\
name = tracking
Qf = [[2, 0.5], [0.5, 3]]
terminal_mode = explicit
Ff = [[1, 0], [-1, 0], [0, 1], [0, -1]]
ff = [1, 1, 1, 1]
reference = equilibrium
x_eq = [0.3, 0]
snapshots = [1, 2]
max_iter = 40
"""
    s = parse_scenario(text)
    assert s.terminal_mode == "explicit" and s.reference == "equilibrium"
    assert fields_equal(parse_scenario(format_scenario(s)), s)


def test_non_equilibrium_reference_rejected():
    with pytest.raises(ScenarioError, match="equilibrium"):
        parse_scenario(BASE + "reference = equilibrium\nx_eq = [0, 1]\n")


def test_read_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        read_scenario_text(tmp_path / "nope.scn")


# --- command line --------------------------------------------------------

def run(argv):
    out = io.StringIO()
    code = main(argv, out=out)
    return code, out.getvalue()


def test_cli_dare():
    code, text = run(["dare", "regulation.scn"])
    assert code == 0
    lines = text.splitlines()
    assert lines[0] == "Qf" and lines[1] == "rows 2 cols 2"
    Qf = np.array([[float(v) for v in line.split()] for line in lines[2:4]])
    np.testing.assert_array_equal(np.round(Qf, 1), [[35.7, 20.9], [20.9, 36.2]])


def test_cli_usage_errors(tmp_path):
    assert run([])[0] == 1
    assert run(["dare", str(tmp_path / "missing.scn")])[0] == 1
    bad = tmp_path / "bad.scn"
    bad.write_text(BASE.replace("N = 5", "N = 0"))
    assert run(["simulate", str(bad)])[0] == 1


def test_cli_terminal_and_feasible_set(tmp_path, terminal):
    code, text = run(["terminal-set", "recursive_feasibility.scn", "--out", str(tmp_path)])
    assert code == 0
    K = from_text(text)
    assert set_equal(K, terminal.set)
    assert (tmp_path / "terminal_set_iterations.csv").read_text().startswith("iteration,rows,converged")
    code, text = run(["feasible-set", "recursive_feasibility.scn"])
    assert code == 0 and set_equal(from_text(text), terminal.set)


def test_cli_loss_of_feasibility(tmp_path):
    code, _ = run(["simulate", "loss_of_feasibility.scn", "--out", str(tmp_path)])
    assert code == 2
    rows = read_trace(tmp_path / "trace.csv")
    assert len(rows) <= 11
    assert rows[-1]["feasible"] == "0" and rows[-1]["u1"] == ""


def test_cli_recursive_feasibility(tmp_path, reference_inputs):
    code, _ = run(["simulate", "recursive_feasibility.scn", "--out", str(tmp_path),
                   "--snapshots", "0,4"])
    assert code == 0
    rows = read_trace(tmp_path / "trace.csv")
    u = np.array([float(r["u1"]) for r in rows if r["u1"]])
    assert u.size == 100
    np.testing.assert_allclose(u[:9], -20.0, atol=1e-6)
    np.testing.assert_allclose(u, reference_inputs, atol=1e-3)
    assert (tmp_path / "prediction_0.csv").exists() and (tmp_path / "prediction_4.csv").exists()
    header = (tmp_path / "prediction_0.csv").read_text().splitlines()[0]
    assert header == "i,x1,x2"


def test_cli_regulation_costs(tmp_path):
    code, _ = run(["simulate", "regulation.scn", "--out", str(tmp_path)])
    assert code == 0
    rows = read_trace(tmp_path / "trace.csv")
    assert list(rows[0]) == ["k", "x1", "x2", "u1", "cost", "feasible"]
    costs = np.array([float(r["cost"]) for r in rows if r["cost"]])
    assert np.all(np.diff(costs) <= 1e-6)


def test_cli_output_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run(["simulate", "regulation.scn", "--out", str(a), "--snapshots", "3"])
    run(["simulate", "regulation.scn", "--out", str(b), "--snapshots", "3"])
    for name in ("trace.csv", "prediction_3.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_cli_trace_matches_frozen_reference_data(tmp_path):
    ref_states = np.loadtxt(DATA / "loss_of_feasibility_states.csv", delimiter=",", skiprows=1)
    scn = tmp_path / "lof.scn"
    scn.write_text(read_scenario_text("loss_of_feasibility.scn").replace("7.3", "7.24"))
    assert run(["simulate", str(scn), "--out", str(tmp_path)])[0] == 2
    rows = read_trace(tmp_path / "trace.csv")
    x = np.array([[float(r["x1"]), float(r["x2"])] for r in rows[:5]])
    np.testing.assert_allclose(x, ref_states[:, 1:], atol=1e-12)
