"""``mpckit`` command line: dare, terminal-set, feasible-set, simulate.

Exit codes: 0 success, 1 usage or parse error, 2 infeasible termination,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

import numpy as np

from .invariant_sets import feasible_initial_set, max_stabilizing_set
from .mpc import build_lifted, closed_loop_simulate
from .polytope import ProjectionBlowupError, to_text
from .qp import QpCyclingError
from .riccati import RiccatiConvergenceError, solve_dare
from .scenario import ScenarioError, load_scenario

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_NUMERICAL = 0, 1, 2, 3
NUMERICAL_ERRORS = (QpCyclingError, RiccatiConvergenceError, ProjectionBlowupError,
                    np.linalg.LinAlgError)

log = logging.getLogger("mpckit")


def fmt(v) -> str:
    return f"{float(v):.15g}"


def matrix_text(M) -> str:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    lines = [f"rows {M.shape[0]} cols {M.shape[1]}"]
    lines += [" ".join(fmt(v) for v in row) for row in M]
    return "\n".join(lines) + "\n"


def _open_out(out_dir, name):
    path = Path(out_dir) / name
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        return path.open("w", newline="")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def run_dare(s, out=sys.stdout, out_dir=None) -> int:
    res = solve_dare(s.system(), s.weights())
    text = ("Qf\n" + matrix_text(res.Qf) + "K\n" + matrix_text(res.K)
            + f"residual {res.residual:.6e}\nspectral_radius {fmt(res.closed_loop_spectral_radius)}\n")
    out.write(text)
    if out_dir is not None:
        with _open_out(out_dir, "dare.txt") as fh:
            fh.write(text)
    return EXIT_OK


def write_iteration_log(fh, res):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["iteration", "rows", "converged"])
    last = len(res.history_sizes) - 1
    for i, rows in enumerate(res.history_sizes):
        w.writerow([i, rows, int(res.converged and i == last)])


def run_terminal_set(s, out=sys.stdout, out_dir=None) -> int:
    res = max_stabilizing_set(s.system(), s.state_set(), s.input_set(), max_iter=s.max_iter)
    out.write(to_text(res.set))
    if out_dir is not None:
        with _open_out(out_dir, "terminal_set.txt") as fh:
            fh.write(to_text(res.set))
        with _open_out(out_dir, "terminal_set_iterations.csv") as fh:
            write_iteration_log(fh, res)
    else:
        write_iteration_log(sys.stderr, res)
    return EXIT_OK if res.converged else EXIT_NUMERICAL


def run_feasible_set(s, out=sys.stdout, out_dir=None) -> int:
    Xf, _ = s.terminal_set()
    XN = feasible_initial_set(build_lifted(s.config(Xf)))
    out.write(to_text(XN))
    if out_dir is not None:
        with _open_out(out_dir, "feasible_set.txt") as fh:
            fh.write(to_text(XN))
    return EXIT_OK


def write_trace(fh, trace, n, m):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["k"] + [f"x{i + 1}" for i in range(n)] + [f"u{j + 1}" for j in range(m)]
               + ["cost", "feasible"])
    for k, x in enumerate(trace.states):
        if k < len(trace.inputs):
            u = [fmt(v) for v in trace.inputs[k]]
            tail = [fmt(trace.costs[k]), 1]
        else:
            u = [""] * m
            infeasible_here = trace.terminated_infeasible
            tail = ["", 0 if infeasible_here else ""]
        w.writerow([k] + [fmt(v) for v in x] + u + tail)


def write_prediction(fh, X_pred):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["i"] + [f"x{j + 1}" for j in range(X_pred.shape[1])])
    for i, x in enumerate(X_pred):
        w.writerow([i] + [fmt(v) for v in x])


def run_simulate(s, out=sys.stdout, out_dir=None, snapshots=None):
    """Closed-loop run writing ``trace.csv`` and ``prediction_<k>.csv``.

    Returns ``(exit_code, trace)``.
    """
    out_dir = Path(out_dir if out_dir is not None else (s.out_dir or "."))
    snapshots = s.snapshots if snapshots is None else snapshots
    Xf, _ = s.terminal_set()
    cfg = s.config(Xf)
    trace = closed_loop_simulate(cfg, s.x0, s.steps, s.reference_source())
    n, m = cfg.sys.n, cfg.sys.m
    with _open_out(out_dir, "trace.csv") as fh:
        write_trace(fh, trace, n, m)
    for k in snapshots:
        if 0 <= k < len(trace.predictions):
            with _open_out(out_dir, f"prediction_{k}.csv") as fh:
                write_prediction(fh, trace.predictions[k])
        else:
            log.warning("snapshot %d not available (%d feasible steps)", k, trace.feasible_steps)
    status = "infeasible" if trace.terminated_infeasible else "completed"
    out.write(f"{s.name or 'scenario'}: {status} after {trace.feasible_steps} feasible steps\n")
    return (EXIT_INFEASIBLE if trace.terminated_infeasible else EXIT_OK), trace


def _snapshot_list(text):
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser():
    parser = argparse.ArgumentParser(prog="mpckit", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (("dare", "terminal cost and LQR gain"),
                        ("terminal-set", "maximal stabilizing set of the origin"),
                        ("feasible-set", "set of feasible initial states"),
                        ("simulate", "closed-loop receding-horizon run")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("scenario", help="scenario file (or name of a bundled scenario)")
        p.add_argument("--out", metavar="DIR", default=None, help="output directory")
        if name == "simulate":
            p.add_argument("--snapshots", type=_snapshot_list, default=None,
                           help="steps whose predictions are written, e.g. 0,4")
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        scenario = load_scenario(args.scenario)
    except (ScenarioError, FileNotFoundError) as exc:
        print(f"mpckit: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if args.command == "dare":
            return run_dare(scenario, out, args.out)
        if args.command == "terminal-set":
            return run_terminal_set(scenario, out, args.out)
        if args.command == "feasible-set":
            return run_feasible_set(scenario, out, args.out)
        code, _ = run_simulate(scenario, out, args.out, args.snapshots)
        return code
    except NUMERICAL_ERRORS as exc:
        print(f"mpckit: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"mpckit: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
