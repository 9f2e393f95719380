"""Scenario documents: line-oriented ``key = value`` files.

Matrices and vectors are Python-style literals (``A = [[1, 0.05], [0, 1]]``),
words may be written bare (``terminal_mode = riccati_set``) and ``#``
starts a comment. Unknown keys are rejected.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass, field, fields
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

from .invariant_sets import max_stabilizing_set
from .mpc import DiscreteLtiSystem, MpcConfig, ReferenceTrajectory
from .polytope import HPolyhedron
from .riccati import CostWeights, solve_dare

TERMINAL_MODES = ("none", "origin", "riccati_set", "explicit")
REFERENCE_MODES = ("none", "equilibrium", "table")
_WORD_KEYS = {"name", "terminal_mode", "reference", "out_dir"}
_REQUIRED = ("A", "B", "N", "Q", "R", "F", "f", "G", "g", "x0", "steps")


class ScenarioError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None, key: Optional[str] = None):
        self.line = line
        self.key = key
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key '{key}'")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)


@dataclass
class Scenario:
    A: np.ndarray
    B: np.ndarray
    N: int
    Q: np.ndarray
    R: np.ndarray
    F: np.ndarray
    f: np.ndarray
    G: np.ndarray
    g: np.ndarray
    x0: np.ndarray
    steps: int
    name: str = ""
    Qf: Optional[np.ndarray] = None
    terminal_mode: str = "none"
    Ff: Optional[np.ndarray] = None
    ff: Optional[np.ndarray] = None
    reference: str = "none"
    x_eq: Optional[np.ndarray] = None
    u_eq: Optional[np.ndarray] = None
    xref: Optional[np.ndarray] = None
    uref: Optional[np.ndarray] = None
    snapshots: tuple = ()
    out_dir: Optional[str] = None
    max_iter: int = 500
    _lines: dict = field(default_factory=dict, repr=False, compare=False)

    # derived objects

    def system(self) -> DiscreteLtiSystem:
        return DiscreteLtiSystem(self.A, self.B)

    def weights(self) -> CostWeights:
        return CostWeights(self.Q, self.R)

    def state_set(self) -> HPolyhedron:
        return HPolyhedron(self.F, self.f)

    def input_set(self) -> HPolyhedron:
        return HPolyhedron(self.G, self.g)

    def terminal_cost(self) -> np.ndarray:
        if self.Qf is not None:
            return self.Qf
        return solve_dare(self.system(), self.weights()).Qf

    def terminal_set(self):
        """Terminal set for the configured mode and, for ``riccati_set``, the
        stabilizing-set iteration result."""
        n = self.A.shape[0]
        if self.terminal_mode == "none":
            return None, None
        if self.terminal_mode == "origin":
            return HPolyhedron.origin(n), None
        if self.terminal_mode == "explicit":
            return HPolyhedron(self.Ff, self.ff), None
        res = max_stabilizing_set(self.system(), self.state_set(), self.input_set(),
                                  max_iter=self.max_iter)
        return res.set, res

    def config(self, Xf=None) -> MpcConfig:
        return MpcConfig(self.system(), self.N, self.weights(), self.terminal_cost(),
                         self.state_set(), self.input_set(), Xf)

    def reference_source(self):
        n, m, N = self.A.shape[0], self.B.shape[1], self.N
        if self.reference == "none":
            return None
        if self.reference == "equilibrium":
            x_eq, u_eq = equilibrium_input(self.system(), self.x_eq, self.u_eq)
            return ReferenceTrajectory.constant(x_eq, u_eq, N)
        xs = np.asarray(self.xref, dtype=float).reshape(-1, n)
        us = np.asarray(self.uref, dtype=float).reshape(-1, m)

        def window(k):
            ix = np.minimum(np.arange(k, k + N + 1), len(xs) - 1)
            iu = np.minimum(np.arange(k, k + N), len(us) - 1)
            return ReferenceTrajectory(xs[ix].ravel(), us[iu].ravel())
        return window


def equilibrium_input(sys: DiscreteLtiSystem, x_eq, u_eq=None, tol: float = 1e-9):
    """Input holding ``x_eq`` fixed; checks a given ``u_eq`` instead when provided."""
    x_eq = np.asarray(x_eq, dtype=float).reshape(-1)
    if u_eq is None:
        u_eq, *_ = np.linalg.lstsq(sys.B, x_eq - sys.A @ x_eq, rcond=None)
    u_eq = np.atleast_1d(np.asarray(u_eq, dtype=float))
    if np.linalg.norm(sys.step(x_eq, u_eq) - x_eq) > tol * max(1.0, np.linalg.norm(x_eq)):
        raise ScenarioError("reference state is not an equilibrium of the system", key="x_eq")
    return x_eq, u_eq


def _parse_value(key, raw, line):
    try:
        return ast.literal_eval(raw)
    except (ValueError, SyntaxError):
        if key in _WORD_KEYS and raw and all(ch.isalnum() or ch in "_-./" for ch in raw):
            return raw
        raise ScenarioError(f"cannot parse value {raw!r}", line, key) from None


def _matrix(v, key, line, shape=None):
    try:
        a = np.array(v, dtype=float)
    except (TypeError, ValueError):
        raise ScenarioError("expected a numeric matrix", line, key) from None
    if a.ndim == 0:
        a = a.reshape(1, 1)
    elif a.ndim == 1:
        a = a.reshape(1, -1) if shape is None or shape[0] == 1 else a.reshape(-1, 1)
    if a.ndim != 2:
        raise ScenarioError("expected a matrix literal", line, key)
    if shape is not None and a.shape != shape:
        raise ScenarioError(f"expected shape {shape}, got {a.shape}", line, key)
    return a


def _vector(v, key, line, size=None):
    try:
        a = np.atleast_1d(np.array(v, dtype=float)).reshape(-1)
    except (TypeError, ValueError):
        raise ScenarioError("expected a numeric vector", line, key) from None
    if size is not None and a.size != size:
        raise ScenarioError(f"expected {size} entries, got {a.size}", line, key)
    return a


def _integer(v, key, line):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or int(v) != v:
        raise ScenarioError("expected an integer", line, key)
    return int(v)


def parse_scenario(text: str) -> Scenario:
    known = {f.name for f in fields(Scenario) if not f.name.startswith("_")}
    raw, lines = {}, {}
    for no, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ScenarioError("expected 'key = value'", no)
        key, value = (s.strip() for s in body.split("=", 1))
        if key not in known:
            raise ScenarioError("unknown key", no, key)
        if key in raw:
            raise ScenarioError("duplicate key", no, key)
        raw[key] = _parse_value(key, value, no)
        lines[key] = no
    for key in _REQUIRED:
        if key not in raw:
            raise ScenarioError(f"missing required key '{key}'", None, key)

    L = lines.get
    A = _matrix(raw["A"], "A", L("A"))
    n = A.shape[0]
    if A.shape != (n, n):
        raise ScenarioError("A must be square", L("A"), "A")
    B = _matrix(raw["B"], "B", L("B"))
    if B.shape[0] == 1 and n > 1:
        B = B.T
    if B.shape[0] != n:
        raise ScenarioError(f"B must have {n} rows", L("B"), "B")
    m = B.shape[1]
    N = _integer(raw["N"], "N", L("N"))
    if N < 1:
        raise ScenarioError("horizon must be ≥ 1", L("N"), "N")
    steps = _integer(raw["steps"], "steps", L("steps"))
    if steps < 1:
        raise ScenarioError("steps must be ≥ 1", L("steps"), "steps")
    Q = _matrix(raw["Q"], "Q", L("Q"), (n, n))
    R = _matrix(raw["R"], "R", L("R"), (m, m))
    F = _matrix(raw["F"], "F", L("F"))
    if F.shape[1] != n:
        raise ScenarioError(f"F must have {n} columns", L("F"), "F")
    f = _vector(raw["f"], "f", L("f"), F.shape[0])
    G = _matrix(raw["G"], "G", L("G"))
    if G.shape[1] != m:
        raise ScenarioError(f"G must have {m} columns", L("G"), "G")
    g = _vector(raw["g"], "g", L("g"), G.shape[0])
    x0 = _vector(raw["x0"], "x0", L("x0"), n)

    s = Scenario(A=A, B=B, N=N, Q=Q, R=R, F=F, f=f, G=G, g=g, x0=x0, steps=steps, _lines=lines)
    if "name" in raw:
        s.name = str(raw["name"])
    if "Qf" in raw:
        s.Qf = _matrix(raw["Qf"], "Qf", L("Qf"), (n, n))
    mode = str(raw.get("terminal_mode", "none"))
    if mode not in TERMINAL_MODES:
        raise ScenarioError(f"terminal_mode must be one of {TERMINAL_MODES}", L("terminal_mode"),
                            "terminal_mode")
    s.terminal_mode = mode
    if mode == "explicit":
        for key in ("Ff", "ff"):
            if key not in raw:
                raise ScenarioError(f"terminal_mode explicit requires '{key}'", None, key)
        s.Ff = _matrix(raw["Ff"], "Ff", L("Ff"))
        if s.Ff.shape[1] != n:
            raise ScenarioError(f"Ff must have {n} columns", L("Ff"), "Ff")
        s.ff = _vector(raw["ff"], "ff", L("ff"), s.Ff.shape[0])
    elif "Ff" in raw or "ff" in raw:
        key = "Ff" if "Ff" in raw else "ff"
        raise ScenarioError("explicit terminal set given without terminal_mode = explicit",
                            L(key), key)
    ref = str(raw.get("reference", "none"))
    if ref not in REFERENCE_MODES:
        raise ScenarioError(f"reference must be one of {REFERENCE_MODES}", L("reference"),
                            "reference")
    s.reference = ref
    if ref == "equilibrium":
        if "x_eq" not in raw:
            raise ScenarioError("reference equilibrium requires 'x_eq'", None, "x_eq")
        s.x_eq = _vector(raw["x_eq"], "x_eq", L("x_eq"), n)
        if "u_eq" in raw:
            s.u_eq = _vector(raw["u_eq"], "u_eq", L("u_eq"), m)
    elif ref == "table":
        for key in ("xref", "uref"):
            if key not in raw:
                raise ScenarioError(f"reference table requires '{key}'", None, key)
        s.xref = _matrix(raw["xref"], "xref", L("xref"))
        if s.xref.shape[1] != n:
            raise ScenarioError(f"xref rows must have {n} entries", L("xref"), "xref")
        s.uref = _matrix(raw["uref"], "uref", L("uref"))
        if s.uref.shape[1] != m:
            raise ScenarioError(f"uref rows must have {m} entries", L("uref"), "uref")
    if "snapshots" in raw:
        snaps = raw["snapshots"]
        snaps = (snaps,) if isinstance(snaps, int) else tuple(snaps)
        s.snapshots = tuple(_integer(k, "snapshots", L("snapshots")) for k in snaps)
    if "out_dir" in raw:
        s.out_dir = str(raw["out_dir"])
    if "max_iter" in raw:
        s.max_iter = _integer(raw["max_iter"], "max_iter", L("max_iter"))

    # semantic checks that need the assembled objects
    try:
        CostWeights(Q, R)
    except ValueError as exc:
        key = "R" if str(exc).startswith("R") else "Q"
        raise ScenarioError(str(exc), L(key), key) from None
    if np.any(f < 0):
        raise ScenarioError("state set must contain the origin", L("f"), "f")
    if np.any(g < 0):
        raise ScenarioError("input set must contain the origin", L("g"), "g")
    if s.ff is not None and np.any(s.ff < 0):
        raise ScenarioError("terminal set must contain the origin", L("ff"), "ff")
    if s.Qf is not None:
        try:
            MpcConfig(s.system(), N, CostWeights(Q, R), s.Qf, HPolyhedron(F, f),
                      HPolyhedron(G, g))
        except ValueError as exc:
            raise ScenarioError(str(exc), L("Qf"), "Qf") from None
    if ref == "equilibrium":
        equilibrium_input(s.system(), s.x_eq, s.u_eq)
    return s


def _literal(a) -> str:
    return repr(np.asarray(a, dtype=float).tolist())


def format_scenario(s: Scenario) -> str:
    """Inverse of :func:`parse_scenario`; floats are written with ``repr``."""
    out = []
    if s.name:
        out.append(f"name = {s.name}")
    for key in ("A", "B"):
        out.append(f"{key} = {_literal(getattr(s, key))}")
    out.append(f"N = {s.N}")
    for key in ("Q", "R"):
        out.append(f"{key} = {_literal(getattr(s, key))}")
    if s.Qf is not None:
        out.append(f"Qf = {_literal(s.Qf)}")
    for key in ("F", "f", "G", "g"):
        out.append(f"{key} = {_literal(getattr(s, key))}")
    out.append(f"terminal_mode = {s.terminal_mode}")
    if s.terminal_mode == "explicit":
        out.append(f"Ff = {_literal(s.Ff)}")
        out.append(f"ff = {_literal(s.ff)}")
    out.append(f"x0 = {_literal(s.x0)}")
    out.append(f"steps = {s.steps}")
    if s.reference != "none":
        out.append(f"reference = {s.reference}")
        for key in ("x_eq", "u_eq", "xref", "uref"):
            if getattr(s, key) is not None:
                out.append(f"{key} = {_literal(getattr(s, key))}")
    if s.snapshots:
        out.append(f"snapshots = {list(s.snapshots)!r}")
    if s.out_dir is not None:
        out.append(f"out_dir = {s.out_dir}")
    if s.max_iter != 500:
        out.append(f"max_iter = {s.max_iter}")
    return "\n".join(out) + "\n"


def bundled_scenarios() -> list:
    return sorted(p.name for p in resources.files("mpckit.scenarios").iterdir()
                  if p.name.endswith(".scn"))


def read_scenario_text(path) -> str:
    """Read a scenario from ``path``, falling back to a bundled file of that name."""
    p = Path(path)
    if p.exists():
        return p.read_text()
    bundled = resources.files("mpckit.scenarios") / p.name
    if bundled.is_file():
        return bundled.read_text()
    raise FileNotFoundError(f"scenario file not found: {path}")


def load_scenario(path) -> Scenario:
    return parse_scenario(read_scenario_text(path))
