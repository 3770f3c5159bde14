"""Run configuration, initial-condition expressions and file formats."""
from __future__ import annotations

import ast
import configparser
import csv
import json
import math
import re
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from .geodesic import EQUATIONS, EquationConfig, SolverOptions, Trajectory
from .spectral import GridField, PeriodicGrid

__all__ = [
    "ConfigError",
    "ExpressionError",
    "RunConfig",
    "load_run_config",
    "compile_expression",
    "write_trajectory_csv",
    "read_trajectory_csv",
    "write_json",
    "trajectory_summary",
]


class ConfigError(ValueError):
    def __init__(self, key, message, line=None):
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{key}{where}: {message}")
        self.key = key
        self.line = line


class ExpressionError(ValueError):
    def __init__(self, message, column):
        super().__init__(f"column {column}: {message}")
        self.column = column


# --- initial condition expressions ----------------------------------------

def _sech(z):
    return 1.0 / np.cosh(z)


_FUNCS = {
    "sin": np.sin, "cos": np.cos, "tan": np.tan, "exp": np.exp, "log": np.log,
    "sqrt": np.sqrt, "sinh": np.sinh, "cosh": np.cosh, "tanh": np.tanh,
    "sech": _sech, "abs": np.abs, "arctan": np.arctan,
}
_CONSTS = {"pi": math.pi, "e": math.e}
_BINOPS = {ast.Add: np.add, ast.Sub: np.subtract, ast.Mult: np.multiply,
           ast.Div: np.divide, ast.Pow: np.power}


def compile_expression(text: str, variables=("x",)):
    """Compile an arithmetic expression in ``variables`` to a callable.

    Supports numbers, ``pi``, ``e``, ``+ - * / ** ^``, parentheses and the
    functions ``sin cos tan exp log sqrt sinh cosh tanh sech abs arctan``.
    """
    # '^' becomes '**'; track the shift so columns refer to the input
    carets = [i for i, ch in enumerate(text) if ch == "^"]
    source = text.replace("^", "**")

    def column(col0):
        shift = 0
        for pos in carets:
            if col0 > pos + shift:
                shift += 1
        return col0 - shift + 1

    if not text.strip():
        raise ExpressionError("empty expression", 1)
    try:
        tree = ast.parse(source.strip(), mode="eval")
    except SyntaxError as exc:
        lead = len(source) - len(source.lstrip())
        raise ExpressionError(exc.msg.split(". Perhaps")[0],
                              column((exc.offset or 1) - 1 + lead)) from None
    lead = len(source) - len(source.lstrip())

    def fail(node, msg):
        raise ExpressionError(msg, column(getattr(node, "col_offset", 0) + lead))

    def check(node):
        if isinstance(node, ast.Expression):
            check(node.body)
        elif isinstance(node, ast.Constant):
            if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
                fail(node, f"unsupported literal {node.value!r}")
        elif isinstance(node, ast.Name):
            if node.id not in variables and node.id not in _CONSTS:
                hint = " (functions must be called)" if node.id in _FUNCS else ""
                fail(node, f"unknown name {node.id!r}{hint}")
        elif isinstance(node, ast.UnaryOp):
            if not isinstance(node.op, (ast.UAdd, ast.USub)):
                fail(node, "unsupported unary operator")
            check(node.operand)
        elif isinstance(node, ast.BinOp):
            if type(node.op) not in _BINOPS:
                fail(node, "unsupported operator")
            check(node.left)
            check(node.right)
        elif isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCS:
                fail(node, "unknown function")
            if len(node.args) != 1 or node.keywords:
                fail(node, f"{node.func.id} takes exactly one argument")
            check(node.args[0])
        else:
            fail(node, f"unsupported syntax ({type(node).__name__})")

    check(tree)

    def evaluate(node, env):
        if isinstance(node, ast.Expression):
            return evaluate(node.body, env)
        if isinstance(node, ast.Constant):
            return float(node.value)
        if isinstance(node, ast.Name):
            return env[node.id] if node.id in env else _CONSTS[node.id]
        if isinstance(node, ast.UnaryOp):
            val = evaluate(node.operand, env)
            return -val if isinstance(node.op, ast.USub) else val
        if isinstance(node, ast.BinOp):
            return _BINOPS[type(node.op)](evaluate(node.left, env), evaluate(node.right, env))
        return _FUNCS[node.func.id](evaluate(node.args[0], env))

    def func(*args):
        env = dict(zip(variables, args))
        with np.errstate(all="ignore"):
            out = evaluate(tree, env)
        return np.broadcast_to(np.asarray(out, dtype=float), np.shape(args[0])).copy()

    func.source = text
    return func


# --- run configuration ------------------------------------------------------

@dataclass
class RunConfig:
    equation: str = "kdv"
    ic: str = "sin(x)"
    n: int = 256
    length: float = 2 * math.pi
    dt: float = 1e-3
    t_end: float = 1.0
    scheme: str = "auto"
    eps: float = 1.0
    store_every: int = 1
    dealias: bool = True

    def validate(self, lines=None):
        lines = lines or {}

        def bad(key, msg):
            raise ConfigError(key, msg, lines.get(key))

        if self.equation not in EQUATIONS:
            bad("equation", f"unknown equation {self.equation!r}; choose from "
                            f"{', '.join(EQUATIONS)}")
        if self.n < 8 or self.n % 2:
            bad("n", f"grid size must be an even integer >= 8, got {self.n}")
        for key in ("length", "dt", "t_end"):
            val = getattr(self, key)
            if not (val > 0 and math.isfinite(val)):
                bad(key, f"must be positive and finite, got {val}")
        if not math.isfinite(self.eps):
            bad("eps", "must be finite")
        if self.store_every < 1:
            bad("store_every", f"must be a positive integer, got {self.store_every}")
        if self.scheme not in ("auto", "rk4", "ifrk4"):
            bad("scheme", f"unknown scheme {self.scheme!r}; choose auto, rk4 or ifrk4")
        try:
            compile_expression(self.ic)
        except ExpressionError as exc:
            bad("ic", str(exc))
        return self

    def equation_config(self) -> EquationConfig:
        return EquationConfig.named(self.equation, self.eps)

    def solver_options(self) -> SolverOptions:
        return SolverOptions(dt=self.dt, scheme=self.scheme, dealias=self.dealias,
                             store_every=self.store_every)

    def grid(self) -> PeriodicGrid:
        return PeriodicGrid(self.n, self.length)

    def initial_field(self) -> GridField:
        grid = self.grid()
        return GridField(grid, compile_expression(self.ic)(grid.points))

    def as_dict(self) -> dict:
        return asdict(self)


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _convert(key, raw, line):
    kind = _TYPES[key]
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(compile_expression(raw)(np.zeros(1))[0])
        if kind == "bool":
            low = raw.strip().lower()
            if low not in ("true", "false", "yes", "no", "1", "0"):
                raise ValueError(raw)
            return low in ("true", "yes", "1")
        return raw.strip().strip('"').strip("'")
    except (ValueError, ExpressionError):
        raise ConfigError(key, f"cannot read {raw!r} as {kind}", line) from None


def load_run_config(path, overrides=None) -> RunConfig:
    """Read ``key = value`` lines (an optional ``[run]`` header is allowed)."""
    text = Path(path).read_text()
    if not re.search(r"^\s*\[", text, re.M):
        text = "[run]\n" + text
        offset = -1
    else:
        offset = 0
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        raise ConfigError("config", str(exc).splitlines()[0],
                          None if line is None else line + offset) from None
    lines = {}
    for i, raw_line in enumerate(text.splitlines(), start=1 + offset):
        m = re.match(r"\s*([A-Za-z_][\w-]*)\s*[=:]", raw_line)
        if m:
            lines.setdefault(m.group(1).replace("-", "_"), i)
    values = {}
    for section in parser.sections():
        for key, raw in parser.items(section):
            norm = key.replace("-", "_")
            if norm not in _TYPES:
                raise ConfigError(norm, "unknown key", lines.get(norm))
            values[norm] = _convert(norm, raw, lines.get(norm))
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return RunConfig(**values).validate(lines)


# --- files ----------------------------------------------------------------------

def write_trajectory_csv(traj: Trajectory, path) -> Path:
    path = Path(path)
    n = traj.grid.n
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t"] + [f"x{j}" for j in range(n)])
        for t, u in zip(traj.times, traj.snapshots):
            w.writerow([format(float(t), ".17g")] + [format(v, ".17g") for v in u.values])
    return path


def read_trajectory_csv(path, config: EquationConfig | None = None,
                        length: float = 2 * math.pi) -> Trajectory:
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    if not header or header[0] != "t" or header[1:] != [f"x{j}" for j in range(len(header) - 1)]:
        raise ValueError(f"{path}: header must be t,x0,...,x{{n-1}}")
    data = np.array(body, dtype=float)
    grid = PeriodicGrid(len(header) - 1, length)
    snaps = [GridField(grid, row[1:]) for row in data]
    return Trajectory(config or EquationConfig.named("kdv"), data[:, 0], snaps)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        val = float(obj)
        return val if math.isfinite(val) else repr(val)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(data: dict, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(_jsonable(data), indent=2) + "\n")
    return path


def trajectory_summary(run: RunConfig, traj: Trajectory, wall_time: float,
                       extra: dict | None = None) -> dict:
    keys = traj.invariant_log[0].keys() if traj.invariant_log else ()
    out = {
        "config": run.as_dict(),
        "times": traj.times,
        "invariants": {k: traj.series(k) for k in keys},
        "blew_up": traj.blew_up,
        "failure_time": traj.failure_time,
        "truncated": traj.truncated,
        "final_time": float(traj.times[-1]),
        "wall_time_s": wall_time,
    }
    out.update(extra or {})
    return out
