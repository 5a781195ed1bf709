"""Run configuration: a line-oriented ``section.key = value`` format and a
small arithmetic grammar for initial-data expressions."""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .asymptotics import RegionConstants
from .spectral import FieldState, PeriodicGrid, paper_gb, paper_mb


class ConfigError(ValueError):
    pass


# --- expressions -------------------------------------------------------------

_FUNCS = {"exp": np.exp, "sin": np.sin, "cos": np.cos, "tanh": np.tanh,
          "sqrt": np.sqrt, "sech": lambda z: 1.0 / np.cosh(z)}
_CONSTS = {"pi": math.pi, "e": math.e}
_BINOPS = {ast.Add: np.add, ast.Sub: np.subtract, ast.Mult: np.multiply,
           ast.Div: np.divide, ast.Pow: np.power}


def _check_expr(node: ast.AST) -> None:
    if isinstance(node, ast.Expression):
        return _check_expr(node.body)
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        _check_expr(node.left)
        _check_expr(node.right)
    elif isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        _check_expr(node.operand)
    elif isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
            and not isinstance(node.value, bool):
        pass
    elif isinstance(node, ast.Name) and (node.id == "x" or node.id in _CONSTS):
        pass
    elif (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
          and node.func.id in _FUNCS and len(node.args) == 1 and not node.keywords):
        _check_expr(node.args[0])
    else:
        raise ConfigError(f"unsupported expression element: {ast.dump(node)[:60]}")


def _eval(node: ast.AST, x: np.ndarray):
    if isinstance(node, ast.Expression):
        return _eval(node.body, x)
    if isinstance(node, ast.BinOp):
        return _BINOPS[type(node.op)](_eval(node.left, x), _eval(node.right, x))
    if isinstance(node, ast.UnaryOp):
        v = _eval(node.operand, x)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.Constant):
        return float(node.value)
    if isinstance(node, ast.Name):
        return x if node.id == "x" else _CONSTS[node.id]
    return _FUNCS[node.func.id](_eval(node.args[0], x))


@dataclass(frozen=True)
class Expression:
    """Arithmetic over x with + - * / ^ (or **), exp, sin, cos, tanh, sqrt, sech, pi, e."""

    text: str

    def __post_init__(self):
        try:
            tree = ast.parse(self.text.replace("^", "**"), mode="eval")
        except SyntaxError as exc:
            raise ConfigError(f"cannot parse expression {self.text!r}") from exc
        _check_expr(tree)
        object.__setattr__(self, "_tree", tree)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        with np.errstate(all="ignore"):
            out = np.broadcast_to(np.asarray(_eval(self._tree, x), dtype=float), x.shape).copy()
        return out


# --- run configuration -------------------------------------------------------

BUILTINS = {"paper-mb": ("MB", paper_mb), "paper-gb": ("GB", paper_gb)}
# the mB data whose Miura image a GB builtin is; used to extract P for GB runs
COMPANIONS = {"paper-gb": "paper-mb"}


@dataclass(frozen=True)
class RunConfig:
    system: str = "MB"
    builtin: str | None = "paper-mb"
    expr_a: str | None = None
    expr_b: str | None = None
    half_length: float = 800.0
    n_points: int = 16384
    dt: float | None = None            # None means suggest_dt
    dealias: bool = True
    times: tuple[float, ...] = (100.0, 300.0)
    y_max: float = 2.0
    source: str = "extract"
    extract_time: float | None = None  # defaults to the last output time
    fit_y_max: float = 2.5
    seed_a: float = 0.0
    seed_arg_s: float = 0.0
    seed_y: float = -40.0
    companion: str | None = None
    regions: RegionConstants = field(default_factory=RegionConstants)
    out_dir: str = "out"

    def __post_init__(self):
        if self.system not in ("MB", "GB"):
            raise ConfigError(f"unknown system {self.system!r}")
        if self.builtin is not None:
            if self.builtin not in BUILTINS:
                raise ConfigError(f"unknown builtin {self.builtin!r}")
            if BUILTINS[self.builtin][0] != self.system:
                raise ConfigError(f"builtin {self.builtin!r} is not a {self.system} initial condition")
        elif self.expr_a is None or self.expr_b is None:
            raise ConfigError("initial data needs a builtin or both initial.a and initial.b")
        if not self.times or any(t < 0 for t in self.times) or \
                any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ConfigError("output times must be non-negative and increasing")
        if not self.y_max > 0 or not self.fit_y_max > 0:
            raise ConfigError("y_max must be positive")
        if self.source not in ("extract", "seed"):
            raise ConfigError(f"unknown Painleve source {self.source!r}")
        if self.dt is not None and not self.dt > 0:
            raise ConfigError("dt must be positive")
        try:
            PeriodicGrid(self.half_length, self.n_points)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def grid(self) -> PeriodicGrid:
        return PeriodicGrid(self.half_length, self.n_points)

    def initial_state(self) -> FieldState:
        g = self.grid
        if self.builtin is not None:
            return BUILTINS[self.builtin][1](g)
        return FieldState.from_functions(g, self.system, Expression(self.expr_a), Expression(self.expr_b))

    def companion_state(self) -> FieldState | None:
        name = self.companion or COMPANIONS.get(self.builtin or "")
        return BUILTINS[name][1](self.grid) if name else None


_KEYS = {
    "run.system": ("system", str),
    "initial.builtin": ("builtin", str),
    "initial.a": ("expr_a", str),
    "initial.b": ("expr_b", str),
    "initial.companion": ("companion", str),
    "grid.L": ("half_length", float),
    "grid.N": ("n_points", int),
    "stepping.dt": ("dt", float),
    "stepping.dealias": ("dealias", bool),
    "output.times": ("times", tuple),
    "output.dir": ("out_dir", str),
    "compare.y_max": ("y_max", float),
    "compare.source": ("source", str),
    "compare.extract_time": ("extract_time", float),
    "compare.fit_y_max": ("fit_y_max", float),
    "compare.seed_a": ("seed_a", float),
    "compare.seed_arg_s": ("seed_arg_s", float),
    "compare.seed_y": ("seed_y", float),
    "regions.c1": ("c1", float),
    "regions.c2": ("c2", float),
    "regions.c3": ("c3", float),
}


def _convert(raw: str, kind):
    if kind is bool:
        low = raw.lower()
        if low not in ("true", "false", "yes", "no", "1", "0"):
            raise ConfigError(f"not a boolean: {raw!r}")
        return low in ("true", "yes", "1")
    if kind is tuple:
        return tuple(float(v) for v in raw.split(",") if v.strip())
    return kind(raw)


def parse_config(text: str) -> RunConfig:
    values: dict = {}
    region = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'section.key = value'")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        name, kind = _KEYS[key]
        if key == "stepping.dt" and raw.lower() == "auto":
            values["dt"] = None
            continue
        try:
            val = _convert(raw, kind)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {raw!r}") from exc
        if name in ("c1", "c2", "c3"):
            region[name] = val
        else:
            values[name] = val
    if "expr_a" in values or "expr_b" in values:
        values.setdefault("builtin", None)
        for k in ("expr_a", "expr_b"):
            if k in values:
                Expression(values[k])
    elif "builtin" not in values and values.get("system", "MB") == "GB":
        values["builtin"] = "paper-gb"
    try:
        if region:
            values["regions"] = RegionConstants(**region)
        return RunConfig(**values)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str | Path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    return parse_config(text)
