"""Strict JSON run configurations and their ``"auto"`` resolution.

A configuration has the blocks ``kernel``, ``reaction``,
``initial_condition``, ``grid``, ``time``, ``analysis`` and ``output``, plus
optional ``certify`` and ``speed`` blocks. Unknown keys are errors. After
:func:`resolve` every ``"auto"`` entry is replaced by a number, so the
resolved dictionary can be written back and rerun unchanged.
"""

from __future__ import annotations

import copy
import json
import logging
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np

from . import analysis
from .discretization import Bump, Custom, Grid1D, Indicator, InitialShape
from .errors import ConfigError, FatFrontError
from .integrator import StepperConfig, stable_dt
from .kernels import KernelSpec
from .kernels import from_dict as kernel_from_dict
from .reaction import ReactionSpec
from .reaction import from_dict as reaction_from_dict

logger = logging.getLogger(__name__)

_SCHEMA: dict[str, dict[str, bool]] = {
    # block -> {key: required}
    "kernel": {"family": True, "alpha": False, "beta": False, "C": False, "rate": False},
    "reaction": {"family": True, "a": False},
    "initial_condition": {"shape": True, "radius": False, "x": False, "u": False},
    "grid": {"L": True, "dx": False, "n": False, "egress_max": False, "deficit_max": False},
    "time": {"t_max": True, "dt": False, "snapshot_times": False, "scheme": False,
             "safety": False},
    "analysis": {"levels": False, "epsilon": False, "rho": False},
    "output": {"directory": True, "plot": False},
    "certify": {"constructions": False, "epsilon": False, "epsilon0": False,
                "quad_tol": False, "tol": False},
    "speed": {"truncate": False, "level": False, "window": False},
}
_REQUIRED_BLOCKS = ("kernel", "reaction", "initial_condition", "grid", "time", "output")


def _line_of(text: str, key: str) -> str:
    for i, line in enumerate(text.splitlines(), 1):
        if re.search(rf'"{re.escape(key)}"\s*:', line):
            return f" (line {i}: {line.strip()})"
    return ""


def parse_config(text: str) -> dict:
    """Parse and validate configuration text.

    Raises
    ------
    ConfigError
        On malformed JSON, unknown or missing keys, with line context.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        line = text.splitlines()[exc.lineno - 1] if exc.lineno <= len(text.splitlines()) else ""
        raise ConfigError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: "
                          f"{exc.msg} ({line.strip()})") from None
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a JSON object")
    for block, body in raw.items():
        if block not in _SCHEMA:
            raise ConfigError(f"unknown block {block!r}{_line_of(text, block)}")
        if not isinstance(body, dict):
            raise ConfigError(f"block {block!r} must be an object{_line_of(text, block)}")
        for key in body:
            if key not in _SCHEMA[block]:
                raise ConfigError(f"unknown key {block}.{key}{_line_of(text, key)}")
        for key, required in _SCHEMA[block].items():
            if required and key not in body:
                raise ConfigError(f"missing key {block}.{key}{_line_of(text, block)}")
    for block in _REQUIRED_BLOCKS:
        if block not in raw:
            raise ConfigError(f"missing block {block!r}")
    grid = raw["grid"]
    if ("dx" in grid) == ("n" in grid):
        raise ConfigError(f"grid needs exactly one of dx or n{_line_of(text, 'grid')}")
    return raw


def load_config(path: Union[str, Path]) -> dict:
    text = Path(path).read_text(encoding="utf-8")
    try:
        return parse_config(text)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def build_initial(block: dict) -> InitialShape:
    shape = block["shape"]
    if shape == "bump":
        return Bump(float(block.get("radius", 10.0)))
    if shape == "indicator":
        return Indicator(float(block.get("radius", 10.0)))
    if shape == "custom":
        if "x" not in block or "u" not in block:
            raise ConfigError("custom initial condition needs x and u tables")
        return Custom(tuple(map(float, block["x"])), tuple(map(float, block["u"])))
    raise ConfigError(f"unknown initial_condition.shape {shape!r}")


def initial_to_dict(shape: InitialShape) -> dict:
    if isinstance(shape, Bump):
        return {"shape": "bump", "radius": shape.radius}
    if isinstance(shape, Indicator):
        return {"shape": "indicator", "radius": shape.radius}
    return {"shape": "custom", "x": list(shape.xs), "u": list(shape.us)}


def _snapshot_times(spec: Any, t_max: float) -> list[float]:
    if spec is None:
        n = max(1, int(math.ceil(t_max)))
        return [float(v) for v in np.linspace(0.0, t_max, n + 1)]
    if isinstance(spec, dict):
        if set(spec) != {"every"}:
            raise ConfigError('time.snapshot_times object must be {"every": step}')
        step = float(spec["every"])
        if not step > 0:
            raise ConfigError("snapshot step must be positive")
        n = int(math.floor(t_max / step + 1e-9))
        return [round(k * step, 12) for k in range(n + 1)]
    if isinstance(spec, list):
        return [float(v) for v in spec]
    raise ConfigError("time.snapshot_times must be a list or {\"every\": step}")


@dataclass
class Resolved:
    """A configuration with every ``"auto"`` replaced, plus built objects."""

    data: dict
    kernel: KernelSpec
    reaction: ReactionSpec
    initial: InitialShape
    grid: Grid1D
    stepper: StepperConfig
    levels: list
    epsilon: float
    rho: Optional[float]
    deficit_max: float

    @property
    def output_dir(self) -> Path:
        return Path(self.data["output"]["directory"])

    def to_json(self) -> str:
        return json.dumps(self.data, indent=2, sort_keys=False) + "\n"


def resolve(raw: dict, out_dir: Optional[Union[str, Path]] = None) -> Resolved:
    """Build objects from a parsed configuration and fill in ``"auto"`` values.

    ``grid.L = "auto"`` uses :func:`analysis.recommend_domain` with the smallest
    analysis level; ``analysis.rho = "auto"`` uses :func:`analysis.theoretical_rho`
    and stays ``null`` for kernels without a fat-tail hypothesis.
    """
    data = copy.deepcopy(raw)
    try:
        kernel = kernel_from_dict(data["kernel"])
        reaction = reaction_from_dict(data["reaction"])
        initial = build_initial(data["initial_condition"])
    except FatFrontError as exc:
        raise ConfigError(str(exc)) from None
    if out_dir is not None:
        data["output"]["directory"] = str(out_dir)
    data["output"].setdefault("plot", True)

    t_block = data["time"]
    t_max = float(t_block["t_max"])
    t_block["snapshot_times"] = _snapshot_times(t_block.get("snapshot_times"), t_max)
    t_block.setdefault("scheme", "rk4")
    t_block.setdefault("safety", 0.25)
    dt = t_block.get("dt", "auto")
    if dt == "auto":
        dt = stable_dt(reaction, float(t_block["safety"]))
    t_block["dt"] = float(dt)

    a_block = data.setdefault("analysis", {})
    a_block.setdefault("levels", [0.2])
    levels = [float(v) for v in a_block["levels"]]
    if not levels or any(not 0.0 < v < 1.0 for v in levels):
        raise ConfigError("analysis.levels must be a non-empty list in (0, 1)")
    a_block.setdefault("epsilon", 0.2 * reaction.fprime0)
    epsilon = float(a_block["epsilon"])
    rho_spec = a_block.get("rho", "auto")
    rho: Optional[float]
    if rho_spec == "auto":
        try:
            rho = analysis.theoretical_rho(kernel, reaction).rho
        except FatFrontError as exc:
            logger.info("analysis.rho stays unset: %s", exc)
            rho = None
    else:
        rho = None if rho_spec is None else float(rho_spec)
    a_block["rho"] = rho

    g_block = data["grid"]
    g_block.setdefault("egress_max", 1e-6)
    g_block.setdefault("deficit_max", 1e-3)
    if g_block["L"] == "auto":
        if rho is None:
            raise ConfigError("grid.L = auto needs analysis.rho for this kernel")
        L = analysis.recommend_domain(kernel, reaction, t_max, lambda_min=min(levels), rho=rho,
                                      support=initial.support_radius)
        g_block["L"] = L
    L = float(g_block["L"])
    try:
        if "dx" in g_block:
            grid = Grid1D.from_spacing(L, float(g_block["dx"]))
        else:
            grid = Grid1D(L, int(g_block["n"]))
        stepper = StepperConfig(t_max, dt=float(dt), scheme=t_block["scheme"],
                                safety=float(t_block["safety"]),
                                snapshot_times=tuple(t_block["snapshot_times"]),
                                egress_max=float(g_block["egress_max"]))
        stepper.resolved_dt(reaction)
    except FatFrontError as exc:
        raise ConfigError(str(exc)) from None
    return Resolved(data, kernel, reaction, initial, grid, stepper, levels, epsilon, rho,
                    float(g_block["deficit_max"]))
