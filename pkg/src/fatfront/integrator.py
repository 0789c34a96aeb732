"""Explicit method-of-lines time stepping for ``u_t = J*u - u + f(u)``."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .discretization import (ConvolutionPlan, Field, Grid1D, InitialShape, boundary_egress,
                             sample_initial_condition)
from .errors import DomainError, NonFiniteError, RangeViolationError
from .kernels import KernelSpec
from .reaction import ReactionSpec

logger = logging.getLogger(__name__)

SCHEMES = ("euler", "rk4")


def stable_dt(reaction: Optional[ReactionSpec], safety: float = 0.25) -> float:
    """Return ``safety * 2 / (1 + max|f'|)``; linear mode uses ``max|f'| = 0``."""
    if not 0.0 < safety <= 1.0:
        raise DomainError("safety must lie in (0, 1]")
    lip_f = 0.0 if reaction is None else reaction.max_abs_fprime
    return safety * 2.0 / (1.0 + lip_f)


def _rhs(u: np.ndarray, plan: ConvolutionPlan, reaction: Optional[ReactionSpec]) -> np.ndarray:
    out = plan.apply(u) - u
    if reaction is not None:
        out += reaction(u)
    return out


def _check_range(u: np.ndarray, t: float, tol: float) -> None:
    if not np.all(np.isfinite(u)):
        raise NonFiniteError("non-finite value in the state", t)
    lo, hi = u.min(), u.max()
    if lo < -tol or hi > 1.0 + tol:
        raise RangeViolationError(f"state left [-{tol:g}, 1+{tol:g}]: min {lo:.3g}, max {hi:.3g}", t)


def step(state: Field, plan: ConvolutionPlan, reaction: Optional[ReactionSpec], dt: float,
         scheme: str = "rk4", range_tol: float = 1e-8) -> Field:
    """Advance one explicit step.

    Raises
    ------
    RangeViolationError
        If the new state leaves ``[-range_tol, 1 + range_tol]``.
    """
    if state.grid != plan.grid:
        raise DomainError("state and plan live on different grids")
    u = state.values
    if scheme == "euler":
        new = u + dt * _rhs(u, plan, reaction)
    elif scheme == "rk4":
        k1 = _rhs(u, plan, reaction)
        k2 = _rhs(u + 0.5 * dt * k1, plan, reaction)
        k3 = _rhs(u + 0.5 * dt * k2, plan, reaction)
        k4 = _rhs(u + dt * k3, plan, reaction)
        new = u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    else:
        raise DomainError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    t = state.time + dt
    _check_range(new, t, range_tol)
    return Field(state.grid, new, t)


@dataclass(frozen=True)
class StepperConfig:
    """Time-stepping settings.

    ``dt=None`` selects :func:`stable_dt`. The step actually used divides
    ``t_max`` evenly and never exceeds the requested one.
    """

    t_max: float
    dt: Optional[float] = None
    scheme: str = "rk4"
    safety: float = 0.25
    snapshot_times: tuple = ()
    range_tol: float = 1e-8
    egress_max: float = 1e-6
    egress_buffer: float = 0.1

    def __post_init__(self):
        if self.t_max < 0:
            raise DomainError("t_max must be nonnegative")
        if self.scheme not in SCHEMES:
            raise DomainError(f"unknown scheme {self.scheme!r}")
        if any(t < 0 or t > self.t_max + 1e-12 for t in self.snapshot_times):
            raise DomainError("snapshot times must lie in [0, t_max]")
        if not 0.0 < self.egress_buffer < 1.0:
            raise DomainError("egress_buffer is a fraction of L in (0, 1)")

    def resolved_dt(self, reaction: Optional[ReactionSpec]) -> float:
        bound = stable_dt(reaction, self.safety)
        dt = bound if self.dt is None else self.dt
        if dt > bound * (1.0 + 1e-12):
            raise DomainError(f"dt = {dt} exceeds the stability bound {bound}")
        if self.t_max == 0:
            return dt
        return self.t_max / math.ceil(self.t_max / dt - 1e-9)


@dataclass
class Diagnostics:
    t: list = field(default_factory=list)
    min_u: list = field(default_factory=list)
    max_u: list = field(default_factory=list)
    mass: list = field(default_factory=list)
    egress: list = field(default_factory=list)

    def record(self, state: Field, egress: float) -> None:
        u = state.values
        self.t.append(state.time)
        self.min_u.append(float(u.min()))
        self.max_u.append(float(u.max()))
        self.mass.append(state.mass())
        self.egress.append(egress)

    def as_array(self) -> np.ndarray:
        return np.column_stack([self.t, self.min_u, self.max_u, self.mass, self.egress])


@dataclass
class SimulationRun:
    """A run description plus, once :func:`run` returns, its results.

    ``status`` is ``"pending"``, ``"completed"`` or ``"egress_abort"``.
    """

    kernel: KernelSpec
    reaction: Optional[ReactionSpec]
    grid: Grid1D
    config: StepperConfig
    initial: InitialShape
    deficit_max: float = 1e-3
    band_decades: Optional[float] = 4.0
    workers: Optional[int] = None
    snapshots: list = field(default_factory=list)
    diagnostics: Diagnostics = field(default_factory=Diagnostics)
    status: str = "pending"
    dt: float = math.nan
    plan: Optional[ConvolutionPlan] = None

    def snapshot_at(self, t: float) -> Field:
        """Snapshot whose time is closest to ``t``."""
        if not self.snapshots:
            raise DomainError("run has no snapshots")
        return min(self.snapshots, key=lambda s: abs(s.time - t))


def run(sim: SimulationRun) -> SimulationRun:
    """Integrate to ``t_max``, filling snapshots and diagnostics in place.

    A run whose boundary egress exceeds ``config.egress_max`` stops early with
    ``status = "egress_abort"`` and keeps what it recorded so far.

    Raises
    ------
    RangeViolationError
        Propagated from :func:`step`, carrying the failing time.
    """
    cfg = sim.config
    dt = cfg.resolved_dt(sim.reaction)
    sim.dt = dt
    if sim.plan is None:
        sim.plan = ConvolutionPlan(sim.grid, sim.kernel, deficit_max=sim.deficit_max,
                                   band_decades=sim.band_decades, workers=sim.workers)
    state = sample_initial_condition(sim.grid, sim.initial)
    buffer = cfg.egress_buffer * sim.grid.half_width
    n_steps = 0 if cfg.t_max == 0 else int(round(cfg.t_max / dt))
    wanted = {min(n_steps, int(round(ts / dt))) for ts in set(cfg.snapshot_times) | {0.0}}
    sim.snapshots.clear()
    sim.diagnostics = Diagnostics()
    logger.info("run: n=%d dx=%.4g dt=%.4g steps=%d deficit=%.3g",
                sim.grid.n, sim.grid.dx, dt, n_steps, sim.plan.deficit)
    for k in range(n_steps + 1):
        if k > 0:
            state = step(state, sim.plan, sim.reaction, dt, cfg.scheme, cfg.range_tol)
            state = Field(state.grid, state.values, k * dt)
        egress = boundary_egress(state, buffer)
        sim.diagnostics.record(state, egress)
        if k in wanted:
            sim.snapshots.append(state)
        if egress > cfg.egress_max:
            logger.warning("egress %.3g exceeds %.3g at t=%.4g; aborting", egress,
                           cfg.egress_max, state.time)
            sim.status = "egress_abort"
            return sim
        if n_steps >= 10 and k % max(1, n_steps // 10) == 0:
            logger.debug("t=%.3f max=%.6f egress=%.3g", state.time, sim.diagnostics.max_u[-1], egress)
    sim.status = "completed"
    return sim


def write_diagnostics_csv(sim: SimulationRun, path: Union[str, Path]) -> None:
    np.savetxt(path, sim.diagnostics.as_array(), fmt="%.17g", delimiter=",",
               header="t,min_u,max_u,mass,egress", comments="")

