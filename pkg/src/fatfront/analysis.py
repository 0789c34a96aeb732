"""Front positions, theoretical envelopes and speed diagnostics.

The front position ``x_lambda(t)`` is the outermost downcrossing of the level
``lambda`` on the grid. For a fat-tailed kernel it is bracketed by

    J^{-1}(exp(-(f'(0) - eps) t)) <= x_lambda(t) <= J^{-1}(exp(-rho t))

for large ``t``; :func:`envelopes` evaluates both bounds and
:func:`theoretical_rho` supplies an admissible ``rho``. For exponentially
bounded or truncated kernels :func:`minimal_speed` gives the linear speed.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
from scipy import optimize

from . import certificates
from .discretization import Field
from .errors import (AbsentCrossingError, DivergenceError, DomainError, HypothesisError,
                     InsufficientSamplesError)
from .kernels import KernelSpec, TruncatedKernel
from .reaction import ReactionSpec

logger = logging.getLogger(__name__)

MIN_FIT_SAMPLES = 5


# -- level sets ---------------------------------------------------------------

def _crossing(x: np.ndarray, u: np.ndarray, lam: float) -> Optional[float]:
    # first i scanning inward with u[i] < lam <= u[i-1]
    hits = np.flatnonzero((u[1:] < lam) & (u[:-1] >= lam))
    if hits.size == 0:
        return None
    i = hits[-1] + 1
    if u[i - 1] == lam:
        return float(x[i - 1])
    frac = (u[i - 1] - lam) / (u[i - 1] - u[i])
    return float(x[i - 1] + frac * (x[i] - x[i - 1]))


def extract_level_set_arrays(x: np.ndarray, u: np.ndarray, lam: float
                             ) -> tuple[Optional[float], Optional[float]]:
    """Outermost downcrossings of ``lam`` on each side, or ``None``."""
    if not 0.0 < lam < 1.0:
        raise DomainError("level must lie in (0, 1)")
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    right = _crossing(x, u, lam)
    left = _crossing(-x[::-1], u[::-1], lam)
    return right, None if left is None else -left


def extract_level_set(field: Field, lam: float) -> tuple[Optional[float], Optional[float]]:
    """Return ``(x_right, x_left)`` for ``u = lam`` on a snapshot.

    Examples
    --------
    >>> import numpy as np
    >>> extract_level_set_arrays(np.array([0.0, 1.0, 2.0]), np.array([0.9, 0.6, 0.1]), 0.2)[0]
    1.8
    """
    return extract_level_set_arrays(field.grid.x, field.values, lam)


@dataclass(frozen=True)
class LevelSetTrace:
    """Front positions of one level over time; ``nan`` marks an absent crossing."""

    lam: float
    t: np.ndarray
    x_right: np.ndarray
    x_left: np.ndarray

    @property
    def present(self) -> np.ndarray:
        return np.isfinite(self.x_right)

    def at(self, t: float) -> float:
        """``x_right`` at the sample closest to ``t``."""
        i = int(np.argmin(np.abs(self.t - t)))
        return float(self.x_right[i])

    @property
    def first_time(self) -> Optional[float]:
        """First sample time where the level set is non-empty."""
        idx = np.flatnonzero(self.present)
        return float(self.t[idx[0]]) if idx.size else None


def trace_level_set(snapshots: Sequence[Field], lam: float) -> LevelSetTrace:
    ts, xr, xl = [], [], []
    for snap in snapshots:
        r, l = extract_level_set(snap, lam)
        ts.append(snap.time)
        xr.append(math.nan if r is None else r)
        xl.append(math.nan if l is None else l)
    return LevelSetTrace(lam, np.array(ts), np.array(xr), np.array(xl))


def _fmt(v: Optional[float]) -> str:
    return "" if v is None or not math.isfinite(v) else f"{v:.17g}"


def write_levelsets_csv(traces: Sequence[LevelSetTrace], path: Union[str, Path]) -> None:
    """Write ``t,lambda,x_right,x_left``; absent crossings are empty fields."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("t,lambda,x_right,x_left\n")
        for tr in traces:
            for t, r, l in zip(tr.t, tr.x_right, tr.x_left):
                fh.write(f"{t:.17g},{tr.lam:.17g},{_fmt(r)},{_fmt(l)}\n")


def read_levelsets_csv(path: Union[str, Path]) -> list[LevelSetTrace]:
    rows: dict[float, list] = {}
    with open(path, encoding="utf-8") as fh:
        next(fh)
        for line in fh:
            t, lam, r, l = line.rstrip("\n").split(",")
            rows.setdefault(float(lam), []).append(
                (float(t), float(r) if r else math.nan, float(l) if l else math.nan))
    out = []
    for lam, vals in rows.items():
        arr = np.array(vals)
        out.append(LevelSetTrace(lam, arr[:, 0], arr[:, 1], arr[:, 2]))
    return out


# -- envelopes ----------------------------------------------------------------

def envelope_position(kernel: KernelSpec, rate: float, t: float) -> float:
    """``J^{-1}(exp(-rate t))``, or 0 while ``exp(-rate t) >= J(0)``."""
    log_y = -rate * t
    if log_y >= math.log(kernel.core_value):
        return 0.0
    return kernel.inverse_tail(log_y=log_y)


@dataclass(frozen=True)
class EnvelopeReport:
    """Lower and upper envelopes at ``times``, with containment flags.

    ``containment[i]`` is ``None`` where the trace has no crossing.
    """

    lam: float
    epsilon: float
    rho: float
    times: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    x_right: np.ndarray
    containment: list

    def contained_after(self, t0: float) -> bool:
        """All present samples with ``t >= t0`` lie inside the envelopes."""
        flags = [c for t, c in zip(self.times, self.containment) if t >= t0 and c is not None]
        return bool(flags) and all(flags)


def envelopes(kernel: KernelSpec, reaction: ReactionSpec, lam: float, epsilon: float,
              rho: float, times: Sequence[float],
              trace: Optional[LevelSetTrace] = None) -> EnvelopeReport:
    """Evaluate ``J^{-1}(e^{-(f'(0)-eps)t})`` and ``J^{-1}(e^{-rho t})``.

    ``epsilon = 0`` is accepted and gives the limiting lower curve.

    Raises
    ------
    DomainError
        If ``epsilon`` is outside ``[0, f'(0))`` or ``rho <= f'(0)``.
    """
    fp = reaction.fprime0
    if not 0.0 <= epsilon < fp:
        raise DomainError(f"epsilon = {epsilon} must lie in [0, f'(0) = {fp})")
    if not rho > fp:
        raise DomainError(f"rho = {rho} must exceed f'(0) = {fp}")
    times = np.asarray(times, dtype=float)
    lower = np.array([envelope_position(kernel, fp - epsilon, t) for t in times])
    upper = np.array([envelope_position(kernel, rho, t) for t in times])
    xr = np.full(times.shape, math.nan)
    flags: list = [None] * times.size
    if trace is not None:
        for i, t in enumerate(times):
            j = int(np.argmin(np.abs(trace.t - t)))
            if abs(trace.t[j] - t) > 1e-9 * max(1.0, abs(t)):
                continue
            xr[i] = trace.x_right[j]
            if math.isfinite(xr[i]):
                flags[i] = bool(lower[i] <= xr[i] <= upper[i])
    return EnvelopeReport(lam, epsilon, rho, times, lower, upper, xr, flags)


def write_envelopes_csv(reports: Sequence[EnvelopeReport], path: Union[str, Path]) -> None:
    """Write ``t,lambda,lower,upper,x_right,contained``."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("t,lambda,lower,upper,x_right,contained\n")
        for rep in reports:
            for t, lo, up, x, c in zip(rep.times, rep.lower, rep.upper, rep.x_right,
                                       rep.containment):
                flag = "absent" if c is None else str(c).lower()
                fh.write(f"{t:.17g},{rep.lam:.17g},{lo:.17g},{up:.17g},{_fmt(x)},{flag}\n")


# -- theoretical rho ----------------------------------------------------------

@dataclass(frozen=True)
class RhoEstimate:
    """``rho`` for the upper envelope; ``path`` is ``"hyp2"`` or ``"hyp1"``."""

    rho: float
    rho0: float
    path: str
    margin: float


def theoretical_rho(kernel: KernelSpec, reaction: ReactionSpec,
                    margin: float = 0.05) -> RhoEstimate:
    """Admissible upper-envelope rate from the supersolution constructions.

    Hypothesis 2 gives ``rho0 = r + K`` and ``rho = rho0 (1 + margin)``.
    Otherwise Hypothesis 1 gives ``rho0`` from the ``varphi`` profile; the
    envelope rate is then ``rho0 / (1 - eps0) (1 + margin)``.

    Raises
    ------
    HypothesisError
        If neither hypothesis holds.
    """
    rep = kernel.classify()
    if rep.hyp2.holds:
        sup = certificates.build_hyp2_supersolution(kernel, reaction)
        rho = sup.rho0 * (1.0 + margin)
        out = RhoEstimate(rho, sup.rho0, "hyp2", margin)
    elif rep.hyp1.holds:
        sup1 = certificates.build_hyp1_supersolution(kernel, reaction)
        rho = sup1.rho0 / (1.0 - sup1.epsilon0) * (1.0 + margin)
        out = RhoEstimate(rho, sup1.rho0, "hyp1", margin)
    else:
        raise HypothesisError(f"{kernel.family} kernel satisfies neither fat-tail hypothesis")
    logger.info("theoretical rho via %s: rho0=%.6g rho=%.6g", out.path, out.rho0, out.rho)
    return out


# -- minimal speed --------------------------------------------------------------

def _moment_fn(kernel):
    """Return ``eta -> D int J_eps e^{eta z}`` and the supremum of admissible ``eta``."""
    if isinstance(kernel, TruncatedKernel):
        return (lambda eta: kernel.D_eps * kernel.exponential_moment(eta)), math.inf
    if kernel.classify().exponentially_unbounded:
        raise DivergenceError(
            f"{kernel.family}: int J e^(eta z) is infinite for every eta > 0; "
            "infinite speed expected")
    return kernel.exponential_moment, float(kernel.rate)


def minimal_speed(kernel: Union[KernelSpec, TruncatedKernel], reaction: ReactionSpec,
                  xtol: float = 1e-8) -> tuple[float, float]:
    """Return ``(c*, eta*)`` minimizing ``(D int J e^{eta z} - 1 + f'(0)) / eta``.

    A bracket is found by doubling ``eta`` (bisecting towards the moment
    abscissa when it is finite), then refined by golden-section search.

    Raises
    ------
    DivergenceError
        For an untruncated exponentially unbounded kernel.
    DomainError
        If ``f'(0) <= 0``.

    Examples
    --------
    >>> from fatfront.kernels import Laplace
    >>> from fatfront.reaction import Logistic
    >>> c, eta = minimal_speed(Laplace(1.0, 0.5), Logistic())
    >>> round(c, 6), round(eta, 6)
    (2.598076, 0.57735)
    """
    fp = reaction.fprime0
    if not fp > 0.0:
        raise DomainError("minimal_speed needs f'(0) > 0")
    moment, eta_max = _moment_fn(kernel)
    h = lambda eta: (moment(eta) - 1.0 + fp) / eta
    up = (lambda e: 2.0 * e) if math.isinf(eta_max) else (
        lambda e: 2.0 * e if 2.0 * e < eta_max else 0.5 * (e + eta_max))
    b = 1e-3 * min(1.0, eta_max)
    a = 0.5 * b
    ha, hb = h(a), h(b)
    if not hb < ha:
        raise DomainError("h is not decreasing near eta = 0")
    c = up(b)
    hc = h(c)
    for _ in range(200):
        if hc >= hb:
            break
        a, b, c = b, c, up(c)
        hb, hc = hc, h(c)
    else:
        raise DomainError("no bracket for the minimal speed")
    probe = np.linspace(a, c, 21)
    vals = np.array([h(e) for e in probe])
    second = vals[2:] - 2.0 * vals[1:-1] + vals[:-2]
    if np.any(second < -1e-9 * np.abs(vals).max()):
        logger.warning("h is not convex on the bracket [%.4g, %.4g]", a, c)
    res = optimize.minimize_scalar(h, bracket=(a, b, c), method="golden",
                                   options={"xtol": xtol})
    return float(res.fun), float(res.x)


# -- empirical speed and flatness ------------------------------------------------

@dataclass(frozen=True)
class SpeedEstimate:
    """Least-squares line through ``x_right(t)`` on ``window``."""

    window: tuple
    slope: float
    intercept: float
    residual: float


def _fit(t: np.ndarray, y: np.ndarray, window) -> SpeedEstimate:
    t0, t1 = window
    m = (t >= t0 - 1e-9) & (t <= t1 + 1e-9) & np.isfinite(y)
    if m.sum() < MIN_FIT_SAMPLES:
        raise InsufficientSamplesError(
            f"window [{t0}, {t1}] has {int(m.sum())} samples; need {MIN_FIT_SAMPLES}")
    slope, intercept = np.polyfit(t[m], y[m], 1)
    rms = float(np.sqrt(np.mean((y[m] - (slope * t[m] + intercept)) ** 2)))
    return SpeedEstimate((float(t0), float(t1)), float(slope), float(intercept), rms)


def empirical_speed(trace: LevelSetTrace, window: tuple) -> SpeedEstimate:
    """Slope of ``x_right`` against ``t`` on ``window``.

    Raises
    ------
    InsufficientSamplesError
        With fewer than five present samples in the window.
    """
    return _fit(trace.t, trace.x_right, window)


def windowed_speeds(trace: LevelSetTrace, count: int = 3,
                    span: Optional[tuple] = None) -> list[SpeedEstimate]:
    """Speeds on ``count`` equal consecutive windows.

    ``span`` defaults to the final two thirds of the sampled times.
    """
    if span is None:
        t_end = float(trace.t.max())
        span = (t_end / 3.0, t_end)
    edges = np.linspace(span[0], span[1], count + 1)
    return [empirical_speed(trace, (a, b)) for a, b in zip(edges[:-1], edges[1:])]


def scaling_fit(trace: LevelSetTrace, window: tuple, kind: str) -> SpeedEstimate:
    """Fit a case-study scaling law on ``window``.

    ``kind`` is ``"power"`` (``ln x`` vs ``ln t``, slope is the exponent) or
    ``"exponential"`` (``ln x`` vs ``t``).
    """
    t, x = trace.t, trace.x_right
    ok = (t > 0) & (x > 0)
    t, x = t[ok], x[ok]
    if kind == "power":
        fit = _fit(np.log(t), np.log(x), (math.log(window[0]), math.log(window[1])))
        return replace(fit, window=(float(window[0]), float(window[1])))
    if kind == "exponential":
        return _fit(t, np.log(x), window)
    raise DomainError(f"unknown scaling kind {kind!r}")


def flatness_width(trace_hi: LevelSetTrace, trace_lo: LevelSetTrace,
                   times: Sequence[float]) -> np.ndarray:
    """``x_right(lambda_lo) - x_right(lambda_hi)`` at each time.

    Raises
    ------
    AbsentCrossingError
        If either level has no crossing at a requested time.
    """
    out = []
    for t in times:
        hi, lo = trace_hi.at(t), trace_lo.at(t)
        if not (math.isfinite(hi) and math.isfinite(lo)):
            raise AbsentCrossingError(f"level set absent at t = {t}")
        out.append(lo - hi)
    return np.array(out)


# -- domain sizing --------------------------------------------------------------

def recommend_domain(kernel: KernelSpec, reaction: ReactionSpec, t_max: float,
                     lambda_min: Optional[float] = None, rho: Optional[float] = None,
                     support: float = 10.0, margin: float = 1.25) -> float:
    """Half-width ``L = margin * J^{-1}(lambda_min * e^{-rho t_max})``, floored at ``4 * support``.

    ``lambda_min=None`` drops the level factor. ``rho=None`` uses
    :func:`theoretical_rho`.
    """
    if rho is None:
        rho = theoretical_rho(kernel, reaction).rho
    log_y = -rho * t_max + (0.0 if lambda_min is None else math.log(lambda_min))
    x = 0.0 if log_y >= math.log(kernel.core_value) else kernel.inverse_tail(log_y=log_y)
    return max(margin * x, 4.0 * support)
