"""Uniform grids, sampled fields and fast linear convolution with ``J``.

The convolution is the hot spot of every run. A single zero-padded FFT has an
absolute error of about ``1e-16 * max|u|`` everywhere, and on the far side of
an accelerating front that noise sits on top of values many decades smaller.
The unstable state ``u = 0`` then amplifies it like ``exp(t)``. To keep the
far field clean the convolver splits both the field and the kernel into
magnitude bands (``band_decades`` decades each) and convolves every pair of
bands separately with its own FFT. The error of each pair is then relative to
the size of the band it produces. Pairs whose product cannot exceed ``floor``
are skipped.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Optional, Union

import numpy as np
from scipy import fft as sfft

from .errors import DomainError, GridMismatchError
from .kernels import KernelSpec

logger = logging.getLogger(__name__)

DEFAULT_BAND_DECADES = 4.0
DEFAULT_FLOOR = 1e-60


@dataclass(frozen=True)
class Grid1D:
    """``n`` points ``x_i = -L + i dx`` on ``[-L, L]`` with ``dx = 2L/(n-1)``."""

    half_width: float
    n: int

    def __post_init__(self):
        if not self.half_width > 0.0:
            raise DomainError("grid half width must be positive")
        if self.n < 16 or self.n % 2:
            raise DomainError(f"grid needs an even n >= 16, got {self.n}")

    @classmethod
    def from_spacing(cls, half_width: float, dx: float) -> "Grid1D":
        """Grid on ``[-L, L]`` with spacing close to (never above) ``dx``."""
        n = int(math.ceil(2.0 * half_width / dx - 1e-9)) + 1
        return cls(half_width, max(16, n + n % 2))

    @property
    def dx(self) -> float:
        return 2.0 * self.half_width / (self.n - 1)

    @cached_property
    def x(self) -> np.ndarray:
        x = -self.half_width + np.arange(self.n) * self.dx
        x.flags.writeable = False
        return x


@dataclass(frozen=True, eq=False)
class Field:
    """Samples of ``u(t, .)`` on a grid."""

    grid: Grid1D
    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        if self.values.shape != (self.grid.n,):
            raise GridMismatchError("field length does not match its grid")

    def mass(self) -> float:
        return float(self.values.sum() * self.grid.dx)


# -- initial conditions -------------------------------------------------------

@dataclass(frozen=True)
class Bump:
    """``max(1 - (x/radius)**2, 0)``."""

    radius: float = 10.0

    @property
    def support_radius(self) -> float:
        return self.radius

    @property
    def integral(self) -> float:
        return 4.0 * self.radius / 3.0

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.maximum(1.0 - (x / self.radius) ** 2, 0.0)
        return out if np.ndim(out) else float(out)

    def sample(self, grid: Grid1D) -> np.ndarray:
        return self(grid.x)


@dataclass(frozen=True)
class Indicator:
    """Indicator of ``[-radius, radius]``, sampled as cell averages.

    Cell averaging makes the sampled profile a continuous piecewise-linear
    ramp one cell wide at each edge.
    """

    radius: float = 10.0

    @property
    def support_radius(self) -> float:
        return self.radius

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = (np.abs(x) <= self.radius).astype(float)
        return out if np.ndim(out) else float(out)

    def sample(self, grid: Grid1D) -> np.ndarray:
        return np.clip((self.radius - np.abs(grid.x)) / grid.dx + 0.5, 0.0, 1.0)


@dataclass(frozen=True)
class Custom:
    """Tabulated profile, linearly interpolated and zero outside the table."""

    xs: tuple
    us: tuple

    def __post_init__(self):
        xs, us = np.asarray(self.xs, float), np.asarray(self.us, float)
        if xs.ndim != 1 or xs.shape != us.shape or xs.size < 2:
            raise DomainError("custom profile needs matching 1-D tables")
        if np.any(np.diff(xs) <= 0):
            raise DomainError("custom profile abscissae must increase")
        if us.min() < 0.0 or us.max() > 1.0:
            raise DomainError("custom profile values must lie in [0, 1]")

    @property
    def support_radius(self) -> float:
        return float(max(abs(self.xs[0]), abs(self.xs[-1])))

    def __call__(self, x):
        out = np.interp(np.asarray(x, float), self.xs, self.us, left=0.0, right=0.0)
        return out if np.ndim(out) else float(out)

    def sample(self, grid: Grid1D) -> np.ndarray:
        return self(grid.x)


InitialShape = Union[Bump, Indicator, Custom]


def sample_initial_condition(grid: Grid1D, shape: InitialShape) -> Field:
    """Sample ``u0`` on the grid.

    Raises
    ------
    DomainError
        If the support of ``u0`` does not fit strictly inside ``[-L, L]`` or
        the sampled field vanishes.
    """
    if shape.support_radius >= grid.half_width:
        raise DomainError(
            f"initial support radius {shape.support_radius} exceeds half width {grid.half_width}")
    values = np.asarray(shape.sample(grid), dtype=float)
    if not values.max() > 0.0:
        raise DomainError("initial condition is identically zero on the grid")
    return Field(grid, values, 0.0)


# -- banded convolution -------------------------------------------------------

class BandedConvolver:
    """Linear convolution with a symmetric kernel, band by band.

    Parameters
    ----------
    half_weights : ndarray
        Weights ``w_k`` for offsets ``k = 0 .. m-1``; the kernel is
        ``w_{|k|}``.
    band_decades : float or None
        Width of a magnitude band in decades. ``None`` disables banding and
        uses one FFT.
    floor : float
        Products of band maxima below this value are dropped.
    workers : int, optional
        Passed to :mod:`scipy.fft`.
    """

    def __init__(self, half_weights: np.ndarray, band_decades: Optional[float] = DEFAULT_BAND_DECADES,
                 floor: float = DEFAULT_FLOOR, workers: Optional[int] = None):
        wh = np.asarray(half_weights, dtype=float)
        if np.any(wh < 0):
            raise DomainError("kernel weights must be nonnegative")
        self.half_weights = wh
        self.band_decades = band_decades
        self.floor = floor
        self.workers = workers
        self._cache: dict = {}
        self.bands = []
        if band_decades is None:
            self.bands.append(self._band(np.arange(wh.size)))
            return
        lev = np.full(wh.size, -1)
        pos = wh > 0
        lev[pos] = np.floor((np.log10(wh.max()) - np.log10(wh[pos])) / band_decades).astype(int)
        for m in range(lev.max() + 1):
            ks = np.flatnonzero(lev == m)
            if ks.size:
                self.bands.append(self._band(ks))

    def _band(self, ks: np.ndarray):
        wh = self.half_weights
        reach = int(ks.max()) + 1
        arr = np.zeros(2 * reach - 1)
        arr[reach - 1 + ks] = wh[ks]
        arr[reach - 1 - ks] = wh[ks]
        return reach, arr, float(wh[ks].max()) if ks.size else 0.0

    def _spectrum(self, b: int, nfft: int) -> np.ndarray:
        key = (b, nfft)
        spec = self._cache.get(key)
        if spec is None:
            spec = sfft.rfft(self.bands[b][1], nfft, workers=self.workers)
            self._cache[key] = spec
        return spec

    def _segments(self, u: np.ndarray):
        au = np.abs(u)
        umax = au.max()
        if self.band_decades is None:
            return [(0, u, umax)]
        pos = au > 0
        lev = np.full(u.size, -1)
        lev[pos] = np.floor(np.log10(umax / au[pos]) / self.band_decades).astype(int)
        segs = []
        for level in np.unique(lev[pos]):
            idx = np.flatnonzero(lev == level)
            p0, p1 = idx[0], idx[-1]
            seg = np.zeros(p1 - p0 + 1)
            seg[idx - p0] = u[idx]
            segs.append((p0, seg, au[idx].max()))
        return segs

    def __call__(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        n = u.size
        out = np.zeros(n)
        if not np.any(u):
            return out
        for p0, seg, umax in self._segments(u):
            for b, (reach, arr, wmax) in enumerate(self.bands):
                if umax * wmax < self.floor:
                    continue
                length = seg.size + arr.size - 1
                nfft = sfft.next_fast_len(length, real=True)
                prod = sfft.rfft(seg, nfft, workers=self.workers) * self._spectrum(b, nfft)
                r = sfft.irfft(prod, nfft, workers=self.workers)[:length]
                start = p0 - (reach - 1)
                lo, hi = max(0, start), min(n, start + length)
                out[lo:hi] += r[lo - start:hi - start]
        return out


class ConvolutionPlan:
    """Kernel weights on a grid plus the machinery to apply them.

    The weight of offset ``k`` is the exact kernel mass of the cell
    ``[(k - 1/2) dx, (k + 1/2) dx]``, so the weights never sum above one and
    ``deficit = 1 - sum(w)`` equals the kernel mass beyond ``(n - 1/2) dx``.

    Raises
    ------
    DomainError
        If ``deficit`` exceeds ``deficit_max``.
    """

    def __init__(self, grid: Grid1D, kernel: KernelSpec, *, deficit_max: float = 1e-3,
                 band_decades: Optional[float] = DEFAULT_BAND_DECADES,
                 floor: float = DEFAULT_FLOOR, workers: Optional[int] = None):
        self.grid = grid
        self.kernel = kernel
        self.deficit_max = deficit_max
        n, dx = grid.n, grid.dx
        k = np.arange(1, n)
        wh = np.empty(n)
        wh[0] = kernel.interval_mass(-0.5 * dx, 0.5 * dx)
        wh[1:] = kernel.interval_mass((k - 0.5) * dx, (k + 0.5) * dx)
        self.half_weights = wh
        self.deficit = 2.0 * float(kernel.tail_mass((n - 0.5) * dx))
        drift = abs(1.0 - math.fsum(self.kernel_samples) - self.deficit)
        if drift > 1e-12:
            logger.warning("kernel weights miss unit mass by %.3g beyond the deficit", drift)
        if self.deficit > deficit_max:
            raise DomainError(
                f"kernel deficit {self.deficit:.3g} exceeds deficit_max {deficit_max:.3g}; "
                "enlarge the domain")
        self._conv = BandedConvolver(wh, band_decades, floor, workers)

    @cached_property
    def kernel_samples(self) -> np.ndarray:
        """Full symmetric weight array for offsets ``-(n-1) .. n-1``."""
        wh = self.half_weights
        return np.concatenate([wh[:0:-1], wh])

    def apply(self, values: np.ndarray, method: str = "banded") -> np.ndarray:
        """Return ``sum_j w_{i-j} values_j`` for every grid index ``i``."""
        if values.shape != (self.grid.n,):
            raise GridMismatchError("array length does not match the plan grid")
        if method == "banded":
            return self._conv(values)
        n = self.grid.n
        if method == "direct":
            return np.convolve(values, self.kernel_samples)[n - 1:2 * n - 1]
        if method == "fft":
            return _plain_fft(values, self.kernel_samples)[n - 1:2 * n - 1]
        raise DomainError(f"unknown convolution method {method!r}")


def _plain_fft(u: np.ndarray, w: np.ndarray) -> np.ndarray:
    length = u.size + w.size - 1
    nfft = sfft.next_fast_len(length, real=True)
    return sfft.irfft(sfft.rfft(u, nfft) * sfft.rfft(w, nfft), nfft)[:length]


def _check(plan: ConvolutionPlan, field: Field) -> None:
    if field.grid != plan.grid:
        raise GridMismatchError("field grid differs from the plan grid")


def convolve(plan: ConvolutionPlan, field: Field, method: str = "banded") -> Field:
    """Return ``J * u`` on the grid (zero padding outside ``[-L, L]``)."""
    _check(plan, field)
    return Field(plan.grid, plan.apply(field.values, method), field.time)


def nonlocal_operator(plan: ConvolutionPlan, field: Field, method: str = "banded") -> Field:
    """Return ``J * u - u``."""
    _check(plan, field)
    return Field(plan.grid, plan.apply(field.values, method) - field.values, field.time)


def boundary_egress(field: Field, buffer: float) -> float:
    """Largest ``|u|`` on the band ``|x| >= L - buffer``."""
    L = field.grid.half_width
    if not 0.0 <= buffer < L:
        raise DomainError("egress buffer must lie in [0, L)")
    band = np.abs(field.grid.x) >= L - buffer - 1e-12 * L
    return float(np.abs(field.values[band]).max())


# -- CSV ----------------------------------------------------------------------

def write_field_csv(field: Field, path: Union[str, Path]) -> None:
    """Write ``x,u`` rows with 17 significant digits."""
    data = np.column_stack([field.grid.x, field.values])
    np.savetxt(path, data, fmt="%.17g", delimiter=",", header="x,u", comments="")


def read_field_csv(path: Union[str, Path], time: float = 0.0) -> Field:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    x = data[:, 0]
    grid = Grid1D(float(-x[0]), x.size)
    return Field(grid, data[:, 1].copy(), time)


def snapshot_name(index: int) -> str:
    return f"u_{index:04d}.csv"

