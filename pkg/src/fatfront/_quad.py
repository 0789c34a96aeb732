"""Thin wrappers around ``scipy.integrate.quad`` with explicit failure modes."""

from __future__ import annotations

import math
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
from scipy import integrate

from .errors import QuadratureError

_SLACK = 100.0
_MIN_EPSREL = 1.2e-14


def quad_checked(
    f: Callable[[float], float],
    a: float,
    b: float,
    *,
    epsabs: float = 1e-13,
    epsrel: float = 1e-12,
    points: Optional[Iterable[float]] = None,
    limit: int = 200,
) -> float:
    """Integrate ``f`` over the finite interval ``[a, b]``.

    Raises
    ------
    QuadratureError
        If the reported error estimate exceeds the tolerance by a wide margin.
    """
    if b <= a:
        return 0.0
    epsrel = max(epsrel, _MIN_EPSREL)
    pts = None
    if points is not None:
        pts = sorted({p for p in points if a < p < b})
        pts = pts or None
    out = integrate.quad(f, a, b, epsabs=epsabs, epsrel=epsrel, points=pts,
                         limit=limit, full_output=1)
    value, err = out[0], out[1]
    if not math.isfinite(value):
        raise QuadratureError(f"non-finite integral on [{a}, {b}]")
    if err > _SLACK * max(epsabs, epsrel * abs(value)):
        raise QuadratureError(
            f"quadrature on [{a:.6g}, {b:.6g}] did not converge (err={err:.3g})")
    return value


def integrate_to_infinity(
    f: Callable[[float], float],
    a: float,
    *,
    scale: float,
    epsabs: float = 1e-13,
    epsrel: float = 1e-12,
    remainder: Optional[Callable[[float], float]] = None,
    max_chunks: int = 200,
) -> float:
    """Integrate a decaying integrand over ``[a, inf)`` in doubling chunks.

    Parameters
    ----------
    f : callable
        Integrand, assumed eventually nonincreasing in magnitude.
    a : float
        Lower limit.
    scale : float
        Length of the first chunk; later chunks double.
    remainder : callable, optional
        ``remainder(y)`` bounds ``|int_y^inf f|``. Integration stops once it
        falls below ``epsabs / 10``. Without it, the loop stops when a chunk
        contributes less than ``epsrel`` of the running total.
    """
    total = 0.0
    lo, h = a, scale
    for _ in range(max_chunks):
        hi = lo + h
        piece = quad_checked(f, lo, hi, epsabs=epsabs / 4, epsrel=epsrel)
        total += piece
        if remainder is not None:
            if remainder(hi) <= epsabs / 10:
                return total
        elif abs(piece) <= epsrel * abs(total) or (total == 0.0 and f(hi) == 0.0):
            return total
        lo, h = hi, 2.0 * h
    raise QuadratureError(f"tail integral from {a:.6g} did not settle")


def integrate_pieces(
    f: Callable[[np.ndarray], np.ndarray],
    edges: Sequence[float],
    *,
    atol: float,
    rtol: float = 1e-12,
) -> float:
    """Integrate a vectorized ``f`` over consecutive ``[edges[i], edges[i+1]]``.

    Edges may start at ``-inf`` and end at ``inf``. All pieces run through
    one tanh-sinh call; ``atol`` applies to the sum.

    Pieces that tanh-sinh cannot settle are redone with adaptive QUADPACK.

    Raises
    ------
    QuadratureError
        If a piece fails under both rules.
    """
    e = np.asarray(edges, dtype=float)
    a, b = e[:-1], e[1:]
    keep = b > a
    a, b = a[keep], b[keep]
    if a.size == 0:
        return 0.0
    res = integrate.tanhsinh(f, a, b, atol=atol / a.size, rtol=rtol)
    vals = np.array(res.integral, dtype=float, ndmin=1)
    # rounding near a cusp can stall tanh-sinh; redo those pieces with QUADPACK
    for i in np.flatnonzero(~np.array(res.success, ndmin=1) | ~np.isfinite(vals)):
        vals[i] = _quad_any(f, a[i], b[i], atol / a.size, rtol)
    return float(vals.sum())


def _quad_any(f, a: float, b: float, atol: float, rtol: float) -> float:
    g = lambda y: float(f(np.float64(y)))
    if math.isfinite(a) and math.isfinite(b):
        return quad_checked(g, a, b, epsabs=atol, epsrel=rtol)
    out = integrate.quad(g, a, b, epsabs=atol, epsrel=max(rtol, _MIN_EPSREL),
                         limit=200, full_output=1)
    value, err = out[0], out[1]
    if not math.isfinite(value) or err > _SLACK * max(atol, rtol * abs(value)):
        raise QuadratureError(f"quadrature on [{a:.6g}, {b:.6g}] did not converge (err={err:.3g})")
    return value
