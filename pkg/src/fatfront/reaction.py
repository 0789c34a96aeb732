"""Monostable reaction terms ``f`` and the constants the theory needs.

Two polynomial families are provided. ``Logistic`` is the KPP case
``s (1 - s)``; ``WeakAllee(a)`` multiplies it by ``1 + a s`` so that the
per-capita rate ``f(s)/s`` peaks away from zero when ``a > 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

from .errors import DomainError, VerificationError

ArrayLike = Union[float, np.ndarray]

RANGE_TOL = 1e-8
_ENVELOPE_TOL = 1e-12


class KPPEnvelope(NamedTuple):
    """Constants with ``f(s) >= f'(0) s - M s**(1 + delta)`` on ``[0, s0]``."""

    M: float
    delta: float
    s0: float


@dataclass(frozen=True)
class ReactionSpec:
    """Base class; subclasses define ``_poly`` and the analytic constants."""

    family = "abstract"

    def _poly(self, s: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, s: ArrayLike) -> ArrayLike:
        """Evaluate ``f`` without the range check (hot-loop path)."""
        out = self._poly(np.asarray(s, dtype=float))
        return out if np.ndim(out) else float(out)

    def evaluate(self, s: ArrayLike) -> ArrayLike:
        """Evaluate ``f`` on ``[0, 1]``, tolerating excursions of ``1e-8``.

        Raises
        ------
        DomainError
            If some ``s`` lies further than ``1e-8`` outside ``[0, 1]``.
        """
        arr = np.asarray(s, dtype=float)
        if np.any(arr < -RANGE_TOL) or np.any(arr > 1.0 + RANGE_TOL):
            raise DomainError("reaction evaluated outside [0, 1]")
        return self(arr)

    @property
    def fprime0(self) -> float:
        raise NotImplementedError

    @property
    def r_sup(self) -> float:
        raise NotImplementedError

    @property
    def max_abs_fprime(self) -> float:
        raise NotImplementedError

    def _envelope(self) -> KPPEnvelope:
        return KPPEnvelope(M=1.0, delta=1.0, s0=1.0)

    def kpp_envelope(self, s0: float | None = None, n: int = 10_000) -> KPPEnvelope:
        """Return ``(M, delta, s0)`` after checking the envelope on a grid.

        Raises
        ------
        VerificationError
            If the stored constants fail on the sampling grid.
        """
        env = self._envelope()
        if s0 is not None:
            if not 0.0 < s0 <= env.s0:
                raise DomainError(f"s0 must lie in (0, {env.s0}]")
            env = env._replace(s0=s0)
        s = np.linspace(0.0, env.s0, n)
        gap = self(s) - (self.fprime0 * s - env.M * s ** (1.0 + env.delta))
        if gap.min() < -_ENVELOPE_TOL:
            raise VerificationError(f"{self.family}: KPP envelope fails by {-gap.min():.3g}")
        return env

    def to_dict(self) -> dict:
        return {"family": self.family}


@dataclass(frozen=True)
class Logistic(ReactionSpec):
    family = "logistic"

    def _poly(self, s):
        return s * (1.0 - s)

    @property
    def fprime0(self) -> float:
        return 1.0

    @property
    def r_sup(self) -> float:
        return 1.0

    @property
    def max_abs_fprime(self) -> float:
        # f'(s) = 1 - 2s
        return 1.0


@dataclass(frozen=True)
class WeakAllee(ReactionSpec):
    """``f(s) = s (1 - s) (1 + a s)`` with ``a > 0``."""

    a: float = 1.0
    family = "weak_allee"

    def __post_init__(self):
        if not self.a > 0.0:
            raise DomainError("WeakAllee needs a > 0")

    def _poly(self, s):
        return s * (1.0 - s) * (1.0 + self.a * s)

    @property
    def fprime0(self) -> float:
        return 1.0

    @property
    def r_sup(self) -> float:
        # (1 - s)(1 + a s) peaks at s = (a - 1) / (2a)
        a = self.a
        return (1.0 + a) ** 2 / (4.0 * a) if a > 1.0 else 1.0

    @property
    def max_abs_fprime(self) -> float:
        # f'(s) = 1 + 2(a - 1)s - 3a s^2, a concave parabola
        a = self.a
        cands = [1.0, abs(1.0 + 2.0 * (a - 1.0) - 3.0 * a)]
        vertex = (a - 1.0) / (3.0 * a)
        if 0.0 < vertex < 1.0:
            cands.append(abs(1.0 + (a - 1.0) ** 2 / (3.0 * a)))
        return max(cands)

    def to_dict(self) -> dict:
        return {"family": self.family, "a": self.a}


def evaluate_f(reaction: ReactionSpec, s: ArrayLike) -> ArrayLike:
    return reaction.evaluate(s)


def sup_per_capita_rate(reaction: ReactionSpec) -> float:
    return reaction.r_sup


def kpp_envelope_params(reaction: ReactionSpec, s0: float | None = None) -> KPPEnvelope:
    return reaction.kpp_envelope(s0)


def from_dict(block: dict) -> ReactionSpec:
    """Build a reaction from a config block such as ``{"family": "logistic"}``."""
    params = dict(block)
    family = params.pop("family", None)
    classes = {"logistic": Logistic, "weak_allee": WeakAllee}
    if family not in classes:
        raise DomainError(f"unknown reaction family {family!r}; expected one of {sorted(classes)}")
    try:
        return classes[family](**params)
    except TypeError as exc:
        raise DomainError(f"bad parameters for {family}: {exc}") from None
