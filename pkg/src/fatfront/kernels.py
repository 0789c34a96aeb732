"""Dispersal kernels: families, normalization, classification and tails.

Every kernel is even, continuous, positive and nonincreasing on ``[0, inf)``.
A family is defined by a *profile* ``p(s)`` valid for ``s >= splice_radius``;
inside the splice radius the kernel is held at the constant ``p(splice_radius)``.
The user supplies a prefactor ``C`` and the class rescales it so that the total
mass is one, recording the multiplier in :attr:`KernelSpec.normalization`.

Examples
--------
>>> from fatfront.kernels import StretchedExp
>>> J = StretchedExp(alpha=0.5, beta=1.0, C=0.25)
>>> round(float(J(4.0)), 6)
0.033834
>>> round(J.inverse_tail(y=1e-3), 4)
30.4865
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy import optimize, special

from ._quad import integrate_to_infinity, quad_checked
from .errors import DivergenceError, DomainError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)
_MASS_TOL = 1e-10


def _gamma_window(s: float, xa: np.ndarray, xb: np.ndarray) -> np.ndarray:
    """Return ``int_xa^xb v**(s-1) exp(-v) dv`` elementwise (``xb`` may be inf)."""
    upper = special.gammaincc(s, xa) - special.gammaincc(s, xb)
    lower = special.gammainc(s, xb) - special.gammainc(s, xa)
    return special.gamma(s) * np.where(xa >= s, upper, lower)


@dataclass(frozen=True)
class Hyp1Report:
    holds: bool
    sigma: float
    epsilon0: float


@dataclass(frozen=True)
class Hyp2Report:
    holds: bool
    ratio_bound: float


@dataclass(frozen=True)
class HypothesisReport:
    """Outcome of :meth:`KernelSpec.classify`."""

    exponentially_unbounded: bool
    hyp1: Hyp1Report
    hyp2: Hyp2Report


class KernelSpec:
    """Base class of the kernel families.

    Subclasses are frozen dataclasses holding the family parameters and ``C``.
    They implement the profile hooks ``_splice``, ``_log_profile``,
    ``_profile_moment``, ``_inverse_log_profile`` and ``_ratio``.
    """

    family: str = "abstract"
    exponentially_unbounded: bool = True

    # filled in by _finalize
    splice_radius: float
    normalization: float
    amplitude: float
    core_value: float

    # -- family hooks -----------------------------------------------------
    def _splice(self) -> float:
        return 0.0

    def _log_profile(self, s: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _profile_moment(self, a: np.ndarray, b: np.ndarray, k: int) -> np.ndarray:
        raise NotImplementedError

    def _inverse_log_profile(self, q: float) -> float:
        """Solve ``-log p(s) = q`` for ``s >= splice_radius``."""
        return self._bisect_inverse(q)

    def _ratio(self, s: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _monotone_from(self) -> float:
        """Left end of the region where the log-derivative ratio is nonincreasing."""
        return self.splice_radius

    def _epsilon0(self) -> float:
        return 0.5

    def _power_integrable(self, eps: float) -> bool:
        return eps > 0.0

    def _hyp2_bound(self) -> float:
        return math.inf

    # -- construction -----------------------------------------------------
    def _finalize(self) -> None:
        R = float(self._splice())
        object.__setattr__(self, "splice_radius", R)
        raw_core = math.exp(float(self._log_profile(np.float64(R))))
        raw_half = R * raw_core + float(self._profile_moment(
            np.float64(R), np.float64(np.inf), 0))
        raw_mass = 2.0 * self.C * raw_half
        if not math.isfinite(raw_mass) or raw_mass <= 0.0:
            raise DivergenceError(f"{self.family}: kernel mass is not finite")
        norm = 1.0 / raw_mass
        object.__setattr__(self, "normalization", norm)
        object.__setattr__(self, "amplitude", self.C * norm)
        object.__setattr__(self, "core_value", self.C * norm * raw_core)
        object.__setattr__(self, "_log_amplitude", math.log(self.C * norm))
        logger.debug("%s normalized with multiplier %.17g", self.family, norm)

    # -- evaluation -------------------------------------------------------
    def _radial(self, x: ArrayLike) -> np.ndarray:
        return np.maximum(np.abs(np.asarray(x, dtype=float)), self.splice_radius)

    def log_value(self, x: ArrayLike) -> ArrayLike:
        """Return ``ln J(x)``; finite even where ``J`` underflows."""
        out = self._log_amplitude + self._log_profile(self._radial(x))
        return out if np.ndim(out) else float(out)

    def __call__(self, x: ArrayLike) -> ArrayLike:
        out = self.amplitude * np.exp(self._log_profile(self._radial(x)))
        return out if np.ndim(out) else float(out)

    # -- moments and tails ------------------------------------------------
    def _half_moment(self, a: np.ndarray, b: np.ndarray, k: int) -> np.ndarray:
        """``int_a^b s**k J(s) ds`` for ``0 <= a <= b`` (``b`` may be inf)."""
        R = self.splice_radius
        raw_core = self.core_value / self.amplitude
        lo, hi = np.minimum(a, R), np.minimum(b, R)
        core = raw_core * (hi ** (k + 1) - lo ** (k + 1)) / (k + 1)
        plo, phi = np.maximum(a, R), np.maximum(b, R)
        prof = np.zeros(np.broadcast(plo, phi).shape)
        live = np.broadcast_to(phi > plo, prof.shape)
        if np.any(live):
            pl = np.broadcast_to(plo, prof.shape)[live]
            ph = np.broadcast_to(phi, prof.shape)[live]
            prof[live] = self._profile_moment(pl, ph, k)
        return self.amplitude * (core + prof)

    def partial_moment(self, a: ArrayLike, b: ArrayLike, k: int = 0) -> ArrayLike:
        """Return ``int_a^b s**k J(s) ds`` for ``a <= b`` anywhere on the line."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        if np.any(b < a):
            raise DomainError("partial_moment needs a <= b")
        pos = self._half_moment(np.maximum(a, 0.0), np.maximum(b, 0.0), k)
        neg = self._half_moment(-np.minimum(b, 0.0), -np.minimum(a, 0.0), k)
        out = pos + (-1.0) ** k * neg
        return out if np.ndim(out) else float(out)

    def interval_mass(self, a: ArrayLike, b: ArrayLike) -> ArrayLike:
        """Return ``int_a^b J``."""
        return self.partial_moment(a, b, 0)

    def tail_mass(self, a: ArrayLike) -> ArrayLike:
        """Return ``int_a^inf J`` (for ``a < 0`` the complement is used)."""
        a = np.asarray(a, dtype=float)
        tail = self._half_moment(np.abs(a), np.full_like(a, np.inf), 0)
        out = np.where(a >= 0, tail, 1.0 - tail)
        return out if np.ndim(out) else float(out)

    def mass_and_first_moment(self) -> tuple[float, float]:
        """Return ``(int J, int |x| J)``.

        Raises
        ------
        DivergenceError
            If the first moment is infinite.
        """
        zero, inf = np.float64(0.0), np.float64(np.inf)
        mass = 2.0 * float(self._half_moment(zero, inf, 0))
        first = 2.0 * float(self._half_moment(zero, inf, 1))
        if not math.isfinite(first):
            raise DivergenceError(f"{self.family}: first moment diverges")
        return mass, first

    # -- inverse ----------------------------------------------------------
    def _bisect_inverse(self, q: float) -> float:
        R = self.splice_radius
        g = lambda s: -float(self._log_profile(np.float64(s))) - q
        lo = R
        hi = max(2.0 * R, 1.0)
        while g(hi) < 0.0:
            lo, hi = hi, 2.0 * hi
            if hi > 1e300:
                raise DomainError("inverse_tail bracket exploded")
        if g(lo) >= 0.0:
            return lo
        return optimize.brentq(g, lo, hi, xtol=1e-300, rtol=1e-14, maxiter=500)

    def inverse_tail(self, y: Optional[float] = None, *,
                     log_y: Optional[float] = None) -> float:
        """Return the unique ``x >= 0`` with ``J(x) = y``.

        Pass ``log_y`` instead of ``y`` when ``y`` would underflow.

        Raises
        ------
        DomainError
            If ``y <= 0`` or ``y > J(0)``.
        """
        if log_y is None:
            if y is None or not y > 0.0:
                raise DomainError(f"inverse_tail needs y > 0, got {y}")
            log_y = math.log(y)
        log_peak = math.log(self.core_value)
        slack = 1e-13 * max(1.0, abs(log_peak))
        if log_y > log_peak + slack:
            raise DomainError(f"y = exp({log_y:.6g}) exceeds J(0) = {self.core_value:.6g}")
        if log_y >= log_peak - slack:
            return 0.0
        return float(self._inverse_log_profile(self._log_amplitude - log_y))

    # -- derivatives and classification ------------------------------------
    def log_derivative_ratio(self, x: ArrayLike) -> ArrayLike:
        """Return ``|J'(x) / J(x)|`` in the formula region ``|x| > splice_radius``."""
        s = np.abs(np.asarray(x, dtype=float))
        if np.any(s <= self.splice_radius):
            raise DomainError("log_derivative_ratio is undefined inside the splice region")
        out = self._ratio(s)
        return out if np.ndim(out) else float(out)

    def right_log_slope(self, x: ArrayLike) -> ArrayLike:
        """One-sided ``|J'/J|`` from the formula for ``|x| >= splice_radius``; 0 inside."""
        s = np.abs(np.asarray(x, dtype=float))
        with np.errstate(divide="ignore"):
            ratio = self._ratio(np.maximum(s, self.splice_radius))
        out = np.where(s >= self.splice_radius, ratio, 0.0)
        return out if np.ndim(out) else float(out)

    def _hyp1_sigma(self) -> float:
        sigma = max(self._monotone_from(), 1.0)
        if self(sigma) >= 1.0:
            sigma = max(sigma, self.inverse_tail(0.5))
        return sigma

    def classify(self) -> HypothesisReport:
        """Report which fat-tail hypotheses the family satisfies."""
        unbounded = self.exponentially_unbounded
        if unbounded:
            eps0 = self._epsilon0()
            hyp1 = Hyp1Report(self._power_integrable(eps0), self._hyp1_sigma(), eps0)
        else:
            hyp1 = Hyp1Report(False, math.nan, math.nan)
        bound = self._hyp2_bound()
        hyp2 = Hyp2Report(unbounded and math.isfinite(bound), bound)
        return HypothesisReport(unbounded, hyp1, hyp2)

    # -- truncation and exponential moments ----------------------------------
    def truncate(self, eps: float) -> "TruncatedKernel":
        """Restrict to ``[-A, A]`` with ``int_{-A}^{A} J = 1 - eps`` and renormalize."""
        if not 0.0 < eps < 1.0:
            raise DomainError(f"truncate needs 0 < eps < 1, got {eps}")
        target = 0.5 * eps
        g = lambda a: float(self.tail_mass(a)) - target
        hi = max(self.splice_radius, 1.0)
        while g(hi) > 0.0:
            hi *= 2.0
        A = optimize.brentq(g, 0.0, hi, xtol=1e-14, rtol=1e-15, maxiter=500)
        D = 1.0 - eps
        window = float(self.interval_mass(-A, A))
        if abs(window - D) > _MASS_TOL:
            raise DomainError(f"truncation window mass {window!r} misses 1 - eps")
        return TruncatedKernel(self, A, D)

    def exponential_moment(self, eta: float) -> float:
        """Return ``int J(z) exp(eta z) dz``.

        Raises
        ------
        DivergenceError
            For any ``eta > 0`` on an exponentially unbounded kernel.
        """
        if eta < 0.0:
            raise DomainError("exponential_moment needs eta >= 0")
        if eta == 0.0:
            return self.mass_and_first_moment()[0]
        raise DivergenceError(
            f"{self.family}: int J exp(eta z) is infinite for eta > 0")


@dataclass(frozen=True)
class LogSublinear(KernelSpec):
    """``C exp(-alpha |x| / ln|x|)`` for ``|x| > e**2``, flat inside."""

    alpha: float
    C: float = 1.0
    family = "log_sublinear"

    def __post_init__(self):
        if self.alpha <= 0 or self.C <= 0:
            raise DomainError("LogSublinear needs alpha > 0 and C > 0")
        self._finalize()

    def _splice(self) -> float:
        return math.e ** 2

    def _log_profile(self, s):
        return -self.alpha * s / np.log(s)

    def _ratio(self, s):
        ln = np.log(s)
        return self.alpha * (ln - 1.0) / ln ** 2

    def _profile_moment(self, a, b, k):
        shape = np.broadcast(np.asarray(a), np.asarray(b)).shape
        a, b = np.broadcast_arrays(np.atleast_1d(np.asarray(a, dtype=float)),
                                   np.atleast_1d(np.asarray(b, dtype=float)))
        out = np.empty(a.shape)
        short = np.isfinite(b) & (b - a <= 64.0)
        if np.any(short):
            # composite 16-point Gauss-Legendre on panels of width <= 2
            panels = max(1, math.ceil(float(np.max(b[short] - a[short])) / 2.0))
            edges = np.linspace(a[short], b[short], panels + 1, axis=-1)
            mid = 0.5 * (edges[:, 1:] + edges[:, :-1])[..., None]
            half = 0.5 * (edges[:, 1:] - edges[:, :-1])[..., None]
            s = mid + half * _GL_X
            vals = s ** k * np.exp(self._log_profile(s))
            out[short] = (half * vals * _GL_W).sum(axis=(1, 2))
        f = lambda s: s ** k * math.exp(-self.alpha * s / math.log(s))
        scale = max(1.0, 4.0 / self.alpha)
        for i in np.flatnonzero(~short):
            lo, hi = float(a[i]), float(b[i])
            if math.isinf(hi):
                out[i] = integrate_to_infinity(f, lo, scale=scale, epsabs=0.0, epsrel=1e-14)
            else:
                out[i] = quad_checked(f, lo, hi, epsabs=0.0, epsrel=1e-13)
        return out.reshape(shape)

    def _monotone_from(self) -> float:
        # d/ds of (ln s - 1)/ln^2 s is (2 - ln s)/(s ln^3 s) < 0 for s > e^2
        return math.e ** 2


@dataclass(frozen=True)
class StretchedExp(KernelSpec):
    """``C exp(-beta |x|**alpha)`` with ``0 < alpha < 1``."""

    alpha: float
    beta: float = 1.0
    C: float = 1.0
    family = "stretched_exp"

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise DomainError("StretchedExp needs 0 < alpha < 1")
        if self.beta <= 0 or self.C <= 0:
            raise DomainError("StretchedExp needs beta > 0 and C > 0")
        self._finalize()

    def _log_profile(self, s):
        return -self.beta * s ** self.alpha

    def _ratio(self, s):
        return self.alpha * self.beta * s ** (self.alpha - 1.0)

    def _profile_moment(self, a, b, k):
        s = (k + 1) / self.alpha
        scale = self.beta ** (-s) / self.alpha
        return scale * _gamma_window(s, self.beta * a ** self.alpha, self.beta * b ** self.alpha)

    def _inverse_log_profile(self, q):
        return (q / self.beta) ** (1.0 / self.alpha)

    def _monotone_from(self) -> float:
        return 0.0


@dataclass(frozen=True)
class Algebraic(KernelSpec):
    """``C (1 + |x|)**(-alpha)``; the shifted form keeps ``J`` bounded at 0."""

    alpha: float
    C: float = 1.0
    family = "algebraic"

    def __post_init__(self):
        if self.alpha <= 1.0:
            raise DivergenceError("Algebraic kernel needs alpha > 1 to have finite mass")
        if self.C <= 0:
            raise DomainError("Algebraic needs C > 0")
        self._finalize()

    def _log_profile(self, s):
        return -self.alpha * np.log1p(s)

    def _ratio(self, s):
        return self.alpha / (1.0 + s)

    def _antiderivative(self, p, k):
        # primitive of (p - 1)**k p**(-alpha) in p
        def term(e):
            if abs(e) < 1e-14:
                return np.log(p)
            return p ** e / e
        if k == 0:
            return term(1 - self.alpha)
        if k == 1:
            return term(2 - self.alpha) - term(1 - self.alpha)
        if k == 2:
            return term(3 - self.alpha) - 2 * term(2 - self.alpha) + term(1 - self.alpha)
        raise DomainError("Algebraic moments are implemented for k <= 2")

    def _profile_moment(self, a, b, k):
        a, b = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
        inf = np.isinf(b)
        if np.any(inf) and self.alpha <= k + 1:
            return np.where(inf, np.inf, 0.0) + 0.0 * a
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            Fa = self._antiderivative(1.0 + a, k)
            Fb = np.where(inf, 0.0, self._antiderivative(np.where(inf, 1.0, 1.0 + b), k))
        if k == 0:
            # avoid cancellation for narrow cells far out
            e = 1.0 - self.alpha
            ratio = np.where(inf, 0.0, ((1.0 + b) / (1.0 + a)) ** e)
            with np.errstate(over="ignore", invalid="ignore"):
                return (1.0 + a) ** e / (self.alpha - 1.0) * (1.0 - ratio)
        return Fb - Fa

    def _inverse_log_profile(self, q):
        return math.expm1(q / self.alpha)

    def _monotone_from(self) -> float:
        return 0.0

    def _epsilon0(self) -> float:
        return 0.5 * (1.0 + 1.0 / self.alpha)

    def _power_integrable(self, eps: float) -> bool:
        return eps * self.alpha > 1.0

    def _hyp2_bound(self) -> float:
        # sup_x x * alpha / (1 + x)
        return self.alpha


@dataclass(frozen=True)
class Laplace(KernelSpec):
    """``C exp(-rate |x|)``; exponentially bounded comparator."""

    rate: float = 1.0
    C: float = 0.5
    family = "laplace"
    exponentially_unbounded = False

    def __post_init__(self):
        if self.rate <= 0 or self.C <= 0:
            raise DomainError("Laplace needs rate > 0 and C > 0")
        self._finalize()

    def _log_profile(self, s):
        return -self.rate * s

    def _ratio(self, s):
        return self.rate + 0.0 * s

    def _profile_moment(self, a, b, k):
        return self.rate ** (-(k + 1)) * _gamma_window(k + 1.0, self.rate * a, self.rate * b)

    def _inverse_log_profile(self, q):
        return q / self.rate

    def _monotone_from(self) -> float:
        return 0.0

    def exponential_moment(self, eta: float) -> float:
        if eta < 0.0:
            raise DomainError("exponential_moment needs eta >= 0")
        if eta >= self.rate:
            raise DivergenceError(f"Laplace moment diverges for eta >= rate = {self.rate}")
        return 2.0 * self.amplitude * self.rate / (self.rate ** 2 - eta ** 2)


@dataclass(frozen=True)
class TruncatedKernel:
    """``J_eps = J 1_{[-A, A]} / D`` with ``D = 1 - eps``."""

    parent: KernelSpec
    A_eps: float
    D_eps: float

    def __call__(self, x: ArrayLike) -> ArrayLike:
        x = np.asarray(x, dtype=float)
        out = np.where(np.abs(x) <= self.A_eps, self.parent(x) / self.D_eps, 0.0)
        return out if np.ndim(out) else float(out)

    @property
    def core_value(self) -> float:
        return self.parent.core_value / self.D_eps

    def exponential_moment(self, eta: float) -> float:
        """Return ``int J_eps(z) exp(eta z) dz`` (finite for every ``eta``)."""
        if eta < 0.0:
            raise DomainError("exponential_moment needs eta >= 0")
        A, J = self.A_eps, self.parent
        f = lambda z: J(z) * math.cosh(eta * z)
        pts = [J.splice_radius] if 0.0 < J.splice_radius < A else None
        half = quad_checked(f, 0.0, A, epsabs=0.0, epsrel=1e-13, points=pts)
        return 2.0 * half / self.D_eps


AnyKernel = Union[KernelSpec, TruncatedKernel]


def evaluate(kernel: AnyKernel, x: ArrayLike) -> ArrayLike:
    """Return ``J(x)``."""
    return kernel(x)


def mass_and_first_moment(kernel: KernelSpec) -> tuple[float, float]:
    return kernel.mass_and_first_moment()


def inverse_tail(kernel: KernelSpec, y: Optional[float] = None, *,
                 log_y: Optional[float] = None) -> float:
    return kernel.inverse_tail(y, log_y=log_y)


def log_derivative_ratio(kernel: KernelSpec, x: ArrayLike) -> ArrayLike:
    return kernel.log_derivative_ratio(x)


def classify(kernel: KernelSpec) -> HypothesisReport:
    return kernel.classify()


def truncate(kernel: KernelSpec, eps: float) -> TruncatedKernel:
    return kernel.truncate(eps)


def exponential_moment(kernel: AnyKernel, eta: float) -> float:
    return kernel.exponential_moment(eta)


def catalog() -> dict[str, KernelSpec]:
    """Named kernels used by the demos and the acceptance suite."""
    return {
        "fig1": StretchedExp(alpha=0.5, beta=1.0, C=0.25),
        "fig2a": Algebraic(alpha=3.0, C=1.0),
        "fig2b": Laplace(rate=1.0, C=0.5),
        "log_sublinear": LogSublinear(alpha=1.0, C=1.0),
    }


def from_dict(block: dict) -> KernelSpec:
    """Build a kernel from a config block such as ``{"family": "laplace", "rate": 1}``."""
    params = dict(block)
    family = params.pop("family", None)
    classes = {cls.family: cls for cls in (LogSublinear, StretchedExp, Algebraic, Laplace)}
    if family not in classes:
        raise DomainError(f"unknown kernel family {family!r}; expected one of {sorted(classes)}")
    try:
        return classes[family](**params)
    except TypeError as exc:
        raise DomainError(f"bad parameters for {family}: {exc}") from None


def to_dict(kernel: KernelSpec) -> dict:
    """Inverse of :func:`from_dict`."""
    names = {"log_sublinear": ("alpha", "C"), "stretched_exp": ("alpha", "beta", "C"),
             "algebraic": ("alpha", "C"), "laplace": ("rate", "C")}[kernel.family]
    return {"family": kernel.family, **{n: getattr(kernel, n) for n in names}}
