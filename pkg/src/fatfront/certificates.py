"""Numerical sign checks of explicit sub- and supersolutions.

For a space-time function ``w`` the residual

    N[w](t, x) = w_t - (J*w - w) - f(w)

is evaluated at sample points, with ``J*w`` computed by adaptive quadrature.
A subsolution needs ``N[w] <= 0`` and a supersolution ``N[w] >= 0``; the
reports compare against a tolerance ``tol`` (default ``1e-8``) while the
quadrature runs at ``quad_tol`` (default ``1e-9``).

Four constructions are provided:

* :class:`LinearSubsolution` -- ``v = (u0 + t J*u0) e^{-t}`` for the linear
  flow, whose residual is ``-t e^{-t} J*J*u0``.
* :class:`Step2Subsolution` -- ``g(C J(x) e^{rho1 t})`` with a flat plateau,
  ``g(s) = s - B s^{1+delta}``.
* :class:`Hyp1Supersolution` -- ``min(phi_hat(x) e^{rho0 t} / phi_hat(sigma1), 1)``
  with ``phi_hat = exp(-varphi)`` and ``varphi`` concave.
* :class:`Hyp2Supersolution` -- ``min(J(x) e^{rho0 t} / J(sigma1), 1)``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np
from scipy import optimize

from ._quad import integrate_pieces, integrate_to_infinity, quad_checked
from .discretization import Bump
from .errors import ConstructionError, DomainError, HypothesisError, VerificationError
from .kernels import KernelSpec
from .reaction import ReactionSpec

logger = logging.getLogger(__name__)

Point = tuple[float, float]

DEFAULT_QUAD_TOL = 1e-9
DEFAULT_TOL = 1e-8
_FD_STEP = 1e-6


class SpaceTimeFunction:
    """Interface for functions fed to :func:`residual`.

    Subclasses implement :meth:`value` and :meth:`kinks`. Values must lie in
    ``[0, 1]`` and be nonincreasing in ``|x|`` beyond the outermost kink; the
    quadrature uses that to bound the truncated tails.
    """

    def value(self, t: float, x):
        raise NotImplementedError

    def time_derivative(self, t: float, x):
        h = _FD_STEP
        return (self.value(t + h, x) - self.value(t - h, x)) / (2.0 * h)

    def kinks(self, t: float) -> list[float]:
        return []


class _Static(SpaceTimeFunction):
    def __init__(self, fn, kinks=()):
        self._fn, self._kinks = fn, list(kinks)

    def value(self, t, x):
        return self._fn(x)

    def time_derivative(self, t, x):
        return 0.0 * np.asarray(x, dtype=float)

    def kinks(self, t):
        return self._kinks


def _refine(cuts: list[float]) -> list[float]:
    """Add cuts at distances 1, 2, 4, ... from both ends of each long gap."""
    out = [cuts[0]]
    for a, b in zip(cuts[:-1], cuts[1:]):
        d, extra = 1.0, []
        while 2.0 * d < b - a:
            extra += [a + d, b - d]
            d *= 2.0
        out += sorted(extra) + [b]
    return out


def convolve_at(w: SpaceTimeFunction, kernel: KernelSpec, t: float, x: float,
                quad_tol: float = DEFAULT_QUAD_TOL, rtol: float = 1e-10) -> float:
    """Return ``(J * w(t, .))(x)`` by composite tanh-sinh quadrature.

    The integral is taken in the offset ``z = y - x`` so the cusp of ``J``
    sits exactly at 0 however large ``|x|`` is. The line is split at 0, at
    ``+-splice_radius`` and at the kinks of ``w``; the outer pieces run to
    infinity.
    """
    R = kernel.splice_radius
    cuts = {float(k) - x for k in w.kinks(t)} | {0.0}
    if R > 0:
        cuts |= {-R, R}
    edges = [-math.inf, *_refine(sorted(cuts)), math.inf]
    f = lambda z: kernel(z) * w.value(t, x + z)
    return integrate_pieces(f, edges, atol=quad_tol, rtol=rtol)


def residual(w: SpaceTimeFunction, kernel: KernelSpec, reaction: Optional[ReactionSpec],
             point: Point, quad_tol: float = DEFAULT_QUAD_TOL) -> float:
    """Return ``w_t - (J*w - w) - f(w)`` at ``point = (t, x)``.

    ``reaction=None`` selects the linear problem ``f = 0``.
    """
    t, x = map(float, point)
    val = float(w.value(t, x))
    react = 0.0 if reaction is None else float(reaction(val))
    return float(w.time_derivative(t, x)) - (convolve_at(w, kernel, t, x, quad_tol) - val) - react


@dataclass
class CertificateReport:
    """Residuals at sample points with a sign verdict.

    ``kind`` is ``"sub"`` (pass iff every residual ``<= tol``) or ``"super"``
    (pass iff every residual ``>= -tol``). ``side_checks`` holds auxiliary
    inequalities ``lhs <= rhs`` that must also hold within ``tol``.
    """

    construction: str
    kind: str
    points: list
    residuals: np.ndarray
    quad_tol: float
    tol: float
    regions: list = field(default_factory=list)
    constants: dict = field(default_factory=dict)
    side_checks: list = field(default_factory=list)

    def _row_ok(self, r: float) -> bool:
        return r <= self.tol if self.kind == "sub" else r >= -self.tol

    @property
    def row_verdicts(self) -> list[bool]:
        return [self._row_ok(r) for r in self.residuals]

    @property
    def side_ok(self) -> bool:
        return all(lhs <= rhs + self.tol for _, lhs, rhs in self.side_checks)

    @property
    def verdict(self) -> bool:
        return all(self.row_verdicts) and self.side_ok

    @property
    def worst(self) -> tuple[Point, float]:
        """Sample point closest to violating the sign condition."""
        sign = 1.0 if self.kind == "sub" else -1.0
        i = int(np.argmax(sign * self.residuals))
        return self.points[i], float(self.residuals[i])

    def require(self) -> "CertificateReport":
        """Return ``self`` or raise :class:`VerificationError` naming the worst point."""
        if not self.verdict:
            (t, x), r = self.worst
            region = f" in region {self.regions[self.points.index((t, x))]}" if self.regions else ""
            raise VerificationError(
                f"{self.construction}: residual {r:.3g} at t={t:.6g}, x={x:.6g}{region}")
        return self

    def rows(self) -> list[tuple]:
        return [(self.construction, t, x, r, "pass" if ok else "fail")
                for (t, x), r, ok in zip(self.points, self.residuals, self.row_verdicts)]


def write_certificate_csv(reports: Sequence[CertificateReport], path: Union[str, Path]) -> None:
    """Write ``construction,t,x,residual,verdict`` rows for every report."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("construction,t,x,residual,verdict\n")
        for rep in reports:
            for name, t, x, r, v in rep.rows():
                fh.write(f"{name},{t:.17g},{x:.17g},{r:.17g},{v}\n")


def _evaluate(construction: str, kind: str, w: SpaceTimeFunction, kernel: KernelSpec,
              reaction: Optional[ReactionSpec], points: Iterable[Point], quad_tol: float,
              tol: float, region=None) -> CertificateReport:
    pts = [(float(t), float(x)) for t, x in points]
    res = np.array([residual(w, kernel, reaction, p, quad_tol) for p in pts])
    regions = [region(t, x) for t, x in pts] if region else []
    return CertificateReport(construction, kind, pts, res, quad_tol, tol, regions)


def _grid(times: Sequence[float], xs: Sequence[float]) -> list[Point]:
    return [(float(t), float(x)) for t in times for x in xs]


# -- Step 1: linear subsolution ---------------------------------------------

@dataclass(frozen=True)
class LinearSubsolution(SpaceTimeFunction):
    """``v(t, x) = (u0(x) + t (J*u0)(x)) e^{-t}`` for a bump ``u0``."""

    kernel: KernelSpec
    u0: Bump = Bump(10.0)

    def conv_u0(self, x):
        """Closed form of ``J*u0`` from partial moments of ``J``."""
        x = np.asarray(x, dtype=float)
        r = self.u0.radius
        a, b = x - r, x + r
        m0 = self.kernel.partial_moment(a, b, 0)
        m1 = self.kernel.partial_moment(a, b, 1)
        m2 = self.kernel.partial_moment(a, b, 2)
        out = m0 - (x * x * m0 - 2.0 * x * m1 + m2) / (r * r)
        return np.maximum(out, 0.0) if np.ndim(out) else max(float(out), 0.0)

    def value(self, t, x):
        return (self.u0(x) + t * self.conv_u0(x)) * math.exp(-t)

    def time_derivative(self, t, x):
        c = self.conv_u0(x)
        return (c - self.u0(x) - t * c) * math.exp(-t)

    def kinks(self, t):
        return [-self.u0.radius, self.u0.radius]


def extract_C(kernel: KernelSpec, u0: Bump = Bump(10.0), n: int = 400) -> float:
    """Minimum of ``v(1, x) / J(x)`` over a log-spaced probe grid."""
    v = LinearSubsolution(kernel, u0)
    x_far = min(kernel.inverse_tail(log_y=-600.0), 1e5)
    xs = np.concatenate([[0.0], np.geomspace(1e-2, x_far, n)])
    ratio = v.value(1.0, xs) / kernel(xs)
    C = float(ratio.min())
    if not (C > 0 and math.isfinite(C)):
        raise ConstructionError(f"Step-1 constant C = {C} is not positive and finite")
    return C


def check_linear_subsolution(kernel: KernelSpec, u0: Bump = Bump(10.0),
                             sample_grid: Optional[Sequence[Point]] = None,
                             quad_tol: float = DEFAULT_QUAD_TOL,
                             tol: float = DEFAULT_TOL) -> CertificateReport:
    """Check ``v_t - J*v + v <= 0`` on a ``(t, x)`` sample.

    The default sample is 20 times in ``[0, 5]`` by 20 abscissae (0 and a
    log-spaced range up to ``50 * radius``).
    """
    if sample_grid is None:
        xs = np.concatenate([[0.0], np.geomspace(0.05 * u0.radius, 50.0 * u0.radius, 19)])
        sample_grid = _grid(np.linspace(0.0, 5.0, 20), xs)
    w = LinearSubsolution(kernel, u0)
    rep = _evaluate("step1", "sub", w, kernel, None, sample_grid, quad_tol, tol)
    rep.constants["C"] = extract_C(kernel, u0)
    return rep


# -- Step 2: nonlinear subsolution ------------------------------------------

@dataclass(frozen=True)
class Step2Subsolution(SpaceTimeFunction):
    """Plateau-capped subsolution ``g(C J(x) e^{rho1 t})``."""

    kernel: KernelSpec
    epsilon: float
    rho1: float
    B: float
    delta: float
    M: float
    s0: float
    C: float
    eps_prime: float
    xi1: float
    kappa: float
    s1: float
    s2: float
    lambda2: float

    def g(self, s):
        return s - self.B * s ** (1.0 + self.delta)

    def xi0(self, t: float) -> float:
        """Plateau edge: ``C J(xi0) e^{rho1 t} = s2``."""
        return self.kernel.inverse_tail(log_y=math.log(self.s2 / self.C) - self.rho1 * t)

    def _s(self, t, x):
        return np.exp(math.log(self.C) + self.kernel.log_value(x) + self.rho1 * t)

    def value(self, t, x):
        x = np.asarray(x, dtype=float)
        out = np.where(np.abs(x) > self.xi0(t), self.g(self._s(t, x)), self.lambda2)
        return out if np.ndim(out) else float(out)

    def time_derivative(self, t, x):
        x = np.asarray(x, dtype=float)
        s = self._s(t, x)
        slope = (1.0 - (1.0 + self.delta) * self.B * s ** self.delta) * self.rho1 * s
        out = np.where(np.abs(x) > self.xi0(t), slope, 0.0)
        return out if np.ndim(out) else float(out)

    def kinks(self, t):
        e = self.xi0(t)
        return [-e, 0.0, e]

    def constants(self) -> dict:
        return {k: getattr(self, k) for k in
                ("epsilon", "rho1", "B", "delta", "M", "s0", "C", "eps_prime", "xi1",
                 "kappa", "s1", "s2", "lambda2")}


def _ratio_threshold(kernel: KernelSpec, level: float) -> float:
    """Smallest ``x`` beyond which ``|J'/J| <= level`` on the monotone tail."""
    rep = kernel.classify()
    if not rep.exponentially_unbounded:
        raise ConstructionError(
            f"{kernel.family}: |J'/J| never falls below {level:.3g}; kernel is not fat-tailed")
    lo = kernel.splice_radius
    slope = kernel.right_log_slope
    if slope(lo) <= level:
        return lo
    hi = max(2.0 * lo, 1.0)
    while slope(hi) > level:
        lo, hi = hi, 2.0 * hi
        if hi > 1e300:
            raise ConstructionError("ratio threshold bracket exploded")
    xi = optimize.brentq(lambda s: slope(s) - level, lo, hi, xtol=1e-12, rtol=1e-14)
    probe = np.geomspace(xi * (1 + 1e-9), 1e6 * max(xi, 1.0), 200)
    if np.any(slope(probe) > level * (1 + 1e-9)):
        raise ConstructionError("log-derivative ratio is not monotone beyond the threshold")
    return xi


def build_step2_subsolution(kernel: KernelSpec, reaction: ReactionSpec, epsilon: float,
                            u0: Bump = Bump(10.0), C: Optional[float] = None) -> Step2Subsolution:
    """Assemble the Step-2 constants.

    ``C`` defaults to the Step-1 probe minimum, capped at 1 and reduced by 1%
    so it stays below the infimum the probe grid approximates.
    """
    fp = reaction.fprime0
    if not 0.0 < epsilon < fp:
        raise DomainError(f"epsilon must lie in (0, f'(0) = {fp})")
    M, delta, s0 = reaction.kpp_envelope()
    if C is None:
        C = 0.99 * min(extract_C(kernel, u0), 1.0)
    rho1 = fp - 0.5 * epsilon
    half_first = 0.5 * kernel.mass_and_first_moment()[1]
    eps_prime = 0.5 * epsilon / half_first
    xi1 = _ratio_threshold(kernel, 0.5 * eps_prime)
    kappa = C * kernel(xi1)
    if not kappa > 0.0:
        raise ConstructionError(
            f"kappa = C J(xi1) underflows at xi1 = {xi1:.6g}; constants are not representable")
    s1 = min(s0, kappa)
    B = max(s1 ** (-delta), M / (rho1 * delta),
            M * (delta / (1.0 + delta)) ** delta / ((1.0 + delta) * rho1))
    s2 = ((1.0 + delta) * B) ** (-1.0 / delta)
    lambda2 = delta / (1.0 + delta) * s2
    sub = Step2Subsolution(kernel, epsilon, rho1, B, delta, M, s0, C, eps_prime, xi1,
                           kappa, s1, s2, lambda2)
    logger.info("step2: rho1=%.4g xi1=%.6g B=%.6g lambda2=%.6g", rho1, xi1, B, lambda2)
    return sub


def step2_sample_grid(sub: Step2Subsolution, times: Sequence[float]) -> list[Point]:
    """Plateau points ``{0, xi0/2, 0.99 xi0}`` and outer points ``xi0 * {1.01 .. 8}``."""
    pts = []
    for t in times:
        e = sub.xi0(t)
        for f in (0.0, 0.5, 0.99, 1.01, 1.5, 2.0, 4.0, 8.0):
            pts.append((float(t), f * e))
    return pts


def check_step2_subsolution(sub: Step2Subsolution, kernel: KernelSpec, reaction: ReactionSpec,
                            sample_grid: Optional[Sequence[Point]] = None,
                            quad_tol: float = DEFAULT_QUAD_TOL,
                            tol: float = DEFAULT_TOL) -> CertificateReport:
    if sample_grid is None:
        sample_grid = step2_sample_grid(sub, np.linspace(0.0, 10.0, 6))
    region = lambda t, x: "plateau" if abs(x) <= sub.xi0(t) else "outer"
    rep = _evaluate("step2", "sub", sub, kernel, reaction, sample_grid, quad_tol, tol, region)
    rep.constants.update(sub.constants())
    return rep


# -- Hypothesis 1 supersolution ---------------------------------------------

@dataclass(frozen=True)
class Hyp1Supersolution(SpaceTimeFunction):
    """``min(phi_hat(x) e^{rho0 t} / phi_hat(sigma1), 1)``.

    ``varphi`` is linear on ``[0, sigma - tau]`` and equals
    ``(epsilon0 - 1) ln J(x + tau)`` beyond, with the smallest ``tau`` that
    keeps it concave.
    """

    kernel: KernelSpec
    r: float
    epsilon0: float
    sigma: float
    tau: float
    sigma1: float
    integral: float
    rho0: float

    @property
    def knee(self) -> float:
        return self.sigma - self.tau

    @property
    def slope(self) -> float:
        return (self.epsilon0 - 1.0) * self.kernel.log_value(self.sigma) / self.knee

    def varphi(self, x):
        x = np.abs(np.asarray(x, dtype=float))
        tail = (self.epsilon0 - 1.0) * self.kernel.log_value(x + self.tau)
        out = np.where(x <= self.knee, self.slope * x, tail)
        return out if np.ndim(out) else float(out)

    def phi_hat(self, x):
        return np.exp(-self.varphi(x))

    def _log_ratio(self, t, x):
        return self.varphi(self.sigma1) - self.varphi(x) + self.rho0 * t

    def value(self, t, x):
        out = np.exp(np.minimum(self._log_ratio(t, x), 0.0))
        return out if np.ndim(out) else float(out)

    def time_derivative(self, t, x):
        lr = self._log_ratio(t, x)
        out = np.where(lr < 0.0, self.rho0 * np.exp(np.minimum(lr, 0.0)), 0.0)
        return out if np.ndim(out) else float(out)

    def cap_edge(self, t: float) -> float:
        """``X(t)`` with ``varphi(X) = varphi(sigma1) + rho0 t``."""
        level = self.varphi(self.sigma1) + self.rho0 * t
        if level <= self.slope * self.knee:
            return level / self.slope
        log_j = level / (self.epsilon0 - 1.0)
        return self.kernel.inverse_tail(log_y=log_j) - self.tau

    def kinks(self, t):
        e, k = self.cap_edge(t), self.knee
        return sorted({-e, -k, 0.0, k, e})


def _phi_integral(kernel: KernelSpec, eps0: float, sigma: float, tau: float) -> float:
    knee = sigma - tau
    slope = (eps0 - 1.0) * kernel.log_value(sigma) / knee
    f_lin = lambda y: kernel(y) * math.exp(slope * y)
    f_tail = lambda y: math.exp(kernel.log_value(y) + (eps0 - 1.0) * kernel.log_value(y + tau))
    pts = [kernel.splice_radius]
    head = quad_checked(f_lin, 0.0, knee, epsabs=0.0, epsrel=1e-12, points=pts)
    tail = integrate_to_infinity(f_tail, knee, scale=max(8.0, knee), epsabs=0.0, epsrel=1e-12)
    return 2.0 * (head + tail)


def build_hyp1_supersolution(kernel: KernelSpec, reaction: ReactionSpec,
                             epsilon0: Optional[float] = None,
                             u0_support: float = 10.0) -> Hyp1Supersolution:
    """Assemble the Hypothesis-1 supersolution.

    Raises
    ------
    HypothesisError
        If the kernel does not satisfy Hypothesis 1.
    """
    rep = kernel.classify()
    if not rep.hyp1.holds:
        raise HypothesisError(f"{kernel.family} kernel does not satisfy Hypothesis 1")
    eps0 = rep.hyp1.epsilon0 if epsilon0 is None else epsilon0
    if not 0.0 < eps0 < 1.0 or not kernel._power_integrable(eps0):
        raise HypothesisError(f"int J^eps0 diverges for eps0 = {eps0}")
    sigma = rep.hyp1.sigma
    depth = -kernel.log_value(sigma)
    tau = max(0.0, sigma - depth / kernel.right_log_slope(sigma))
    integral = _phi_integral(kernel, eps0, sigma, tau)
    rho0 = max(integral, 1.0) - 1.0 + reaction.r_sup
    return Hyp1Supersolution(kernel, reaction.r_sup, eps0, sigma, tau, u0_support, integral, rho0)


def check_hyp1_supersolution(sup: Hyp1Supersolution, kernel: KernelSpec, reaction: ReactionSpec,
                             sample_grid: Optional[Sequence[Point]] = None,
                             quad_tol: float = DEFAULT_QUAD_TOL,
                             tol: float = DEFAULT_TOL) -> CertificateReport:
    """Check ``N[w] >= 0`` and ``(J*phi_hat)(x) <= phi_hat(x) int J/phi_hat``."""
    if sample_grid is None:
        pts = []
        for t in np.linspace(0.0, 10.0, 6):
            e = sup.cap_edge(t)
            pts += [(float(t), f * e) for f in (0.5, 1.001, 1.5, 2.0, 4.0, 10.0)]
        sample_grid = pts + [(1.0, 10.0), (1.0, 100.0)]
    region = lambda t, x: "capped" if sup.value(t, x) >= 1.0 else "profile"
    rep = _evaluate("hyp1", "super", sup, kernel, reaction, sample_grid, quad_tol, tol, region)
    profile = _Static(sup.phi_hat, kinks=[-sup.knee, 0.0, sup.knee])
    for x in sorted({abs(x) for _, x in sample_grid} | {0.0}):
        lhs = convolve_at(profile, kernel, 0.0, x, quad_tol)
        rep.side_checks.append((x, lhs, float(sup.phi_hat(x)) * sup.integral))
    rep.constants.update(epsilon0=sup.epsilon0, sigma=sup.sigma, tau=sup.tau,
                         sigma1=sup.sigma1, integral=sup.integral, rho0=sup.rho0)
    return rep


# -- Hypothesis 2 supersolution ---------------------------------------------

def self_convolution_ratio(kernel: KernelSpec, x: float, rtol: float = 1e-10) -> float:
    """Return ``(J*J)(x) / J(x)`` to relative accuracy ``rtol``."""
    w = _Static(kernel, kinks=[0.0])
    return convolve_at(w, kernel, 0.0, x, quad_tol=0.0, rtol=rtol) / kernel(x)


@dataclass(frozen=True)
class Hyp2Supersolution(SpaceTimeFunction):
    """``min(J(x) e^{rho0 t} / J(sigma1), 1)`` with ``rho0 = r + K``."""

    kernel: KernelSpec
    r: float
    K: float
    rho0: float
    sigma1: float
    x_star: float

    def _log_ratio(self, t, x):
        return self.kernel.log_value(x) - self.kernel.log_value(self.sigma1) + self.rho0 * t

    def value(self, t, x):
        out = np.exp(np.minimum(self._log_ratio(t, x), 0.0))
        return out if np.ndim(out) else float(out)

    def time_derivative(self, t, x):
        lr = self._log_ratio(t, x)
        out = np.where(lr < 0.0, self.rho0 * np.exp(np.minimum(lr, 0.0)), 0.0)
        return out if np.ndim(out) else float(out)

    def cap_edge(self, t: float) -> float:
        return self.kernel.inverse_tail(
            log_y=min(self.kernel.log_value(self.sigma1) - self.rho0 * t,
                      self.kernel.log_value(0.0)))

    def kinks(self, t):
        e, R = self.cap_edge(t), self.kernel.splice_radius
        return sorted({-e, -R, 0.0, R, e})


def build_hyp2_supersolution(kernel: KernelSpec, reaction: ReactionSpec,
                             u0_support: float = 10.0, n_grid: int = 60) -> Hyp2Supersolution:
    """Assemble the Hypothesis-2 supersolution.

    ``K`` is the supremum of ``(J*J)/J - 1`` over a log-spaced grid, refined
    by a bounded scalar search around the best grid point.

    Raises
    ------
    HypothesisError
        If the kernel does not satisfy Hypothesis 2.
    """
    if not kernel.classify().hyp2.holds:
        raise HypothesisError(f"{kernel.family} kernel does not satisfy Hypothesis 2")
    xs = np.concatenate([[0.0], np.geomspace(1e-2, 1e5, n_grid)])
    vals = np.array([self_convolution_ratio(kernel, x) for x in xs])
    i = int(np.argmax(vals))
    lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, xs.size - 1)]
    opt = optimize.minimize_scalar(lambda x: -self_convolution_ratio(kernel, x),
                                   bounds=(lo, hi), method="bounded",
                                   options={"xatol": 1e-8 * max(hi, 1.0)})
    best, x_star = (vals[i], xs[i]) if vals[i] >= -opt.fun else (-opt.fun, opt.x)
    K = max(float(best) - 1.0, 0.0)
    sigma1 = u0_support
    if kernel(sigma1) > 1.0:
        sigma1 = kernel.inverse_tail(1.0)
    return Hyp2Supersolution(kernel, reaction.r_sup, K, reaction.r_sup + K, sigma1, float(x_star))


def check_hyp2_supersolution(sup: Hyp2Supersolution, kernel: KernelSpec, reaction: ReactionSpec,
                             sample_grid: Optional[Sequence[Point]] = None,
                             ratio_points: Optional[Sequence[float]] = None,
                             quad_tol: float = DEFAULT_QUAD_TOL,
                             tol: float = DEFAULT_TOL) -> CertificateReport:
    """Check ``N[w] >= 0`` and ``(J*J)(x) / J(x) <= 1 + K``."""
    if sample_grid is None:
        pts = []
        for t in np.linspace(0.0, 6.0, 6):
            e = sup.cap_edge(t)
            pts += [(float(t), f * e) for f in (0.0, 0.5, 1.001, 1.5, 2.0, 4.0, 10.0)]
        sample_grid = pts
    if ratio_points is None:
        ratio_points = np.concatenate([[0.0], np.geomspace(0.1, 1e4, 49)])
    region = lambda t, x: "capped" if sup.value(t, x) >= 1.0 else "profile"
    rep = _evaluate("hyp2", "super", sup, kernel, reaction, sample_grid, quad_tol, tol, region)
    for x in ratio_points:
        rep.side_checks.append((float(x), self_convolution_ratio(kernel, float(x)), 1.0 + sup.K))
    rep.constants.update(K=sup.K, rho0=sup.rho0, sigma1=sup.sigma1, x_star=sup.x_star)
    return rep
