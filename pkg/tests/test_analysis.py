from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import FAT_TAILED
from fatfront import analysis
from fatfront.analysis import LevelSetTrace
from fatfront.discretization import Field, Grid1D
from fatfront.errors import (AbsentCrossingError, DivergenceError, DomainError, HypothesisError,
                             InsufficientSamplesError)
from fatfront.kernels import Algebraic, Laplace, catalog
from fatfront.reaction import Logistic, ReactionSpec

CAT = catalog()
LN4 = math.log(4.0)

# mpmath oracle, /root/notes/oracles.py
C_STAR_ALG = {0.25: 0.520382235390541, 0.5: 0.165462547339696}
K_ALG = 1.1079581221550026


@dataclass(frozen=True)
class _Flat(ReactionSpec):
    family = "flat"

    def _poly(self, s):
        return 0.0 * s

    @property
    def fprime0(self):
        return 0.0


def _trace(t, x, lam=0.2):
    t = np.asarray(t, float)
    x = np.asarray(x, float)
    return LevelSetTrace(lam, t, x, -x)


# -- level sets -----------------------------------------------------------------

@pytest.mark.parametrize("lam, expected", [(0.2, 1.8), (0.6, 1.0), (0.95, None)])
def test_extract_examples(lam, expected):
    x, u = np.array([0.0, 1.0, 2.0]), np.array([0.9, 0.6, 0.1])
    right, _ = analysis.extract_level_set_arrays(x, u, lam)
    if expected is None:
        assert right is None
    else:
        assert right == pytest.approx(expected, abs=1e-15)


def test_extract_symmetric_field():
    g = Grid1D(10.0, 200)
    u = np.exp(-g.x ** 2)
    r, l = analysis.extract_level_set(Field(g, u, 0.0), 0.5)
    assert r == pytest.approx(-l, abs=1e-12)
    assert r == pytest.approx(math.sqrt(math.log(2.0)), abs=g.dx ** 2)


def test_extract_takes_outermost_crossing():
    x = np.arange(7.0)
    u = np.array([0.0, 0.5, 0.1, 0.9, 0.1, 0.5, 0.0])
    r, l = analysis.extract_level_set_arrays(x, u, 0.3)
    assert 5.0 < r < 6.0 and 0.0 < l < 1.0


@settings(max_examples=50, deadline=None)
@given(c=st.floats(-5, 5), lam=st.floats(0.01, 0.99))
def test_extract_recovers_linear_ramp(c, lam):
    # flat top of height 1 on |x - c| <= 1, then slope -0.1
    x = np.linspace(-20.0, 20.0, 401)
    u = np.clip(1.0 - 0.1 * (np.abs(x - c) - 1.0), 0.0, 1.0)
    r, l = analysis.extract_level_set_arrays(x, u, lam)
    d = 1.0 + (1.0 - lam) / 0.1
    assert r == pytest.approx(c + d, abs=1e-9)
    assert l == pytest.approx(c - d, abs=1e-9)


def test_trace_and_csv_round_trip(tmp_path):
    g = Grid1D(20.0, 400)
    snaps = [Field(g, np.exp(-(g.x / (1 + t)) ** 2), float(t)) for t in range(4)]
    traces = [analysis.trace_level_set(snaps, lam) for lam in (0.2, 0.5)]
    traces.append(_trace([0.0, 1.0], [math.nan, 2.0], lam=0.99))
    path = tmp_path / "levelsets.csv"
    analysis.write_levelsets_csv(traces, path)
    assert path.read_text().splitlines()[0] == "t,lambda,x_right,x_left"
    back = analysis.read_levelsets_csv(path)
    for a, b in zip(traces, back):
        assert a.lam == b.lam
        assert np.array_equal(a.t, b.t)
        assert np.array_equal(a.x_right, b.x_right, equal_nan=True)
    assert back[2].first_time == 1.0


# -- envelopes ------------------------------------------------------------------

def test_fig1_envelope_examples():
    rep = analysis.envelopes(CAT["fig1"], Logistic(), 0.2, 0.0, 1.5, [20.0])
    assert rep.lower[0] == pytest.approx((20 - LN4) ** 2, rel=1e-12)
    assert rep.lower[0] == pytest.approx(346.45, abs=0.05)
    assert rep.upper[0] == pytest.approx((30 - LN4) ** 2, rel=1e-12)
    assert rep.upper[0] == pytest.approx(818.86, abs=0.15)


@pytest.mark.parametrize("name", list(CAT))
def test_upper_envelope_zero_at_peak(name):
    J = CAT[name]
    rho = 2.0
    t_peak = -math.log(J.core_value) / rho
    rep = analysis.envelopes(J, Logistic(), 0.2, 0.2, rho, [0.0, t_peak * (1 - 1e-12)])
    assert np.all(rep.upper == 0.0)


@pytest.mark.parametrize("name", list(CAT))
def test_lower_below_upper(name):
    rep = analysis.envelopes(CAT[name], Logistic(), 0.2, 0.2, 1.5, np.linspace(0, 40, 41))
    assert np.all(rep.lower <= rep.upper)
    assert np.all(np.diff(rep.upper) >= 0)


@pytest.mark.parametrize("eps, rho", [(1.0, 2.0), (-0.1, 2.0), (0.2, 1.0)])
def test_envelope_parameter_order(eps, rho):
    with pytest.raises(DomainError):
        analysis.envelopes(CAT["fig1"], Logistic(), 0.2, eps, rho, [1.0])


def test_envelope_flags_and_csv(tmp_path):
    tr = _trace([1.0, 2.0, 3.0], [math.nan, 1.0, 1e9])
    rep = analysis.envelopes(CAT["fig1"], Logistic(), 0.2, 0.2, 1.5, [1.0, 2.0, 3.0], tr)
    assert rep.containment == [None, True, False]
    analysis.write_envelopes_csv([rep], tmp_path / "e.csv")
    lines = (tmp_path / "e.csv").read_text().splitlines()
    assert lines[0] == "t,lambda,lower,upper,x_right,contained"
    assert [ln.rsplit(",", 1)[1] for ln in lines[1:]] == ["absent", "true", "false"]


# -- theoretical rho -------------------------------------------------------------

def test_rho_algebraic_hyp2():
    est = analysis.theoretical_rho(CAT["fig2a"], Logistic())
    assert est.path == "hyp2"
    assert est.rho0 - 1.0 == pytest.approx(K_ALG, rel=1e-6)
    assert 1.0 < est.rho0 <= 9.0
    assert est.rho == pytest.approx(1.05 * est.rho0)


def test_rho_stretched_hyp1():
    est = analysis.theoretical_rho(CAT["fig1"], Logistic())
    assert est.path == "hyp1" and math.isfinite(est.rho0) and est.rho > 1.0


def test_rho_laplace_rejected():
    with pytest.raises(HypothesisError):
        analysis.theoretical_rho(CAT["fig2b"], Logistic())


# -- minimal speed --------------------------------------------------------------

def test_minimal_speed_laplace_closed_form():
    c, eta = analysis.minimal_speed(Laplace(1.0, 0.5), Logistic())
    assert c == pytest.approx(1.5 * math.sqrt(3.0), rel=1e-8)
    assert eta == pytest.approx(1.0 / math.sqrt(3.0), rel=1e-4)


@pytest.mark.parametrize("eps", [0.25, 0.5])
def test_minimal_speed_truncated_algebraic(eps):
    c, _ = analysis.minimal_speed(Algebraic(3.0).truncate(eps), Logistic())
    assert c == pytest.approx(C_STAR_ALG[eps], rel=1e-8)


def test_minimal_speed_grows_as_truncation_shrinks():
    speeds = [analysis.minimal_speed(CAT["fig2a"].truncate(e), Logistic())[0] for e in (0.5, 0.25, 0.1)]
    assert speeds[0] < speeds[1] < speeds[2]


def test_minimal_speed_fat_tail_diverges():
    with pytest.raises(DivergenceError, match="infinite speed expected"):
        analysis.minimal_speed(CAT["fig1"], Logistic())


def test_minimal_speed_needs_positive_fprime0():
    with pytest.raises(DomainError):
        analysis.minimal_speed(Laplace(1.0, 0.5), _Flat())


# -- speeds and flatness ----------------------------------------------------------

def test_linear_trace_speed():
    t = np.linspace(0, 10, 21)
    est = analysis.empirical_speed(_trace(t, 2 * t), (0, 10))
    assert est.slope == pytest.approx(2.0) and est.residual < 1e-12


def test_quadratic_trace_accelerates():
    t = np.linspace(0, 15, 61)
    tr = _trace(t, t ** 2)
    a, b = (analysis.empirical_speed(tr, w).slope for w in ((5, 10), (10, 15)))
    assert b > a
    speeds = [s.slope for s in analysis.windowed_speeds(tr)]
    assert speeds == sorted(speeds)


def test_speed_needs_samples():
    with pytest.raises(InsufficientSamplesError):
        analysis.empirical_speed(_trace([0, 1, 2, 3], [0, 1, 2, 3]), (0, 3))


@pytest.mark.parametrize("kind, x, expected", [
    ("power", lambda t: 3 * t ** 2, 2.0),
    ("exponential", lambda t: 5 * np.exp(0.4 * t), 0.4),
])
def test_scaling_fit(kind, x, expected):
    t = np.linspace(1, 20, 40)
    est = analysis.scaling_fit(_trace(t, x(t)), (5.0, 20.0), kind)
    assert est.slope == pytest.approx(expected, rel=1e-10)
    assert est.window == (5.0, 20.0)


def test_flatness_width():
    t = np.arange(5.0)
    tr = _trace(t, t + 1)
    assert np.all(analysis.flatness_width(tr, tr, t) == 0)
    with pytest.raises(AbsentCrossingError):
        analysis.flatness_width(tr, _trace(t, [1, 2, math.nan, 4, 5]), [2.0])


# -- domain sizing ----------------------------------------------------------------

def test_recommend_domain_fig1():
    L = analysis.recommend_domain(CAT["fig1"], Logistic(), 30.0, rho=1.5)
    assert L == pytest.approx(1.25 * (45 - LN4) ** 2, rel=1e-12)
    assert L == pytest.approx(2377.7, abs=0.1)


def test_recommend_domain_floor():
    assert analysis.recommend_domain(CAT["fig1"], Logistic(), 0.0, rho=1.5, support=10.0) == 40.0


def test_recommend_domain_algebraic():
    rho = 9 * 1.05
    L = analysis.recommend_domain(CAT["fig2a"], Logistic(), 12.0, rho=rho)
    assert L == pytest.approx(1.25 * CAT["fig2a"].inverse_tail(log_y=-rho * 12.0), rel=1e-12)
    assert math.log(L) == pytest.approx(rho * 12 / 3, rel=0.01)


def test_recommend_domain_level_factor_widens():
    J = CAT["fig2a"]
    assert analysis.recommend_domain(J, Logistic(), 12.0, 0.05, rho=2.0) > \
        analysis.recommend_domain(J, Logistic(), 12.0, rho=2.0)


# -- properties on simulated runs ----------------------------------------------------

@pytest.fixture(scope="module")
def fat_runs(request):
    names = {"fig1": "fig1_run", "fig2a": "fig2a_run", "log_sublinear": "log_sublinear_run"}
    return {k: request.getfixturevalue(v) for k, v in names.items()}


@pytest.mark.slow
@pytest.mark.parametrize("name", FAT_TAILED)
@pytest.mark.parametrize("lam", [0.2, 0.5])
def test_envelope_containment(name, lam, fat_runs):
    sim = fat_runs[name]
    rho = analysis.theoretical_rho(CAT[name], Logistic()).rho
    tr = analysis.trace_level_set(sim.snapshots, lam)
    rep = analysis.envelopes(CAT[name], Logistic(), lam, 0.2, rho, tr.t, tr)
    assert rep.contained_after(2.0 * tr.t.max() / 3.0)


@pytest.mark.slow
@pytest.mark.parametrize("name", FAT_TAILED)
def test_even_data_gives_symmetric_fronts(name, fat_runs):
    sim = fat_runs[name]
    tr = analysis.trace_level_set(sim.snapshots, 0.2)
    ok = tr.present
    assert np.all(np.abs(tr.x_left[ok] + tr.x_right[ok]) <= 2 * sim.grid.dx)


@pytest.mark.slow
@pytest.mark.parametrize("name", FAT_TAILED)
def test_fat_tailed_speeds_increase(name, fat_runs):
    tr = analysis.trace_level_set(fat_runs[name].snapshots, 0.2)
    s = [e.slope for e in analysis.windowed_speeds(tr)]
    assert s[0] < s[1] < s[2]


@pytest.mark.slow
def test_laplace_speeds_stabilize(fig2b_run):
    tr = analysis.trace_level_set(fig2b_run.snapshots, 0.2)
    s = [e.slope for e in analysis.windowed_speeds(tr)]
    assert 0.95 <= s[2] / s[1] <= 1.05


@pytest.mark.slow
def test_laplace_flatness_constant(fig2b_run):
    hi, lo = (analysis.trace_level_set(fig2b_run.snapshots, lam) for lam in (0.5, 0.05))
    w = analysis.flatness_width(hi, lo, [15.0, 30.0])
    assert 0.8 <= w[1] / w[0] <= 1.2


@pytest.mark.slow
def test_algebraic_flatness_grows(fig2a_run):
    hi, lo = (analysis.trace_level_set(fig2a_run.snapshots, lam) for lam in (0.5, 0.05))
    t = np.arange(6.0, 12.01, 1.0)
    assert np.all(np.diff(analysis.flatness_width(hi, lo, t)) > 0)


@pytest.mark.slow
def test_laplace_speed_matches_minimal_speed(fig2b_run):
    tr = analysis.trace_level_set(fig2b_run.snapshots, 0.2)
    c, _ = analysis.minimal_speed(CAT["fig2b"], Logistic())
    assert analysis.empirical_speed(tr, (20.0, 40.0)).slope == pytest.approx(c, rel=0.10)


@pytest.mark.slow
def test_stretched_exp_power_law(stretched_long_run):
    tr = analysis.trace_level_set(stretched_long_run.snapshots, 0.2)
    est = analysis.scaling_fit(tr, (60.0, 90.0), "power")
    assert abs(est.slope - 2.0) <= 0.15


@pytest.mark.slow
def test_algebraic_exponential_law(fig2a_run):
    tr = analysis.trace_level_set(fig2a_run.snapshots, 0.2)
    rho = analysis.theoretical_rho(CAT["fig2a"], Logistic()).rho
    est = analysis.scaling_fit(tr, (8.0, 12.0), "exponential")
    assert (1 - 0.2) / 3 <= est.slope <= rho / 3


@pytest.mark.slow
def test_log_sublinear_t_log_t_law(log_sublinear_run):
    tr = analysis.trace_level_set(log_sublinear_run.snapshots, 0.2)
    rho = analysis.theoretical_rho(CAT["log_sublinear"], Logistic()).rho
    m = tr.t >= 20.0
    ratio = tr.x_right[m] / (tr.t[m] * np.log(tr.t[m]))
    assert np.all((1 - 0.2) / 1.0 <= ratio) and np.all(ratio <= rho / 1.0)
