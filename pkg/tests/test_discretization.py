from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fatfront.discretization import (Bump, ConvolutionPlan, Custom, Field, Grid1D, Indicator,
                                     boundary_egress, convolve, nonlocal_operator, read_field_csv,
                                     sample_initial_condition, write_field_csv)
from fatfront.errors import DomainError, GridMismatchError
from fatfront.kernels import Laplace, catalog

CAT = catalog()

# quadrature of (1/2) e^{-|y|} (1 - (y/10)^2)_+ at x = 0, mpmath oracle
LAPLACE_BUMP_AT_ZERO = 0.980009987984548


@pytest.fixture(scope="module")
def small_plans():
    g = Grid1D.from_spacing(60.0, 0.25)
    return g, {name: ConvolutionPlan(g, k, deficit_max=1.0) for name, k in CAT.items()}


def test_grid_layout():
    g = Grid1D(10.0, 16)
    assert g.dx == pytest.approx(20.0 / 15.0)
    assert g.x[0] == -10.0 and g.x[-1] == 10.0
    assert np.allclose(g.x, -g.x[::-1], atol=1e-14)


@pytest.mark.parametrize("L, n", [(0.0, 16), (1.0, 15), (1.0, 8)])
def test_grid_rejects(L, n):
    with pytest.raises(DomainError):
        Grid1D(L, n)


def test_from_spacing_never_coarser():
    for dx in (0.3, 0.5, 1.0, 0.77):
        assert Grid1D.from_spacing(100.0, dx).dx <= dx


@pytest.mark.parametrize("x, expected", [(0.0, 1.0), (10.0, 0.0), (5.0, 0.75)])
def test_bump_examples(x, expected):
    assert Bump(10.0)(x) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("shape", [Bump(10.0), Indicator(10.0), Custom((-3.0, 0.0, 3.0), (0.0, 1.0, 0.0))])
def test_sampled_initial_condition(shape):
    g = Grid1D.from_spacing(20.0, 0.5)
    f = sample_initial_condition(g, shape)
    assert f.values.min() >= 0.0 and f.values.max() <= 1.0 and f.values.max() > 0
    assert np.all(f.values[np.abs(g.x) > shape.support_radius + g.dx] == 0)


def test_indicator_cell_average_is_continuous_ramp():
    g = Grid1D(20.0, 400)
    v = Indicator(10.0).sample(g)
    assert np.max(np.abs(np.diff(v))) <= 1.0 + 1e-12
    assert v.sum() * g.dx == pytest.approx(20.0, abs=g.dx)


@pytest.mark.parametrize("shape", [Bump(10.0), Bump(30.0)])
def test_support_must_fit(shape):
    with pytest.raises(DomainError):
        sample_initial_condition(Grid1D(10.0, 64), shape)


def test_custom_rejects_bad_tables():
    with pytest.raises(DomainError):
        Custom((0.0, 0.0), (0.5, 0.5))
    with pytest.raises(DomainError):
        Custom((0.0, 1.0), (0.5, 1.5))


@pytest.mark.parametrize("name", list(CAT))
def test_weights_symmetric_with_deficit(name, small_plans):
    g, plans = small_plans
    p = plans[name]
    w = p.kernel_samples
    assert np.array_equal(w, w[::-1])
    assert w.min() >= 0
    assert 1.0 - w.sum() == pytest.approx(p.deficit, abs=1e-12)
    assert 0.0 <= p.deficit


def test_deficit_guard():
    with pytest.raises(DomainError):
        ConvolutionPlan(Grid1D.from_spacing(5.0, 0.5), CAT["fig2a"], deficit_max=1e-3)


@pytest.mark.parametrize("name", list(CAT))
def test_banded_matches_direct(name, small_plans):
    g, plans = small_plans
    rng = np.random.default_rng(7)
    p = plans[name]
    for _ in range(50):
        u = rng.random(g.n) * rng.random()
        fast, slow = p.apply(u), p.apply(u, "direct")
        assert np.max(np.abs(fast - slow)) <= 1e-10 * np.max(np.abs(slow))


def test_banded_keeps_far_field_relative_accuracy():
    # a plain FFT smears 1e-16 absolute noise over the whole line
    g = Grid1D.from_spacing(120.0, 0.5)
    p = ConvolutionPlan(g, CAT["fig2b"])
    u = Bump(10.0).sample(g)
    fast, slow = p.apply(u), p.apply(u, "direct")
    far = np.abs(g.x) > 80
    assert np.all(slow[far] > 0)
    assert np.max(np.abs(fast[far] / slow[far] - 1)) < 1e-8


def test_constant_field_gives_one_minus_deficit(small_plans):
    g, plans = small_plans
    p = plans["fig2b"]
    assert np.all(p.apply(np.ones(g.n)) <= 1.0 + 1e-15)
    # constant on a padded line three grids wide, read at the centre
    full = np.convolve(np.ones(3 * g.n), p.kernel_samples)[2 * g.n - 1 + g.n // 2]
    assert full == pytest.approx(1.0 - p.deficit, abs=1e-14)


def test_spike_reproduces_kernel(small_plans):
    g, plans = small_plans
    p = plans["fig1"]
    mid = g.n // 2
    u = np.zeros(g.n)
    u[mid] = 1.0 / g.dx
    out = p.apply(u) * g.dx
    assert np.allclose(out, p.kernel_samples[g.n - 1 - mid:2 * g.n - 1 - mid], rtol=1e-10, atol=1e-300)
    far = np.abs(g.x - g.x[mid]) > 5
    assert np.allclose(out[far] / g.dx, CAT["fig1"](g.x[far] - g.x[mid]), rtol=1e-3)


def test_laplace_bump_quadrature_oracle():
    g = Grid1D.from_spacing(40.0, 0.01)
    p = ConvolutionPlan(g, Laplace(1.0, 0.5))
    v = convolve(p, sample_initial_condition(g, Bump(10.0))).values
    mid = g.n // 2
    assert v[mid] == pytest.approx(v[mid - 1], abs=1e-12)
    assert v[mid] == pytest.approx(LAPLACE_BUMP_AT_ZERO, abs=1e-6)


def test_nonlocal_constant_near_equilibrium(small_plans):
    g, plans = small_plans
    p = plans["fig2b"]
    out = nonlocal_operator(p, Field(g, np.full(g.n, 0.7), 0.0)).values
    mid = g.n // 2
    assert abs(out[mid]) < 1e-12


@pytest.mark.parametrize("name", list(CAT))
def test_symmetry_preserved(name, small_plans):
    g, plans = small_plans
    rng = np.random.default_rng(3)
    half = rng.random(g.n // 2)
    u = np.concatenate([half[::-1], half])
    out = plans[name].apply(u)
    assert np.max(np.abs(out - out[::-1])) <= 1e-12


@pytest.mark.parametrize("name", list(CAT))
@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1))
def test_monotone_and_mass(name, seed, small_plans):
    g, plans = small_plans
    rng = np.random.default_rng(seed)
    u = rng.random(g.n)
    v = u + rng.random(g.n)
    p = plans[name]
    assert np.all(p.apply(u) <= p.apply(v) + 1e-13)
    assert p.apply(u).sum() <= u.sum() * (1 + 1e-13)


def test_discrete_mass_identity(small_plans):
    g, plans = small_plans
    p = plans["fig1"]
    u = sample_initial_condition(g, Bump(10.0)).values
    loss = -(nonlocal_operator(p, Field(g, u, 0.0)).values.sum() * g.dx)
    assert 0.0 <= loss <= p.deficit * u.sum() * g.dx + boundary_egress(Field(g, p.apply(u), 0), 5.0) * 2 * g.n * g.dx


@pytest.mark.parametrize("values, expected", [("bump", 0.0), ("ones", 1.0)])
def test_boundary_egress(values, expected):
    g = Grid1D.from_spacing(50.0, 0.5)
    u = Bump(10.0).sample(g) if values == "bump" else np.ones(g.n)
    assert boundary_egress(Field(g, u, 0.0), 5.0) == expected


def test_boundary_egress_rejects_large_buffer():
    g = Grid1D(10.0, 16)
    with pytest.raises(DomainError):
        boundary_egress(Field(g, np.zeros(16), 0.0), 10.0)


def test_grid_mismatch(small_plans):
    _, plans = small_plans
    other = Grid1D(10.0, 16)
    with pytest.raises(GridMismatchError):
        convolve(plans["fig1"], Field(other, np.zeros(16), 0.0))
    with pytest.raises(GridMismatchError):
        plans["fig1"].apply(np.zeros(16))


def test_csv_round_trip(tmp_path):
    g = Grid1D.from_spacing(30.0, 0.7)
    f = Field(g, np.random.default_rng(1).random(g.n) * 1e-200, 0.0)
    write_field_csv(f, tmp_path / "u.csv")
    assert (tmp_path / "u.csv").read_text().splitlines()[0] == "x,u"
    back = read_field_csv(tmp_path / "u.csv")
    assert back.grid.n == g.n and back.grid.dx == pytest.approx(g.dx, rel=1e-15)
    assert np.array_equal(back.values, f.values)
