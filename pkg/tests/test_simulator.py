import csv
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import signal, special

from lvwave.coefficients import ModelParams
from lvwave.errors import ConfigError, FrontLostError, SimulationError
from lvwave.simulator import (FrontTrace, Grid, LVSystem, SimConfig, State, default_initial,
                              front_position, measure_speed, nonlocal_operator, run,
                              write_snapshot_csv, write_trace_csv)


@pytest.fixture(scope="module")
def small_grid():
    return Grid.symmetric(20.0, 0.1)


def test_grid_basics():
    g = Grid.symmetric(150, 0.1)
    assert g.n == 3001 and g.x[0] == -150 and g.x[-1] == pytest.approx(150)
    with pytest.raises(ConfigError):
        Grid(1.0, 0.0, 0.1)


def test_nonlocal_operator_by_hand():
    w = np.array([0.25, 0.5, 0.25])
    f = np.array([1.0, 2.0, 4.0])
    # padded [0, 1, 2, 4, 8]
    expected = np.array([0.25 * 0 + 0.5 * 1 + 0.25 * 2, 0.25 + 1 + 1, 0.5 + 2 + 2]) - f
    np.testing.assert_allclose(nonlocal_operator(f, w, 0.0, 8.0), expected, atol=1e-15)


def test_nonlocal_operator_annihilates_constants(ex1):
    w = ex1.kernel1.discretize(0.1)
    f = np.full(300, 0.7)
    np.testing.assert_allclose(nonlocal_operator(f, w, 0.7, 0.7), 0.0, atol=1e-14)


def test_nonlocal_operator_matches_fft_convolution(ex1):
    rng = np.random.default_rng(3)
    w = ex1.kernel1.discretize(0.1)
    f = rng.random(2001)
    m = w.size // 2
    padded = np.concatenate([np.full(m, 0.2), f, np.full(m, 0.9)])
    ref = signal.fftconvolve(padded, w, mode="valid") - f
    np.testing.assert_allclose(nonlocal_operator(f, w, 0.2, 0.9), ref, atol=1e-12)


def test_nonlocal_operator_second_moment(ex1):
    # J*f - f = (sigma^2 / 2) f'' for quadratic f away from the pads
    dx = 0.05
    w = ex1.kernel1.discretize(dx)
    x = np.arange(-600, 601) * dx
    f = x**2
    out = nonlocal_operator(f, w, f[0], f[-1])
    mid = slice(400, 801)
    np.testing.assert_allclose(out[mid], 1.0, atol=1e-6)


def test_system_rhs_vanishes_at_equilibria(ex1, small_grid):
    sys_ = LVSystem(ex1, small_grid)
    t = 0.4
    p, q = float(ex1.p(t)), float(ex1.q(t))
    n = small_grid.n
    du, dv = sys_.rhs(t, np.full(n, p), np.zeros(n))
    assert np.max(np.abs(dv[100:])) == 0.0
    # the u-equation reduces to p' along the equilibrium
    dp = float(ex1.p(t) * (ex1.r1(t) - ex1.a1(t) * ex1.p(t)))
    assert np.max(np.abs(du[200:-200] - dp)) < 1e-12


def test_rk4_fourth_order(ex1, small_grid):
    sys_ = LVSystem(ex1, small_grid)
    s0 = default_initial(ex1, small_grid)
    T = 0.2

    def integrate(n):
        s = s0.copy()
        for _ in range(n):
            s = sys_.step(s, T / n)
        return s.u

    ref = integrate(320)
    e = [np.max(np.abs(integrate(n) - ref)) for n in (20, 40, 80)]
    rates = np.log2(np.array(e[:-1]) / np.array(e[1:]))
    assert np.all(rates > 3.7), rates


def test_step_detects_blowup(ex1, small_grid):
    sys_ = LVSystem(ex1, small_grid)
    s = default_initial(ex1, small_grid)
    with pytest.raises(SimulationError):
        for _ in range(50):
            s = sys_.step(s, 1.0)


def test_run_rejects_unstable_dt(ex2, small_grid):
    with pytest.raises(ConfigError):
        run(ex2, SimConfig(small_grid, dt=0.02, t_end=1.0))


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 2**31 - 1))
def test_comparison_principle(ex1, seed):
    g = Grid.symmetric(15.0, 0.1)
    sys_ = LVSystem(ex1, g)
    rng = np.random.default_rng(seed)
    p0, q0 = float(ex1.p(0)), float(ex1.q(0))
    base_u = np.sort(rng.random(g.n)) * p0
    base_v = np.sort(rng.random(g.n))[::-1] * q0
    # pair ordered in the competitive sense: u_a >= u_b, v_a <= v_b
    ua = np.minimum(base_u + 0.1 * rng.random(g.n), p0)
    va = np.maximum(base_v - 0.1 * rng.random(g.n), 0.0)
    a, b = State(0.0, ua, va), State(0.0, base_u, base_v)
    dt = 1e-3
    for _ in range(100):
        a, b = sys_.step(a, dt), sys_.step(b, dt)
        assert np.all(a.u >= b.u - 1e-12)
        assert np.all(a.v <= b.v + 1e-12)


def test_front_position_interpolates(ex1, small_grid):
    p0 = float(ex1.p(0))
    s = State(0.0, p0 * special.expit(small_grid.x - 1.234), np.zeros(small_grid.n))
    assert front_position(ex1, s, small_grid) == pytest.approx(1.234, abs=1e-3)
    with pytest.raises(FrontLostError):
        front_position(ex1, State(0.0, np.zeros(small_grid.n), np.zeros(small_grid.n)), small_grid)
    wavy = p0 * (0.5 + 0.4 * np.sin(small_grid.x))
    with pytest.raises(FrontLostError):
        front_position(ex1, State(0.0, wavy, wavy), small_grid)


def test_measure_speed_linear_trace():
    T = 2.0
    t = np.arange(30) * T
    trace = FrontTrace(times=list(t), positions=list(5.0 - 1.5 * t), period=T, burn_in_periods=5)
    fit = measure_speed(trace)
    assert fit.c == pytest.approx(1.5) and fit.samples == 25 and fit.reliable
    with pytest.raises(SimulationError):
        measure_speed(trace, burn_in_periods=25)


def test_shift_keeps_lab_frame(ex1, small_grid):
    sys_ = LVSystem(ex1, small_grid)
    s = default_initial(ex1, small_grid)
    X = front_position(ex1, s, small_grid)
    moved = sys_.shift(s, 30)
    assert front_position(ex1, moved, small_grid) == pytest.approx(X - 3.0, abs=1e-9)
    back = sys_.shift(s, -30)
    assert front_position(ex1, back, small_grid) == pytest.approx(X + 3.0, abs=1e-9)


@pytest.mark.filterwarnings("ignore:front fit unreliable")
def test_recentering_matches_wide_domain():
    m = ModelParams.constant(1.0, d1=1, r1=1, a1=1, b1=0.3, d2=1, r2=1, a2=3, b2=1)
    t_end = 30.0
    narrow = run(m, SimConfig(Grid.symmetric(50.0, 0.1), dt=0.01, t_end=t_end, burn_in_periods=2))
    wide = run(m, SimConfig(Grid.symmetric(80.0, 0.1), dt=0.01, t_end=t_end, recenter=False,
                            burn_in_periods=2))
    assert narrow.offset != 0.0
    np.testing.assert_allclose(narrow.trace.positions, wide.trace.positions, atol=1e-9)
    assert narrow.speed.c > 0


def test_short_run_outputs(ex1, tmp_path):
    g = Grid.symmetric(30.0, 0.2)
    cfg = SimConfig(g, dt=2e-3, t_end=4 * math.pi, record_every=200, burn_in_periods=0,
                    out_dir=str(tmp_path))
    res = run(ex1, cfg)
    assert res.speed is None  # fewer than 10 period samples
    rows = list(csv.reader(open(tmp_path / "trace.csv")))
    assert rows[0] == ["t", "X", "front_value"] and len(rows) == 1 + len(res.trace.times)
    snap = sorted(tmp_path.glob("snap_*.csv"))
    assert snap
    header = next(csv.reader(open(snap[0])))
    assert header == ["x", "u", "v", "phi", "psi", "t"]
    assert len(open(snap[0]).read().splitlines()[1].split(",")[1]) >= 17


def test_snapshot_precision(ex1, small_grid, tmp_path):
    s = default_initial(ex1, small_grid)
    path = tmp_path / "s.csv"
    write_snapshot_csv(path, ex1, s, small_grid)
    rows = list(csv.reader(open(path)))
    vals = np.array(rows[1:], dtype=float)
    np.testing.assert_array_equal(vals[:, 1], s.u)
    np.testing.assert_array_equal(vals[:, 3], s.u / float(ex1.p(0)))
