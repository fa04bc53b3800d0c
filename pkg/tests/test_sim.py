"""Difference-equation execution, sine measurements, distortion, inverter loop."""

import math

import numpy as np
import pytest

from sbtkit import (
    DiffEqCoeffs,
    DiffEqRunner,
    DomainError,
    EmptyInput,
    InverterConfig,
    NotSettled,
    NumericOverflow,
    ParamError,
    PiParams,
    QrParams,
    Sbt,
    SbtParams,
    SimTrace,
    TustinPrewarp,
    WindowError,
    diff_eq_coeffs,
    inverter_closed_loop,
    pi_discretize,
    pir_discretize,
    qr_discretize,
    run_difference_equation,
    sbt_params_straightforward,
    sine_steady_state,
    thd,
    trace_thd,
    write_trace_csv,
)

KR, WC, WN = 59.1, 17.907, 5969.0
T = 5e-5
FS = 20000.0
BOARD = QrParams(KR, WC, WN)

GAIN_ONLY = DiffEqCoeffs(kin0=2.0, kin1=0.0, kin2=0.0, kout1=0.0, kout2=0.0)
DELAY_ONE = DiffEqCoeffs(kin0=0.0, kin1=1.0, kin2=0.0, kout1=0.0, kout2=0.0)


def board_coeffs(method):
    return diff_eq_coeffs(qr_discretize(BOARD, method, T))


def test_runner_matches_manual_recursion():
    rng = np.random.RandomState(13)
    c = DiffEqCoeffs(kin0=0.3, kin1=-0.1, kin2=0.05, kout1=0.4, kout2=-0.2)
    r = DiffEqRunner(c)
    x1 = x2 = y1 = y2 = 0.0
    for _ in range(200):
        x = rng.uniform(-1, 1)
        y = c.kin0 * x + c.kin1 * x1 + c.kin2 * x2 + c.kout1 * y1 + c.kout2 * y2
        assert r.step(x) == pytest.approx(y, rel=1e-15, abs=1e-15)
        x2, x1 = x1, x
        y2, y1 = y1, y


def test_run_difference_equation_single_and_list_agree():
    x = np.sin(np.linspace(0, 20, 500))
    a = run_difference_equation(GAIN_ONLY, x)
    b = run_difference_equation([GAIN_ONLY], x)
    assert np.array_equal(a, b)
    assert np.allclose(a, 2.0 * x)


def test_run_difference_equation_parallel_legs_sum():
    x = np.cos(np.linspace(0, 15, 400))
    both = run_difference_equation([GAIN_ONLY, DELAY_ONE], x)
    single = run_difference_equation(GAIN_ONLY, x) + run_difference_equation(DELAY_ONE, x)
    assert np.allclose(both, single)


def test_run_difference_equation_guards():
    with pytest.raises(EmptyInput):
        run_difference_equation([], np.ones(4))
    with pytest.raises(EmptyInput):
        run_difference_equation(GAIN_ONLY, [])
    runaway = DiffEqCoeffs(kin0=1.0, kin1=0.0, kin2=0.0, kout1=2.0, kout2=0.0)
    with pytest.raises(NumericOverflow):
        run_difference_equation(runaway, np.ones(1000))


def test_sine_gain_system():
    res = sine_steady_state(GAIN_ONLY, 950.0, FS, amp=0.7)
    assert res.amplitude == pytest.approx(1.4, rel=1e-9)
    assert res.phase_deg == pytest.approx(0.0, abs=1e-6)
    # the residual is a root of differenced mean squares, so its floor is
    # about sqrt(machine epsilon), not epsilon itself
    assert res.residual < 1e-6


def test_sine_delay_phase():
    res = sine_steady_state(DELAY_ONE, 950.0, FS)
    assert res.amplitude == pytest.approx(1.0, rel=1e-9)
    assert res.phase_deg == pytest.approx(-360.0 * 950.0 / FS, abs=1e-6)


def test_sine_zero_amplitude_is_quiet():
    res = sine_steady_state(GAIN_ONLY, 950.0, FS, amp=0.0)
    assert res.amplitude == 0.0
    assert res.phase_deg == 0.0
    assert res.residual == 0.0


def test_sine_domain_and_param_checks():
    with pytest.raises(DomainError):
        sine_steady_state(GAIN_ONLY, 0.0, FS)
    with pytest.raises(DomainError):
        sine_steady_state(GAIN_ONLY, 10000.0, FS)
    with pytest.raises(ParamError):
        sine_steady_state(GAIN_ONLY, 950.0, FS, settle_cycles=-1)
    with pytest.raises(ParamError):
        sine_steady_state(GAIN_ONLY, 950.0, FS, measure_cycles=0)


def test_sine_not_settled_for_high_q_without_patience():
    coeffs = board_coeffs(TustinPrewarp())
    with pytest.raises(NotSettled):
        sine_steady_state(coeffs, 950.0, FS, settle_cycles=20)


def test_sine_board_amplitude_with_patience():
    coeffs = board_coeffs(TustinPrewarp())
    res = sine_steady_state(coeffs, 950.0, FS, settle_cycles=1200)
    assert res.amplitude == pytest.approx(59.0999, rel=1e-3)
    assert res.residual < 1e-3


def test_thd_pure_tone_is_clean():
    fs, f0 = 40000.0, 50.0
    n = np.arange(int(fs / f0) * 12)
    x = 5.0 * np.sin(2 * math.pi * f0 * n / fs)
    assert thd(x, f0, fs) < 1e-10


def test_thd_known_mix():
    fs, f0 = 40000.0, 50.0
    n = np.arange(int(fs / f0) * 15)
    tt = 2 * math.pi * f0 * n / fs
    x = 10.0 * np.sin(tt) + 1.0 * np.sin(3 * tt) + 0.5 * np.sin(5 * tt)
    expected = 100.0 * math.sqrt(1.0**2 + 0.5**2) / 10.0
    assert thd(x, f0, fs) == pytest.approx(expected, rel=1e-9)


def test_thd_harmonics_beyond_nyquist_skipped():
    fs, f0 = 1000.0, 50.0
    n = np.arange(int(fs / f0) * 10)
    tt = 2 * math.pi * f0 * n / fs
    # 11th harmonic at 550 Hz would alias; only 2..9 are counted
    x = np.sin(tt) + 0.3 * np.sin(9 * tt)
    assert thd(x, f0, fs, max_harmonic=50) == pytest.approx(30.0, rel=1e-6)


def test_thd_window_guards():
    fs, f0 = 40000.0, 50.0
    with pytest.raises(EmptyInput):
        thd([], f0, fs)
    with pytest.raises(DomainError):
        thd(np.ones(100), 0.0, fs)
    with pytest.raises(ParamError):
        thd(np.ones(100), f0, fs, max_harmonic=1)
    n = np.arange(int(fs / f0) * 10 + 17)  # fractional period count
    with pytest.raises(WindowError):
        thd(np.sin(2 * math.pi * f0 * n / fs), f0, fs)
    short = np.arange(int(fs / f0) * 5)  # whole but too few periods
    with pytest.raises(WindowError):
        thd(np.sin(2 * math.pi * f0 * short / fs), f0, fs)
    flat = np.zeros(int(fs / f0) * 10)
    with pytest.raises(DomainError):
        thd(flat, f0, fs)


def test_inverter_config_validation():
    InverterConfig()
    with pytest.raises(ParamError):
        InverterConfig(duration=0.1)  # fewer than 20 grid cycles
    with pytest.raises(ParamError):
        InverterConfig(delay_samples=-1)
    with pytest.raises(ParamError):
        InverterConfig(harmonic_freq=30000.0)
    with pytest.raises(ParamError):
        InverterConfig(l_filter=0.0)


def test_sim_trace_length_check():
    with pytest.raises(ParamError):
        SimTrace(np.zeros(3), np.zeros(3), np.zeros(2), np.zeros(3))


INV = QrParams(44.325, WC, WN)
PI = PiParams(2.955, 8.594e-4)


def inverter_legs(method):
    return pir_discretize(PI, INV, method, 1.0 / 40000.0)


def test_inverter_tracks_reference():
    cfg = InverterConfig(duration=0.5)
    trace = inverter_closed_loop(cfg, inverter_legs(TustinPrewarp()))
    assert len(trace.t) == round(cfg.duration * cfg.fs_ctrl)
    # measure the settled fundamental amplitude over the last 10 cycles
    n = round(10 * cfg.fs_ctrl / cfg.grid_freq)
    tail = trace.i_grid[-n:]
    idx = np.arange(len(trace.i_grid))[-n:]
    ph = np.exp(-2j * math.pi * cfg.grid_freq * idx / cfg.fs_ctrl)
    amp = abs(2.0 / n * np.dot(tail, ph))
    assert amp == pytest.approx(cfg.i_ref_amplitude, rel=0.02)


def test_inverter_unstable_controller_overflows():
    with pytest.warns(Warning):
        legs = pir_discretize(PI, INV, Sbt(SbtParams(0.0, 1.0)), 1.0 / 40000.0)
    cfg = InverterConfig(duration=0.5)
    with pytest.raises(NumericOverflow):
        inverter_closed_loop(cfg, legs)


def test_inverter_harmonic_rejection_ordering():
    cfg = InverterConfig(duration=0.5)
    pi_only = (pi_discretize(PI, 1.0 / 40000.0),)
    t_pi = trace_thd(inverter_closed_loop(cfg, pi_only), cfg)
    t_sota = trace_thd(inverter_closed_loop(cfg, inverter_legs(TustinPrewarp())), cfg)
    assert t_pi > 5.0 * t_sota
    assert t_sota < 2.0


def test_trace_thd_window_checks():
    cfg = InverterConfig(duration=0.5)
    trace = inverter_closed_loop(cfg, inverter_legs(TustinPrewarp()))
    with pytest.raises(WindowError):
        trace_thd(trace, cfg, periods=100)  # longer than the trace


def test_write_trace_csv(tmp_path):
    cfg = InverterConfig(duration=0.5)
    trace = inverter_closed_loop(cfg, inverter_legs(TustinPrewarp()))
    path = tmp_path / "trace.csv"
    write_trace_csv(trace, str(path))
    lines = path.read_text().splitlines()
    assert lines[0] == "t,i_grid,v_grid,v_inv"
    assert len(lines) == len(trace.t) + 1
    first = [float(v) for v in lines[1].split(",")]
    assert first[0] == 0.0
    assert not list(tmp_path.glob("*.tmp"))
