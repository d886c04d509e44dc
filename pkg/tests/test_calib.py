import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qubithammer.calib import (CalibrationResult, SweepResult, calibrate_qubit, calibration_from_device,
                               default_durations, fit_lorentzian, fit_rabi, frequency_sweep, lorentzian, rabi_scan,
                               with_theta)
from qubithammer.engine import SimParams
from qubithammer.errors import CalibrationError
from qubithammer.pulse import gaussian, unit_area_per_dt

from conftest import make_line


def synthetic_sweep(f0=5.1, gamma=2.0, A=0.8, B=0.02, span=40.0, step=0.2):
    off = np.arange(-span / 2, span / 2 + step / 2, step)
    f = f0 + off * 1e-3
    y = lorentzian(off, 0.0, gamma, A, B)
    return SweepResult(tuple(zip(f.tolist(), y.tolist())), 0)


def test_lorentzian_noiseless_recovery():
    fit = fit_lorentzian(synthetic_sweep())
    assert fit.converged
    assert abs(fit.f0 - 5.1) * 1e6 < 1.0  # kHz
    assert abs(fit.linewidth - 2.0) / 2.0 < 0.01
    assert fit.amplitude == pytest.approx(0.8, rel=1e-3)
    assert fit.offset == pytest.approx(0.02, abs=1e-4)


def test_lorentzian_off_center_peak():
    off = np.arange(-20, 20.1, 0.2)
    f = 5.0 + off * 1e-3
    y = lorentzian(off, 3.3, 1.2, 0.6, 0.05)
    fit = fit_lorentzian(SweepResult(tuple(zip(f.tolist(), y.tolist())), 0))
    assert fit.converged and abs(fit.f0 - 5.0033) * 1e6 < 1.0


def test_lorentzian_flat_not_converged():
    off = np.arange(-20, 20.1, 0.2)
    pts = tuple(((5.0 + o * 1e-3), 0.3) for o in off)
    assert not fit_lorentzian(SweepResult(pts, 0)).converged


def test_sweep_rejects_unsorted():
    with pytest.raises(CalibrationError):
        SweepResult(((5.0, 0.1), (4.9, 0.2)), 10)


def pi160_device(n=1, **kw):
    cfg = make_line(n, **kw)
    f_r = 1.0 / (2 * 0.1 * unit_area_per_dt() * cfg.dt_us * 160)
    return replace(cfg, qubits=tuple(replace(q, f_rabi_max=f_r) for q in cfg.qubits))


def test_simulated_sweep_peak_and_fit():
    cfg = make_line(1, f0=5.1)
    sw = frequency_sweep(cfg, 0, 5.1, 40, 0.2, gaussian(0.05, 400), shots=4096, seed=3)
    assert len(sw.points) == 201
    assert abs(sw.freqs[np.argmax(sw.probs)] - 5.1) * 1e3 <= 0.4
    fit = fit_lorentzian(sw)
    assert fit.converged and abs(fit.f0 - 5.1) * 1e3 <= 0.2


def test_sweep_zero_probe_is_readout_floor():
    cfg = make_line(1, p01=0.03)
    sw = frequency_sweep(cfg, 0, 5.0, 4, 0.5, gaussian(0.0, 160), shots=20000, seed=1)
    assert np.allclose(sw.probs, 0.03, atol=0.006)


@pytest.mark.parametrize("theta,expected", [(math.pi, 160), (math.pi / 2, 80)])
def test_rabi_synthetic(theta, expected):
    scan = [(t, 0.5 - 0.5 * math.cos(2 * math.pi * t / 320)) for t in default_durations()]
    fit = fit_rabi(scan, theta)
    assert fit.converged and fit.t_theta == expected
    assert fit.rabi_period == pytest.approx(320, rel=1e-6)


@settings(max_examples=25, deadline=None)
@given(st.floats(-0.2, 0.2), st.floats(0.4, 1.0), st.floats(180, 400))
def test_rabi_offset_invariance(shift, A, T):
    base = [(t, 0.5 - 0.5 * A * math.cos(2 * math.pi * t / T)) for t in default_durations()]
    moved = [(t, p + shift) for t, p in base]
    assert fit_rabi(base).t_theta == fit_rabi(moved).t_theta == round(T / 2)


def test_rabi_short_scan_rejected():
    scan = [(t, 0.5 - 0.5 * math.cos(2 * math.pi * t / 2000)) for t in range(10, 200, 10)]
    with pytest.raises(CalibrationError):
        fit_rabi(scan)
    with pytest.raises(CalibrationError):
        fit_rabi([(1, 0.0), (2, 0.1)])


def test_rabi_constant_envelope_first_maximum():
    cfg = make_line(1)
    scan = rabi_scan(cfg, 0, 5.0, list(range(4, 800, 4)), amp=0.1, shots=8192, seed=2, kind="constant",
                     params=SimParams(noise_enabled=False))
    fit = fit_rabi(scan)
    # Constant envelope: 2 pi f_rabi A t dt = pi.
    t_pi = 1.0 / (2 * cfg.qubits[0].f_rabi_max * 0.1 * cfg.dt_us)
    assert abs(fit.t_theta - t_pi) <= 2


def test_rabi_scan_on_simulator_t_pi_160():
    cfg = pi160_device()
    scan = rabi_scan(cfg, 0, cfg.qubits[0].f_q, default_durations(), shots=4096, seed=5)
    fit = fit_rabi(scan)
    assert 158 <= fit.t_theta <= 162


def test_calibrate_qubit_and_device_agree():
    cfg = pi160_device(1, f0=5.23)
    cal = calibrate_qubit(cfg, 0, seed=9)
    ref = calibration_from_device(cfg, 0)
    assert cal.converged
    assert abs(cal.f0 - 5.23) * 1e3 < 0.2
    assert abs(cal.t_theta - ref.t_theta) <= 2
    assert ref.t_theta == 160


def test_calibration_roundtrip_and_theta():
    cfg = pi160_device()
    c = calibration_from_device(cfg, 0)
    back = CalibrationResult.from_dict(c.to_dict())
    assert back.t_theta == c.t_theta and math.isnan(back.linewidth) and back.to_dict() == c.to_dict()
    assert with_theta(c, math.pi / 2).t_theta == 80
    assert c.duration_for(2 * math.pi) == 320


def test_sweep_bad_args():
    cfg = make_line(1)
    with pytest.raises(CalibrationError):
        frequency_sweep(cfg, 0, 5.0, span=0)
    with pytest.raises(CalibrationError):
        rabi_scan(cfg, 0, 5.0, [40, 20])
