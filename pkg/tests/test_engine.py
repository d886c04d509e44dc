import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qubithammer.device import CrosstalkMatrix
from qubithammer.engine import (DensityMatrix, OutcomeDistribution, SimParams, evolve, evolve_many, measure,
                                sample_counts)
from qubithammer.errors import DeviceValidationError, IntegrationError
from qubithammer.pulse import DriveInstruction, PulseSchedule, constant, gaussian, schedule

from conftest import make_line

QUIET = SimParams(noise_enabled=False)


def _one(ch, f, env, start=0, phase=0.0):
    return DriveInstruction(ch, f, phase, env, start)


def test_no_dynamics_exact(line5):
    st_ = evolve(line5, [0], PulseSchedule(total_duration=500), None, QUIET)
    assert np.array_equal(st_.data, DensityMatrix.ground(1).data)


def test_resonant_pi_area_condition():
    A, T = 0.5, 20
    cfg = make_line(1)
    f_rabi = 1.0 / (2 * A * T * cfg.dt_us)  # 2 pi f A T dt = pi
    from dataclasses import replace
    cfg = replace(cfg, qubits=(replace(cfg.qubits[0], f_rabi_max=f_rabi),))
    s = schedule([_one(0, cfg.qubits[0].f_q, constant(A, T))])
    p1 = evolve(cfg, [0], s, None, QUIET).populations()[1]
    assert abs(p1 - 1.0) <= 1e-6


def detuned_p1(omega, delta, t):
    w = math.hypot(omega, delta)
    return omega**2 / w**2 * math.sin(w * t / 2) ** 2


def test_detuned_rabi_matches_analytic():
    cfg = make_line(1)
    f_q, f_r, dt_us = cfg.qubits[0].f_q, cfg.qubits[0].f_rabi_max, cfg.dt_us
    err = 0.0
    for A in (0.05, 0.1, 0.2):
        for det_mhz in (0.0, 1.5, -4.0, 10.0):
            durations = [40, 110, 230, 400]
            scheds = [schedule([_one(0, f_q + det_mhz * 1e-3, constant(A, T))]) for T in durations]
            for T, r in zip(durations, evolve_many(cfg, [0], scheds, None, QUIET)):
                omega = 2 * math.pi * f_r * A
                ref = detuned_p1(omega, 2 * math.pi * det_mhz, T * dt_us)
                err = max(err, abs(r.populations()[1] - ref))
    assert err < 1e-3


def test_batched_equals_single(line5):
    s1 = schedule([_one(0, 5.0, gaussian(0.1, 160))])
    s2 = schedule([_one(0, 5.002, gaussian(0.05, 100), 30)], total_duration=300)
    a = evolve_many(line5, [0, 1], [s1, s2], None, SimParams())
    assert np.allclose(a[0].data, evolve(line5, [0, 1], s1).data, atol=1e-14)
    assert np.allclose(a[1].data, evolve(line5, [0, 1], s2).data, atol=1e-14)


def test_measure_examples():
    cfg = make_line(2)
    d = measure(DensityMatrix.basis("00"), cfg, [0, 1])
    assert d.nonzero() == {"00": 1.0}
    cfg2 = make_line(1, p01=0.02)
    assert measure(DensityMatrix.basis("0"), cfg2, [0]).probs == pytest.approx({"0": 0.98, "1": 0.02}, abs=1e-15)
    bell = DensityMatrix.from_statevector(np.array([1, 0, 0, 1]) / math.sqrt(2))
    assert measure(bell, cfg, [0, 1]).nonzero() == pytest.approx({"00": 0.5, "11": 0.5}, abs=1e-15)


def test_measure_readout_p10():
    cfg = make_line(2, p10=0.1)
    p = measure(DensityMatrix.basis("11"), cfg, [0, 1]).probs
    assert p["11"] == pytest.approx(0.81) and p["00"] == pytest.approx(0.01)


def test_sample_counts_examples():
    d = sample_counts(OutcomeDistribution({"0": 1.0}), 100, 3)
    assert d.counts == {"0": 100}
    half = OutcomeDistribution({"1": 0.5, "0": 0.5})
    a, b = sample_counts(half, 4096, 11), sample_counts(half, 4096, 11)
    assert a.counts == b.counts
    sigma = math.sqrt(4096 * 0.25)
    assert abs(a.counts["0"] - 2048) <= 5 * sigma
    assert sum(a.counts.values()) == 4096


def test_zero_coupling_adversary_has_no_effect():
    cfg = make_line(5, neighbor_c=0.0, background_c=0.0)
    victim = schedule([_one(0, cfg.qubits[0].f_q, gaussian(0.1, 160))], total_duration=600)
    adv = schedule([_one(q, cfg.qubits[0].f_q, gaussian(1.0, 500)) for q in (2, 3, 4)])
    a = evolve(cfg, [0, 1], victim, adv, SimParams())
    b = evolve(cfg, [0, 1], victim, None, SimParams())
    assert np.max(np.abs(a.data - b.data)) <= 1e-12


def test_unitary_purity_and_trace(eagle):
    s = schedule([_one(0, eagle.qubits[0].f_q, gaussian(0.1, 160)), _one(1, eagle.qubits[1].f_q, gaussian(0.07, 160), 50)])
    adv = schedule([_one(q, eagle.qubits[0].f_q, gaussian(0.1, 300)) for q in range(2, 40)])
    r = evolve(eagle, [0, 1], s, adv, QUIET)
    assert abs(r.purity() - 1) < 1e-6
    assert abs(r.trace() - 1) < 1e-6
    r.check()


def test_step_halving_converges(eagle):
    s = schedule([_one(0, eagle.qubits[0].f_q + 0.002, gaussian(0.1, 160)),
                  _one(1, eagle.qubits[1].f_q, gaussian(0.05, 200), 100)])
    adv = schedule([_one(q, eagle.qubits[0].f_q, gaussian(0.08, 155)) for q in range(20, 60)])
    p4 = measure(evolve(eagle, [0, 1], s, adv, SimParams(step_divisor=4)), eagle, [0, 1]).probs
    p8 = measure(evolve(eagle, [0, 1], s, adv, SimParams(step_divisor=8)), eagle, [0, 1]).probs
    assert max(abs(p4[k] - p8[k]) for k in p4) < 1e-4


def test_t1_decay():
    cfg = make_line(1, t1=5.0, t2=10.0)  # t2 = 2 t1: pure relaxation
    for T in (500, 2000, 4000):
        r = evolve(cfg, [0], PulseSchedule(total_duration=T), None, SimParams(), DensityMatrix.basis("1"))
        assert abs(r.populations()[1] - math.exp(-T * cfg.dt_us / 5.0)) < 1e-3


def test_dephasing_coherence_decay():
    cfg = make_line(1, t1=50.0, t2=4.0)
    plus = DensityMatrix.from_statevector(np.array([1, 1]) / math.sqrt(2))
    T = 1500
    r = evolve(cfg, [0], PulseSchedule(total_duration=T), None, SimParams(), plus)
    t = T * cfg.dt_us
    assert abs(abs(r.data[0, 1]) - 0.5 * math.exp(-t / 4.0)) < 1e-4


def test_register_errors(eagle):
    with pytest.raises(DeviceValidationError):
        evolve(eagle, list(range(6)), PulseSchedule())
    with pytest.raises(DeviceValidationError):
        evolve(eagle, [0, 0], PulseSchedule())


def test_instability_reported():
    cfg = make_line(1)
    from dataclasses import replace
    cfg = replace(cfg, qubits=(replace(cfg.qubits[0], f_rabi_max=5000.0),))
    s = schedule([_one(0, cfg.qubits[0].f_q, constant(1.0, 200))])
    with pytest.raises(IntegrationError, match="step_divisor"):
        evolve(cfg, [0], s, None, SimParams(step_divisor=1))


@settings(max_examples=15, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 4), st.floats(-20, 20), st.floats(0.0, 0.3), st.integers(10, 200),
                          st.integers(0, 300)), min_size=1, max_size=4))
def test_trace_and_psd_with_noise(pulses):
    cfg = make_line(5, t1=20.0, t2=15.0, neighbor_c=0.05, background_c=0.01)
    ins = [_one(ch, cfg.qubits[0].f_q + det * 1e-3, gaussian(a, T), start) for ch, det, a, T, start in pulses]
    per_ch = {}
    keep = []
    for i in ins:  # drop same-channel overlaps
        if all(i.start >= j.end or j.start >= i.end for j in per_ch.get(i.channel, [])):
            per_ch.setdefault(i.channel, []).append(i)
            keep.append(i)
    adv = schedule(keep)
    r = evolve(cfg, [0, 1], PulseSchedule(total_duration=adv.total_duration), adv, SimParams())
    assert abs(r.trace() - 1) < 1e-6
    r.check(herm_tol=1e-9, trace_tol=1e-6)
