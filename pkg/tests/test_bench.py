import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qubithammer.bench import (Circuit, Delay, LoweringRules, ideal_distribution, ideal_statevector, lower,
                               make_benchmark, pi_pulse)
from qubithammer.engine import SimParams, evolve
from qubithammer.errors import ScheduleError
from qubithammer.gates import GateUnitary
from qubithammer.pulse import pulse_area

QUIET = SimParams(noise_enabled=False)


def grover_matrix_oracle(marked):
    # Independent construction: diffusion 2|s><s| - I after the marked-sign oracle.
    s = np.full(4, 0.5)
    oracle = np.eye(4)
    oracle[int(marked, 2), int(marked, 2)] = -1
    diffusion = 2 * np.outer(s, s) - np.eye(4)
    return diffusion @ oracle @ s


def test_bell_ideal():
    assert ideal_distribution(make_benchmark("bell")) == pytest.approx({"00": 0.5, "11": 0.5}, abs=1e-12)


@pytest.mark.parametrize("marked", ["00", "01", "10", "11"])
def test_grover_ideal(marked):
    d = ideal_distribution(make_benchmark("grover2", marked=marked))
    assert d == pytest.approx({marked: 1.0}, abs=1e-12)
    ref = grover_matrix_oracle(marked)
    assert np.allclose(np.abs(ideal_statevector(make_benchmark("grover2", marked=marked))) ** 2, ref**2)


def test_qaoa_ideal_normalized():
    d = ideal_distribution(make_benchmark("qaoa"))
    assert math.fsum(d.values()) == pytest.approx(1.0)
    assert all(len(k) == 4 for k in d)


def test_unknown_benchmark():
    with pytest.raises(ScheduleError):
        make_benchmark("shor")
    with pytest.raises(ScheduleError):
        make_benchmark("grover2", marked="2")


def test_lower_x_area(line5):
    s = lower(Circuit(1, (GateUnitary("X", (0,)),)), line5, [2])
    (i,) = s.instructions
    q = line5.qubits[2]
    theta = 2 * math.pi * q.f_rabi_max * pulse_area(i.envelope) * line5.dt_us
    assert theta == pytest.approx(math.pi, rel=1e-12)
    assert i.f_d == q.f_q and i.channel == 2


def test_lower_rz_is_virtual(line5):
    s = lower(Circuit(1, (GateUnitary("RZ", (0,), (0.3,)),)), line5, [0])
    assert s.instructions == () and len(s.virtual_z) == 1 and s.total_duration == 0


def test_lower_bell_counts(line5):
    s = lower(make_benchmark("bell"), line5, [0, 1])
    # H lowers to vz . SX . vz: one SX drive, two frame entries, one CX window.
    assert len(s.instructions) == 1
    assert len(s.virtual_z) == 2
    assert [g.name for g in s.gates] == ["CX"]
    assert s.gates[0].end - s.gates[0].start == LoweringRules().two_qubit_window


def test_lower_register_mismatch(line5):
    with pytest.raises(ScheduleError):
        lower(make_benchmark("bell"), line5, [0])
    with pytest.raises(ScheduleError):
        lower(make_benchmark("bell"), line5, [1, 1])


def test_delay_advances_cursor(line5):
    s = lower(Circuit(1, (Delay((0,), 400), GateUnitary("X", (0,)))), line5, [0])
    assert s.instructions[0].start == 400


def test_pi_pulse_rounding(line5):
    amp, T = pi_pulse(line5, 0)
    assert isinstance(T, int) and abs(amp - 0.1) < 0.1 / T


def _fidelity(cfg, circuit, register):
    rho = evolve(cfg, register, lower(circuit, cfg, register), None, QUIET).data
    psi = ideal_statevector(circuit)
    return float(np.real(psi.conj() @ rho @ psi))


@pytest.mark.parametrize("kind,params", [("bell", {}), ("grover2", {"marked": "10"}), ("grover2", {"marked": "01"}),
                                         ("qaoa", {}), ("idle", {"n": 2, "duration": 500})])
def test_lowered_fidelity(line5, kind, params):
    c = make_benchmark(kind, **params)
    assert _fidelity(line5, c, list(range(c.n_qubits))) >= 0.999


@settings(max_examples=20, deadline=None)
@given(st.lists(st.tuples(st.sampled_from(["X", "SX", "H", "RZ", "RX", "CX", "CZ"]), st.floats(-3.0, 3.0),
                          st.booleans()), min_size=1, max_size=6))
def test_random_circuit_fidelity(ops):
    from conftest import make_line
    cfg = make_line(2)
    gates = []
    for name, ang, flip in ops:
        a, b = (1, 0) if flip else (0, 1)
        if name in ("CX", "CZ"):
            gates.append(GateUnitary(name, (a, b)))
        elif name in ("RZ", "RX"):
            gates.append(GateUnitary(name, (a,), (ang,)))
        else:
            gates.append(GateUnitary(name, (a,)))
    assert _fidelity(cfg, Circuit(2, tuple(gates)), [0, 1]) >= 0.999
