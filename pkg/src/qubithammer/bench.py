"""Victim benchmark circuits and a fixed gate-to-pulse lowering."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .device import DeviceConfig
from .errors import ScheduleError
from .gates import SINGLE_QUBIT, TWO_QUBIT, GateUnitary, embed
from .pulse import DriveInstruction, GateMarker, PulseSchedule, VirtualZ, gaussian, unit_area_per_dt

BENCHMARKS = ("idle", "grover2", "bell", "qaoa")


@dataclass(frozen=True)
class Delay:
    qubits: tuple[int, ...]
    duration: int


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    ops: tuple = ()
    measured: bool = True
    name: str = "custom"

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))
        for op in self.ops:
            targets = op.targets if isinstance(op, GateUnitary) else op.qubits
            if any(not 0 <= t < self.n_qubits for t in targets):
                raise ScheduleError(f"{op} targets a qubit outside a {self.n_qubits}-qubit circuit")


@dataclass(frozen=True)
class LoweringRules:
    amp: float = 0.1  # envelope amplitude of the X template before exact-area rescaling
    sigma_ratio: float = 0.25
    two_qubit_window: int = 300  # dt of wall time reserved for each two-qubit gate
    rules: tuple[str, ...] = SINGLE_QUBIT + TWO_QUBIT

    def pi_duration(self, cfg: DeviceConfig, q: int) -> int:
        return pi_pulse(cfg, q, self)[1]


def pi_pulse(cfg: DeviceConfig, q: int, rules: LoweringRules = LoweringRules()) -> tuple[float, int]:
    """(amplitude, duration) of qubit ``q``'s calibrated Gaussian pi pulse.

    The duration is the area-condition value at ``rules.amp`` rounded to dt;
    the amplitude is then adjusted so the area is exact.
    """
    per_amp_dt = 2.0 * math.pi * cfg.qubits[q].f_rabi_max * unit_area_per_dt("gaussian", rules.sigma_ratio) * cfg.dt_us
    T = max(1, round(math.pi / (per_amp_dt * rules.amp)))
    amp = math.pi / (per_amp_dt * T)
    if amp > 1.0:
        raise ScheduleError(f"qubit {q}: pi pulse needs amplitude {amp:.3f} > 1")
    return amp, T


# -- benchmarks ------------------------------------------------------------

def _g(name, *targets, params=()):
    return GateUnitary(name, targets, params)


def _phase_flip(bits: str) -> list:
    # Flip the sign of |bits> using X conjugation around CZ.
    xs = [_g("X", i) for i, b in enumerate(bits) if b == "0"]
    return xs + [_g("CZ", 0, 1)] + xs


def make_benchmark(kind: str, **params) -> Circuit:
    """Named benchmark circuit.

    ``idle(n=1, duration=160)``, ``grover2(marked="10")``, ``bell()``,
    ``qaoa(n=4, gamma=pi/4, beta=pi/8)`` on a ring.
    """
    if kind == "idle":
        n = int(params.get("n", 1))
        d = int(params.get("duration", 160))
        return Circuit(n, (Delay(tuple(range(n)), d),), True, "idle")
    if kind == "grover2":
        marked = str(params.get("marked", "10"))
        if len(marked) != 2 or set(marked) - {"0", "1"}:
            raise ScheduleError(f"marked state must be a 2-bit string, got {marked!r}")
        hh = [_g("H", 0), _g("H", 1)]
        ops = hh + _phase_flip(marked) + hh + _phase_flip("00") + hh
        return Circuit(2, tuple(ops), True, "grover2")
    if kind == "bell":
        return Circuit(2, (_g("H", 0), _g("CX", 0, 1)), True, "bell")
    if kind == "qaoa":
        n = int(params.get("n", 4))
        gamma = float(params.get("gamma", math.pi / 4))
        beta = float(params.get("beta", math.pi / 8))
        if n < 2:
            raise ScheduleError("qaoa needs at least 2 qubits")
        ops = [_g("H", q) for q in range(n)]
        edges = [(i, (i + 1) % n) for i in range(n)] if n > 2 else [(0, 1)]
        for a, b in edges:
            ops += [_g("CX", a, b), _g("RZ", b, params=(2 * gamma,)), _g("CX", a, b)]
        ops += [_g("RX", q, params=(2 * beta,)) for q in range(n)]
        return Circuit(n, tuple(ops), True, "qaoa")
    raise ScheduleError(f"unknown benchmark {kind!r}; choose from {', '.join(BENCHMARKS)}")


# -- ideal reference -------------------------------------------------------

def ideal_statevector(circuit: Circuit) -> np.ndarray:
    n = circuit.n_qubits
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = 1.0
    for op in circuit.ops:
        if isinstance(op, GateUnitary):
            psi = embed(op.matrix, op.targets, n) @ psi
    return psi


def ideal_distribution(circuit: Circuit, tol: float = 1e-12) -> dict[str, float]:
    p = np.abs(ideal_statevector(circuit)) ** 2
    n = circuit.n_qubits
    return {format(i, f"0{n}b"): float(v) for i, v in enumerate(p) if v > tol}


# -- lowering --------------------------------------------------------------

def lower(circuit: Circuit, cfg: DeviceConfig, register: Sequence[int],
          rules: LoweringRules = LoweringRules()) -> PulseSchedule:
    """ASAP pulse schedule for ``circuit`` with circuit qubit ``i`` on ``register[i]``."""
    register = [int(q) for q in register]
    if len(register) != circuit.n_qubits:
        raise ScheduleError(f"register of {len(register)} qubits for a {circuit.n_qubits}-qubit circuit")
    if len(set(register)) != len(register):
        raise ScheduleError("register qubits must be distinct")
    for q in register:
        cfg.check_qubit(q)
    pi = {q: pi_pulse(cfg, q, rules) for q in register}
    cursor = [0] * circuit.n_qubits
    ins, vz, gates = [], [], []
    seq = 0

    def drive(i, amp, phase=0.0):
        q = register[i]
        T = pi[q][1]
        ins.append(DriveInstruction(q, cfg.qubits[q].f_q, phase, gaussian(amp, T, T * rules.sigma_ratio), cursor[i]))
        cursor[i] += T

    def frame(i, angle):
        nonlocal seq
        vz.append(VirtualZ(register[i], cursor[i], angle, seq))
        seq += 1

    for op in circuit.ops:
        if isinstance(op, Delay):
            for i in op.qubits:
                cursor[i] += op.duration
            continue
        if op.name not in rules.rules:
            raise ScheduleError(f"no lowering rule for gate {op.name}")
        if op.name in TWO_QUBIT:
            a, b = op.targets
            start = max(cursor[a], cursor[b])
            end = start + rules.two_qubit_window
            gates.append(GateMarker(op.name, (register[a], register[b]), start, end, op.params, seq))
            seq += 1
            cursor[a] = cursor[b] = end
            continue
        (i,) = op.targets
        amp_pi = pi[register[i]][0]
        if op.name == "X":
            drive(i, amp_pi)
        elif op.name == "SX":
            drive(i, amp_pi / 2)
        elif op.name == "RX":
            theta = math.remainder(op.params[0], 2 * math.pi)
            if theta != 0.0:
                drive(i, amp_pi * abs(theta) / math.pi, 0.0 if theta > 0 else math.pi)
        elif op.name == "RZ":
            frame(i, op.params[0])
        elif op.name == "H":
            frame(i, math.pi / 2)
            drive(i, amp_pi / 2)
            frame(i, math.pi / 2)
    return PulseSchedule(tuple(ins), tuple(vz), tuple(gates), max(cursor + [0]))
