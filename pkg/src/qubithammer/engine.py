"""Open-system evolution of the victim register, readout and shot sampling.

Only the victim register is evolved quantum mechanically. Every other drive
line -- the adversary's, a defender's padding qubits -- acts as a classical
source whose field leaks onto each victim qubit ``v`` with strength
``coupling(v, channel)``. In the rotating frame of ``v`` an instruction ``d``
contributes::

    H = (Omega/2) [cos(2 pi Delta t + phi) X + sin(2 pi Delta t + phi) Y]
    Omega = 2 pi f_rabi_max(v) c(v, channel) a(t - start)
    Delta = f_d - f_q(v)

Time is carried in microseconds and frequency in MHz internally. The master
equation is integrated with fixed-step RK4; relaxation uses sigma_minus at
rate 1/t1 and pure dephasing uses Z/sqrt(2) at rate 1/t2 - 1/(2 t1).
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .device import DeviceConfig, coupling
from .errors import DeviceValidationError, IntegrationError, ScheduleError
from .gates import GateUnitary, embed, gate_matrix, rz
from .pulse import PulseSchedule, complex_envelope

MAX_REGISTER = 5


@dataclass(frozen=True)
class SimParams:
    step_divisor: int = 4
    noise_enabled: bool = True
    seed: int = 0
    shots: int = 4096

    def __post_init__(self):
        if self.step_divisor < 1:
            raise ValueError("step_divisor must be >= 1")
        if self.shots < 1:
            raise ValueError("shots must be >= 1")


@dataclass
class DensityMatrix:
    data: np.ndarray

    @property
    def n(self) -> int:
        return int(np.log2(self.data.shape[0]))

    @classmethod
    def ground(cls, n: int) -> "DensityMatrix":
        rho = np.zeros((2**n, 2**n), dtype=complex)
        rho[0, 0] = 1.0
        return cls(rho)

    @classmethod
    def from_statevector(cls, psi) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex)
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def basis(cls, bits: str) -> "DensityMatrix":
        psi = np.zeros(2 ** len(bits), dtype=complex)
        psi[int(bits, 2)] = 1.0
        return cls.from_statevector(psi)

    def trace(self) -> float:
        return float(np.real(np.trace(self.data)))

    def purity(self) -> float:
        return float(np.real(np.trace(self.data @ self.data)))

    def populations(self) -> np.ndarray:
        return np.real(np.diag(self.data)).copy()

    def check(self, herm_tol: float = 1e-9, trace_tol: float = 1e-9, psd_tol: float = 1e-8) -> None:
        d = self.data
        if not np.allclose(d, d.conj().T, atol=herm_tol, rtol=0):
            raise IntegrationError("density matrix is not Hermitian")
        if abs(self.trace() - 1.0) > trace_tol:
            raise IntegrationError(f"density matrix trace {self.trace()} deviates from 1")
        if np.linalg.eigvalsh(0.5 * (d + d.conj().T)).min() < -psd_tol:
            raise IntegrationError("density matrix is not positive semidefinite")


@dataclass(frozen=True)
class OutcomeDistribution:
    probs: dict[str, float]
    counts: dict[str, int] | None = None
    shots: int = 0

    def empirical(self) -> dict[str, float]:
        """Sampled frequencies when counts exist, otherwise the exact probabilities."""
        if self.counts is None:
            return dict(self.probs)
        return {k: v / self.shots for k, v in self.counts.items()}

    def nonzero(self, tol: float = 1e-12) -> dict[str, float]:
        return {k: v for k, v in self.probs.items() if v > tol}


def bitstrings(n: int) -> list[str]:
    return [format(i, f"0{n}b") for i in range(2**n)]


# -- register helpers ------------------------------------------------------

def _check_register(cfg: DeviceConfig, register: Sequence[int]) -> list[int]:
    register = [int(q) for q in register]
    if not register:
        raise DeviceValidationError("register is empty")
    if len(register) > MAX_REGISTER:
        raise DeviceValidationError(f"register of {len(register)} qubits exceeds the limit of {MAX_REGISTER}")
    if len(set(register)) != len(register):
        raise DeviceValidationError(f"register qubits must be distinct: {register}")
    for q in register:
        cfg.check_qubit(q)
    return register


def _raising_ops(n: int) -> np.ndarray:
    up = np.array([[0, 0], [1, 0]], dtype=complex)  # |1><0|
    return np.stack([embed(up, [j], n) for j in range(n)])


def _noise_terms(cfg: DeviceConfig, register: list[int]):
    """Constant part of the non-Hermitian generator, dephasing mask and relaxation ops."""
    n = len(register)
    d = 2**n
    K = np.zeros((d, d), dtype=complex)
    mask = np.zeros((d, d))
    lowering = []
    down = np.array([[0, 1], [0, 0]], dtype=complex)  # sigma_minus = |0><1|
    idx = np.arange(d)
    for j, q in enumerate(register):
        p = cfg.qubits[q]
        g1 = 1.0 / p.t1
        gphi = max(1.0 / p.t2 - 0.5 / p.t1, 0.0)
        Lm = embed(down, [j], n)
        lowering.append(np.sqrt(g1) * Lm)
        K += g1 * (Lm.conj().T @ Lm)
        # Z/sqrt(2) collapse at rate gphi: jump = (gphi/2) Z rho Z, anticommutator = (gphi/2) rho.
        s = 1.0 - 2.0 * ((idx >> (n - 1 - j)) & 1)
        mask += 0.5 * gphi * np.outer(s, s)
        K += 0.5 * gphi * np.eye(d)
    return K, mask, np.array(lowering).real if lowering else np.zeros((0, d, d))


def _frame_offsets(sched: PulseSchedule) -> dict[int, list[tuple[int, int, float]]]:
    """Virtual-Z entries per channel, sorted by (time, seq)."""
    out: dict[int, list[tuple[int, int, float]]] = defaultdict(list)
    for vz in sched.virtual_z:
        out[vz.qubit].append((vz.time, vz.seq, vz.angle))
    for v in out.values():
        v.sort()
    return out


def _frame_at(frames, channel: int, key: tuple) -> float:
    """Accumulated frame angle on ``channel`` from entries strictly before ``key`` = (time, seq)."""
    return sum(a for t, s, a in frames.get(channel, ()) if (t, s) < key)


def _drive_coefficients(cfg: DeviceConfig, register: list[int], scheds: list[PulseSchedule],
                        n_steps: int, div: int) -> np.ndarray:
    """Complex drive amplitude z[k, side, v] (rad/us) at left/mid/right of every step.

    The victim-qubit Hamiltonian is z |1><0| + conj(z) |0><1|. A virtual Z
    on a channel shifts the phase of that channel's later instructions by
    minus its angle. Instructions that differ only in channel are grouped
    and their couplings summed, so a large adversary costs no more than a
    single line.
    """
    n = len(register)
    dt_us = cfg.dt_us
    z = np.zeros((n_steps, 3, n), dtype=complex)
    groups: dict[tuple, list[int]] = defaultdict(list)
    for s in scheds:
        frames = _frame_offsets(s)
        for ins in s.instructions:
            if ins.envelope.amp == 0.0 and ins.envelope.drag_beta == 0.0:
                continue
            # frame entries at the start time precede the pulse
            phase = ins.phase - _frame_at(frames, ins.channel, (ins.start, math.inf))
            key = (ins.f_d, phase, ins.envelope, ins.start)
            groups[key].append(ins.channel)
    offsets = np.array([0.0, 0.5, 1.0]) / div
    for (f_d, phase, env, start), channels in groups.items():
        k0 = start * div
        k1 = min((start + env.duration) * div, n_steps)
        if k1 <= k0:
            continue
        k = np.arange(k0, k1)
        t_dt = k[:, None] / div + offsets[None, :]  # absolute time in dt units
        a = complex_envelope(env, t_dt - start)
        t_us = t_dt * dt_us
        for j, v in enumerate(register):
            c = sum(coupling(cfg, v, ch) for ch in channels)
            if c == 0.0:
                continue
            qp = cfg.qubits[v]
            detune_mhz = (f_d - qp.f_q) * 1e3
            carrier = np.exp(1j * (2.0 * np.pi * detune_mhz * t_us + phase))
            z[k0:k1, :, j] += np.pi * qp.f_rabi_max * c * a * carrier
    return z


def _frame_unitary(frames, qubits: Sequence[int], key: tuple, n: int, pos: dict[int, int]) -> np.ndarray:
    U = np.eye(2**n, dtype=complex)
    for q in qubits:
        theta = _frame_at(frames, q, key)
        if theta:
            U = embed(rz(theta), [pos[q]], n) @ U
    return U


def _events(sched: PulseSchedule, pos: dict[int, int], n: int, div: int):
    """Two-qubit gate unitaries keyed by step index, in (time, seq) order.

    Gates are calibrated in their qubits' software frames, so each one acts
    in the lab frame as F^dagger U F with F the accumulated frame rotation.
    """
    frames = _frame_offsets(sched)
    items = []
    for g in sched.gates:
        inside = [q in pos for q in g.qubits]
        if not any(inside):
            continue
        if not all(inside):
            raise ScheduleError(f"gate {g.name} on {g.qubits} straddles the register boundary")
        U = embed(gate_matrix(g.name, g.params), [pos[q] for q in g.qubits], n)
        F = _frame_unitary(frames, g.qubits, (g.end, g.seq), n, pos)
        items.append((g.end, g.seq, F.conj().T @ U @ F))
    items.sort(key=lambda e: (e[0], e[1]))
    out: dict[int, list[np.ndarray]] = defaultdict(list)
    for t, _, U in items:
        out[t * div].append(U)
    return out


def to_logical_frame(sched: PulseSchedule, register: Sequence[int], rho: np.ndarray) -> np.ndarray:
    """Undo the pending software frame so the state compares with the gate-level circuit."""
    n = len(register)
    pos = {q: j for j, q in enumerate(register)}
    F = _frame_unitary(_frame_offsets(sched), list(register), (math.inf, math.inf), n, pos)
    return F @ rho @ F.conj().T


def evolve_many(cfg: DeviceConfig, register: Sequence[int], schedules: Sequence[PulseSchedule],
                adversary_schedules: Sequence[PulseSchedule] | None = None,
                params: SimParams = SimParams(), initial: DensityMatrix | None = None) -> list[DensityMatrix]:
    """Evolve a batch of independent runs that share one register.

    Each run ends at its own schedule's ``total_duration`` (the victim's
    measurement time); when that is zero the adversary schedule's duration is
    used instead. Drive after the measurement time has no effect. Returned
    states are expressed in the victim's software frame (pending virtual Z
    rotations applied), which leaves basis populations unchanged.
    """
    register = _check_register(cfg, register)
    n = len(register)
    d = 2**n
    pos = {q: j for j, q in enumerate(register)}
    div = params.step_divisor
    B = len(schedules)
    if adversary_schedules is None:
        adversary_schedules = [PulseSchedule()] * B
    if len(adversary_schedules) != B:
        raise ValueError("schedules and adversary_schedules differ in length")

    ends = []
    for s, a in zip(schedules, adversary_schedules):
        ends.append((s.total_duration if s.total_duration > 0 else a.total_duration) * div)
    N = max(ends + [0])
    h = cfg.dt_us / div

    rho = np.empty((B, d, d), dtype=complex)
    rho[:] = (initial.data if initial is not None else DensityMatrix.ground(n).data)

    # Drive coefficients for every run: (B, N, 3, n).
    z = np.stack([_drive_coefficients(cfg, register, [s, a], N, div)
                  for s, a in zip(schedules, adversary_schedules)]) if N else np.zeros((B, 0, 3, n))
    events = [_events(s, pos, n, div) for s in schedules]
    up = _raising_ops(n)

    if params.noise_enabled:
        K, mask, lowering = _noise_terms(cfg, register)
    else:
        K, mask, lowering = np.zeros((d, d)), None, np.zeros((0, d, d))
    lowering_T = lowering.transpose(0, 2, 1)

    def rhs(r, A):
        y = A @ r
        out = y + y.conj().swapaxes(-1, -2)
        if mask is not None:
            out += r * mask
            for L, LT in zip(lowering, lowering_T):
                out += L @ r @ LT
        return out

    results: list[DensityMatrix | None] = [None] * B

    def apply_events(k):
        for b in range(B):
            for U in events[b].get(k, ()):
                rho[b] = U @ rho[b] @ U.conj().T
            if ends[b] == k and results[b] is None:
                results[b] = DensityMatrix(to_logical_frame(schedules[b], register, rho[b]))

    chunk = max(1, min(512, (1 << 21) // max(1, B * 3 * d * d)))
    active = np.abs(z).max(axis=(0, 2, 3)) > 0 if N else np.zeros(0, dtype=bool)
    idle_free = not params.noise_enabled
    A_idle = -0.5 * K
    # Blow-ups are caught by the trace check below.
    with np.errstate(over="ignore", invalid="ignore"):
        for c0 in range(0, N, chunk):
            c1 = min(c0 + chunk, N)
            zc = z[:, c0:c1]  # (B, m, 3, n)
            Hc = np.einsum("bmsv,vij->bmsij", zc, up)
            Hc = Hc + Hc.conj().swapaxes(-1, -2)
            Ac = -1j * Hc - 0.5 * K
            for k in range(c0, c1):
                apply_events(k)
                if not active[k]:
                    if idle_free:
                        continue
                    A_l = A_m = A_r = A_idle
                else:
                    A_l, A_m, A_r = Ac[:, k - c0, 0], Ac[:, k - c0, 1], Ac[:, k - c0, 2]
                k1 = rhs(rho, A_l)
                k2 = rhs(rho + 0.5 * h * k1, A_m)
                k3 = rhs(rho + 0.5 * h * k2, A_m)
                k4 = rhs(rho + h * k3, A_r)
                rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    apply_events(N)

    out = []
    for b, res in enumerate(results):
        if res is None:  # zero-length run
            res = DensityMatrix(rho[b].copy())
        tr = res.trace()
        if not np.all(np.isfinite(res.data)) or abs(tr - 1.0) > 1e-6:
            raise IntegrationError(
                f"integration unstable (trace {tr}); increase step_divisor above {div}"
            )
        out.append(res)
    return out


def evolve(cfg: DeviceConfig, register: Sequence[int], schedule: PulseSchedule,
           adversary_schedule: PulseSchedule | None = None, params: SimParams = SimParams(),
           initial: DensityMatrix | None = None) -> DensityMatrix:
    """Final register state after the victim schedule plus leaked adversary drive."""
    adv = [adversary_schedule] if adversary_schedule is not None else None
    return evolve_many(cfg, register, [schedule], adv, params, initial)[0]


def apply_gate(state: DensityMatrix, gate: GateUnitary) -> DensityMatrix:
    n = state.n
    U = embed(gate.matrix, list(gate.targets), n)
    return DensityMatrix(U @ state.data @ U.conj().T)


def measure(state: DensityMatrix, cfg: DeviceConfig, register: Sequence[int]) -> OutcomeDistribution:
    """Computational-basis distribution after per-qubit readout confusion."""
    n = len(register)
    if state.n != n:
        raise ValueError("register size does not match the state")
    p = np.clip(state.populations(), 0.0, None)
    p = p / p.sum()
    t = p.reshape([2] * n)
    for j, q in enumerate(register):
        qp = cfg.qubits[q]
        C = np.array([[1 - qp.readout_p01, qp.readout_p10], [qp.readout_p01, 1 - qp.readout_p10]])
        t = np.moveaxis(np.tensordot(C, t, axes=([1], [j])), 0, j)
    flat = t.reshape(-1)
    return OutcomeDistribution({b: float(flat[i]) for i, b in enumerate(bitstrings(n))})


def sample_counts(dist: OutcomeDistribution, shots: int, seed: int) -> OutcomeDistribution:
    """Multinomial draw over outcomes in lexicographic order."""
    keys = sorted(dist.probs)
    p = np.array([max(dist.probs[k], 0.0) for k in keys])
    p = p / p.sum()
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(int(shots), p)
    return OutcomeDistribution(dict(dist.probs), {k: int(c) for k, c in zip(keys, counts)}, int(shots))


def run_shots(cfg: DeviceConfig, register: Sequence[int], schedule: PulseSchedule,
              adversary_schedule: PulseSchedule | None, params: SimParams) -> OutcomeDistribution:
    state = evolve(cfg, register, schedule, adversary_schedule, params)
    return sample_counts(measure(state, cfg, register), params.shots, params.seed)
