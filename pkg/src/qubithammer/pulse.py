"""Pulse envelopes, drive instructions and schedule assembly.

All times are integer multiples of the backend cycle time ``dt`` unless
stated otherwise. Frequencies are carried in GHz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .errors import ScheduleError

ENVELOPE_KINDS = ("gaussian", "constant")


@dataclass(frozen=True)
class Envelope:
    kind: str = "gaussian"
    amp: float = 0.0
    duration: int = 160
    sigma: float | None = None  # defaults to duration / 4 for gaussians
    drag_beta: float = 0.0

    def __post_init__(self):
        if self.kind not in ENVELOPE_KINDS:
            raise ScheduleError(f"unknown envelope kind {self.kind!r}")
        if not 0.0 <= self.amp <= 1.0:
            raise ScheduleError(f"envelope amplitude must lie in [0, 1], got {self.amp}")
        if int(self.duration) != self.duration or self.duration < 1:
            raise ScheduleError(f"envelope duration must be an integer >= 1, got {self.duration}")
        object.__setattr__(self, "duration", int(self.duration))
        if self.kind == "gaussian":
            if self.sigma is None:
                object.__setattr__(self, "sigma", self.duration / 4.0)
            if not self.sigma > 0:
                raise ScheduleError("gaussian sigma must be > 0")

    def with_amp(self, amp: float) -> "Envelope":
        return replace(self, amp=amp)


def gaussian(amp: float, duration: int, sigma: float | None = None, drag_beta: float = 0.0) -> Envelope:
    return Envelope("gaussian", amp, duration, sigma, drag_beta)


def constant(amp: float, duration: int) -> Envelope:
    return Envelope("constant", amp, duration)


def envelope_value(e: Envelope, t):
    """Envelope amplitude at time ``t`` (dt units); zero outside ``[0, T]``.

    Gaussians are truncated, not edge-lifted. Accepts scalars or arrays.
    """
    t = np.asarray(t, dtype=float)
    inside = (t >= 0.0) & (t <= e.duration)
    val = _raw_value(e, t)
    out = np.where(inside, val, 0.0)
    return float(out) if out.ndim == 0 else out


def _raw_value(e: Envelope, t: np.ndarray) -> np.ndarray:
    # Smooth continuation of the envelope with no support gating.
    if e.kind == "constant":
        return np.full_like(t, e.amp, dtype=float)
    return e.amp * np.exp(-((t - e.duration / 2.0) ** 2) / (2.0 * e.sigma**2))


def _raw_derivative(e: Envelope, t: np.ndarray) -> np.ndarray:
    if e.kind == "constant":
        return np.zeros_like(t, dtype=float)
    c = e.duration / 2.0
    return -(t - c) / e.sigma**2 * _raw_value(e, t)


def complex_envelope(e: Envelope, t: np.ndarray) -> np.ndarray:
    """In-phase envelope plus the DRAG quadrature term, ungated (caller handles support)."""
    val = _raw_value(e, t).astype(complex)
    if e.drag_beta:
        val = val + 1j * e.drag_beta * _raw_derivative(e, t)
    return val


def pulse_area(e: Envelope) -> float:
    """Integral of the in-phase envelope over its support, in dt units."""
    if e.kind == "constant":
        return e.amp * e.duration
    return e.amp * e.sigma * math.sqrt(2.0 * math.pi) * math.erf(e.duration / (2.0 * math.sqrt(2.0) * e.sigma))


def unit_area_per_dt(kind: str = "gaussian", sigma_ratio: float = 0.25) -> float:
    """Area per unit amplitude per dt of duration for envelopes whose sigma scales with T."""
    if kind == "constant":
        return 1.0
    return sigma_ratio * math.sqrt(2.0 * math.pi) * math.erf(1.0 / (2.0 * math.sqrt(2.0) * sigma_ratio))


@dataclass(frozen=True)
class DriveInstruction:
    channel: int
    f_d: float  # GHz
    phase: float
    envelope: Envelope
    start: int = 0

    def __post_init__(self):
        if int(self.start) != self.start or self.start < 0:
            raise ScheduleError(f"instruction start must be a non-negative integer, got {self.start}")
        object.__setattr__(self, "start", int(self.start))
        if not self.f_d > 0:
            raise ScheduleError("carrier frequency must be > 0")

    @property
    def end(self) -> int:
        return self.start + self.envelope.duration

    def shifted(self, offset: int) -> "DriveInstruction":
        return replace(self, start=self.start + offset)


@dataclass(frozen=True)
class VirtualZ:
    qubit: int
    time: int
    angle: float
    seq: int = 0


@dataclass(frozen=True)
class GateMarker:
    """Instantaneous calibrated gate applied at ``end``; ``start`` opens its wall-time window."""

    name: str
    qubits: tuple[int, ...]
    start: int
    end: int
    params: tuple[float, ...] = ()
    seq: int = 0


@dataclass(frozen=True)
class PulseSchedule:
    instructions: tuple[DriveInstruction, ...] = ()
    virtual_z: tuple[VirtualZ, ...] = ()
    gates: tuple[GateMarker, ...] = ()
    total_duration: int = 0

    def __post_init__(self):
        object.__setattr__(self, "instructions", tuple(self.instructions))
        object.__setattr__(self, "virtual_z", tuple(self.virtual_z))
        object.__setattr__(self, "gates", tuple(self.gates))
        latest = max(
            [i.end for i in self.instructions]
            + [z.time for z in self.virtual_z]
            + [g.end for g in self.gates]
            + [0]
        )
        if self.total_duration < latest:
            raise ScheduleError(
                f"total_duration {self.total_duration} is shorter than the last event at {latest}"
            )
        check_overlaps(self.instructions)

    @property
    def channels(self) -> list[int]:
        return sorted({i.channel for i in self.instructions})

    def on_channel(self, channel: int) -> list[DriveInstruction]:
        return [i for i in self.instructions if i.channel == channel]

    def is_empty(self) -> bool:
        return not (self.instructions or self.virtual_z or self.gates)


def check_overlaps(instructions: Iterable[DriveInstruction]) -> None:
    by_channel: dict[int, list[DriveInstruction]] = {}
    for ins in instructions:
        by_channel.setdefault(ins.channel, []).append(ins)
    for ch, items in by_channel.items():
        items = sorted(items, key=lambda i: i.start)
        for a, b in zip(items, items[1:]):
            if b.start < a.end:
                raise ScheduleError(
                    f"instructions on channel {ch} overlap: [{a.start}, {a.end}) and [{b.start}, {b.end})"
                )


def schedule(instructions: Sequence[DriveInstruction] = (), virtual_z=(), gates=(),
             total_duration: int | None = None) -> PulseSchedule:
    """Assemble a schedule, defaulting the total duration to the last event."""
    if total_duration is None:
        total_duration = max(
            [i.end for i in instructions] + [z.time for z in virtual_z] + [g.end for g in gates] + [0]
        )
    return PulseSchedule(tuple(instructions), tuple(virtual_z), tuple(gates), int(total_duration))


def merge(*schedules: PulseSchedule) -> PulseSchedule:
    """Union of several schedules; rejects same-channel overlaps."""
    ins, vz, gates = [], [], []
    for s in schedules:
        ins += s.instructions
        vz += s.virtual_z
        gates += s.gates
    total = max([s.total_duration for s in schedules] + [0])
    return PulseSchedule(tuple(ins), tuple(vz), tuple(gates), total)


def concat_repeated(e: Envelope, n: int, delay: int, channel: int, f_d: float, phase: float = 0.0) -> PulseSchedule:
    """``n`` copies of one pulse separated by ``delay`` dt, starting at t = 0."""
    if n < 1:
        raise ScheduleError("repeat count must be >= 1")
    if delay < 0:
        raise ScheduleError("delay must be >= 0")
    T = e.duration
    ins = [DriveInstruction(channel, f_d, phase, e, k * (T + delay)) for k in range(n)]
    return PulseSchedule(tuple(ins), (), (), n * T + (n - 1) * delay)


# -- JSON ------------------------------------------------------------------

def instruction_to_dict(i: DriveInstruction) -> dict:
    d = {
        "channel": i.channel,
        "f_d_ghz": i.f_d,
        "phase_rad": i.phase,
        "kind": i.envelope.kind,
        "amp": i.envelope.amp,
        "duration_dt": i.envelope.duration,
        "sigma_dt": i.envelope.sigma,
        "start_dt": i.start,
    }
    if i.envelope.drag_beta:
        d["drag_beta"] = i.envelope.drag_beta
    return d


def schedule_to_dict(s: PulseSchedule) -> dict:
    return {
        "instructions": [instruction_to_dict(i) for i in s.instructions],
        "virtual_z": [{"qubit": z.qubit, "time_dt": z.time, "angle_rad": z.angle, "seq": z.seq}
                      for z in s.virtual_z],
        "gates": [
            {"name": g.name, "qubits": list(g.qubits), "start_dt": g.start, "end_dt": g.end,
             "params": list(g.params), "seq": g.seq}
            for g in s.gates
        ],
        "total_duration_dt": s.total_duration,
    }


def schedule_from_dict(obj: dict) -> PulseSchedule:
    ins = []
    for d in obj.get("instructions", []):
        env = Envelope(d["kind"], float(d["amp"]), int(d["duration_dt"]),
                       d.get("sigma_dt"), float(d.get("drag_beta", 0.0)))
        ins.append(DriveInstruction(int(d["channel"]), float(d["f_d_ghz"]), float(d["phase_rad"]), env,
                                    int(d["start_dt"])))
    vz = [VirtualZ(int(z["qubit"]), int(z["time_dt"]), float(z["angle_rad"]), int(z.get("seq", k)))
          for k, z in enumerate(obj.get("virtual_z", []))]
    gates = [GateMarker(g["name"], tuple(g["qubits"]), int(g["start_dt"]), int(g["end_dt"]),
                        tuple(g.get("params", ())), int(g.get("seq", len(vz) + k)))
             for k, g in enumerate(obj.get("gates", []))]
    return schedule(ins, vz, gates, obj.get("total_duration_dt"))
