"""Countermeasures as schedule and allocation transforms."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

from .bench import LoweringRules, pi_pulse
from .device import DeviceConfig, components, distances_from
from .errors import DeviceValidationError, InfeasibleScenarioError, ScheduleError
from .pulse import DriveInstruction, PulseSchedule, gaussian

DEFENSE_KINDS = ("none", "dd", "idle_pad", "active_pad", "disable_qubits")


class PolicyViolation(ScheduleError):
    """A schedule uses a pulse the provider's policy forbids."""


@dataclass(frozen=True)
class DefenseSpec:
    kind: str = "none"
    dd_spacing: int = 100
    pad_distance: int = 8
    pad_gate_count: int = 4
    disabled: tuple[int, ...] = ()
    block_custom_pulses: bool = False
    custom_tolerance_mhz: float = 1.0

    def __post_init__(self):
        if self.kind not in DEFENSE_KINDS:
            raise ScheduleError(f"unknown defense {self.kind!r}; choose from {', '.join(DEFENSE_KINDS)}")
        if self.dd_spacing < 1:
            raise ScheduleError("dd_spacing must be >= 1")
        if self.pad_distance < 1:
            raise ScheduleError("pad_distance must be >= 1")
        if self.pad_gate_count < 0 or self.pad_gate_count % 2:
            raise ScheduleError("pad_gate_count must be a non-negative even integer")
        object.__setattr__(self, "disabled", tuple(sorted(int(q) for q in self.disabled)))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "dd_spacing_dt": self.dd_spacing, "pad_distance": self.pad_distance,
                "pad_gate_count": self.pad_gate_count, "disabled": list(self.disabled),
                "block_custom_pulses": self.block_custom_pulses,
                "custom_tolerance_mhz": self.custom_tolerance_mhz}

    @classmethod
    def from_dict(cls, d: dict) -> "DefenseSpec":
        return cls(kind=d.get("kind", "none"), dd_spacing=int(d.get("dd_spacing_dt", 100)),
                   pad_distance=int(d.get("pad_distance", 8)), pad_gate_count=int(d.get("pad_gate_count", 4)),
                   disabled=tuple(d.get("disabled", ())), block_custom_pulses=bool(d.get("block_custom_pulses", False)),
                   custom_tolerance_mhz=float(d.get("custom_tolerance_mhz", 1.0)))


# -- dynamical decoupling --------------------------------------------------

def idle_gaps(schedule: PulseSchedule, qubit: int) -> list[tuple[int, int]]:
    """Maximal intervals in ``[0, total_duration]`` where ``qubit`` is untouched.

    Drive instructions and two-qubit gate windows occupy time; frame
    rotations split gaps because an X pair does not commute with them.
    """
    busy = [(i.start, i.end) for i in schedule.instructions if i.channel == qubit]
    busy += [(g.start, g.end) for g in schedule.gates if qubit in g.qubits]
    busy += [(z.time, z.time) for z in schedule.virtual_z if z.qubit == qubit]
    busy.sort()
    gaps, t = [], 0
    for a, b in busy:
        if a > t:
            gaps.append((t, a))
        t = max(t, b)
    if schedule.total_duration > t:
        gaps.append((t, schedule.total_duration))
    return gaps


def dd_pulse_starts(gap: tuple[int, int], T: int, spacing: int) -> list[int]:
    """Starts of the X pulses packed into one gap: pairs of (T + spacing) slots, pulses centred."""
    a, b = gap
    unit = 2 * (T + spacing)
    pairs = (b - a) // unit
    if pairs < 1:
        return []
    slot = (b - a) / (2 * pairs)
    return [a + int(math.floor(k * slot + (slot - T) / 2)) for k in range(2 * pairs)]


def apply_dd(schedule: PulseSchedule, cfg: DeviceConfig, register: Sequence[int], spacing: int = 100,
             rules: LoweringRules = LoweringRules()) -> PulseSchedule:
    """Insert XX pairs into every idle gap of length at least ``2 T_pi + 2 spacing``."""
    ins = list(schedule.instructions)
    for q in register:
        amp, T = pi_pulse(cfg, q, rules)
        env = gaussian(amp, T, T * rules.sigma_ratio)
        for gap in idle_gaps(schedule, q):
            ins += [DriveInstruction(q, cfg.qubits[q].f_q, 0.0, env, s) for s in dd_pulse_starts(gap, T, spacing)]
    return PulseSchedule(tuple(ins), schedule.virtual_z, schedule.gates, schedule.total_duration)


# -- allocation ------------------------------------------------------------

def allocate_with_padding(cfg: DeviceConfig, victim_qubits: Sequence[int], adversary_pool: Sequence[int] | None,
                          pad_distance: int) -> list[int]:
    """Members of the pool at least ``pad_distance + 1`` hops from every victim qubit."""
    if pad_distance < 1:
        raise ScheduleError("pad_distance must be >= 1")
    victims = list(victim_qubits)
    for q in victims:
        cfg.check_qubit(q)
    pool = cfg.enabled_qubits() if adversary_pool is None else list(adversary_pool)
    dist = distances_from(cfg, victims)
    out = sorted(q for q in pool if q not in victims and cfg.qubits[q].enabled and dist[q] > pad_distance)
    if not out:
        raise InfeasibleScenarioError(f"no allocatable qubit lies more than {pad_distance} hops from the victim")
    return out


def buffer_qubits(cfg: DeviceConfig, victim_qubits: Sequence[int], pad_distance: int,
                  exclude: Sequence[int] = ()) -> list[int]:
    """Enabled non-victim qubits within ``pad_distance`` hops of the victim."""
    dist = distances_from(cfg, list(victim_qubits))
    skip = set(victim_qubits) | set(exclude)
    return [q for q in cfg.enabled_qubits() if q not in skip and 1 <= dist[q] <= pad_distance]


def active_pad_starts(window: int, count: int, T: int) -> list[int]:
    if count % 2:
        raise ScheduleError("active padding needs an even gate count")
    if count == 0:
        return []
    if count * T > window:
        raise ScheduleError(f"window of {window} dt cannot hold {count} pulses of {T} dt")
    slot = window / count
    return [int(math.floor(k * slot + (slot - T) / 2)) for k in range(count)]


def apply_active_padding(cfg: DeviceConfig, buffer: Sequence[int], window: int, count: int = 4,
                         rules: LoweringRules = LoweringRules()) -> PulseSchedule:
    """Identity-equivalent X trains on the buffer qubits, each pulse centred in an equal slot of the window."""
    ins = []
    for q in buffer:
        amp, T = pi_pulse(cfg, q, rules)
        env = gaussian(amp, T, T * rules.sigma_ratio)
        ins += [DriveInstruction(q, cfg.qubits[q].f_q, 0.0, env, s) for s in active_pad_starts(window, count, T)]
    return PulseSchedule(tuple(ins), (), (), window if ins else 0)


def disable_qubits(cfg: DeviceConfig, qubits) -> DeviceConfig:
    """Copy of ``cfg`` with ``qubits`` marked unallocatable."""
    off = {int(q) for q in qubits}
    for q in off:
        cfg.check_qubit(q, require_enabled=False)
    qs = tuple(replace(q, enabled=False) if q.id in off else q for q in cfg.qubits)
    new = replace(cfg, qubits=qs)
    if not new.enabled_qubits():
        raise DeviceValidationError("cannot disable every qubit")
    parts = components(new)
    if len(parts) > 1:
        sizes = sorted((len(p) for p in parts), reverse=True)
        raise DeviceValidationError(f"disabling {sorted(off)} partitions the device into components of sizes {sizes}")
    return new


def check_custom_pulses(cfg: DeviceConfig, schedule: PulseSchedule, tolerance_mhz: float = 1.0) -> None:
    """Reject any instruction whose carrier is off its own line's qubit frequency."""
    for i in schedule.instructions:
        off = abs(i.f_d - cfg.qubits[i.channel].f_q) * 1e3
        if off > tolerance_mhz:
            raise PolicyViolation(
                f"custom pulse on channel {i.channel}: carrier {i.f_d:.6f} GHz is {off:.1f} MHz off the "
                f"qubit frequency"
            )


@dataclass
class Defended:
    cfg: DeviceConfig
    adversary_qubits: tuple[int, ...]
    victim_schedule: PulseSchedule
    extra_drive: PulseSchedule  # classical drive on neither tenant, present in both runs


def apply_defense(defense: DefenseSpec | None, cfg: DeviceConfig, victim_qubits: Sequence[int],
                  adversary_qubits: Sequence[int], victim_schedule: PulseSchedule,
                  rules: LoweringRules = LoweringRules()) -> Defended:
    """Apply one countermeasure to the allocation and the victim's program."""
    adv = tuple(adversary_qubits)
    if defense is None or defense.kind == "none":
        return Defended(cfg, adv, victim_schedule, PulseSchedule())
    if defense.kind == "dd":
        return Defended(cfg, adv, apply_dd(victim_schedule, cfg, victim_qubits, defense.dd_spacing, rules),
                        PulseSchedule())
    if defense.kind == "disable_qubits":
        new = disable_qubits(cfg, defense.disabled)
        for q in victim_qubits:
            new.check_qubit(q)
        adv = tuple(q for q in adv if new.qubits[q].enabled)
        if not adv:
            raise InfeasibleScenarioError("every adversary qubit was disabled")
        return Defended(new, adv, victim_schedule, PulseSchedule())
    adv = tuple(allocate_with_padding(cfg, victim_qubits, adv, defense.pad_distance))
    if defense.kind == "idle_pad":
        return Defended(cfg, adv, victim_schedule, PulseSchedule())
    buf = buffer_qubits(cfg, victim_qubits, defense.pad_distance, exclude=adv)
    pad = apply_active_padding(cfg, buf, victim_schedule.total_duration, defense.pad_gate_count, rules)
    return Defended(cfg, adv, victim_schedule, pad)
