"""Attack pulse construction and allocation scenarios.

An adversary owns a set of qubits disjoint from the victim's and plays
calibrated pulses on its own drive lines only. Any effect on the victim is
carried by the device's crosstalk couplings.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .calib import CalibrationResult
from .device import DeviceConfig, distances_from
from .errors import CalibrationError, InfeasibleScenarioError, ScheduleError
from .pulse import DriveInstruction, PulseSchedule, concat_repeated, gaussian

ATTACK_METHODS = ("single", "repeated", "mixed")
NATIVE_GATES = ("RX_PI", "RX_HALF_PI", "ISWAP_FRAME")
LABELS = ("S1_BAI", "S1_CAI", "S2_BAI", "S2_CAI", "custom")
DEFAULT_CAI_SIZE = 16


@dataclass(frozen=True)
class NativeGatePulse:
    gate: str
    f_i: float  # GHz
    A_i: float
    T_i: int  # dt

    def __post_init__(self):
        if self.gate not in NATIVE_GATES:
            raise ScheduleError(f"unknown native gate pulse {self.gate!r}")
        if int(self.T_i) != self.T_i or self.T_i < 1:
            raise ScheduleError("native gate pulse duration must be an integer >= 1")


def native_pulse(gate: str, calib: CalibrationResult, amp: float | None = None) -> NativeGatePulse:
    """Calibrated parameters for one native-gate mimic."""
    a = calib.amp if amp is None else amp
    t = calib.t_theta if math.isclose(calib.theta, math.pi) else calib.duration_for(math.pi)
    if gate == "RX_PI":
        return NativeGatePulse(gate, calib.f0, a, t)
    if gate == "RX_HALF_PI":
        return NativeGatePulse(gate, calib.f0, a / 2, t)
    if gate == "ISWAP_FRAME":
        # longer, weaker pulse standing in for the iSWAP drive on this line
        return NativeGatePulse(gate, calib.f0, a / 2, 2 * t)
    raise ScheduleError(f"unknown native gate pulse {gate!r}")


@dataclass(frozen=True)
class AttackSpec:
    method: str = "single"
    target_victim: int = 0
    n_pulses: int = 1
    delay: int = 0  # dt between repeated pulses
    sequence: tuple = ()  # NativeGatePulse or gate tags, for mixed
    amp: float | None = None  # None: calibrated amplitude
    theta: float | None = None  # per-pulse angle; None: the calibrated angle
    phase: float = 0.0

    def __post_init__(self):
        if self.method not in ATTACK_METHODS:
            raise ScheduleError(f"unknown attack method {self.method!r}")
        if self.n_pulses < 1:
            raise ScheduleError("n_pulses must be >= 1")
        if self.delay < 0:
            raise ScheduleError("delay must be >= 0")
        object.__setattr__(self, "sequence", tuple(self.sequence))
        if self.method == "mixed" and not self.sequence:
            raise ScheduleError("mixed attacks need a non-empty pulse sequence")
        if self.amp is not None and not 0.0 <= self.amp <= 1.0:
            raise ScheduleError("attack amplitude must lie in [0, 1]")

    def to_dict(self) -> dict:
        seq = []
        for s in self.sequence:
            if isinstance(s, NativeGatePulse):
                seq.append({"gate": s.gate, "f_ghz": s.f_i, "amp": s.A_i, "duration_dt": s.T_i})
            else:
                seq.append(str(s))
        return {"method": self.method, "target_victim": self.target_victim, "n_pulses": self.n_pulses,
                "delay_dt": self.delay, "amp": self.amp, "theta_rad": self.theta, "phase_rad": self.phase,
                "sequence": seq}

    @classmethod
    def from_dict(cls, d: dict) -> "AttackSpec":
        seq = []
        for s in d.get("sequence", []) or []:
            if isinstance(s, dict):
                seq.append(NativeGatePulse(s["gate"], float(s["f_ghz"]), float(s["amp"]), int(s["duration_dt"])))
            else:
                seq.append(str(s))
        return cls(method=d.get("method", "single"), target_victim=int(d.get("target_victim", 0)),
                   n_pulses=int(d.get("n_pulses", 1)), delay=int(d.get("delay_dt", 0)), sequence=tuple(seq),
                   amp=d.get("amp"), theta=d.get("theta_rad"), phase=float(d.get("phase_rad", 0.0)))


@dataclass(frozen=True)
class ScenarioSpec:
    victim_qubits: tuple[int, ...]
    adversary_qubits: tuple[int, ...]
    attack: AttackSpec = field(default_factory=AttackSpec)
    label: str = "custom"
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "victim_qubits", tuple(int(q) for q in self.victim_qubits))
        object.__setattr__(self, "adversary_qubits", tuple(sorted(int(q) for q in self.adversary_qubits)))
        if self.label not in LABELS:
            raise ScheduleError(f"unknown scenario label {self.label!r}")
        if len(set(self.victim_qubits)) != len(self.victim_qubits):
            raise ScheduleError("victim qubits must be distinct")
        if set(self.victim_qubits) & set(self.adversary_qubits):
            raise ScheduleError("victim and adversary qubit sets overlap")

    def validate(self, cfg: DeviceConfig) -> "ScenarioSpec":
        for q in self.victim_qubits + self.adversary_qubits:
            cfg.check_qubit(q)
        if self.attack.target_victim not in self.victim_qubits:
            raise ScheduleError(f"attack target {self.attack.target_victim} is not a victim qubit")
        return self

    def with_attack(self, **changes) -> "ScenarioSpec":
        return replace(self, attack=replace(self.attack, **changes))

    def to_dict(self) -> dict:
        return {"label": self.label, "victim_qubits": list(self.victim_qubits),
                "adversary_qubits": list(self.adversary_qubits), "attack": self.attack.to_dict(),
                "seed": self.seed}

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioSpec":
        victims = tuple(d["victim_qubits"])
        attack = dict(d.get("attack", {}))
        attack.setdefault("target_victim", victims[0])
        return cls(victims, tuple(d["adversary_qubits"]), AttackSpec.from_dict(attack),
                   d.get("label", "custom"), int(d.get("seed", 0)))


def dumps_scenario(s: ScenarioSpec, extra: dict | None = None) -> str:
    d = s.to_dict()
    if extra:
        d.update(extra)
    return json.dumps(d, indent=2) + "\n"


def loads_scenario(text: str) -> tuple[ScenarioSpec, dict]:
    """Parse a scenario file; returns the spec and the raw object (for embedded keys like ``defense``)."""
    obj = json.loads(text)
    return ScenarioSpec.from_dict(obj), obj


# -- schedules -------------------------------------------------------------

def _resolve_sequence(spec: AttackSpec, calib: CalibrationResult) -> list[NativeGatePulse]:
    scale = 1.0 if spec.amp is None else spec.amp / calib.amp
    out = []
    for s in spec.sequence:
        if isinstance(s, NativeGatePulse):
            out.append(s)
        else:
            p = native_pulse(str(s), calib)
            out.append(replace(p, A_i=min(1.0, p.A_i * scale)))
    return out


def attack_channel_schedule(spec: AttackSpec, calib: CalibrationResult, channel: int) -> PulseSchedule:
    """The attack sequence as played on one adversary drive line."""
    amp = calib.amp if spec.amp is None else spec.amp
    T = calib.t_theta if spec.theta is None else calib.duration_for(spec.theta)
    if spec.method == "single":
        env = gaussian(amp, T)
        return PulseSchedule((DriveInstruction(channel, calib.f0, spec.phase, env, 0),), (), (), T)
    if spec.method == "repeated":
        return concat_repeated(gaussian(amp, T), spec.n_pulses, spec.delay, channel, calib.f0, spec.phase)
    ins, t = [], 0
    for p in _resolve_sequence(spec, calib):
        ins.append(DriveInstruction(channel, p.f_i, spec.phase, gaussian(p.A_i, p.T_i), t))
        t += p.T_i
    return PulseSchedule(tuple(ins), (), (), t)


def build_attack_schedule(cfg: DeviceConfig, spec: AttackSpec, scenario: ScenarioSpec,
                          calib: CalibrationResult) -> PulseSchedule:
    """Identical calibrated pulse train on every adversary channel, aligned at t = 0."""
    if not calib.converged:
        raise CalibrationError("attack requires a converged calibration")
    if not scenario.adversary_qubits:
        raise ScheduleError("scenario has no adversary qubits")
    victims = set(scenario.victim_qubits)
    template = attack_channel_schedule(spec, calib, 0)
    ins = []
    for ch in scenario.adversary_qubits:
        if ch in victims:
            raise ScheduleError(f"refusing to drive victim channel {ch}")
        cfg.check_qubit(ch)
        ins += [replace(i, channel=ch) for i in template.instructions]
    return PulseSchedule(tuple(ins), (), (), template.total_duration)


# -- scenarios -------------------------------------------------------------

@dataclass(frozen=True)
class Thresholds:
    buffer: int = 8
    bulk_fraction: float = 0.4


def min_distance(cfg: DeviceConfig, a: Sequence[int], b: Sequence[int]) -> int:
    """Smallest hop count between any member of ``a`` and any member of ``b``."""
    d = distances_from(cfg, list(a))[list(b)]
    if np.any(d < 0):
        raise InfeasibleScenarioError("victim and adversary qubits lie in different components")
    return int(d.min())


def _bulk_cut(cfg: DeviceConfig, th: Thresholds) -> int:
    return math.ceil(th.bulk_fraction * len(cfg.enabled_qubits()) - 1e-9)


def classify_scenario(cfg: DeviceConfig, victim_qubits, adversary_qubits, thresholds: Thresholds = Thresholds()) -> str:
    v, a = list(victim_qubits), list(adversary_qubits)
    if set(v) & set(a):
        raise ScheduleError("victim and adversary qubit sets overlap")
    if not v or not a:
        raise ScheduleError("victim and adversary sets must be non-empty")
    for q in v + a:
        cfg.check_qubit(q)
    rng = "S1" if min_distance(cfg, v, a) < thresholds.buffer else "S2"
    access = "BAI" if len(a) >= _bulk_cut(cfg, thresholds) else "CAI"
    return f"{rng}_{access}"


def generate_scenario(cfg: DeviceConfig, label: str, victim_qubits: Sequence[int], size: int | None = None,
                      seed: int = 0, attack: AttackSpec | None = None,
                      thresholds: Thresholds = Thresholds()) -> ScenarioSpec:
    """Seeded adversary allocation whose geometry classifies as ``label``.

    ``size`` defaults to every eligible qubit for BAI and 16 for CAI.
    """
    if label not in LABELS[:4]:
        raise InfeasibleScenarioError(f"cannot generate scenario {label!r}")
    victims = [int(q) for q in victim_qubits]
    for q in victims:
        cfg.check_qubit(q)
    rng_tag, access = label.split("_")
    dist = distances_from(cfg, victims)
    pool = [q for q in cfg.enabled_qubits() if q not in victims and dist[q] >= 0]
    near = [q for q in pool if dist[q] < thresholds.buffer]
    far = [q for q in pool if dist[q] >= thresholds.buffer]
    eligible = pool if rng_tag == "S1" else far
    cut = _bulk_cut(cfg, thresholds)
    if size is None:
        size = len(eligible) if access == "BAI" else min(DEFAULT_CAI_SIZE, cut - 1)
    if rng_tag == "S1" and not near:
        raise InfeasibleScenarioError("no qubit lies within the buffer distance of the victim")
    if size < 1 or size > len(eligible):
        raise InfeasibleScenarioError(f"{label} needs {size} adversary qubits but only {len(eligible)} are eligible")
    if access == "BAI" and size < cut:
        raise InfeasibleScenarioError(f"{label} needs at least {cut} adversary qubits, got {size}")
    if access == "CAI" and size >= cut:
        raise InfeasibleScenarioError(f"{label} needs fewer than {cut} adversary qubits, got {size}")
    gen = np.random.default_rng(seed)
    if rng_tag == "S1":
        first = int(gen.choice(near))
        rest = [q for q in pool if q != first]
        chosen = [first] + [int(q) for q in gen.choice(rest, size - 1, replace=False)] if size > 1 else [first]
    else:
        chosen = [int(q) for q in gen.choice(far, size, replace=False)]
    attack = attack or AttackSpec(target_victim=victims[0])
    spec = ScenarioSpec(tuple(victims), tuple(chosen), attack, label, seed)
    got = classify_scenario(cfg, victims, chosen, thresholds)
    if got != label:
        raise InfeasibleScenarioError(f"allocation classifies as {got}, not {label}")
    return spec
