"""Attack-impact metrics and the end-to-end scenario runner."""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from typing import Mapping

from .attack import ScenarioSpec, build_attack_schedule
from .bench import Circuit, LoweringRules, ideal_distribution, lower, make_benchmark
from .calib import CalibrationResult, calibration_from_device
from .defense import DefenseSpec, apply_defense, check_custom_pulses
from .device import DeviceConfig
from .engine import OutcomeDistribution, SimParams, evolve_many, measure, sample_counts
from .pulse import merge

BANDS = ("minimal", "mild", "significant", "very_high")
SUCCESS_THRESHOLD = 0.2


def _probs(d) -> Mapping[str, float]:
    if isinstance(d, OutcomeDistribution):
        return d.empirical()
    return d


def tv_distance(p, q) -> float:
    """Half the L1 distance over the union of outcomes; sampled counts are used when present."""
    p, q = _probs(p), _probs(q)
    for name, d in (("p", p), ("q", q)):
        s = math.fsum(d.values())
        if abs(s - 1.0) > 1e-6:
            raise ValueError(f"distribution {name} is not normalized (sum {s})")
    keys = set(p) | set(q)
    return 0.5 * math.fsum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)


def classify_impact(d: float) -> str:
    if not 0.0 <= d <= 1.0 + 1e-12:
        raise ValueError(f"distance {d} outside [0, 1]")
    if d < 0.2:
        return "minimal"
    if d < 0.4:
        return "mild"
    if d < 0.6:
        return "significant"
    return "very_high"


def flip_probabilities(dist, ideal_bits: str) -> tuple[float, ...]:
    """Per-position probability that the measured bit differs from ``ideal_bits``."""
    p = _probs(dist)
    out = []
    for j, b in enumerate(ideal_bits):
        out.append(math.fsum(v for k, v in p.items() if k[j] != b))
    return tuple(out)


def _dist_dict(d: OutcomeDistribution) -> dict:
    return {"probs": {k: d.probs[k] for k in sorted(d.probs)},
            "counts": None if d.counts is None else {k: d.counts[k] for k in sorted(d.counts)},
            "shots": d.shots}


@dataclass
class AttackReport:
    scenario: ScenarioSpec
    benchmark: str
    baseline: OutcomeDistribution
    attacked: OutcomeDistribution
    ideal: dict
    tv_distance: float
    flip_prob: tuple[float, ...]
    impact_band: str
    success: bool
    seed: int
    runtime_ms: float = 0.0
    defense: DefenseSpec | None = None
    calibration: CalibrationResult | None = None
    manifest: dict = field(default_factory=dict)

    def to_dict(self, include_timing: bool = False) -> dict:
        d = {
            "manifest": self.manifest,
            "scenario": self.scenario.to_dict(),
            "benchmark": self.benchmark,
            "defense": (self.defense or DefenseSpec()).to_dict(),
            "calibration": None if self.calibration is None else self.calibration.to_dict(),
            "ideal": {k: self.ideal[k] for k in sorted(self.ideal)},
            "baseline": _dist_dict(self.baseline),
            "attacked": _dist_dict(self.attacked),
            "tv_distance": self.tv_distance,
            "flip_prob": {str(q): p for q, p in zip(self.scenario.victim_qubits, self.flip_prob)},
            "impact_band": self.impact_band,
            "success": self.success,
            "seed": self.seed,
        }
        if include_timing:
            d["runtime_ms"] = self.runtime_ms
        return d

    def to_json(self, include_timing: bool = False) -> str:
        return json.dumps(self.to_dict(include_timing), indent=2, sort_keys=False) + "\n"


def resolve_benchmark(benchmark, n_victims: int, idle_duration: int, **params) -> Circuit:
    if isinstance(benchmark, Circuit):
        return benchmark
    if benchmark == "idle":
        params.setdefault("n", n_victims)
        params.setdefault("duration", idle_duration)
    return make_benchmark(benchmark, **params)


def run_scenario(cfg: DeviceConfig, scenario: ScenarioSpec, benchmark="grover2", defense: DefenseSpec | None = None,
                 params: SimParams = SimParams(), calib: CalibrationResult | None = None,
                 rules: LoweringRules = LoweringRules(), success_threshold: float = SUCCESS_THRESHOLD,
                 bench_params: dict | None = None) -> AttackReport:
    """Baseline and attacked runs of one benchmark under one allocation.

    Without ``calib`` the attack uses the device's own published frequency
    and area-condition duration for the target qubit. An idle benchmark
    lasts as long as the attack unless a duration is given.
    """
    t0 = time.perf_counter()
    scenario.validate(cfg)
    victims = list(scenario.victim_qubits)
    if calib is None:
        calib = calibration_from_device(cfg, scenario.attack.target_victim)
    probe = build_attack_schedule(cfg, scenario.attack, scenario, calib)
    circuit = resolve_benchmark(benchmark, len(victims), probe.total_duration, **(bench_params or {}))
    victim_sched = lower(circuit, cfg, victims, rules)

    guard = apply_defense(defense, cfg, victims, scenario.adversary_qubits, victim_sched, rules)
    run_cfg = guard.cfg
    attacked_scenario = ScenarioSpec(scenario.victim_qubits, guard.adversary_qubits, scenario.attack,
                                     scenario.label, scenario.seed)
    attack_sched = build_attack_schedule(run_cfg, scenario.attack, attacked_scenario, calib)
    if defense is not None and defense.block_custom_pulses:
        check_custom_pulses(run_cfg, attack_sched, defense.custom_tolerance_mhz)

    extra = guard.extra_drive
    states = evolve_many(run_cfg, victims, [guard.victim_schedule] * 2,
                         [extra, merge(extra, attack_sched)], params)
    base = sample_counts(measure(states[0], run_cfg, victims), params.shots, params.seed)
    hit = sample_counts(measure(states[1], run_cfg, victims), params.shots, params.seed)

    ideal = ideal_distribution(circuit)
    ideal_bits = max(sorted(ideal), key=lambda k: ideal[k])
    tv = tv_distance(base, hit)
    return AttackReport(
        scenario=attacked_scenario, benchmark=circuit.name, baseline=base, attacked=hit, ideal=ideal,
        tv_distance=tv, flip_prob=flip_probabilities(hit, ideal_bits), impact_band=classify_impact(tv),
        success=tv > success_threshold, seed=params.seed, runtime_ms=(time.perf_counter() - t0) * 1e3,
        defense=defense, calibration=calib,
    )
