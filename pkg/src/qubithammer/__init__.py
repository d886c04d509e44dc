"""Pulse-level simulator for crosstalk-driven state-corruption attacks on shared quantum processors."""

__version__ = "0.1.0"

from .attack import AttackSpec, NativeGatePulse, ScenarioSpec, build_attack_schedule, classify_scenario, generate_scenario
from .bench import Circuit, LoweringRules, lower, make_benchmark
from .calib import CalibrationResult, fit_lorentzian, fit_rabi, frequency_sweep, rabi_scan
from .defense import DefenseSpec, allocate_with_padding, apply_active_padding, apply_dd, disable_qubits
from .device import DeviceConfig, bundled_device, coupling, graph_distance, load_device
from .engine import DensityMatrix, OutcomeDistribution, SimParams, evolve, measure, sample_counts
from .metrics import AttackReport, classify_impact, run_scenario, tv_distance

__all__ = [
    "AttackSpec", "NativeGatePulse", "ScenarioSpec", "build_attack_schedule", "classify_scenario",
    "generate_scenario", "Circuit", "LoweringRules", "lower", "make_benchmark", "CalibrationResult",
    "fit_lorentzian", "fit_rabi", "frequency_sweep", "rabi_scan", "DefenseSpec", "allocate_with_padding",
    "apply_active_padding", "apply_dd", "disable_qubits", "DeviceConfig", "bundled_device", "coupling",
    "graph_distance", "load_device", "DensityMatrix", "OutcomeDistribution", "SimParams", "evolve",
    "measure", "sample_counts", "AttackReport", "classify_impact", "run_scenario", "tv_distance",
]
