"""Command-line front end.

Exit codes: 0 success, 1 validation error, 2 infeasible scenario, 64 usage.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import __version__
from .attack import NATIVE_GATES, AttackSpec, ScenarioSpec, Thresholds, dumps_scenario, generate_scenario, loads_scenario
from .calib import (DEFAULT_AMP, CalibrationResult, calibrate_qubit, calibration_from_device, fit_lorentzian,
                    fit_rabi, frequency_sweep, lorentzian, rabi_scan)
from .defense import DefenseSpec
from .device import components, load_device, resolve_device_path
from .engine import SimParams
from .errors import InfeasibleScenarioError, QubitHammerError
from .io import atomic_write_text, derive_seed, sha256_file
from .metrics import classify_impact, run_scenario
from .pulse import gaussian

EXIT_OK, EXIT_INVALID, EXIT_INFEASIBLE, EXIT_USAGE = 0, 1, 2, 64
SWEEP_HEADER = ["scenario", "pulses", "adversaries", "tv", "flip_prob", "band", "success", "seed"]

# Pulse-count sweeps default to a small-angle train in quadrature with the
# victim frame so that successive pulses accumulate instead of commuting.
PULSE_SWEEP_AMP_SCALE = 0.25
PULSE_SWEEP_PHASE = math.pi / 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


# -- manifest --------------------------------------------------------------

@dataclass
class RunManifest:
    command: list[str]
    config_sha256: dict[str, str]
    seed: int | None
    tool_version: str = __version__
    timestamp: str | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {"command": self.command, "config_sha256": self.config_sha256, "seed": self.seed,
             "tool_version": self.tool_version, "timestamp": self.timestamp}
        d.update(self.extra)
        return d


def _timestamp(include: bool) -> str | None:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is not None:
        return datetime.fromtimestamp(int(epoch), timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    if include:
        return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    return None


def _manifest(args, argv, seed=None, **files) -> RunManifest:
    hashes = {k: sha256_file(v) for k, v in files.items() if v is not None}
    return RunManifest(["qubithammer", *argv], hashes, seed, timestamp=_timestamp(getattr(args, "timing", False)))


# -- helpers ---------------------------------------------------------------

def _ints(text: str) -> list[int]:
    """``0,1,5`` or ``1:4`` (inclusive) or a mix like ``0,3:5``."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            bits = [int(b) for b in part.split(":")]
            lo, hi = bits[0], bits[1]
            step = bits[2] if len(bits) > 2 else 1
            out += list(range(lo, hi + 1, step))
        else:
            out.append(int(part))
    return out


def _parse_defense(kind: str | None, args_text: str | None, block_custom: bool = False) -> DefenseSpec | None:
    if kind is None and not block_custom:
        return None
    names = {"dd": "dd", "idle-pad": "idle_pad", "active-pad": "active_pad", "disable": "disable_qubits",
             "none": "none"}
    opts = {}
    for item in (args_text or "").split(","):
        if item.strip():
            if "=" not in item:
                raise ValueError(f"defense argument {item!r} is not key=value")
            k, v = item.split("=", 1)
            opts[k.strip()] = v.strip()
    known = {"spacing", "distance", "count", "qubits", "tolerance"}
    unknown = set(opts) - known
    if unknown:
        raise ValueError(f"unknown defense arguments {sorted(unknown)}; known: {sorted(known)}")
    return DefenseSpec(
        kind=names[kind or "none"],
        dd_spacing=int(opts.get("spacing", 100)),
        pad_distance=int(opts.get("distance", 8)),
        pad_gate_count=int(opts.get("count", 4)),
        disabled=tuple(_ints(opts.get("qubits", "").replace(";", ","))),
        block_custom_pulses=block_custom,
        custom_tolerance_mhz=float(opts.get("tolerance", 1.0)),
    )


def _params(args, seed: int) -> SimParams:
    return SimParams(step_divisor=args.step_divisor, noise_enabled=not args.no_noise, seed=seed, shots=args.shots)


def _write_csv(path, header, rows, manifest: RunManifest) -> None:
    buf = io.StringIO()
    buf.write("# manifest: " + json.dumps(manifest.to_dict(), sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    atomic_write_text(path, buf.getvalue())


def read_csv(path) -> tuple[dict | None, list[dict]]:
    """Rows of a CSV written by this tool, plus its embedded manifest."""
    text = Path(path).read_text(encoding="utf-8")
    manifest = None
    lines = []
    for line in text.splitlines():
        if line.startswith("# manifest: "):
            manifest = json.loads(line[len("# manifest: "):])
        elif not line.startswith("#"):
            lines.append(line)
    return manifest, list(csv.DictReader(lines))


def _write_json(path, obj) -> None:
    atomic_write_text(path, json.dumps(obj, indent=2, allow_nan=False) + "\n")


def _f(x: float) -> str:
    return f"{x:.6f}"


def _resolve_calibration(args, cfg, target, seed) -> CalibrationResult:
    if getattr(args, "calibration", None):
        return CalibrationResult.from_dict(json.loads(Path(args.calibration).read_text()))
    if getattr(args, "calibrate", False):
        return calibrate_qubit(cfg, target, shots=args.calib_shots, seed=derive_seed(seed, "calibrate"))
    return calibration_from_device(cfg, target)


# -- subcommands -----------------------------------------------------------

def cmd_device_validate(args, argv) -> int:
    path = resolve_device_path(args.path)
    cfg = load_device(path)
    print(f"{cfg.name}: {cfg.n_qubits} qubits ({len(cfg.enabled_qubits())} enabled), "
          f"{len(cfg.topology.edges)} edges, lattice {cfg.topology.lattice_kind}, "
          f"{len(cfg.crosstalk.entries)} crosstalk entries, {len(components(cfg))} component(s)")
    return EXIT_OK


def cmd_freq_sweep(args, argv) -> int:
    dev = resolve_device_path(args.device)
    cfg = load_device(dev)
    center = args.center if args.center is not None else cfg.qubits[args.qubit].f_q
    probe = gaussian(args.amp, args.duration)
    sweep = frequency_sweep(cfg, args.qubit, center, args.span, args.step, probe, args.shots, args.seed,
                            _params(args, args.seed))
    fit = fit_lorentzian(sweep)
    man = _manifest(args, argv, args.seed, device=dev)
    _write_csv(args.out, ["frequency_ghz", "p1"], [[f"{f:.9f}", _f(p)] for f, p in sweep.points], man)
    lw = None if math.isnan(fit.linewidth) else fit.linewidth
    result = {"manifest": man.to_dict(), "qubit": args.qubit, "f0_ghz": fit.f0, "linewidth_mhz": lw,
              "amplitude": fit.amplitude, "offset": fit.offset, "fit_rmse": fit.rmse, "converged": fit.converged}
    if args.json:
        _write_json(args.json, result)
    if args.plot:
        from .plotting import plot_curve
        fx = np.linspace(sweep.freqs[0], sweep.freqs[-1], 400)
        fy = lorentzian((fx - fit.f0) * 1e3, 0.0, fit.linewidth, fit.amplitude, fit.offset) if fit.converged else None
        plot_curve(sweep.freqs, sweep.probs, args.plot, "drive frequency (GHz)",
                   fit=None if fy is None else (fx, fy), title=f"qubit {args.qubit} spectroscopy")
    print(f"f0 = {fit.f0:.6f} GHz, linewidth = {fit.linewidth:.3f} MHz, converged = {fit.converged}")
    return EXIT_OK if fit.converged else EXIT_INVALID


def cmd_rabi(args, argv) -> int:
    dev = resolve_device_path(args.device)
    cfg = load_device(dev)
    f_drive = args.f_drive
    linewidth = float("nan")
    if f_drive is None and args.sweep_json:
        sweep_fit = json.loads(Path(args.sweep_json).read_text())
        f_drive = sweep_fit["f0_ghz"]
        linewidth = sweep_fit.get("linewidth_mhz") or float("nan")
    if f_drive is None:
        f_drive = cfg.qubits[args.qubit].f_q
    durations = _ints(args.durations)
    scan = rabi_scan(cfg, args.qubit, f_drive, durations, args.amp, args.shots, args.seed, _params(args, args.seed))
    fit = fit_rabi(scan, args.theta)
    calib = CalibrationResult(f0=f_drive, linewidth=linewidth, t_theta=fit.t_theta, theta=args.theta,
                              fit_rmse=fit.fit_rmse, converged=fit.converged, amp=args.amp,
                              rabi_period=fit.rabi_period, rabi_phase=fit.phase, qubit=args.qubit)
    man = _manifest(args, argv, args.seed, device=dev)
    _write_csv(args.out, ["duration_dt", "p1"], [[d, _f(p)] for d, p in scan], man)
    if args.json:
        _write_json(args.json, {"manifest": man.to_dict(), **calib.to_dict()})
    if args.plot:
        from .plotting import plot_curve
        t = np.array([d for d, _ in scan], dtype=float)
        tf = np.linspace(t[0], t[-1], 400)
        yf = fit.offset - 0.5 * fit.amplitude * np.cos(2 * np.pi * tf / fit.rabi_period + fit.phase) * np.exp(-tf / fit.tau)
        plot_curve(t, [p for _, p in scan], args.plot, "pulse duration (dt)", fit=(tf, yf),
                   title=f"qubit {args.qubit} Rabi scan")
    print(f"t_theta = {fit.t_theta} dt for theta = {args.theta:.4f} rad, converged = {fit.converged}")
    return EXIT_OK if fit.converged else EXIT_INVALID


def _attack_from_args(args, victims) -> AttackSpec:
    seq = tuple(s.strip() for s in (args.sequence or "").split(",") if s.strip())
    for s in seq:
        if s not in NATIVE_GATES:
            raise ValueError(f"unknown native gate pulse {s!r}; choose from {', '.join(NATIVE_GATES)}")
    target = args.target if args.target is not None else victims[0]
    return AttackSpec(method=args.method, target_victim=target, n_pulses=args.n_pulses, delay=args.delay,
                      sequence=seq, amp=args.amp, phase=args.phase)


def cmd_scenario_gen(args, argv) -> int:
    dev = resolve_device_path(args.device)
    cfg = load_device(dev)
    victims = _ints(args.victims or "0,1")
    th = Thresholds(args.buffer, args.bulk_fraction)
    spec = generate_scenario(cfg, args.label, victims, args.size, args.seed, _attack_from_args(args, victims), th)
    extra = {}
    defense = _parse_defense(args.defense, args.defense_args)
    if defense is not None:
        extra["defense"] = defense.to_dict()
    extra["manifest"] = _manifest(args, argv, args.seed, device=dev).to_dict()
    atomic_write_text(args.out, dumps_scenario(spec, extra))
    print(f"{spec.label}: victims {list(spec.victim_qubits)}, {len(spec.adversary_qubits)} adversary qubits")
    return EXIT_OK


def cmd_attack_run(args, argv) -> int:
    dev = resolve_device_path(args.device)
    cfg = load_device(dev)
    spec, raw = loads_scenario(Path(args.scenario).read_text(encoding="utf-8"))
    defense = _parse_defense(args.defense, args.defense_args, args.block_custom_pulses)
    if defense is None and "defense" in raw:
        defense = DefenseSpec.from_dict(raw["defense"])
    if args.amp is not None or args.phase is not None:
        spec = spec.with_attack(**{k: v for k, v in (("amp", args.amp), ("phase", args.phase)) if v is not None})
    seed = args.seed
    calib = _resolve_calibration(args, cfg, spec.attack.target_victim, seed)
    report = run_scenario(cfg, spec, args.bench, defense, _params(args, derive_seed(seed, "shots")), calib)
    report.manifest = _manifest(args, argv, seed, device=dev, scenario=args.scenario).to_dict()
    atomic_write_text(args.out, report.to_json(include_timing=args.timing))
    if args.plot:
        from .plotting import plot_distributions
        plot_distributions(report.to_dict(), args.plot)
    flips = ", ".join(f"q{q}={p:.3f}" for q, p in zip(report.scenario.victim_qubits, report.flip_prob))
    print(f"tv_distance = {report.tv_distance:.4f} ({report.impact_band}), success = {report.success}, flip: {flips}")
    return EXIT_OK


@lru_cache(maxsize=4)
def _cached_device(path: str):
    return load_device(path)


def _sweep_point(job: dict) -> list:
    cfg = _cached_device(job["device"])
    spec = ScenarioSpec.from_dict(job["scenario"])
    calib = CalibrationResult.from_dict(job["calibration"])
    defense = DefenseSpec.from_dict(job["defense"]) if job["defense"] else None
    params = SimParams(**job["params"])
    r = run_scenario(cfg, spec, job["bench"], defense, params, calib)
    target = spec.victim_qubits.index(spec.attack.target_victim)
    return [spec.label, spec.attack.n_pulses, len(spec.adversary_qubits), _f(r.tv_distance), _f(r.flip_prob[target]),
            classify_impact(r.tv_distance), str(r.success).lower(), params.seed]


def _bench_width(bench: str) -> int:
    return {"idle": 1, "qaoa": 4}.get(bench, 2)


def cmd_attack_sweep(args, argv) -> int:
    dev = resolve_device_path(args.device)
    cfg = load_device(dev)
    victims = _ints(args.victims) if args.victims else list(range(_bench_width(args.bench)))
    target = args.target if args.target is not None else victims[0]
    th = Thresholds(args.buffer, args.bulk_fraction)
    if args.pulses:
        pulses, sizes = _ints(args.pulses), [args.size]
        method = "repeated"
        amp_scale = PULSE_SWEEP_AMP_SCALE if args.amp_scale is None else args.amp_scale
        phase = PULSE_SWEEP_PHASE if args.phase is None else args.phase
    else:
        pulses, sizes = [args.n_pulses], _ints(args.adversaries)
        method = args.method
        amp_scale = 1.0 if args.amp_scale is None else args.amp_scale
        phase = 0.0 if args.phase is None else args.phase
    calib = _resolve_calibration(args, cfg, target, args.seed)
    defense = _parse_defense(args.defense, args.defense_args)
    jobs = []
    for size in sizes:
        for i in range(args.seeds):
            alloc_seed = derive_seed(args.seed, f"scenario/{size}", i)
            base = generate_scenario(cfg, args.label, victims, size, alloc_seed, AttackSpec(target_victim=target), th)
            for n in pulses:
                attack = AttackSpec(method=method, target_victim=target, n_pulses=n, delay=args.delay,
                                    amp=min(1.0, calib.amp * amp_scale), phase=phase)
                sc = ScenarioSpec(base.victim_qubits, base.adversary_qubits, attack, base.label, alloc_seed)
                jobs.append({
                    "device": str(dev), "scenario": sc.to_dict(), "calibration": calib.to_dict(),
                    "defense": None if defense is None else defense.to_dict(), "bench": args.bench,
                    "params": {"step_divisor": args.step_divisor, "noise_enabled": not args.no_noise,
                               "seed": derive_seed(args.seed, "shots", i), "shots": args.shots},
                    "key": (n, size, i),
                })
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            rows = list(ex.map(_sweep_point, jobs))
    else:
        rows = [_sweep_point(j) for j in jobs]
    order = sorted(range(len(jobs)), key=lambda k: jobs[k]["key"])
    rows = [rows[k] for k in order]
    man = _manifest(args, argv, args.seed, device=dev)
    man.extra = {"calibration": calib.to_dict(), "amp_scale": amp_scale, "phase_rad": phase}
    _write_csv(args.out, SWEEP_HEADER, rows, man)
    xcol = 1 if args.pulses else 2
    xs = sorted({r[xcol] for r in rows})
    means = [float(np.mean([float(r[3]) for r in rows if r[xcol] == x])) for x in xs]
    if args.plot:
        from .plotting import plot_trend
        plot_trend([r[xcol] for r in rows], [float(r[3]) for r in rows], args.plot,
                   "attack pulses" if args.pulses else "adversary qubits", title=f"{args.label} {args.bench}")
    for x, m in zip(xs, means):
        print(f"{'pulses' if args.pulses else 'adversaries'}={x}: mean tv = {m:.4f}")
    return EXIT_OK


def cmd_plot(args, argv) -> int:
    from .plotting import plot_distributions, plot_trend
    src = Path(args.input)
    if src.suffix == ".json":
        plot_distributions(json.loads(src.read_text()), args.out)
    else:
        _, rows = read_csv(src)
        if not rows or "tv" not in rows[0]:
            raise ValueError(f"{src} is not a sweep CSV")
        axis = args.x or ("pulses" if len({r["pulses"] for r in rows}) > 1 else "adversaries")
        plot_trend([int(r[axis]) for r in rows], [float(r["tv"]) for r in rows], args.out,
                   "attack pulses" if axis == "pulses" else "adversary qubits", title=rows[0]["scenario"])
    print(f"wrote {args.out}")
    return EXIT_OK


# -- parser ----------------------------------------------------------------

def _sim_flags(p, shots: int) -> None:
    p.add_argument("--shots", type=int, default=shots)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--step-divisor", type=int, default=4)
    p.add_argument("--no-noise", action="store_true", help="switch off relaxation and dephasing")


def _attack_flags(p) -> None:
    p.add_argument("--method", choices=("single", "repeated", "mixed"), default="single")
    p.add_argument("--n-pulses", type=int, default=1)
    p.add_argument("--delay", type=int, default=0, help="dt between repeated pulses")
    p.add_argument("--sequence", help="mixed pulse tags, e.g. RX_PI,RX_HALF_PI,ISWAP_FRAME")
    p.add_argument("--target", type=int, help="victim qubit the pulses are tuned to (default: first victim)")


def _defense_flags(p) -> None:
    p.add_argument("--defense", choices=("dd", "idle-pad", "active-pad", "disable", "none"))
    p.add_argument("--defense-args", help="key=value list: spacing, distance, count, qubits (a;b;c), tolerance")


def _scenario_flags(p) -> None:
    p.add_argument("--victims", help="victim register (default: qubits 0.. sized to the benchmark; 0,1 for gen)")
    p.add_argument("--buffer", type=int, default=8)
    p.add_argument("--bulk-fraction", type=float, default=0.4)


def build_parser() -> argparse.ArgumentParser:
    root = _Parser(prog="qubithammer", description=__doc__.splitlines()[0])
    root.add_argument("--version", action="version", version=f"qubithammer {__version__}")
    sub = root.add_subparsers(dest="group", required=True, parser_class=_Parser)

    dev = sub.add_parser("device", help="device configuration files")
    dsub = dev.add_subparsers(dest="action", required=True, parser_class=_Parser)
    v = dsub.add_parser("validate", help="load and check a device file")
    v.add_argument("path")
    v.set_defaults(func=cmd_device_validate)

    cal = sub.add_parser("calibrate", help="adversary calibration experiments")
    csub = cal.add_subparsers(dest="action", required=True, parser_class=_Parser)
    fs = csub.add_parser("freq-sweep", help="spectroscopy plus Lorentzian fit")
    fs.add_argument("--device", default="eagle127.json")
    fs.add_argument("--qubit", type=int, required=True)
    fs.add_argument("--center", type=float, help="GHz (default: configured f_q)")
    fs.add_argument("--span", type=float, default=40.0, help="MHz")
    fs.add_argument("--step", type=float, default=0.2, help="MHz")
    fs.add_argument("--amp", type=float, default=DEFAULT_AMP)
    fs.add_argument("--duration", type=int, default=160, help="probe duration (dt)")
    fs.add_argument("--out", required=True, help="CSV frequency_ghz,p1")
    fs.add_argument("--json", help="fit result JSON")
    fs.add_argument("--plot", help="SVG figure")
    fs.add_argument("--timing", action="store_true")
    _sim_flags(fs, 1024)
    fs.set_defaults(func=cmd_freq_sweep)

    rb = csub.add_parser("rabi", help="duration scan plus sinusoid fit")
    rb.add_argument("--device", default="eagle127.json")
    rb.add_argument("--qubit", type=int, required=True)
    rb.add_argument("--f-drive", type=float, help="GHz (default: --sweep-json f0, else configured f_q)")
    rb.add_argument("--sweep-json", help="take the drive frequency from a freq-sweep JSON")
    rb.add_argument("--durations", default="8:800:8", help="lo:hi:step or a list (dt)")
    rb.add_argument("--amp", type=float, default=DEFAULT_AMP)
    rb.add_argument("--theta", type=float, default=math.pi)
    rb.add_argument("--out", required=True, help="CSV duration_dt,p1")
    rb.add_argument("--json", help="CalibrationResult JSON")
    rb.add_argument("--plot", help="SVG figure")
    rb.add_argument("--timing", action="store_true")
    _sim_flags(rb, 1024)
    rb.set_defaults(func=cmd_rabi)

    sc = sub.add_parser("scenario", help="allocation scenarios")
    ssub = sc.add_subparsers(dest="action", required=True, parser_class=_Parser)
    g = ssub.add_parser("gen", help="sample an allocation matching a label")
    g.add_argument("--device", default="eagle127.json")
    g.add_argument("--label", required=True, choices=("S1_BAI", "S1_CAI", "S2_BAI", "S2_CAI"))
    g.add_argument("--size", type=int, help="adversary qubit count")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--amp", type=float)
    g.add_argument("--phase", type=float, default=0.0)
    g.add_argument("--out", required=True)
    g.add_argument("--timing", action="store_true")
    _scenario_flags(g)
    _attack_flags(g)
    _defense_flags(g)
    g.set_defaults(func=cmd_scenario_gen)

    at = sub.add_parser("attack", help="run attacks")
    asub = at.add_subparsers(dest="action", required=True, parser_class=_Parser)
    r = asub.add_parser("run", help="one scenario against one benchmark")
    r.add_argument("--device", default="eagle127.json")
    r.add_argument("--scenario", required=True)
    r.add_argument("--bench", default="grover2", choices=("idle", "grover2", "bell", "qaoa"))
    r.add_argument("--amp", type=float, help="override the attack amplitude")
    r.add_argument("--phase", type=float, help="override the attack carrier phase (rad)")
    r.add_argument("--calibrate", action="store_true", help="run the calibration experiments first")
    r.add_argument("--calibration", help="CalibrationResult JSON to use")
    r.add_argument("--calib-shots", type=int, default=1024)
    r.add_argument("--block-custom-pulses", action="store_true", help="reject carriers off the line's f_q")
    r.add_argument("--out", required=True)
    r.add_argument("--plot", help="SVG bar chart of the distributions")
    r.add_argument("--timing", action="store_true", help="include runtime and wall-clock timestamp")
    _sim_flags(r, 4096)
    _defense_flags(r)
    r.set_defaults(func=cmd_attack_run)

    sw = asub.add_parser("sweep", help="trend over pulse count or adversary count")
    sw.add_argument("--device", default="eagle127.json")
    sw.add_argument("--label", required=True, choices=("S1_BAI", "S1_CAI", "S2_BAI", "S2_CAI"))
    axis = sw.add_mutually_exclusive_group(required=True)
    axis.add_argument("--pulses", help="repeated-pulse counts, e.g. 1:4")
    axis.add_argument("--adversaries", help="adversary counts, e.g. 8,16,32,60")
    sw.add_argument("--size", type=int, help="adversary count for pulse sweeps (default: label default)")
    sw.add_argument("--bench", default="grover2", choices=("idle", "grover2", "bell", "qaoa"))
    sw.add_argument("--seeds", type=int, default=5, help="repetitions per point")
    sw.add_argument("--jobs", type=int, default=1)
    sw.add_argument("--amp-scale", type=float, help="attack amplitude relative to the calibrated one")
    sw.add_argument("--phase", type=float, help="attack carrier phase (rad)")
    sw.add_argument("--calibrate", action="store_true")
    sw.add_argument("--calibration")
    sw.add_argument("--calib-shots", type=int, default=1024)
    sw.add_argument("--out", required=True)
    sw.add_argument("--plot", help="SVG trend figure")
    sw.add_argument("--timing", action="store_true")
    _sim_flags(sw, 4096)
    _scenario_flags(sw)
    _attack_flags(sw)
    _defense_flags(sw)
    sw.set_defaults(func=cmd_attack_sweep)

    pl = sub.add_parser("plot", help="render a report JSON or sweep CSV to SVG")
    pl.add_argument("input")
    pl.add_argument("--out", required=True)
    pl.add_argument("--x", choices=("pulses", "adversaries"))
    pl.set_defaults(func=cmd_plot)
    return root


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    try:
        return args.func(args, argv)
    except InfeasibleScenarioError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (QubitHammerError, ValueError, FileNotFoundError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
