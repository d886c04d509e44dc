"""Adversary-side calibration: drive-frequency spectroscopy, then a Rabi duration scan.

Both experiments are simulated from the adversary's point of view -- noisy
evolution followed by finite-shot sampling -- and reduced to a transition
frequency ``f0`` and a pulse duration ``t_theta`` by nonlinear least squares.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple, Sequence

import numpy as np

from .device import DeviceConfig
from .engine import SimParams, evolve_many, measure, sample_counts
from .errors import CalibrationError
from .fitting import gauss_newton
from .pulse import DriveInstruction, Envelope, PulseSchedule, gaussian, unit_area_per_dt

DEFAULT_AMP = 0.1
DEFAULT_SPAN_MHZ = 40.0
DEFAULT_STEP_MHZ = 0.2
DEFAULT_SHOTS = 1024


@dataclass(frozen=True)
class SweepResult:
    points: tuple[tuple[float, float], ...]
    shots_per_point: int

    def __post_init__(self):
        f = [p[0] for p in self.points]
        if any(b <= a for a, b in zip(f, f[1:])):
            raise CalibrationError("sweep frequencies must be strictly increasing")

    @property
    def freqs(self) -> np.ndarray:
        return np.array([p[0] for p in self.points])

    @property
    def probs(self) -> np.ndarray:
        return np.array([p[1] for p in self.points])


class LorentzianFit(NamedTuple):
    f0: float  # GHz
    linewidth: float  # MHz, FWHM
    amplitude: float
    offset: float
    rmse: float
    converged: bool


class RabiFit(NamedTuple):
    t_theta: int
    fit_rmse: float
    converged: bool
    theta: float
    rabi_period: float  # dt
    phase: float
    amplitude: float
    offset: float
    tau: float  # dt; inf when undamped

    def duration_for(self, theta: float) -> int:
        return _duration_for(theta, self.rabi_period, self.phase)


@dataclass(frozen=True)
class CalibrationResult:
    f0: float
    linewidth: float
    t_theta: int
    theta: float
    fit_rmse: float
    converged: bool
    amp: float = DEFAULT_AMP  # envelope amplitude that t_theta refers to
    rabi_period: float = 0.0  # dt
    rabi_phase: float = 0.0
    qubit: int = -1

    def duration_for(self, theta: float) -> int:
        """Pulse duration (dt) enacting ``theta`` at the calibrated amplitude."""
        if self.rabi_period <= 0:
            return max(1, round(self.t_theta * theta / self.theta))
        return _duration_for(theta, self.rabi_period, self.rabi_phase)

    def to_dict(self) -> dict:
        return {
            "qubit": self.qubit, "f0_ghz": self.f0,
            "linewidth_mhz": None if math.isnan(self.linewidth) else self.linewidth,
            "t_theta_dt": self.t_theta, "theta_rad": self.theta, "amp": self.amp,
            "rabi_period_dt": self.rabi_period, "rabi_phase_rad": self.rabi_phase,
            "fit_rmse": self.fit_rmse, "converged": self.converged,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CalibrationResult":
        lw = d.get("linewidth_mhz")
        return cls(f0=d["f0_ghz"], linewidth=float("nan") if lw is None else lw, t_theta=int(d["t_theta_dt"]),
                   theta=d["theta_rad"], fit_rmse=d["fit_rmse"], converged=bool(d["converged"]),
                   amp=d.get("amp", DEFAULT_AMP), rabi_period=d.get("rabi_period_dt", 0.0),
                   rabi_phase=d.get("rabi_phase_rad", 0.0), qubit=d.get("qubit", -1))


def _duration_for(theta: float, period: float, phase: float) -> int:
    t = (theta - phase) * period / (2.0 * math.pi)
    if t < 0.5:
        t += period
    return int(round(t))


# -- experiments -----------------------------------------------------------

def _single_qubit_shots(cfg, target, scheds, shots, seed, params):
    states = evolve_many(cfg, [target], scheds, None, params)
    out = []
    for k, st in enumerate(states):
        dist = sample_counts(measure(st, cfg, [target]), shots, seed ^ k)
        out.append(dist.counts["1"] / shots)
    return out


def frequency_sweep(cfg: DeviceConfig, target: int, center: float, span: float = DEFAULT_SPAN_MHZ,
                    step: float = DEFAULT_STEP_MHZ, probe: Envelope | None = None,
                    shots: int = DEFAULT_SHOTS, seed: int = 0,
                    params: SimParams | None = None) -> SweepResult:
    """Excited-state probability versus drive frequency around ``center`` (GHz).

    ``span`` and ``step`` are in MHz. Point ``k`` is sampled with seed ``seed ^ k``.
    """
    if not step > 0 or not span > 0:
        raise CalibrationError("span and step must be > 0")
    cfg.check_qubit(target)
    probe = probe or gaussian(DEFAULT_AMP, 160)
    params = params or SimParams()
    n_pts = int(round(span / step)) + 1
    offsets = -span / 2.0 + step * np.arange(n_pts)
    freqs = center + offsets * 1e-3
    scheds = [PulseSchedule((DriveInstruction(target, float(f), 0.0, probe, 0),), (), (), probe.duration)
              for f in freqs]
    p1 = _single_qubit_shots(cfg, target, scheds, shots, seed, params)
    return SweepResult(tuple((float(f), float(p)) for f, p in zip(freqs, p1)), shots)


def rabi_scan(cfg: DeviceConfig, target: int, f_drive: float, durations: Sequence[int],
              amp: float = DEFAULT_AMP, shots: int = DEFAULT_SHOTS, seed: int = 0,
              params: SimParams | None = None, kind: str = "gaussian") -> list[tuple[int, float]]:
    """Excited-state probability versus pulse duration at a fixed drive frequency."""
    durations = [int(d) for d in durations]
    if not durations:
        raise CalibrationError("durations must be non-empty")
    if any(b <= a for a, b in zip(durations, durations[1:])):
        raise CalibrationError("durations must be strictly increasing")
    cfg.check_qubit(target)
    params = params or SimParams()
    scheds = [PulseSchedule((DriveInstruction(target, f_drive, 0.0, Envelope(kind, amp, d), 0),), (), (), d)
              for d in durations]
    p1 = _single_qubit_shots(cfg, target, scheds, shots, seed, params)
    return list(zip(durations, p1))


# -- fits ------------------------------------------------------------------

def lorentzian(f, f0, gamma, amplitude, offset):
    hw2 = (0.5 * gamma) ** 2
    return offset + amplitude * hw2 / ((f - f0) ** 2 + hw2)


def _half_max_width(x: np.ndarray, y: np.ndarray, i_peak: int, level: float) -> float:
    # Linear interpolation of the first crossing on either side of the peak.
    left = x[0]
    for i in range(i_peak, 0, -1):
        if y[i - 1] < level <= y[i]:
            left = x[i - 1] + (level - y[i - 1]) * (x[i] - x[i - 1]) / (y[i] - y[i - 1])
            break
    right = x[-1]
    for i in range(i_peak, len(x) - 1):
        if y[i + 1] < level <= y[i]:
            right = x[i] + (y[i] - level) * (x[i + 1] - x[i]) / (y[i] - y[i + 1])
            break
    return float(right - left)


def fit_lorentzian(sweep: SweepResult) -> LorentzianFit:
    f = sweep.freqs
    y = sweep.probs
    if len(f) < 8:
        raise CalibrationError("Lorentzian fit needs at least 8 points")
    ref = float(f.mean())
    x = (f - ref) * 1e3  # MHz about the sweep midpoint
    i = int(np.argmax(y))
    lo, hi = float(y.min()), float(y.max())
    amp0 = hi - lo
    step = float(np.min(np.diff(x)))
    if amp0 <= 1e-12:
        return LorentzianFit(float(f[i]), float("nan"), 0.0, lo, float(np.std(y)), False)
    width0 = max(_half_max_width(x, y, i, lo + 0.5 * amp0), step)
    p0 = np.array([x[i], width0, amp0, lo])

    def resid(p):
        return lorentzian(x, p[0], abs(p[1]), p[2], p[3]) - y

    span = float(x[-1] - x[0])
    res = gauss_newton(resid, p0, scale=np.array([step, step, 1.0, 1.0]))
    x0, gamma, amplitude, offset = res.params
    gamma = abs(gamma)
    ok = (
        res.converged
        and np.all(np.isfinite(res.params))
        and gamma > 0
        and amplitude > 5.0 * res.rmse
        and x[0] <= x0 <= x[-1]
        and gamma < 10.0 * span
    )
    return LorentzianFit(ref + x0 * 1e-3, float(gamma), float(amplitude), float(offset), res.rmse, bool(ok))


def _dominant_period(t: np.ndarray, y: np.ndarray) -> float:
    """Period of the strongest nonzero frequency in the mean-subtracted trace."""
    yc = y - y.mean()
    span = float(t[-1] - t[0])
    n = len(t)
    # Discrete bins k / span, then a fine search around the best one.
    k = np.arange(1, max(2, n // 2) + 1)
    nu = k / span

    def power(nus):
        return np.abs(np.exp(-2j * np.pi * np.outer(nus, t)) @ yc)

    best = nu[int(np.argmax(power(nu)))]
    d = 1.0 / span
    fine = np.linspace(max(best - d, 0.25 * d), best + d, 401)
    return float(1.0 / fine[int(np.argmax(power(fine)))])


def fit_rabi(scan: Sequence[tuple[float, float]], theta: float = math.pi) -> RabiFit:
    """Fit ``P(t) = B - (A/2) cos(2 pi t / T + phi) exp(-t / tau)`` and solve for the theta-duration."""
    t = np.array([s[0] for s in scan], dtype=float)
    y = np.array([s[1] for s in scan], dtype=float)
    if len(t) < 8:
        raise CalibrationError("Rabi fit needs at least 8 points")
    span = float(t[-1] - t[0])
    T0 = _dominant_period(t, y)
    if span < T0:
        raise CalibrationError(f"scan spans {span:g} dt, shorter than one estimated period ({T0:.1f} dt)")
    w = 2.0 * np.pi / T0
    M = np.column_stack([np.ones_like(t), np.cos(w * t), np.sin(w * t)])
    (B0, a, b), *_ = np.linalg.lstsq(M, y, rcond=None)
    A0 = 2.0 * math.hypot(a, b)
    phi0 = math.atan2(b, -a)
    damped = span > 3.0 * T0

    def model(p):
        B, A, T, phi = p[:4]
        env = np.exp(-p[4] * t) if damped else 1.0
        return B - 0.5 * A * np.cos(2.0 * np.pi * t / T + phi) * env

    def resid(p):
        return model(p) - y

    def bounds(p):
        if damped and p[4] < 0:
            p = p.copy()
            p[4] = 0.0
        return p

    p0 = [B0, A0, T0, phi0] + ([0.0] if damped else [])
    scale = [1.0, 1.0, T0, 1.0] + ([1.0 / span] if damped else [])
    res = gauss_newton(resid, np.array(p0), scale=np.array(scale), bounds=bounds)
    B, A, T, phi = (float(v) for v in res.params[:4])
    rate = float(res.params[4]) if damped else 0.0
    if A < 0:
        A, phi = -A, phi + math.pi
    if T < 0:
        T, phi = -T, -phi
    phi = math.remainder(phi, 2.0 * math.pi)
    t_theta = _duration_for(theta, T, phi)
    ok = res.converged and np.all(np.isfinite(res.params)) and t_theta >= 1 and A > 0
    tau = 1.0 / rate if rate > 0 else math.inf
    return RabiFit(t_theta, res.rmse, bool(ok), float(theta), T, phi, A, B, tau)


# -- pipelines -------------------------------------------------------------

def default_durations(max_dt: int = 800, step: int = 8) -> list[int]:
    return list(range(step, max_dt + 1, step))


def calibrate_qubit(cfg: DeviceConfig, target: int, theta: float = math.pi, *, amp: float = DEFAULT_AMP,
                    center: float | None = None, span: float = DEFAULT_SPAN_MHZ, step: float = DEFAULT_STEP_MHZ,
                    probe: Envelope | None = None, durations: Sequence[int] | None = None,
                    shots: int = DEFAULT_SHOTS, seed: int = 0, params: SimParams | None = None) -> CalibrationResult:
    """Spectroscopy, Lorentzian fit, Rabi scan at the fitted frequency, sinusoid fit."""
    cfg.check_qubit(target)
    nominal = cfg.qubits[target].f_q if center is None else center
    probe = probe or gaussian(amp, 160)
    sweep = frequency_sweep(cfg, target, nominal, span, step, probe, shots, seed, params)
    lor = fit_lorentzian(sweep)
    f0 = lor.f0 if lor.converged else float(sweep.freqs[np.argmax(sweep.probs)])
    scan = rabi_scan(cfg, target, f0, durations or default_durations(), amp, shots, seed + 1, params)
    rab = fit_rabi(scan, theta)
    return CalibrationResult(
        f0=f0, linewidth=lor.linewidth, t_theta=rab.t_theta, theta=theta,
        fit_rmse=rab.fit_rmse, converged=bool(lor.converged and rab.converged),
        amp=amp, rabi_period=rab.rabi_period, rabi_phase=rab.phase, qubit=target,
    )


def calibration_from_device(cfg: DeviceConfig, target: int, theta: float = math.pi,
                            amp: float = DEFAULT_AMP) -> CalibrationResult:
    """Calibration read straight from published device parameters (no experiment).

    Mirrors the case where the provider exposes daily calibration data: the
    frequency is the configured ``f_q`` and the duration follows from the
    area condition for a sigma = T/4 Gaussian at ``amp``.
    """
    cfg.check_qubit(target)
    q = cfg.qubits[target]
    per_dt = 2.0 * math.pi * q.f_rabi_max * amp * unit_area_per_dt() * cfg.dt_us  # rad per dt of duration
    period = 2.0 * math.pi / per_dt
    return CalibrationResult(
        f0=q.f_q, linewidth=float("nan"), t_theta=_duration_for(theta, period, 0.0), theta=theta,
        fit_rmse=0.0, converged=True, amp=amp, rabi_period=period, rabi_phase=0.0, qubit=target,
    )


def with_theta(calib: CalibrationResult, theta: float) -> CalibrationResult:
    """Same calibration re-targeted at another rotation angle."""
    return replace(calib, theta=theta, t_theta=calib.duration_for(theta))
