"""Damped Gauss-Newton least squares with a central-difference Jacobian."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass
class FitResult:
    params: np.ndarray
    rmse: float
    converged: bool
    iterations: int
    message: str = ""


def numerical_jacobian(residual: Callable[[np.ndarray], np.ndarray], p: np.ndarray,
                       rel_step: float = 1e-6, scale: np.ndarray | None = None) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if scale is None:
        scale = np.ones_like(p)
    cols = []
    for j in range(p.size):
        hj = rel_step * max(abs(p[j]), scale[j])
        up, dn = p.copy(), p.copy()
        up[j] += hj
        dn[j] -= hj
        cols.append((residual(up) - residual(dn)) / (2.0 * hj))
    return np.stack(cols, axis=1)


def gauss_newton(residual: Callable[[np.ndarray], np.ndarray], p0, *, max_iter: int = 200,
                 xtol: float = 1e-10, rel_step: float = 1e-6, scale=None,
                 bounds: Callable[[np.ndarray], np.ndarray] | None = None) -> FitResult:
    """Minimise ``sum(residual(p)**2)``.

    Each iteration solves the Gauss-Newton normal equations with a
    Levenberg-style diagonal damping; the damping shrinks after a step that
    lowers the cost and grows otherwise. Converges when the accepted step
    changes the parameters by less than ``xtol`` relative to their size.
    ``bounds`` optionally projects a trial point back into the feasible set.
    """
    p = np.asarray(p0, dtype=float).copy()
    scale = np.ones_like(p) if scale is None else np.asarray(scale, dtype=float)
    r = residual(p)
    cost = float(r @ r)
    lam = 1e-3
    for it in range(1, max_iter + 1):
        J = numerical_jacobian(residual, p, rel_step, scale)
        g = J.T @ r
        JTJ = J.T @ J
        diag = np.diag(JTJ).copy()
        if not np.all(np.isfinite(JTJ)) or np.max(diag, initial=0.0) == 0.0:
            return FitResult(p, _rmse(r), False, it, "degenerate Jacobian")
        diag[diag == 0.0] = 1.0
        accepted = False
        for _ in range(30):
            try:
                step = np.linalg.solve(JTJ + lam * np.diag(diag), -g)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            trial = p + step
            if bounds is not None:
                trial = bounds(trial)
            rt = residual(trial)
            ct = float(rt @ rt)
            if np.isfinite(ct) and ct <= cost:
                accepted = True
                break
            lam *= 10.0
        if not accepted:
            # No descent direction left: we are at a (numerical) minimum.
            return FitResult(p, _rmse(r), True, it, "no further descent")
        dp = trial - p
        p, r, cost = trial, rt, ct
        lam = max(lam / 10.0, 1e-12)
        if np.linalg.norm(dp) <= xtol * (np.linalg.norm(p) + xtol):
            return FitResult(p, _rmse(r), True, it, "parameter change below tolerance")
    return FitResult(p, _rmse(r), False, max_iter, "iteration limit reached")


def _rmse(r: np.ndarray) -> float:
    return float(np.sqrt(np.mean(r**2))) if r.size else 0.0
