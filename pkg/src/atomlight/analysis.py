"""Trace fitting: damped oscillations, cosine fringes, straight lines.

The two nonlinear models are fitted with a damped Gauss-Newton loop
(Levenberg-style diagonal damping, analytic Jacobians, max 200
iterations, relative step tolerance 1e-10).  Steps are only accepted when
they reduce the residual, so the residual at the returned parameters
never exceeds the residual at the initial guess.  Degenerate inputs
(constant traces, too few points, spans below one period) come back with
``converged=False`` and a message instead of raising.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "FitResult",
    "fit_cosine_fringe",
    "fit_damped_rabi",
    "fit_linear",
]

MAX_ITERATIONS = 200
STEP_TOLERANCE = 1e-10


@dataclass(frozen=True)
class FitResult:
    """Parameter estimates plus convergence diagnostics."""

    params: dict[str, float] = field(default_factory=dict)
    residual_norm: float = 0.0
    converged: bool = False
    iterations: int = 0
    message: str = ""

    def to_dict(self) -> dict:
        return {
            "params": dict(self.params),
            "residual_norm": self.residual_norm,
            "converged": self.converged,
            "iterations": self.iterations,
            "message": self.message,
        }


def _failed(message: str, y: np.ndarray) -> FitResult:
    baseline = float(np.sqrt(np.sum((y - np.mean(y)) ** 2))) if len(y) else 0.0
    return FitResult(residual_norm=baseline, converged=False, iterations=0, message=message)


def _damped_gauss_newton(residual_jacobian, p0):
    """Minimize ||r(p)||^2; returns (p, cost, converged, iterations).

    Overflow in a trial evaluation is routine (wild steps get rejected),
    so floating-point warnings are silenced around model evaluations.
    """
    p = np.asarray(p0, dtype=float)
    with np.errstate(all="ignore"):
        r, jac = residual_jacobian(p)
        cost = float(r @ r)
    lam = 1e-3
    converged = cost == 0.0
    iterations = 0
    for iterations in range(1, MAX_ITERATIONS + 1):
        if converged:
            break
        jtj = jac.T @ jac
        grad = jac.T @ r
        damping = np.diag(np.maximum(np.diag(jtj), 1e-300))
        try:
            step = np.linalg.solve(jtj + lam * damping, -grad)
        except np.linalg.LinAlgError:
            lam *= 10.0
            continue
        candidate = p + step
        with np.errstate(all="ignore"):
            r_new, jac_new = residual_jacobian(candidate)
            cost_new = float(r_new @ r_new)
        if math.isfinite(cost_new) and cost_new <= cost:
            relative_step = np.linalg.norm(step) / (np.linalg.norm(p) + STEP_TOLERANCE)
            p, r, jac, cost = candidate, r_new, jac_new, cost_new
            lam = max(lam * 0.25, 1e-14)
            if relative_step <= STEP_TOLERANCE or cost == 0.0:
                converged = True
        else:
            lam *= 4.0
            if lam > 1e15:
                break
    return p, cost, converged, iterations


def _spectrum_seed(times: np.ndarray, values: np.ndarray) -> float | None:
    """Angular frequency of the dominant non-DC peak, or None when flat.

    Assumes (approximately) uniform sampling, which every simulated trace
    in this package provides.
    """
    detrended = values - np.mean(values)
    spectrum = np.abs(np.fft.rfft(detrended))
    if len(spectrum) < 2:
        return None
    scale = max(float(np.max(np.abs(values))), 1.0)
    k = 1 + int(np.argmax(spectrum[1:]))
    if spectrum[k] <= 1e-12 * scale * len(values):
        return None
    # parabolic refinement of the peak bin
    shift = 0.0
    if 1 <= k < len(spectrum) - 1:
        left, mid, right = spectrum[k - 1], spectrum[k], spectrum[k + 1]
        denom = left - 2.0 * mid + right
        if denom != 0.0:
            shift = 0.5 * (left - right) / denom
            shift = float(np.clip(shift, -0.5, 0.5))
    span = times[-1] - times[0]
    if span <= 0.0:
        return None
    return 2.0 * math.pi * (k + shift) * (len(values) - 1) / (len(values) * span)


def fit_damped_rabi(times, intensities) -> FitResult:
    """Fit ``I(t) = offset + i0 * exp(-gamma*t) * sin^2(omega*t/2 + phase)``.

    ``phase`` selects the branch (0 for a trace starting dark, pi/2 for a
    trace starting bright) and is chosen from the data, not fitted.  The
    frequency seed comes from the discrete spectrum of the trace.  Times
    are referenced to the first sample, so a trace recorded mid-schedule
    fits the same family (``i0`` then refers to the envelope at the first
    sample).

    Returns params ``i0, omega, gamma, offset, phase``.
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(intensities, dtype=float)
    if t.shape != y.shape or t.ndim != 1:
        raise ValueError("times and intensities must be 1-d arrays of equal length")
    if len(t) < 8:
        return _failed("need at least 8 points", y)
    t = t - t[0]

    omega0 = _spectrum_seed(t, y)
    if omega0 is None or omega0 == 0.0:
        return _failed("no oscillation found above DC", y)
    if (t[-1] - t[0]) * omega0 < 2.0 * math.pi * 0.99:
        return _failed("trace spans less than one oscillation period", y)

    lo = float(np.min(y))
    hi = float(np.max(y))
    branch = 0.0 if y[0] - lo < 0.5 * (hi - lo) else 0.5 * math.pi
    p0 = np.array([hi - lo, omega0, 0.0, lo])

    def residual_jacobian(p):
        i0, omega, gamma, offset = p
        envelope = np.exp(-gamma * t)
        s = np.sin(0.5 * omega * t + branch)
        c = np.cos(0.5 * omega * t + branch)
        s2 = s * s
        model = offset + i0 * envelope * s2
        jac = np.empty((len(t), 4))
        jac[:, 0] = envelope * s2
        jac[:, 1] = i0 * envelope * s * c * t
        jac[:, 2] = -t * i0 * envelope * s2
        jac[:, 3] = 1.0
        return model - y, jac

    p, cost, converged, iterations = _damped_gauss_newton(residual_jacobian, p0)
    i0, omega, gamma, offset = (float(v) for v in p)
    # the model is even in omega for either branch
    params = {
        "i0": i0,
        "omega": abs(omega),
        "gamma": gamma,
        "offset": offset,
        "phase": branch,
    }
    return FitResult(
        params=params,
        residual_norm=float(np.sqrt(cost)),
        converged=converged,
        iterations=iterations,
    )


def _wrap_phase(phi: float) -> float:
    """Wrap to (-pi, pi]."""
    wrapped = math.fmod(phi + math.pi, 2.0 * math.pi)
    if wrapped <= 0.0:
        wrapped += 2.0 * math.pi
    return wrapped - math.pi


def fit_cosine_fringe(phases, intensities) -> FitResult:
    """Fit ``I(phi) = A + B * cos(phi + phi0)``.

    Seeds: A from the mean, B from half the peak-to-peak range, phi0 from
    first-harmonic quadrature sums.  The returned contrast satisfies
    B >= 0 with phi0 in (-pi, pi]; visibility is reported as B/A.

    Returns params ``mean, contrast, phase0, visibility``.
    """
    phi = np.asarray(phases, dtype=float)
    y = np.asarray(intensities, dtype=float)
    if phi.shape != y.shape or phi.ndim != 1:
        raise ValueError("phases and intensities must be 1-d arrays of equal length")
    if len(phi) < 5:
        return _failed("need at least 5 points", y)
    if float(np.max(phi) - np.min(phi)) < 2.0 * math.pi * 0.99:
        return _failed("phase values span less than one fringe period", y)

    a0 = float(np.mean(y))
    b0 = 0.5 * float(np.max(y) - np.min(y))
    c1 = float(np.sum((y - a0) * np.cos(phi)))
    s1 = float(np.sum((y - a0) * np.sin(phi)))
    phi0_seed = math.atan2(-s1, c1)
    p0 = np.array([a0, b0, phi0_seed])

    def residual_jacobian(p):
        a, b, phi0 = p
        c = np.cos(phi + phi0)
        model = a + b * c
        jac = np.empty((len(phi), 3))
        jac[:, 0] = 1.0
        jac[:, 1] = c
        jac[:, 2] = -b * np.sin(phi + phi0)
        return model - y, jac

    p, cost, converged, iterations = _damped_gauss_newton(residual_jacobian, p0)
    mean, contrast, phase0 = (float(v) for v in p)
    if contrast < 0.0:
        contrast = -contrast
        phase0 += math.pi
    phase0 = _wrap_phase(phase0)
    if mean <= 0.0:
        return FitResult(
            params={"mean": mean, "contrast": contrast, "phase0": phase0},
            residual_norm=float(np.sqrt(cost)),
            converged=False,
            iterations=iterations,
            message="fitted mean is not positive",
        )
    params = {
        "mean": mean,
        "contrast": contrast,
        "phase0": phase0,
        "visibility": contrast / mean,
    }
    return FitResult(
        params=params,
        residual_norm=float(np.sqrt(cost)),
        converged=converged,
        iterations=iterations,
    )


def fit_linear(x, y) -> FitResult:
    """Ordinary least squares line fit.

    Returns params ``slope, intercept, r_squared``.  Raises ValueError
    when every x value is identical.
    """
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if xa.shape != ya.shape or xa.ndim != 1:
        raise ValueError("x and y must be 1-d arrays of equal length")
    if len(xa) < 2:
        raise ValueError("need at least 2 points")
    if np.all(xa == xa[0]):
        raise ValueError("all x values are identical")

    xm = float(np.mean(xa))
    ym = float(np.mean(ya))
    sxx = float(np.sum((xa - xm) ** 2))
    sxy = float(np.sum((xa - xm) * (ya - ym)))
    slope = sxy / sxx
    intercept = ym - slope * xm

    residuals = ya - (slope * xa + intercept)
    ss_res = float(np.sum(residuals**2))
    ss_tot = float(np.sum((ya - ym) ** 2))
    if ss_tot == 0.0:
        r_squared = 1.0 if ss_res == 0.0 else 0.0
    else:
        r_squared = 1.0 - ss_res / ss_tot
    return FitResult(
        params={"slope": slope, "intercept": intercept, "r_squared": r_squared},
        residual_norm=float(np.sqrt(ss_res)),
        converged=True,
        iterations=0,
    )
