"""State types and dynamics for the write-field / Stokes / spin-wave system.

Two routes through the same physics are provided:

* ``beam_splitter_transform`` applies the closed-form two-mode rotation
  that holds when the Stokes drive is treated as an undepleted classical
  field.  The rotation angle is the pulse area ``theta = |Omega| * t`` with
  ``Omega = 2 * eta * conj(A_S)``.
* ``integrate_three_wave`` integrates the full coupled-mode equations
  (all three fields dynamical, optional spin-wave damping) with a
  fixed-step classical RK4 scheme.

Amplitudes are dimensionless c-numbers represented as built-in ``complex``
values; ``eta`` carries the compensating units.  Times are in seconds
throughout this module; nanoseconds appear only at the sequence and
detector interfaces.

Sign convention: the rotation in ``beam_splitter_transform`` uses the
minus sign on the write-to-spin-wave branch.  Under the coupled-mode
equations that convention corresponds to a drive with phase pi (real
negative amplitude); a drive with zero phase rotates the opposite way.
Intensities are insensitive to the choice for single-pulse dynamics.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from atomlight import kernels

__all__ = [
    "DecoherenceModel",
    "DrivePulse",
    "RamanCoupling",
    "Trajectory",
    "TriWaveState",
    "apply_decoherence",
    "apply_phase",
    "beam_splitter_transform",
    "intensity",
    "integrate_three_wave",
    "pulse_area",
    "rabi_frequency",
    "rabi_frequency_complex",
]

#: Target |Omega| * dt when integrate_three_wave picks the step itself.
DEFAULT_AREA_PER_STEP = 0.01


def intensity(amplitude: complex) -> float:
    """Intensity of a c-number amplitude, ``re**2 + im**2``."""
    return amplitude.real * amplitude.real + amplitude.imag * amplitude.imag


@dataclass(frozen=True, slots=True)
class RamanCoupling:
    """Coupling constants of the far-detuned two-photon transition.

    Attributes
    ----------
    g_eg, g_em:
        Coupling rates between the excited level and the two ground
        states (rad/s per field unit).
    delta:
        One-photon detuning from the excited level (rad/s, nonzero).
    """

    g_eg: float
    g_em: float
    delta: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.g_eg) and math.isfinite(self.g_em) and math.isfinite(self.delta)):
            raise ValueError("coupling constants must be finite")
        if self.delta == 0.0:
            raise ValueError("delta must be nonzero")

    @property
    def eta(self) -> float:
        """Effective two-photon coupling ``g_eg * g_em / delta``."""
        return self.g_eg * self.g_em / self.delta


@dataclass(frozen=True, slots=True)
class DrivePulse:
    """A classical Stokes drive pulse.

    ``phase`` is an explicit rotation of the complex amplitude; the
    effective drive is ``amplitude * exp(1j * phase)``.
    """

    amplitude: complex
    duration: float
    phase: float = 0.0

    def __post_init__(self) -> None:
        if not cmath.isfinite(complex(self.amplitude)):
            raise ValueError("amplitude must be finite")
        if not math.isfinite(self.duration) or self.duration < 0.0:
            raise ValueError("duration must be finite and >= 0")
        if not math.isfinite(self.phase):
            raise ValueError("phase must be finite")

    @property
    def effective_amplitude(self) -> complex:
        if self.phase == 0.0:
            return complex(self.amplitude)
        return complex(self.amplitude) * cmath.exp(1j * self.phase)


@dataclass(frozen=True, slots=True)
class DecoherenceModel:
    """Spin-wave decay rate and per-path optical transmission.

    ``gamma`` is the amplitude decay rate of the spin wave during free
    delays (``exp(-gamma * t)`` on the amplitude); inside the coupled-mode
    equations the damping term is ``-(gamma/2) * s_a``.  ``optical_loss``
    is an amplitude transmission factor applied once per delay segment.
    """

    gamma: float = 0.0
    optical_loss: float = 1.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.gamma) or self.gamma < 0.0:
            raise ValueError("gamma must be finite and >= 0")
        if not math.isfinite(self.optical_loss) or not 0.0 <= self.optical_loss <= 1.0:
            raise ValueError("optical_loss must be in [0, 1]")


@dataclass(frozen=True, slots=True)
class TriWaveState:
    """Mean-field amplitudes of write field, Stokes field and spin wave."""

    a_w: complex = 0j
    a_s: complex = 0j
    s_a: complex = 0j

    def __post_init__(self) -> None:
        if not (
            cmath.isfinite(complex(self.a_w))
            and cmath.isfinite(complex(self.a_s))
            and cmath.isfinite(complex(self.s_a))
        ):
            raise ValueError("amplitudes must be finite")

    @property
    def write_intensity(self) -> float:
        return intensity(self.a_w)

    @property
    def stokes_intensity(self) -> float:
        return intensity(self.a_s)

    @property
    def spinwave_intensity(self) -> float:
        return intensity(self.s_a)


def rabi_frequency_complex(coupling: RamanCoupling, drive: DrivePulse) -> complex:
    """Complex oscillation frequency ``Omega = 2 * eta * conj(A_S)`` (rad/s)."""
    return 2.0 * coupling.eta * drive.effective_amplitude.conjugate()


def rabi_frequency(coupling: RamanCoupling, drive: DrivePulse) -> float:
    """Magnitude of the drive-induced oscillation frequency, ``2*|eta|*|A_S|``."""
    return abs(rabi_frequency_complex(coupling, drive))


def pulse_area(coupling: RamanCoupling, drive: DrivePulse) -> float:
    """Rotation angle accumulated over the pulse, ``theta = |Omega| * t``."""
    return rabi_frequency(coupling, drive) * drive.duration


def beam_splitter_transform(state: TriWaveState, theta: float) -> TriWaveState:
    """Rotate write field and spin wave into each other by pulse area theta.

    ``a_w' = a_w cos(theta/2) + s_a sin(theta/2)``
    ``s_a' = s_a cos(theta/2) - a_w sin(theta/2)``

    The drive amplitude ``a_s`` is frozen (undepleted approximation) and
    ``|a_w|^2 + |s_a|^2`` is conserved exactly.
    """
    if not math.isfinite(theta):
        raise ValueError("theta must be finite")
    c = math.cos(0.5 * theta)
    s = math.sin(0.5 * theta)
    return TriWaveState(
        a_w=state.a_w * c + state.s_a * s,
        a_s=state.a_s,
        s_a=state.s_a * c - state.a_w * s,
    )


def apply_phase(state: TriWaveState, phi_optical: float = 0.0, phi_atomic: float = 0.0) -> TriWaveState:
    """Rotate the optical (write) and atomic (spin-wave) phases."""
    if not (math.isfinite(phi_optical) and math.isfinite(phi_atomic)):
        raise ValueError("phases must be finite")
    a_w = state.a_w if phi_optical == 0.0 else state.a_w * cmath.exp(1j * phi_optical)
    s_a = state.s_a if phi_atomic == 0.0 else state.s_a * cmath.exp(1j * phi_atomic)
    return TriWaveState(a_w=a_w, a_s=state.a_s, s_a=s_a)


def apply_decoherence(state: TriWaveState, decoherence: DecoherenceModel, dt: float) -> TriWaveState:
    """Free-evolution decay over dt: spin wave by exp(-gamma*dt), write field
    by the per-segment optical transmission."""
    if not math.isfinite(dt) or dt < 0.0:
        raise ValueError("dt must be finite and >= 0")
    decay = math.exp(-decoherence.gamma * dt)
    return TriWaveState(
        a_w=state.a_w * decoherence.optical_loss,
        a_s=state.a_s,
        s_a=state.s_a * decay,
    )


@dataclass(frozen=True)
class Trajectory:
    """Sampled output of :func:`integrate_three_wave`.

    ``times`` is in seconds; the three amplitude arrays are complex128 and
    aligned with it.  Initial and final states are always included.
    """

    times: np.ndarray
    a_w: np.ndarray
    a_s: np.ndarray
    s_a: np.ndarray

    def __len__(self) -> int:
        return len(self.times)

    def state(self, i: int) -> TriWaveState:
        return TriWaveState(
            a_w=complex(self.a_w[i]), a_s=complex(self.a_s[i]), s_a=complex(self.s_a[i])
        )

    @property
    def write_intensity(self) -> np.ndarray:
        return np.abs(self.a_w) ** 2

    @property
    def stokes_intensity(self) -> np.ndarray:
        return np.abs(self.a_s) ** 2

    @property
    def spinwave_intensity(self) -> np.ndarray:
        return np.abs(self.s_a) ** 2


def default_step(coupling: RamanCoupling, state: TriWaveState, duration: float) -> float:
    """Step size keeping ``|Omega| * dt`` at DEFAULT_AREA_PER_STEP.

    Falls back to duration/1000 when the initial drive amplitude is zero.
    """
    omega = 2.0 * abs(coupling.eta) * abs(state.a_s)
    if omega == 0.0:
        return duration / 1000.0
    return min(duration, DEFAULT_AREA_PER_STEP / omega)


def integrate_three_wave(
    state: TriWaveState,
    coupling: RamanCoupling,
    decoherence: DecoherenceModel,
    duration: float,
    dt: float | None = None,
    sample_every: int = 1,
) -> Trajectory:
    """Integrate the coupled-mode equations over ``duration`` seconds.

    The mean-field equations are

        da_w/dt = -eta * a_s * s_a
        da_s/dt =  eta * a_w * conj(s_a)
        ds_a/dt =  eta * a_w * conj(a_s) - (gamma/2) * s_a

    With gamma = 0 the invariants ``|a_w|^2 + |s_a|^2`` and
    ``|a_s|^2 - |s_a|^2`` are conserved up to integrator error.

    Parameters
    ----------
    duration:
        Total integration time (s), at least one step long.
    dt:
        Fixed step (s).  When omitted, chosen via :func:`default_step`.
    sample_every:
        Keep every n-th step in the returned trajectory (the final state
        is always kept).
    """
    if dt is None:
        dt = default_step(coupling, state, duration)
    if not math.isfinite(dt) or dt <= 0.0:
        raise ValueError("dt must be finite and > 0")
    if duration < dt:
        raise ValueError("duration must cover at least one step")
    if sample_every < 1:
        raise ValueError("sample_every must be >= 1")

    n_steps = int(round(duration / dt))
    a_w, a_s, s_a = kernels.rk4_three_wave(
        complex(state.a_w),
        complex(state.a_s),
        complex(state.s_a),
        coupling.eta,
        decoherence.gamma,
        dt,
        n_steps,
        sample_every,
    )
    steps = np.arange(0, n_steps + 1, sample_every)
    if steps[-1] != n_steps:
        steps = np.append(steps, n_steps)
    return Trajectory(times=steps * dt, a_w=a_w, a_s=a_s, s_a=s_a)
