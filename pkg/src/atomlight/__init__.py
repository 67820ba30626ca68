"""Raman-driven atom-light dynamics: oscillation, interferometry, fitting.

The package splits into five layers:

* :mod:`atomlight.core` - state types and dynamics (closed-form rotation
  and the coupled-mode integrator).
* :mod:`atomlight.sequence` - the ``.seq`` pulse-sequence language.
* :mod:`atomlight.interferometer` - schedule execution, scans, exports.
* :mod:`atomlight.analysis` - damped-oscillation, fringe and line fits.
* :mod:`atomlight.cli` - the ``atomlight`` command.
"""

from atomlight.core import (
    DecoherenceModel,
    DrivePulse,
    RamanCoupling,
    Trajectory,
    TriWaveState,
    apply_decoherence,
    apply_phase,
    beam_splitter_transform,
    integrate_three_wave,
    intensity,
    pulse_area,
    rabi_frequency,
    rabi_frequency_complex,
)
from atomlight.sequence import (
    PulseSchedule,
    SequenceError,
    SequenceParams,
    builtin_sequences,
    parse_sequence,
    serialize_sequence,
)
from atomlight.interferometer import (
    DetectorRecord,
    ScanResult,
    ScanSpec,
    StarkProbe,
    ac_stark_phase,
    ac_stark_shift,
    run_schedule,
    scan,
    trace_schedule,
)
from atomlight.analysis import FitResult, fit_cosine_fringe, fit_damped_rabi, fit_linear

__version__ = "0.1.0"

__all__ = [
    "DecoherenceModel",
    "DetectorRecord",
    "DrivePulse",
    "FitResult",
    "PulseSchedule",
    "RamanCoupling",
    "ScanResult",
    "ScanSpec",
    "SequenceError",
    "SequenceParams",
    "StarkProbe",
    "Trajectory",
    "TriWaveState",
    "ac_stark_phase",
    "ac_stark_shift",
    "apply_decoherence",
    "apply_phase",
    "beam_splitter_transform",
    "builtin_sequences",
    "fit_cosine_fringe",
    "fit_damped_rabi",
    "fit_linear",
    "integrate_three_wave",
    "intensity",
    "parse_sequence",
    "pulse_area",
    "rabi_frequency",
    "rabi_frequency_complex",
    "run_schedule",
    "scan",
    "serialize_sequence",
    "trace_schedule",
    "__version__",
]
