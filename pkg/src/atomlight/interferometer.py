"""Schedule execution, parameter scans and detector-record exports.

``run_schedule`` threads a :class:`~atomlight.core.TriWaveState` through a
validated :class:`~atomlight.sequence.PulseSchedule` in event order:
stokes pulses apply the closed-form rotation with their pulse area, delays
apply spin-wave decay and optical loss, phase and stark events rotate
phases, and each detect event snapshots one record.  ``trace_schedule``
is the time-resolved variant that integrates the full coupled-mode
equations through every stokes pulse and emits write-channel samples
while the drive is on.

Detector records on the spin-wave channel already include the conversion
efficiency of the most recent read pulse (1.0 before any read pulse).

Scans re-run one schedule with a single event field swept across a value
grid.  Results are exported as CSV and JSON; both formats carry a schema
version and are frozen by golden-file tests.  Records are noiseless by
default; optional additive Gaussian intensity noise is seeded per scan
point so that parallel and sequential evaluation are identical.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence as SequenceABC

import numpy as np

from atomlight.core import (
    DecoherenceModel,
    DrivePulse,
    RamanCoupling,
    TriWaveState,
    apply_decoherence,
    apply_phase,
    beam_splitter_transform,
    integrate_three_wave,
    intensity,
    pulse_area,
)
from atomlight.sequence import (
    Delay,
    Detect,
    InjectWrite,
    PhaseShift,
    PrepareSpinWave,
    PulseSchedule,
    ReadPulse,
    StarkProbeEvent,
    StokesPulse,
)

__all__ = [
    "DetectorRecord",
    "ScanResult",
    "ScanSpec",
    "StarkProbe",
    "ac_stark_phase",
    "ac_stark_shift",
    "records_to_csv",
    "records_to_json",
    "read_records_csv",
    "read_scan_csv",
    "run_schedule",
    "scan",
    "scan_to_csv",
    "scan_to_json",
    "trace_schedule",
]

CSV_SCHEMA_RECORDS = "records/1"
CSV_SCHEMA_SCAN = "scan/1"
JSON_SCHEMA_VERSION = 1


@dataclass(frozen=True, slots=True)
class DetectorRecord:
    """One detected intensity: channel, time of the detect event (ns)."""

    channel: str
    time_ns: float
    intensity: float

    def __post_init__(self) -> None:
        # coerce numpy scalars so repr-based exports stay canonical
        object.__setattr__(self, "time_ns", float(self.time_ns))
        object.__setattr__(self, "intensity", float(self.intensity))
        if self.channel not in ("write", "spinwave"):
            raise ValueError(f"unknown channel '{self.channel}'")
        if not math.isfinite(self.intensity) or self.intensity < 0.0:
            raise ValueError("intensity must be finite and >= 0")


@dataclass(frozen=True, slots=True)
class StarkProbe:
    """Probe-beam settings for the light-induced spin-wave phase.

    ``kappa`` is the calibration constant in degree*GHz/(ns*mW);
    ``field_amplitude`` optionally carries |E| for the microscopic form.
    """

    power_mw: float
    detuning_ghz: float
    duration_ns: float
    kappa: float = 0.06
    field_amplitude: float | None = None

    def __post_init__(self) -> None:
        if self.power_mw < 0.0 or not math.isfinite(self.power_mw):
            raise ValueError("power must be finite and >= 0")
        if self.duration_ns < 0.0 or not math.isfinite(self.duration_ns):
            raise ValueError("duration must be finite and >= 0")
        if self.detuning_ghz == 0.0 or not math.isfinite(self.detuning_ghz):
            raise ValueError("detuning must be finite and nonzero")


def ac_stark_shift(coupling: RamanCoupling, field_amplitude: float, detuning: float) -> float:
    """Microscopic level-shift rate ``g_eg * g_em * |E|^2 / detuning``.

    ``detuning`` is in rad/s here; the result is rad/s.
    """
    if detuning == 0.0:
        raise ValueError("detuning must be nonzero")
    return coupling.g_eg * coupling.g_em * field_amplitude * field_amplitude / detuning


def ac_stark_phase(probe: StarkProbe, coupling: RamanCoupling | None = None) -> float:
    """Spin-wave phase imprinted by the probe, in radians.

    Uses the calibrated form ``kappa * P * dT / detuning`` (degrees,
    converted).  When the probe carries a field amplitude and a coupling
    is supplied, the microscopic form ``g_eg*g_em*|E|^2/detuning * dT``
    is used instead (detuning converted from GHz to rad/s).
    """
    if probe.detuning_ghz == 0.0:
        raise ValueError("detuning must be nonzero")
    if probe.field_amplitude is not None and coupling is not None:
        detuning = 2.0 * math.pi * probe.detuning_ghz * 1e9
        rate = ac_stark_shift(coupling, probe.field_amplitude, detuning)
        return rate * probe.duration_ns * 1e-9
    degrees = probe.kappa * probe.power_mw * probe.duration_ns / probe.detuning_ghz
    return math.radians(degrees)


# ---------------------------------------------------------------------------
# execution

def _execute(
    schedule: PulseSchedule,
    coupling: RamanCoupling,
    decoherence: DecoherenceModel,
) -> list[DetectorRecord]:
    state = TriWaveState()
    readout_efficiency = 1.0
    records: list[DetectorRecord] = []
    for ev in schedule.events:
        if isinstance(ev, StokesPulse):
            drive = DrivePulse(
                amplitude=ev.amplitude, duration=ev.duration_ns * 1e-9, phase=ev.phase
            )
            state = beam_splitter_transform(state, pulse_area(coupling, drive))
        elif isinstance(ev, Delay):
            state = apply_decoherence(state, decoherence, ev.duration_ns * 1e-9)
        elif isinstance(ev, PhaseShift):
            state = apply_phase(state, ev.optical, ev.atomic)
        elif isinstance(ev, StarkProbeEvent):
            probe = StarkProbe(
                power_mw=ev.power_mw,
                detuning_ghz=ev.detuning_ghz,
                duration_ns=ev.duration_ns,
                kappa=schedule.params.kappa,
            )
            state = apply_phase(state, 0.0, ac_stark_phase(probe))
        elif isinstance(ev, PrepareSpinWave):
            state = TriWaveState(a_w=state.a_w, a_s=state.a_s, s_a=complex(ev.amplitude))
        elif isinstance(ev, InjectWrite):
            state = TriWaveState(a_w=complex(ev.amplitude), a_s=state.a_s, s_a=state.s_a)
        elif isinstance(ev, ReadPulse):
            readout_efficiency = ev.efficiency
        elif isinstance(ev, Detect):
            if ev.channel == "write":
                value = intensity(state.a_w)
            else:
                value = intensity(state.s_a) * readout_efficiency
            records.append(DetectorRecord(channel=ev.channel, time_ns=ev.start_ns, intensity=value))
        else:  # pragma: no cover - exhaustive over Event union
            raise TypeError(f"unhandled event {ev!r}")
    return records


def run_schedule(schedule: PulseSchedule) -> list[DetectorRecord]:
    """Execute a schedule deterministically and return its detector records.

    Raises :class:`~atomlight.sequence.SequenceError` when the schedule
    violates an invariant (unordered events, overlapping stokes pulses,
    no detect event).
    """
    schedule.validate()
    return _execute(schedule, schedule.params.coupling(), schedule.params.decoherence())


def trace_schedule(schedule: PulseSchedule, samples_per_pulse: int = 200) -> list[DetectorRecord]:
    """Execute a schedule with time-resolved stokes pulses.

    Every stokes pulse is integrated with the full coupled-mode equations
    (the drive amplitude becomes a dynamical field, so depletion and
    spin-wave damping act during the pulse) and the write-field intensity
    is recorded at ``samples_per_pulse`` points across the pulse.  All
    other events behave as in :func:`run_schedule`.

    Note the drive phase matters here: the coupled-mode rotation axis
    follows ``Omega = 2*eta*conj(A_S)``, so a pulse with phase pi
    reproduces the sign convention of ``beam_splitter_transform``.
    Intensities of single-pulse traces are insensitive to the choice.
    """
    schedule.validate()
    if samples_per_pulse < 2:
        raise ValueError("samples_per_pulse must be >= 2")
    coupling = schedule.params.coupling()
    decoherence = schedule.params.decoherence()
    state = TriWaveState()
    readout_efficiency = 1.0
    records: list[DetectorRecord] = []
    for ev in schedule.events:
        if isinstance(ev, StokesPulse):
            duration = ev.duration_ns * 1e-9
            if duration == 0.0:
                continue
            drive = DrivePulse(amplitude=ev.amplitude, duration=duration, phase=ev.phase)
            pumped = TriWaveState(a_w=state.a_w, a_s=drive.effective_amplitude, s_a=state.s_a)
            omega = 2.0 * abs(coupling.eta) * abs(drive.effective_amplitude)
            if omega == 0.0:
                continue
            dt = duration / max(samples_per_pulse, math.ceil(omega * duration / 0.01))
            n_steps = int(round(duration / dt))
            sample_every = max(1, n_steps // samples_per_pulse)
            traj = integrate_three_wave(
                pumped, coupling, decoherence, duration, dt, sample_every=sample_every
            )
            for t, a_w in zip(traj.times, traj.a_w):
                records.append(
                    DetectorRecord(
                        channel="write",
                        time_ns=ev.start_ns + t * 1e9,
                        intensity=intensity(complex(a_w)),
                    )
                )
            final = traj.state(len(traj) - 1)
            state = TriWaveState(a_w=final.a_w, a_s=state.a_s, s_a=final.s_a)
        elif isinstance(ev, Delay):
            state = apply_decoherence(state, decoherence, ev.duration_ns * 1e-9)
        elif isinstance(ev, PhaseShift):
            state = apply_phase(state, ev.optical, ev.atomic)
        elif isinstance(ev, StarkProbeEvent):
            probe = StarkProbe(
                power_mw=ev.power_mw,
                detuning_ghz=ev.detuning_ghz,
                duration_ns=ev.duration_ns,
                kappa=schedule.params.kappa,
            )
            state = apply_phase(state, 0.0, ac_stark_phase(probe))
        elif isinstance(ev, PrepareSpinWave):
            state = TriWaveState(a_w=state.a_w, a_s=state.a_s, s_a=complex(ev.amplitude))
        elif isinstance(ev, InjectWrite):
            state = TriWaveState(a_w=complex(ev.amplitude), a_s=state.a_s, s_a=state.s_a)
        elif isinstance(ev, ReadPulse):
            readout_efficiency = ev.efficiency
        elif isinstance(ev, Detect):
            if ev.channel == "write":
                value = intensity(state.a_w)
            else:
                value = intensity(state.s_a) * readout_efficiency
            records.append(DetectorRecord(channel=ev.channel, time_ns=ev.start_ns, intensity=value))
    return records


# ---------------------------------------------------------------------------
# scans

@dataclass(frozen=True)
class ScanSpec:
    """One swept event field: which event, which field, which values."""

    event_index: int
    field: str
    values: tuple[float, ...]
    name: str = ""
    unit: str = ""

    def __post_init__(self) -> None:
        # accept any iterable of numbers; keep exports repr-canonical
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    def label(self) -> str:
        return self.name or self.field


@dataclass(frozen=True)
class ScanResult:
    """Scan output: one record list per value, in scan order."""

    variable: str
    unit: str
    points: tuple[tuple[float, tuple[DetectorRecord, ...]], ...]

    def values(self) -> np.ndarray:
        return np.array([v for v, _ in self.points])

    def intensities(self, channel: str) -> np.ndarray:
        """Intensity of the first record on ``channel`` at every point."""
        out = []
        for _, records in self.points:
            match = [r.intensity for r in records if r.channel == channel]
            if not match:
                raise ValueError(f"no record on channel '{channel}'")
            out.append(match[0])
        return np.array(out)


def scan(
    schedule: PulseSchedule,
    spec: ScanSpec,
    jobs: int = 1,
    noise_sigma: float = 0.0,
    noise_seed: int | None = None,
) -> ScanResult:
    """Re-run ``schedule`` with one event field swept over ``spec.values``.

    All other parameters stay frozen; results come back in scan order and
    are identical for any ``jobs`` value.  With ``noise_sigma`` > 0,
    additive Gaussian intensity noise is drawn from a per-point stream
    seeded by ``(noise_seed, point_index)`` and negative intensities clip
    to zero.  An empty value grid yields an empty result.
    """
    schedule.validate()
    if not 0 <= spec.event_index < len(schedule.events):
        raise ValueError(f"event index {spec.event_index} out of range")
    target = schedule.events[spec.event_index]
    if not hasattr(target, spec.field):
        raise ValueError(f"event {type(target).__name__} has no field '{spec.field}'")
    if jobs < 1:
        raise ValueError("jobs must be >= 1")

    coupling = schedule.params.coupling()
    decoherence = schedule.params.decoherence()

    def run_point(item: tuple[int, float]) -> tuple[float, tuple[DetectorRecord, ...]]:
        index, value = item
        events = list(schedule.events)
        events[spec.event_index] = replace(target, **{spec.field: value})
        point_schedule = PulseSchedule(events=tuple(events), params=schedule.params)
        records = _execute(point_schedule, coupling, decoherence)
        if noise_sigma > 0.0:
            rng = np.random.default_rng((0 if noise_seed is None else noise_seed, index))
            noisy = []
            for r in records:
                bumped = r.intensity + noise_sigma * rng.standard_normal()
                noisy.append(replace(r, intensity=max(0.0, bumped)))
            records = noisy
        return value, tuple(records)

    items = list(enumerate(spec.values))
    if jobs == 1 or len(items) < 2:
        points = [run_point(item) for item in items]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            points = list(pool.map(run_point, items))
    return ScanResult(variable=spec.label(), unit=spec.unit, points=tuple(points))


# ---------------------------------------------------------------------------
# exports

def records_to_csv(records: SequenceABC[DetectorRecord]) -> str:
    buf = io.StringIO()
    buf.write(f"# atomlight csv schema: {CSV_SCHEMA_RECORDS}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["channel", "time_ns", "intensity"])
    for r in records:
        writer.writerow([r.channel, repr(r.time_ns), repr(r.intensity)])
    return buf.getvalue()


def scan_to_csv(result: ScanResult) -> str:
    buf = io.StringIO()
    buf.write(f"# atomlight csv schema: {CSV_SCHEMA_SCAN}\n")
    unit = f" ({result.unit})" if result.unit else ""
    buf.write(f"# scan variable: {result.variable}{unit}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["scan_value", "channel", "time_ns", "intensity"])
    for value, records in result.points:
        for r in records:
            writer.writerow([repr(value), r.channel, repr(r.time_ns), repr(r.intensity)])
    return buf.getvalue()


def records_to_json(records: SequenceABC[DetectorRecord]) -> dict:
    return {
        "schema_version": JSON_SCHEMA_VERSION,
        "kind": "records",
        "records": [
            {"channel": r.channel, "time_ns": r.time_ns, "intensity": r.intensity}
            for r in records
        ],
    }


def scan_to_json(result: ScanResult) -> dict:
    return {
        "schema_version": JSON_SCHEMA_VERSION,
        "kind": "scan",
        "variable": result.variable,
        "unit": result.unit,
        "points": [
            {
                "value": value,
                "records": [
                    {"channel": r.channel, "time_ns": r.time_ns, "intensity": r.intensity}
                    for r in records
                ],
            }
            for value, records in result.points
        ],
    }


def _csv_rows(text: str, expected_schema: str, expected_header: list[str]) -> list[list[str]]:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# atomlight csv schema: "):
        raise ValueError("not an atomlight CSV file (missing schema comment)")
    schema = lines[0].split(": ", 1)[1].strip()
    if schema != expected_schema:
        raise ValueError(f"expected schema {expected_schema}, found {schema}")
    body = [ln for ln in lines if ln and not ln.startswith("#")]
    rows = list(csv.reader(body))
    if not rows or rows[0] != expected_header:
        raise ValueError(f"expected header {expected_header}")
    return rows[1:]


def read_records_csv(text: str) -> list[DetectorRecord]:
    """Parse a records/1 CSV back into detector records."""
    rows = _csv_rows(text, CSV_SCHEMA_RECORDS, ["channel", "time_ns", "intensity"])
    return [
        DetectorRecord(channel=ch, time_ns=float(t), intensity=float(i)) for ch, t, i in rows
    ]


def read_scan_csv(text: str) -> ScanResult:
    """Parse a scan/1 CSV back into a ScanResult (variable name from the header)."""
    lines = text.splitlines()
    variable, unit = "scan", ""
    for ln in lines[:4]:
        if ln.startswith("# scan variable: "):
            label = ln[len("# scan variable: "):].strip()
            if label.endswith(")") and " (" in label:
                variable, _, rest = label.rpartition(" (")
                unit = rest[:-1]
            else:
                variable = label
    rows = _csv_rows(text, CSV_SCHEMA_SCAN, ["scan_value", "channel", "time_ns", "intensity"])
    points: list[tuple[float, list[DetectorRecord]]] = []
    for value_str, ch, t, i in rows:
        value = float(value_str)
        record = DetectorRecord(channel=ch, time_ns=float(t), intensity=float(i))
        if points and points[-1][0] == value:
            points[-1][1].append(record)
        else:
            points.append((value, [record]))
    return ScanResult(
        variable=variable,
        unit=unit,
        points=tuple((v, tuple(rs)) for v, rs in points),
    )
