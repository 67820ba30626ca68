"""Plain-text pulse-sequence language and its parser.

A ``.seq`` file is UTF-8 and line oriented.  ``#`` starts a comment, blank
lines are ignored.  An optional ``[params]`` block at the top sets the
global calibration (``key = value`` lines); every other line is one timed
event::

    <keyword> <key>=<value> ...

Keywords and their keys:

    prepare amp=<float>                          set the spin-wave amplitude
    inject  amp=<float>                          set the write-field amplitude
    stokes  amp=<float> dur=<time> [phase=<rad>] drive pulse (rotation)
    delay   dur=<time>                           free evolution (decay + loss)
    phase   [optical=<rad>] [atomic=<rad>]       phase rotations
    stark   power=<mW> detuning=<GHz> dur=<time> spin-wave phase probe
    read    dur=<time> [eff=<0..1>]              readout conversion efficiency
    detect  channel=write|spinwave               snapshot a detector record

Durations require a unit suffix (``ns``, ``us`` or ``ms``); bare numbers
are rejected.  By default an event starts when the previous one ends; an
optional ``at=<time>`` key pins the absolute start instead.  Events must
stay ordered by start time, and two stokes pulses may not overlap (other
overlaps are legal, e.g. a stark probe gated inside a delay).  Params
keys: ``g_eg``, ``g_em``, ``delta``, ``gamma``, ``optical_loss``,
``kappa``, ``fiber_index``.

The format is the canonical experiment description of the package and is
kept bit-stable (golden files under tests/).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, fields
from importlib import resources
from typing import Union

from atomlight.core import DecoherenceModel, RamanCoupling

__all__ = [
    "Delay",
    "Detect",
    "InjectWrite",
    "PhaseShift",
    "PrepareSpinWave",
    "PulseSchedule",
    "ReadPulse",
    "SequenceError",
    "SequenceParams",
    "StarkProbeEvent",
    "StokesPulse",
    "builtin_sequences",
    "fiber_delay_ns",
    "parse_sequence",
    "preset_names",
    "preset_text",
    "serialize_sequence",
]

#: ns per unit suffix
_TIME_UNITS = {"ns": 1.0, "us": 1e3, "ms": 1e6}

_NUMBER_RE = re.compile(r"^[-+]?(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?$")
_DURATION_RE = re.compile(r"^([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)(ns|us|ms)$")


class SequenceError(ValueError):
    """Located parse or validation failure.

    ``code`` is a stable machine-readable variant name; ``line`` and
    ``column`` are 1-based (line 0 for errors raised outside a parse).
    """

    def __init__(self, message: str, *, line: int = 0, column: int = 1, code: str = "invalid"):
        super().__init__(message)
        self.message = message
        self.line = line
        self.column = column
        self.code = code

    def __str__(self) -> str:
        if self.line:
            return f"line {self.line}, column {self.column}: {self.message}"
        return self.message


@dataclass(frozen=True, slots=True)
class SequenceParams:
    """Global calibration shared by every event in a schedule."""

    g_eg: float = 1e5
    g_em: float = 1e5
    delta: float = 1e3
    gamma: float = 0.0
    optical_loss: float = 1.0
    kappa: float = 0.06
    fiber_index: float = 1.47

    def coupling(self) -> RamanCoupling:
        return RamanCoupling(g_eg=self.g_eg, g_em=self.g_em, delta=self.delta)

    def decoherence(self) -> DecoherenceModel:
        return DecoherenceModel(gamma=self.gamma, optical_loss=self.optical_loss)


@dataclass(frozen=True, slots=True)
class PrepareSpinWave:
    amplitude: float
    start_ns: float = 0.0


@dataclass(frozen=True, slots=True)
class InjectWrite:
    amplitude: float
    start_ns: float = 0.0


@dataclass(frozen=True, slots=True)
class StokesPulse:
    amplitude: float
    duration_ns: float
    phase: float = 0.0
    start_ns: float = 0.0


@dataclass(frozen=True, slots=True)
class Delay:
    duration_ns: float
    start_ns: float = 0.0


@dataclass(frozen=True, slots=True)
class PhaseShift:
    optical: float = 0.0
    atomic: float = 0.0
    start_ns: float = 0.0


@dataclass(frozen=True, slots=True)
class StarkProbeEvent:
    power_mw: float
    detuning_ghz: float
    duration_ns: float
    start_ns: float = 0.0


@dataclass(frozen=True, slots=True)
class ReadPulse:
    duration_ns: float
    efficiency: float = 0.2
    start_ns: float = 0.0


@dataclass(frozen=True, slots=True)
class Detect:
    channel: str
    start_ns: float = 0.0


Event = Union[
    PrepareSpinWave,
    InjectWrite,
    StokesPulse,
    Delay,
    PhaseShift,
    StarkProbeEvent,
    ReadPulse,
    Detect,
]


def event_duration_ns(event: Event) -> float:
    return getattr(event, "duration_ns", 0.0)


@dataclass(frozen=True)
class PulseSchedule:
    """Validated, time-ordered sequence of events plus global parameters."""

    events: tuple[Event, ...]
    params: SequenceParams = SequenceParams()

    def validate(self) -> None:
        """Raise SequenceError when a schedule invariant is broken.

        Checks start-time ordering, stokes-pulse exclusivity, presence of
        a detect event, and the value ranges the executor relies on.
        """
        prev_start = None
        for i, ev in enumerate(self.events):
            if prev_start is not None and ev.start_ns < prev_start:
                raise SequenceError(
                    f"event {i} starts at {ev.start_ns} ns, before the previous event",
                    code="event-order",
                )
            prev_start = ev.start_ns
            if event_duration_ns(ev) < 0.0:
                raise SequenceError(f"event {i} has a negative duration", code="negative-duration")
            if isinstance(ev, ReadPulse) and not 0.0 <= ev.efficiency <= 1.0:
                raise SequenceError("read efficiency must be in [0, 1]", code="bad-value")
            if isinstance(ev, StarkProbeEvent) and ev.detuning_ghz == 0.0:
                raise SequenceError("stark detuning must be nonzero", code="bad-value")
            if isinstance(ev, Detect) and ev.channel not in ("write", "spinwave"):
                raise SequenceError(f"unknown detect channel '{ev.channel}'", code="bad-value")
        stokes = [ev for ev in self.events if isinstance(ev, StokesPulse)]
        for a, b in zip(stokes, stokes[1:]):
            if b.start_ns < a.start_ns + a.duration_ns:
                raise SequenceError(
                    "two stokes pulses overlap "
                    f"({a.start_ns}+{a.duration_ns} ns runs into {b.start_ns} ns)",
                    code="overlap",
                )
        if not any(isinstance(ev, Detect) for ev in self.events):
            raise SequenceError("schedule has no detect event", code="missing-detect")


# ---------------------------------------------------------------------------
# parsing

_PARAM_KEYS = ("g_eg", "g_em", "delta", "gamma", "optical_loss", "kappa", "fiber_index")

# keyword -> (event class, {key: kind}, required keys)
# kinds: float, float01, nonzero, duration, channel
_EVENT_GRAMMAR: dict[str, tuple[type, dict[str, str], frozenset[str]]] = {
    "prepare": (PrepareSpinWave, {"amp": "float"}, frozenset({"amp"})),
    "inject": (InjectWrite, {"amp": "float"}, frozenset({"amp"})),
    "stokes": (
        StokesPulse,
        {"amp": "float", "dur": "duration", "phase": "float"},
        frozenset({"amp", "dur"}),
    ),
    "delay": (Delay, {"dur": "duration"}, frozenset({"dur"})),
    "phase": (PhaseShift, {"optical": "float", "atomic": "float"}, frozenset()),
    "stark": (
        StarkProbeEvent,
        {"power": "float", "detuning": "nonzero", "dur": "duration"},
        frozenset({"power", "detuning", "dur"}),
    ),
    "read": (ReadPulse, {"dur": "duration", "eff": "float01"}, frozenset({"dur"})),
    "detect": (Detect, {"channel": "channel"}, frozenset({"channel"})),
}

_KEY_TO_FIELD = {
    "amp": "amplitude",
    "dur": "duration_ns",
    "phase": "phase",
    "optical": "optical",
    "atomic": "atomic",
    "power": "power_mw",
    "detuning": "detuning_ghz",
    "eff": "efficiency",
    "channel": "channel",
}

_PARAM_CHECKS = {
    "delta": "nonzero",
    "gamma": "nonneg",
    "optical_loss": "float01",
}


def _parse_float(token: str, value: str, line: int, column: int) -> float:
    if not _NUMBER_RE.match(value):
        raise SequenceError(
            f"expected a number for '{token}', got '{value}'",
            line=line,
            column=column,
            code="bad-value",
        )
    parsed = float(value)
    if not math.isfinite(parsed):
        raise SequenceError(
            f"value for '{token}' overflows", line=line, column=column, code="bad-value"
        )
    return parsed


def _parse_duration(token: str, value: str, line: int, column: int) -> float:
    m = _DURATION_RE.match(value)
    if not m:
        raise SequenceError(
            f"'{token}' needs a duration with unit suffix ns/us/ms, got '{value}'",
            line=line,
            column=column,
            code="bad-value",
        )
    ns = float(m.group(1)) * _TIME_UNITS[m.group(2)]
    if ns < 0.0:
        raise SequenceError(
            f"'{token}' must not be negative", line=line, column=column, code="negative-duration"
        )
    if not math.isfinite(ns):
        raise SequenceError(
            f"value for '{token}' overflows", line=line, column=column, code="bad-value"
        )
    return ns


def _check_kind(kind: str, token: str, value: float, line: int, column: int) -> None:
    if kind == "float01" and not 0.0 <= value <= 1.0:
        raise SequenceError(
            f"'{token}' must be in [0, 1]", line=line, column=column, code="bad-value"
        )
    if kind == "nonzero" and value == 0.0:
        raise SequenceError(
            f"'{token}' must be nonzero", line=line, column=column, code="bad-value"
        )
    if kind == "nonneg" and value < 0.0:
        raise SequenceError(
            f"'{token}' must be >= 0", line=line, column=column, code="bad-value"
        )


def _split_tokens(line: str) -> list[tuple[int, str]]:
    """Return (column, token) pairs, columns 1-based."""
    return [(m.start() + 1, m.group(0)) for m in re.finditer(r"\S+", line)]


def parse_sequence(text: str) -> PulseSchedule:
    """Parse sequence-language source into a validated PulseSchedule.

    Every failure raises :class:`SequenceError` carrying the 1-based line
    and column of the offending token and a stable ``code``.
    """
    params_values: dict[str, float] = {}
    events: list[Event] = []
    prev_start = 0.0
    cursor = 0.0
    last_stokes: StokesPulse | None = None
    in_params = False
    params_seen = False
    n_lines = 1

    for lineno, raw in enumerate(text.splitlines(), start=1):
        n_lines = lineno
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        tokens = _split_tokens(line)
        first_col, first_tok = tokens[0]

        if first_tok == "[params]":
            if params_seen:
                raise SequenceError(
                    "duplicate [params] block", line=lineno, column=first_col, code="misplaced-params"
                )
            if events:
                raise SequenceError(
                    "[params] must come before the first event",
                    line=lineno,
                    column=first_col,
                    code="misplaced-params",
                )
            in_params = True
            params_seen = True
            continue

        if in_params and first_tok.split("=", 1)[0] not in _EVENT_GRAMMAR:
            key, _, value = line.strip().partition("=")
            key = key.strip()
            value = value.strip()
            if key not in _PARAM_KEYS:
                raise SequenceError(
                    f"unknown parameter '{key}'", line=lineno, column=first_col, code="unknown-key"
                )
            if key in params_values:
                raise SequenceError(
                    f"duplicate parameter '{key}'",
                    line=lineno,
                    column=first_col,
                    code="duplicate-key",
                )
            vcol = line.index(value, line.index("=")) + 1 if value else len(line)
            parsed = _parse_float(key, value, lineno, vcol)
            _check_kind(_PARAM_CHECKS.get(key, "float"), key, parsed, lineno, vcol)
            params_values[key] = parsed
            continue

        in_params = False
        if first_tok not in _EVENT_GRAMMAR:
            raise SequenceError(
                f"unknown keyword '{first_tok}'", line=lineno, column=first_col, code="unknown-keyword"
            )
        cls, keymap, required = _EVENT_GRAMMAR[first_tok]

        kwargs: dict[str, object] = {}
        start_ns: float | None = None
        seen: set[str] = set()
        for col, tok in tokens[1:]:
            if "=" not in tok:
                raise SequenceError(
                    f"expected key=value, got '{tok}'", line=lineno, column=col, code="bad-value"
                )
            key, value = tok.split("=", 1)
            vcol = col + len(key) + 1
            if key == "at":
                if start_ns is not None:
                    raise SequenceError(
                        "duplicate key 'at'", line=lineno, column=col, code="duplicate-key"
                    )
                start_ns = _parse_duration("at", value, lineno, vcol)
                continue
            if key not in keymap:
                raise SequenceError(
                    f"unknown key '{key}' for '{first_tok}'",
                    line=lineno,
                    column=col,
                    code="unknown-key",
                )
            if key in seen:
                raise SequenceError(
                    f"duplicate key '{key}'", line=lineno, column=col, code="duplicate-key"
                )
            seen.add(key)
            kind = keymap[key]
            if kind == "duration":
                parsed_value: object = _parse_duration(key, value, lineno, vcol)
            elif kind == "channel":
                if value not in ("write", "spinwave"):
                    raise SequenceError(
                        f"channel must be 'write' or 'spinwave', got '{value}'",
                        line=lineno,
                        column=vcol,
                        code="bad-value",
                    )
                parsed_value = value
            else:
                number = _parse_float(key, value, lineno, vcol)
                _check_kind(kind, key, number, lineno, vcol)
                parsed_value = number
            kwargs[_KEY_TO_FIELD[key]] = parsed_value

        missing = required - seen
        if missing:
            raise SequenceError(
                f"'{first_tok}' is missing required key '{sorted(missing)[0]}'",
                line=lineno,
                column=first_col,
                code="missing-key",
            )

        if start_ns is None:
            start_ns = cursor
        elif events and start_ns < prev_start:
            raise SequenceError(
                f"at={start_ns}ns is before the previous event ({prev_start}ns)",
                line=lineno,
                column=first_col,
                code="event-order",
            )
        event = cls(start_ns=start_ns, **kwargs)

        if isinstance(event, StokesPulse):
            if last_stokes is not None and event.start_ns < last_stokes.start_ns + last_stokes.duration_ns:
                raise SequenceError(
                    "stokes pulse overlaps the previous stokes pulse",
                    line=lineno,
                    column=first_col,
                    code="overlap",
                )
            last_stokes = event

        events.append(event)
        prev_start = start_ns
        cursor = max(cursor, start_ns + event_duration_ns(event))

    if not any(isinstance(ev, Detect) for ev in events):
        raise SequenceError(
            "schedule has no detect event", line=n_lines, column=1, code="missing-detect"
        )

    return PulseSchedule(events=tuple(events), params=SequenceParams(**params_values))


# ---------------------------------------------------------------------------
# serialization

_SERIALIZE_KEYS: dict[type, tuple[tuple[str, str, str], ...]] = {
    PrepareSpinWave: (("amp", "amplitude", "float"),),
    InjectWrite: (("amp", "amplitude", "float"),),
    StokesPulse: (
        ("amp", "amplitude", "float"),
        ("dur", "duration_ns", "duration"),
        ("phase", "phase", "float"),
    ),
    Delay: (("dur", "duration_ns", "duration"),),
    PhaseShift: (("optical", "optical", "float"), ("atomic", "atomic", "float")),
    StarkProbeEvent: (
        ("power", "power_mw", "float"),
        ("detuning", "detuning_ghz", "float"),
        ("dur", "duration_ns", "duration"),
    ),
    ReadPulse: (("dur", "duration_ns", "duration"), ("eff", "efficiency", "float")),
    Detect: (("channel", "channel", "channel"),),
}

_KEYWORD_OF = {
    PrepareSpinWave: "prepare",
    InjectWrite: "inject",
    StokesPulse: "stokes",
    Delay: "delay",
    PhaseShift: "phase",
    StarkProbeEvent: "stark",
    ReadPulse: "read",
    Detect: "detect",
}


def _format_value(value: object, kind: str) -> str:
    if kind == "duration":
        return f"{value!r}ns"
    if kind == "channel":
        return str(value)
    return repr(value)


def serialize_sequence(schedule: PulseSchedule) -> str:
    """Render a schedule back to sequence-language source.

    The output reparses to a structurally equal schedule: floats are
    written with shortest round-trip precision and ``at=`` is emitted only
    where an event does not start at the running cursor.
    """
    out = ["[params]"]
    for f in fields(SequenceParams):
        out.append(f"{f.name} = {getattr(schedule.params, f.name)!r}")
    out.append("")

    cursor = 0.0
    for ev in schedule.events:
        parts = [_KEYWORD_OF[type(ev)]]
        for key, attr, kind in _SERIALIZE_KEYS[type(ev)]:
            parts.append(f"{key}={_format_value(getattr(ev, attr), kind)}")
        if ev.start_ns != cursor:
            parts.append(f"at={ev.start_ns!r}ns")
        out.append(" ".join(parts))
        cursor = max(cursor, ev.start_ns + event_duration_ns(ev))
    out.append("")
    return "\n".join(out)


# ---------------------------------------------------------------------------
# presets

_PRESET_NAMES = ("rabi_from_spinwave", "rabi_from_write", "hybrid_interferometer")


def preset_names() -> tuple[str, ...]:
    return _PRESET_NAMES


def preset_text(name: str) -> str:
    """Source text of a named built-in sequence."""
    if name not in _PRESET_NAMES:
        raise KeyError(f"unknown preset '{name}'")
    return resources.files("atomlight").joinpath(f"presets/{name}.seq").read_text("utf-8")


def builtin_sequences() -> dict[str, PulseSchedule]:
    """Parsed built-in schedules, keyed by preset name."""
    return {name: parse_sequence(preset_text(name)) for name in _PRESET_NAMES}


def fiber_delay_ns(length_m: float, group_index: float = 1.47) -> float:
    """Propagation delay of a fiber in ns."""
    if length_m < 0:
        raise ValueError("length must be >= 0")
    return group_index * length_m / 2.99792458e8 * 1e9
