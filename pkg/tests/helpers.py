"""Shared builders for the test suite."""

import math

from atomlight.sequence import (
    Delay,
    Detect,
    PhaseShift,
    PrepareSpinWave,
    PulseSchedule,
    ReadPulse,
    SequenceParams,
    StarkProbeEvent,
    StokesPulse,
)

# default params give eta = 1e7, so theta == amp for a 50 ns pulse
PI_HALF = math.pi / 2


def hybrid_schedule(
    gamma=0.0,
    optical_loss=1.0,
    efficiency=1.0,
    phi_optical=0.0,
    phi_atomic=0.0,
    tau_ns=490.0,
    s0=1.0,
    stark_power=0.0,
    stark_detuning=2.5,
    kappa=0.06,
):
    """Two pi/2 pulses around a delay; the textbook interferometer."""
    events = []
    cursor = 0.0

    def add(ev, dur=0.0):
        nonlocal cursor
        events.append(ev)
        cursor += dur

    add(PrepareSpinWave(amplitude=s0, start_ns=cursor))
    add(StokesPulse(amplitude=PI_HALF, duration_ns=50.0, start_ns=cursor), 50.0)
    add(Delay(duration_ns=tau_ns, start_ns=cursor), tau_ns)
    add(PhaseShift(optical=phi_optical, atomic=phi_atomic, start_ns=cursor))
    if stark_power:
        add(
            StarkProbeEvent(
                power_mw=stark_power,
                detuning_ghz=stark_detuning,
                duration_ns=80.0,
                start_ns=cursor,
            ),
            80.0,
        )
    add(StokesPulse(amplitude=PI_HALF, duration_ns=50.0, start_ns=cursor), 50.0)
    add(Detect(channel="write", start_ns=cursor))
    add(ReadPulse(duration_ns=100.0, efficiency=efficiency, start_ns=cursor), 100.0)
    add(Detect(channel="spinwave", start_ns=cursor))
    params = SequenceParams(gamma=gamma, optical_loss=optical_loss, kappa=kappa)
    return PulseSchedule(events=tuple(events), params=params)


def channel_intensity(records, channel):
    return [r.intensity for r in records if r.channel == channel][0]


def phase_event_index(schedule):
    return next(i for i, ev in enumerate(schedule.events) if isinstance(ev, PhaseShift))
