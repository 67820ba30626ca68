"""Command-line front end: simulate, fit, figures, init.

Exit codes:

\b
  0  success
  2  usage error (bad flags, unknown model)
  3  input file not found
  4  sequence parse or validation error
  5  invalid or empty scan / grid specification
  6  input data does not match the documented CSV schema
  7  fit did not converge
  8  output I/O failure

Relative output paths resolve against $ATOMLIGHT_OUTPUT_DIR when it is
set.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from atomlight import analysis, figures
from atomlight.interferometer import (
    ScanSpec,
    read_records_csv,
    read_scan_csv,
    records_to_csv,
    records_to_json,
    run_schedule,
    scan,
    scan_to_csv,
    scan_to_json,
    trace_schedule,
)
from atomlight.sequence import (
    PhaseShift,
    SequenceError,
    StarkProbeEvent,
    StokesPulse,
    parse_sequence,
    preset_names,
    preset_text,
)

EXIT_USAGE = 2
EXIT_MISSING_INPUT = 3
EXIT_PARSE = 4
EXIT_SCAN = 5
EXIT_SCHEMA = 6
EXIT_NO_CONVERGENCE = 7
EXIT_IO = 8

#: friendly scan names -> (event class, field, unit)
_SCAN_NAMES = {
    "phase": (PhaseShift, "optical", "rad"),
    "atomic": (PhaseShift, "atomic", "rad"),
    "amp": (StokesPulse, "amplitude", ""),
    "dur": (StokesPulse, "duration_ns", "ns"),
    "power": (StarkProbeEvent, "power_mw", "mW"),
    "detuning": (StarkProbeEvent, "detuning_ghz", "GHz"),
}


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _resolve_output(path_str: str) -> Path:
    path = Path(path_str)
    base = os.environ.get("ATOMLIGHT_OUTPUT_DIR")
    if base and not path.is_absolute():
        return Path(base) / path
    return path


def _write_output(path: Path, content: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(content, encoding="utf-8")
    except OSError as err:
        _fail(EXIT_IO, f"cannot write {path}: {err}")


def _load_schedule(sequence_file: str):
    path = Path(sequence_file)
    if not path.is_file():
        _fail(EXIT_MISSING_INPUT, f"file not found: {sequence_file}")
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        _fail(EXIT_MISSING_INPUT, f"cannot read {sequence_file}: {err}")
    try:
        return parse_sequence(text)
    except SequenceError as err:
        _fail(EXIT_PARSE, f"{sequence_file}: {err}")


def _parse_scan_option(value: str, schedule) -> ScanSpec:
    name, eq, grid = value.partition("=")
    if not eq:
        raise ValueError("scan must look like NAME=START:STOP:COUNT")
    parts = grid.split(":")
    if len(parts) != 3:
        raise ValueError("scan grid must be START:STOP:COUNT")
    try:
        start, stop = float(parts[0]), float(parts[1])
        count = int(parts[2])
    except ValueError:
        raise ValueError(f"bad scan grid '{grid}'") from None
    if count < 0:
        raise ValueError("scan COUNT must be >= 0")
    values = tuple(start + k * (stop - start) / count for k in range(count)) if count else ()

    if name.startswith("e") and "." in name:
        index_str, _, field = name[1:].partition(".")
        try:
            index = int(index_str)
        except ValueError:
            raise ValueError(f"bad event reference '{name}'") from None
        return ScanSpec(index, field, values, name=name)
    if name not in _SCAN_NAMES:
        known = ", ".join(sorted(_SCAN_NAMES))
        raise ValueError(f"unknown scan name '{name}' (known: {known}, or eN.field)")
    cls, fieldname, unit = _SCAN_NAMES[name]
    for index, ev in enumerate(schedule.events):
        if isinstance(ev, cls):
            return ScanSpec(index, fieldname, values, name=f"{name}", unit=unit)
    raise ValueError(f"schedule has no {cls.__name__} event to scan")


@click.group(help=__doc__)
def main() -> None:
    pass


@main.command()
@click.argument("sequence_file")
@click.option("--scan", "scan_option", default=None, metavar="NAME=START:STOP:COUNT",
              help="Sweep one event field (phase, atomic, amp, dur, power, detuning, or eN.field)."
                   " START:STOP:COUNT yields COUNT points with STOP excluded.")
@click.option("--out", "out_path", default=None, metavar="PATH",
              help="Output file (default: stdout).")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default=None,
              help="Output format (default: from the file extension, else csv).")
@click.option("--trace", "trace_samples", type=int, default=None, metavar="N",
              help="Time-resolve stokes pulses with the coupled-mode integrator, N samples per pulse.")
@click.option("--noise", "noise_sigma", type=float, default=0.0,
              help="Additive Gaussian intensity noise sigma (scans only; default off).")
@click.option("--seed", "noise_seed", type=int, default=0, help="Noise seed (default 0).")
@click.option("--jobs", type=int, default=1, help="Parallel scan evaluation (same output as --jobs 1).")
def simulate(sequence_file, scan_option, out_path, fmt, trace_samples, noise_sigma, noise_seed, jobs):
    """Run or scan a sequence file and write detector records."""
    schedule = _load_schedule(sequence_file)
    if scan_option is not None and trace_samples is not None:
        raise click.UsageError("--scan and --trace cannot be combined")
    if fmt is None:
        fmt = "json" if (out_path or "").endswith(".json") else "csv"

    try:
        if scan_option is not None:
            try:
                spec = _parse_scan_option(scan_option, schedule)
            except ValueError as err:
                _fail(EXIT_SCAN, str(err))
            try:
                result = scan(schedule, spec, jobs=jobs, noise_sigma=noise_sigma, noise_seed=noise_seed)
            except ValueError as err:
                _fail(EXIT_SCAN, str(err))
            content = scan_to_csv(result) if fmt == "csv" else json.dumps(scan_to_json(result), indent=2) + "\n"
        else:
            if trace_samples is not None:
                try:
                    records = trace_schedule(schedule, samples_per_pulse=trace_samples)
                except ValueError as err:
                    _fail(EXIT_SCAN, str(err))
            else:
                records = run_schedule(schedule)
            content = (
                records_to_csv(records)
                if fmt == "csv"
                else json.dumps(records_to_json(records), indent=2) + "\n"
            )
    except SequenceError as err:
        _fail(EXIT_PARSE, str(err))

    if out_path is None:
        click.echo(content, nl=False)
    else:
        _write_output(_resolve_output(out_path), content)


@main.command()
@click.argument("data_file")
@click.option("--model", type=click.Choice(["rabi", "fringe", "linear"]), required=True,
              help="rabi: damped oscillation vs time; fringe: cosine vs phase; linear: straight line.")
@click.option("--channel", type=click.Choice(["write", "spinwave"]), default="write",
              help="Detector channel to fit (default write).")
@click.option("--out", "out_path", default=None, metavar="PATH", help="Write JSON here instead of stdout.")
def fit(data_file, model, channel, out_path):
    """Fit a simulated dataset and print the result as JSON.

    Accepts the CSV files written by `simulate`: records/1 (x = time_ns)
    or scan/1 (x = scan value; ns for dur scans, rad for phase scans).
    For the rabi model the x axis is interpreted in ns.
    """
    path = Path(data_file)
    if not path.is_file():
        _fail(EXIT_MISSING_INPUT, f"file not found: {data_file}")
    text = path.read_text(encoding="utf-8")

    try:
        if text.startswith("# atomlight csv schema: records/1"):
            records = [r for r in read_records_csv(text) if r.channel == channel]
            if not records:
                raise ValueError(f"no records on channel '{channel}'")
            x = [r.time_ns for r in records]
            y = [r.intensity for r in records]
        elif text.startswith("# atomlight csv schema: scan/1"):
            result = read_scan_csv(text)
            x = list(result.values())
            y = list(result.intensities(channel))
        else:
            raise ValueError("unrecognized input schema (expected records/1 or scan/1)")
    except ValueError as err:
        _fail(EXIT_SCHEMA, str(err))

    if model == "rabi":
        fit_result = analysis.fit_damped_rabi([t * 1e-9 for t in x], y)
    elif model == "fringe":
        fit_result = analysis.fit_cosine_fringe(x, y)
    else:
        fit_result = analysis.fit_linear(x, y)

    payload = {"schema_version": 1, "model": model, **fit_result.to_dict()}
    content = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out_path is None:
        click.echo(content, nl=False)
    else:
        _write_output(_resolve_output(out_path), content)
    if not fit_result.converged:
        click.echo(f"error: fit did not converge: {fit_result.message or 'no convergence'}", err=True)
        sys.exit(EXIT_NO_CONVERGENCE)


@main.command("figures")
@click.argument("output_dir", required=False, default=None)
@click.option("--points", type=int, default=100, help="Fringe scan grid size (default 100).")
@click.option("--trace-points", type=int, default=256, help="Samples per time trace (default 256).")
def figures_cmd(output_dir, points, trace_points):
    """Regenerate every figure dataset plus summary.json."""
    if output_dir is None:
        # the env value is already the destination, not a base to resolve against
        outdir = Path(os.environ.get("ATOMLIGHT_OUTPUT_DIR", "figures"))
    else:
        outdir = _resolve_output(output_dir)
    try:
        summary = figures.generate_figures(outdir, points=points, trace_points=trace_points)
    except (ValueError, RuntimeError) as err:
        _fail(EXIT_SCAN, str(err))
    except OSError as err:
        _fail(EXIT_IO, str(err))
    click.echo(json.dumps(summary, indent=2, sort_keys=True))


@main.command()
@click.argument("directory", required=False, default="presets")
@click.option("--force", is_flag=True, help="Overwrite existing preset files.")
def init(directory, force):
    """Write the built-in .seq presets into a directory for editing."""
    outdir = _resolve_output(directory)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
    except OSError as err:
        _fail(EXIT_IO, f"cannot create {outdir}: {err}")
    for name in preset_names():
        target = outdir / f"{name}.seq"
        if target.exists() and not force:
            _fail(EXIT_IO, f"{target} already exists (use --force to overwrite)")
        _write_output(target, preset_text(name))
    click.echo(f"wrote {len(preset_names())} presets to {outdir}")


if __name__ == "__main__":
    main()
