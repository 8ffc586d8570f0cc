"""Command-line interface.

Subcommands:
    simulate  -- transient run of the three-line oracle for one geometry
    extract   -- parasitic extraction from a measurement file
    report    -- extraction plus comparison against configured targets
    validate  -- cross-check closed forms against the transient oracle
    binning   -- per-die clock scaling from multi-die measurements

Exit codes: 0 success, 2 parse/input errors, 3 validation errors,
4 numeric errors. Warnings go to stderr.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .capacitance import CrosstalkMode
from .errors import NumericError, ParseError, ValidationError
from .extraction import compare_to_spec, extract_all
from .files import ConfigFile, read_config, read_measurements, write_text_atomic
from .lumpmodel import DrivePattern
from .oscillator import MeasurementRecord
from .reporting import (
    emit_binning,
    emit_report,
    format_validation_text,
    monitor_binning,
    run_validation,
    waveform_csv,
    waveform_svg,
)
from .simulator import build_network, crossing_time, simulate_step, victim_delay

_MODE_NAMES = tuple(sorted(m.value for m in CrosstalkMode))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ringrc",
        description=(
            "Coupled-RC crosstalk modeling and ring-oscillator parasitic "
            "extraction."
        ),
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "simulate", help="run the transient oracle for one geometry and mode"
    )
    p.add_argument("--config", required=True, help="configuration file")
    p.add_argument("--geometry", required=True, help="geometry label")
    p.add_argument("--mode", required=True, choices=_MODE_NAMES)
    p.add_argument(
        "--segments",
        type=int,
        default=None,
        help="segments per line (default: configured value)",
    )
    p.add_argument(
        "--t-end-ps",
        type=float,
        default=None,
        help="simulation span in picoseconds (default: automatic)",
    )
    p.add_argument("--out", help="write the waveform CSV here")
    p.add_argument("--svg", help="write a waveform plot here")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("extract", help="extract parasitics from measurements")
    _add_measurement_args(p)
    p.set_defaults(func=_cmd_extract, with_comparison=False)

    p = sub.add_parser(
        "report", help="extract parasitics and compare against targets"
    )
    _add_measurement_args(p)
    p.set_defaults(func=_cmd_extract, with_comparison=True)

    p = sub.add_parser(
        "validate", help="cross-check the closed forms against the oracle"
    )
    p.add_argument("--config", required=True, help="configuration file")
    p.add_argument(
        "--geometry",
        action="append",
        default=None,
        help="restrict to this geometry (repeatable; default: all configured)",
    )
    p.add_argument("--out", help="write the report here instead of stdout")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser(
        "binning", help="per-die clock scaling from multi-die measurements"
    )
    p.add_argument("--config", required=True, help="configuration file")
    p.add_argument("--measurements", required=True, help="measurement file")
    p.add_argument("--geometry", required=True, help="geometry label")
    p.add_argument(
        "--format", choices=("text", "csv", "json"), default="text"
    )
    p.add_argument("--out", help="write the report here instead of stdout")
    p.set_defaults(func=_cmd_binning)

    return parser


def _add_measurement_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", required=True, help="configuration file")
    p.add_argument("--measurements", required=True, help="measurement file")
    p.add_argument(
        "--geometry",
        action="append",
        default=None,
        help="restrict to this geometry (repeatable; default: all present)",
    )
    p.add_argument("--die", default=None, help="restrict to this die label")
    p.add_argument(
        "--format", choices=("text", "csv", "json"), default="text"
    )
    p.add_argument("--out", help="write the report here instead of stdout")


def _load_config(path: str) -> ConfigFile:
    config = read_config(path)
    for warning in config.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return config


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        write_text_atomic(out_path, text)
        print(f"wrote {out_path}", file=sys.stderr)
    else:
        sys.stdout.write(text)


def _select_die(
    records: list[MeasurementRecord], die: str | None
) -> list[MeasurementRecord]:
    if die is not None:
        selected = [r for r in records if r.die == die]
        if not selected:
            raise ValidationError(f"no records for die {die!r}")
        return selected
    dies = sorted({r.die for r in records})
    if len(dies) > 1:
        raise ValidationError(
            f"measurements span multiple dies ({', '.join(d or '<blank>' for d in dies)}); "
            f"pass --die or use the binning command"
        )
    return records


def _cmd_simulate(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    line = config.line_for(args.geometry)
    mode = CrosstalkMode(args.mode)
    segments = config.segments if args.segments is None else args.segments
    if segments < 1:
        raise ValidationError(f"segments must be >= 1, got {segments}")
    net = build_network(line, segments)
    drive = DrivePattern.for_mode(mode, config.v_dd)
    if args.t_end_ps is not None:
        t_end = args.t_end_ps * 1e-12
        dt = None
    elif segments == 1:
        t_end = None
        dt = None
    else:
        # A distributed run at the default span would take forever; span
        # it off the single-lump crossing instead, which bounds the
        # distributed crossing from above.
        t_ref = victim_delay(line, mode, 1, config.threshold_fraction)
        t_end = 3.0 * max(t_ref, line.tau_ground)
        tau_fast, _ = net.time_constants()
        dt = tau_fast / 20.0
    result = simulate_step(net, drive, dt=dt, t_end=t_end)

    threshold = config.threshold_fraction * config.v_dd
    print(
        f"geometry {args.geometry} mode {mode.value} segments {segments}: "
        f"{len(result.victim.values)} samples, dt {result.victim.dt:.4e} s"
    )
    try:
        t_cross = crossing_time(result.victim, threshold)
        print(
            f"victim crossing of {threshold:.3f} V at {t_cross * 1e12:.4f} ps"
        )
    except NumericError:
        print(f"victim never reaches {threshold:.3f} V within the simulated span")
    if args.out:
        write_text_atomic(args.out, waveform_csv(result))
        print(f"wrote {args.out}", file=sys.stderr)
    if args.svg:
        title = f"{args.geometry} {mode.value} ({segments} segments)"
        write_text_atomic(args.svg, waveform_svg(result, title))
        print(f"wrote {args.svg}", file=sys.stderr)
    return 0


def _cmd_extract(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    records = _select_die(read_measurements(args.measurements), args.die)
    geometries = args.geometry or sorted({r.geometry for r in records})
    results = {}
    comparisons = {}
    targets = {}
    for geometry in geometries:
        subset = [r for r in records if r.geometry == geometry]
        if not subset:
            raise ValidationError(f"no measurements for geometry {geometry!r}")
        result = extract_all(
            subset, config.ro_config(geometry), rsw_mode=config.rsw_mode
        )
        results[geometry] = result
        if args.with_comparison:
            target = config.spec.for_geometry(geometry)
            targets[geometry] = target
            comparisons[geometry] = compare_to_spec(
                result, target, geometry=geometry
            )
    _emit(emit_report(results, comparisons, targets, fmt=args.format), args.out)
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    lines = config.lines
    if args.geometry:
        lines = {g: config.line_for(g) for g in args.geometry}
    outcome = run_validation(lines, config.segments, config.threshold_fraction)
    _emit(format_validation_text(outcome), args.out)
    return 0 if outcome.passed else 3


def _cmd_binning(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    records = [
        r
        for r in read_measurements(args.measurements)
        if r.geometry == args.geometry
    ]
    if not records:
        raise ValidationError(f"no measurements for geometry {args.geometry!r}")
    per_die = {}
    for die in sorted({r.die for r in records}):
        subset = [r for r in records if r.die == die]
        per_die[die or "<blank>"] = extract_all(
            subset, config.ro_config(args.geometry), rsw_mode=config.rsw_mode
        )
    _emit(emit_binning(monitor_binning(per_die), fmt=args.format), args.out)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except NumericError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    raise SystemExit(main())
