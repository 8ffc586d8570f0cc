"""Report generation: extraction tables, clock binning, model validation.

Three output styles are supported for the tabular reports. Text mirrors
the two-decimal femtofarad/ohm tables used in design reviews, CSV is for
spreadsheets, and JSON is canonical (sorted keys, full float precision)
so that emitting, parsing and re-emitting a report reproduces the bytes
exactly.
"""

from __future__ import annotations

import io
from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np

from .capacitance import CrosstalkMode
from .errors import ValidationError
from .extraction import ErrorReport, ExtractionResult, ParasiticSet
from .files import REPORT_FORMAT_TAG, emit_report_json
from .lumpmodel import DrivePattern, LineRC, step_response_victim
from .simulator import (
    SimulationResult,
    build_network,
    crossing_time,
    quiet_delay_ratio,
    simulate_step,
)

#: Largest tolerated oracle-vs-closed-form deviation, as a fraction of the rail.
WAVEFORM_TOLERANCE = 1e-4
#: Acceptable window for the distributed-over-lump quiet delay ratio.
RATIO_WINDOW = (0.35, 0.65)

_PARAM_ROWS = (
    ("c_total", "c_total", "fF", 1e15),
    ("c_gate", "c_gate", "fF", 1e15),
    ("c_int", "c_int", "fF", 1e15),
    ("c_c", "c_c", "fF", 1e15),
    ("r_sw", "r_sw", "ohm", 1.0),
)


def _ff(value: float) -> float:
    return value * 1e15


# ---------------------------------------------------------------------------
# extraction reports


def build_report_payload(
    results: Mapping[str, ExtractionResult],
    comparisons: Mapping[str, ErrorReport] | None = None,
    targets: Mapping[str, ParasiticSet] | None = None,
) -> dict:
    """Assemble the JSON-serializable payload for a set of extractions.

    Values are stored in SI units. Comparison blocks are included for
    geometries that have both an error report and a target set.
    """
    comparisons = comparisons or {}
    targets = targets or {}
    geometries = {}
    for geometry, result in results.items():
        block: dict = {
            "extraction": {
                "r_sw": result.r_sw,
                "c_s": result.c_s,
                "c_gate": result.c_gate,
                "c_int": result.c_int,
                "c_total": result.c_total,
                "c_ground": result.c_ground,
                "c_c": result.c_coupling,
                "provenance": {
                    name: list(labels)
                    for name, labels in result.provenance.items()
                },
            }
        }
        report = comparisons.get(geometry)
        if report is not None:
            target = targets.get(geometry)
            block["comparison"] = {
                "errors": dict(report.param_errors),
                "delay_product_error": report.delay_product_error,
                "targets": {} if target is None else {
                    name: getattr(target, name)
                    for name, *_ in _PARAM_ROWS
                    if getattr(target, name) is not None
                },
            }
        geometries[geometry] = block
    return {"format": REPORT_FORMAT_TAG, "geometries": geometries}


def format_extraction_text(
    results: Mapping[str, ExtractionResult],
    comparisons: Mapping[str, ErrorReport] | None = None,
    targets: Mapping[str, ParasiticSet] | None = None,
) -> str:
    comparisons = comparisons or {}
    targets = targets or {}
    out = io.StringIO()
    out.write("extraction report\n")
    for geometry in sorted(results):
        result = results[geometry]
        out.write(f"\ngeometry {geometry}\n")
        rows = (
            ("r_sw", result.r_sw, "ohm"),
            ("c_s", _ff(result.c_s), "fF"),
            ("c_gate", _ff(result.c_gate), "fF"),
            ("c_int", _ff(result.c_int), "fF"),
            ("c_total", _ff(result.c_total), "fF"),
            ("c_ground", _ff(result.c_ground), "fF"),
            ("c_c", _ff(result.c_coupling), "fF"),
        )
        for name, value, unit in rows:
            out.write(f"  {name:<9} {value:>10.2f} {unit}\n")
        report = comparisons.get(geometry)
        if report is None:
            continue
        target = targets.get(geometry)
        out.write(
            f"  {'comparison':<12} {'extracted':>10} {'target':>10}"
            f" {'error %':>8}\n"
        )
        for name, attr, unit, scale in _PARAM_ROWS:
            if name not in report.param_errors or target is None:
                continue
            target_value = getattr(target, attr)
            extracted = getattr(result.parasitics, attr)
            out.write(
                f"  {name + ' (' + unit + ')':<12} {extracted * scale:>10.2f}"
                f" {target_value * scale:>10.2f}"
                f" {report.param_errors[name] * 100.0:>8.2f}\n"
            )
        if report.delay_product_error is not None:
            out.write(
                f"  delay product (r_sw x c_total) error:"
                f" {report.delay_product_error * 100.0:.2f} %\n"
            )
    return out.getvalue()


def format_extraction_csv(
    results: Mapping[str, ExtractionResult],
    comparisons: Mapping[str, ErrorReport] | None = None,
    targets: Mapping[str, ParasiticSet] | None = None,
) -> str:
    comparisons = comparisons or {}
    targets = targets or {}
    out = io.StringIO()
    out.write("geometry,parameter,unit,extracted,target,error_pct\n")
    for geometry in sorted(results):
        result = results[geometry]
        report = comparisons.get(geometry)
        target = targets.get(geometry)
        rows = (
            ("r_sw", result.r_sw, "ohm", 1.0),
            ("c_s", result.c_s, "fF", 1e15),
            ("c_gate", result.c_gate, "fF", 1e15),
            ("c_int", result.c_int, "fF", 1e15),
            ("c_total", result.c_total, "fF", 1e15),
            ("c_ground", result.c_ground, "fF", 1e15),
            ("c_c", result.c_coupling, "fF", 1e15),
        )
        for name, value, unit, scale in rows:
            target_field = ""
            error_field = ""
            if report is not None and name in report.param_errors:
                error_field = f"{report.param_errors[name] * 100.0:.4f}"
                target_value = getattr(target, name, None)
                if target_value is not None:
                    target_field = f"{target_value * scale:.6g}"
            out.write(
                f"{geometry},{name},{unit},{value * scale:.6g},"
                f"{target_field},{error_field}\n"
            )
        if report is not None and report.delay_product_error is not None:
            out.write(
                f"{geometry},delay_product,,,"
                f",{report.delay_product_error * 100.0:.4f}\n"
            )
    return out.getvalue()


def emit_report(
    results: Mapping[str, ExtractionResult],
    comparisons: Mapping[str, ErrorReport] | None = None,
    targets: Mapping[str, ParasiticSet] | None = None,
    fmt: str = "text",
) -> str:
    """Render extraction results in the requested format."""
    if fmt == "text":
        return format_extraction_text(results, comparisons, targets)
    if fmt == "csv":
        return format_extraction_csv(results, comparisons, targets)
    if fmt == "json":
        return emit_report_json(build_report_payload(results, comparisons, targets))
    raise ValueError(f"unknown report format {fmt!r}; use text, csv or json")


# ---------------------------------------------------------------------------
# multi-die clock binning


@dataclass(frozen=True)
class DieBin:
    """Binning entry for one die.

    delay_proxy is the r_sw * c_total product; scale is the slowest
    die's proxy over this die's, so the slowest die sits at 1.0 and a
    die that could run 25 % faster shows scale 1.25. normalized_runtime
    is the reciprocal (workload runtime relative to the slowest die at
    its matched clock) and improvement is scale - 1.
    """

    die: str
    r_sw: float
    c_total: float
    delay_proxy: float
    scale: float
    normalized_runtime: float
    improvement: float


@dataclass(frozen=True)
class BinningReport:
    geometry: str
    bins: tuple[DieBin, ...]


def monitor_binning(results: Mapping[str, ExtractionResult]) -> BinningReport:
    """Derive per-die clock scaling from extracted parasitics.

    Args:
        results: extraction result per die label; all entries must be
            for the same geometry.

    Returns:
        BinningReport with dies ordered slowest first.

    Raises:
        ValidationError: if the mapping is empty or mixes geometries.
    """
    if not results:
        raise ValidationError("no dies to bin")
    geometries = {result.geometry for result in results.values()}
    if len(geometries) != 1:
        raise ValidationError(
            f"binning requires a single geometry, got {sorted(geometries)}"
        )
    proxies = {die: res.r_sw * res.c_total for die, res in results.items()}
    slowest = max(proxies.values())
    bins = []
    for die in sorted(results, key=lambda d: (-proxies[d], d)):
        result = results[die]
        scale = slowest / proxies[die]
        bins.append(
            DieBin(
                die=die,
                r_sw=result.r_sw,
                c_total=result.c_total,
                delay_proxy=proxies[die],
                scale=scale,
                normalized_runtime=1.0 / scale,
                improvement=scale - 1.0,
            )
        )
    return BinningReport(geometry=geometries.pop(), bins=tuple(bins))


def format_binning_text(report: BinningReport) -> str:
    out = io.StringIO()
    out.write(
        f"clock binning for geometry {report.geometry}"
        f" ({len(report.bins)} dies, slowest first)\n"
    )
    out.write(
        f"  {'die':<10} {'r_sw (ohm)':>11} {'c_total (fF)':>13}"
        f" {'proxy (ps)':>11} {'scale':>7} {'runtime':>8} {'gain %':>7}\n"
    )
    for entry in report.bins:
        out.write(
            f"  {entry.die:<10} {entry.r_sw:>11.2f} {_ff(entry.c_total):>13.2f}"
            f" {entry.delay_proxy * 1e12:>11.4f} {entry.scale:>7.3f}"
            f" {entry.normalized_runtime:>8.3f}"
            f" {entry.improvement * 100.0:>7.2f}\n"
        )
    return out.getvalue()


def format_binning_csv(report: BinningReport) -> str:
    out = io.StringIO()
    out.write(
        "die,geometry,r_sw_ohm,c_total_ff,delay_proxy_ps,"
        "scale,normalized_runtime,improvement_pct\n"
    )
    for entry in report.bins:
        out.write(
            f"{entry.die},{report.geometry},{entry.r_sw:.6g},"
            f"{_ff(entry.c_total):.6g},{entry.delay_proxy * 1e12:.6g},"
            f"{entry.scale:.6g},{entry.normalized_runtime:.6g},"
            f"{entry.improvement * 100.0:.6g}\n"
        )
    return out.getvalue()


def binning_payload(report: BinningReport) -> dict:
    return {
        "format": REPORT_FORMAT_TAG,
        "binning": {
            "geometry": report.geometry,
            "bins": [
                {
                    "die": entry.die,
                    "r_sw": entry.r_sw,
                    "c_total": entry.c_total,
                    "delay_proxy": entry.delay_proxy,
                    "scale": entry.scale,
                    "normalized_runtime": entry.normalized_runtime,
                    "improvement": entry.improvement,
                }
                for entry in report.bins
            ],
        },
    }


def emit_binning(report: BinningReport, fmt: str = "text") -> str:
    if fmt == "text":
        return format_binning_text(report)
    if fmt == "csv":
        return format_binning_csv(report)
    if fmt == "json":
        return emit_report_json(binning_payload(report))
    raise ValueError(f"unknown report format {fmt!r}; use text, csv or json")


# ---------------------------------------------------------------------------
# model validation


@dataclass(frozen=True)
class GeometryValidation:
    """Cross-check summary for one geometry's line model."""

    geometry: str
    max_dev_in_phase: float
    max_dev_quiet: float
    delay_in_phase: float
    delay_quiet: float
    delay_out_of_phase: float
    ordering_ok: bool
    segments: int
    distributed_ratio: float

    @property
    def waveforms_ok(self) -> bool:
        return (
            self.max_dev_in_phase <= WAVEFORM_TOLERANCE
            and self.max_dev_quiet <= WAVEFORM_TOLERANCE
        )

    @property
    def ratio_ok(self) -> bool:
        low, high = RATIO_WINDOW
        return low <= self.distributed_ratio <= high

    @property
    def passed(self) -> bool:
        return self.waveforms_ok and self.ordering_ok and self.ratio_ok


@dataclass(frozen=True)
class ValidationOutcome:
    geometries: tuple[GeometryValidation, ...]

    @property
    def passed(self) -> bool:
        return all(g.passed for g in self.geometries)


def _max_waveform_deviation(
    line: LineRC, mode: CrosstalkMode, result: SimulationResult
) -> float:
    waveform = result.victim
    analytic = step_response_victim(mode, line, waveform.times)
    return float(np.max(np.abs(waveform.values - analytic))) / line.v_dd


def validate_geometry(
    geometry: str,
    line: LineRC,
    segments: int,
    threshold_fraction: float = 0.5,
) -> GeometryValidation:
    """Run the oracle cross-checks for one line model.

    Compares the single-lump oracle against the closed-form victim
    responses (in-phase and quiet, where the closed forms are exact),
    checks that the simulated threshold delays order as
    in-phase <= quiet <= out-of-phase, and measures the distributed
    over lump quiet delay ratio at the configured segment count.
    """
    net = build_network(line, 1)
    delays = {}
    deviations = {}
    for mode in CrosstalkMode:
        result = simulate_step(net, DrivePattern.for_mode(mode, line.v_dd))
        delays[mode] = crossing_time(
            result.victim, threshold_fraction * line.v_dd
        )
        if mode in (CrosstalkMode.IN_PHASE, CrosstalkMode.QUIET):
            deviations[mode] = _max_waveform_deviation(line, mode, result)
    ordering_ok = (
        delays[CrosstalkMode.IN_PHASE]
        <= delays[CrosstalkMode.QUIET]
        <= delays[CrosstalkMode.OUT_OF_PHASE]
    )
    ratio = quiet_delay_ratio(line, segments, threshold_fraction)
    return GeometryValidation(
        geometry=geometry,
        max_dev_in_phase=deviations[CrosstalkMode.IN_PHASE],
        max_dev_quiet=deviations[CrosstalkMode.QUIET],
        delay_in_phase=delays[CrosstalkMode.IN_PHASE],
        delay_quiet=delays[CrosstalkMode.QUIET],
        delay_out_of_phase=delays[CrosstalkMode.OUT_OF_PHASE],
        ordering_ok=ordering_ok,
        segments=segments,
        distributed_ratio=ratio,
    )


def run_validation(
    lines: Mapping[str, LineRC],
    segments: int,
    threshold_fraction: float = 0.5,
) -> ValidationOutcome:
    if not lines:
        raise ValidationError("no line models configured; nothing to validate")
    return ValidationOutcome(
        geometries=tuple(
            validate_geometry(geometry, lines[geometry], segments, threshold_fraction)
            for geometry in sorted(lines)
        )
    )


def format_validation_text(outcome: ValidationOutcome) -> str:
    out = io.StringIO()
    out.write("model validation report\n")
    for entry in outcome.geometries:
        out.write(f"\ngeometry {entry.geometry}\n")
        out.write(
            f"  oracle vs closed form, in-phase: max deviation"
            f" {entry.max_dev_in_phase:.2e} of v_dd"
            f" [{'pass' if entry.max_dev_in_phase <= WAVEFORM_TOLERANCE else 'FAIL'}]\n"
        )
        out.write(
            f"  oracle vs closed form, quiet:    max deviation"
            f" {entry.max_dev_quiet:.2e} of v_dd"
            f" [{'pass' if entry.max_dev_quiet <= WAVEFORM_TOLERANCE else 'FAIL'}]\n"
        )
        out.write(
            f"  simulated threshold delays: in-phase {entry.delay_in_phase * 1e12:.4f} ps"
            f" <= quiet {entry.delay_quiet * 1e12:.4f} ps"
            f" <= out-of-phase {entry.delay_out_of_phase * 1e12:.4f} ps"
            f" [{'pass' if entry.ordering_ok else 'FAIL'}]\n"
        )
        low, high = RATIO_WINDOW
        out.write(
            f"  distributed({entry.segments}) / lump quiet delay:"
            f" {entry.distributed_ratio:.4f}"
            f" [expected {low:.2f}..{high:.2f};"
            f" {'pass' if entry.ratio_ok else 'FAIL'}]\n"
        )
    out.write(f"\noverall: {'pass' if outcome.passed else 'FAIL'}\n")
    return out.getvalue()


# ---------------------------------------------------------------------------
# waveform output


def waveform_csv(result: SimulationResult) -> str:
    """Render a simulation result as a four-column CSV (time plus the
    far-end voltage of each line)."""
    out = io.StringIO()
    out.write("time_s,line_a_v,line_b_v,line_c_v\n")
    times = result.line_a.times
    for i in range(len(times)):
        out.write(
            f"{times[i]:.9e},{result.line_a.values[i]:.9e},"
            f"{result.line_b.values[i]:.9e},{result.line_c.values[i]:.9e}\n"
        )
    return out.getvalue()


def waveform_svg(result: SimulationResult, title: str = "") -> str:
    """Render a simulation result as a self-contained SVG line plot."""
    width, height = 800.0, 420.0
    left, right, top, bottom = 70.0, 20.0, 30.0, 40.0
    plot_w = width - left - right
    plot_h = height - top - bottom

    times = result.line_a.times
    t_max = float(times[-1]) if len(times) > 1 else 1.0
    all_values = np.concatenate(
        [result.line_a.values, result.line_b.values, result.line_c.values]
    )
    v_min = min(0.0, float(np.min(all_values)))
    v_max = float(np.max(all_values))
    if v_max <= v_min:
        v_max = v_min + 1.0
    span = v_max - v_min

    def x(t: float) -> float:
        return left + plot_w * (t / t_max if t_max > 0 else 0.0)

    def y(v: float) -> float:
        return top + plot_h * (1.0 - (v - v_min) / span)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}"'
        f' height="{height:.0f}" viewBox="0 0 {width:.0f} {height:.0f}">',
        f'<rect width="{width:.0f}" height="{height:.0f}" fill="white"/>',
        f'<text x="{left:.1f}" y="18" font-size="13" font-family="monospace">'
        f"{title}</text>",
        f'<line x1="{left:.1f}" y1="{top + plot_h:.1f}" x2="{left + plot_w:.1f}"'
        f' y2="{top + plot_h:.1f}" stroke="black"/>',
        f'<line x1="{left:.1f}" y1="{top:.1f}" x2="{left:.1f}"'
        f' y2="{top + plot_h:.1f}" stroke="black"/>',
        f'<text x="{left:.1f}" y="{height - 8:.1f}" font-size="11"'
        f' font-family="monospace">0</text>',
        f'<text x="{left + plot_w - 80:.1f}" y="{height - 8:.1f}" font-size="11"'
        f' font-family="monospace">{t_max * 1e12:.3f} ps</text>',
        f'<text x="4" y="{y(v_max) + 4:.1f}" font-size="11"'
        f' font-family="monospace">{v_max:.2f} V</text>',
        f'<text x="4" y="{y(v_min):.1f}" font-size="11"'
        f' font-family="monospace">{v_min:.2f} V</text>',
    ]
    colors = {"line_a": "#6a6a6a", "line_b": "#c03030", "line_c": "#3060b0"}
    for idx, waveform in enumerate(
        (result.line_a, result.line_b, result.line_c)
    ):
        points = " ".join(
            f"{x(t):.2f},{y(v):.2f}"
            for t, v in zip(waveform.times, waveform.values)
        )
        color = colors[waveform.label]
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5"'
            f' points="{points}"/>'
        )
        parts.append(
            f'<text x="{left + plot_w - 120:.1f}" y="{top + 14 + 14 * idx:.1f}"'
            f' font-size="11" font-family="monospace" fill="{color}">'
            f"{waveform.label}</text>"
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
