"""Coupled-RC interconnect crosstalk modeling and ring-oscillator
parasitic extraction.

The package models three parallel interconnect lines driven through
identical switching resistances, with each outer line capacitively
coupled to the center (victim) line. It provides:

* a capacitance algebra for the elementary plate/fringe/coupling
  components and the per-mode effective load (`capacitance`),
* closed-form Laplace transfer functions, step responses and threshold
  delays for the single-lump line model (`lumpmodel`),
* an independent state-space transient oracle, with optional line
  segmentation, for validating the closed forms (`simulator`),
* a ring-oscillator forward model and parasitic extraction from
  oscillation periods and supply currents (`oscillator`, `extraction`),
* file formats, reports, multi-die clock binning and a command-line
  interface (`files`, `reporting`, `cli`).
"""

from .capacitance import CapacitanceSet, CrosstalkMode, effective_capacitance
from .errors import (
    DegenerateDelayError,
    ExtractionDomainError,
    InstabilityError,
    InvalidSelectCodeError,
    MissingRecordError,
    NoCrossingError,
    NumericError,
    ParseError,
    PoleProximityError,
    RingRcError,
    ValidationError,
)
from .extraction import (
    ErrorReport,
    ExtractionResult,
    ParasiticSet,
    SpecTable,
    compare_to_spec,
    coupling_capacitance,
    extract_all,
    gate_capacitance,
    ground_capacitance,
    interconnect_capacitance,
    stage_capacitance,
    switching_resistance,
)
from .files import (
    ConfigFile,
    emit_report_json,
    parse_config,
    parse_measurements,
    parse_report,
    read_config,
    read_measurements,
    write_text_atomic,
)
from .lumpmodel import (
    DrivePattern,
    LineRC,
    LumpCoefficients,
    first_order_delay,
    lump_coefficients,
    pole_time_constants,
    step_response_victim,
    taylor_inversion_reference,
    threshold_delay,
    transfer_eval,
)
from .oscillator import (
    DeviceParams,
    Fanout,
    MeasurementRecord,
    RoConfig,
    SynthesisTruth,
    counter_period,
    mux_decode,
    osc_frequency,
    stage_delay_from_current,
    stage_delay_from_period,
    synthesize_measurements,
)
from .reporting import (
    BinningReport,
    DieBin,
    GeometryValidation,
    ValidationOutcome,
    emit_binning,
    emit_report,
    format_validation_text,
    monitor_binning,
    run_validation,
    validate_geometry,
    waveform_csv,
    waveform_svg,
)
from .simulator import (
    NetworkStateSpace,
    SimulationResult,
    Waveform,
    build_network,
    crossing_time,
    frequency_response,
    quiet_delay_ratio,
    simulate_step,
    victim_delay,
)

__version__ = "0.1.0"

__all__ = [
    "BinningReport",
    "CapacitanceSet",
    "ConfigFile",
    "CrosstalkMode",
    "DegenerateDelayError",
    "DeviceParams",
    "DieBin",
    "DrivePattern",
    "ErrorReport",
    "ExtractionDomainError",
    "ExtractionResult",
    "Fanout",
    "GeometryValidation",
    "InstabilityError",
    "InvalidSelectCodeError",
    "LineRC",
    "LumpCoefficients",
    "MeasurementRecord",
    "MissingRecordError",
    "NetworkStateSpace",
    "NoCrossingError",
    "NumericError",
    "ParasiticSet",
    "ParseError",
    "PoleProximityError",
    "RingRcError",
    "RoConfig",
    "SimulationResult",
    "SpecTable",
    "SynthesisTruth",
    "ValidationError",
    "ValidationOutcome",
    "Waveform",
    "build_network",
    "compare_to_spec",
    "counter_period",
    "coupling_capacitance",
    "crossing_time",
    "effective_capacitance",
    "emit_binning",
    "emit_report",
    "emit_report_json",
    "extract_all",
    "first_order_delay",
    "format_validation_text",
    "frequency_response",
    "gate_capacitance",
    "ground_capacitance",
    "interconnect_capacitance",
    "lump_coefficients",
    "monitor_binning",
    "mux_decode",
    "osc_frequency",
    "parse_config",
    "parse_measurements",
    "parse_report",
    "pole_time_constants",
    "quiet_delay_ratio",
    "read_config",
    "read_measurements",
    "run_validation",
    "simulate_step",
    "stage_capacitance",
    "stage_delay_from_current",
    "stage_delay_from_period",
    "step_response_victim",
    "switching_resistance",
    "synthesize_measurements",
    "taylor_inversion_reference",
    "threshold_delay",
    "transfer_eval",
    "validate_geometry",
    "victim_delay",
    "waveform_csv",
    "waveform_svg",
    "write_text_atomic",
]
