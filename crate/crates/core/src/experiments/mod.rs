//! Config-driven sweeps, the results CSV, and the stored reference figures.

mod config;
mod csvio;
mod figures;
mod svg;
mod sweep;

pub use config::{
    receive_count, validate_config, validate_config_with, ChannelSpec, EngineChoice, EngineSpec,
    ExperimentConfig, NormalizedConfig, RxPoint, RxSpec, SignalSpec, TxSpec,
    DEFAULT_QUANTIZED_SAMPLES, DEFAULT_UNQUANTIZED_SAMPLES,
};
pub use csvio::{emit_csv, format_sig9, parse_csv, write_csv, CSV_HEADER};
pub use figures::{
    curve_series, emit_deviation_report, figure_curves, figure_reference, reference_points,
    reproduce_figure, tolerance_for, write_deviation_report, CurveSpec, Deviation, FigureId,
    FigureOptions, FigureRun, ReferencePoint, Tolerance, CAPACITY_TOL, DEVIATION_HEADER,
    OVERSAMPLING_SNR_DB, PLACEMENT_SENSITIVE_TOL, QUANTIZED_TOL, UNQUANTIZED_SIGMAS,
    UNQUANTIZED_TOL,
};
pub use svg::render_figure_svg;
pub use sweep::{evaluate_point, point_stream, run_sweep, PointFailure, ResultRow, SweepOutput};
