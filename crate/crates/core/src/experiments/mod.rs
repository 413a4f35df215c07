//! Configuration files, parameter sweeps and CSV output.
//!
//! Every grid point of a sweep is evaluated with the same trial seeds, so a
//! sub-range of a sweep reproduces the corresponding rows of the full sweep
//! exactly and curves along the axis are free of seed-to-seed noise.

mod config_file;
mod csv;
mod sweep;

pub use config_file::{
    apply, load_config, parse_config, preset, render_config, PRESETS, REFERENCE_NORMALIZED_PRESET,
    REFERENCE_PRESET,
};
pub use csv::{csv_columns, emit_csv, format_float, write_csv, AXIS_COLUMNS, DATA_COLUMNS};
pub use sweep::{
    baselines, parse_values, run_sweep, Axis, Baseline, Baselines, Metric, OutagePoint, RatePoint,
    SweepResult, SweepRow, SweepSpec,
};
