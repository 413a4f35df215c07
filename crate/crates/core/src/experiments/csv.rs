use std::io::Write;
use std::path::Path;

use super::sweep::{Metric, SweepResult};
use crate::error::{Error, Result};

/// Data columns in output order, with the metric group each belongs to.
pub const DATA_COLUMNS: [(&str, Metric); 14] = [
    ("op_i_ana", Metric::OpIndoor),
    ("op_i_mc", Metric::OpIndoor),
    ("op_i_se", Metric::OpIndoor),
    ("op_o_ana", Metric::OpOutdoor),
    ("op_o_mc", Metric::OpOutdoor),
    ("op_o_se", Metric::OpOutdoor),
    ("ec_i_ana", Metric::EcIndoor),
    ("ec_i_mc", Metric::EcIndoor),
    ("ec_i_se", Metric::EcIndoor),
    ("ec_o_ana", Metric::EcOutdoor),
    ("ec_o_mc", Metric::EcOutdoor),
    ("ec_o_se", Metric::EcOutdoor),
    ("sum_rate_ana", Metric::SumRate),
    ("sum_rate_mc", Metric::SumRate),
];

pub const AXIS_COLUMNS: [&str; 4] = ["axis_name", "axis_value", "n_c", "n_s"];

/// Header for a result reporting `outputs`.
pub fn csv_columns(outputs: &[Metric]) -> Vec<&'static str> {
    AXIS_COLUMNS
        .into_iter()
        .chain(
            DATA_COLUMNS
                .iter()
                .filter(|(_, m)| outputs.contains(m))
                .map(|(c, _)| *c),
        )
        .collect()
}

/// Nine significant digits; `nan` for a missing value.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.8e}")
    }
}

/// Renders the result as CSV text (header, then one line per row).
pub fn emit_csv(result: &SweepResult) -> String {
    let mut buf = Vec::new();
    write_records(result, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("CSV fields are ASCII")
}

/// Writes [`emit_csv`] output to `path`.
pub fn write_csv(result: &SweepResult, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = std::fs::File::create(path).map_err(io_err)?;
    write_records(result, file).map_err(io_err)
}

fn write_records(result: &SweepResult, sink: impl Write) -> std::io::Result<()> {
    let columns = csv_columns(&result.outputs);
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(&columns)?;
    for row in &result.rows {
        let mut fields = vec![
            result.axis.name().to_string(),
            format_float(row.axis_value),
            row.n_c.to_string(),
            row.n_s.to_string(),
        ];
        fields.extend(
            columns[AXIS_COLUMNS.len()..]
                .iter()
                .map(|c| format_float(row.get(c).unwrap_or(f64::NAN))),
        );
        w.write_record(&fields)?;
    }
    w.flush()
}
