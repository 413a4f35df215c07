use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::channels::{simulate, ChannelRealization};
use crate::config::{Links, PhaseDesign, Scenario, StarAlignment, SystemConfig};
use crate::error::{Error, Result};
use crate::metrics::{
    ec_analytical, op_analytical, OutageEstimate, OutageResult, RateEstimate, RateResult,
    SecondMoment,
};

/// Swept configuration field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    /// Split factor `η`; `N_C`, `N_S` are recomputed at every point.
    Eta,
    RhoDb,
    /// Total element count `N` (values must be positive integers).
    NTotal,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Eta => "eta",
            Axis::RhoDb => "rho_db",
            Axis::NTotal => "n_total",
        }
    }

    /// Writes `value` into `cfg`.
    pub fn apply(self, cfg: &mut SystemConfig, value: f64) -> Result<()> {
        match self {
            Axis::Eta => cfg.split_factor = value,
            Axis::RhoDb => cfg.rho_db = value,
            Axis::NTotal => {
                if !(value >= 1.0 && value.fract() == 0.0 && value < u32::MAX as f64) {
                    return Err(Error::Config(format!(
                        "n_total = {value} is not a positive integer"
                    )));
                }
                cfg.n_total = value as usize;
            }
        }
        Ok(())
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "eta" | "split_factor" => Ok(Axis::Eta),
            "rho_db" | "rho" | "snr" => Ok(Axis::RhoDb),
            "n_total" | "n" => Ok(Axis::NTotal),
            other => Err(format!(
                "unknown axis '{other}' (expected eta, rho_db or n_total)"
            )),
        }
    }
}

/// Quantity group reported by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    OpIndoor,
    OpOutdoor,
    EcIndoor,
    EcOutdoor,
    SumRate,
}

impl Metric {
    pub const ALL: [Metric; 5] = [
        Metric::OpIndoor,
        Metric::OpOutdoor,
        Metric::EcIndoor,
        Metric::EcOutdoor,
        Metric::SumRate,
    ];
    pub const OUTAGE: [Metric; 2] = [Metric::OpIndoor, Metric::OpOutdoor];
    pub const RATE: [Metric; 3] = [Metric::EcIndoor, Metric::EcOutdoor, Metric::SumRate];

    pub fn name(self) -> &'static str {
        match self {
            Metric::OpIndoor => "op_i",
            Metric::OpOutdoor => "op_o",
            Metric::EcIndoor => "ec_i",
            Metric::EcOutdoor => "ec_o",
            Metric::SumRate => "sum_rate",
        }
    }

    fn is_outage(self) -> bool {
        matches!(self, Metric::OpIndoor | Metric::OpOutdoor)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim().to_ascii_lowercase();
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                format!("unknown metric '{s}' (expected op_i, op_o, ec_i, ec_o or sum_rate)")
            })
    }
}

/// A one-dimensional parameter sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: Axis,
    /// Grid values, strictly increasing.
    pub values: Vec<f64>,
    pub base: SystemConfig,
    /// Monte-Carlo realizations per grid point.
    pub trials: usize,
    /// Every grid point uses trial seeds `seed, seed + 1, ...`.
    pub seed: u64,
    pub outputs: Vec<Metric>,
    /// Second-moment rule of the analytical rates.
    pub second_moment: SecondMoment,
}

impl SweepSpec {
    pub fn new(axis: Axis, values: Vec<f64>, base: SystemConfig) -> Self {
        Self {
            axis,
            values,
            base,
            trials: 100_000,
            seed: 0,
            outputs: Metric::ALL.to_vec(),
            second_moment: SecondMoment::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::Config("sweep has no grid values".into()));
        }
        if let Some(v) = self.values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Config(format!("sweep value {v} is not finite")));
        }
        if let Some(w) = self.values.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::Config(format!(
                "sweep values must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        Ok(())
    }

    fn wants(&self, pred: impl Fn(Metric) -> bool) -> bool {
        self.outputs.iter().any(|&m| pred(m))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutagePoint {
    pub analytical: OutageResult,
    pub empirical: OutageEstimate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    pub analytical: RateResult,
    pub empirical: RateEstimate,
}

/// One grid point. A quarantined row has `error` set and no values.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis_value: f64,
    pub n_c: usize,
    pub n_s: usize,
    pub outage: Option<OutagePoint>,
    pub rate: Option<RatePoint>,
    pub error: Option<String>,
}

impl SweepRow {
    pub fn is_quarantined(&self) -> bool {
        self.error.is_some()
    }

    /// Value of a CSV data column, `None` if the column is unknown or the
    /// row carries no value for it.
    pub fn get(&self, column: &str) -> Option<f64> {
        let op = self.outage.as_ref();
        let ec = self.rate.as_ref();
        Some(match column {
            "axis_value" => self.axis_value,
            "n_c" => self.n_c as f64,
            "n_s" => self.n_s as f64,
            "op_i_ana" => op?.analytical.op_indoor,
            "op_i_mc" => op?.empirical.indoor.value,
            "op_i_se" => op?.empirical.indoor.std_err,
            "op_o_ana" => op?.analytical.op_outdoor,
            "op_o_mc" => op?.empirical.outdoor.value,
            "op_o_se" => op?.empirical.outdoor.std_err,
            "ec_i_ana" => ec?.analytical.rate_indoor,
            "ec_i_mc" => ec?.empirical.indoor.value,
            "ec_i_se" => ec?.empirical.indoor.std_err,
            "ec_o_ana" => ec?.analytical.rate_outdoor,
            "ec_o_mc" => ec?.empirical.outdoor.value,
            "ec_o_se" => ec?.empirical.outdoor.std_err,
            "sum_rate_ana" => ec?.analytical.sum_rate,
            "sum_rate_mc" => ec?.empirical.sum.value,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axis: Axis,
    pub outputs: Vec<Metric>,
    /// One row per grid value, in grid order.
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// A data column over all rows (`NaN` where a row has no value).
    pub fn column(&self, name: &str) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.get(name).unwrap_or(f64::NAN))
            .collect()
    }

    pub fn row_at(&self, axis_value: f64) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.axis_value == axis_value)
    }
}

/// Fields that determine the channel realizations; points sharing them reuse
/// one Monte-Carlo batch.
#[derive(Debug, Clone, PartialEq)]
struct ChannelKey {
    n_c: usize,
    n_s: usize,
    xi: f64,
    d0: f64,
    links: Links,
    scenario: Scenario,
    phase_design: PhaseDesign,
    star_alignment: StarAlignment,
}

impl ChannelKey {
    fn of(cfg: &SystemConfig) -> Self {
        Self {
            n_c: cfg.n_c(),
            n_s: cfg.n_s(),
            xi: cfg.xi,
            d0: cfg.d0,
            links: cfg.links,
            scenario: cfg.scenario,
            phase_design: cfg.phase_design,
            star_alignment: cfg.star_alignment,
        }
    }
}

/// Runs the sweep point by point. A point whose configuration or fit fails is
/// quarantined and the sweep continues.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let want_op = spec.wants(Metric::is_outage);
    let want_ec = spec.wants(|m| !m.is_outage());
    let mut cache: Option<(ChannelKey, Arc<Vec<ChannelRealization>>)> = None;

    let mut rows = Vec::with_capacity(spec.values.len());
    for &value in &spec.values {
        let mut cfg = spec.base.clone();
        let applied = spec.axis.apply(&mut cfg, value);
        let mut row = SweepRow {
            axis_value: value,
            n_c: if applied.is_ok() { cfg.n_c() } else { 0 },
            n_s: if applied.is_ok() { cfg.n_s() } else { 0 },
            outage: None,
            rate: None,
            error: None,
        };
        let evaluated = applied.and_then(|()| {
            cfg.validate()?;
            if !(want_op || want_ec) {
                return Ok((None, None));
            }
            let key = ChannelKey::of(&cfg);
            let realizations = match &cache {
                Some((k, r)) if *k == key => Arc::clone(r),
                _ => {
                    let r = Arc::new(simulate(&cfg, spec.trials, spec.seed)?);
                    cache = Some((key, Arc::clone(&r)));
                    r
                }
            };
            let outage = want_op
                .then(|| -> Result<_> {
                    Ok(OutagePoint {
                        analytical: op_analytical(&cfg)?,
                        empirical: OutageEstimate::from_realizations(&realizations, &cfg),
                    })
                })
                .transpose()?;
            let rate = want_ec
                .then(|| -> Result<_> {
                    Ok(RatePoint {
                        analytical: ec_analytical(&cfg, spec.second_moment)?,
                        empirical: RateEstimate::from_realizations(&realizations, &cfg),
                    })
                })
                .transpose()?;
            Ok((outage, rate))
        });
        match evaluated {
            Ok((outage, rate)) => {
                row.outage = outage;
                row.rate = rate;
            }
            Err(e) => row.error = Some(e.to_string()),
        }
        rows.push(row);
    }
    Ok(SweepResult {
        axis: spec.axis,
        outputs: spec.outputs.clone(),
        rows,
    })
}

/// Parses a grid: comma-separated numbers and `start:stop:step` ranges
/// (stop inclusive up to rounding).
pub fn parse_values(text: &str) -> std::result::Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| format!("`{s}` is not a number"))
        };
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [v] => out.push(num(v)?),
            [a, b, c] => {
                let (start, stop, step) = (num(a)?, num(b)?, num(c)?);
                if !(step > 0.0 && step.is_finite()) || stop < start {
                    return Err(format!("bad range `{item}` (need start <= stop, step > 0)"));
                }
                let n = ((stop - start) / step + 1e-9).floor() as usize;
                // Round away accumulated binary error (0.1 * 3 = 0.30000000000000004).
                out.extend((0..=n).map(|i| {
                    let v = start + i as f64 * step;
                    (v * 1e12).round() / 1e12
                }));
            }
            _ => {
                return Err(format!(
                    "bad grid item `{item}` (number or start:stop:step)"
                ))
            }
        }
    }
    if out.is_empty() {
        return Err("empty grid".into());
    }
    Ok(out)
}

/// Single-surface baselines of an `η` sweep: `η = 0` keeps only the STAR-RIS,
/// `η = 1` only the conventional RIS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Baseline {
    pub eta: f64,
    pub sum_rate_ana: f64,
    pub sum_rate_mc: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Baselines {
    pub star_only: Baseline,
    pub conventional_only: Baseline,
    /// Interior point with the largest analytical sum rate.
    pub best_interior: Option<Baseline>,
}

impl Baselines {
    /// Whether some split with both surfaces beats both single-surface setups
    /// (analytical sum rate).
    pub fn double_ris_wins(&self) -> bool {
        self.best_interior.is_some_and(|b| {
            b.sum_rate_ana > self.star_only.sum_rate_ana
                && b.sum_rate_ana > self.conventional_only.sum_rate_ana
        })
    }
}

/// Baselines of an `η` sweep that includes both endpoints and reports the sum
/// rate; `None` otherwise.
pub fn baselines(result: &SweepResult) -> Option<Baselines> {
    if result.axis != Axis::Eta || !result.outputs.contains(&Metric::SumRate) {
        return None;
    }
    let point = |r: &SweepRow| -> Option<Baseline> {
        Some(Baseline {
            eta: r.axis_value,
            sum_rate_ana: r.get("sum_rate_ana")?,
            sum_rate_mc: r.get("sum_rate_mc")?,
        })
    };
    let star_only = point(result.row_at(0.0)?)?;
    let conventional_only = point(result.row_at(1.0)?)?;
    let best_interior = result
        .rows
        .iter()
        .filter(|r| r.axis_value > 0.0 && r.axis_value < 1.0)
        .filter_map(point)
        .max_by(|a, b| a.sum_rate_ana.total_cmp(&b.sum_rate_ana));
    Some(Baselines {
        star_only,
        conventional_only,
        best_interior,
    })
}
