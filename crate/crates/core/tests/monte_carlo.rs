//! Analytical results against Monte-Carlo simulation, plus sweep/CSV plumbing.

use std::sync::OnceLock;

use risnoma_core::experiments::{
    emit_csv, load_config, render_config, run_sweep, write_csv, Axis, Metric, SweepResult,
    SweepSpec,
};
use risnoma_core::validation::{check_fit, ks_distance};
use risnoma_core::{
    fit_h_indoor, fit_h_outdoor, gamma_cdf, op_indoor_analytical, simulate, ChannelRealization,
    OutageEstimate, SystemConfig, User,
};

const TRIALS: usize = 100_000;
const SEED: u64 = 20_240_601;

/// 10^5 realizations of the reference configuration, shared by the tests below.
fn reference() -> &'static [ChannelRealization] {
    static CELL: OnceLock<Vec<ChannelRealization>> = OnceLock::new();
    CELL.get_or_init(|| simulate(&SystemConfig::reference(), TRIALS, SEED).unwrap())
}

fn mean_and_se(xs: impl Iterator<Item = f64>) -> (f64, f64) {
    let v: Vec<f64> = xs.collect();
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn indoor_sample_mean_within_three_standard_errors_of_fit() {
    let cfg = SystemConfig::reference();
    let fitted = fit_h_indoor(&cfg).unwrap().mean();
    let (mean, se) = mean_and_se(reference().iter().map(|r| r.h_i_mag));
    let z = (mean - fitted) / se;
    eprintln!("|h_I|: sample mean {mean:.6e} ± {se:.2e}, fitted {fitted:.6e}, z = {z:.2}");
    assert!(
        z.abs() <= 3.0,
        "fitted mean is {z:.2} standard errors from the sample mean"
    );
}

#[test]
fn outdoor_sample_mean_close_to_fit() {
    let cfg = SystemConfig::reference();
    let fitted = fit_h_outdoor(&cfg).unwrap().mean();
    let (mean, _) = mean_and_se(reference().iter().map(|r| r.h_o_mag));
    assert!(
        ((mean - fitted) / fitted).abs() < 5e-3,
        "{mean} vs {fitted}"
    );
}

#[test]
fn outdoor_ks_distance_at_most_0_02() {
    let cfg = SystemConfig::reference();
    let check = check_fit(&cfg, User::Outdoor, reference()).unwrap();
    eprintln!("KS(|h_O|) = {:.4}", check.ks);
    assert!(check.ks <= 0.02, "KS = {}", check.ks);
}

#[test]
fn indoor_ks_distance_within_distributional_bound() {
    let cfg = SystemConfig::reference();
    let params = fit_h_indoor(&cfg).unwrap();
    let mut xs: Vec<f64> = reference().iter().map(|r| r.h_i_mag).collect();
    let ks = ks_distance(&mut xs, |x| gamma_cdf(&params, x));
    assert!(ks <= 0.03, "KS = {ks}");
}

#[test]
fn indoor_outage_matches_monte_carlo_at_35_db() {
    let mut cfg = SystemConfig::reference();
    cfg.set_thresholds(0.5);
    let ana = op_indoor_analytical(&cfg).unwrap();
    let mc = OutageEstimate::from_realizations(reference(), &cfg).indoor;
    eprintln!(
        "op_I: analytical {ana:.4}, Monte-Carlo {:.4} ± {:.4}",
        mc.value, mc.std_err
    );
    assert!((ana - mc.value).abs() <= 0.02);
}

fn small_sweep(values: Vec<f64>) -> SweepSpec {
    let mut base = SystemConfig::reference();
    base.n_total = 40;
    base.set_thresholds(0.5);
    base.rho_db = 40.0;
    let mut spec = SweepSpec::new(Axis::Eta, values, base);
    spec.trials = 3_000;
    spec.seed = 5;
    spec
}

#[test]
fn sweep_sub_range_reproduces_slice_of_full_sweep() {
    let grid: Vec<f64> = (1..10).map(|i| i as f64 / 10.0).collect();
    let full = run_sweep(&small_sweep(grid.clone())).unwrap();
    let part = run_sweep(&small_sweep(grid[3..6].to_vec())).unwrap();
    assert_eq!(part.rows, full.rows[3..6].to_vec());
    let full_csv = emit_csv(&full);
    let part_csv = emit_csv(&part);
    let full_lines: Vec<&str> = full_csv.lines().collect();
    let part_lines: Vec<&str> = part_csv.lines().collect();
    assert_eq!(part_lines[0], full_lines[0]);
    assert_eq!(&part_lines[1..], &full_lines[4..7]);
}

#[test]
fn single_point_sweep_is_byte_identical_across_runs() {
    let mut base = SystemConfig::reference();
    base.n_total = 50;
    let mut spec = SweepSpec::new(Axis::RhoDb, vec![30.0], base);
    spec.trials = TRIALS;
    spec.seed = 99;
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    write_csv(&run_sweep(&spec).unwrap(), &a).unwrap();
    write_csv(&run_sweep(&spec).unwrap(), &b).unwrap();
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}

fn parse(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().unwrap().iter().map(String::from).collect();
    let rows = reader
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

#[test]
fn csv_round_trip_at_nine_significant_digits() {
    let mut spec = small_sweep(vec![0.0, 0.5, 1.0, 1.5]);
    spec.outputs = Metric::ALL.to_vec();
    let result: SweepResult = run_sweep(&spec).unwrap();
    let (header, rows) = parse(&emit_csv(&result));
    assert_eq!(rows.len(), result.rows.len());
    for (row, fields) in result.rows.iter().zip(&rows) {
        assert_eq!(fields[0], "eta");
        for (name, field) in header.iter().zip(fields).skip(1) {
            let parsed: f64 = field.parse().unwrap();
            match row.get(name) {
                Some(v) if !v.is_nan() => {
                    let rounded: f64 = format!("{v:.8e}").parse().unwrap();
                    assert_eq!(parsed, rounded, "{name}");
                    let scale = v.abs().max(f64::MIN_POSITIVE);
                    assert!(
                        (parsed - v).abs() / scale <= 5e-9,
                        "{name}: {parsed} vs {v}"
                    );
                }
                _ => assert!(parsed.is_nan(), "{name} = {field}"),
            }
        }
    }
    // The η = 1.5 point is quarantined.
    assert!(result.rows[3].is_quarantined());
    // η = 1 removes the STAR-RIS: the indoor user is always in outage.
    assert_eq!(result.rows[2].get("op_i_ana"), Some(1.0));
    assert_eq!(result.rows[2].get("op_i_mc"), Some(1.0));
}

#[test]
fn rows_hold_probabilities() {
    let result = run_sweep(&small_sweep(vec![0.1, 0.4, 0.7])).unwrap();
    for name in ["op_i_ana", "op_i_mc", "op_o_ana", "op_o_mc"] {
        for v in result.column(name) {
            assert!((0.0..=1.0).contains(&v), "{name} = {v}");
        }
    }
}

#[test]
fn config_written_to_disk_loads_back() {
    let mut cfg = SystemConfig::reference();
    cfg.links.t.alpha = 2.8;
    cfg.n_total = 120;
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig.preset");
    std::fs::write(&path, render_config(&cfg)).unwrap();
    assert_eq!(load_config(&path).unwrap(), cfg);
}
