use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use risnoma_core::experiments::{
    self, baselines, emit_csv, parse_values, run_sweep, write_csv, Axis, Metric, SweepSpec,
};
use risnoma_core::validation::check_fits;
use risnoma_core::{
    fit_h_indoor, fit_h_outdoor, PhaseDesign, Scenario, SecondMoment, SystemConfig,
};

/// Double-RIS NOMA link simulator: analytical Gamma approximations next to
/// Monte-Carlo estimates.
#[derive(Parser, Debug)]
#[command(name = "risnoma", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Outage probability of both users along one axis.
    OpSweep(SweepArgs),
    /// Ergodic rates of both users and their sum along one axis.
    EcSweep {
        #[command(flatten)]
        sweep: SweepArgs,
        /// Add the single-surface endpoints η = 0 and η = 1 and summarize them on stderr.
        #[arg(long)]
        baselines: bool,
        /// Second moment of |h| used by the analytical rates.
        #[arg(long, default_value = "large-shape", value_parser = parse_second_moment)]
        second_moment: SecondMoment,
    },
    /// Print the fitted Gamma parameters of |h_I| and |h_O|.
    Fit(ConfigArgs),
    /// Compare the Gamma fits with simulation (KS distance, moment identities).
    Validate {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest KS distance reported as a pass.
        #[arg(long, default_value_t = 0.03)]
        ks_max: f64,
        /// Exit with status 2 when any check fails.
        #[arg(long)]
        strict: bool,
    },
}

#[derive(Args, Debug)]
struct ConfigArgs {
    /// Configuration file (`key = value` lines). Defaults to the bundled reference preset.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Bundled preset: reference or reference_normalized.
    #[arg(long)]
    preset: Option<String>,
    /// Override one configuration key, e.g. `--set link.t.alpha=2.8`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Scenario(s); several give one output per scenario.
    #[arg(long, value_delimiter = ',')]
    scenario: Vec<Scenario>,
    #[arg(long)]
    phase_design: Option<PhaseDesign>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// eta, rho_db or n_total.
    #[arg(long)]
    axis: Axis,
    /// Grid: comma-separated values and/or start:stop:step ranges.
    #[arg(long, allow_hyphen_values = true)]
    values: String,
    #[arg(long, default_value_t = 100_000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Reported metrics (op_i, op_o, ec_i, ec_o, sum_rate); defaults per subcommand.
    #[arg(long, value_delimiter = ',')]
    metrics: Option<Vec<Metric>>,
    /// Output CSV; with several scenarios `_A`, `_B`, ... is appended to the stem.
    /// Without it the CSV goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_second_moment(s: &str) -> Result<SecondMoment, String> {
    match s {
        "large-shape" => Ok(SecondMoment::LargeShape),
        "exact" => Ok(SecondMoment::Exact),
        other => Err(format!(
            "unknown second moment '{other}' (large-shape or exact)"
        )),
    }
}

type CliResult<T> = Result<T, String>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> CliResult<ExitCode> {
    match cli.command {
        Command::OpSweep(args) => sweep(
            args,
            Metric::OUTAGE.to_vec(),
            SecondMoment::default(),
            false,
        ),
        Command::EcSweep {
            sweep: args,
            baselines,
            second_moment,
        } => sweep(args, Metric::RATE.to_vec(), second_moment, baselines),
        Command::Fit(args) => fit(&args),
        Command::Validate {
            config,
            trials,
            seed,
            ks_max,
            strict,
        } => validate(&config, trials, seed, ks_max, strict),
    }
}

/// Base configuration followed by one variant per requested scenario.
fn configs(args: &ConfigArgs) -> CliResult<Vec<SystemConfig>> {
    let mut base = match (&args.config, &args.preset) {
        (Some(path), _) => experiments::load_config(path).map_err(|e| e.to_string())?,
        (None, name) => {
            let name = name.as_deref().unwrap_or("reference");
            let text = experiments::preset(name).ok_or_else(|| {
                let known: Vec<_> = experiments::PRESETS.iter().map(|(n, _)| *n).collect();
                format!("unknown preset '{name}' (available: {})", known.join(", "))
            })?;
            experiments::parse_config(text, name).map_err(|e| e.to_string())?
        }
    };
    for item in &args.overrides {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| format!("--set expects KEY=VALUE, got '{item}'"))?;
        experiments::apply(&mut base, key.trim(), value.trim())
            .map_err(|e| format!("--set: {e}"))?;
    }
    if let Some(design) = args.phase_design {
        base.phase_design = design;
    }
    let scenarios = if args.scenario.is_empty() {
        vec![base.scenario]
    } else {
        args.scenario.clone()
    };
    scenarios
        .into_iter()
        .map(|s| {
            let cfg = SystemConfig {
                scenario: s,
                ..base.clone()
            };
            cfg.validate().map_err(|e| e.to_string())?;
            Ok(cfg)
        })
        .collect()
}

fn scenario_path(out: &Path, scenario: Scenario) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match out.extension() {
        Some(ext) => format!("{stem}_{scenario}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{scenario}"),
    };
    out.with_file_name(name)
}

fn sweep(
    args: SweepArgs,
    default_metrics: Vec<Metric>,
    second_moment: SecondMoment,
    with_baselines: bool,
) -> CliResult<ExitCode> {
    let cfgs = configs(&args.config)?;
    let mut values = parse_values(&args.values).map_err(|e| format!("--values: {e}"))?;
    if with_baselines {
        if args.axis != Axis::Eta {
            return Err("--baselines needs --axis eta".into());
        }
        values.extend([0.0, 1.0]);
        values.sort_by(f64::total_cmp);
        values.dedup();
    }
    let metrics = args.metrics.clone().unwrap_or(default_metrics);
    if cfgs.len() > 1 && args.out.is_none() {
        return Err("several scenarios need --out".into());
    }

    for cfg in cfgs {
        let spec = SweepSpec {
            axis: args.axis,
            values: values.clone(),
            base: cfg.clone(),
            trials: args.trials,
            seed: args.seed,
            outputs: metrics.clone(),
            second_moment,
        };
        let result = run_sweep(&spec).map_err(|e| e.to_string())?;
        for row in result.rows.iter().filter(|r| r.is_quarantined()) {
            eprintln!(
                "warning: scenario {} {} = {}: {}",
                cfg.scenario,
                args.axis,
                row.axis_value,
                row.error.as_deref().unwrap_or_default()
            );
        }
        match &args.out {
            Some(out) if args.config.scenario.len() > 1 => {
                let path = scenario_path(out, cfg.scenario);
                write_csv(&result, &path).map_err(|e| e.to_string())?;
                eprintln!("wrote {}", path.display());
            }
            Some(out) => {
                write_csv(&result, out).map_err(|e| e.to_string())?;
                eprintln!("wrote {}", out.display());
            }
            None => print!("{}", emit_csv(&result)),
        }
        if with_baselines {
            match baselines(&result) {
                Some(b) => {
                    eprintln!(
                        "scenario {} baselines (sum rate, analytical / Monte-Carlo):",
                        cfg.scenario
                    );
                    eprintln!(
                        "  eta=0 (STAR-RIS only)         {:.4} / {:.4}",
                        b.star_only.sum_rate_ana, b.star_only.sum_rate_mc
                    );
                    eprintln!(
                        "  eta=1 (conventional RIS only) {:.4} / {:.4}",
                        b.conventional_only.sum_rate_ana, b.conventional_only.sum_rate_mc
                    );
                    if let Some(best) = b.best_interior {
                        eprintln!(
                            "  best interior eta={}        {:.4} / {:.4}",
                            best.eta, best.sum_rate_ana, best.sum_rate_mc
                        );
                    }
                    eprintln!(
                        "  double-RIS {} both single-RIS setups",
                        if b.double_ris_wins() {
                            "outperforms"
                        } else {
                            "does not outperform"
                        }
                    );
                }
                None => eprintln!(
                    "scenario {}: baselines need the sum_rate metric",
                    cfg.scenario
                ),
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn fit(args: &ConfigArgs) -> CliResult<ExitCode> {
    let cfgs = configs(args)?;
    println!("scenario,n_c,n_s,user,shape,scale,mean,variance");
    for cfg in cfgs {
        for (user, fitted) in [
            ("indoor", fit_h_indoor(&cfg)),
            ("outdoor", fit_h_outdoor(&cfg)),
        ] {
            match fitted {
                Ok(p) => println!(
                    "{},{},{},{user},{:.8e},{:.8e},{:.8e},{:.8e}",
                    cfg.scenario,
                    cfg.n_c(),
                    cfg.n_s(),
                    p.shape,
                    p.scale,
                    p.mean(),
                    p.variance()
                ),
                Err(risnoma_core::Error::ZeroChannel { .. }) => println!(
                    "{},{},{},{user},nan,nan,0,0",
                    cfg.scenario,
                    cfg.n_c(),
                    cfg.n_s()
                ),
                Err(e) => return Err(e.to_string()),
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn validate(
    args: &ConfigArgs,
    trials: usize,
    seed: u64,
    ks_max: f64,
    strict: bool,
) -> CliResult<ExitCode> {
    const IDENTITY_TOL: f64 = 1e-12;
    let cfgs = configs(args)?;
    let mut all_pass = true;
    println!(
        "{:<8} {:<8} {:>10} {:>8} {:>6} {:>12} {:>8}",
        "scenario", "user", "ks", "ks_max", "ks", "identity", "moments"
    );
    for cfg in cfgs {
        let checks = check_fits(&cfg, trials, seed).map_err(|e| e.to_string())?;
        for c in checks {
            let ks_ok = c.ks <= ks_max;
            let id_ok = c.moment_identity_error <= IDENTITY_TOL;
            all_pass &= ks_ok && id_ok;
            println!(
                "{:<8} {:<8} {:>10.5} {:>8} {:>6} {:>12.2e} {:>8}",
                cfg.scenario.to_string(),
                c.user.to_string(),
                c.ks,
                ks_max,
                if ks_ok { "PASS" } else { "FAIL" },
                c.moment_identity_error,
                if id_ok { "PASS" } else { "FAIL" }
            );
        }
    }
    Ok(if strict && !all_pass {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}
