//! Outage probability and ergodic rate of the two NOMA users.
//!
//! The indoor (strong) user first decodes the outdoor user's message and
//! cancels it; the outdoor (weak) user decodes its own message treating the
//! indoor signal as interference.

use crate::channels::{simulate, ChannelRealization};
use crate::config::SystemConfig;
use crate::error::{Error, Result, User};
use crate::moments::{fit_h, gamma_cdf, GammaParams};

/// `(γ_{O→I}, γ_I)`: SINR of the outdoor message at the indoor user, then
/// the interference-free SNR after SIC.
pub fn sinr_indoor(h_mag: f64, cfg: &SystemConfig) -> (f64, f64) {
    let g = cfg.rho_linear() * h_mag * h_mag;
    (
        g * cfg.lambda_o / (g * cfg.lambda_i + 1.0),
        g * cfg.lambda_i,
    )
}

/// `γ_O`, the outdoor user's SINR with the indoor signal as interference.
pub fn sinr_outdoor(h_mag: f64, cfg: &SystemConfig) -> f64 {
    let g = cfg.rho_linear() * h_mag * h_mag;
    g * cfg.lambda_o / (g * cfg.lambda_i + 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageResult {
    pub op_indoor: f64,
    pub op_outdoor: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateResult {
    pub rate_indoor: f64,
    pub rate_outdoor: f64,
    pub sum_rate: f64,
}

impl RateResult {
    fn new(rate_indoor: f64, rate_outdoor: f64) -> Self {
        Self {
            rate_indoor,
            rate_outdoor,
            sum_rate: rate_indoor + rate_outdoor,
        }
    }
}

/// A Monte-Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_err: f64,
}

impl Estimate {
    fn proportion(hits: usize, trials: usize) -> Self {
        let n = trials as f64;
        let p = hits as f64 / n;
        Self {
            value: p,
            std_err: (p * (1.0 - p) / n).sqrt(),
        }
    }

    fn sample_mean(values: impl Iterator<Item = f64>) -> Self {
        // Welford
        let (mut n, mut mean, mut m2) = (0usize, 0.0, 0.0);
        for v in values {
            n += 1;
            let delta = v - mean;
            mean += delta / n as f64;
            m2 += delta * (v - mean);
        }
        let std_err = if n > 1 {
            (m2 / (n - 1) as f64 / n as f64).sqrt()
        } else {
            0.0
        };
        Self {
            value: mean,
            std_err,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageEstimate {
    pub indoor: Estimate,
    pub outdoor: Estimate,
}

impl OutageEstimate {
    /// Fraction of realizations in outage under `cfg`'s SNR, power split and thresholds.
    pub fn from_realizations(realizations: &[ChannelRealization], cfg: &SystemConfig) -> Self {
        let (mut indoor, mut outdoor) = (0usize, 0usize);
        for r in realizations {
            let (o_at_i, snr_i) = sinr_indoor(r.h_i_mag, cfg);
            if o_at_i <= cfg.gamma_th_o || snr_i <= cfg.gamma_th_i {
                indoor += 1;
            }
            if sinr_outdoor(r.h_o_mag, cfg) < cfg.gamma_th_o {
                outdoor += 1;
            }
        }
        let n = realizations.len();
        Self {
            indoor: Estimate::proportion(indoor, n),
            outdoor: Estimate::proportion(outdoor, n),
        }
    }

    pub fn result(&self) -> OutageResult {
        OutageResult {
            op_indoor: self.indoor.value,
            op_outdoor: self.outdoor.value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEstimate {
    pub indoor: Estimate,
    pub outdoor: Estimate,
    pub sum: Estimate,
}

impl RateEstimate {
    pub fn from_realizations(realizations: &[ChannelRealization], cfg: &SystemConfig) -> Self {
        let rates = |r: &ChannelRealization| {
            let (_, snr_i) = sinr_indoor(r.h_i_mag, cfg);
            let ri = snr_i.ln_1p() / std::f64::consts::LN_2;
            let ro = sinr_outdoor(r.h_o_mag, cfg).ln_1p() / std::f64::consts::LN_2;
            (ri, ro)
        };
        Self {
            indoor: Estimate::sample_mean(realizations.iter().map(|r| rates(r).0)),
            outdoor: Estimate::sample_mean(realizations.iter().map(|r| rates(r).1)),
            sum: Estimate::sample_mean(realizations.iter().map(|r| {
                let (a, b) = rates(r);
                a + b
            })),
        }
    }

    pub fn result(&self) -> RateResult {
        RateResult {
            rate_indoor: self.indoor.value,
            rate_outdoor: self.outdoor.value,
            sum_rate: self.indoor.value + self.outdoor.value,
        }
    }
}

/// Fitted amplitude law, or `None` when the channel is identically zero.
fn amplitude_law(cfg: &SystemConfig, user: User) -> Result<Option<GammaParams>> {
    match fit_h(cfg, user) {
        Ok(p) => Ok(Some(p)),
        Err(Error::ZeroChannel { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Amplitude below which the outdoor message cannot be decoded, or `None`
/// when the power split makes decoding impossible (`λ_O ≤ λ_I γ̄_O`).
fn outdoor_message_threshold(cfg: &SystemConfig) -> Option<f64> {
    let margin = cfg.lambda_o - cfg.lambda_i * cfg.gamma_th_o;
    (margin > 0.0).then(|| (cfg.gamma_th_o / (cfg.rho_linear() * margin)).sqrt())
}

pub fn op_indoor_analytical(cfg: &SystemConfig) -> Result<f64> {
    cfg.validate()?;
    let Some(x_o) = outdoor_message_threshold(cfg) else {
        return Ok(1.0);
    };
    let x_i = (cfg.gamma_th_i / (cfg.lambda_i * cfg.rho_linear())).sqrt();
    let threshold = x_o.max(x_i);
    Ok(match amplitude_law(cfg, User::Indoor)? {
        Some(p) => gamma_cdf(&p, threshold),
        // |h| = 0 fails the strict decoding inequalities
        None => 1.0,
    })
}

pub fn op_outdoor_analytical(cfg: &SystemConfig) -> Result<f64> {
    cfg.validate()?;
    let Some(x_o) = outdoor_message_threshold(cfg) else {
        return Ok(1.0);
    };
    Ok(match amplitude_law(cfg, User::Outdoor)? {
        Some(p) => gamma_cdf(&p, x_o),
        None => {
            if x_o > 0.0 {
                1.0
            } else {
                0.0
            }
        }
    })
}

pub fn op_analytical(cfg: &SystemConfig) -> Result<OutageResult> {
    Ok(OutageResult {
        op_indoor: op_indoor_analytical(cfg)?,
        op_outdoor: op_outdoor_analytical(cfg)?,
    })
}

/// Monte-Carlo outage over `trials` realizations (trial `i` seeded with `seed + i`).
pub fn op_empirical(cfg: &SystemConfig, trials: usize, seed: u64) -> Result<OutageEstimate> {
    check_trials(trials)?;
    let realizations = simulate(cfg, trials, seed)?;
    Ok(OutageEstimate::from_realizations(&realizations, cfg))
}

/// How `E[|h|²]` is obtained from the Gamma fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SecondMoment {
    /// `(kθ)²`, the large-shape limit used by the closed-form rate expressions.
    #[default]
    LargeShape,
    /// `θ² Γ(k+2)/Γ(k)`.
    Exact,
}

/// Jensen-type ergodic rate predictions `log₂(1 + SINR(E[|h|²]))`.
pub fn ec_analytical(cfg: &SystemConfig, moment: SecondMoment) -> Result<RateResult> {
    cfg.validate()?;
    let power = |user| -> Result<f64> {
        Ok(match amplitude_law(cfg, user)? {
            None => 0.0,
            Some(p) => match moment {
                SecondMoment::LargeShape => p.second_moment_large_shape(),
                SecondMoment::Exact => p.second_moment(),
            },
        })
    };
    let rho = cfg.rho_linear();
    let rate_i = (rho * cfg.lambda_i * power(User::Indoor)?).ln_1p() / std::f64::consts::LN_2;
    let p_o = power(User::Outdoor)?;
    let sinr_o = rho * cfg.lambda_o * p_o / (rho * cfg.lambda_i * p_o + 1.0);
    let rate_o = sinr_o.ln_1p() / std::f64::consts::LN_2;
    Ok(RateResult::new(rate_i, rate_o))
}

/// Monte-Carlo ergodic rates with sample standard errors.
pub fn ec_empirical(cfg: &SystemConfig, trials: usize, seed: u64) -> Result<RateEstimate> {
    check_trials(trials)?;
    let realizations = simulate(cfg, trials, seed)?;
    Ok(RateEstimate::from_realizations(&realizations, cfg))
}

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::Domain {
            name: "trials",
            value: 0.0,
            constraint: "trials >= 1",
        });
    }
    Ok(())
}
