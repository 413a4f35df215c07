//! Goodness-of-fit checks of the Gamma approximations against simulation.

use crate::channels::{simulate, ChannelRealization};
use crate::config::SystemConfig;
use crate::error::{Result, User};
use crate::moments::{channel_moments, fit_h, gamma_cdf, GammaParams};

/// Kolmogorov–Smirnov distance `sup_x |F_n(x) − F(x)|` of a sample against `cdf`.
///
/// `samples` is sorted in place.
pub fn ks_distance(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let below = i as f64 / n;
            let above = (i + 1) as f64 / n;
            (f - below).max(above - f)
        })
        .fold(0.0, f64::max)
}

/// How well one user's Gamma fit describes its simulated amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitCheck {
    pub user: User,
    pub params: GammaParams,
    /// KS distance between the fitted CDF and the empirical CDF.
    pub ks: f64,
    pub sample_mean: f64,
    /// Standard error of `sample_mean`.
    pub sample_mean_se: f64,
    /// Worst relative error of `kθ` and `kθ²` against the propagated moments.
    pub moment_identity_error: f64,
}

pub fn check_fit(
    cfg: &SystemConfig,
    user: User,
    realizations: &[ChannelRealization],
) -> Result<FitCheck> {
    let params = fit_h(cfg, user)?;
    let (mean, variance) = channel_moments(cfg, user)?;
    let mut samples: Vec<f64> = realizations
        .iter()
        .map(|r| match user {
            User::Indoor => r.h_i_mag,
            User::Outdoor => r.h_o_mag,
        })
        .collect();
    let n = samples.len() as f64;
    let sample_mean = samples.iter().sum::<f64>() / n;
    let sample_var = samples
        .iter()
        .map(|x| (x - sample_mean).powi(2))
        .sum::<f64>()
        / (n - 1.0).max(1.0);
    let ks = ks_distance(&mut samples, |x| gamma_cdf(&params, x));
    let moment_identity_error = ((params.mean() - mean) / mean)
        .abs()
        .max(((params.variance() - variance) / variance).abs());
    Ok(FitCheck {
        user,
        params,
        ks,
        sample_mean,
        sample_mean_se: (sample_var / n).sqrt(),
        moment_identity_error,
    })
}

/// Fit checks for both users from `trials` fresh realizations.
pub fn check_fits(cfg: &SystemConfig, trials: usize, seed: u64) -> Result<[FitCheck; 2]> {
    let realizations = simulate(cfg, trials, seed)?;
    Ok([
        check_fit(cfg, User::Indoor, &realizations)?,
        check_fit(cfg, User::Outdoor, &realizations)?,
    ])
}
