//! Analytical and Monte-Carlo evaluation of a downlink NOMA system assisted by
//! a conventional RIS near the base station and a STAR-RIS near the users,
//! under Nakagami-m fading.
//!
//! * [`channels`] draws fading realizations and forms the end-to-end gains.
//! * [`moments`] fits Gamma laws to the end-to-end amplitudes by moment matching.
//! * [`metrics`] turns either into outage probabilities and ergodic rates.
//! * [`experiments`] loads configurations, runs parameter sweeps and writes CSV.

pub mod channels;
pub mod config;
pub mod error;
pub mod experiments;
pub mod metrics;
pub mod moments;
pub mod special;
pub mod validation;

pub use channels::{realize_channels, simulate, simulate_many, ChannelRealization};
pub use config::{
    path_loss, threshold_from_rate, LinkId, LinkParams, Links, PathGains, PhaseDesign, Scenario,
    StarAlignment, SystemConfig,
};
pub use error::{Error, Result, User};
pub use metrics::{
    ec_analytical, ec_empirical, op_analytical, op_empirical, op_indoor_analytical,
    op_outdoor_analytical, Estimate, OutageEstimate, OutageResult, RateEstimate, RateResult,
    SecondMoment,
};
pub use moments::{
    fit_h, fit_h_indoor, fit_h_outdoor, gamma_cdf, gamma_pdf, CompositeMoments, GammaParams,
};
