//! Gamma approximations of the end-to-end channel amplitudes.
//!
//! Both amplitudes are sums of many non-negative terms once the surfaces are
//! phase-aligned, so each is replaced by the Gamma law with the same first two
//! moments. The moments are propagated as follows:
//!
//! * the incident composite `x_n` is treated as circularly-symmetric Gaussian
//!   with power `P_x = β_t Ω_t + β_f β_D N_C Ω_f Ω_D`, so `|x_n|` is Rayleigh;
//! * `Y = Σ_c |f_c||g_c|` and `Z_i = ξ Σ_n |x_n||u_i,n|` are sums of independent
//!   products (correlation across `n` through the shared `f` is ignored);
//! * `|h_O|` combines the two scaled terms by adding means and variances.
//!
//! Shape and scale then follow from `k = mean²/var`, `θ = var/mean`, which keeps
//! `kθ` and `kθ²` equal to the propagated moments.

use std::f64::consts::PI;

use crate::config::{PathGains, SystemConfig};
use crate::error::{Error, Result, User};
use crate::special::{self, ln_gamma_unchecked, nakagami_moments_unchecked};

/// Shape/scale pair of a Gamma distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaParams {
    pub shape: f64,
    pub scale: f64,
}

impl GammaParams {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        if !(shape > 0.0 && shape.is_finite()) {
            return Err(Error::Domain {
                name: "shape",
                value: shape,
                constraint: "k > 0",
            });
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Domain {
                name: "scale",
                value: scale,
                constraint: "theta > 0",
            });
        }
        Ok(Self { shape, scale })
    }

    /// Moment-matched Gamma law.
    pub fn from_mean_variance(mean: f64, variance: f64) -> Result<Self> {
        Self::new(mean * mean / variance, variance / mean)
    }

    pub fn mean(&self) -> f64 {
        self.shape * self.scale
    }

    pub fn variance(&self) -> f64 {
        self.shape * self.scale * self.scale
    }

    /// `E[X²] = θ² Γ(k+2)/Γ(k)`.
    pub fn second_moment(&self) -> f64 {
        let ratio = (ln_gamma_unchecked(self.shape + 2.0) - ln_gamma_unchecked(self.shape)).exp();
        self.scale * self.scale * ratio
    }

    /// Large-shape approximation of the second moment, `(kθ)²`.
    pub fn second_moment_large_shape(&self) -> f64 {
        self.mean() * self.mean()
    }
}

/// Intermediate moments of the composite channel terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompositeMoments {
    /// Mean of `|x_n|`.
    pub mu_x: f64,
    /// Variance of `|x_n|`.
    pub sigma2_x: f64,
    /// Mean of `Y = Σ_c |f_c||g_c|`.
    pub mu_y: f64,
    pub sigma2_y: f64,
    /// Mean of `Z_i = ξ Σ_n |x_n||u_i,n|` for the requested user.
    pub mu_z: f64,
    pub sigma2_z: f64,
}

/// Moments of the terms building `|h_i|` for `user`.
pub fn composite_moments(cfg: &SystemConfig, user: User) -> Result<CompositeMoments> {
    let gains = cfg.path_gains()?;
    Ok(composite_moments_with(cfg, &gains, user))
}

fn composite_moments_with(cfg: &SystemConfig, gains: &PathGains, user: User) -> CompositeMoments {
    let links = &cfg.links;
    let (n_c, n_s) = (cfg.n_c() as f64, cfg.n_s() as f64);
    let power_x = gains.t * links.t.omega + gains.f * gains.d * n_c * links.f.omega * links.d.omega;
    let mu_x = (PI * power_x / 4.0).sqrt();
    let sigma2_x = (4.0 - PI) * power_x / 4.0;

    let f = nakagami_moments_unchecked(links.f.m, links.f.omega);
    let g = nakagami_moments_unchecked(links.g.m, links.g.omega);
    let mu_y = n_c * f.mean * g.mean;
    let sigma2_y = n_c * (links.f.omega * links.g.omega - (f.mean * g.mean).powi(2));

    let u_link = match user {
        User::Indoor => &links.u_i,
        User::Outdoor => &links.u_o,
    };
    let u = nakagami_moments_unchecked(u_link.m, u_link.omega);
    let mu_z = cfg.xi * n_s * mu_x * u.mean;
    let sigma2_z = cfg.xi * cfg.xi * n_s * (u_link.omega * power_x - u.mean * u.mean * mu_x * mu_x);

    CompositeMoments {
        mu_x,
        sigma2_x,
        mu_y,
        sigma2_y,
        mu_z,
        sigma2_z,
    }
}

/// Analytically propagated `(mean, variance)` of `|h_i|`.
pub fn channel_moments(cfg: &SystemConfig, user: User) -> Result<(f64, f64)> {
    cfg.validate()?;
    let gains = cfg.path_gains()?;
    let cm = composite_moments_with(cfg, &gains, user);
    Ok(match user {
        User::Indoor => (gains.u_i.sqrt() * cm.mu_z, gains.u_i * cm.sigma2_z),
        User::Outdoor => {
            let beta_fg = gains.f * gains.g;
            (
                gains.u_o.sqrt() * cm.mu_z + beta_fg.sqrt() * cm.mu_y,
                gains.u_o * cm.sigma2_z + beta_fg * cm.sigma2_y,
            )
        }
    })
}

fn fit(cfg: &SystemConfig, user: User) -> Result<GammaParams> {
    let (mean, variance) = channel_moments(cfg, user)?;
    if mean == 0.0 {
        return Err(Error::ZeroChannel { user });
    }
    if !(variance > 0.0 && mean > 0.0 && mean.is_finite() && variance.is_finite()) {
        return Err(Error::DegenerateFit {
            user,
            mean,
            variance,
        });
    }
    GammaParams::from_mean_variance(mean, variance)
}

/// Gamma fit of `|h_I|`.
pub fn fit_h_indoor(cfg: &SystemConfig) -> Result<GammaParams> {
    fit(cfg, User::Indoor)
}

/// Gamma fit of `|h_O|` (two-term moment combination).
pub fn fit_h_outdoor(cfg: &SystemConfig) -> Result<GammaParams> {
    fit(cfg, User::Outdoor)
}

pub fn fit_h(cfg: &SystemConfig, user: User) -> Result<GammaParams> {
    fit(cfg, user)
}

/// Published closed forms for `(k_hI, θ_hI)` and `(k_hO, θ_hO)`.
///
/// These are written against unit spreads on `t`, `f` and `D` and are kept as an
/// independent algebraic route to cross-check [`fit_h_indoor`] and
/// [`fit_h_outdoor`]; `√β_uI` is counted once, inside `θ_hI`.
pub mod closed_form {
    use super::*;

    pub fn indoor(cfg: &SystemConfig) -> Result<GammaParams> {
        cfg.validate()?;
        let b = cfg.path_gains()?;
        let n_c = cfg.n_c() as f64;
        let n_s = cfg.n_s() as f64;
        let u = special::nakagami_moments(cfg.links.u_i.m, cfg.links.u_i.omega)?;
        let quarter_pi = PI / 4.0;
        let spread_term = cfg.links.u_i.omega - u.mean * u.mean * quarter_pi;
        let shape = n_s * u.mean * u.mean * quarter_pi / spread_term;
        let scale = cfg.xi * b.u_i.sqrt() * (b.t + b.f * b.d * n_c).sqrt() * spread_term
            / (quarter_pi.sqrt() * u.mean);
        GammaParams::new(shape, scale)
    }

    pub fn outdoor(cfg: &SystemConfig) -> Result<GammaParams> {
        cfg.validate()?;
        let b = cfg.path_gains()?;
        let n_c = cfg.n_c() as f64;
        let n_s = cfg.n_s() as f64;
        let l = &cfg.links;
        let u = special::nakagami_moments(l.u_o.m, l.u_o.omega)?;
        let f = special::nakagami_moments(l.f.m, l.f.omega)?;
        let g = special::nakagami_moments(l.g.m, l.g.omega)?;
        let composite = b.t + b.f * b.d * n_c;
        let numerator = b.u_o.sqrt() * cfg.xi * n_s * u.mean * (PI * composite / 4.0).sqrt()
            + (b.f * b.g).sqrt() * n_c * f.mean * g.mean;
        let denominator = b.f * b.g * n_c * (l.f.omega * l.g.omega - (f.mean * g.mean).powi(2))
            + cfg.xi
                * cfg.xi
                * b.u_o
                * n_s
                * composite
                * ((4.0 * l.u_o.omega - u.mean * u.mean * PI) / 4.0);
        let shape = numerator * numerator / denominator;
        GammaParams::new(shape, numerator / shape)
    }
}

/// Gamma density `x^{k-1} e^{-x/θ} / (Γ(k) θ^k)`, evaluated in the log domain.
pub fn gamma_pdf(p: &GammaParams, x: f64) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    if x == 0.0 {
        return match p.shape.partial_cmp(&1.0) {
            Some(std::cmp::Ordering::Less) => f64::INFINITY,
            Some(std::cmp::Ordering::Equal) => 1.0 / p.scale,
            _ => 0.0,
        };
    }
    let log_density = (p.shape - 1.0) * x.ln()
        - x / p.scale
        - ln_gamma_unchecked(p.shape)
        - p.shape * p.scale.ln();
    log_density.exp()
}

/// Gamma CDF `γ(k, x/θ)/Γ(k)`.
pub fn gamma_cdf(p: &GammaParams, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    special::reg_lower_unchecked(p.shape, x / p.scale)
}
