//! System and link configuration shared by the simulator and the analytical model.

use std::fmt;
use std::str::FromStr;

use crate::error::{check_domain, Error, Result};

/// Large-scale and small-scale parameters of one propagation link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkParams {
    /// Nakagami shape `m` (≥ 0.5).
    pub m: f64,
    /// Nakagami spread `Ω = E[|h|²]` (> 0).
    pub omega: f64,
    /// Link distance in meters.
    pub distance: f64,
    /// Path-loss exponent.
    pub alpha: f64,
}

impl LinkParams {
    pub const fn new(m: f64, omega: f64, distance: f64, alpha: f64) -> Self {
        Self {
            m,
            omega,
            distance,
            alpha,
        }
    }

    pub fn validate(&self, id: LinkId) -> Result<()> {
        let bad = |what: &str| Err(Error::Config(format!("link {id}: {what}")));
        if !(self.m >= 0.5 && self.m.is_finite()) {
            return bad(&format!("m = {} violates m >= 0.5", self.m));
        }
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return bad(&format!("omega = {} violates omega > 0", self.omega));
        }
        if !(self.distance > 0.0 && self.distance.is_finite()) {
            return bad(&format!(
                "distance = {} violates distance > 0",
                self.distance
            ));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return bad(&format!("alpha = {} violates alpha >= 0", self.alpha));
        }
        Ok(())
    }
}

/// Path-loss gain `β = (d₀/d)^α`.
pub fn path_loss(params: &LinkParams, d0: f64) -> Result<f64> {
    check_domain(
        params.distance > 0.0,
        "distance",
        params.distance,
        "distance > 0",
    )?;
    check_domain(d0 > 0.0, "d0", d0, "d0 > 0")?;
    Ok((d0 / params.distance).powf(params.alpha))
}

/// The six links of the double-RIS topology.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LinkId {
    /// BS → conventional RIS.
    F,
    /// Conventional RIS → outdoor user.
    G,
    /// BS → STAR-RIS.
    T,
    /// Conventional RIS → STAR-RIS.
    D,
    /// STAR-RIS → indoor user.
    UIndoor,
    /// STAR-RIS → outdoor user.
    UOutdoor,
}

impl LinkId {
    pub const ALL: [LinkId; 6] = [
        LinkId::F,
        LinkId::G,
        LinkId::T,
        LinkId::D,
        LinkId::UIndoor,
        LinkId::UOutdoor,
    ];

    /// Key used in configuration files (`link.<key>.<field>`).
    pub fn key(self) -> &'static str {
        match self {
            LinkId::F => "f",
            LinkId::G => "g",
            LinkId::T => "t",
            LinkId::D => "d",
            LinkId::UIndoor => "u_i",
            LinkId::UOutdoor => "u_o",
        }
    }
}

impl fmt::Display for LinkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for LinkId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        LinkId::ALL
            .into_iter()
            .find(|id| id.key() == lower)
            .ok_or_else(|| format!("unknown link '{s}' (expected f, g, t, d, u_i or u_o)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Links {
    pub f: LinkParams,
    pub g: LinkParams,
    pub t: LinkParams,
    pub d: LinkParams,
    pub u_i: LinkParams,
    pub u_o: LinkParams,
}

impl Links {
    pub fn get(&self, id: LinkId) -> &LinkParams {
        match id {
            LinkId::F => &self.f,
            LinkId::G => &self.g,
            LinkId::T => &self.t,
            LinkId::D => &self.d,
            LinkId::UIndoor => &self.u_i,
            LinkId::UOutdoor => &self.u_o,
        }
    }

    pub fn get_mut(&mut self, id: LinkId) -> &mut LinkParams {
        match id {
            LinkId::F => &mut self.f,
            LinkId::G => &mut self.g,
            LinkId::T => &mut self.t,
            LinkId::D => &mut self.d,
            LinkId::UIndoor => &mut self.u_i,
            LinkId::UOutdoor => &mut self.u_o,
        }
    }

    /// Small-scale fading shapes only; two configurations with equal fading
    /// can share Monte-Carlo draws.
    pub(crate) fn same_fading(&self, other: &Links) -> bool {
        LinkId::ALL.into_iter().all(|id| {
            let (a, b) = (self.get(id), other.get(id));
            a.m == b.m && a.omega == b.omega
        })
    }
}

/// Which propagation paths are active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Scenario {
    /// Single- and double-reflection links.
    #[default]
    A,
    /// Double-reflection link only (`β_t = β_g = 0`).
    B,
    /// Single-reflection links only (`β_D = 0`).
    C,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::A, Scenario::B, Scenario::C];
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scenario::A => "A",
            Scenario::B => "B",
            Scenario::C => "C",
        })
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "A" | "a" => Ok(Scenario::A),
            "B" | "b" => Ok(Scenario::B),
            "C" | "c" => Ok(Scenario::C),
            other => Err(format!("unknown scenario '{other}' (expected A, B or C)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PhaseDesign {
    /// Closed-form coherent alignment at both surfaces (perfect CSI).
    #[default]
    Coherent,
    /// Every RIS phase i.i.d. uniform on `[0, 2π)`.
    Random,
}

impl fmt::Display for PhaseDesign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PhaseDesign::Coherent => "coherent",
            PhaseDesign::Random => "random",
        })
    }
}

impl FromStr for PhaseDesign {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "coherent" => Ok(PhaseDesign::Coherent),
            "random" => Ok(PhaseDesign::Random),
            other => Err(format!(
                "unknown phase design '{other}' (expected coherent or random)"
            )),
        }
    }
}

/// Which per-element signal the STAR-RIS phases are aligned against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum StarAlignment {
    /// Full incident composite `x_n = √β_t t_n + √(β_f β_D) [f Φ_C D]_n`.
    #[default]
    Composite,
    /// Double-reflection component `[f Φ_C D]_n` only.
    DoubleReflection,
}

impl fmt::Display for StarAlignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StarAlignment::Composite => "composite",
            StarAlignment::DoubleReflection => "double-reflection",
        })
    }
}

impl FromStr for StarAlignment {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "composite" => Ok(StarAlignment::Composite),
            "double-reflection" | "double_reflection" => Ok(StarAlignment::DoubleReflection),
            other => Err(format!(
                "unknown STAR alignment '{other}' (expected composite or double-reflection)"
            )),
        }
    }
}

/// Convert a target rate in bits per channel use into a linear SINR threshold.
pub fn threshold_from_rate(bpcu: f64) -> f64 {
    bpcu.exp2() - 1.0
}

/// NOMA power allocation presets.
pub mod power {
    /// `(λ_I, λ_O)` of the reference set; sums to 0.9.
    pub const REFERENCE_RAW: (f64, f64) = (0.15, 0.75);
    /// The reference pair rescaled to unit sum, keeping `λ_O / λ_I = 5`.
    pub const REFERENCE_NORMALIZED: (f64, f64) = (1.0 / 6.0, 5.0 / 6.0);
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// Total number of RIS elements `N = N_C + N_S`.
    pub n_total: usize,
    /// Split factor `η = N_C / N`.
    pub split_factor: f64,
    /// STAR-RIS energy-splitting amplitude `ξ`.
    pub xi: f64,
    pub lambda_i: f64,
    pub lambda_o: f64,
    /// Transmit SNR `ρ` in dB.
    pub rho_db: f64,
    /// Linear SINR threshold of the indoor user.
    pub gamma_th_i: f64,
    /// Linear SINR threshold of the outdoor user.
    pub gamma_th_o: f64,
    /// Path-loss reference distance in meters.
    pub d0: f64,
    pub links: Links,
    pub scenario: Scenario,
    pub phase_design: PhaseDesign,
    pub star_alignment: StarAlignment,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self::reference()
    }
}

impl SystemConfig {
    /// The reference configuration: N = 200, η = 0.35, raw power
    /// pair, target rate 0.01 BPCU for both users, α_t = 3.4, ρ = 35 dB.
    pub fn reference() -> Self {
        Self {
            n_total: 200,
            split_factor: 0.35,
            xi: 0.5,
            lambda_i: power::REFERENCE_RAW.0,
            lambda_o: power::REFERENCE_RAW.1,
            rho_db: 35.0,
            gamma_th_i: threshold_from_rate(0.01),
            gamma_th_o: threshold_from_rate(0.01),
            d0: 1.0,
            links: Links {
                f: LinkParams::new(8.0, 1.0, 25.0, 2.2),
                g: LinkParams::new(1.8, 1.0, 35.0, 2.8),
                t: LinkParams::new(1.5, 1.0, 35.0, 3.4),
                d: LinkParams::new(8.0, 1.0, 15.0, 2.2),
                u_i: LinkParams::new(15.0, 1.0, 5.0, 2.0),
                u_o: LinkParams::new(7.5, 1.0, 20.0, 2.0),
            },
            scenario: Scenario::A,
            phase_design: PhaseDesign::Coherent,
            star_alignment: StarAlignment::Composite,
        }
    }

    /// Elements on the conventional RIS, `round_half_up(η N)`.
    pub fn n_c(&self) -> usize {
        let raw = (self.split_factor * self.n_total as f64 + 0.5).floor();
        (raw.max(0.0) as usize).min(self.n_total)
    }

    /// Elements on the STAR-RIS.
    pub fn n_s(&self) -> usize {
        self.n_total - self.n_c()
    }

    pub fn rho_linear(&self) -> f64 {
        10f64.powf(self.rho_db / 10.0)
    }

    pub fn set_power_split(&mut self, (lambda_i, lambda_o): (f64, f64)) {
        self.lambda_i = lambda_i;
        self.lambda_o = lambda_o;
    }

    pub fn set_thresholds(&mut self, gamma_th: f64) {
        self.gamma_th_i = gamma_th;
        self.gamma_th_o = gamma_th;
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.n_total == 0 {
            return bad("n_total must be a positive integer".into());
        }
        if !(0.0..=1.0).contains(&self.split_factor) {
            return bad(format!(
                "split factor eta = {} out of range [0, 1]",
                self.split_factor
            ));
        }
        if !(self.xi > 0.0 && self.xi < 1.0) {
            return bad(format!("xi = {} out of range (0, 1)", self.xi));
        }
        for (name, v) in [("lambda_i", self.lambda_i), ("lambda_o", self.lambda_o)] {
            if !(v > 0.0 && v < 1.0) {
                return bad(format!("{name} = {v} out of range (0, 1)"));
            }
        }
        if self.lambda_i >= self.lambda_o {
            return bad(format!(
                "power allocation violates λ_I < λ_O (lambda_i = {}, lambda_o = {})",
                self.lambda_i, self.lambda_o
            ));
        }
        if self.lambda_i + self.lambda_o > 1.0 + 1e-12 {
            return bad(format!(
                "power allocation violates λ_I + λ_O <= 1 (sum = {})",
                self.lambda_i + self.lambda_o
            ));
        }
        if !self.rho_db.is_finite() {
            return bad(format!("rho_db = {} is not finite", self.rho_db));
        }
        for (name, v) in [
            ("gamma_th_i", self.gamma_th_i),
            ("gamma_th_o", self.gamma_th_o),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(format!("{name} = {v} must be a finite value >= 0"));
            }
        }
        if !(self.d0 > 0.0 && self.d0.is_finite()) {
            return bad(format!("d0 = {} must be > 0", self.d0));
        }
        for id in LinkId::ALL {
            self.links.get(id).validate(id)?;
        }
        Ok(())
    }

    /// Path-loss gains with the scenario's link filter applied.
    pub fn path_gains(&self) -> Result<PathGains> {
        let beta = |id: LinkId| path_loss(self.links.get(id), self.d0);
        let mut gains = PathGains {
            f: beta(LinkId::F)?,
            g: beta(LinkId::G)?,
            t: beta(LinkId::T)?,
            d: beta(LinkId::D)?,
            u_i: beta(LinkId::UIndoor)?,
            u_o: beta(LinkId::UOutdoor)?,
        };
        match self.scenario {
            Scenario::A => {}
            Scenario::B => {
                gains.t = 0.0;
                gains.g = 0.0;
            }
            Scenario::C => gains.d = 0.0,
        }
        Ok(gains)
    }
}

/// Large-scale gains `β_v` for every link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathGains {
    pub f: f64,
    pub g: f64,
    pub t: f64,
    pub d: f64,
    pub u_i: f64,
    pub u_o: f64,
}
