//! Fading realizations and end-to-end channel gains of the double-RIS link.
//!
//! A trial draws every small-scale coefficient in a fixed order
//! (f, g, t, D row-major, u_I, u_O, then the random-design phases if any),
//! applies the phase design and forms
//!
//! ```text
//! h_I = √β_uI ξ Σ_n x_n e^{jφ_I,n} u_I,n
//! h_O = √(β_f β_g) Σ_c f_c e^{jθ_c} g_c + √β_uO ξ Σ_n x_n e^{jφ_O,n} u_O,n
//! x_n = √β_t t_n + √(β_f β_D) Σ_c f_c e^{jθ_c} D_cn
//! ```
//!
//! Trials are seeded independently (`base_seed + trial_index`), so batches can
//! be split across threads without changing any result.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Gamma};
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;

use crate::config::{
    LinkId, LinkParams, Links, PathGains, PhaseDesign, StarAlignment, SystemConfig,
};
use crate::error::{Error, Result};

/// Scalar end-to-end amplitudes of one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelRealization {
    pub h_i_mag: f64,
    pub h_o_mag: f64,
}

/// Random stream of one trial.
pub type TrialRng = Xoshiro256PlusPlus;

/// Per-trial random stream, seeded with `base_seed + trial`.
pub fn trial_rng(base_seed: u64, trial: u64) -> TrialRng {
    TrialRng::seed_from_u64(base_seed.wrapping_add(trial))
}

fn nakagami_sampler(params: &LinkParams) -> Result<Gamma<f64>> {
    if !(params.m >= 0.5 && params.m.is_finite()) {
        return Err(Error::Domain {
            name: "m",
            value: params.m,
            constraint: "m >= 0.5",
        });
    }
    if !(params.omega > 0.0 && params.omega.is_finite()) {
        return Err(Error::Domain {
            name: "omega",
            value: params.omega,
            constraint: "omega > 0",
        });
    }
    Gamma::new(params.m, params.omega / params.m)
        .map_err(|e| Error::Config(format!("Nakagami sampler: {e}")))
}

/// `e^{jψ}` with `ψ` uniform on `[0, 2π)`, by rejection from the unit square
/// (cheaper than a `sin_cos` of a uniform angle).
#[inline]
fn unit_phasor<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    loop {
        let re = rng.random::<f64>() * 2.0 - 1.0;
        let im = rng.random::<f64>() * 2.0 - 1.0;
        let r2 = re * re + im * im;
        if r2 <= 1.0 && r2 > 1e-200 {
            return Complex64::new(re, im) / r2.sqrt();
        }
    }
}

fn fill_nakagami<R: Rng + ?Sized>(rng: &mut R, sampler: &Gamma<f64>, out: &mut [Complex64]) {
    for z in out.iter_mut() {
        let magnitude = sampler.sample(rng).sqrt();
        *z = unit_phasor(rng) * magnitude;
    }
}

fn fill_unit_phasors<R: Rng + ?Sized>(rng: &mut R, out: &mut [Complex64]) {
    for z in out.iter_mut() {
        *z = unit_phasor(rng);
    }
}

/// `n` i.i.d. complex coefficients with Nakagami(m, Ω) magnitude and uniform phase.
pub fn sample_nakagami_vector<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    params: &LinkParams,
) -> Result<Vec<Complex64>> {
    if n == 0 {
        return Err(Error::Domain {
            name: "n",
            value: 0.0,
            constraint: "n >= 1",
        });
    }
    let sampler = nakagami_sampler(params)?;
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    fill_nakagami(rng, &sampler, &mut out);
    Ok(out)
}

/// Phase that cancels the argument of `z`, i.e. `e^{-j∠z}`; 1 when `z = 0`.
#[inline]
fn conj_phase(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r > 0.0 {
        z.conj() / r
    } else {
        Complex64::new(1.0, 0.0)
    }
}

/// Small-scale fading of one trial, with buffers reused across trials.
#[derive(Debug, Clone, Default)]
pub struct Fading {
    n_c: usize,
    n_s: usize,
    design: PhaseDesign,
    pub f: Vec<Complex64>,
    pub g: Vec<Complex64>,
    pub t: Vec<Complex64>,
    /// `N_C × N_S`, row-major.
    pub d: Vec<Complex64>,
    pub u_i: Vec<Complex64>,
    pub u_o: Vec<Complex64>,
    /// Random-design phasors for Φ_C, Φ_S^I and Φ_S^O (empty under coherent design).
    random_c: Vec<Complex64>,
    random_s_i: Vec<Complex64>,
    random_s_o: Vec<Complex64>,
    // scratch
    w: Vec<Complex64>,
    x: Vec<Complex64>,
}

/// The six Nakagami samplers for one link set.
#[derive(Debug, Clone)]
pub struct FadingSamplers {
    f: Gamma<f64>,
    g: Gamma<f64>,
    t: Gamma<f64>,
    d: Gamma<f64>,
    u_i: Gamma<f64>,
    u_o: Gamma<f64>,
}

impl FadingSamplers {
    pub fn new(links: &Links) -> Result<Self> {
        let s = |id: LinkId| nakagami_sampler(links.get(id));
        Ok(Self {
            f: s(LinkId::F)?,
            g: s(LinkId::G)?,
            t: s(LinkId::T)?,
            d: s(LinkId::D)?,
            u_i: s(LinkId::UIndoor)?,
            u_o: s(LinkId::UOutdoor)?,
        })
    }
}

impl Fading {
    pub fn n_c(&self) -> usize {
        self.n_c
    }

    pub fn n_s(&self) -> usize {
        self.n_s
    }

    /// Redraw every coefficient in the canonical order.
    pub fn redraw<R: Rng + ?Sized>(
        &mut self,
        rng: &mut R,
        n_c: usize,
        n_s: usize,
        samplers: &FadingSamplers,
        design: PhaseDesign,
    ) {
        self.n_c = n_c;
        self.n_s = n_s;
        self.design = design;
        let zero = Complex64::new(0.0, 0.0);
        self.f.resize(n_c, zero);
        self.g.resize(n_c, zero);
        self.t.resize(n_s, zero);
        self.d.resize(n_c * n_s, zero);
        self.u_i.resize(n_s, zero);
        self.u_o.resize(n_s, zero);
        fill_nakagami(rng, &samplers.f, &mut self.f);
        fill_nakagami(rng, &samplers.g, &mut self.g);
        fill_nakagami(rng, &samplers.t, &mut self.t);
        fill_nakagami(rng, &samplers.d, &mut self.d);
        fill_nakagami(rng, &samplers.u_i, &mut self.u_i);
        fill_nakagami(rng, &samplers.u_o, &mut self.u_o);
        match design {
            PhaseDesign::Coherent => {
                self.random_c.clear();
                self.random_s_i.clear();
                self.random_s_o.clear();
            }
            PhaseDesign::Random => {
                self.random_c.resize(n_c, zero);
                self.random_s_i.resize(n_s, zero);
                self.random_s_o.resize(n_s, zero);
                fill_unit_phasors(rng, &mut self.random_c);
                fill_unit_phasors(rng, &mut self.random_s_i);
                fill_unit_phasors(rng, &mut self.random_s_o);
            }
        }
    }

    pub fn draw<R: Rng + ?Sized>(rng: &mut R, cfg: &SystemConfig) -> Result<Self> {
        let samplers = FadingSamplers::new(&cfg.links)?;
        let mut fading = Self::default();
        fading.redraw(rng, cfg.n_c(), cfg.n_s(), &samplers, cfg.phase_design);
        Ok(fading)
    }

    /// Complex end-to-end coefficients `(h_I, h_O)` for the given large-scale gains.
    pub fn end_to_end(
        &mut self,
        gains: &PathGains,
        xi: f64,
        alignment: StarAlignment,
    ) -> (Complex64, Complex64) {
        let (n_c, n_s) = (self.n_c, self.n_s);
        let random = self.design == PhaseDesign::Random;
        let zero = Complex64::new(0.0, 0.0);

        // Conventional RIS: a_c = f_c e^{jθ_c}; the single-reflection sum Σ a_c g_c
        // is accumulated on the way.
        let mut single = zero;
        self.w.clear();
        self.w.resize(n_s, zero);
        for c in 0..n_c {
            let phase = if random {
                self.random_c[c]
            } else {
                conj_phase(self.f[c] * self.g[c])
            };
            let a = self.f[c] * phase;
            single += a * self.g[c];
            let row = &self.d[c * n_s..(c + 1) * n_s];
            for (w, d) in self.w.iter_mut().zip(row) {
                *w += a * d;
            }
        }

        let (amp_t, amp_fd) = (gains.t.sqrt(), (gains.f * gains.d).sqrt());
        self.x.clear();
        self.x.extend(
            self.t
                .iter()
                .zip(&self.w)
                .map(|(t, w)| t * amp_t + w * amp_fd),
        );

        let mut z_i = zero;
        let mut z_o = zero;
        for n in 0..n_s {
            let target = match alignment {
                StarAlignment::Composite => self.x[n],
                StarAlignment::DoubleReflection => self.w[n],
            };
            let (phase_i, phase_o) = if random {
                (self.random_s_i[n], self.random_s_o[n])
            } else {
                (
                    conj_phase(target * self.u_i[n]),
                    conj_phase(target * self.u_o[n]),
                )
            };
            z_i += self.x[n] * phase_i * self.u_i[n];
            z_o += self.x[n] * phase_o * self.u_o[n];
        }
        let h_i = z_i * (xi * gains.u_i.sqrt());
        let h_o = single * (gains.f * gains.g).sqrt() + z_o * (xi * gains.u_o.sqrt());
        (h_i, h_o)
    }

    /// Incident composite `x_n` from the last [`Fading::end_to_end`] call.
    pub fn composite(&self) -> &[Complex64] {
        &self.x
    }

    pub fn realization(
        &mut self,
        gains: &PathGains,
        xi: f64,
        alignment: StarAlignment,
    ) -> ChannelRealization {
        let (h_i, h_o) = self.end_to_end(gains, xi, alignment);
        ChannelRealization {
            h_i_mag: h_i.norm(),
            h_o_mag: h_o.norm(),
        }
    }
}

/// One Monte-Carlo draw of both end-to-end amplitudes.
pub fn realize_channels<R: Rng + ?Sized>(
    rng: &mut R,
    cfg: &SystemConfig,
) -> Result<ChannelRealization> {
    cfg.validate()?;
    let gains = cfg.path_gains()?;
    let mut fading = Fading::draw(rng, cfg)?;
    Ok(fading.realization(&gains, cfg.xi, cfg.star_alignment))
}

/// `trials` independent realizations, trial `i` seeded with `seed + i`.
pub fn simulate(cfg: &SystemConfig, trials: usize, seed: u64) -> Result<Vec<ChannelRealization>> {
    let mut out = simulate_many(std::slice::from_ref(cfg), trials, seed)?;
    Ok(out.pop().unwrap_or_default())
}

/// Realizations for several configurations that share element counts, fading
/// shapes and phase design: each trial's coefficients are drawn once and
/// combined under every configuration's path gains.
pub fn simulate_many(
    cfgs: &[SystemConfig],
    trials: usize,
    seed: u64,
) -> Result<Vec<Vec<ChannelRealization>>> {
    let Some(first) = cfgs.first() else {
        return Ok(Vec::new());
    };
    for cfg in cfgs {
        cfg.validate()?;
        if cfg.n_c() != first.n_c()
            || cfg.n_s() != first.n_s()
            || cfg.phase_design != first.phase_design
            || !cfg.links.same_fading(&first.links)
        {
            return Err(Error::Config(
                "configurations in one batch must share N_C, N_S, fading shapes and phase design"
                    .into(),
            ));
        }
    }
    let gains = cfgs
        .iter()
        .map(|c| c.path_gains())
        .collect::<Result<Vec<_>>>()?;
    let samplers = FadingSamplers::new(&first.links)?;
    let (n_c, n_s, design) = (first.n_c(), first.n_s(), first.phase_design);

    let per_trial: Vec<Vec<ChannelRealization>> = (0..trials as u64)
        .into_par_iter()
        .map_init(Fading::default, |fading, trial| {
            let mut rng = trial_rng(seed, trial);
            fading.redraw(&mut rng, n_c, n_s, &samplers, design);
            cfgs.iter()
                .zip(&gains)
                .map(|(cfg, g)| fading.realization(g, cfg.xi, cfg.star_alignment))
                .collect()
        })
        .collect();

    let mut out = vec![Vec::with_capacity(trials); cfgs.len()];
    for row in per_trial {
        for (dst, r) in out.iter_mut().zip(row) {
            dst.push(r);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Scenario;
    use std::f64::consts::PI;

    #[test]
    fn rayleigh_vector_mean() {
        let mut rng = trial_rng(1, 0);
        let n = 1_000_000;
        let v = sample_nakagami_vector(&mut rng, n, &LinkParams::new(1.0, 1.0, 1.0, 0.0)).unwrap();
        let mags: Vec<f64> = v.iter().map(|z| z.norm()).collect();
        let mean = mags.iter().sum::<f64>() / n as f64;
        let var = mags.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n as f64;
        let se = (var / n as f64).sqrt();
        assert!((mean - PI.sqrt() / 2.0).abs() < 3.0 * se, "{mean}");
    }

    #[test]
    fn nakagami_vector_mean_square_is_spread() {
        let mut rng = trial_rng(2, 0);
        let n = 1_000_000;
        let v = sample_nakagami_vector(&mut rng, n, &LinkParams::new(8.0, 1.0, 1.0, 0.0)).unwrap();
        let sq: Vec<f64> = v.iter().map(|z| z.norm_sqr()).collect();
        let mean = sq.iter().sum::<f64>() / n as f64;
        let var = sq.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n as f64;
        let se = (var / n as f64).sqrt();
        assert!((mean - 1.0).abs() < 3.0 * se, "{mean}");
    }

    #[test]
    fn phases_are_uniform() {
        let mut rng = trial_rng(3, 0);
        let n = 200_000;
        let v = sample_nakagami_vector(&mut rng, n, &LinkParams::new(2.0, 1.0, 1.0, 0.0)).unwrap();
        // E[e^{j∠z}] = 0 for uniform phase; each component has variance 1/2.
        let mean: Complex64 = v.iter().map(|z| z / z.norm()).sum::<Complex64>() / n as f64;
        let se = (0.5 / n as f64).sqrt();
        assert!(mean.re.abs() < 4.0 * se && mean.im.abs() < 4.0 * se);
    }

    #[test]
    fn sampling_is_deterministic() {
        let p = LinkParams::new(1.5, 1.0, 1.0, 0.0);
        let a = sample_nakagami_vector(&mut TrialRng::seed_from_u64(42), 4, &p).unwrap();
        let b = sample_nakagami_vector(&mut TrialRng::seed_from_u64(42), 4, &p).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sampling_rejects_bad_params() {
        let mut rng = trial_rng(0, 0);
        assert!(sample_nakagami_vector(&mut rng, 0, &LinkParams::new(1.0, 1.0, 1.0, 0.0)).is_err());
        assert!(sample_nakagami_vector(&mut rng, 3, &LinkParams::new(0.2, 1.0, 1.0, 0.0)).is_err());
        assert!(sample_nakagami_vector(&mut rng, 3, &LinkParams::new(1.0, 0.0, 1.0, 0.0)).is_err());
    }

    #[test]
    fn coherent_design_combines_exactly() {
        let cfg = SystemConfig {
            n_total: 40,
            ..SystemConfig::reference()
        };
        let gains = cfg.path_gains().unwrap();
        for trial in 0..20 {
            let mut rng = trial_rng(11, trial);
            let mut fading = Fading::draw(&mut rng, &cfg).unwrap();
            let (h_i, h_o) = fading.end_to_end(&gains, cfg.xi, StarAlignment::Composite);
            let x = fading.composite().to_vec();
            let direct_i: f64 = cfg.xi
                * gains.u_i.sqrt()
                * x.iter()
                    .zip(&fading.u_i)
                    .map(|(x, u)| x.norm() * u.norm())
                    .sum::<f64>();
            assert!((h_i.norm() - direct_i).abs() <= 1e-12 * direct_i);
            assert!(h_i.im.abs() <= 1e-9 * h_i.re);
            let single: f64 = fading
                .f
                .iter()
                .zip(&fading.g)
                .map(|(f, g)| f.norm() * g.norm())
                .sum();
            let direct_o = (gains.f * gains.g).sqrt() * single
                + cfg.xi
                    * gains.u_o.sqrt()
                    * x.iter()
                        .zip(&fading.u_o)
                        .map(|(x, u)| x.norm() * u.norm())
                        .sum::<f64>();
            assert!((h_o.norm() - direct_o).abs() <= 1e-12 * direct_o);
        }
    }

    #[test]
    fn empty_conventional_ris_in_scenario_c_leaves_only_star_single_reflection() {
        let cfg = SystemConfig {
            split_factor: 0.0,
            scenario: Scenario::C,
            ..SystemConfig::reference()
        };
        assert_eq!(cfg.n_c(), 0);
        let gains = cfg.path_gains().unwrap();
        let mut fading = Fading::draw(&mut trial_rng(5, 0), &cfg).unwrap();
        let r = fading.realization(&gains, cfg.xi, cfg.star_alignment);
        let star = |u: &[Complex64]| {
            fading
                .t
                .iter()
                .zip(u)
                .map(|(t, u)| t.norm() * u.norm())
                .sum::<f64>()
                * cfg.xi
                * gains.t.sqrt()
        };
        let expect_i = star(&fading.u_i) * gains.u_i.sqrt();
        let expect_o = star(&fading.u_o) * gains.u_o.sqrt();
        assert!((r.h_i_mag - expect_i).abs() <= 1e-12 * expect_i);
        assert!((r.h_o_mag - expect_o).abs() <= 1e-12 * expect_o);
    }

    #[test]
    fn scenario_b_equals_zeroed_single_reflection_gains() {
        let mut cfg = SystemConfig::reference();
        let mut gains = cfg.path_gains().unwrap();
        gains.t = 0.0;
        gains.g = 0.0;
        cfg.scenario = Scenario::B;
        for trial in 0..5 {
            let via_scenario = realize_channels(&mut trial_rng(9, trial), &cfg).unwrap();
            let mut fading = Fading::draw(&mut trial_rng(9, trial), &cfg).unwrap();
            let via_gains = fading.realization(&gains, cfg.xi, cfg.star_alignment);
            assert_eq!(via_scenario, via_gains);
        }
    }

    #[test]
    fn realizations_are_deterministic() {
        let cfg = SystemConfig::reference();
        let a = realize_channels(&mut trial_rng(42, 0), &cfg).unwrap();
        let b = realize_channels(&mut trial_rng(42, 0), &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.h_i_mag.is_finite() && a.h_i_mag >= 0.0);
        assert!(a.h_o_mag.is_finite() && a.h_o_mag >= 0.0);
    }

    #[test]
    fn batches_match_individual_draws() {
        let mut cfgs = vec![SystemConfig::reference(); 3];
        cfgs[1].scenario = Scenario::B;
        cfgs[2].links.t.alpha = 2.8;
        let batch = simulate_many(&cfgs, 16, 77).unwrap();
        for (cfg, rows) in cfgs.iter().zip(&batch) {
            for (i, r) in rows.iter().enumerate() {
                let single = realize_channels(&mut trial_rng(77, i as u64), cfg).unwrap();
                assert_eq!(*r, single);
            }
        }
    }

    #[test]
    fn batches_reject_mismatched_configs() {
        let mut other = SystemConfig::reference();
        other.n_total = 100;
        assert!(simulate_many(&[SystemConfig::reference(), other], 2, 0).is_err());
    }

    #[test]
    fn random_design_differs_from_coherent() {
        let mut cfg = SystemConfig::reference();
        cfg.phase_design = PhaseDesign::Random;
        let r = simulate(&cfg, 200, 3).unwrap();
        cfg.phase_design = PhaseDesign::Coherent;
        let c = simulate(&cfg, 200, 3).unwrap();
        let mean =
            |v: &[ChannelRealization]| v.iter().map(|r| r.h_i_mag).sum::<f64>() / v.len() as f64;
        assert!(mean(&r) < 0.5 * mean(&c));
    }
}
