//! HMC update cycle, |ΔH| measurement and thermalization.

use std::time::Instant;

use log::{debug, info};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fermion::{pseudofermion_heatbath, SolverParams, WilsonDirac, DEFAULT_TOLERANCE};
use crate::gauge::mean_plaquette;
use crate::integrators::{
    integrate_trajectory, ActionParams, IntegratorSpec, MdState, MicroSteps, Scheme,
};
use crate::lattice::{GaugeField, LatticeGeom, RngStream, SpinorField};

/// Stream id of the Markov chain; measurement sample `i` uses stream `i + 1`.
pub const CHAIN_STREAM: u64 = 0;

#[derive(Clone, Debug, PartialEq)]
pub struct HmcConfig {
    pub l: usize,
    pub t: usize,
    pub beta: f64,
    pub m0: f64,
    pub tau: f64,
    pub h: f64,
    pub scheme: Scheme,
    pub micro: MicroSteps,
    pub cg_tol: f64,
    pub seed: u64,
    pub n_thermalize: usize,
    pub n_samples: usize,
    /// `false` drops the pseudofermion (pure gauge dynamics).
    pub fermions: bool,
}

impl Default for HmcConfig {
    fn default() -> Self {
        Self {
            l: 32,
            t: 32,
            beta: 1.0,
            m0: -0.231367,
            tau: 2.0,
            h: 0.05,
            scheme: Scheme::AdaptedNestedFg,
            micro: MicroSteps::default(),
            cg_tol: DEFAULT_TOLERANCE,
            seed: 1,
            n_thermalize: 500,
            n_samples: 200,
            fermions: true,
        }
    }
}

impl HmcConfig {
    /// Paper-scale run: 32×32, 200 samples.
    pub fn paper() -> Self {
        Self::default()
    }

    /// Desk-scale run: 8×8, 50 samples.
    pub fn desk() -> Self {
        Self {
            l: 8,
            t: 8,
            n_samples: 50,
            ..Self::default()
        }
    }

    pub fn geom(&self) -> Result<LatticeGeom> {
        LatticeGeom::new(self.l, self.t)
    }

    pub fn integrator(&self) -> IntegratorSpec {
        IntegratorSpec::new(self.scheme, self.h).with_micro(self.micro)
    }

    pub fn action_params(&self) -> ActionParams {
        ActionParams {
            beta: self.beta,
            m0: self.m0,
            solver: SolverParams::new(self.cg_tol),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.geom()?;
        self.integrator().validate()?;
        crate::integrators::n_steps_for(self.tau, self.h)?;
        if !(self.cg_tol > 0.0 && self.cg_tol < 1.0) {
            return Err(Error::InvalidIntegrator(format!("cg_tol must lie in (0, 1), got {}", self.cg_tol)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryStats {
    pub delta_h: f64,
    pub accepted: bool,
    pub inversions: u64,
    pub wall_time: f64,
    pub n_steps: usize,
}

/// Accept with probability `min(1, e^{−ΔH})`; draws a uniform only when `ΔH > 0`.
pub fn metropolis(delta_h: f64, rng: &mut RngStream) -> bool {
    if delta_h <= 0.0 {
        return true;
    }
    rng.uniform() < (-delta_h).exp()
}

/// Momentum and pseudofermion heatbaths at links `u`.
pub fn initial_state(u: &GaugeField, config: &HmcConfig, rng: &mut RngStream) -> MdState {
    let geom = *u.geom();
    let p = rng.sample_momenta(geom);
    let eta = if config.fermions {
        pseudofermion_heatbath(&WilsonDirac::new(u, config.m0), rng).0
    } else {
        SpinorField::zeros(geom)
    };
    MdState::new(u.clone(), p, eta, config.action_params())
}

/// Integrate one trajectory from `u` with fresh momenta and pseudofermion; no Metropolis.
pub fn trajectory_dh(u: &GaugeField, config: &HmcConfig, rng: &mut RngStream) -> Result<(MdState, TrajectoryStats)> {
    let start = Instant::now();
    let mut state = initial_state(u, config, rng);
    let h0 = state.hamiltonian()?;
    let out = integrate_trajectory(&mut state, &config.integrator(), config.tau)?;
    let h1 = state.hamiltonian()?;
    let stats = TrajectoryStats {
        delta_h: h1 - h0,
        accepted: false,
        inversions: out.inversions,
        wall_time: start.elapsed().as_secs_f64(),
        n_steps: out.n_steps,
    };
    Ok((state, stats))
}

/// One HMC update. On reject the original links are returned unchanged.
pub fn hmc_update(u: &GaugeField, config: &HmcConfig, rng: &mut RngStream) -> Result<(GaugeField, TrajectoryStats)> {
    let (state, mut stats) = trajectory_dh(u, config, rng)?;
    if !stats.delta_h.is_finite() {
        return Err(Error::InvalidIntegrator(format!("non-finite energy change {}", stats.delta_h)));
    }
    stats.accepted = metropolis(stats.delta_h, rng);
    let next = if stats.accepted { state.u } else { u.clone() };
    Ok((next, stats))
}

/// Statistics of `ΔH` over independent trajectories.
#[derive(Clone, Debug, PartialEq)]
pub struct DhMeasurement {
    pub delta_h: Vec<f64>,
    pub mean_abs: f64,
    pub stderr_abs: f64,
    /// Mean of `min(1, e^{−ΔH})`.
    pub acceptance: f64,
    pub mean_exp: f64,
    pub stderr_exp: f64,
    pub n_steps: usize,
    pub inversions_per_trajectory: u64,
    pub wall_s: f64,
}

fn mean_stderr(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    if x.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = x.iter().sum::<f64>() / n;
    if x.len() < 2 {
        return (mean, 0.0);
    }
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

impl DhMeasurement {
    pub fn from_samples(delta_h: Vec<f64>, n_steps: usize, inversions_per_trajectory: u64, wall_s: f64) -> Self {
        let abs: Vec<f64> = delta_h.iter().map(|d| d.abs()).collect();
        let exp: Vec<f64> = delta_h.iter().map(|d| (-d).exp()).collect();
        let acc: Vec<f64> = exp.iter().map(|e| e.min(1.0)).collect();
        let (mean_abs, stderr_abs) = mean_stderr(&abs);
        let (mean_exp, stderr_exp) = mean_stderr(&exp);
        let (acceptance, _) = mean_stderr(&acc);
        Self {
            delta_h,
            mean_abs,
            stderr_abs,
            acceptance,
            mean_exp,
            stderr_exp,
            n_steps,
            inversions_per_trajectory,
            wall_s,
        }
    }
}

/// `|ΔH|` over `n_samples` trajectories that all start from `u0`, each with its own
/// momenta and pseudofermion from stream `i + 1`. Samples run in parallel; the result
/// does not depend on the thread count.
pub fn measure_dh_distribution(u0: &GaugeField, config: &HmcConfig, n_samples: usize) -> Result<DhMeasurement> {
    config.validate()?;
    let start = Instant::now();
    let stats: Vec<TrajectoryStats> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = RngStream::new(config.seed, i as u64 + 1);
            trajectory_dh(u0, config, &mut rng).map(|(_, s)| s)
        })
        .collect::<Result<_>>()?;
    let n_steps = stats.first().map_or(0, |s| s.n_steps);
    let inv = stats.first().map_or(0, |s| s.inversions);
    let dh = stats.iter().map(|s| s.delta_h).collect();
    Ok(DhMeasurement::from_samples(dh, n_steps, inv, start.elapsed().as_secs_f64()))
}

/// Record of a sequential HMC chain.
#[derive(Clone, Debug)]
pub struct ChainRecord {
    pub u: GaugeField,
    pub stats: Vec<TrajectoryStats>,
    pub plaquettes: Vec<f64>,
}

impl ChainRecord {
    pub fn acceptance_rate(&self) -> f64 {
        if self.stats.is_empty() {
            return f64::NAN;
        }
        self.stats.iter().filter(|s| s.accepted).count() as f64 / self.stats.len() as f64
    }

    pub fn measurement(&self) -> DhMeasurement {
        let dh = self.stats.iter().map(|s| s.delta_h).collect();
        let wall = self.stats.iter().map(|s| s.wall_time).sum();
        let n_steps = self.stats.first().map_or(0, |s| s.n_steps);
        let inv = self.stats.first().map_or(0, |s| s.inversions);
        DhMeasurement::from_samples(dh, n_steps, inv, wall)
    }
}

/// `n_updates` sequential HMC updates from `u0`, recording `ΔH` and the plaquette.
pub fn run_chain(u0: &GaugeField, config: &HmcConfig, n_updates: usize, rng: &mut RngStream) -> Result<ChainRecord> {
    config.validate()?;
    let mut u = u0.clone();
    let mut stats = Vec::with_capacity(n_updates);
    let mut plaquettes = Vec::with_capacity(n_updates);
    for _ in 0..n_updates {
        let (next, s) = hmc_update(&u, config, rng)?;
        u = next;
        stats.push(s);
        plaquettes.push(mean_plaquette(&u));
    }
    Ok(ChainRecord { u, stats, plaquettes })
}

/// Result of a thermalization run.
#[derive(Clone, Debug)]
pub struct Thermalized {
    pub u: GaugeField,
    pub plaquettes: Vec<f64>,
    pub step_sizes: Vec<f64>,
    pub acceptance: f64,
}

/// Lower bound on the acceptance rate the thermalization step size aims for.
pub const THERMALIZE_MIN_ACCEPTANCE: f64 = 0.8;
const ADAPT_WINDOW: usize = 10;

/// Leapfrog HMC from a cold start. Every few updates the step size shrinks if the
/// windowed acceptance fell below 80% and grows slightly if it exceeded 95%.
pub fn thermalize(config: &HmcConfig, rng: &mut RngStream) -> Result<Thermalized> {
    let geom = config.geom()?;
    let mut cfg = HmcConfig {
        scheme: Scheme::Leapfrog,
        h: config.h.min(config.tau / 10.0),
        ..config.clone()
    };
    cfg.validate()?;
    let mut u = GaugeField::cold(geom);
    let mut plaquettes = Vec::with_capacity(config.n_thermalize);
    let mut step_sizes = Vec::with_capacity(config.n_thermalize);
    let mut window = 0usize;
    let mut accepted_total = 0usize;
    for k in 0..config.n_thermalize {
        let (next, s) = hmc_update(&u, &cfg, rng)?;
        u = next;
        window += s.accepted as usize;
        accepted_total += s.accepted as usize;
        plaquettes.push(mean_plaquette(&u));
        step_sizes.push(cfg.h);
        if (k + 1) % ADAPT_WINDOW == 0 {
            let rate = window as f64 / ADAPT_WINDOW as f64;
            if rate < THERMALIZE_MIN_ACCEPTANCE {
                cfg.h *= 0.8;
            } else if rate > 0.95 && cfg.h * 1.1 <= config.tau / 4.0 {
                cfg.h *= 1.1;
            }
            debug!("thermalize {}: plaquette {:.6}, acceptance {rate:.2}, h {:.4}", k + 1, plaquettes[k], cfg.h);
            window = 0;
        }
    }
    let acceptance = accepted_total as f64 / config.n_thermalize.max(1) as f64;
    info!(
        "thermalized {}x{} after {} updates: plaquette {:.6}, acceptance {:.3}",
        config.l,
        config.t,
        config.n_thermalize,
        plaquettes.last().copied().unwrap_or(1.0),
        acceptance
    );
    Ok(Thermalized {
        u,
        plaquettes,
        step_sizes,
        acceptance,
    })
}

/// Compares the two halves of the last `fraction` of `history`: returns
/// `(|m₁ − m₂|, √(e₁² + e₂²))` with naive standard errors.
pub fn stationarity(history: &[f64], fraction: f64) -> (f64, f64) {
    let n = ((history.len() as f64) * fraction).round() as usize;
    let tail = &history[history.len() - n.min(history.len())..];
    let (a, b) = tail.split_at(tail.len() / 2);
    let (ma, ea) = mean_stderr(a);
    let (mb, eb) = mean_stderr(b);
    ((ma - mb).abs(), (ea * ea + eb * eb).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> HmcConfig {
        HmcConfig {
            l: 4,
            t: 4,
            tau: 0.5,
            h: 0.1,
            scheme: Scheme::Leapfrog,
            n_thermalize: 40,
            n_samples: 8,
            ..HmcConfig::default()
        }
    }

    #[test]
    fn metropolis_accepts_downhill_without_drawing() {
        let mut a = RngStream::new(3, 0);
        let mut b = RngStream::new(3, 0);
        assert!(metropolis(-0.3, &mut a));
        assert!(metropolis(0.0, &mut a));
        assert_eq!(a.uniform(), b.uniform());
    }

    #[test]
    fn metropolis_frequency_at_ln2() {
        let mut rng = RngStream::new(11, 0);
        let n = 100_000;
        let hits = (0..n).filter(|_| metropolis(std::f64::consts::LN_2, &mut rng)).count();
        let freq = hits as f64 / n as f64;
        let sigma = (0.25 / n as f64).sqrt();
        assert!((freq - 0.5).abs() < 4.0 * sigma, "{freq}");
    }

    #[test]
    fn trivial_hamiltonian() {
        let g = LatticeGeom::new(4, 4).unwrap();
        let s = MdState::new(
            GaugeField::cold(g),
            crate::lattice::LinkField::zeros(g),
            SpinorField::zeros(g),
            small().action_params(),
        );
        assert_eq!(s.hamiltonian().unwrap(), 0.0);
    }

    #[test]
    fn heatbath_identity_for_hamiltonian() {
        let cfg = small();
        let g = cfg.geom().unwrap();
        let mut rng = RngStream::new(5, 0);
        let u = GaugeField::from_angles(g, rng.uniform_angles(g.n_links())).unwrap();
        let p = rng.sample_momenta(g);
        let (eta, phi) = pseudofermion_heatbath(&WilsonDirac::new(&u, cfg.m0), &mut rng);
        let s = MdState::new(u.clone(), p.clone(), eta, cfg.action_params());
        let expected = p.kinetic_energy() + crate::gauge::gauge_action(&u, cfg.beta) + phi.norm_sqr();
        assert!((s.hamiltonian().unwrap() - expected).abs() < 1e-9 * expected);
    }

    #[test]
    fn reject_returns_original_links() {
        let cfg = HmcConfig { h: 0.5, tau: 1.0, ..small() };
        let g = cfg.geom().unwrap();
        let mut rng = RngStream::new(9, 0);
        let u = GaugeField::from_angles(g, rng.uniform_angles(g.n_links())).unwrap();
        let mut rejected = 0;
        for _ in 0..20 {
            let (next, s) = hmc_update(&u, &cfg, &mut rng).unwrap();
            if !s.accepted {
                rejected += 1;
                assert_eq!(next.angles(), u.angles());
            }
        }
        assert!(rejected > 0);
    }

    #[test]
    fn tiny_steps_always_accept() {
        let cfg = HmcConfig { h: 1e-3, tau: 2e-2, ..small() };
        let g = cfg.geom().unwrap();
        let mut rng = RngStream::new(4, 0);
        let u0 = GaugeField::from_angles(g, rng.uniform_angles(g.n_links())).unwrap();
        let chain = run_chain(&u0, &cfg, 50, &mut rng).unwrap();
        assert_eq!(chain.acceptance_rate(), 1.0);
    }

    #[test]
    fn free_field_measurement_is_exact() {
        let cfg = HmcConfig { beta: 0.0, fermions: false, ..small() };
        let g = cfg.geom().unwrap();
        let m = measure_dh_distribution(&GaugeField::cold(g), &cfg, 6).unwrap();
        assert!(m.mean_abs < 1e-13);
        assert!(m.stderr_abs < 1e-13);
    }

    #[test]
    fn measurement_is_deterministic() {
        let cfg = small();
        let g = cfg.geom().unwrap();
        let u0 = GaugeField::from_angles(g, RngStream::new(2, 9).uniform_angles(g.n_links())).unwrap();
        let a = measure_dh_distribution(&u0, &cfg, 6).unwrap();
        let b = measure_dh_distribution(&u0, &cfg, 6).unwrap();
        assert_eq!(a.delta_h, b.delta_h);
        assert_eq!(a.inversions_per_trajectory, 5 * 4);
    }

    #[test]
    fn thermalize_is_reproducible() {
        let cfg = small();
        let a = thermalize(&cfg, &mut RngStream::new(cfg.seed, CHAIN_STREAM)).unwrap();
        let b = thermalize(&cfg, &mut RngStream::new(cfg.seed, CHAIN_STREAM)).unwrap();
        assert_eq!(a.u.angles(), b.u.angles());
        assert!(a.plaquettes.last().unwrap() < &0.99);
    }
}
