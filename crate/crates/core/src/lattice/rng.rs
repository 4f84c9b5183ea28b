use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use super::field::{LinkField, MomentumField, SpinorField};
use super::geom::LatticeGeom;

/// Reproducible random stream identified by `(seed, stream)`.
///
/// Each parallel worker gets its own stream id so results do not depend on scheduling.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    rng: ChaCha12Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Uniform draw on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Complex normal with `E|z|² = 1`.
    pub fn complex_normal(&mut self) -> Complex64 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Complex64::new(s * self.normal(), s * self.normal())
    }

    /// Momentum heatbath: independent standard normal per link.
    pub fn sample_momenta(&mut self, geom: LatticeGeom) -> MomentumField {
        let v = (0..geom.n_links()).map(|_| self.normal()).collect();
        LinkField::from_vec(geom, v).expect("length matches geometry")
    }

    /// Spinor with i.i.d. unit complex normal components.
    pub fn sample_spinor(&mut self, geom: LatticeGeom) -> SpinorField {
        let v = (0..2 * geom.volume()).map(|_| self.complex_normal()).collect();
        SpinorField::from_vec(geom, v).expect("length matches geometry")
    }

    /// Uniform angles on `[-π, π)`, a "hot" start.
    pub fn uniform_angles(&mut self, n: usize) -> Vec<f64> {
        use std::f64::consts::PI;
        (0..n).map(|_| PI * (2.0 * self.uniform() - 1.0)).collect()
    }
}
