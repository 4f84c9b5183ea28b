use std::f64::consts::{PI, TAU};
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use super::geom::{Dir, LatticeGeom};
use crate::error::{Error, Result};

/// Map an angle onto `[-π, π)`. Angles already in range are returned unchanged.
#[inline]
pub fn wrap_angle(q: f64) -> f64 {
    if (-PI..PI).contains(&q) {
        return q;
    }
    let mut w = q - TAU * ((q + PI) / TAU).floor();
    if w >= PI {
        w -= TAU;
    } else if w < -PI {
        w += TAU;
    }
    w
}

/// Compact U(1) gauge field stored as link angles: `U_μ(n) = exp(i q_μ(n))`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeField {
    geom: LatticeGeom,
    q: Vec<f64>,
}

impl GaugeField {
    /// Cold start, every link equal to one.
    pub fn cold(geom: LatticeGeom) -> Self {
        Self {
            geom,
            q: vec![0.0; geom.n_links()],
        }
    }

    /// Build from raw angles; each angle is wrapped onto `[-π, π)`.
    pub fn from_angles(geom: LatticeGeom, angles: Vec<f64>) -> Result<Self> {
        if angles.len() != geom.n_links() {
            return Err(Error::ShapeMismatch {
                expected: geom.n_links(),
                found: angles.len(),
            });
        }
        Ok(Self {
            geom,
            q: angles.into_iter().map(wrap_angle).collect(),
        })
    }

    #[inline]
    pub fn geom(&self) -> &LatticeGeom {
        &self.geom
    }

    #[inline]
    pub fn angle(&self, site: usize, mu: Dir) -> f64 {
        self.q[self.geom.link(site, mu)]
    }

    #[inline]
    pub fn set_angle(&mut self, site: usize, mu: Dir, value: f64) {
        let l = self.geom.link(site, mu);
        self.q[l] = wrap_angle(value);
    }

    #[inline]
    pub fn link(&self, site: usize, mu: Dir) -> Complex64 {
        Complex64::from_polar(1.0, self.angle(site, mu))
    }

    pub fn angles(&self) -> &[f64] {
        &self.q
    }

    /// All link values `exp(i q)`, in link order.
    pub fn links(&self) -> Vec<Complex64> {
        self.q.iter().map(|&a| Complex64::from_polar(1.0, a)).collect()
    }

    /// Link rotation `U → exp(i h P) U`, i.e. `q ← wrap(q + h p)`.
    pub fn exp_update(&mut self, p: &LinkField, h: f64) -> Result<()> {
        check_shape(self.geom.n_links(), p.len())?;
        for (q, &pi) in self.q.iter_mut().zip(p.as_slice()) {
            *q = wrap_angle(*q + h * pi);
        }
        Ok(())
    }

    /// Non-mutating form of [`GaugeField::exp_update`].
    pub fn exp_updated(&self, p: &LinkField, h: f64) -> Result<Self> {
        let mut out = self.clone();
        out.exp_update(p, h)?;
        Ok(out)
    }
}

/// One real number per directed link. Used for momenta and forces.
#[derive(Clone, Debug, PartialEq)]
pub struct LinkField {
    geom: LatticeGeom,
    v: Vec<f64>,
}

pub type MomentumField = LinkField;
pub type ForceField = LinkField;

impl LinkField {
    pub fn zeros(geom: LatticeGeom) -> Self {
        Self {
            geom,
            v: vec![0.0; geom.n_links()],
        }
    }

    pub fn from_vec(geom: LatticeGeom, v: Vec<f64>) -> Result<Self> {
        check_shape(geom.n_links(), v.len())?;
        Ok(Self { geom, v })
    }

    #[inline]
    pub fn geom(&self) -> &LatticeGeom {
        &self.geom
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.v.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    #[inline]
    pub fn get(&self, site: usize, mu: Dir) -> f64 {
        self.v[self.geom.link(site, mu)]
    }

    #[inline]
    pub fn set(&mut self, site: usize, mu: Dir, value: f64) {
        let l = self.geom.link(site, mu);
        self.v[l] = value;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.v
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.v
    }

    /// `self += a * other`
    pub fn axpy(&mut self, a: f64, other: &LinkField) -> Result<()> {
        check_shape(self.len(), other.len())?;
        for (x, &y) in self.v.iter_mut().zip(&other.v) {
            *x += a * y;
        }
        Ok(())
    }

    /// Momentum shift `p ← p − h F`.
    pub fn shift_momenta(&mut self, force: &ForceField, h: f64) -> Result<()> {
        self.axpy(-h, force)
    }

    pub fn scale(&mut self, a: f64) {
        self.v.iter_mut().for_each(|x| *x *= a);
    }

    pub fn negate(&mut self) {
        self.scale(-1.0);
    }

    /// `½ Σ p²` over all links.
    pub fn kinetic_energy(&self) -> f64 {
        0.5 * self.v.iter().map(|p| p * p).sum::<f64>()
    }

    pub fn max_abs_diff(&self, other: &LinkField) -> f64 {
        self.v
            .iter()
            .zip(&other.v)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl Index<usize> for LinkField {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.v[i]
    }
}

impl IndexMut<usize> for LinkField {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.v[i]
    }
}

/// Two complex spin components per site, stored site-major: `[ψ₀(0), ψ₁(0), ψ₀(1), …]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinorField {
    geom: LatticeGeom,
    psi: Vec<Complex64>,
}

impl SpinorField {
    pub fn zeros(geom: LatticeGeom) -> Self {
        Self {
            geom,
            psi: vec![Complex64::new(0.0, 0.0); 2 * geom.volume()],
        }
    }

    pub fn from_vec(geom: LatticeGeom, psi: Vec<Complex64>) -> Result<Self> {
        check_shape(2 * geom.volume(), psi.len())?;
        Ok(Self { geom, psi })
    }

    #[inline]
    pub fn geom(&self) -> &LatticeGeom {
        &self.geom
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.psi.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.psi.is_empty()
    }

    #[inline]
    pub fn site(&self, n: usize) -> [Complex64; 2] {
        [self.psi[2 * n], self.psi[2 * n + 1]]
    }

    #[inline]
    pub fn set_site(&mut self, n: usize, v: [Complex64; 2]) {
        self.psi[2 * n] = v[0];
        self.psi[2 * n + 1] = v[1];
    }

    #[inline]
    pub fn add_site(&mut self, n: usize, v: [Complex64; 2]) {
        self.psi[2 * n] += v[0];
        self.psi[2 * n + 1] += v[1];
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.psi
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.psi
    }

    /// `⟨self, other⟩ = Σ self† other`
    pub fn dot(&self, other: &SpinorField) -> Complex64 {
        self.psi
            .iter()
            .zip(&other.psi)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.psi.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `self += a * other`
    pub fn axpy(&mut self, a: Complex64, other: &SpinorField) {
        for (x, y) in self.psi.iter_mut().zip(&other.psi) {
            *x += a * y;
        }
    }

    pub fn scale(&mut self, a: Complex64) {
        self.psi.iter_mut().for_each(|x| *x *= a);
    }

    pub fn is_zero(&self) -> bool {
        self.psi.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }
}

impl Index<usize> for SpinorField {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.psi[i]
    }
}

impl IndexMut<usize> for SpinorField {
    fn index_mut(&mut self, i: usize) -> &mut Complex64 {
        &mut self.psi[i]
    }
}

#[inline]
fn check_shape(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::ShapeMismatch { expected, found })
    }
}
