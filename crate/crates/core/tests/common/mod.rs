//! Independent reference implementations used by the integration tests.
//!
//! Everything here is built from the textbook definitions with dense matrices and
//! finite differences; nothing calls the stencil or Krylov code under test.

#![allow(dead_code)]

use nalgebra::{Complex, DMatrix, DVector};
use schwinger::lattice::{Dir, GaugeField, LatticeGeom, LinkField, RngStream, SpinorField};

pub type C64 = Complex<f64>;

pub const M0: f64 = -0.231367;

fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn identity2() -> [[C64; 2]; 2] {
    [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]
}

pub fn sigma(mu: Dir) -> [[C64; 2]; 2] {
    match mu {
        Dir::X => [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
        Dir::T => [[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]],
    }
}

/// `(1 + s σ_μ)` as a 2×2 matrix.
pub fn projector(mu: Dir, s: f64) -> [[C64; 2]; 2] {
    let id = identity2();
    let sg = sigma(mu);
    let mut out = [[c(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = id[i][j] + sg[i][j] * s;
        }
    }
    out
}

fn add_block(m: &mut DMatrix<C64>, row: usize, col: usize, block: [[C64; 2]; 2], factor: C64) {
    for i in 0..2 {
        for j in 0..2 {
            m[(2 * row + i, 2 * col + j)] += block[i][j] * factor;
        }
    }
}

/// Dense Wilson–Dirac matrix from raw (unwrapped) link angles.
pub fn dense_dirac(geom: &LatticeGeom, angles: &[f64], m0: f64) -> DMatrix<C64> {
    let n = 2 * geom.volume();
    let mut d = DMatrix::<C64>::zeros(n, n);
    for s in geom.sites() {
        add_block(&mut d, s, s, identity2(), c(2.0 + m0, 0.0));
        for mu in Dir::ALL {
            let q = angles[geom.link(s, mu)];
            let u = C64::from_polar(1.0, q);
            // D_{n, n+μ̂} = −½(1−σ_μ) U_μ(n)
            add_block(&mut d, s, geom.fwd(s, mu), projector(mu, -1.0), u * -0.5);
            // D_{n+μ̂, n} = −½(1+σ_μ) U†_μ(n)
            add_block(&mut d, geom.fwd(s, mu), s, projector(mu, 1.0), u.conj() * -0.5);
        }
    }
    d
}

/// `∂D/∂q_a` built analytically entry by entry.
pub fn dense_dirac_derivative(geom: &LatticeGeom, angles: &[f64], link: usize, order: u32) -> DMatrix<C64> {
    let n = 2 * geom.volume();
    let mut d = DMatrix::<C64>::zeros(n, n);
    let (s, mu) = geom.link_site_dir(link);
    let u = C64::from_polar(1.0, angles[link]);
    let i = c(0.0, 1.0);
    let fwd_factor = i.powu(order);
    let bwd_factor = (-i).powu(order);
    add_block(&mut d, s, geom.fwd(s, mu), projector(mu, -1.0), u * fwd_factor * -0.5);
    add_block(&mut d, geom.fwd(s, mu), s, projector(mu, 1.0), u.conj() * bwd_factor * -0.5);
    d
}

pub fn to_dvec(psi: &SpinorField) -> DVector<C64> {
    DVector::from_iterator(psi.len(), psi.as_slice().iter().map(|z| c(z.re, z.im)))
}

pub fn from_dvec(geom: LatticeGeom, v: &DVector<C64>) -> SpinorField {
    SpinorField::from_vec(
        geom,
        v.iter().map(|z| num_complex::Complex64::new(z.re, z.im)).collect(),
    )
    .unwrap()
}

pub fn solve(m: &DMatrix<C64>, b: &DVector<C64>) -> DVector<C64> {
    m.clone().lu().solve(b).expect("nonsingular")
}

/// Dense `S_F = η†(D†D)⁻¹η`.
pub fn dense_fermion_action(geom: &LatticeGeom, angles: &[f64], m0: f64, eta: &DVector<C64>) -> f64 {
    let d = dense_dirac(geom, angles, m0);
    let chi = solve(&d.adjoint(), eta);
    chi.norm_squared()
}

/// Dense `(χ, ξ)`.
pub fn dense_chi_xi(geom: &LatticeGeom, angles: &[f64], m0: f64, eta: &DVector<C64>) -> (DVector<C64>, DVector<C64>) {
    let d = dense_dirac(geom, angles, m0);
    let chi = solve(&d.adjoint(), eta);
    let xi = solve(&d, &chi);
    (chi, xi)
}

/// Dense gradient `∂S_F/∂q_a = −2 Re χ† (∂D/∂q_a) ξ` for every link.
pub fn dense_fermion_gradient(geom: &LatticeGeom, angles: &[f64], m0: f64, eta: &DVector<C64>) -> Vec<f64> {
    let (chi, xi) = dense_chi_xi(geom, angles, m0, eta);
    (0..geom.n_links())
        .map(|a| {
            let da = dense_dirac_derivative(geom, angles, a, 1);
            -2.0 * (chi.adjoint() * da * &xi)[(0, 0)].re
        })
        .collect()
}

/// Naive plaquette action from complex link products.
pub fn naive_gauge_action(geom: &LatticeGeom, angles: &[f64], beta: f64) -> f64 {
    let u = |s: usize, mu: Dir| C64::from_polar(1.0, angles[geom.link(s, mu)]);
    geom.sites()
        .map(|n| {
            let p = u(n, Dir::X)
                * u(geom.fwd(n, Dir::X), Dir::T)
                * u(geom.fwd(n, Dir::T), Dir::X).conj()
                * u(n, Dir::T).conj();
            1.0 - p.re
        })
        .sum::<f64>()
        * beta
}

/// Central finite-difference gradient of a scalar function of the link angles.
pub fn fd_gradient<F: Fn(&[f64]) -> f64>(angles: &[f64], eps: f64, f: F) -> Vec<f64> {
    let mut q = angles.to_vec();
    (0..angles.len())
        .map(|a| {
            q[a] = angles[a] + eps;
            let up = f(&q);
            q[a] = angles[a] - eps;
            let dn = f(&q);
            q[a] = angles[a];
            (up - dn) / (2.0 * eps)
        })
        .collect()
}

/// `2 · d/dε G(q + ε w)|₀` by the five-point central stencil. The step along `w`
/// is `eps / max|w|` so the links move by at most `eps`.
pub fn directional_oracle<G: Fn(&[f64]) -> Vec<f64>>(angles: &[f64], w: &[f64], eps: f64, grad: G) -> Vec<f64> {
    let scale = w.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return vec![0.0; angles.len()];
    }
    let e = eps / scale;
    let at = |k: f64| -> Vec<f64> {
        let q: Vec<f64> = angles.iter().zip(w).map(|(q, w)| q + k * e * w).collect();
        grad(&q)
    };
    let (p2, p1, m1, m2) = (at(2.0), at(1.0), at(-1.0), at(-2.0));
    (0..angles.len())
        .map(|i| 2.0 * (-p2[i] + 8.0 * p1[i] - 8.0 * m1[i] + m2[i]) / (12.0 * e))
        .collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Random gauge field with angles drawn uniformly from `[-spread·π, spread·π)`.
pub fn random_gauge(geom: LatticeGeom, seed: u64, spread: f64) -> GaugeField {
    let mut rng = RngStream::new(seed, 77);
    let q = rng.uniform_angles(geom.n_links()).into_iter().map(|a| spread * a).collect();
    GaugeField::from_angles(geom, q).unwrap()
}

pub fn field_from(geom: LatticeGeom, angles: &[f64]) -> GaugeField {
    GaugeField::from_angles(geom, angles.to_vec()).unwrap()
}

pub fn link_vec(f: &LinkField) -> Vec<f64> {
    f.as_slice().to_vec()
}

/// Largest modulus of a complex vector.
pub fn cmax(v: &DVector<C64>) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
