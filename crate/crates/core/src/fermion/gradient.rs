//! Force-gradient pieces with a fermionic Hessian.
//!
//! For a weight field `w` on the links, the contraction
//! `C(a) = 2 Σ_b w_b ∂²S_F/∂q_b∂q_a` is evaluated as
//!
//! ```text
//! C(a) = 4 Re[ Z₁† w₂,a + w₁,a† Z₂ − w_a χ† ∂²D/∂q_a² ξ ]
//! Z₁ = D†⁻¹ Σ_b w_b w₁,b
//! Z₂ = D⁻¹ (Σ_b w_b w₂,b + Z₁)
//! ```
//!
//! where `w₁,b = (∂D†/∂q_b) χ` and `w₂,b = (∂D/∂q_b) ξ` live on two sites each.
//! Summing over `b` before inverting keeps the cost at two inversions.
//! `C_FF` uses `w = f` (the fermion force), `C_GF` uses `w = β g` (the gauge force).

use num_complex::Complex64;

use super::action::{ChiXi, FermionForce};
use super::dirac::{dot, proj, scale, WilsonDirac};
use super::solver::{solve_dirac, solve_dirac_dagger, InversionCounter, SolverParams};
use crate::error::{Error, Result};
use crate::lattice::{Dir, ForceField, LinkField, SpinorField};

type Spin = [Complex64; 2];

const HALF_I: Complex64 = Complex64::new(0.0, 0.5);

/// Spinor with support on at most two sites.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SparseSpinor {
    pub entries: [(usize, Spin); 2],
}

impl SparseSpinor {
    pub fn to_dense(&self, geom: crate::lattice::LatticeGeom) -> SpinorField {
        let mut out = SpinorField::zeros(geom);
        for &(s, v) in &self.entries {
            out.add_site(s, v);
        }
        out
    }

    /// `⟨dense, self⟩`
    fn dot_from(&self, dense: &SpinorField) -> Complex64 {
        self.entries.iter().map(|&(s, v)| dot(dense.site(s), v)).sum()
    }

    /// `⟨self, dense⟩`
    fn dot_into(&self, dense: &SpinorField) -> Complex64 {
        self.entries.iter().map(|&(s, v)| dot(v, dense.site(s))).sum()
    }

    fn scatter(&self, weight: f64, out: &mut SpinorField) {
        for &(s, v) in &self.entries {
            out.add_site(s, [weight * v[0], weight * v[1]]);
        }
    }
}

/// `(w₁, w₂)` for link `(m, ν)`:
///
/// ```text
/// w₁(m+ν̂) =  (i/2)(1−σ_ν) U†_ν(m) χ(m)      w₁(m) = −(i/2)(1+σ_ν) U_ν(m) χ(m+ν̂)
/// w₂(m)    = −(i/2)(1−σ_ν) U_ν(m) ξ(m+ν̂)    w₂(m+ν̂) = (i/2)(1+σ_ν) U†_ν(m) ξ(m)
/// ```
pub fn w_vectors(d: &WilsonDirac, m: usize, nu: Dir, cx: &ChiXi) -> (SparseSpinor, SparseSpinor) {
    let g = d.geom();
    let mn = g.fwd(m, nu);
    let u = d.link(m, nu);
    let w1 = SparseSpinor {
        entries: [
            (mn, scale(HALF_I, proj(nu, -1.0, scale(u.conj(), cx.chi.site(m))))),
            (m, scale(-HALF_I, proj(nu, 1.0, scale(u, cx.chi.site(mn))))),
        ],
    };
    let w2 = SparseSpinor {
        entries: [
            (m, scale(-HALF_I, proj(nu, -1.0, scale(u, cx.xi.site(mn))))),
            (mn, scale(HALF_I, proj(nu, 1.0, scale(u.conj(), cx.xi.site(m))))),
        ],
    };
    (w1, w2)
}

/// `(∂²D/∂q_ν(m)²) ξ`, the hopping term of link `(m, ν)` with the opposite sign.
pub fn second_derivative_xi(d: &WilsonDirac, m: usize, nu: Dir, xi: &SpinorField) -> SparseSpinor {
    let g = d.geom();
    let mn = g.fwd(m, nu);
    let u = d.link(m, nu);
    let half = Complex64::new(0.5, 0.0);
    SparseSpinor {
        entries: [
            (m, scale(half, proj(nu, -1.0, scale(u, xi.site(mn))))),
            (mn, scale(half, proj(nu, 1.0, scale(u.conj(), xi.site(m))))),
        ],
    }
}

/// Aggregated auxiliary fields of the Hessian contraction.
#[derive(Clone, Debug)]
pub struct ZFields {
    pub z1: SpinorField,
    pub z2: SpinorField,
}

/// `Z₁ = D†⁻¹ Σ w₁·weight`, `Z₂ = D⁻¹(Σ w₂·weight + Z₁)`; counts two inversions.
pub fn z_aggregate(
    d: &WilsonDirac,
    weight: &ForceField,
    cx: &ChiXi,
    params: SolverParams,
    counter: &InversionCounter,
) -> Result<ZFields> {
    let g = *d.geom();
    if weight.geom() != &g {
        return Err(Error::ShapeMismatch {
            expected: g.n_links(),
            found: weight.len(),
        });
    }
    let mut sum1 = SpinorField::zeros(g);
    let mut sum2 = SpinorField::zeros(g);
    for m in g.sites() {
        for nu in Dir::ALL {
            let w = weight.get(m, nu);
            if w == 0.0 {
                continue;
            }
            let (w1, w2) = w_vectors(d, m, nu, cx);
            w1.scatter(w, &mut sum1);
            w2.scatter(w, &mut sum2);
        }
    }
    let (z1, _) = solve_dirac_dagger(d, &sum1, params, counter)?;
    sum2.axpy(Complex64::new(1.0, 0.0), &z1);
    let (z2, _) = solve_dirac(d, &sum2, params, counter)?;
    Ok(ZFields { z1, z2 })
}

/// `2 Σ_b weight_b ∂²S_F/∂q_b∂q_a` for every link `a`; counts two inversions.
pub fn fermion_hessian_contraction(
    d: &WilsonDirac,
    weight: &ForceField,
    cx: &ChiXi,
    params: SolverParams,
    counter: &InversionCounter,
) -> Result<ForceField> {
    let g = *d.geom();
    let z = z_aggregate(d, weight, cx, params, counter)?;
    let mut out = LinkField::zeros(g);
    for n in g.sites() {
        for mu in Dir::ALL {
            let (w1, w2) = w_vectors(d, n, mu, cx);
            let dd = second_derivative_xi(d, n, mu, &cx.xi);
            let v = w2.dot_from(&z.z1) + w1.dot_into(&z.z2) - weight.get(n, mu) * dd.dot_from(&cx.chi);
            out.set(n, mu, 4.0 * v.re);
        }
    }
    Ok(out)
}

/// `C_FF = 2 Σ_b f_b ∂²S_F/∂q_b∂q_a` from a precomputed fermion force.
pub fn c_ff_from(
    d: &WilsonDirac,
    ff: &FermionForce,
    params: SolverParams,
    counter: &InversionCounter,
) -> Result<ForceField> {
    fermion_hessian_contraction(d, &ff.force, &ff.aux, params, counter)
}

/// `C_GF = 2 Σ_b βg_b ∂²S_F/∂q_b∂q_a` from a precomputed gauge force `βg`.
pub fn c_gf_from(
    d: &WilsonDirac,
    gauge_force: &ForceField,
    aux: &ChiXi,
    params: SolverParams,
    counter: &InversionCounter,
) -> Result<ForceField> {
    fermion_hessian_contraction(d, gauge_force, aux, params, counter)
}

/// `C_FF` from scratch: force (2 inversions) plus the Z pair (2 inversions).
pub fn c_ff(
    d: &WilsonDirac,
    eta: &SpinorField,
    params: SolverParams,
    counter: &InversionCounter,
) -> Result<ForceField> {
    let ff = super::action::compute_fermion_force(d, eta, params, counter)?;
    c_ff_from(d, &ff, params, counter)
}

/// `C_GF` from scratch: `χ, ξ` (2 inversions) plus the Z pair (2 inversions).
pub fn c_gf(
    d: &WilsonDirac,
    u: &crate::lattice::GaugeField,
    eta: &SpinorField,
    beta: f64,
    params: SolverParams,
    counter: &InversionCounter,
) -> Result<ForceField> {
    let aux = super::action::chi_xi(d, eta, params, counter)?;
    let bg = crate::gauge::gauge_force(u, beta);
    c_gf_from(d, &bg, &aux, params, counter)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermion::action::chi_xi;
    use crate::lattice::{GaugeField, LatticeGeom, RngStream};

    fn setup() -> (GaugeField, WilsonDirac, SpinorField) {
        let g = LatticeGeom::new(4, 4).unwrap();
        let mut rng = RngStream::new(31, 0);
        let u = GaugeField::from_angles(g, rng.uniform_angles(g.n_links())).unwrap();
        let d = WilsonDirac::new(&u, 0.2);
        let eta = rng.sample_spinor(g);
        (u, d, eta)
    }

    #[test]
    fn w_vectors_vanish_for_zero_aux() {
        let (_, d, _) = setup();
        let g = *d.geom();
        let cx = ChiXi {
            chi: SpinorField::zeros(g),
            xi: SpinorField::zeros(g),
        };
        let (w1, w2) = w_vectors(&d, 3, Dir::T, &cx);
        assert!(w1.to_dense(g).is_zero() && w2.to_dense(g).is_zero());
    }

    #[test]
    fn w_vectors_support() {
        let (_, d, eta) = setup();
        let g = *d.geom();
        let cx = chi_xi(&d, &eta, SolverParams::default(), &InversionCounter::new()).unwrap();
        let m = g.site(2, 1);
        for nu in Dir::ALL {
            let (w1, w2) = w_vectors(&d, m, nu, &cx);
            for w in [w1, w2] {
                let dense = w.to_dense(g);
                for s in g.sites() {
                    if s != m && s != g.fwd(m, nu) {
                        assert!(dense.site(s).iter().all(|z| *z == Complex64::new(0.0, 0.0)));
                    }
                }
            }
        }
    }

    #[test]
    fn zero_weight_gives_zero_z() {
        let (_, d, eta) = setup();
        let counter = InversionCounter::new();
        let cx = chi_xi(&d, &eta, SolverParams::default(), &counter).unwrap();
        let z = z_aggregate(&d, &LinkField::zeros(*d.geom()), &cx, SolverParams::default(), &counter).unwrap();
        assert!(z.z1.is_zero() && z.z2.is_zero());
        assert_eq!(counter.get(), 4);
    }

    #[test]
    fn z_defining_equations() {
        let (_, d, eta) = setup();
        let g = *d.geom();
        let counter = InversionCounter::new();
        let params = SolverParams::new(1e-12);
        let cx = chi_xi(&d, &eta, params, &counter).unwrap();
        let weight = fermion_force_for(&d, &cx);
        let z = z_aggregate(&d, &weight, &cx, params, &counter).unwrap();
        let mut s1 = SpinorField::zeros(g);
        let mut s2 = SpinorField::zeros(g);
        for m in g.sites() {
            for nu in Dir::ALL {
                let (w1, w2) = w_vectors(&d, m, nu, &cx);
                w1.scatter(weight.get(m, nu), &mut s1);
                w2.scatter(weight.get(m, nu), &mut s2);
            }
        }
        s2.axpy(Complex64::new(1.0, 0.0), &z.z1);
        let mut r1 = d.apply_dagger(&z.z1);
        r1.axpy(Complex64::new(-1.0, 0.0), &s1);
        let mut r2 = d.apply(&z.z2);
        r2.axpy(Complex64::new(-1.0, 0.0), &s2);
        assert!(r1.norm() / s1.norm() < 1e-10);
        assert!(r2.norm() / s2.norm() < 1e-10);
    }

    #[test]
    fn c_gf_vanishes_at_zero_coupling_and_is_linear_in_beta() {
        let (u, d, eta) = setup();
        let params = SolverParams::new(1e-12);
        let counter = InversionCounter::new();
        let zero = c_gf(&d, &u, &eta, 0.0, params, &counter).unwrap();
        assert!(zero.as_slice().iter().all(|&x| x == 0.0));
        assert_eq!(counter.get(), 4);
        let one = c_gf(&d, &u, &eta, 0.9, params, &counter).unwrap();
        let two = c_gf(&d, &u, &eta, 1.8, params, &counter).unwrap();
        for (a, b) in one.as_slice().iter().zip(two.as_slice()) {
            assert!((2.0 * a - b).abs() < 1e-8 * b.abs().max(1.0));
        }
    }

    #[test]
    fn c_ff_scales_with_fourth_power_of_source() {
        let (_, d, eta) = setup();
        let params = SolverParams::new(1e-12);
        let counter = InversionCounter::new();
        let base = c_ff(&d, &eta, params, &counter).unwrap();
        assert_eq!(counter.get(), 4);
        let mut eta2 = eta.clone();
        eta2.scale(Complex64::new(1.5, 0.0));
        let scaled = c_ff(&d, &eta2, params, &counter).unwrap();
        let k = 1.5f64.powi(4);
        for (a, b) in base.as_slice().iter().zip(scaled.as_slice()) {
            assert!((k * a - b).abs() < 1e-8 * b.abs().max(1.0));
        }
        let zero = c_ff(&d, &SpinorField::zeros(*d.geom()), params, &counter).unwrap();
        assert!(zero.as_slice().iter().all(|&x| x == 0.0));
    }

    fn fermion_force_for(d: &WilsonDirac, cx: &ChiXi) -> ForceField {
        crate::fermion::action::fermion_force(d, cx)
    }
}
