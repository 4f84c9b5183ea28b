use super::dirac::{dot, proj, scale, WilsonDirac};
use super::solver::{solve_normal, InversionCounter, SolverParams};
use crate::error::Result;
use crate::lattice::{Dir, ForceField, LinkField, RngStream, SpinorField};

/// Pseudofermion refresh: `η = D†φ` with unit complex normal `φ`, so that
/// `S_F(η) = ‖φ‖²`. Returns `(η, φ)`.
pub fn pseudofermion_heatbath(d: &WilsonDirac, rng: &mut RngStream) -> (SpinorField, SpinorField) {
    let phi = rng.sample_spinor(*d.geom());
    (d.apply_dagger(&phi), phi)
}

/// `S_F = η†(D†D)⁻¹η`
pub fn fermion_action(
    d: &WilsonDirac,
    eta: &SpinorField,
    params: SolverParams,
    counter: &InversionCounter,
) -> Result<f64> {
    let (x, _) = solve_normal(d, eta, params, counter)?;
    Ok(eta.dot(&x).re)
}

/// Auxiliary fields of the fermion force: `χ = D†⁻¹η`, `ξ = D⁻¹χ`.
#[derive(Clone, Debug)]
pub struct ChiXi {
    pub chi: SpinorField,
    pub xi: SpinorField,
}

/// One `D†D` solve gives `ξ`, and `χ = Dξ`; counts two inversions.
pub fn chi_xi(
    d: &WilsonDirac,
    eta: &SpinorField,
    params: SolverParams,
    counter: &InversionCounter,
) -> Result<ChiXi> {
    let (xi, _) = solve_normal(d, eta, params, counter)?;
    let chi = d.apply(&xi);
    Ok(ChiXi { chi, xi })
}

/// `f(n, μ) = ∂S_F/∂q_μ(n)
///          = −Im[χ†(n)(1−σ_μ)U_μ(n)ξ(n+μ̂) − χ†(n+μ̂)(1+σ_μ)U†_μ(n)ξ(n)]`
pub fn fermion_force(d: &WilsonDirac, cx: &ChiXi) -> ForceField {
    let g = *d.geom();
    let mut f = LinkField::zeros(g);
    for n in g.sites() {
        for mu in Dir::ALL {
            let m = g.fwd(n, mu);
            let u = d.link(n, mu);
            let a = dot(cx.chi.site(n), proj(mu, -1.0, scale(u, cx.xi.site(m))));
            let b = dot(cx.chi.site(m), proj(mu, 1.0, scale(u.conj(), cx.xi.site(n))));
            f.set(n, mu, -(a - b).im);
        }
    }
    f
}

/// Force and its auxiliary fields for one pseudofermion background.
#[derive(Clone, Debug)]
pub struct FermionForce {
    pub aux: ChiXi,
    pub force: ForceField,
}

pub fn compute_fermion_force(
    d: &WilsonDirac,
    eta: &SpinorField,
    params: SolverParams,
    counter: &InversionCounter,
) -> Result<FermionForce> {
    let aux = chi_xi(d, eta, params, counter)?;
    let force = fermion_force(d, &aux);
    Ok(FermionForce { aux, force })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{GaugeField, LatticeGeom};
    use num_complex::Complex64;

    #[test]
    fn heatbath_identity() {
        let g = LatticeGeom::new(4, 4).unwrap();
        let mut rng = RngStream::new(5, 0);
        let u = GaugeField::from_angles(g, rng.uniform_angles(g.n_links())).unwrap();
        let d = WilsonDirac::new(&u, -0.231367);
        let (eta, phi) = pseudofermion_heatbath(&d, &mut rng);
        let counter = InversionCounter::new();
        let s = fermion_action(&d, &eta, SolverParams::new(1e-12), &counter).unwrap();
        assert!((s - phi.norm_sqr()).abs() < 1e-10 * s);
        assert_eq!(counter.get(), 2);
    }

    #[test]
    fn zero_source() {
        let g = LatticeGeom::new(4, 4).unwrap();
        let d = WilsonDirac::new(&GaugeField::cold(g), 0.3);
        let counter = InversionCounter::new();
        let eta = SpinorField::zeros(g);
        assert_eq!(fermion_action(&d, &eta, SolverParams::default(), &counter).unwrap(), 0.0);
        let ff = compute_fermion_force(&d, &eta, SolverParams::default(), &counter).unwrap();
        assert!(ff.force.as_slice().iter().all(|&x| x == 0.0));
        assert_eq!(counter.get(), 4);
    }

    #[test]
    fn free_field_constant_mode() {
        let g = LatticeGeom::new(4, 4).unwrap();
        let m0 = -0.231367;
        let d = WilsonDirac::new(&GaugeField::cold(g), m0);
        let c = [Complex64::new(1.0, 0.5), Complex64::new(-0.2, 0.3)];
        let mut eta = SpinorField::zeros(g);
        for n in g.sites() {
            eta.set_site(n, c);
        }
        let counter = InversionCounter::new();
        let cx = chi_xi(&d, &eta, SolverParams::new(1e-13), &counter).unwrap();
        assert_eq!(counter.get(), 2);
        for n in g.sites() {
            for s in 0..2 {
                assert!((cx.chi.site(n)[s] - c[s] / m0).norm() < 1e-10);
                assert!((cx.xi.site(n)[s] - c[s] / (m0 * m0)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn defining_equations_hold() {
        let g = LatticeGeom::new(6, 4).unwrap();
        let mut rng = RngStream::new(8, 0);
        let u = GaugeField::from_angles(g, rng.uniform_angles(g.n_links())).unwrap();
        let d = WilsonDirac::new(&u, 0.1);
        let eta = rng.sample_spinor(g);
        let cx = chi_xi(&d, &eta, SolverParams::new(1e-12), &InversionCounter::new()).unwrap();
        let mut r1 = d.apply_dagger(&cx.chi);
        r1.axpy(Complex64::new(-1.0, 0.0), &eta);
        let mut r2 = d.apply(&cx.xi);
        r2.axpy(Complex64::new(-1.0, 0.0), &cx.chi);
        assert!(r1.norm() / eta.norm() < 1e-10);
        assert!(r2.norm() / cx.chi.norm() < 1e-10);
    }
}
