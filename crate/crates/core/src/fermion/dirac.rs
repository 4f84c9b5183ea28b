use num_complex::Complex64;

use crate::lattice::{Dir, GaugeField, LatticeGeom, SpinorField};

type Spin = [Complex64; 2];

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `(1 + s σ_μ) v` with `s = ±1`.
///
/// `σ₁ = [[0, 1], [1, 0]]`, `σ₂ = [[0, −i], [i, 0]]`.
#[inline]
pub(crate) fn proj(mu: Dir, s: f64, v: Spin) -> Spin {
    match mu {
        Dir::X => [v[0] + s * v[1], v[1] + s * v[0]],
        Dir::T => [v[0] - s * I * v[1], v[1] + s * I * v[0]],
    }
}

#[inline]
pub(crate) fn scale(a: Complex64, v: Spin) -> Spin {
    [a * v[0], a * v[1]]
}

#[inline]
pub(crate) fn dot(a: Spin, b: Spin) -> Complex64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

/// Wilson–Dirac operator on a fixed gauge background.
///
/// `(Dψ)(n) = (2+m₀)ψ(n) − ½ Σ_μ [(1−σ_μ) U_μ(n) ψ(n+μ̂) + (1+σ_μ) U†_μ(n−μ̂) ψ(n−μ̂)]`
#[derive(Clone, Debug)]
pub struct WilsonDirac {
    geom: LatticeGeom,
    links: Vec<Complex64>,
    hops: Vec<[Hop; 2]>,
    m0: f64,
}

/// Neighbours of one site along one direction with the links that reach them.
#[derive(Clone, Copy, Debug)]
struct Hop {
    fwd: usize,
    u_fwd: Complex64,
    bwd: usize,
    u_bwd_conj: Complex64,
}

impl WilsonDirac {
    pub fn new(u: &GaugeField, m0: f64) -> Self {
        let geom = *u.geom();
        let links = u.links();
        let hops = geom
            .sites()
            .map(|n| {
                Dir::ALL.map(|mu| {
                    let bwd = geom.bwd(n, mu);
                    Hop {
                        fwd: geom.fwd(n, mu),
                        u_fwd: links[geom.link(n, mu)],
                        bwd,
                        u_bwd_conj: links[geom.link(bwd, mu)].conj(),
                    }
                })
            })
            .collect();
        Self { geom, links, hops, m0 }
    }

    #[inline]
    pub fn geom(&self) -> &LatticeGeom {
        &self.geom
    }

    #[inline]
    pub fn m0(&self) -> f64 {
        self.m0
    }

    #[inline]
    pub fn link(&self, site: usize, mu: Dir) -> Complex64 {
        self.links[self.geom.link(site, mu)]
    }

    /// `Dψ`
    pub fn apply(&self, psi: &SpinorField) -> SpinorField {
        self.apply_impl::<false>(psi)
    }

    /// `D†ψ`. Hermitian conjugation swaps the two spin projectors.
    pub fn apply_dagger(&self, psi: &SpinorField) -> SpinorField {
        self.apply_impl::<true>(psi)
    }

    /// `D†Dψ`
    pub fn apply_normal(&self, psi: &SpinorField) -> SpinorField {
        self.apply_dagger(&self.apply(psi))
    }

    fn apply_impl<const DAGGER: bool>(&self, psi: &SpinorField) -> SpinorField {
        // D† is D with σ_μ → −σ_μ.
        let s = if DAGGER { -1.0 } else { 1.0 };
        let diag = 2.0 + self.m0;
        let src = psi.as_slice();
        let mut out = SpinorField::zeros(self.geom);
        for (n, (h, dst)) in self.hops.iter().zip(out.as_mut_slice().chunks_exact_mut(2)).enumerate() {
            let [hx, ht] = h;
            // x: (1 − sσ₁) w + (1 + sσ₁) y
            let w = [hx.u_fwd * src[2 * hx.fwd], hx.u_fwd * src[2 * hx.fwd + 1]];
            let y = [hx.u_bwd_conj * src[2 * hx.bwd], hx.u_bwd_conj * src[2 * hx.bwd + 1]];
            let mut a0 = (w[0] + y[0]) - (w[1] - y[1]) * s;
            let mut a1 = (w[1] + y[1]) - (w[0] - y[0]) * s;
            // t: (1 − sσ₂) w + (1 + sσ₂) y, with σ₂ v = (−i v₁, i v₀)
            let w = [ht.u_fwd * src[2 * ht.fwd], ht.u_fwd * src[2 * ht.fwd + 1]];
            let y = [ht.u_bwd_conj * src[2 * ht.bwd], ht.u_bwd_conj * src[2 * ht.bwd + 1]];
            a0 += (w[0] + y[0]) + mul_i(w[1] - y[1]) * s;
            a1 += (w[1] + y[1]) - mul_i(w[0] - y[0]) * s;
            dst[0] = diag * src[2 * n] - 0.5 * a0;
            dst[1] = diag * src[2 * n + 1] - 0.5 * a1;
        }
        out
    }
}

#[inline(always)]
fn mul_i(z: Complex64) -> Complex64 {
    Complex64::new(-z.im, z.re)
}

/// `Dψ` for the gauge field `u` and bare mass `m0`.
pub fn apply_dirac(u: &GaugeField, m0: f64, psi: &SpinorField) -> SpinorField {
    WilsonDirac::new(u, m0).apply(psi)
}

/// `D†ψ` for the gauge field `u` and bare mass `m0`.
pub fn apply_dirac_dagger(u: &GaugeField, m0: f64, psi: &SpinorField) -> SpinorField {
    WilsonDirac::new(u, m0).apply_dagger(psi)
}

/// Sitewise `σ₃ = diag(1, −1)`.
pub fn apply_sigma3(psi: &SpinorField) -> SpinorField {
    let mut out = psi.clone();
    for n in psi.geom().sites() {
        let v = psi.site(n);
        out.set_site(n, [v[0], -v[1]]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::RngStream;

    fn setup(seed: u64) -> (GaugeField, SpinorField, SpinorField) {
        let g = LatticeGeom::new(4, 6).unwrap();
        let mut rng = RngStream::new(seed, 0);
        let u = GaugeField::from_angles(g, rng.uniform_angles(g.n_links())).unwrap();
        (u, rng.sample_spinor(g), rng.sample_spinor(g))
    }

    #[test]
    fn constant_spinor_on_unit_links_sees_the_bare_mass() {
        let g = LatticeGeom::new(4, 4).unwrap();
        let u = GaugeField::cold(g);
        let mut psi = SpinorField::zeros(g);
        let c = [Complex64::new(0.3, -1.2), Complex64::new(0.7, 0.4)];
        for n in g.sites() {
            psi.set_site(n, c);
        }
        let m0 = -0.231367;
        for out in [apply_dirac(&u, m0, &psi), apply_dirac_dagger(&u, m0, &psi)] {
            for n in g.sites() {
                let v = out.site(n);
                assert!((v[0] - m0 * c[0]).norm() < 1e-14);
                assert!((v[1] - m0 * c[1]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn point_source_stencil() {
        let g = LatticeGeom::new(4, 4).unwrap();
        let u = GaugeField::cold(g);
        let n = g.site(1, 2);
        let e = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let mut psi = SpinorField::zeros(g);
        psi.set_site(n, e);
        let out = apply_dirac(&u, 0.0, &psi);
        let close = |a: Spin, b: Spin| (a[0] - b[0]).norm() < 1e-15 && (a[1] - b[1]).norm() < 1e-15;
        assert!(close(out.site(n), [2.0 * e[0], 2.0 * e[1]]));
        for mu in Dir::ALL {
            // site n−μ̂ reaches n through its forward hop: −½(1−σ_μ)e
            assert!(close(out.site(g.bwd(n, mu)), scale(Complex64::new(-0.5, 0.0), proj(mu, -1.0, e))));
            // site n+μ̂ reaches n through its backward hop: −½(1+σ_μ)e
            assert!(close(out.site(g.fwd(n, mu)), scale(Complex64::new(-0.5, 0.0), proj(mu, 1.0, e))));
        }
        let touched: Vec<usize> = g
            .sites()
            .filter(|&s| out.site(s).iter().any(|z| z.norm() > 0.0))
            .collect();
        assert_eq!(touched.len(), 5);
    }

    #[test]
    fn adjoint_identity() {
        for seed in 0..4 {
            let (u, phi, psi) = setup(seed);
            let d = WilsonDirac::new(&u, -0.231367);
            let lhs = phi.dot(&d.apply(&psi));
            let rhs = d.apply_dagger(&phi).dot(&psi);
            assert!((lhs - rhs).norm() < 1e-12 * lhs.norm());
        }
    }

    #[test]
    fn gamma5_hermiticity() {
        let (u, psi, _) = setup(7);
        let d = WilsonDirac::new(&u, 0.1);
        let lhs = apply_sigma3(&d.apply(&apply_sigma3(&psi)));
        let rhs = d.apply_dagger(&psi);
        for (a, b) in lhs.as_slice().iter().zip(rhs.as_slice()) {
            assert!((a - b).norm() < 1e-13);
        }
    }
}
