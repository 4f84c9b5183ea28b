//! Plaquette gauge action, its force and the force-gradient pieces whose Hessian
//! comes from the gauge action.
//!
//! For a link `(n, μ)` with `ν` the other direction, plaquettes are oriented as
//! `U_μ(s) U_ν(s+μ̂) U†_μ(s+ν̂) U†_ν(s)`. The gauge force is `β g(n, μ)` with
//! `g(n, μ) = Im(P₁ − P₂)`; `g` itself carries no factor of `β`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{Dir, ForceField, GaugeField, LinkField};

/// Plaquette at site `n` in the `(x, t)` plane:
/// `U_x(n) U_t(n+x̂) U†_x(n+t̂) U†_t(n)`.
pub fn plaquette(u: &GaugeField, n: usize) -> Complex64 {
    Complex64::from_polar(1.0, plaquette_angle(u, n))
}

#[inline]
fn plaquette_angle(u: &GaugeField, n: usize) -> f64 {
    oriented_angle(u, Dir::X, n)
}

/// Angle of the plaquette at `s` traversed first along `mu`.
#[inline]
fn oriented_angle(u: &GaugeField, mu: Dir, s: usize) -> f64 {
    let g = u.geom();
    let nu = mu.other();
    u.angle(s, mu) + u.angle(g.fwd(s, mu), nu) - u.angle(g.fwd(s, nu), mu) - u.angle(s, nu)
}

/// `S_G = β Σ_n (1 − Re P(n))`
pub fn gauge_action(u: &GaugeField, beta: f64) -> f64 {
    beta * u
        .geom()
        .sites()
        .map(|n| 1.0 - plaquette_angle(u, n).cos())
        .sum::<f64>()
}

/// Mean plaquette `⟨Re P⟩`.
pub fn mean_plaquette(u: &GaugeField) -> f64 {
    let g = u.geom();
    g.sites().map(|n| plaquette_angle(u, n).cos()).sum::<f64>() / g.volume() as f64
}

/// `g(n, μ) = Im(P₁(n, μ) − P₂(n, μ))`, the gauge force without the coupling.
pub fn unit_gauge_force(u: &GaugeField) -> ForceField {
    let g = *u.geom();
    // The plaquette traversed first along t is the conjugate of the x-first one.
    let s: Vec<f64> = g.sites().map(|n| plaquette_angle(u, n).sin()).collect();
    let mut f = LinkField::zeros(g);
    for n in g.sites() {
        f.set(n, Dir::X, s[n] - s[g.bwd(n, Dir::T)]);
        f.set(n, Dir::T, s[g.bwd(n, Dir::X)] - s[n]);
    }
    f
}

/// `∂S_G/∂q_μ(n) = β g(n, μ)`
pub fn gauge_force(u: &GaugeField, beta: f64) -> ForceField {
    let mut f = unit_gauge_force(u);
    f.scale(beta);
    f
}

/// The eight plaquettes touching the two plaquettes that contain link `(n, μ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlaquetteSet(pub [Complex64; 8]);

impl PlaquetteSet {
    /// `Pᵢ`, one-based to match the usual numbering.
    pub fn p(&self, i: usize) -> Complex64 {
        self.0[i - 1]
    }
}

/// Base-site offsets `(steps along μ, steps along ν)` of `P₁ … P₈`.
pub const PLAQUETTE_SET_OFFSETS: [(isize, isize); 8] = [
    (0, 0),
    (0, -1),
    (1, 0),
    (0, 1),
    (-1, 0),
    (-1, -1),
    (0, -2),
    (1, -1),
];

pub fn plaquette_set(u: &GaugeField, n: usize, mu: Dir) -> PlaquetteSet {
    PlaquetteSet(plaquette_set_angles(u, n, mu).map(|a| Complex64::from_polar(1.0, a)))
}

fn plaquette_set_angles(u: &GaugeField, n: usize, mu: Dir) -> [f64; 8] {
    let g = u.geom();
    let nu = mu.other();
    PLAQUETTE_SET_OFFSETS.map(|(a, b)| {
        let s = g.shift_by(g.shift_by(n, mu, a), nu, b);
        oriented_angle(u, mu, s)
    })
}

/// Gauge–gauge force-gradient piece
/// `C_GG = 2 Σ ∂S_G/∂q_b ∂²S_G/∂q_b∂q_a`, in closed form over the plaquette set.
pub fn c_gg(u: &GaugeField, beta: f64) -> ForceField {
    let g = *u.geom();
    let mut out = LinkField::zeros(g);
    let pre = 2.0 * beta * beta;
    for n in g.sites() {
        for mu in Dir::ALL {
            let a = plaquette_set_angles(u, n, mu);
            let s = a.map(f64::sin);
            let re1 = a[0].cos();
            let re2 = a[1].cos();
            let t1 = (4.0 * s[0] - s[1] - s[2] - s[3] - s[4]) * re1;
            let t2 = (4.0 * s[1] - s[0] - s[5] - s[6] - s[7]) * re2;
            out.set(n, mu, pre * (t1 - t2));
        }
    }
    out
}

/// Fermion–gauge force-gradient piece: the gauge Hessian contracted with a
/// link field `f` (the fermion force), `2 Σ_b f_b ∂²S_G/∂q_b∂q_a`.
pub fn c_fg(u: &GaugeField, beta: f64, f: &ForceField) -> Result<ForceField> {
    let g = *u.geom();
    if f.geom() != &g {
        return Err(Error::ShapeMismatch {
            expected: g.n_links(),
            found: f.len(),
        });
    }
    let mut out = LinkField::zeros(g);
    for n in g.sites() {
        for mu in Dir::ALL {
            let nu = mu.other();
            let n_mu = g.fwd(n, mu);
            let n_nu = g.fwd(n, nu);
            let n_mnu = g.bwd(n, nu);
            let n_mu_mnu = g.bwd(n_mu, nu);
            let re1 = oriented_angle(u, mu, n).cos();
            let re2 = oriented_angle(u, mu, n_mnu).cos();
            let c1 = f.get(n, mu) + f.get(n_mu, nu) - f.get(n_nu, mu) - f.get(n, nu);
            let c2 = f.get(n, mu) - f.get(n_mu_mnu, nu) - f.get(n_mnu, mu) + f.get(n_mnu, nu);
            out.set(n, mu, 2.0 * beta * (c1 * re1 + c2 * re2));
        }
    }
    Ok(out)
}
