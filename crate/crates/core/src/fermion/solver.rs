use std::sync::atomic::{AtomicU64, Ordering};

use num_complex::Complex64;

use super::dirac::WilsonDirac;
use crate::error::{Error, Result};
use crate::lattice::SpinorField;

/// Default relative residual for all Dirac solves.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

/// Running count of Dirac-operator inversions. A solve with `D` or `D†` counts as one,
/// a solve with `D†D` as two.
#[derive(Debug, Default)]
pub struct InversionCounter(AtomicU64);

impl InversionCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&self, n: u64) {
        self.0.fetch_add(n, Ordering::Relaxed);
    }

    pub fn get(&self) -> u64 {
        self.0.load(Ordering::Relaxed)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    /// `‖D†D x − b‖ / ‖b‖`, recomputed from the returned solution.
    pub relative_residual: f64,
    pub inversions: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverParams {
    pub tol: f64,
    pub max_iterations: usize,
}

impl SolverParams {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            max_iterations: 20_000,
        }
    }
}

impl Default for SolverParams {
    fn default() -> Self {
        Self::new(DEFAULT_TOLERANCE)
    }
}

/// Conjugate gradient on `D†D x = b`.
///
/// The recursive residual is checked against the true residual on convergence and
/// CG is restarted from the current iterate if they disagree. When restarts stop
/// reducing the true residual and it lies within the rounding error of evaluating
/// `D†D x` itself, the iterate is returned with that residual in the report.
pub fn cg_normal(d: &WilsonDirac, b: &SpinorField, params: SolverParams) -> Result<(SpinorField, SolveReport)> {
    let geom = *d.geom();
    let b_norm = b.norm();
    if b_norm == 0.0 {
        return Ok((
            SpinorField::zeros(geom),
            SolveReport {
                iterations: 0,
                relative_residual: 0.0,
                inversions: 0,
            },
        ));
    }
    let target = params.tol * b_norm;
    let mut x = SpinorField::zeros(geom);
    let mut r = b.clone();
    let mut iterations = 0;
    let mut true_res;

    let mut best = f64::INFINITY;
    loop {
        let mut p = r.clone();
        let mut rr = r.norm_sqr();
        while rr.sqrt() > target && iterations < params.max_iterations {
            let ap = d.apply_normal(&p);
            let pap = p.dot(&ap).re;
            let alpha = rr / pap;
            x.axpy(Complex64::new(alpha, 0.0), &p);
            r.axpy(Complex64::new(-alpha, 0.0), &ap);
            let rr_new = r.norm_sqr();
            let beta = rr_new / rr;
            rr = rr_new;
            for (pi, ri) in p.as_mut_slice().iter_mut().zip(r.as_slice()) {
                *pi = ri + beta * *pi;
            }
            iterations += 1;
        }
        let mut res = b.clone();
        res.axpy(Complex64::new(-1.0, 0.0), &d.apply_normal(&x));
        true_res = res.norm();
        let stalled = true_res > 0.5 * best;
        if true_res <= target || (stalled && true_res <= rounding_floor(d, &x)) {
            return Ok((
                x,
                SolveReport {
                    iterations,
                    relative_residual: true_res / b_norm,
                    inversions: 0,
                },
            ));
        }
        if iterations >= params.max_iterations || (stalled && best.is_finite()) {
            break;
        }
        best = best.min(true_res);
        r = res;
    }
    Err(Error::SolverNotConverged {
        iterations,
        residual: true_res / b_norm,
    })
}

/// Bound on the rounding error of `D†D x` in double precision.
fn rounding_floor(d: &WilsonDirac, x: &SpinorField) -> f64 {
    let norm_d = (2.0 + d.m0()).abs() + 2.0;
    64.0 * f64::EPSILON * norm_d * norm_d * x.norm()
}

/// Solve `(D†D) x = b`; counts two inversions.
pub fn solve_normal(
    d: &WilsonDirac,
    b: &SpinorField,
    params: SolverParams,
    counter: &InversionCounter,
) -> Result<(SpinorField, SolveReport)> {
    let (x, mut report) = cg_normal(d, b, params)?;
    report.inversions = 2;
    counter.add(2);
    Ok((x, report))
}

/// Solve `D x = b` via `x = (D†D)⁻¹ D† b`; counts one inversion.
pub fn solve_dirac(
    d: &WilsonDirac,
    b: &SpinorField,
    params: SolverParams,
    counter: &InversionCounter,
) -> Result<(SpinorField, SolveReport)> {
    let (x, mut report) = cg_normal(d, &d.apply_dagger(b), params)?;
    report.inversions = 1;
    counter.add(1);
    Ok((x, report))
}

/// Solve `D† x = b` via `x = D (D†D)⁻¹ b`; counts one inversion.
pub fn solve_dirac_dagger(
    d: &WilsonDirac,
    b: &SpinorField,
    params: SolverParams,
    counter: &InversionCounter,
) -> Result<(SpinorField, SolveReport)> {
    let (y, mut report) = cg_normal(d, b, params)?;
    report.inversions = 1;
    counter.add(1);
    Ok((d.apply(&y), report))
}
