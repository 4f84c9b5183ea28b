use super::FORCE_GRADIENT_SIGN;
use crate::error::Result;
use crate::fermion::{
    c_ff_from, c_gf_from, compute_fermion_force, fermion_action, InversionCounter, SolverParams,
    WilsonDirac,
};
use crate::gauge::{c_fg, c_gg, gauge_action, gauge_force};
use crate::lattice::{ForceField, GaugeField, MomentumField, SpinorField};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ActionParams {
    pub beta: f64,
    pub m0: f64,
    pub solver: SolverParams,
}

impl ActionParams {
    pub fn new(beta: f64, m0: f64, tol: f64) -> Self {
        Self {
            beta,
            m0,
            solver: SolverParams::new(tol),
        }
    }
}

/// Phase-space point of one molecular-dynamics trajectory. The pseudofermion `eta`
/// is fixed for the whole trajectory.
#[derive(Debug)]
pub struct MdState {
    pub u: GaugeField,
    pub p: MomentumField,
    eta: SpinorField,
    pub params: ActionParams,
    counter: InversionCounter,
}

impl Clone for MdState {
    fn clone(&self) -> Self {
        let counter = InversionCounter::new();
        counter.add(self.counter.get());
        Self {
            u: self.u.clone(),
            p: self.p.clone(),
            eta: self.eta.clone(),
            params: self.params,
            counter,
        }
    }
}

impl MdState {
    pub fn new(u: GaugeField, p: MomentumField, eta: SpinorField, params: ActionParams) -> Self {
        Self {
            u,
            p,
            eta,
            params,
            counter: InversionCounter::new(),
        }
    }

    pub fn eta(&self) -> &SpinorField {
        &self.eta
    }

    /// Dirac inversions performed by force evaluations so far.
    pub fn inversions(&self) -> u64 {
        self.counter.get()
    }

    pub fn dirac(&self) -> WilsonDirac {
        WilsonDirac::new(&self.u, self.params.m0)
    }

    /// `H = ½Σp² + S_G + S_F`. The solve is not charged to the trajectory counter.
    pub fn hamiltonian(&self) -> Result<f64> {
        let (s_g, s_f) = self.actions()?;
        Ok(self.p.kinetic_energy() + s_g + s_f)
    }

    /// `(S_G, S_F)` at the current links.
    pub fn actions(&self) -> Result<(f64, f64)> {
        let s_g = gauge_action(&self.u, self.params.beta);
        let s_f = if self.eta.is_zero() {
            0.0
        } else {
            fermion_action(&self.dirac(), &self.eta, self.params.solver, &InversionCounter::new())?
        };
        Ok((s_g, s_f))
    }

    /// `U ← exp(i dt P) U`
    pub fn drift(&mut self, dt: f64) {
        self.u.exp_update(&self.p, dt).expect("momenta match the gauge field");
    }

    fn apply_kick(&mut self, force: &ForceField, dt: f64) {
        self.p.shift_momenta(force, dt).expect("force matches momenta");
    }

    pub fn gauge_force(&self) -> ForceField {
        gauge_force(&self.u, self.params.beta)
    }

    /// Fermion force; two inversions.
    pub fn fermion_force(&self) -> Result<ForceField> {
        Ok(compute_fermion_force(&self.dirac(), &self.eta, self.params.solver, &self.counter)?.force)
    }

    /// Gauge plus fermion force; two inversions.
    pub fn full_force(&self) -> Result<ForceField> {
        let mut f = self.fermion_force()?;
        f.axpy(1.0, &self.gauge_force())?;
        Ok(f)
    }

    pub fn kick_gauge(&mut self, dt: f64) {
        let f = self.gauge_force();
        self.apply_kick(&f, dt);
    }

    pub fn kick_fermion(&mut self, dt: f64) -> Result<()> {
        let f = self.fermion_force()?;
        self.apply_kick(&f, dt);
        Ok(())
    }

    pub fn kick_full(&mut self, dt: f64) -> Result<()> {
        let f = self.full_force()?;
        self.apply_kick(&f, dt);
        Ok(())
    }

    fn apply_fg_kick(&mut self, force: &ForceField, gradient: &ForceField, b_dt: f64, c_dt3: f64) {
        self.apply_kick(force, b_dt);
        self.apply_kick(gradient, FORCE_GRADIENT_SIGN * c_dt3);
    }

    /// Force-gradient kick of the gauge action alone, using `C_GG`.
    pub fn kick_fg_gauge(&mut self, b_dt: f64, c_dt3: f64) {
        let f = self.gauge_force();
        let c = c_gg(&self.u, self.params.beta);
        self.apply_fg_kick(&f, &c, b_dt, c_dt3);
    }

    /// Force-gradient kick of the fermion action alone, using `C_FF`; four inversions.
    pub fn kick_fg_fermion(&mut self, b_dt: f64, c_dt3: f64) -> Result<()> {
        let d = self.dirac();
        let ff = compute_fermion_force(&d, &self.eta, self.params.solver, &self.counter)?;
        let c = c_ff_from(&d, &ff, self.params.solver, &self.counter)?;
        self.apply_fg_kick(&ff.force, &c, b_dt, c_dt3);
        Ok(())
    }

    /// Force-gradient kick of the full action, `C = C_GG + C_FG + C_GF + C_FF`; six inversions.
    pub fn kick_fg_full(&mut self, b_dt: f64, c_dt3: f64) -> Result<()> {
        let (force, c) = self.full_force_gradient()?;
        self.apply_fg_kick(&force, &c, b_dt, c_dt3);
        Ok(())
    }

    /// Full force and full force-gradient term at the current links; six inversions.
    pub fn full_force_gradient(&self) -> Result<(ForceField, ForceField)> {
        let beta = self.params.beta;
        let solver = self.params.solver;
        let d = self.dirac();
        let ff = compute_fermion_force(&d, &self.eta, solver, &self.counter)?;
        let fg = gauge_force(&self.u, beta);
        let mut c = c_gg(&self.u, beta);
        c.axpy(1.0, &c_fg(&self.u, beta, &ff.force)?)?;
        c.axpy(1.0, &c_gf_from(&d, &fg, &ff.aux, solver, &self.counter)?)?;
        c.axpy(1.0, &c_ff_from(&d, &ff, solver, &self.counter)?)?;
        let mut force = ff.force;
        force.axpy(1.0, &fg)?;
        Ok((force, c))
    }

    /// Force-gradient kick without second derivatives: the full force is evaluated at
    /// links displaced along the force, `F(U') ≈ F + s (c/b) h² C`, with
    /// `U' = exp(i · 2 s (c/b) h² F) U`. Four inversions.
    pub fn kick_fg_approx(&mut self, b_dt: f64, c_dt3: f64) -> Result<()> {
        if c_dt3 == 0.0 {
            return self.kick_full(b_dt);
        }
        let f0 = self.full_force()?;
        // c h³ / (b h) = (c/b) h²
        let shift = 2.0 * FORCE_GRADIENT_SIGN * c_dt3 / b_dt;
        let saved = self.u.clone();
        self.u.exp_update(&f0, shift)?;
        let shifted = self.full_force();
        self.u = saved;
        let f1 = shifted?;
        self.apply_kick(&f1, b_dt);
        Ok(())
    }
}
