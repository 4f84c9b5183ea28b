use super::state::MdState;
use super::{IntegratorSpec, Letter, Scheme};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ForceKind {
    Full,
    Gauge,
    Fermion,
}

/// Inner gauge-only flow of the nested schemes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InnerFlow {
    /// `M` leapfrog micro steps.
    Leapfrog,
    /// `M` 5-stage force-gradient micro steps with `C_GG`.
    ForceGradient,
}

/// One factor of a composition. Coefficients are in units of the macro step `h`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Stage {
    Drift(f64),
    Kick(ForceKind, f64),
    /// `P ← P − b h F − s c h³ C`
    ForceGradientKick { force: ForceKind, b: f64, c: f64 },
    /// Force-gradient kick realised by a displaced force evaluation.
    ApproxForceGradientKick { b: f64, c: f64 },
    /// Inner flow over `span · h` with `micro` steps.
    Inner { flow: InnerFlow, span: f64, micro: usize },
}

impl Stage {
    /// Dirac inversions this stage costs.
    pub fn inversions(&self) -> u64 {
        match *self {
            Stage::Drift(_) | Stage::Inner { .. } => 0,
            Stage::Kick(ForceKind::Gauge, _) => 0,
            Stage::Kick(_, _) => 2,
            Stage::ForceGradientKick { force, .. } => match force {
                ForceKind::Gauge => 0,
                ForceKind::Fermion => 4,
                ForceKind::Full => 6,
            },
            Stage::ApproxForceGradientKick { .. } => 4,
        }
    }

    /// Letter and weight in the plain `A`/`B` splitting, if the stage has one.
    pub fn letter(&self) -> Option<(Letter, f64)> {
        match *self {
            Stage::Drift(c) => Some((Letter::A, c)),
            Stage::Kick(_, c) => Some((Letter::B, c)),
            Stage::ForceGradientKick { b, .. } | Stage::ApproxForceGradientKick { b, .. } => {
                Some((Letter::B, b))
            }
            Stage::Inner { .. } => None,
        }
    }
}

fn five_stage(kick: ForceKind, middle: Stage, inner: Option<(InnerFlow, usize)>) -> Vec<Stage> {
    let half_drift = match inner {
        Some((flow, micro)) => Stage::Inner {
            flow,
            span: 0.5,
            micro,
        },
        None => Stage::Drift(0.5),
    };
    vec![
        Stage::Kick(kick, 1.0 / 6.0),
        half_drift,
        middle,
        half_drift,
        Stage::Kick(kick, 1.0 / 6.0),
    ]
}

/// The composition of one macro step.
pub fn stages(scheme: Scheme, spec: &IntegratorSpec) -> Vec<Stage> {
    use ForceKind::{Fermion, Full};
    let c = spec.fg_coefficient;
    let m = spec.micro_per_call().max(1);
    match scheme {
        Scheme::Leapfrog => vec![Stage::Kick(Full, 0.5), Stage::Drift(1.0), Stage::Kick(Full, 0.5)],
        Scheme::FiveStage => five_stage(Full, Stage::Kick(Full, 2.0 / 3.0), None),
        Scheme::FiveStageFg => five_stage(
            Full,
            Stage::ForceGradientKick {
                force: Full,
                b: 2.0 / 3.0,
                c,
            },
            None,
        ),
        Scheme::FgApprox => five_stage(Full, Stage::ApproxForceGradientKick { b: 2.0 / 3.0, c }, None),
        Scheme::ElevenStage => spec
            .eleven_stage
            .sequence()
            .iter()
            .map(|&(l, w)| match l {
                Letter::A => Stage::Drift(w),
                Letter::B => Stage::Kick(Full, w),
            })
            .collect(),
        Scheme::NestedLeapfrog => vec![
            Stage::Kick(Fermion, 0.5),
            Stage::Inner {
                flow: InnerFlow::Leapfrog,
                span: 1.0,
                micro: m,
            },
            Stage::Kick(Fermion, 0.5),
        ],
        Scheme::NestedFiveStage => five_stage(
            Fermion,
            Stage::Kick(Fermion, 2.0 / 3.0),
            Some((InnerFlow::Leapfrog, m)),
        ),
        Scheme::NestedFg => five_stage(
            Fermion,
            Stage::ForceGradientKick {
                force: Fermion,
                b: 2.0 / 3.0,
                c,
            },
            Some((InnerFlow::ForceGradient, m)),
        ),
        Scheme::AdaptedNestedFg => five_stage(
            Fermion,
            Stage::ForceGradientKick {
                force: Fermion,
                b: 2.0 / 3.0,
                c,
            },
            Some((InnerFlow::Leapfrog, m)),
        ),
    }
}

fn apply_stage(state: &mut MdState, stage: &Stage, h: f64, fg_coefficient: f64) -> Result<()> {
    match *stage {
        Stage::Drift(c) => state.drift(c * h),
        Stage::Kick(ForceKind::Gauge, c) => state.kick_gauge(c * h),
        Stage::Kick(ForceKind::Fermion, c) => state.kick_fermion(c * h)?,
        Stage::Kick(ForceKind::Full, c) => state.kick_full(c * h)?,
        Stage::ForceGradientKick { force, b, c } => {
            let (b_dt, c_dt3) = (b * h, c * h * h * h);
            match force {
                ForceKind::Gauge => state.kick_fg_gauge(b_dt, c_dt3),
                ForceKind::Fermion => state.kick_fg_fermion(b_dt, c_dt3)?,
                ForceKind::Full => state.kick_fg_full(b_dt, c_dt3)?,
            }
        }
        Stage::ApproxForceGradientKick { b, c } => state.kick_fg_approx(b * h, c * h * h * h)?,
        Stage::Inner { flow, span, micro } => match flow {
            InnerFlow::Leapfrog => inner_leapfrog(state, span * h, micro),
            InnerFlow::ForceGradient => inner_fg(state, span * h, micro, fg_coefficient),
        },
    }
    Ok(())
}

/// `(e^{(H/2M)B₁} e^{(H/M)A} e^{(H/2M)B₁})^M` on the gauge action alone.
pub fn inner_leapfrog(state: &mut MdState, span: f64, micro: usize) {
    let k = span / micro as f64;
    // Adjacent half kicks act at the same links and are merged.
    state.kick_gauge(0.5 * k);
    for i in 0..micro {
        state.drift(k);
        state.kick_gauge(if i + 1 == micro { 0.5 * k } else { k });
    }
}

/// `M` gauge-only 5-stage force-gradient micro steps of size `k = H/M`, the middle kick
/// carrying `c k³ C_GG`.
pub fn inner_fg(state: &mut MdState, span: f64, micro: usize, fg_coefficient: f64) {
    let k = span / micro as f64;
    for _ in 0..micro {
        state.kick_gauge(k / 6.0);
        state.drift(0.5 * k);
        state.kick_fg_gauge(2.0 * k / 3.0, fg_coefficient * k * k * k);
        state.drift(0.5 * k);
        state.kick_gauge(k / 6.0);
    }
}

/// One macro step of `spec.scheme`.
pub fn step(state: &mut MdState, spec: &IntegratorSpec) -> Result<()> {
    for stage in stages(spec.scheme, spec) {
        apply_stage(state, &stage, spec.h, spec.fg_coefficient)?;
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryOutcome {
    pub n_steps: usize,
    /// `n_steps · h`, the trajectory length actually integrated.
    pub realized_tau: f64,
    pub inversions: u64,
}

/// Number of macro steps for a trajectory of length `tau`: `round(tau / h)`.
pub fn n_steps_for(tau: f64, h: f64) -> Result<usize> {
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::InvalidIntegrator(format!("trajectory length must be positive, got {tau}")));
    }
    let n = (tau / h).round();
    if n < 1.0 {
        return Err(Error::InvalidIntegrator(format!("step size {h} exceeds trajectory length {tau}")));
    }
    Ok(n as usize)
}

pub fn integrate_trajectory(state: &mut MdState, spec: &IntegratorSpec, tau: f64) -> Result<TrajectoryOutcome> {
    integrate_trajectory_observed(state, spec, tau, |_, _| Ok(()))
}

/// As [`integrate_trajectory`], calling `observe(step_index, state)` after every macro step.
pub fn integrate_trajectory_observed<F>(
    state: &mut MdState,
    spec: &IntegratorSpec,
    tau: f64,
    mut observe: F,
) -> Result<TrajectoryOutcome>
where
    F: FnMut(usize, &MdState) -> Result<()>,
{
    spec.validate()?;
    let n_steps = n_steps_for(tau, spec.h)?;
    let start = state.inversions();
    for i in 0..n_steps {
        step(state, spec)?;
        observe(i + 1, state)?;
    }
    Ok(TrajectoryOutcome {
        n_steps,
        realized_tau: n_steps as f64 * spec.h,
        inversions: state.inversions() - start,
    })
}
