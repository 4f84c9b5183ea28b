//! Reversible, volume-preserving splitting integrators for the molecular-dynamics step.
//!
//! Every scheme is a palindromic composition of two elementary shears: the link drift
//! `U ← exp(i c h P) U` and a momentum kick `P ← P − c h F`, optionally augmented by a
//! force-gradient term. Nested schemes integrate the gauge force with `M` micro steps
//! inside each outer fermion kick.

mod order;
mod schemes;
mod state;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub use order::{composition_log, order_defect, Letter};
pub use schemes::{
    integrate_trajectory, integrate_trajectory_observed, n_steps_for, step, ForceKind, InnerFlow, Stage,
    TrajectoryOutcome,
};
pub use state::{ActionParams, MdState};

/// Force-gradient weight in the middle kick of every 5-stage force-gradient scheme.
pub const FG_COEFFICIENT: f64 = 1.0 / 72.0;

/// Sign `s` of the force-gradient kick `P ← P − b h F − s c h³ C` where `C = ∇|F|²`.
///
/// Fixed by the convergence-order test: `s = −1` gives fourth order, `s = +1` only second.
pub const FORCE_GRADIENT_SIGN: f64 = -1.0;

/// Coefficients of the 11-stage fourth-order composition
/// `B(σ) A(η) B(λ) A(θ) B((1−2(λ+σ))/2) A(1−2(θ+η)) …` (mirrored).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ElevenStageCoefficients {
    pub sigma: f64,
    pub eta: f64,
    pub lambda: f64,
    pub theta: f64,
}

/// Minimum-error fourth-order set of Omelyan, Mryglod and Folk (2003), the `OMF4`
/// integrator of openQCD.
pub const OMF4: ElevenStageCoefficients = ElevenStageCoefficients {
    sigma: 0.08398315262876693,
    eta: 0.2539785108410595,
    lambda: 0.6822365335719091,
    theta: -0.03230286765269967,
};

impl ElevenStageCoefficients {
    /// The eleven stage weights, in application order, kicks on even positions.
    pub fn sequence(&self) -> [(Letter, f64); 11] {
        let b_mid = 0.5 * (1.0 - 2.0 * (self.lambda + self.sigma));
        let a_mid = 1.0 - 2.0 * (self.theta + self.eta);
        use Letter::{A, B};
        [
            (B, self.sigma),
            (A, self.eta),
            (B, self.lambda),
            (A, self.theta),
            (B, b_mid),
            (A, a_mid),
            (B, b_mid),
            (A, self.theta),
            (B, self.lambda),
            (A, self.eta),
            (B, self.sigma),
        ]
    }

    /// Largest violation of the conditions for fourth order.
    pub fn order_defect(&self) -> f64 {
        order_defect(&self.sequence(), 3)
    }
}

/// Stable scheme identifiers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    Leapfrog,
    FiveStage,
    FiveStageFg,
    FgApprox,
    ElevenStage,
    NestedLeapfrog,
    NestedFiveStage,
    NestedFg,
    AdaptedNestedFg,
}

impl Scheme {
    pub const ALL: [Scheme; 9] = [
        Scheme::Leapfrog,
        Scheme::FiveStage,
        Scheme::FiveStageFg,
        Scheme::FgApprox,
        Scheme::ElevenStage,
        Scheme::NestedLeapfrog,
        Scheme::NestedFiveStage,
        Scheme::NestedFg,
        Scheme::AdaptedNestedFg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Leapfrog => "leapfrog",
            Scheme::FiveStage => "5stage",
            Scheme::FiveStageFg => "5stage-fg",
            Scheme::FgApprox => "fg-approx",
            Scheme::ElevenStage => "11stage",
            Scheme::NestedLeapfrog => "nested-leapfrog",
            Scheme::NestedFiveStage => "nested-5stage",
            Scheme::NestedFg => "nested-fg",
            Scheme::AdaptedNestedFg => "adapted-nested-fg",
        }
    }

    pub fn is_nested(self) -> bool {
        matches!(
            self,
            Scheme::NestedLeapfrog | Scheme::NestedFiveStage | Scheme::NestedFg | Scheme::AdaptedNestedFg
        )
    }

    /// Expected convergence order of `ΔH` (effective order for the nested schemes).
    pub fn order(self) -> u32 {
        match self {
            Scheme::Leapfrog | Scheme::FiveStage | Scheme::NestedLeapfrog | Scheme::NestedFiveStage => 2,
            _ => 4,
        }
    }

    /// Dirac inversions per macro step.
    pub fn inversions_per_step(self) -> u64 {
        schemes::stages(self, &IntegratorSpec::new(self, 1.0))
            .iter()
            .map(Stage::inversions)
            .sum()
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| Error::UnknownScheme(s.to_string()))
    }
}

/// Micro-step resolution of the inner gauge flow.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MicroSteps {
    /// Fixed number of micro steps per inner call.
    PerCall(usize),
    /// Micro step = macro step / ratio; the per-call count follows from the inner span.
    Ratio(f64),
    /// `⌈c / h⌉` micro steps per call, so the micro step shrinks like `h²`. Keeps the
    /// inner second-order error below the outer fourth-order error as `h → 0`.
    Scaled(f64),
}

impl Default for MicroSteps {
    fn default() -> Self {
        MicroSteps::Ratio(10.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorSpec {
    pub scheme: Scheme,
    /// Macro step size.
    pub h: f64,
    pub micro: MicroSteps,
    pub fg_coefficient: f64,
    pub eleven_stage: ElevenStageCoefficients,
}

impl IntegratorSpec {
    pub fn new(scheme: Scheme, h: f64) -> Self {
        Self {
            scheme,
            h,
            micro: MicroSteps::default(),
            fg_coefficient: FG_COEFFICIENT,
            eleven_stage: OMF4,
        }
    }

    pub fn with_micro(mut self, micro: MicroSteps) -> Self {
        self.micro = micro;
        self
    }

    /// Fraction of the macro step covered by one inner flow call.
    pub fn inner_span(&self) -> f64 {
        match self.scheme {
            Scheme::NestedLeapfrog => 1.0,
            _ => 0.5,
        }
    }

    /// Micro steps per inner call; `0` for non-nested schemes.
    pub fn micro_per_call(&self) -> usize {
        if !self.scheme.is_nested() {
            return 0;
        }
        match self.micro {
            MicroSteps::PerCall(m) => m,
            MicroSteps::Ratio(r) => ((self.inner_span() * r).round() as usize).max(1),
            MicroSteps::Scaled(c) => ((c / self.h).ceil() as usize).max(1),
        }
    }

    /// Micro steps per macro step, summed over the inner calls.
    pub fn micro_per_step(&self) -> usize {
        let calls = match self.scheme {
            Scheme::NestedLeapfrog => 1,
            s if s.is_nested() => 2,
            _ => 0,
        };
        calls * self.micro_per_call()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h.is_finite() && self.h > 0.0) {
            return Err(Error::InvalidIntegrator(format!("step size must be positive, got {}", self.h)));
        }
        if self.scheme.is_nested() {
            match self.micro {
                MicroSteps::PerCall(0) => {
                    return Err(Error::InvalidIntegrator("nested schemes need M >= 1".into()))
                }
                MicroSteps::Ratio(r) if !(r.is_finite() && r > 0.0) => {
                    return Err(Error::InvalidIntegrator(format!("micro ratio must be positive, got {r}")))
                }
                MicroSteps::Scaled(c) if !(c.is_finite() && c > 0.0) => {
                    return Err(Error::InvalidIntegrator(format!("micro scale must be positive, got {c}")))
                }
                _ => {}
            }
        }
        if self.scheme == Scheme::ElevenStage && self.eleven_stage.order_defect() > 1e-12 {
            return Err(Error::InvalidIntegrator(format!(
                "11-stage coefficients violate the fourth-order conditions by {:e}",
                self.eleven_stage.order_defect()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
        }
        assert!("verlet".parse::<Scheme>().is_err());
    }

    #[test]
    fn inversion_counts_per_step() {
        let expected = [
            (Scheme::Leapfrog, 4),
            (Scheme::NestedLeapfrog, 4),
            (Scheme::FiveStage, 6),
            (Scheme::NestedFiveStage, 6),
            (Scheme::FiveStageFg, 10),
            (Scheme::FgApprox, 8),
            (Scheme::NestedFg, 8),
            (Scheme::AdaptedNestedFg, 8),
            (Scheme::ElevenStage, 12),
        ];
        for (s, n) in expected {
            assert_eq!(s.inversions_per_step(), n, "{s}");
        }
    }

    #[test]
    fn omf4_is_fourth_order_and_palindromic() {
        assert!(OMF4.order_defect() < 1e-12, "{:e}", OMF4.order_defect());
        let seq = OMF4.sequence();
        for i in 0..seq.len() {
            assert_eq!(seq[i], seq[seq.len() - 1 - i]);
        }
        let mut bad = OMF4;
        bad.theta += 1e-3;
        assert!(bad.order_defect() > 1e-6);
        assert!(IntegratorSpec { eleven_stage: bad, ..IntegratorSpec::new(Scheme::ElevenStage, 0.1) }
            .validate()
            .is_err());
    }

    #[test]
    fn micro_step_resolution() {
        let s = IntegratorSpec::new(Scheme::AdaptedNestedFg, 0.05);
        assert_eq!(s.micro_per_call(), 5);
        assert_eq!(s.micro_per_step(), 10);
        let s = IntegratorSpec::new(Scheme::NestedLeapfrog, 0.05);
        assert_eq!(s.micro_per_call(), 10);
        let s = IntegratorSpec::new(Scheme::Leapfrog, 0.05);
        assert_eq!(s.micro_per_call(), 0);
        let s = IntegratorSpec::new(Scheme::NestedFg, 0.05).with_micro(MicroSteps::PerCall(7));
        assert_eq!(s.micro_per_call(), 7);
        let s = IntegratorSpec::new(Scheme::AdaptedNestedFg, 0.01).with_micro(MicroSteps::Scaled(0.5));
        assert_eq!(s.micro_per_call(), 50);
        assert!(IntegratorSpec::new(Scheme::NestedFg, 0.05)
            .with_micro(MicroSteps::PerCall(0))
            .validate()
            .is_err());
        assert!(IntegratorSpec::new(Scheme::Leapfrog, -0.1).validate().is_err());
    }
}
