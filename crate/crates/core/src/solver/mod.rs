//! Method-of-steps integration of the pointwise and distributed delay systems.
//!
//! Classical fixed-step RK4; delayed arguments are read from a cubic Hermite dense
//! output built from stored states and derivatives. When a delayed argument falls
//! inside the step being computed, the step is predicted from the previous Hermite
//! segment and re-run `corrector_iterations` times against its own interpolant.

mod hermite;
mod integrate;
mod rhs;
mod trajectory;

pub use integrate::integrate;
pub use rhs::{rhs_distributed, rhs_pointwise};
pub use trajectory::{CorrectorStats, Trajectory};

use crate::error::{Error, Result};
use crate::model::InitialHistory;

/// Residual above which a corrector loop is reported as unconverged.
pub const CORRECTOR_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct SolverParams {
    pub step: f64,
    pub corrector_iterations: usize,
    pub quadrature_points_per_step: usize,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            step: 1e-3,
            corrector_iterations: 2,
            quadrature_points_per_step: 1,
        }
    }
}

impl SolverParams {
    pub fn with_step(step: f64) -> Self {
        Self {
            step,
            ..Self::default()
        }
    }

    pub fn validate(&self, tau_bar: f64, horizon: f64) -> Result<()> {
        let step = self.step;
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::invalid(format!("step {step} must be positive")));
        }
        if step > 0.25 * tau_bar * (1.0 + 1e-12) {
            return Err(Error::invalid(format!(
                "step {step} exceeds tau_bar / 4 = {}",
                0.25 * tau_bar
            )));
        }
        let ratio = horizon / step;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::invalid(format!(
                "step {step} does not divide horizon {horizon}"
            )));
        }
        if self.quadrature_points_per_step == 0 {
            return Err(Error::invalid(
                "quadrature_points_per_step must be at least 1",
            ));
        }
        Ok(())
    }

    pub fn step_count(&self, horizon: f64) -> usize {
        (horizon / self.step).round() as usize
    }
}

/// Source of past opinions for evaluating delayed arguments.
pub trait PastStates {
    /// Writes all agents' states at time `t` into `out` (agent-major, length `N * d`).
    fn states_at(&self, t: f64, out: &mut [f64]) -> Result<()>;
}

impl PastStates for InitialHistory {
    fn states_at(&self, t: f64, out: &mut [f64]) -> Result<()> {
        self.eval_all_into(t, out)
    }
}
