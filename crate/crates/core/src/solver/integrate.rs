use std::cell::Cell;

use log::warn;

use crate::error::{Error, Result};
use crate::model::Scenario;
use crate::solver::hermite::Segment;
use crate::solver::rhs::rhs_into;
use crate::solver::{PastStates, Trajectory, CORRECTOR_TOLERANCE};

/// Committed trajectory up to `t0` plus a provisional segment for the open step.
struct StepView<'a> {
    committed: &'a Trajectory,
    t0: f64,
    provisional: &'a Segment,
    inside_step: Cell<bool>,
}

impl PastStates for StepView<'_> {
    fn states_at(&self, t: f64, out: &mut [f64]) -> Result<()> {
        if t <= self.t0 + 1e-12 * self.provisional.h {
            self.committed.dense_eval_all_into(t, out)
        } else {
            self.inside_step.set(true);
            self.provisional.eval_into(t, out);
            Ok(())
        }
    }
}

/// Integrates the scenario on `[0, T]` with fixed-step RK4.
pub fn integrate(scenario: &Scenario) -> Result<Trajectory> {
    let params = scenario.solver();
    let h = params.step;
    let horizon = scenario.horizon();
    params.validate(scenario.tau_bar(), horizon)?;
    let steps = params.step_count(horizon);
    let width = scenario.agent_count() * scenario.dimension();

    let mut traj = Trajectory::start(scenario.history().clone(), h, horizon)?;
    let mut scratch = Vec::with_capacity(width);
    let mut f0 = vec![0.0; width];
    let x0 = traj.state(0).to_vec();
    rhs_into(scenario, &traj, 0.0, &x0, &mut f0, &mut scratch)?;
    traj.push_deriv(&f0);

    let mut k2 = vec![0.0; width];
    let mut k3 = vec![0.0; width];
    let mut k4 = vec![0.0; width];
    let mut stage = vec![0.0; width];
    let mut x1 = vec![0.0; width];
    let mut f1 = vec![0.0; width];

    for k in 0..steps {
        let t0 = traj.time(k);
        let x0 = traj.state(k).to_vec();
        let f0 = traj.deriv(k).to_vec();

        // Predictor for delayed arguments inside (t0, t0 + h].
        let mut segment = if k == 0 {
            let end: Vec<f64> = x0.iter().zip(&f0).map(|(x, f)| x + h * f).collect();
            Segment {
                t0,
                h,
                y0: x0.clone(),
                y1: end,
                dy0: f0.clone(),
                dy1: f0.clone(),
            }
        } else {
            Segment {
                t0: traj.time(k - 1),
                h,
                y0: traj.state(k - 1).to_vec(),
                y1: x0.clone(),
                dy0: traj.deriv(k - 1).to_vec(),
                dy1: f0.clone(),
            }
        };

        let mut previous: Option<Vec<f64>> = None;
        let mut residual = 0.0;
        let mut corrected = false;
        for _pass in 0..=params.corrector_iterations {
            let view = StepView {
                committed: &traj,
                t0,
                provisional: &segment,
                inside_step: Cell::new(false),
            };
            axpy(&x0, 0.5 * h, &f0, &mut stage);
            rhs_into(scenario, &view, t0 + 0.5 * h, &stage, &mut k2, &mut scratch)?;
            axpy(&x0, 0.5 * h, &k2, &mut stage);
            rhs_into(scenario, &view, t0 + 0.5 * h, &stage, &mut k3, &mut scratch)?;
            axpy(&x0, h, &k3, &mut stage);
            rhs_into(scenario, &view, t0 + h, &stage, &mut k4, &mut scratch)?;
            for c in 0..width {
                x1[c] = x0[c] + h / 6.0 * (f0[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
            }
            rhs_into(scenario, &view, t0 + h, &x1, &mut f1, &mut scratch)?;

            if !view.inside_step.get() {
                break;
            }
            corrected = true;
            if let Some(prev) = &previous {
                residual = prev
                    .iter()
                    .zip(&x1)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
            }
            previous = Some(x1.clone());
            segment = Segment {
                t0,
                h,
                y0: x0.clone(),
                y1: x1.clone(),
                dy0: f0.clone(),
                dy1: f1.clone(),
            };
        }

        if corrected {
            let stats = &mut traj.corrector;
            stats.corrected_steps += 1;
            stats.max_residual = stats.max_residual.max(residual);
            if residual > CORRECTOR_TOLERANCE {
                stats.unconverged_steps += 1;
                if stats.unconverged_steps == 1 {
                    warn!(
                        "corrector residual {residual:e} above {CORRECTOR_TOLERANCE:e} at t = {}",
                        t0 + h
                    );
                }
            }
        }
        if x1.iter().chain(&f1).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { t: t0 + h });
        }
        traj.push_state(&x1);
        traj.push_deriv(&f1);
    }
    if traj.corrector.unconverged_steps > 1 {
        warn!(
            "{} steps ended with corrector residual above {CORRECTOR_TOLERANCE:e} (max {:e})",
            traj.corrector.unconverged_steps, traj.corrector.max_residual
        );
    }
    Ok(traj)
}

#[inline]
fn axpy(x: &[f64], a: f64, y: &[f64], out: &mut [f64]) {
    for ((o, xi), yi) in out.iter_mut().zip(x).zip(y) {
        *o = xi + a * yi;
    }
}
