use crate::error::{Error, Result};
use crate::model::{DelaySpec, Scenario};
use crate::solver::PastStates;

/// Right-hand side of the pointwise-delay system at time `t`.
///
/// `state` holds all agents at `t` (agent-major); delayed opinions `x_j(t - tau(t))`
/// are read from `past`, except when `tau(t) = 0` where they are `state` itself.
pub fn rhs_pointwise(
    scenario: &Scenario,
    past: &dyn PastStates,
    t: f64,
    state: &[f64],
) -> Result<Vec<f64>> {
    let mut out = vec![0.0; state.len()];
    let mut scratch = Vec::new();
    pointwise_into(scenario, past, t, state, &mut out, &mut scratch)?;
    Ok(out)
}

/// Right-hand side of the distributed-delay system at time `t`.
///
/// The lag integral over `[t - tau2(t), t - tau1(t)]` uses the composite trapezoid rule
/// with `quadrature_points_per_step * ceil((tau2 - tau1) / step)` subintervals and is
/// normalized by `h(t)` computed on the same nodes.
pub fn rhs_distributed(
    scenario: &Scenario,
    past: &dyn PastStates,
    t: f64,
    state: &[f64],
) -> Result<Vec<f64>> {
    let mut out = vec![0.0; state.len()];
    let mut scratch = Vec::new();
    distributed_into(scenario, past, t, state, &mut out, &mut scratch)?;
    Ok(out)
}

pub(crate) fn rhs_into(
    scenario: &Scenario,
    past: &dyn PastStates,
    t: f64,
    state: &[f64],
    out: &mut [f64],
    scratch: &mut Vec<f64>,
) -> Result<()> {
    match scenario.delay() {
        DelaySpec::Pointwise { .. } => pointwise_into(scenario, past, t, state, out, scratch),
        DelaySpec::Distributed { .. } => distributed_into(scenario, past, t, state, out, scratch),
    }
}

fn pointwise_into(
    scenario: &Scenario,
    past: &dyn PastStates,
    t: f64,
    state: &[f64],
    out: &mut [f64],
    scratch: &mut Vec<f64>,
) -> Result<()> {
    let tau = scenario.delay().eval_pointwise(t)?;
    out.fill(0.0);
    let delayed: &[f64] = if tau == 0.0 {
        state
    } else {
        scratch.resize(state.len(), 0.0);
        past.states_at(t - tau, scratch)?;
        scratch
    };
    accumulate(scenario, state, delayed, 1.0, out)?;
    let scale = 1.0 / (scenario.agent_count() - 1) as f64;
    finish(out, scale, t)
}

fn distributed_into(
    scenario: &Scenario,
    past: &dyn PastStates,
    t: f64,
    state: &[f64],
    out: &mut [f64],
    scratch: &mut Vec<f64>,
) -> Result<()> {
    let (tau1, tau2) = scenario.delay().eval_distributed(t)?;
    let solver = scenario.solver();
    let cells = ((tau2 - tau1) / solver.step - 1e-9).ceil().max(1.0) as usize;
    let intervals = solver.quadrature_points_per_step * cells;
    let nodes = scenario.delay().kernel_nodes(t, intervals)?;
    let h: f64 = nodes.iter().map(|(_, w)| w).sum();
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::NonPositiveKernel { t, value: h });
    }
    out.fill(0.0);
    scratch.resize(state.len(), 0.0);
    for &(lag, weight) in &nodes {
        if lag == 0.0 {
            accumulate(scenario, state, state, weight, out)?;
        } else {
            past.states_at(t - lag, scratch)?;
            accumulate(scenario, state, scratch, weight, out)?;
        }
    }
    let scale = 1.0 / ((scenario.agent_count() - 1) as f64 * h);
    finish(out, scale, t)
}

/// Adds `weight * sum_{j != i} psi(x_i, y_j) (y_j - x_i)` to `out_i` for every agent.
#[inline]
fn accumulate(
    scenario: &Scenario,
    state: &[f64],
    delayed: &[f64],
    weight: f64,
    out: &mut [f64],
) -> Result<()> {
    let d = scenario.dimension();
    let n = scenario.agent_count();
    let influence = scenario.influence();
    for i in 0..n {
        let xi = &state[i * d..(i + 1) * d];
        let oi = &mut out[i * d..(i + 1) * d];
        for j in 0..n {
            if j == i {
                continue;
            }
            let yj = &delayed[j * d..(j + 1) * d];
            let w = weight * influence.eval(xi, yj)?;
            for c in 0..d {
                oi[c] += w * (yj[c] - xi[c]);
            }
        }
    }
    Ok(())
}

fn finish(out: &mut [f64], scale: f64, t: f64) -> Result<()> {
    for v in out.iter_mut() {
        *v *= scale;
        if !v.is_finite() {
            return Err(Error::NonFinite { t });
        }
    }
    Ok(())
}
