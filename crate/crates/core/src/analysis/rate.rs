use crate::analysis::diameter::diameter_at_node;
use crate::error::{Error, Result};
use crate::solver::Trajectory;

/// Empirical exponential rate of `d(t)`: the least-squares slope of `ln d(t)` over
/// the grid nodes in `[t_start, t_end]`, negated.
pub fn fit_decay_rate(traj: &Trajectory, t_start: f64, t_end: f64) -> Result<f64> {
    let tol = 1e-9 * traj.step();
    let (ts, ys): (Vec<f64>, Vec<f64>) = (0..traj.node_count())
        .map(|k| (traj.time(k), k))
        .filter(|(t, _)| *t >= t_start - tol && *t <= t_end + tol)
        .map(|(t, k)| (t, diameter_at_node(traj, k)))
        .unzip();
    if ts.len() < 2 {
        return Err(Error::RateUndefined(format!(
            "fewer than two grid nodes in [{t_start}, {t_end}]"
        )));
    }
    if let Some(i) = ys.iter().position(|&d| !(d > 0.0)) {
        return Err(Error::RateUndefined(format!(
            "diameter vanishes at t = {}",
            ts[i]
        )));
    }
    let logs: Vec<f64> = ys.iter().map(|d| d.ln()).collect();
    let n = ts.len() as f64;
    let mean_t = ts.iter().sum::<f64>() / n;
    let mean_y = logs.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (t, y) in ts.iter().zip(&logs) {
        sxy += (t - mean_t) * (y - mean_y);
        sxx += (t - mean_t) * (t - mean_t);
    }
    Ok(-sxy / sxx)
}
