use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::certificate::ConsensusCertificate;
use crate::analysis::diameter::{
    complete_windows, cross_diameter, diameter_at, diameter_at_node, window_clouds, WindowDiameters,
};
use crate::error::Result;
use crate::model::influence::norm;
use crate::solver::Trajectory;

/// Absolute slack for hull confinement, before adding the integrator's own residual.
pub const HULL_SLACK: f64 = 1e-6;
/// Slack on `D_{n+1} <= D_n`.
pub const MONOTONE_SLACK: f64 = 1e-9;

const DIRECTION_SEED: u64 = 0x6b5f_2d1a;

/// Outcome of one inequality check: the smallest `rhs - lhs` seen over all samples.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub worst_margin: Option<f64>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckRecord {
    pub fn from_margin(name: &str, worst_margin: f64, slack: f64) -> Self {
        Self {
            name: name.to_string(),
            worst_margin: Some(worst_margin),
            pass: worst_margin >= -slack,
            note: None,
        }
    }

    pub fn skipped(name: &str, note: &str) -> Self {
        Self {
            name: name.to_string(),
            worst_margin: None,
            pass: true,
            note: Some(note.to_string()),
        }
    }

    pub fn is_skipped(&self) -> bool {
        self.worst_margin.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HullReport {
    pub worst_margin: f64,
    pub slack: f64,
    pub pass: bool,
}

/// `directions` seeded random unit vectors followed by the `2d` signed axes.
pub fn probe_directions(d: usize, directions: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(directions + 2 * d);
    while out.len() < directions {
        let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = norm(&v);
        if n > 1e-3 && n <= 1.0 {
            out.push(v.into_iter().map(|x| x / n).collect());
        }
    }
    for axis in 0..d {
        for sign in [1.0, -1.0] {
            let mut v = vec![0.0; d];
            v[axis] = sign;
            out.push(v);
        }
    }
    out
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Checks that projections after `anchor` stay inside the projected range of the
/// window `[anchor - tau_bar, anchor]`.
///
/// The window is sampled at `sample_times + 1` uniform points plus every grid node it
/// contains; later times are all grid nodes after `anchor`.
pub fn verify_hull_confinement(
    traj: &Trajectory,
    anchor: f64,
    directions: usize,
    sample_times: usize,
) -> Result<HullReport> {
    let d = traj.dimension();
    let n = traj.agent_count();
    let tau_bar = traj.tau_bar();
    let slack = HULL_SLACK + traj.corrector_stats().max_residual;
    let node_tol = 1e-9 * traj.step();

    let mut window = Vec::new();
    let mut buf = vec![0.0; n * d];
    for m in 0..=sample_times.max(1) {
        let t = anchor - tau_bar + tau_bar * m as f64 / sample_times.max(1) as f64;
        traj.dense_eval_all_into(t.min(anchor), &mut buf)?;
        window.extend_from_slice(&buf);
    }
    let mut later = Vec::new();
    for k in 0..traj.node_count() {
        let t = traj.time(k);
        if t >= anchor - tau_bar - node_tol && t <= anchor + node_tol {
            window.extend_from_slice(traj.state(k));
        } else if t > anchor {
            later.push(k);
        }
    }

    let dirs = probe_directions(d, directions, DIRECTION_SEED);
    let worst = dirs
        .par_iter()
        .map(|v| {
            let (lo, hi) = window
                .chunks(d)
                .map(|x| dot(x, v))
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| {
                    (a.min(p), b.max(p))
                });
            let mut worst = f64::INFINITY;
            for &k in &later {
                let state = traj.state(k);
                for x in state.chunks(d) {
                    let p = dot(x, v);
                    worst = worst.min(p - lo).min(hi - p);
                }
            }
            worst
        })
        .reduce(|| f64::INFINITY, f64::min);
    // no later node: nothing to violate
    let worst_margin = if worst.is_finite() { worst } else { 0.0 };
    Ok(HullReport {
        worst_margin,
        slack,
        pass: worst_margin >= -slack,
    })
}

/// Runs the window lemma chain against a certificate and the window maxima.
///
/// Every check uses slack `1e-6 (1 + D0)`:
/// pairwise window bound, state norm bound, one-window recursion, two-window
/// contraction, three-window geometric decay and the exponential decay estimate.
/// Window monotonicity is reported alongside with slack `1e-9`.
pub fn verify_lemma_chain(
    traj: &Trajectory,
    cert: &ConsensusCertificate,
    wd: &WindowDiameters,
) -> Result<Vec<CheckRecord>> {
    let d = traj.dimension();
    let tau_bar = traj.tau_bar();
    let eps = lemma_slack(cert.d0);
    let dn = &wd.values;
    let windows = dn.len().min(complete_windows(traj));
    let decay = (-cert.k * tau_bar).exp();
    let mut records = Vec::new();

    // pairwise bound over all later sample pairs
    let clouds = window_clouds(traj, wd.samples_per_window)?;
    let cross: Vec<Vec<f64>> = (0..windows)
        .into_par_iter()
        .map(|m| {
            (0..windows)
                .map(|mm| {
                    if mm < m {
                        0.0
                    } else {
                        cross_diameter(&clouds[m], &clouds[mm], d)
                    }
                })
                .collect()
        })
        .collect();
    let mut suffix = 0.0f64;
    let mut worst = f64::INFINITY;
    for n in (0..windows).rev() {
        suffix = cross[n][n..].iter().fold(suffix, |a, &b| a.max(b));
        worst = worst.min(dn[n] - suffix);
    }
    records.push(CheckRecord::from_margin(
        "pairwise_window_bound",
        worst,
        eps,
    ));

    // |x_i(t)| <= M0 on grid nodes and window samples
    let mut max_norm = 0.0f64;
    for k in 0..traj.node_count() {
        for x in traj.state(k).chunks(d) {
            max_norm = max_norm.max(norm(x));
        }
    }
    for cloud in &clouds {
        for x in cloud.chunks(d) {
            max_norm = max_norm.max(norm(x));
        }
    }
    records.push(CheckRecord::from_margin(
        "state_norm_bound",
        cert.m0 - max_norm,
        eps,
    ));

    // D_{n+1} <= e^{-K tau} d(n tau) + (1 - e^{-K tau}) D_n
    let d_at: Vec<f64> = (0..windows)
        .map(|n| diameter_at(traj, n as f64 * tau_bar))
        .collect::<Result<_>>()?;
    if windows >= 2 {
        let worst = (0..windows - 1)
            .map(|n| decay * d_at[n] + (1.0 - decay) * dn[n] - dn[n + 1])
            .fold(f64::INFINITY, f64::min);
        records.push(CheckRecord::from_margin("window_recursion", worst, eps));
    } else {
        records.push(CheckRecord::skipped(
            "window_recursion",
            "insufficient horizon",
        ));
    }

    if windows >= 4 {
        let worst = (2..windows)
            .map(|n| cert.c * dn[n - 2] - d_at[n])
            .fold(f64::INFINITY, f64::min);
        records.push(CheckRecord::from_margin(
            "two_window_contraction",
            worst,
            eps,
        ));
        let worst = (1..)
            .take_while(|n| 3 * n < windows)
            .map(|n| cert.c_tilde.powi(n as i32) * cert.d0 - dn[3 * n])
            .fold(f64::INFINITY, f64::min);
        records.push(CheckRecord::from_margin(
            "geometric_window_decay",
            worst,
            eps,
        ));
    } else {
        records.push(CheckRecord::skipped(
            "two_window_contraction",
            "insufficient horizon",
        ));
        records.push(CheckRecord::skipped(
            "geometric_window_decay",
            "insufficient horizon",
        ));
    }

    // d(t) <= D0 e^{-gamma (t - 2 tau)} on grid nodes
    let worst = (0..traj.node_count())
        .map(|k| {
            let t = traj.time(k);
            cert.d0 * (-cert.gamma * (t - 2.0 * tau_bar)).exp() - diameter_at_node(traj, k)
        })
        .fold(f64::INFINITY, f64::min);
    records.push(CheckRecord::from_margin(
        "exponential_decay_estimate",
        worst,
        eps,
    ));

    let worst = dn
        .windows(2)
        .map(|w| w[0] - w[1])
        .fold(f64::INFINITY, f64::min);
    if worst.is_finite() {
        records.push(CheckRecord::from_margin(
            "window_monotonicity",
            worst,
            MONOTONE_SLACK,
        ));
    } else {
        records.push(CheckRecord::skipped("window_monotonicity", "single window"));
    }
    Ok(records)
}

/// Sampled check of the pairwise projection contraction anchored at `t0 >= n tau_bar`:
/// `<x_i(t) - x_j(t), v> <= e^{-K(t - t0)} <x_i(t0) - x_j(t0), v> + (1 - e^{-K(t - t0)}) D_n`.
///
/// `(i, j, v, n, t0, t)` are drawn uniformly from a seeded generator. Returns the worst margin.
pub fn verify_window_contraction(
    traj: &Trajectory,
    k: f64,
    wd: &WindowDiameters,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = traj.dimension();
    let agents = traj.agent_count();
    let tau_bar = traj.tau_bar();
    let end = traj.last_time();
    let dirs = probe_directions(d, 64, seed ^ DIRECTION_SEED);
    let mut worst = f64::INFINITY;
    let mut xs = vec![0.0; agents * d];
    let mut x0 = vec![0.0; agents * d];
    for _ in 0..trials {
        let n = rng.gen_range(0..wd.len());
        let lo = n as f64 * tau_bar;
        if lo >= end {
            continue;
        }
        let t0 = rng.gen_range(lo..end);
        let t = rng.gen_range(t0..=end);
        let i = rng.gen_range(0..agents);
        let j = rng.gen_range(0..agents);
        let v = &dirs[rng.gen_range(0..dirs.len())];
        traj.dense_eval_all_into(t0, &mut x0)?;
        traj.dense_eval_all_into(t, &mut xs)?;
        let proj =
            |s: &[f64]| -> f64 { (0..d).map(|c| (s[i * d + c] - s[j * d + c]) * v[c]).sum() };
        let e = (-k * (t - t0)).exp();
        let margin = e * proj(&x0) + (1.0 - e) * wd.values[n] - proj(&xs);
        worst = worst.min(margin);
    }
    Ok(worst)
}

pub(crate) fn lemma_slack(d0: f64) -> f64 {
    1e-6 * (1.0 + d0)
}

/// Anchors `n tau_bar` strictly before the last grid time.
pub(crate) fn hull_anchors(traj: &Trajectory) -> Vec<f64> {
    let tau_bar = traj.tau_bar();
    (0..complete_windows(traj))
        .map(|n| n as f64 * tau_bar)
        .filter(|&a| a < traj.last_time())
        .collect()
}
