use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::influence::{distance, norm};
use crate::model::InitialHistory;
use crate::solver::Trajectory;

/// Smallest admissible number of sample intervals per window.
pub const MIN_WINDOW_SAMPLES: usize = 8;

/// Window maxima `D_n` over `[n tau_bar - tau_bar, n tau_bar]`, `n = 0, 1, ...`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindowDiameters {
    pub tau_bar: f64,
    pub samples_per_window: usize,
    pub values: Vec<f64>,
}

impl WindowDiameters {
    pub fn d0(&self) -> f64 {
        self.values[0]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `D_{n+1} <= D_n + tol` for every consecutive pair.
    pub fn is_monotone(&self, tol: f64) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0] + tol)
    }
}

/// Largest pairwise distance in a flat cloud of `d`-dimensional points.
pub fn point_cloud_diameter(points: &[f64], d: usize) -> f64 {
    cross_diameter(points, points, d)
}

/// Largest distance between a point of `a` and a point of `b`.
pub(crate) fn cross_diameter(a: &[f64], b: &[f64], d: usize) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    if d == 1 {
        let (amin, amax) = min_max(a);
        let (bmin, bmax) = min_max(b);
        return (amax - bmin).abs().max((bmax - amin).abs());
    }
    let mut best = 0.0f64;
    for p in a.chunks(d) {
        for q in b.chunks(d) {
            best = best.max(distance(p, q));
        }
    }
    best
}

fn min_max(v: &[f64]) -> (f64, f64) {
    v.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        })
}

/// Diameter `d(t) = max_{i,j} |x_i(t) - x_j(t)|`.
pub fn diameter_at(traj: &Trajectory, t: f64) -> Result<f64> {
    let mut all = vec![0.0; traj.agent_count() * traj.dimension()];
    traj.dense_eval_all_into(t, &mut all)?;
    Ok(point_cloud_diameter(&all, traj.dimension()))
}

/// Diameter at grid node `k`, read from stored states.
pub(crate) fn diameter_at_node(traj: &Trajectory, k: usize) -> f64 {
    point_cloud_diameter(traj.state(k), traj.dimension())
}

/// Number of complete windows `[n tau_bar - tau_bar, n tau_bar]` inside `[-tau_bar, T]`.
pub fn complete_windows(traj: &Trajectory) -> usize {
    (traj.last_time() / traj.tau_bar() + 1e-9).floor() as usize + 1
}

/// Sample times of window `n`: `samples + 1` uniform points, endpoints included.
pub(crate) fn window_times(tau_bar: f64, n: usize, samples: usize) -> Vec<f64> {
    let start = (n as f64 - 1.0) * tau_bar;
    (0..=samples)
        .map(|m| {
            if m == samples {
                n as f64 * tau_bar
            } else {
                start + tau_bar * m as f64 / samples as f64
            }
        })
        .collect()
}

/// All agent states at every sample time of every complete window, one flat cloud per window.
pub(crate) fn window_clouds(traj: &Trajectory, samples: usize) -> Result<Vec<Vec<f64>>> {
    let width = traj.agent_count() * traj.dimension();
    let mut buf = vec![0.0; width];
    (0..complete_windows(traj))
        .map(|n| {
            let times = window_times(traj.tau_bar(), n, samples);
            let mut cloud = Vec::with_capacity(times.len() * width);
            for t in times {
                traj.dense_eval_all_into(t, &mut buf)?;
                cloud.extend_from_slice(&buf);
            }
            Ok(cloud)
        })
        .collect()
}

/// Sampled window maxima. Grids with `samples` and `2 * samples` intervals nest, so
/// doubling the resolution never decreases a value.
pub fn window_diameters(traj: &Trajectory, samples_per_window: usize) -> Result<WindowDiameters> {
    if samples_per_window < MIN_WINDOW_SAMPLES {
        return Err(Error::invalid(format!(
            "samples_per_window must be at least {MIN_WINDOW_SAMPLES}, got {samples_per_window}"
        )));
    }
    let d = traj.dimension();
    let values = window_clouds(traj, samples_per_window)?
        .iter()
        .map(|cloud| point_cloud_diameter(cloud, d))
        .collect();
    Ok(WindowDiameters {
        tau_bar: traj.tau_bar(),
        samples_per_window,
        values,
    })
}

/// `M0 = max_i max_s |x0_i(s)|` over `samples` uniform intervals of `[-tau_bar, 0]`.
pub fn compute_m0(history: &InitialHistory, samples: usize) -> Result<f64> {
    if samples < MIN_WINDOW_SAMPLES {
        return Err(Error::invalid(format!(
            "M0 sampling needs at least {MIN_WINDOW_SAMPLES} intervals, got {samples}"
        )));
    }
    let d = history.dimension();
    let mut buf = vec![0.0; history.agent_count() * d];
    let mut best = 0.0f64;
    for t in window_times(history.tau_bar(), 0, samples) {
        history.eval_all_into(t, &mut buf)?;
        for x in buf.chunks(d) {
            best = best.max(norm(x));
        }
    }
    Ok(best)
}

/// Sampled `D0` directly from the initial history.
pub fn history_diameter(history: &InitialHistory, samples: usize) -> Result<f64> {
    let d = history.dimension();
    let width = history.agent_count() * d;
    let mut buf = vec![0.0; width];
    let mut cloud = Vec::new();
    for t in window_times(history.tau_bar(), 0, samples) {
        history.eval_all_into(t, &mut buf)?;
        cloud.extend_from_slice(&buf);
    }
    Ok(point_cloud_diameter(&cloud, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DelaySpec, HistoryFn, InfluenceSpec, ScalarFn, Scenario};
    use crate::solver::{integrate, SolverParams};

    fn run(history: InitialHistory, horizon: f64) -> Trajectory {
        let s = Scenario::new(
            horizon,
            DelaySpec::pointwise(1.0, ScalarFn::constant(0.5)),
            InfluenceSpec::constant(1.0).unwrap(),
            history,
            SolverParams::with_step(1.0 / 32.0),
        )
        .unwrap();
        integrate(&s).unwrap()
    }

    #[test]
    fn diameter_examples() {
        assert_eq!(point_cloud_diameter(&[0.0, 1.0, 2.0], 1), 2.0);
        assert_eq!(point_cloud_diameter(&[3.0, 3.0], 1), 0.0);
        assert_eq!(
            point_cloud_diameter(&[0.0, 0.0, 3.0, 4.0, 1.0, 1.0], 2),
            5.0
        );
    }

    #[test]
    fn one_dimensional_shortcut_matches_pairs() {
        let pts = [0.3f64, -1.25, 7.5, 2.0, -0.75];
        let mut brute = 0.0f64;
        for a in pts {
            for b in pts {
                brute = brute.max((a - b).abs());
            }
        }
        assert_eq!(point_cloud_diameter(&pts, 1), brute);
    }

    #[test]
    fn constant_histories_window_values() {
        let t = run(
            InitialHistory::constant(1.0, vec![vec![0.0], vec![1.0]]).unwrap(),
            2.0,
        );
        let wd = window_diameters(&t, 8).unwrap();
        assert_eq!(wd.len(), 3);
        assert_eq!(wd.d0(), 1.0);
        let same = run(
            InitialHistory::constant(1.0, vec![vec![0.4]; 3]).unwrap(),
            2.0,
        );
        assert!(window_diameters(&same, 8)
            .unwrap()
            .values
            .iter()
            .all(|&v| v == 0.0));
    }

    #[test]
    fn crossing_histories_d0() {
        let h = InitialHistory::new(
            1.0,
            1,
            vec![
                HistoryFn::Polynomial(vec![vec![0.0], vec![1.0]]),
                HistoryFn::Polynomial(vec![vec![0.0], vec![-1.0]]),
            ],
        )
        .unwrap();
        assert_eq!(history_diameter(&h, 8).unwrap(), 2.0);
        let t = run(h, 1.0);
        assert_eq!(window_diameters(&t, 8).unwrap().d0(), 2.0);
    }

    #[test]
    fn too_few_samples_rejected() {
        let t = run(
            InitialHistory::constant(1.0, vec![vec![0.0], vec![1.0]]).unwrap(),
            1.0,
        );
        assert!(window_diameters(&t, 7).is_err());
    }

    #[test]
    fn m0_examples() {
        let h = InitialHistory::constant(1.0, vec![vec![3.0, 4.0]]).unwrap();
        assert_eq!(compute_m0(&h, 8).unwrap(), 5.0);
        let z = InitialHistory::constant(1.0, vec![vec![0.0], vec![0.0]]).unwrap();
        assert_eq!(compute_m0(&z, 8).unwrap(), 0.0);
        let lin = InitialHistory::new(
            1.0,
            1,
            vec![HistoryFn::Polynomial(vec![vec![0.0], vec![1.0]])],
        )
        .unwrap();
        assert_eq!(compute_m0(&lin, 8).unwrap(), 1.0);
    }

    #[test]
    fn dyadic_refinement_never_decreases() {
        let h = InitialHistory::new(
            1.0,
            2,
            vec![
                HistoryFn::Polynomial(vec![vec![0.0, 1.0], vec![0.5, -0.3], vec![1.0, 0.0]]),
                HistoryFn::Constant(vec![-0.2, 0.1]),
                HistoryFn::Polynomial(vec![vec![1.0, 0.0], vec![0.0, 2.0]]),
            ],
        )
        .unwrap();
        let t = run(h, 4.0);
        let coarse = window_diameters(&t, 8).unwrap();
        let fine = window_diameters(&t, 16).unwrap();
        let finer = window_diameters(&t, 32).unwrap();
        for n in 0..coarse.len() {
            assert!(fine.values[n] >= coarse.values[n]);
            assert!(finer.values[n] >= fine.values[n]);
        }
    }
}
