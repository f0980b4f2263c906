use crate::analysis::point_cloud_diameter;
use crate::error::{Error, Result};
use crate::solver::Trajectory;

/// Largest point count accepted by [`wasserstein1`].
pub const MAX_TRANSPORT_POINTS: usize = 256;

/// Equal-weight point cloud in `R^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalMeasure {
    dimension: usize,
    points: Vec<f64>,
}

impl EmpiricalMeasure {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let dimension = points.first().map_or(0, Vec::len);
        if points.iter().any(|p| p.len() != dimension) {
            return Err(Error::Measure("points have mixed dimensions".into()));
        }
        Self::from_flat(points.concat(), dimension.max(1))
    }

    /// Agent-major flat storage, `dimension` coordinates per point.
    pub fn from_flat(points: Vec<f64>, dimension: usize) -> Result<Self> {
        if dimension == 0 || !points.len().is_multiple_of(dimension) {
            return Err(Error::Measure(format!(
                "{} coordinates do not split into points of dimension {dimension}",
                points.len()
            )));
        }
        if points.iter().any(|x| !x.is_finite()) {
            return Err(Error::Measure("non-finite point".into()));
        }
        Ok(Self { dimension, points })
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.dimension
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dimension..(i + 1) * self.dimension]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks(self.dimension)
    }

    pub fn weights(&self) -> Vec<f64> {
        vec![1.0 / self.len() as f64; self.len()]
    }

    /// Each point repeated `times` times; the measure itself is unchanged.
    pub fn replicated(&self, times: usize) -> Self {
        let mut points = Vec::with_capacity(self.points.len() * times);
        for p in self.points() {
            for _ in 0..times {
                points.extend_from_slice(p);
            }
        }
        Self {
            dimension: self.dimension,
            points,
        }
    }
}

/// One point per agent at `dense_eval(t)`.
pub fn empirical_at(traj: &Trajectory, t: f64) -> Result<EmpiricalMeasure> {
    let mut flat = vec![0.0; traj.agent_count() * traj.dimension()];
    traj.dense_eval_all_into(t, &mut flat)?;
    EmpiricalMeasure::from_flat(flat, traj.dimension())
}

/// Diameter of the support.
pub fn support_diameter(mu: &EmpiricalMeasure) -> Result<f64> {
    if mu.is_empty() {
        return Err(Error::Measure(
            "support diameter of an empty measure".into(),
        ));
    }
    Ok(point_cloud_diameter(&mu.points, mu.dimension))
}

fn check_pair(mu: &EmpiricalMeasure, nu: &EmpiricalMeasure) -> Result<usize> {
    if mu.len() != nu.len() {
        return Err(Error::Measure(format!(
            "unequal point counts {} and {}; resample to a common count",
            mu.len(),
            nu.len()
        )));
    }
    if mu.dimension != nu.dimension {
        return Err(Error::Measure(format!(
            "dimensions {} and {} differ",
            mu.dimension, nu.dimension
        )));
    }
    if mu.is_empty() {
        return Err(Error::Measure("empty measures".into()));
    }
    if mu.len() > MAX_TRANSPORT_POINTS {
        return Err(Error::Measure(format!(
            "{} points exceed the supported {MAX_TRANSPORT_POINTS}",
            mu.len()
        )));
    }
    Ok(mu.len())
}

/// Exact Wasserstein-1 distance between equal-count empirical measures.
///
/// Sorted matching in one dimension, optimal assignment otherwise.
pub fn wasserstein1(mu: &EmpiricalMeasure, nu: &EmpiricalMeasure) -> Result<f64> {
    let n = check_pair(mu, nu)?;
    if mu.dimension == 1 {
        let mut a = mu.points.clone();
        let mut b = nu.points.clone();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        return Ok(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum::<f64>() / n as f64);
    }
    wasserstein1_assignment(mu, nu)
}

/// Wasserstein-1 through the assignment solver in every dimension.
pub fn wasserstein1_assignment(mu: &EmpiricalMeasure, nu: &EmpiricalMeasure) -> Result<f64> {
    let n = check_pair(mu, nu)?;
    let mut cost = Vec::with_capacity(n * n);
    for p in mu.points() {
        for q in nu.points() {
            cost.push(crate::model::influence::distance(p, q));
        }
    }
    let (_, cols) = min_cost_assignment(&cost, n);
    // sum in ascending order so swapping the arguments gives the same bits
    let mut matched: Vec<f64> = cols
        .iter()
        .enumerate()
        .map(|(i, &j)| cost[i * n + j])
        .collect();
    matched.sort_by(f64::total_cmp);
    Ok(matched.iter().sum::<f64>() / n as f64)
}

/// Minimum-cost perfect matching on a dense `n x n` row-major cost matrix
/// (Hungarian method with potentials, `O(n^3)`).
///
/// Returns the total cost and, for each row, its assigned column.
pub fn min_cost_assignment(cost: &[f64], n: usize) -> (f64, Vec<usize>) {
    assert_eq!(cost.len(), n * n, "cost matrix must be n x n");
    // 1-based rows and columns; column 0 is the virtual start
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        let mut min_v = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if cur < min_v[j] {
                    min_v[j] = cur;
                    way[j] = j0;
                }
                if min_v[j] < delta {
                    delta = min_v[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_v[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0; n];
    for j in 1..=n {
        assignment[row_of[j] - 1] = j - 1;
    }
    // sum the original entries rather than trusting the potentials
    let total = assignment
        .iter()
        .enumerate()
        .map(|(i, &j)| cost[i * n + j])
        .sum();
    (total, assignment)
}
