use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Absolute slack accepted at the ends of the history domain `[-tau_bar, 0]`.
pub(crate) fn domain_slack(tau_bar: f64) -> f64 {
    1e-12 * tau_bar.max(1.0)
}

/// Writes the state at `s` into the output slice.
pub type HistoryClosure = Arc<dyn Fn(f64, &mut [f64]) + Send + Sync>;

/// Initial opinion of a single agent on `[-tau_bar, 0]`.
#[derive(Clone)]
pub enum HistoryFn {
    Constant(Vec<f64>),
    /// Vector coefficients in increasing degree: `c0 + c1 s + c2 s^2 + ...`.
    Polynomial(Vec<Vec<f64>>),
    /// `(s, value)` nodes covering `[-tau_bar, 0]`, linearly interpolated.
    Sampled(Vec<(f64, Vec<f64>)>),
    Custom(HistoryClosure),
}

impl fmt::Debug for HistoryFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HistoryFn::Constant(v) => write!(f, "Constant({v:?})"),
            HistoryFn::Polynomial(c) => write!(f, "Polynomial({c:?})"),
            HistoryFn::Sampled(n) => write!(f, "Sampled({} nodes)", n.len()),
            HistoryFn::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl HistoryFn {
    pub fn custom<F>(f: F) -> Self
    where
        F: Fn(f64, &mut [f64]) + Send + Sync + 'static,
    {
        HistoryFn::Custom(Arc::new(f))
    }

    fn eval_into(&self, s: f64, out: &mut [f64]) {
        match self {
            HistoryFn::Constant(v) => out.copy_from_slice(v),
            HistoryFn::Polynomial(coeffs) => {
                out.fill(0.0);
                for c in coeffs.iter().rev() {
                    for (o, ck) in out.iter_mut().zip(c) {
                        *o = *o * s + ck;
                    }
                }
            }
            HistoryFn::Sampled(nodes) => {
                let k = nodes
                    .partition_point(|(t, _)| *t <= s)
                    .clamp(1, nodes.len() - 1);
                let (t0, v0) = &nodes[k - 1];
                let (t1, v1) = &nodes[k];
                let w = ((s - t0) / (t1 - t0)).clamp(0.0, 1.0);
                for ((o, a), b) in out.iter_mut().zip(v0).zip(v1) {
                    *o = a + w * (b - a);
                }
            }
            HistoryFn::Custom(f) => f(s, out),
        }
    }

    fn validate(&self, dimension: usize, tau_bar: f64) -> Result<()> {
        match self {
            HistoryFn::Constant(v) if v.len() != dimension => {
                return Err(Error::invalid(format!(
                    "constant history has {} components, expected dimension {dimension}",
                    v.len()
                )))
            }
            HistoryFn::Polynomial(c) if c.is_empty() || c.iter().any(|v| v.len() != dimension) => {
                return Err(Error::invalid(format!(
                    "polynomial history coefficients must be non-empty vectors of dimension {dimension}"
                )))
            }
            HistoryFn::Sampled(nodes) => {
                if nodes.len() < 2 {
                    return Err(Error::invalid("sampled history needs at least two nodes"));
                }
                if nodes.iter().any(|(_, v)| v.len() != dimension) {
                    return Err(Error::invalid(format!(
                        "sampled history values must have dimension {dimension}"
                    )));
                }
                if nodes.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(Error::invalid(
                        "sampled history node times must be strictly increasing",
                    ));
                }
                let slack = domain_slack(tau_bar);
                let (first, last) = (nodes[0].0, nodes[nodes.len() - 1].0);
                if (first + tau_bar).abs() > slack || last.abs() > slack {
                    return Err(Error::invalid(format!(
                        "sampled history must span exactly [-tau_bar, 0] = [{}, 0], got [{first}, {last}]",
                        -tau_bar
                    )));
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// Per-agent initial histories on `[-tau_bar, 0]`.
#[derive(Clone, Debug)]
pub struct InitialHistory {
    tau_bar: f64,
    dimension: usize,
    agents: Vec<HistoryFn>,
}

impl InitialHistory {
    pub fn new(tau_bar: f64, dimension: usize, agents: Vec<HistoryFn>) -> Result<Self> {
        if !(tau_bar > 0.0 && tau_bar.is_finite()) {
            return Err(Error::invalid(
                "history domain [-tau_bar, 0] requires tau_bar > 0",
            ));
        }
        if dimension == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        for a in &agents {
            a.validate(dimension, tau_bar)?;
        }
        let history = Self {
            tau_bar,
            dimension,
            agents,
        };
        // finiteness on a probe grid
        let mut buf = vec![0.0; dimension];
        for i in 0..history.agents.len() {
            for k in 0..=64 {
                let s = -tau_bar + tau_bar * k as f64 / 64.0;
                history.eval_into(i, s, &mut buf)?;
                if buf.iter().any(|x| !x.is_finite()) {
                    return Err(Error::invalid(format!(
                        "history of agent {i} is not finite at s = {s}"
                    )));
                }
            }
        }
        Ok(history)
    }

    /// Every agent holds a constant opinion.
    pub fn constant(tau_bar: f64, points: Vec<Vec<f64>>) -> Result<Self> {
        let dimension = points.first().map_or(0, Vec::len);
        Self::new(
            tau_bar,
            dimension,
            points.into_iter().map(HistoryFn::Constant).collect(),
        )
    }

    pub fn tau_bar(&self) -> f64 {
        self.tau_bar
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn agent_count(&self) -> usize {
        self.agents.len()
    }

    pub fn agents(&self) -> &[HistoryFn] {
        &self.agents
    }

    /// Opinion of `agent` at `s`, with `s` in `[-tau_bar, 0]`.
    pub fn eval(&self, agent: usize, s: f64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dimension];
        self.eval_into(agent, s, &mut out)?;
        Ok(out)
    }

    pub fn eval_into(&self, agent: usize, s: f64, out: &mut [f64]) -> Result<()> {
        let f = self.agents.get(agent).ok_or(Error::InvalidAgent {
            index: agent,
            count: self.agents.len(),
        })?;
        let s = self.clamp_domain(s)?;
        f.eval_into(s, out);
        Ok(())
    }

    /// All agents at `s`, written agent-major into `out` (length `N * d`).
    pub fn eval_all_into(&self, s: f64, out: &mut [f64]) -> Result<()> {
        let s = self.clamp_domain(s)?;
        for (f, chunk) in self.agents.iter().zip(out.chunks_mut(self.dimension)) {
            f.eval_into(s, chunk);
        }
        Ok(())
    }

    fn clamp_domain(&self, s: f64) -> Result<f64> {
        let slack = domain_slack(self.tau_bar);
        if s.is_nan() || s < -self.tau_bar - slack || s > slack {
            return Err(Error::OutOfDomain {
                t: s,
                lower: -self.tau_bar,
                upper: 0.0,
            });
        }
        Ok(s.clamp(-self.tau_bar, 0.0))
    }

    /// Rescales the history domain to `[-new_tau_bar, 0]`.
    ///
    /// Sampled nodes are stretched in time; constant and polynomial histories keep
    /// their formula.
    pub fn with_tau_bar(&self, new_tau_bar: f64) -> Result<Self> {
        let ratio = new_tau_bar / self.tau_bar;
        let agents = self
            .agents
            .iter()
            .map(|a| match a {
                HistoryFn::Sampled(nodes) => {
                    HistoryFn::Sampled(nodes.iter().map(|(s, v)| (s * ratio, v.clone())).collect())
                }
                other => other.clone(),
            })
            .collect();
        Self::new(new_tau_bar, self.dimension, agents)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_history_value() {
        let h = InitialHistory::constant(1.0, vec![vec![1.0, 2.0]]).unwrap();
        assert_eq!(h.eval(0, -0.5).unwrap(), vec![1.0, 2.0]);
    }

    #[test]
    fn polynomial_history_value() {
        let h = InitialHistory::new(
            1.0,
            2,
            vec![HistoryFn::Polynomial(vec![
                vec![0.0, 0.0],
                vec![1.0, 0.0],
                vec![0.0, 1.0],
            ])],
        )
        .unwrap();
        assert_eq!(h.eval(0, -1.0).unwrap(), vec![-1.0, 1.0]);
    }

    #[test]
    fn sampled_history_interpolates_linearly() {
        let h = InitialHistory::new(
            1.0,
            1,
            vec![HistoryFn::Sampled(vec![
                (-1.0, vec![0.0]),
                (0.0, vec![2.0]),
            ])],
        )
        .unwrap();
        assert_eq!(h.eval(0, -0.25).unwrap(), vec![1.5]);
    }

    #[test]
    fn out_of_domain_is_error() {
        let h = InitialHistory::constant(1.0, vec![vec![0.0]]).unwrap();
        assert!(matches!(h.eval(0, 0.1), Err(Error::OutOfDomain { .. })));
        assert!(matches!(h.eval(0, -1.1), Err(Error::OutOfDomain { .. })));
        assert!(matches!(h.eval(3, -0.5), Err(Error::InvalidAgent { .. })));
    }

    #[test]
    fn sampled_history_must_cover_domain() {
        let r = InitialHistory::new(
            1.0,
            1,
            vec![HistoryFn::Sampled(vec![
                (-0.5, vec![0.0]),
                (0.0, vec![2.0]),
            ])],
        );
        assert!(r.is_err());
    }
}
