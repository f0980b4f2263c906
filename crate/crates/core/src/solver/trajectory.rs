use std::io::Write;

use crate::error::{Error, Result};
use crate::model::history::domain_slack;
use crate::model::InitialHistory;
use crate::solver::hermite::hermite_into;
use crate::solver::PastStates;

/// Fraction of a step within which a dense query snaps onto a grid node.
const NODE_SNAP: f64 = 1e-12;
/// Fraction of a step accepted past the last node.
const RANGE_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CorrectorStats {
    /// Steps in which some delayed argument fell inside the step being computed.
    pub corrected_steps: usize,
    /// Steps whose last corrector pass moved the state by more than the tolerance.
    pub unconverged_steps: usize,
    pub max_residual: f64,
}

/// Solution on the uniform grid `t_k = k * step`, with dense output on `[-tau_bar, T]`.
///
/// States and derivatives are stored agent-major: node `k`, agent `i`, component `c`
/// lives at `(k * N + i) * d + c`.
#[derive(Clone, Debug)]
pub struct Trajectory {
    agent_count: usize,
    dimension: usize,
    step: f64,
    horizon: f64,
    states: Vec<f64>,
    derivs: Vec<f64>,
    history: InitialHistory,
    pub(crate) corrector: CorrectorStats,
}

impl Trajectory {
    /// Empty trajectory holding only the node `t = 0`, taken from the history.
    pub(crate) fn start(history: InitialHistory, step: f64, horizon: f64) -> Result<Self> {
        let agent_count = history.agent_count();
        let dimension = history.dimension();
        let mut states = vec![0.0; agent_count * dimension];
        history.eval_all_into(0.0, &mut states)?;
        Ok(Self {
            agent_count,
            dimension,
            step,
            horizon,
            states,
            derivs: Vec::new(),
            history,
            corrector: CorrectorStats::default(),
        })
    }

    pub(crate) fn push_state(&mut self, state: &[f64]) {
        self.states.extend_from_slice(state);
    }

    pub(crate) fn push_deriv(&mut self, deriv: &[f64]) {
        self.derivs.extend_from_slice(deriv);
    }

    fn width(&self) -> usize {
        self.agent_count * self.dimension
    }

    pub fn agent_count(&self) -> usize {
        self.agent_count
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn tau_bar(&self) -> f64 {
        self.history.tau_bar()
    }

    pub fn history(&self) -> &InitialHistory {
        &self.history
    }

    pub fn corrector_stats(&self) -> &CorrectorStats {
        &self.corrector
    }

    pub fn node_count(&self) -> usize {
        self.states.len() / self.width()
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.step
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.node_count()).map(|k| self.time(k))
    }

    pub fn last_time(&self) -> f64 {
        self.time(self.node_count() - 1)
    }

    /// All agents at node `k`.
    pub fn state(&self, k: usize) -> &[f64] {
        let w = self.width();
        &self.states[k * w..(k + 1) * w]
    }

    pub fn agent_state(&self, k: usize, agent: usize) -> &[f64] {
        let d = self.dimension;
        &self.state(k)[agent * d..(agent + 1) * d]
    }

    /// Stored right-hand side at node `k`.
    pub fn deriv(&self, k: usize) -> &[f64] {
        let w = self.width();
        &self.derivs[k * w..(k + 1) * w]
    }

    /// State of `agent` at `t` in `[-tau_bar, T]`.
    pub fn dense_eval(&self, agent: usize, t: f64) -> Result<Vec<f64>> {
        if agent >= self.agent_count {
            return Err(Error::InvalidAgent {
                index: agent,
                count: self.agent_count,
            });
        }
        let mut all = vec![0.0; self.width()];
        self.dense_eval_all_into(t, &mut all)?;
        let d = self.dimension;
        Ok(all[agent * d..(agent + 1) * d].to_vec())
    }

    /// All agents at `t` in `[-tau_bar, T]`: initial history for `t < 0`, Hermite
    /// interpolation between the bracketing nodes otherwise.
    pub fn dense_eval_all_into(&self, t: f64, out: &mut [f64]) -> Result<()> {
        let last = self.last_time();
        let upper = last + RANGE_SLACK * self.step;
        let lower = -self.tau_bar() - domain_slack(self.tau_bar());
        if t.is_nan() || t < lower || t > upper {
            return Err(Error::OutOfDomain {
                t,
                lower: -self.tau_bar(),
                upper: last,
            });
        }
        if t < 0.0 {
            return self.history.eval_all_into(t, out);
        }
        let nodes = self.node_count();
        if nodes == 1 {
            out.copy_from_slice(self.state(0));
            return Ok(());
        }
        let k = ((t / self.step).floor() as usize).min(nodes - 2);
        let theta = (t - self.time(k)) / self.step;
        if theta <= NODE_SNAP {
            out.copy_from_slice(self.state(k));
        } else if theta >= 1.0 - NODE_SNAP {
            out.copy_from_slice(self.state(k + 1));
        } else {
            hermite_into(
                theta,
                self.step,
                self.state(k),
                self.state(k + 1),
                self.deriv(k),
                self.deriv(k + 1),
                out,
            );
        }
        Ok(())
    }

    /// Per-agent states at `t` as separate vectors.
    pub fn agents_at(&self, t: f64) -> Result<Vec<Vec<f64>>> {
        let mut all = vec![0.0; self.width()];
        self.dense_eval_all_into(t, &mut all)?;
        Ok(all.chunks(self.dimension).map(<[f64]>::to_vec).collect())
    }

    /// CSV with header `t,agent,x0,...,x{d-1}`, one row per grid time and agent.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let mut header = String::from("t,agent");
        for c in 0..self.dimension {
            header.push_str(&format!(",x{c}"));
        }
        writeln!(w, "{header}")?;
        for k in 0..self.node_count() {
            let t = self.time(k);
            for i in 0..self.agent_count {
                let mut line = format!("{t:.9},{i}");
                for x in self.agent_state(k, i) {
                    line.push_str(&format!(",{x}"));
                }
                writeln!(w, "{line}")?;
            }
        }
        Ok(())
    }
}

impl PastStates for Trajectory {
    fn states_at(&self, t: f64, out: &mut [f64]) -> Result<()> {
        self.dense_eval_all_into(t, out)
    }
}
