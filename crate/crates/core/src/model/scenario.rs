use crate::error::{Error, Result};
use crate::model::delay::DelaySpec;
use crate::model::history::{HistoryFn, InitialHistory};
use crate::model::influence::InfluenceSpec;
use crate::solver::SolverParams;

/// Full problem description: agents, delay, influence, initial data and solver settings.
#[derive(Clone, Debug)]
pub struct Scenario {
    agent_count: usize,
    dimension: usize,
    horizon: f64,
    delay: DelaySpec,
    influence: InfluenceSpec,
    history: InitialHistory,
    solver: SolverParams,
}

impl Scenario {
    pub fn new(
        horizon: f64,
        delay: DelaySpec,
        influence: InfluenceSpec,
        history: InitialHistory,
        solver: SolverParams,
    ) -> Result<Self> {
        let scenario = Self {
            agent_count: history.agent_count(),
            dimension: history.dimension(),
            horizon,
            delay,
            influence,
            history,
            solver,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    fn validate(&self) -> Result<()> {
        if self.agent_count < 2 {
            return Err(Error::invalid(format!(
                "at least two agents are required, got {}",
                self.agent_count
            )));
        }
        if self.dimension < 1 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::invalid(format!(
                "horizon T = {} must be positive",
                self.horizon
            )));
        }
        let tau_bar = self.delay.tau_bar();
        if !(tau_bar > 0.0) {
            return Err(Error::invalid(format!(
                "delay bound 0 <= tau(t) <= tau_bar requires tau_bar > 0, got {tau_bar}"
            )));
        }
        if (self.history.tau_bar() - tau_bar).abs() > 1e-12 * tau_bar {
            return Err(Error::invalid(format!(
                "history domain [-{}, 0] does not match delay bound tau_bar = {tau_bar}",
                self.history.tau_bar()
            )));
        }
        self.delay.validate(self.horizon)?;
        self.solver.validate(tau_bar, self.horizon)?;
        self.probe_influence()?;
        Ok(())
    }

    /// Probes the influence on pairs of initial opinions at the ends of the history window.
    fn probe_influence(&self) -> Result<()> {
        let tau_bar = self.delay.tau_bar();
        let mut points = Vec::new();
        for i in 0..self.agent_count {
            for s in [-tau_bar, -0.5 * tau_bar, 0.0] {
                points.push(self.history.eval(i, s)?);
            }
        }
        for x in &points {
            for y in &points {
                self.influence.eval(x, y).map_err(|e| {
                    Error::invalid(format!("influence must be positive and bounded by K: {e}"))
                })?;
            }
        }
        Ok(())
    }

    pub fn agent_count(&self) -> usize {
        self.agent_count
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn tau_bar(&self) -> f64 {
        self.delay.tau_bar()
    }

    pub fn delay(&self) -> &DelaySpec {
        &self.delay
    }

    pub fn influence(&self) -> &InfluenceSpec {
        &self.influence
    }

    pub fn history(&self) -> &InitialHistory {
        &self.history
    }

    pub fn solver(&self) -> &SolverParams {
        &self.solver
    }

    pub fn with_history(&self, history: InitialHistory) -> Result<Self> {
        Self::new(
            self.horizon,
            self.delay.clone(),
            self.influence.clone(),
            history,
            self.solver.clone(),
        )
    }

    pub fn with_solver(&self, solver: SolverParams) -> Result<Self> {
        Self::new(
            self.horizon,
            self.delay.clone(),
            self.influence.clone(),
            self.history.clone(),
            solver,
        )
    }

    pub fn with_horizon(&self, horizon: f64) -> Result<Self> {
        Self::new(
            horizon,
            self.delay.clone(),
            self.influence.clone(),
            self.history.clone(),
            self.solver.clone(),
        )
    }

    pub fn with_influence(&self, influence: InfluenceSpec) -> Result<Self> {
        Self::new(
            self.horizon,
            self.delay.clone(),
            influence,
            self.history.clone(),
            self.solver.clone(),
        )
    }

    /// Replaces the delay bound, scaling every lag function and the history domain.
    pub fn with_tau_bar(&self, tau_bar: f64) -> Result<Self> {
        if !(tau_bar > 0.0 && tau_bar.is_finite()) {
            return Err(Error::invalid(format!(
                "delay bound 0 <= tau(t) <= tau_bar requires tau_bar > 0, got {tau_bar}"
            )));
        }
        let ratio = tau_bar / self.tau_bar();
        Self::new(
            self.horizon,
            self.delay.scaled(ratio),
            self.influence.clone(),
            self.history.with_tau_bar(tau_bar)?,
            self.solver.clone(),
        )
    }

    /// Same scenario with agents relabeled: new agent `k` is old agent `order[k]`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let agents: Vec<HistoryFn> = order
            .iter()
            .map(|&i| {
                self.history
                    .agents()
                    .get(i)
                    .cloned()
                    .ok_or(Error::InvalidAgent {
                        index: i,
                        count: self.agent_count,
                    })
            })
            .collect::<Result<_>>()?;
        self.with_history(InitialHistory::new(self.tau_bar(), self.dimension, agents)?)
    }
}
