use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::checks::{
    hull_anchors, lemma_slack, verify_hull_confinement, verify_lemma_chain, CheckRecord,
};
use crate::analysis::diameter::{compute_m0, diameter_at_node, window_diameters, WindowDiameters};
use crate::analysis::rate::fit_decay_rate;
use crate::error::{Error, Result};
use crate::model::Scenario;
use crate::solver::{CorrectorStats, Trajectory};

/// Slack on `rate >= gamma`.
pub const RATE_SLACK: f64 = 1e-6;
/// Diameters below `RATE_FLOOR * (1 + M0)` sit at the rounding floor of the states and
/// are left out of the rate fit.
pub const RATE_FLOOR: f64 = 1e-9;

/// `C`, `C~` and `gamma` as functions of `(K, psi0, tau_bar)` alone.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProofConstants {
    #[serde(rename = "K")]
    pub k: f64,
    pub psi0: f64,
    pub tau_bar: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "C_tilde")]
    pub c_tilde: f64,
    pub gamma: f64,
}

impl ProofConstants {
    /// `C = max{1 - e^{-2K tau}, 1 - (psi0/K)(1 - e^{-K tau})}`,
    /// `C~ = 1 - e^{-K tau}(1 - C)`, `gamma = ln(1/C~) / (3 tau)`.
    ///
    /// Complements are carried directly so nothing cancels when `K tau` is small.
    pub fn new(k: f64, psi0: f64, tau_bar: f64) -> Result<Self> {
        if !(psi0 > 0.0 && psi0.is_finite()) {
            return Err(Error::CertificateRefused(format!(
                "psi0 = {psi0} must be positive"
            )));
        }
        if !(k.is_finite() && k >= psi0) {
            return Err(Error::CertificateRefused(format!(
                "declared bound K = {k} is below psi0 = {psi0}"
            )));
        }
        if !(tau_bar > 0.0 && tau_bar.is_finite()) {
            return Err(Error::CertificateRefused(format!(
                "tau_bar = {tau_bar} must be positive"
            )));
        }
        let kt = k * tau_bar;
        let one_minus_c = (-2.0 * kt).exp().min(-(psi0 / k) * (-kt).exp_m1());
        let one_minus_ct = (-kt).exp() * one_minus_c;
        if !(one_minus_c > 0.0 && one_minus_ct > 0.0) {
            return Err(Error::CertificateRefused(format!(
                "contraction constant is not below 1 (1 - C = {one_minus_c:e})"
            )));
        }
        let c = 1.0 - one_minus_c;
        let c_tilde = 1.0 - one_minus_ct;
        if !(c > 0.0) {
            return Err(Error::CertificateRefused(format!(
                "C = {c} is not positive"
            )));
        }
        let gamma = -(-one_minus_ct).ln_1p() / (3.0 * tau_bar);
        if !(gamma > 0.0) {
            return Err(Error::CertificateRefused(format!(
                "gamma = {gamma} is not positive"
            )));
        }
        Ok(Self {
            k,
            psi0,
            tau_bar,
            c,
            c_tilde,
            gamma,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertificateOptions {
    /// Sample intervals per window for `D_n`.
    pub samples_per_window: usize,
    /// Sample intervals of `[-tau_bar, 0]` for `M0`.
    pub m0_samples: usize,
    pub psi0_resolution: usize,
    /// Random probe directions for hull confinement, on top of the signed axes.
    pub hull_directions: usize,
    /// Uniform sample intervals of each hull window, on top of its grid nodes.
    pub hull_samples: usize,
}

impl Default for CertificateOptions {
    fn default() -> Self {
        Self {
            samples_per_window: 16,
            m0_samples: 64,
            psi0_resolution: crate::model::influence::DEFAULT_PSI0_RESOLUTION,
            hull_directions: 16,
            hull_samples: 16,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConsensusCertificate {
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "M0")]
    pub m0: f64,
    pub psi0: f64,
    #[serde(rename = "D0")]
    pub d0: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "C_tilde")]
    pub c_tilde: f64,
    pub gamma: f64,
    pub tau_bar: f64,
    /// Slack `1e-6 (1 + D0)` used by the lemma checks.
    pub slack: f64,
    pub empirical_rate: Option<f64>,
    pub window_diameters: Vec<f64>,
    pub corrector_max_residual: f64,
    pub corrector_unconverged_steps: usize,
    pub checks: Vec<CheckRecord>,
}

impl ConsensusCertificate {
    /// Constants only, no checks attached yet.
    pub fn from_constants(
        constants: ProofConstants,
        m0: f64,
        d0: f64,
        corrector: &CorrectorStats,
    ) -> Self {
        Self {
            k: constants.k,
            m0,
            psi0: constants.psi0,
            d0,
            c: constants.c,
            c_tilde: constants.c_tilde,
            gamma: constants.gamma,
            tau_bar: constants.tau_bar,
            slack: lemma_slack(d0),
            empirical_rate: None,
            window_diameters: Vec::new(),
            corrector_max_residual: corrector.max_residual,
            corrector_unconverged_steps: corrector.unconverged_steps,
            checks: Vec::new(),
        }
    }

    pub fn constants(&self) -> ProofConstants {
        ProofConstants {
            k: self.k,
            psi0: self.psi0,
            tau_bar: self.tau_bar,
            c: self.c,
            c_tilde: self.c_tilde,
            gamma: self.gamma,
        }
    }

    /// `D0 e^{-gamma (t - 2 tau_bar)}`.
    pub fn bound_at(&self, t: f64) -> f64 {
        self.d0 * (-self.gamma * (t - 2.0 * self.tau_bar)).exp()
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Report<'a> {
            #[serde(flatten)]
            cert: &'a ConsensusCertificate,
            passed: bool,
        }
        serde_json::to_string_pretty(&Report {
            cert: self,
            passed: self.passed(),
        })
        .expect("certificate serialises")
    }

    /// CSV `t,d_t,bound_t` over every grid node.
    pub fn write_metrics_csv<W: Write>(&self, traj: &Trajectory, mut w: W) -> Result<()> {
        writeln!(w, "t,d_t,bound_t")?;
        for k in 0..traj.node_count() {
            let t = traj.time(k);
            writeln!(
                w,
                "{t:.9},{},{}",
                diameter_at_node(traj, k),
                self.bound_at(t)
            )?;
        }
        Ok(())
    }
}

pub fn build_certificate(traj: &Trajectory, scenario: &Scenario) -> Result<ConsensusCertificate> {
    build_certificate_with(traj, scenario, &CertificateOptions::default())
}

/// Computes `K, M0, psi0, D0` and the proof constants, then runs hull confinement at
/// every window anchor, the lemma chain and rate dominance.
pub fn build_certificate_with(
    traj: &Trajectory,
    scenario: &Scenario,
    opts: &CertificateOptions,
) -> Result<ConsensusCertificate> {
    let wd = window_diameters(traj, opts.samples_per_window)?;
    let mut cert = certificate_constants(traj, scenario, &wd, opts)?;
    let mut checks = verify_lemma_chain(traj, &cert, &wd)?;
    checks.push(hull_record(traj, opts)?);
    checks.push(rate_record(traj, &mut cert));
    cert.checks = checks;
    Ok(cert)
}

/// Constants of a certificate without running any check.
pub fn certificate_constants(
    traj: &Trajectory,
    scenario: &Scenario,
    wd: &WindowDiameters,
    opts: &CertificateOptions,
) -> Result<ConsensusCertificate> {
    let influence = scenario.influence();
    let k = influence.sup_bound();
    let d0 = wd.d0();
    let m0 = compute_m0(scenario.history(), opts.m0_samples)?;
    let psi0 = influence.compute_psi0(scenario.dimension(), m0, d0, opts.psi0_resolution)?;
    let constants = ProofConstants::new(k, psi0, scenario.tau_bar())?;
    let mut cert = ConsensusCertificate::from_constants(constants, m0, d0, traj.corrector_stats());
    cert.window_diameters = wd.values.clone();
    Ok(cert)
}

fn hull_record(traj: &Trajectory, opts: &CertificateOptions) -> Result<CheckRecord> {
    let anchors = hull_anchors(traj);
    let reports = anchors
        .par_iter()
        .map(|&a| verify_hull_confinement(traj, a, opts.hull_directions, opts.hull_samples))
        .collect::<Result<Vec<_>>>()?;
    let Some(slack) = reports.first().map(|r| r.slack) else {
        return Ok(CheckRecord::skipped(
            "hull_confinement",
            "no anchor before the horizon",
        ));
    };
    let worst = reports
        .iter()
        .map(|r| r.worst_margin)
        .fold(f64::INFINITY, f64::min);
    Ok(CheckRecord::from_margin("hull_confinement", worst, slack))
}

/// Fits the rate on `[2 tau_bar, T]`, truncated where `d(t)` reaches the rounding floor.
fn rate_record(traj: &Trajectory, cert: &mut ConsensusCertificate) -> CheckRecord {
    let start = 2.0 * cert.tau_bar;
    let floor = RATE_FLOOR * (1.0 + cert.m0);
    let mut end = None;
    for k in 0..traj.node_count() {
        let t = traj.time(k);
        if t < start - 1e-9 * traj.step() {
            continue;
        }
        if diameter_at_node(traj, k) <= floor {
            break;
        }
        end = Some(t);
    }
    let Some(end) = end else {
        return CheckRecord::skipped("rate_dominance", "no fit range above the rounding floor");
    };
    match fit_decay_rate(traj, start, end) {
        Ok(rate) => {
            cert.empirical_rate = Some(rate);
            CheckRecord::from_margin("rate_dominance", rate - cert.gamma, RATE_SLACK)
        }
        Err(e) => CheckRecord::skipped("rate_dominance", &e.to_string()),
    }
}
