use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::checks::lemma_slack;
use crate::analysis::diameter::complete_windows;
use crate::analysis::{
    build_certificate_with, history_diameter, CertificateOptions, ConsensusCertificate,
    ProofConstants,
};
use crate::error::{Error, Result};
use crate::meanfield::measure::{
    empirical_at, support_diameter, wasserstein1, EmpiricalMeasure, MAX_TRANSPORT_POINTS,
};
use crate::model::delay::DELAY_PROBES;
use crate::model::{DelaySpec, InitialHistory, Scenario};
use crate::solver::integrate;

/// Box `[lower, upper]` in which ladder histories are placed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReferenceProfile {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl ReferenceProfile {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::invalid(
                "profile bounds must be non-empty and of equal dimension",
            ));
        }
        if lower
            .iter()
            .zip(&upper)
            .any(|(a, b)| !(a.is_finite() && b.is_finite() && a <= b))
        {
            return Err(Error::invalid(
                "profile needs finite bounds with lower <= upper",
            ));
        }
        Ok(Self { lower, upper })
    }

    /// Bounding box of a history sampled on `samples` intervals of `[-tau_bar, 0]`.
    pub fn from_history(history: &InitialHistory, samples: usize) -> Result<Self> {
        let d = history.dimension();
        let mut lower = vec![f64::INFINITY; d];
        let mut upper = vec![f64::NEG_INFINITY; d];
        let mut buf = vec![0.0; history.agent_count() * d];
        let tau_bar = history.tau_bar();
        for m in 0..=samples {
            let s = if m == samples {
                0.0
            } else {
                -tau_bar + tau_bar * m as f64 / samples as f64
            };
            history.eval_all_into(s, &mut buf)?;
            for x in buf.chunks(d) {
                for c in 0..d {
                    lower[c] = lower[c].min(x[c]);
                    upper[c] = upper[c].max(x[c]);
                }
            }
        }
        Self::new(lower, upper)
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    /// Deterministic stratified placement of `n` points.
    ///
    /// One dimension: endpoint-inclusive uniform quantiles. Higher dimensions: the
    /// `2^d` corners first, so every ladder member has the same support hull, then an
    /// additive recurrence low-discrepancy sequence.
    pub fn place(&self, n: usize) -> Result<Vec<Vec<f64>>> {
        let d = self.dimension();
        let lerp = |c: usize, u: f64| self.lower[c] + (self.upper[c] - self.lower[c]) * u;
        if d == 1 {
            if n < 2 {
                return Err(Error::invalid("placement needs at least two points"));
            }
            return Ok((0..n)
                .map(|i| {
                    let u = if i == n - 1 {
                        1.0
                    } else {
                        i as f64 / (n - 1) as f64
                    };
                    vec![lerp(0, u)]
                })
                .collect());
        }
        let corners = 1usize << d;
        if n < corners {
            return Err(Error::invalid(format!(
                "placement in dimension {d} needs at least {corners} points, got {n}"
            )));
        }
        let mut points: Vec<Vec<f64>> = (0..corners)
            .map(|mask| {
                (0..d)
                    .map(|c| {
                        if mask >> c & 1 == 1 {
                            self.upper[c]
                        } else {
                            self.lower[c]
                        }
                    })
                    .collect()
            })
            .collect();
        let alpha = recurrence_steps(d);
        for k in 1..=(n - corners) {
            points.push(
                (0..d)
                    .map(|c| lerp(c, (0.5 + k as f64 * alpha[c]).fract()))
                    .collect(),
            );
        }
        Ok(points)
    }
}

/// Steps `phi^{-1}, ..., phi^{-d}` where `phi^{d+1} = phi + 1`.
fn recurrence_steps(d: usize) -> Vec<f64> {
    let mut phi = 2.0f64;
    for _ in 0..64 {
        phi = (1.0 + phi).powf(1.0 / (d as f64 + 1.0));
    }
    (1..=d).map(|k| phi.powi(-(k as i32))).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeanFieldConfig {
    /// Strictly increasing agent counts, `8, 32, 128` by default.
    pub ladder: Vec<usize>,
    /// Lower bound `tau*` on the delay (on `tau_1` for distributed delay).
    pub tau_star: f64,
    /// Lipschitz constant of the influence, recorded in reports only.
    pub lipschitz: Option<f64>,
    /// Placement box; the template's history bounding box when absent.
    pub profile: Option<ReferenceProfile>,
    pub certificate: CertificateOptions,
}

impl MeanFieldConfig {
    pub const DEFAULT_LADDER: [usize; 3] = [8, 32, 128];

    pub fn new(ladder: Vec<usize>, tau_star: f64) -> Self {
        Self {
            ladder,
            tau_star,
            lipschitz: None,
            profile: None,
            certificate: CertificateOptions::default(),
        }
    }

    fn validate(&self, template: &Scenario) -> Result<()> {
        if self.ladder.is_empty() || self.ladder.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid(format!(
                "mean-field ladder {:?} must be non-empty and strictly increasing",
                self.ladder
            )));
        }
        if !(self.tau_star > 0.0) {
            return Err(Error::invalid(format!(
                "tau* = {} must be strictly positive",
                self.tau_star
            )));
        }
        let lowest = lowest_delay(template.delay(), template.horizon())?;
        if lowest < self.tau_star {
            return Err(Error::invalid(format!(
                "delay lower bound tau(t) >= tau* = {} violated: sampled minimum {lowest}",
                self.tau_star
            )));
        }
        Ok(())
    }
}

/// Smallest sampled `tau(t)` (or `tau_1(t)`) on `[0, horizon]`.
fn lowest_delay(delay: &DelaySpec, horizon: f64) -> Result<f64> {
    let mut lowest = f64::INFINITY;
    for k in 0..=DELAY_PROBES {
        let t = horizon * k as f64 / DELAY_PROBES as f64;
        let v = if delay.is_distributed() {
            delay.eval_distributed(t)?.0
        } else {
            delay.eval_pointwise(t)?
        };
        lowest = lowest.min(v);
    }
    Ok(lowest)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayRow {
    pub agents: usize,
    pub t: f64,
    pub dx: f64,
    pub bound: f64,
    pub margin: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LadderMember {
    pub agents: usize,
    /// `max_s d_X(g_s)` over the initial history.
    pub initial_support_diameter: f64,
    pub worst_margin: f64,
    pub certificate: ConsensusCertificate,
    #[serde(skip)]
    pub rows: Vec<DecayRow>,
    #[serde(skip)]
    snapshots: Vec<EmpiricalMeasure>,
}

/// Wasserstein-1 distance between a member and the largest member at a window anchor.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct W1Row {
    pub agents: usize,
    pub t: f64,
    pub w1: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MeanFieldReport {
    pub tau_star: f64,
    pub lipschitz: Option<f64>,
    pub constants_identical: bool,
    pub slack: f64,
    pub worst_margin: f64,
    pub members: Vec<LadderMember>,
    pub w1: Vec<W1Row>,
}

impl MeanFieldReport {
    pub fn constants(&self) -> Vec<ProofConstants> {
        self.members
            .iter()
            .map(|m| m.certificate.constants())
            .collect()
    }

    pub fn certificates_passed(&self) -> bool {
        self.members.iter().all(|m| m.certificate.passed())
    }

    pub fn decay_passed(&self) -> bool {
        self.worst_margin >= -self.slack
    }

    pub fn passed(&self) -> bool {
        self.constants_identical && self.certificates_passed() && self.decay_passed()
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Out<'a> {
            #[serde(flatten)]
            report: &'a MeanFieldReport,
            passed: bool,
        }
        serde_json::to_string_pretty(&Out {
            report: self,
            passed: self.passed(),
        })
        .expect("report serialises")
    }

    /// CSV `N,t,dX,bound,margin`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "N,t,dX,bound,margin")?;
        for m in &self.members {
            for r in &m.rows {
                writeln!(
                    w,
                    "{},{:.9},{},{},{}",
                    r.agents, r.t, r.dx, r.bound, r.margin
                )?;
            }
        }
        Ok(())
    }

    /// CSV `N,t,w1`.
    pub fn write_w1_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "N,t,w1")?;
        for r in &self.w1 {
            writeln!(w, "{},{:.9},{}", r.agents, r.t, r.w1)?;
        }
        Ok(())
    }
}

/// Scenario for ladder member `n`: the template with `n` constant histories placed in
/// the profile.
pub fn ladder_scenario(
    template: &Scenario,
    profile: &ReferenceProfile,
    n: usize,
) -> Result<Scenario> {
    if profile.dimension() != template.dimension() {
        return Err(Error::invalid(format!(
            "profile dimension {} differs from scenario dimension {}",
            profile.dimension(),
            template.dimension()
        )));
    }
    template.with_history(InitialHistory::constant(
        template.tau_bar(),
        profile.place(n)?,
    )?)
}

/// Integrates and certifies every ladder member concurrently, then checks that the
/// proof constants coincide and that `d_X(mu_t) <= max_s d_X(g_s) e^{-gamma (t - 2 tau_bar)}`
/// on every grid node of every member.
pub fn n_independence_report(
    config: &MeanFieldConfig,
    template: &Scenario,
) -> Result<MeanFieldReport> {
    config.validate(template)?;
    let profile = match &config.profile {
        Some(p) => p.clone(),
        None => ReferenceProfile::from_history(
            template.history(),
            config.certificate.samples_per_window,
        )?,
    };
    let members = config
        .ladder
        .par_iter()
        .map(|&n| run_member(template, &profile, n, &config.certificate))
        .collect::<Result<Vec<_>>>()?;

    let first = members[0].certificate.constants();
    let constants_identical = members.iter().all(|m| m.certificate.constants() == first);
    let d0 = members
        .iter()
        .map(|m| m.initial_support_diameter)
        .fold(0.0, f64::max);
    let worst_margin = members
        .iter()
        .map(|m| m.worst_margin)
        .fold(f64::INFINITY, f64::min);
    let w1 = w1_rows(&members, template.tau_bar())?;
    Ok(MeanFieldReport {
        tau_star: config.tau_star,
        lipschitz: config.lipschitz,
        constants_identical,
        slack: lemma_slack(d0),
        worst_margin,
        members,
        w1,
    })
}

/// As [`n_independence_report`], but any failing member or violated ladder property is
/// an error.
pub fn n_independence_check(
    config: &MeanFieldConfig,
    template: &Scenario,
) -> Result<MeanFieldReport> {
    let report = n_independence_report(config, template)?;
    for m in &report.members {
        if let Some(failed) = m.certificate.failed_checks().next() {
            return Err(Error::LadderMember {
                agents: m.agents,
                reason: format!("check {} failed", failed.name),
            });
        }
        if m.worst_margin < -report.slack {
            return Err(Error::LadderMember {
                agents: m.agents,
                reason: format!(
                    "support diameter exceeds the decay bound by {}",
                    -m.worst_margin
                ),
            });
        }
    }
    if !report.constants_identical {
        return Err(Error::LadderMember {
            agents: report.members.last().map_or(0, |m| m.agents),
            reason: "proof constants differ across the ladder".into(),
        });
    }
    Ok(report)
}

fn run_member(
    template: &Scenario,
    profile: &ReferenceProfile,
    n: usize,
    opts: &CertificateOptions,
) -> Result<LadderMember> {
    let scenario = ladder_scenario(template, profile, n)?;
    let traj = integrate(&scenario)?;
    let certificate = build_certificate_with(&traj, &scenario, opts)?;
    let initial = history_diameter(scenario.history(), opts.samples_per_window)?;
    let tau_bar = scenario.tau_bar();
    let mut rows = Vec::with_capacity(traj.node_count());
    let mut worst = f64::INFINITY;
    for k in 0..traj.node_count() {
        let t = traj.time(k);
        let dx = support_diameter(&EmpiricalMeasure::from_flat(
            traj.state(k).to_vec(),
            traj.dimension(),
        )?)?;
        let bound = initial * (-certificate.gamma * (t - 2.0 * tau_bar)).exp();
        let margin = bound - dx;
        worst = worst.min(margin);
        rows.push(DecayRow {
            agents: n,
            t,
            dx,
            bound,
            margin,
        });
    }
    let snapshots = (0..complete_windows(&traj))
        .map(|w| empirical_at(&traj, w as f64 * tau_bar))
        .collect::<Result<_>>()?;
    Ok(LadderMember {
        agents: n,
        initial_support_diameter: initial,
        worst_margin: worst,
        certificate,
        rows,
        snapshots,
    })
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn w1_rows(members: &[LadderMember], tau_bar: f64) -> Result<Vec<W1Row>> {
    let Some(finest) = members.last() else {
        return Ok(Vec::new());
    };
    let mut rows = Vec::new();
    for m in &members[..members.len() - 1] {
        let (a, b) = (m.agents, finest.agents);
        let common = a / gcd(a, b) * b;
        if common > MAX_TRANSPORT_POINTS {
            log::info!(
                "skipping W1 for N = {a}: common count {common} exceeds {MAX_TRANSPORT_POINTS}"
            );
            continue;
        }
        for (w, (mu, nu)) in m.snapshots.iter().zip(&finest.snapshots).enumerate() {
            rows.push(W1Row {
                agents: a,
                t: w as f64 * tau_bar,
                w1: wasserstein1(&mu.replicated(common / a), &nu.replicated(common / b))?,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_placement_is_quantiles() {
        let p = ReferenceProfile::new(vec![0.0], vec![1.0]).unwrap();
        let pts = p.place(5).unwrap();
        assert_eq!(
            pts,
            vec![vec![0.0], vec![0.25], vec![0.5], vec![0.75], vec![1.0]]
        );
    }

    #[test]
    fn corners_pinned_in_higher_dimension() {
        let p = ReferenceProfile::new(vec![-1.0, 0.0], vec![1.0, 2.0]).unwrap();
        let pts = p.place(32).unwrap();
        assert_eq!(pts.len(), 32);
        assert_eq!(
            &pts[..4],
            &[
                vec![-1.0, 0.0],
                vec![1.0, 0.0],
                vec![-1.0, 2.0],
                vec![1.0, 2.0]
            ]
        );
        assert!(pts
            .iter()
            .all(|x| (-1.0..=1.0).contains(&x[0]) && (0.0..=2.0).contains(&x[1])));
        assert!(p.place(3).is_err());
    }

    #[test]
    fn recurrence_root() {
        // plastic number for d = 2
        let a = recurrence_steps(2);
        let phi = 1.0 / a[0];
        assert!((phi.powi(3) - phi - 1.0).abs() < 1e-12);
    }
}
