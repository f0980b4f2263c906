//! TOML scenario documents.
//!
//! ```toml
//! horizon = 5.0
//!
//! [delay]
//! kind = "pointwise"
//! tau_bar = 1.0
//! tau = { kind = "constant", value = 0.5 }
//!
//! [influence]
//! kind = "inverse_quadratic"
//! scale = 1.0
//!
//! [[agents]]
//! kind = "constant"
//! value = [1.0]
//!
//! [[agents]]
//! kind = "polynomial"
//! coefficients = [[0.0], [1.0]]
//! ```
//!
//! Optional tables: `[solver]`, `[analysis]`, `[placement]` (instead of `[[agents]]`)
//! and `[meanfield]`. Unknown keys are rejected everywhere.

use serde::Deserialize;

use crate::analysis::CertificateOptions;
use crate::error::{Error, Result};
use crate::meanfield::{MeanFieldConfig, ReferenceProfile};
use crate::model::{
    DelaySpec, GeneralInfluence, HistoryFn, Influence, InfluenceSpec, InitialHistory,
    RadialInfluence, ScalarFn, Scenario,
};
use crate::solver::SolverParams;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    horizon: f64,
    dimension: Option<usize>,
    delay: DelayDoc,
    influence: InfluenceDoc,
    #[serde(default)]
    agents: Vec<HistoryDoc>,
    placement: Option<PlacementDoc>,
    solver: Option<SolverDoc>,
    analysis: Option<AnalysisDoc>,
    meanfield: Option<MeanFieldDoc>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum DelayDoc {
    Pointwise {
        tau_bar: f64,
        tau: ScalarDoc,
    },
    Distributed {
        tau_bar: f64,
        tau1: ScalarDoc,
        tau2: ScalarDoc,
        alpha: ScalarDoc,
    },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum ScalarDoc {
    Constant {
        value: f64,
    },
    Sinusoid {
        offset: f64,
        amplitude: f64,
        frequency: f64,
        #[serde(default)]
        phase: f64,
    },
    Polynomial {
        coefficients: Vec<f64>,
    },
    Exponential {
        scale: f64,
        rate: f64,
    },
    PiecewiseLinear {
        nodes: Vec<(f64, f64)>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum InfluenceDoc {
    /// General-form constant.
    Constant {
        value: f64,
        sup_bound: Option<f64>,
        psi0_override: Option<f64>,
    },
    /// `base + amplitude * sin(x[component])`.
    SineOfComponent {
        base: f64,
        amplitude: f64,
        #[serde(default)]
        component: usize,
        sup_bound: Option<f64>,
        psi0_override: Option<f64>,
    },
    /// Difference-form constant.
    RadialConstant {
        value: f64,
        sup_bound: Option<f64>,
        psi0_override: Option<f64>,
    },
    InverseQuadratic {
        scale: f64,
        sup_bound: Option<f64>,
        psi0_override: Option<f64>,
    },
    Exponential {
        scale: f64,
        rate: f64,
        sup_bound: Option<f64>,
        psi0_override: Option<f64>,
    },
}

impl InfluenceDoc {
    /// Declared `K` and `psi0` override, shared by every kind.
    fn bounds(&self) -> (Option<f64>, Option<f64>) {
        match *self {
            InfluenceDoc::Constant {
                sup_bound,
                psi0_override,
                ..
            }
            | InfluenceDoc::SineOfComponent {
                sup_bound,
                psi0_override,
                ..
            }
            | InfluenceDoc::RadialConstant {
                sup_bound,
                psi0_override,
                ..
            }
            | InfluenceDoc::InverseQuadratic {
                sup_bound,
                psi0_override,
                ..
            }
            | InfluenceDoc::Exponential {
                sup_bound,
                psi0_override,
                ..
            } => (sup_bound, psi0_override),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum HistoryDoc {
    Constant {
        value: Vec<f64>,
    },
    Polynomial {
        coefficients: Vec<Vec<f64>>,
    },
    /// Rows `[s, x0, ..., x{d-1}]`.
    Sampled {
        nodes: Vec<Vec<f64>>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlacementDoc {
    agents: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolverDoc {
    step: Option<f64>,
    corrector_iterations: Option<usize>,
    quadrature_points_per_step: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnalysisDoc {
    samples_per_window: Option<usize>,
    m0_samples: Option<usize>,
    psi0_resolution: Option<usize>,
    hull_directions: Option<usize>,
    hull_samples: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeanFieldDoc {
    ladder: Option<Vec<usize>>,
    tau_star: f64,
    lipschitz: Option<f64>,
    profile: Option<ProfileDoc>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileDoc {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

/// A parsed and validated scenario document.
#[derive(Clone, Debug)]
pub struct ScenarioDocument {
    pub scenario: Scenario,
    pub analysis: CertificateOptions,
    pub meanfield: Option<MeanFieldConfig>,
}

/// Parses and validates a scenario document, ignoring its `[meanfield]` table.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    Ok(parse_document(text)?.scenario)
}

pub fn parse_document(text: &str) -> Result<ScenarioDocument> {
    let doc: Document = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    let analysis = analysis_options(doc.analysis.as_ref());
    let meanfield = doc
        .meanfield
        .as_ref()
        .map(|m| meanfield_config(m, &analysis))
        .transpose()?;
    let scenario = build_scenario(doc)?;
    Ok(ScenarioDocument {
        scenario,
        analysis,
        meanfield,
    })
}

fn scalar(doc: &ScalarDoc) -> Result<ScalarFn> {
    Ok(match doc {
        ScalarDoc::Constant { value } => ScalarFn::constant(*value),
        ScalarDoc::Sinusoid {
            offset,
            amplitude,
            frequency,
            phase,
        } => ScalarFn::sinusoid(*offset, *amplitude, *frequency, *phase),
        ScalarDoc::Polynomial { coefficients } => ScalarFn::Polynomial(coefficients.clone()),
        ScalarDoc::Exponential { scale, rate } => ScalarFn::Exponential {
            scale: *scale,
            rate: *rate,
        },
        ScalarDoc::PiecewiseLinear { nodes } => ScalarFn::piecewise_linear(nodes.clone())?,
    })
}

fn delay(doc: &DelayDoc) -> Result<DelaySpec> {
    let tau_bar = match doc {
        DelayDoc::Pointwise { tau_bar, .. } | DelayDoc::Distributed { tau_bar, .. } => *tau_bar,
    };
    if !(tau_bar > 0.0 && tau_bar.is_finite()) {
        return Err(Error::invalid(format!(
            "delay bound 0 <= tau(t) <= tau_bar requires tau_bar > 0, got {tau_bar}"
        )));
    }
    Ok(match doc {
        DelayDoc::Pointwise { tau, .. } => DelaySpec::pointwise(tau_bar, scalar(tau)?),
        DelayDoc::Distributed {
            tau1, tau2, alpha, ..
        } => DelaySpec::distributed(tau_bar, scalar(tau1)?, scalar(tau2)?, scalar(alpha)?),
    })
}

fn influence(doc: &InfluenceDoc) -> Result<InfluenceSpec> {
    let (influence, analytic_sup) = match *doc {
        InfluenceDoc::Constant { value, .. } => {
            (Influence::General(GeneralInfluence::Constant(value)), value)
        }
        InfluenceDoc::SineOfComponent {
            base,
            amplitude,
            component,
            ..
        } => (
            Influence::General(GeneralInfluence::SineOfComponent {
                base,
                amplitude,
                component,
            }),
            base + amplitude.abs(),
        ),
        InfluenceDoc::RadialConstant { value, .. } => (
            Influence::DifferenceForm(RadialInfluence::Constant(value)),
            value,
        ),
        InfluenceDoc::InverseQuadratic { scale, .. } => (
            Influence::DifferenceForm(RadialInfluence::InverseQuadratic { scale }),
            scale,
        ),
        InfluenceDoc::Exponential { scale, rate, .. } => {
            if !(rate >= 0.0) {
                return Err(Error::invalid(format!(
                    "exponential influence rate {rate} must be >= 0 for a bounded influence"
                )));
            }
            (
                Influence::DifferenceForm(RadialInfluence::Exponential { scale, rate }),
                scale,
            )
        }
    };
    let (sup_bound, psi0_override) = doc.bounds();
    InfluenceSpec::new(influence, sup_bound.unwrap_or(analytic_sup), psi0_override)
}

fn history(doc: &HistoryDoc) -> HistoryFn {
    match doc {
        HistoryDoc::Constant { value } => HistoryFn::Constant(value.clone()),
        HistoryDoc::Polynomial { coefficients } => HistoryFn::Polynomial(coefficients.clone()),
        // an empty row becomes a NaN node, which history validation rejects
        HistoryDoc::Sampled { nodes } => HistoryFn::Sampled(
            nodes
                .iter()
                .map(|row| match row.split_first() {
                    Some((s, x)) => (*s, x.to_vec()),
                    None => (f64::NAN, Vec::new()),
                })
                .collect(),
        ),
    }
}

fn history_dimension(doc: &HistoryDoc) -> Option<usize> {
    match doc {
        HistoryDoc::Constant { value } => Some(value.len()),
        HistoryDoc::Polynomial { coefficients } => coefficients.first().map(Vec::len),
        HistoryDoc::Sampled { nodes } => nodes.first().map(|r| r.len().saturating_sub(1)),
    }
}

fn build_scenario(doc: Document) -> Result<Scenario> {
    let delay = delay(&doc.delay)?;
    let tau_bar = delay.tau_bar();
    let influence = influence(&doc.influence)?;
    let history =
        match (&doc.placement, doc.agents.is_empty()) {
            (Some(_), false) => {
                return Err(Error::Config(
                    "give either [[agents]] or [placement], not both".into(),
                ))
            }
            (None, true) => return Err(Error::invalid(
                "at least two agents are required: add [[agents]] entries or a [placement] table",
            )),
            (Some(p), true) => {
                let profile = ReferenceProfile::new(p.lower.clone(), p.upper.clone())?;
                InitialHistory::constant(tau_bar, profile.place(p.agents)?)?
            }
            (None, false) => {
                let d = match doc.dimension {
                    Some(d) => d,
                    None => history_dimension(&doc.agents[0]).unwrap_or(0),
                };
                let fns = doc.agents.iter().map(history).collect();
                InitialHistory::new(tau_bar, d, fns)?
            }
        };
    if let Some(d) = doc.dimension {
        if d != history.dimension() {
            return Err(Error::invalid(format!(
                "declared dimension {d} differs from the history dimension {}",
                history.dimension()
            )));
        }
    }
    let mut solver = SolverParams::default();
    if let Some(s) = &doc.solver {
        if let Some(step) = s.step {
            solver.step = step;
        }
        if let Some(c) = s.corrector_iterations {
            solver.corrector_iterations = c;
        }
        if let Some(q) = s.quadrature_points_per_step {
            solver.quadrature_points_per_step = q;
        }
    }
    Scenario::new(doc.horizon, delay, influence, history, solver)
}

fn analysis_options(doc: Option<&AnalysisDoc>) -> CertificateOptions {
    let mut opts = CertificateOptions::default();
    if let Some(a) = doc {
        opts.samples_per_window = a.samples_per_window.unwrap_or(opts.samples_per_window);
        opts.m0_samples = a.m0_samples.unwrap_or(opts.m0_samples);
        opts.psi0_resolution = a.psi0_resolution.unwrap_or(opts.psi0_resolution);
        opts.hull_directions = a.hull_directions.unwrap_or(opts.hull_directions);
        opts.hull_samples = a.hull_samples.unwrap_or(opts.hull_samples);
    }
    opts
}

fn meanfield_config(doc: &MeanFieldDoc, analysis: &CertificateOptions) -> Result<MeanFieldConfig> {
    let mut config = MeanFieldConfig::new(
        doc.ladder
            .clone()
            .unwrap_or_else(|| MeanFieldConfig::DEFAULT_LADDER.to_vec()),
        doc.tau_star,
    );
    config.lipschitz = doc.lipschitz;
    config.profile = doc
        .profile
        .as_ref()
        .map(|p| ReferenceProfile::new(p.lower.clone(), p.upper.clone()))
        .transpose()?;
    config.certificate = analysis.clone();
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
horizon = 2.0

[delay]
kind = "pointwise"
tau_bar = 1.0
tau = { kind = "constant", value = 0.5 }

[influence]
kind = "constant"
value = 1.0

[[agents]]
kind = "constant"
value = [1.0]

[[agents]]
kind = "constant"
value = [0.0]
"#;

    #[test]
    fn minimal_document() {
        let s = parse_scenario(MINIMAL).unwrap();
        assert_eq!(s.agent_count(), 2);
        assert_eq!(s.dimension(), 1);
        assert_eq!(s.influence().sup_bound(), 1.0);
    }

    #[test]
    fn unknown_key_rejected_with_line() {
        let text = MINIMAL.replace("horizon = 2.0", "horizon = 2.0\ncolour = 3");
        let err = parse_scenario(&text).unwrap_err().to_string();
        assert!(err.contains("colour"), "{err}");
        assert!(err.contains("line 3"), "{err}");
        let text = MINIMAL.replace("value = 0.5 }", "value = 0.5, extra = 1 }");
        assert!(parse_scenario(&text)
            .unwrap_err()
            .to_string()
            .contains("extra"));
        let text = MINIMAL.replace("value = 1.0\n", "value = 1.0\nshape = 2\n");
        assert!(parse_scenario(&text)
            .unwrap_err()
            .to_string()
            .contains("shape"));
    }

    #[test]
    fn zero_tau_bar_names_delay_bound() {
        let text = MINIMAL.replace("tau_bar = 1.0", "tau_bar = 0.0");
        let err = parse_scenario(&text).unwrap_err().to_string();
        assert!(err.contains("0 <= tau(t) <= tau_bar"), "{err}");
    }

    #[test]
    fn equal_distributed_bounds_rejected() {
        let text = MINIMAL.replace(
            "kind = \"pointwise\"\ntau_bar = 1.0\ntau = { kind = \"constant\", value = 0.5 }",
            "kind = \"distributed\"\ntau_bar = 1.0\ntau1 = { kind = \"constant\", value = 0.5 }\n\
             tau2 = { kind = \"constant\", value = 0.5 }\nalpha = { kind = \"constant\", value = 1.0 }",
        );
        let err = parse_scenario(&text).unwrap_err().to_string();
        assert!(err.contains("tau1(t) < tau2(t)"), "{err}");
    }

    #[test]
    fn placement_and_meanfield_tables() {
        let text = r#"
horizon = 1.0
[delay]
kind = "pointwise"
tau_bar = 0.5
tau = { kind = "constant", value = 0.5 }
[influence]
kind = "inverse_quadratic"
scale = 2.0
[placement]
agents = 8
lower = [0.0, 0.0]
upper = [1.0, 1.0]
[meanfield]
tau_star = 0.5
ladder = [8, 16]
"#;
        let doc = parse_document(text).unwrap();
        assert_eq!(doc.scenario.agent_count(), 8);
        assert_eq!(doc.scenario.influence().sup_bound(), 2.0);
        let mf = doc.meanfield.unwrap();
        assert_eq!(mf.ladder, vec![8, 16]);
    }
}
