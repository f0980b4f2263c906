use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Continuous real function of one variable, used for delays and kernels.
#[derive(Clone)]
pub enum ScalarFn {
    Constant(f64),
    /// `offset + amplitude * sin(frequency * t + phase)`
    Sinusoid {
        offset: f64,
        amplitude: f64,
        frequency: f64,
        phase: f64,
    },
    /// Coefficients in increasing degree.
    Polynomial(Vec<f64>),
    /// `scale * exp(rate * t)`
    Exponential {
        scale: f64,
        rate: f64,
    },
    /// Linear interpolation between `(t, value)` nodes; held constant outside the node range.
    PiecewiseLinear(Vec<(f64, f64)>),
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl ScalarFn {
    pub fn constant(value: f64) -> Self {
        ScalarFn::Constant(value)
    }

    pub fn sinusoid(offset: f64, amplitude: f64, frequency: f64, phase: f64) -> Self {
        ScalarFn::Sinusoid {
            offset,
            amplitude,
            frequency,
            phase,
        }
    }

    pub fn piecewise_linear(nodes: Vec<(f64, f64)>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::invalid(
                "piecewise-linear function needs at least one node",
            ));
        }
        if nodes.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::invalid(
                "piecewise-linear node times must be strictly increasing",
            ));
        }
        if nodes.iter().any(|(t, v)| !t.is_finite() || !v.is_finite()) {
            return Err(Error::invalid("piecewise-linear nodes must be finite"));
        }
        Ok(ScalarFn::PiecewiseLinear(nodes))
    }

    pub fn custom<F>(f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        ScalarFn::Custom(Arc::new(f))
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            ScalarFn::Constant(c) => *c,
            ScalarFn::Sinusoid {
                offset,
                amplitude,
                frequency,
                phase,
            } => offset + amplitude * (frequency * t + phase).sin(),
            ScalarFn::Polynomial(coeffs) => coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c),
            ScalarFn::Exponential { scale, rate } => scale * (rate * t).exp(),
            ScalarFn::PiecewiseLinear(nodes) => interpolate_scalar(nodes, t),
            ScalarFn::Custom(f) => f(t),
        }
    }

    pub fn is_constant(&self) -> Option<f64> {
        match self {
            ScalarFn::Constant(c) => Some(*c),
            _ => None,
        }
    }
}

impl fmt::Debug for ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarFn::Constant(c) => write!(f, "Constant({c})"),
            ScalarFn::Sinusoid {
                offset,
                amplitude,
                frequency,
                phase,
            } => write!(
                f,
                "Sinusoid({offset} + {amplitude} sin({frequency} t + {phase}))"
            ),
            ScalarFn::Polynomial(c) => write!(f, "Polynomial({c:?})"),
            ScalarFn::Exponential { scale, rate } => write!(f, "Exponential({scale} e^({rate} t))"),
            ScalarFn::PiecewiseLinear(n) => write!(f, "PiecewiseLinear({} nodes)", n.len()),
            ScalarFn::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

fn interpolate_scalar(nodes: &[(f64, f64)], t: f64) -> f64 {
    let first = nodes[0];
    let last = nodes[nodes.len() - 1];
    if t <= first.0 {
        return first.1;
    }
    if t >= last.0 {
        return last.1;
    }
    // first index with node time > t
    let k = nodes.partition_point(|(s, _)| *s <= t);
    let (t0, v0) = nodes[k - 1];
    let (t1, v1) = nodes[k];
    let w = (t - t0) / (t1 - t0);
    v0 + w * (v1 - v0)
}
