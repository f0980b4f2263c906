use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Relative slack accepted when checking evaluations against the declared bound `K`.
pub const SUP_BOUND_SLACK: f64 = 1e-12;

/// Largest product grid (points in `R^d x R^d`) sampled for the general form.
const MAX_GENERAL_GRID: usize = 1 << 24;

/// Default per-axis resolution for lower-bound sampling.
pub const DEFAULT_PSI0_RESOLUTION: usize = 64;

pub type PairClosure = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;

/// Influence `psi(x, y)` depending on both opinions.
#[derive(Clone)]
pub enum GeneralInfluence {
    Constant(f64),
    /// `base + amplitude * sin(x[component])`
    SineOfComponent {
        base: f64,
        amplitude: f64,
        component: usize,
    },
    Custom(PairClosure),
}

/// Influence `psi~(|x - y|)` depending on the opinion distance only.
#[derive(Clone)]
pub enum RadialInfluence {
    Constant(f64),
    /// `scale / (1 + r^2)`
    InverseQuadratic {
        scale: f64,
    },
    /// `scale * exp(-rate * r)`
    Exponential {
        scale: f64,
        rate: f64,
    },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

#[derive(Clone)]
pub enum Influence {
    General(GeneralInfluence),
    DifferenceForm(RadialInfluence),
}

impl GeneralInfluence {
    fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            GeneralInfluence::Constant(c) => *c,
            GeneralInfluence::SineOfComponent {
                base,
                amplitude,
                component,
            } => base + amplitude * x[*component].sin(),
            GeneralInfluence::Custom(f) => f(x, y),
        }
    }
}

impl RadialInfluence {
    pub fn eval(&self, r: f64) -> f64 {
        match self {
            RadialInfluence::Constant(c) => *c,
            RadialInfluence::InverseQuadratic { scale } => scale / (1.0 + r * r),
            RadialInfluence::Exponential { scale, rate } => scale * (-rate * r).exp(),
            RadialInfluence::Custom(f) => f(r),
        }
    }
}

impl fmt::Debug for Influence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Influence::General(GeneralInfluence::Constant(c)) => {
                write!(f, "General(Constant({c}))")
            }
            Influence::General(GeneralInfluence::SineOfComponent {
                base,
                amplitude,
                component,
            }) => write!(f, "General({base} + {amplitude} sin(x[{component}]))"),
            Influence::General(GeneralInfluence::Custom(_)) => write!(f, "General(Custom(..))"),
            Influence::DifferenceForm(RadialInfluence::Constant(c)) => {
                write!(f, "DifferenceForm(Constant({c}))")
            }
            Influence::DifferenceForm(RadialInfluence::InverseQuadratic { scale }) => {
                write!(f, "DifferenceForm({scale} / (1 + r^2))")
            }
            Influence::DifferenceForm(RadialInfluence::Exponential { scale, rate }) => {
                write!(f, "DifferenceForm({scale} exp(-{rate} r))")
            }
            Influence::DifferenceForm(RadialInfluence::Custom(_)) => {
                write!(f, "DifferenceForm(Custom(..))")
            }
        }
    }
}

/// Positive bounded influence function together with its declared bounds.
#[derive(Clone, Debug)]
pub struct InfluenceSpec {
    influence: Influence,
    sup_bound: f64,
    psi0_override: Option<f64>,
}

impl InfluenceSpec {
    pub fn new(influence: Influence, sup_bound: f64, psi0_override: Option<f64>) -> Result<Self> {
        if !(sup_bound > 0.0 && sup_bound.is_finite()) {
            return Err(Error::invalid(format!(
                "declared sup bound K = {sup_bound} must be positive and finite"
            )));
        }
        if let Some(p) = psi0_override {
            if !(p > 0.0 && p <= sup_bound) {
                return Err(Error::invalid(format!(
                    "psi0 override {p} must satisfy 0 < psi0 <= K = {sup_bound}"
                )));
            }
        }
        Ok(Self {
            influence,
            sup_bound,
            psi0_override,
        })
    }

    /// Constant influence `psi = value`, with `K = value`.
    pub fn constant(value: f64) -> Result<Self> {
        Self::new(
            Influence::General(GeneralInfluence::Constant(value)),
            value,
            None,
        )
    }

    /// `psi~(r) = scale / (1 + r^2)`, with `K = scale`.
    pub fn inverse_quadratic(scale: f64) -> Result<Self> {
        Self::new(
            Influence::DifferenceForm(RadialInfluence::InverseQuadratic { scale }),
            scale,
            None,
        )
    }

    pub fn influence(&self) -> &Influence {
        &self.influence
    }

    /// Declared supremum `K`.
    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }

    pub fn psi0_override(&self) -> Option<f64> {
        self.psi0_override
    }

    pub fn is_difference_form(&self) -> bool {
        matches!(self.influence, Influence::DifferenceForm(_))
    }

    /// Multiplies the influence and its bounds by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let influence = match &self.influence {
            Influence::General(GeneralInfluence::Constant(c)) => {
                Influence::General(GeneralInfluence::Constant(c * factor))
            }
            Influence::General(g) => {
                let g = g.clone();
                Influence::General(GeneralInfluence::Custom(Arc::new(move |x, y| {
                    factor * g.eval(x, y)
                })))
            }
            Influence::DifferenceForm(RadialInfluence::Constant(c)) => {
                Influence::DifferenceForm(RadialInfluence::Constant(c * factor))
            }
            Influence::DifferenceForm(RadialInfluence::InverseQuadratic { scale }) => {
                Influence::DifferenceForm(RadialInfluence::InverseQuadratic {
                    scale: scale * factor,
                })
            }
            Influence::DifferenceForm(RadialInfluence::Exponential { scale, rate }) => {
                Influence::DifferenceForm(RadialInfluence::Exponential {
                    scale: scale * factor,
                    rate: *rate,
                })
            }
            Influence::DifferenceForm(r) => {
                let r = r.clone();
                Influence::DifferenceForm(RadialInfluence::Custom(Arc::new(move |d| {
                    factor * r.eval(d)
                })))
            }
        };
        Self::new(
            influence,
            self.sup_bound * factor,
            self.psi0_override.map(|p| p * factor),
        )
    }

    /// Evaluates `psi(x, y)` and checks `0 < psi <= K`.
    #[inline]
    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let v = match &self.influence {
            Influence::General(g) => g.eval(x, y),
            Influence::DifferenceForm(r) => r.eval(distance(x, y)),
        };
        self.check(v)
    }

    #[inline]
    fn check(&self, v: f64) -> Result<f64> {
        if v > 0.0 && v <= self.sup_bound * (1.0 + SUP_BOUND_SLACK) {
            Ok(v)
        } else {
            Err(Error::InfluenceBound {
                value: v,
                k: self.sup_bound,
            })
        }
    }

    /// Sampled lower bound `psi0` of the influence on the region reachable by the
    /// dynamics.
    ///
    /// General form: minimum over `{|y| <= m0} x {|z| <= m0}` sampled on a cube grid
    /// (points outside the ball discarded, axis endpoints `+-m0 e_k` added).
    /// Difference form: minimum of `psi~` on a uniform grid of `[0, d0]`.
    /// A declared override takes precedence over both.
    pub fn compute_psi0(
        &self,
        dimension: usize,
        m0: f64,
        d0: f64,
        resolution: usize,
    ) -> Result<f64> {
        if let Some(p) = self.psi0_override {
            return Ok(p);
        }
        if resolution < 2 {
            return Err(Error::invalid("psi0 grid resolution must be at least 2"));
        }
        let min = match &self.influence {
            Influence::General(GeneralInfluence::Constant(c)) => self.check(*c)?,
            Influence::DifferenceForm(RadialInfluence::Constant(c)) => self.check(*c)?,
            Influence::General(_) => {
                if dimension > 3 {
                    return Err(Error::invalid(format!(
                        "general-form influence in dimension {dimension} > 3 requires a psi0 override"
                    )));
                }
                if !(m0 >= 0.0 && m0.is_finite()) {
                    return Err(Error::invalid(format!(
                        "state bound M0 = {m0} must be finite and >= 0"
                    )));
                }
                let per_axis = general_grid_resolution(dimension, resolution);
                let ball = ball_grid(dimension, m0, per_axis);
                let mut min = f64::INFINITY;
                for y in &ball {
                    for z in &ball {
                        min = min.min(self.eval(y, z)?);
                    }
                }
                min
            }
            Influence::DifferenceForm(_) => {
                if !(d0 >= 0.0 && d0.is_finite()) {
                    return Err(Error::invalid(format!(
                        "diameter D0 = {d0} must be finite and >= 0"
                    )));
                }
                let mut min = f64::INFINITY;
                let n = resolution - 1;
                for k in 0..=n {
                    let r = if k == n { d0 } else { d0 * k as f64 / n as f64 };
                    let v = match &self.influence {
                        Influence::DifferenceForm(rad) => rad.eval(r),
                        Influence::General(_) => unreachable!(),
                    };
                    min = min.min(self.check(v)?);
                }
                min
            }
        };
        if !(min > 0.0) {
            return Err(Error::CertificateRefused(format!(
                "sampled influence minimum {min} is not positive"
            )));
        }
        Ok(min)
    }
}

/// Per-axis resolution actually used for the general-form product grid.
pub fn general_grid_resolution(dimension: usize, requested: usize) -> usize {
    let exponent = 2 * dimension as u32;
    let mut r = requested;
    while r > 2 && r.checked_pow(exponent).is_none_or(|p| p > MAX_GENERAL_GRID) {
        r -= 1;
    }
    r
}

fn ball_grid(dimension: usize, radius: f64, per_axis: usize) -> Vec<Vec<f64>> {
    if radius == 0.0 {
        return vec![vec![0.0; dimension]];
    }
    let n = per_axis - 1;
    let coord = |k: usize| {
        if k == n {
            radius
        } else {
            -radius + 2.0 * radius * k as f64 / n as f64
        }
    };
    let limit = radius * (1.0 + 1e-12);
    let mut points = Vec::new();
    let mut index = vec![0usize; dimension];
    loop {
        let p: Vec<f64> = index.iter().map(|&k| coord(k)).collect();
        if norm(&p) <= limit {
            points.push(p);
        }
        let mut axis = 0;
        loop {
            if axis == dimension {
                break;
            }
            index[axis] += 1;
            if index[axis] <= n {
                break;
            }
            index[axis] = 0;
            axis += 1;
        }
        if axis == dimension {
            break;
        }
    }
    for axis in 0..dimension {
        for sign in [-1.0, 1.0] {
            let mut p = vec![0.0; dimension];
            p[axis] = sign * radius;
            points.push(p);
        }
    }
    points
}

#[inline]
pub(crate) fn distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

#[inline]
pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|a| a * a).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn constant_psi0() {
        let s = InfluenceSpec::constant(1.0).unwrap();
        assert_eq!(s.compute_psi0(2, 17.0, 3.0, 64).unwrap(), 1.0);
    }

    #[test]
    fn inverse_quadratic_psi0() {
        let s = InfluenceSpec::inverse_quadratic(1.0).unwrap();
        assert_eq!(s.compute_psi0(1, 0.0, 1.0, 64).unwrap(), 0.5);
    }

    #[test]
    fn sine_psi0_hits_analytic_minimum() {
        let s = InfluenceSpec::new(
            Influence::General(GeneralInfluence::SineOfComponent {
                base: 2.0,
                amplitude: 1.0,
                component: 0,
            }),
            3.0,
            None,
        )
        .unwrap();
        for d in 1..=2 {
            let p = s.compute_psi0(d, FRAC_PI_2, 0.0, 64).unwrap();
            assert!((p - 1.0).abs() < 1e-12, "d = {d}: {p}");
        }
        let p = s.compute_psi0(3, FRAC_PI_2, 0.0, 64).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn override_wins() {
        let s = InfluenceSpec::new(
            Influence::DifferenceForm(RadialInfluence::InverseQuadratic { scale: 1.0 }),
            1.0,
            Some(0.25),
        )
        .unwrap();
        assert_eq!(s.compute_psi0(1, 0.0, 1.0, 64).unwrap(), 0.25);
    }

    #[test]
    fn high_dimension_general_requires_override() {
        let s = InfluenceSpec::new(
            Influence::General(GeneralInfluence::Custom(Arc::new(|_, _| 1.0))),
            1.0,
            None,
        )
        .unwrap();
        assert!(s.compute_psi0(4, 1.0, 1.0, 64).is_err());
    }

    #[test]
    fn bound_violation_is_loud() {
        let s = InfluenceSpec::new(
            Influence::DifferenceForm(RadialInfluence::InverseQuadratic { scale: 2.0 }),
            1.0,
            None,
        )
        .unwrap();
        assert!(matches!(
            s.eval(&[0.0], &[0.0]),
            Err(Error::InfluenceBound { .. })
        ));
        let neg = InfluenceSpec::new(
            Influence::General(GeneralInfluence::Custom(Arc::new(|_, _| -1.0))),
            1.0,
            None,
        )
        .unwrap();
        assert!(neg.eval(&[0.0], &[0.0]).is_err());
    }

    #[test]
    fn grid_resolution_cap() {
        assert_eq!(general_grid_resolution(1, 64), 64);
        assert_eq!(general_grid_resolution(2, 64), 64);
        assert_eq!(general_grid_resolution(3, 64), 16);
    }
}
