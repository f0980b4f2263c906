use crate::error::{Error, Result};
use crate::model::function::ScalarFn;

/// Number of uniform probes of `[0, horizon]` used to validate delay bounds.
pub const DELAY_PROBES: usize = 10_000;

const BOUND_SLACK: f64 = 1e-12;

#[derive(Clone, Debug)]
pub enum DelaySpec {
    /// Each agent sees the others at the single lagged time `t - tau(t)`.
    Pointwise { tau_bar: f64, tau: ScalarFn },
    /// Each agent sees an `alpha`-weighted average over `[t - tau2(t), t - tau1(t)]`.
    Distributed {
        tau_bar: f64,
        tau1: ScalarFn,
        tau2: ScalarFn,
        alpha: ScalarFn,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DelayValue {
    Pointwise(f64),
    Distributed(f64, f64),
}

impl DelaySpec {
    pub fn pointwise(tau_bar: f64, tau: ScalarFn) -> Self {
        DelaySpec::Pointwise { tau_bar, tau }
    }

    pub fn distributed(tau_bar: f64, tau1: ScalarFn, tau2: ScalarFn, alpha: ScalarFn) -> Self {
        DelaySpec::Distributed {
            tau_bar,
            tau1,
            tau2,
            alpha,
        }
    }

    pub fn tau_bar(&self) -> f64 {
        match self {
            DelaySpec::Pointwise { tau_bar, .. } | DelaySpec::Distributed { tau_bar, .. } => {
                *tau_bar
            }
        }
    }

    pub fn is_distributed(&self) -> bool {
        matches!(self, DelaySpec::Distributed { .. })
    }

    /// Same delay with every lag function and the bound scaled by `ratio`.
    ///
    /// The kernel is re-parametrized as `s -> alpha(s / ratio)` so its support stays `[0, tau_bar]`.
    pub fn scaled(&self, ratio: f64) -> Self {
        let scale = |f: &ScalarFn| match f {
            ScalarFn::Constant(c) => ScalarFn::Constant(c * ratio),
            other => {
                let inner = other.clone();
                ScalarFn::custom(move |t| ratio * inner.eval(t))
            }
        };
        match self {
            DelaySpec::Pointwise { tau_bar, tau } => DelaySpec::Pointwise {
                tau_bar: tau_bar * ratio,
                tau: scale(tau),
            },
            DelaySpec::Distributed {
                tau_bar,
                tau1,
                tau2,
                alpha,
            } => {
                let alpha = match alpha {
                    ScalarFn::Constant(c) => ScalarFn::Constant(*c),
                    other => {
                        let inner = other.clone();
                        ScalarFn::custom(move |s| inner.eval(s / ratio))
                    }
                };
                DelaySpec::Distributed {
                    tau_bar: tau_bar * ratio,
                    tau1: scale(tau1),
                    tau2: scale(tau2),
                    alpha,
                }
            }
        }
    }

    /// Evaluates the lag (or lag pair) at `t >= 0`, enforcing the bounds.
    ///
    /// Values within `1e-12 * tau_bar` outside the admissible range are clamped onto it.
    pub fn eval(&self, t: f64) -> Result<DelayValue> {
        if !(t >= 0.0) {
            return Err(Error::OutOfDomain {
                t,
                lower: 0.0,
                upper: f64::INFINITY,
            });
        }
        let tau_bar = self.tau_bar();
        let slack = BOUND_SLACK * tau_bar.max(1.0);
        let clamp = |v: f64, name: &str| -> Result<f64> {
            if !v.is_finite() || v < -slack || v > tau_bar + slack {
                return Err(Error::DelayBound {
                    t,
                    detail: format!("{name} = {v} outside [0, tau_bar = {tau_bar}]"),
                });
            }
            Ok(v.clamp(0.0, tau_bar))
        };
        match self {
            DelaySpec::Pointwise { tau, .. } => {
                Ok(DelayValue::Pointwise(clamp(tau.eval(t), "tau(t)")?))
            }
            DelaySpec::Distributed { tau1, tau2, .. } => {
                let a = clamp(tau1.eval(t), "tau1(t)")?;
                let b = clamp(tau2.eval(t), "tau2(t)")?;
                if !(a < b) {
                    return Err(Error::DelayBound {
                        t,
                        detail: format!("strict ordering tau1(t) < tau2(t) violated: {a} >= {b}"),
                    });
                }
                Ok(DelayValue::Distributed(a, b))
            }
        }
    }

    pub fn eval_pointwise(&self, t: f64) -> Result<f64> {
        match self.eval(t)? {
            DelayValue::Pointwise(v) => Ok(v),
            DelayValue::Distributed(..) => Err(Error::invalid("expected a pointwise delay")),
        }
    }

    pub fn eval_distributed(&self, t: f64) -> Result<(f64, f64)> {
        match self.eval(t)? {
            DelayValue::Distributed(a, b) => Ok((a, b)),
            DelayValue::Pointwise(_) => Err(Error::invalid("expected a distributed delay")),
        }
    }

    /// Lags and trapezoid weights `w_m * alpha(lag_m)` on `[tau1(t), tau2(t)]` with
    /// `intervals` subintervals. The weights sum to the trapezoid value of `h(t)`.
    pub fn kernel_nodes(&self, t: f64, intervals: usize) -> Result<Vec<(f64, f64)>> {
        let DelaySpec::Distributed { alpha, .. } = self else {
            return Err(Error::invalid("kernel nodes require a distributed delay"));
        };
        if intervals == 0 {
            return Err(Error::invalid("quadrature resolution must be at least 1"));
        }
        let (a, b) = self.eval_distributed(t)?;
        let width = (b - a) / intervals as f64;
        let nodes = (0..=intervals)
            .map(|m| {
                let lag = if m == intervals {
                    b
                } else {
                    a + width * m as f64
                };
                let w = if m == 0 || m == intervals {
                    0.5 * width
                } else {
                    width
                };
                (lag, w * alpha.eval(lag))
            })
            .collect();
        Ok(nodes)
    }

    /// Composite-trapezoid approximation of `h(t) = int_{tau1(t)}^{tau2(t)} alpha(s) ds`.
    pub fn compute_h(&self, t: f64, intervals: usize) -> Result<f64> {
        let h: f64 = self
            .kernel_nodes(t, intervals)?
            .iter()
            .map(|(_, w)| w)
            .sum();
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::NonPositiveKernel { t, value: h });
        }
        Ok(h)
    }

    /// Checks the lag bounds on [`DELAY_PROBES`] uniform points of `[0, horizon]`
    /// and kernel positivity on `[0, tau_bar]`.
    pub fn validate(&self, horizon: f64) -> Result<()> {
        let tau_bar = self.tau_bar();
        if !(tau_bar > 0.0 && tau_bar.is_finite()) {
            return Err(Error::invalid(format!(
                "delay bound 0 <= tau(t) <= tau_bar requires a positive finite tau_bar, got {tau_bar}"
            )));
        }
        for k in 0..=DELAY_PROBES {
            let t = horizon * k as f64 / DELAY_PROBES as f64;
            self.eval(t).map_err(|e| match e {
                Error::DelayBound { t, detail } => {
                    Error::invalid(format!("delay bound violated at t = {t}: {detail}"))
                }
                other => other,
            })?;
        }
        if let DelaySpec::Distributed { alpha, .. } = self {
            for k in 0..=DELAY_PROBES {
                let s = tau_bar * k as f64 / DELAY_PROBES as f64;
                let v = alpha.eval(s);
                if !(v > 0.0) || !v.is_finite() {
                    return Err(Error::invalid(format!(
                        "kernel alpha(s) > 0 on [0, tau_bar] violated: alpha({s}) = {v}"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_delay() {
        let d = DelaySpec::pointwise(1.0, ScalarFn::constant(1.0));
        assert_eq!(d.eval(3.7).unwrap(), DelayValue::Pointwise(1.0));
    }

    #[test]
    fn sinusoidal_delay_at_zero() {
        let d = DelaySpec::pointwise(0.9, ScalarFn::sinusoid(0.5, 0.4, 1.0, 0.0));
        assert_eq!(d.eval(0.0).unwrap(), DelayValue::Pointwise(0.5));
        d.validate(50.0).unwrap();
    }

    #[test]
    fn distributed_pair() {
        let d = DelaySpec::distributed(
            1.0,
            ScalarFn::constant(0.0),
            ScalarFn::constant(1.0),
            ScalarFn::constant(1.0),
        );
        assert_eq!(d.eval(2.0).unwrap(), DelayValue::Distributed(0.0, 1.0));
    }

    #[test]
    fn delay_above_bound_rejected() {
        let d = DelaySpec::pointwise(0.5, ScalarFn::sinusoid(0.3, 0.3, 1.0, 0.0));
        assert!(d.validate(10.0).is_err());
        assert!(matches!(
            d.eval(std::f64::consts::FRAC_PI_2),
            Err(Error::DelayBound { .. })
        ));
    }

    #[test]
    fn negative_time_rejected() {
        let d = DelaySpec::pointwise(1.0, ScalarFn::constant(0.5));
        assert!(d.eval(-0.1).is_err());
    }

    #[test]
    fn touching_zero_is_clamped() {
        // 0.5 + 0.5 sin(t) reaches 0 at 3 pi / 2 and may round slightly below it
        let d = DelaySpec::pointwise(1.0, ScalarFn::sinusoid(0.5, 0.5, 1.0, 0.0));
        let v = d.eval_pointwise(1.5 * std::f64::consts::PI).unwrap();
        assert!((0.0..1e-15).contains(&v));
        d.validate(20.0).unwrap();
    }

    #[test]
    fn h_values() {
        let unit = DelaySpec::distributed(
            1.0,
            ScalarFn::constant(0.0),
            ScalarFn::constant(1.0),
            ScalarFn::constant(1.0),
        );
        assert!((unit.compute_h(0.0, 7).unwrap() - 1.0).abs() < 1e-15);

        let linear = DelaySpec::distributed(
            1.0,
            ScalarFn::constant(0.0),
            ScalarFn::constant(1.0),
            ScalarFn::Polynomial(vec![0.0, 1.0]),
        );
        // alpha(0) = 0 is not admissible as a kernel, but the quadrature itself is exact
        assert!((linear.compute_h(0.0, 5).unwrap() - 0.5).abs() < 1e-15);

        let two = DelaySpec::distributed(
            1.0,
            ScalarFn::constant(0.1),
            ScalarFn::constant(0.3),
            ScalarFn::constant(2.0),
        );
        assert!((two.compute_h(4.0, 3).unwrap() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn h_rejects_degenerate_interval() {
        let d = DelaySpec::distributed(
            1.0,
            ScalarFn::constant(0.5),
            ScalarFn::constant(0.5),
            ScalarFn::constant(1.0),
        );
        assert!(d.compute_h(0.0, 4).is_err());
        assert!(d.validate(1.0).is_err());
    }

    #[test]
    fn h_trapezoid_converges_at_second_order() {
        let d = DelaySpec::distributed(
            1.0,
            ScalarFn::constant(0.0),
            ScalarFn::constant(1.0),
            ScalarFn::Exponential {
                scale: 1.0,
                rate: 1.0,
            },
        );
        let exact = std::f64::consts::E - 1.0;
        for r in [4, 8, 16, 32] {
            let e1 = (d.compute_h(0.0, r).unwrap() - exact).abs();
            let e2 = (d.compute_h(0.0, 2 * r).unwrap() - exact).abs();
            assert!(e1 / e2 >= 3.5, "ratio {} at r = {r}", e1 / e2);
        }
    }
}
