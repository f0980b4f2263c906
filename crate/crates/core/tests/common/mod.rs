#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

use hkdelay::model::{DelaySpec, HistoryFn, InfluenceSpec, InitialHistory, ScalarFn, Scenario};
use hkdelay::solver::SolverParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Windows simulated by the randomized scenarios; enough for every window check.
pub const RANDOM_WINDOWS: f64 = 6.0;
/// Solver steps per `tau_bar` in the randomized scenarios.
pub const STEPS_PER_TAU: f64 = 64.0;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `N` agents in dimension `d`: constants, linear or quadratic polynomials, or sampled
/// paths, all inside `[-1, 1]^d` up to a small overshoot.
pub fn random_history(
    rng: &mut ChaCha8Rng,
    tau_bar: f64,
    agents: usize,
    d: usize,
) -> InitialHistory {
    let vec = |rng: &mut ChaCha8Rng, scale: f64| -> Vec<f64> {
        (0..d).map(|_| rng.gen_range(-scale..=scale)).collect()
    };
    let fns = (0..agents)
        .map(|_| match rng.gen_range(0..4) {
            0 => HistoryFn::Constant(vec(rng, 1.0)),
            1 => HistoryFn::Polynomial(vec![vec(rng, 1.0), vec(rng, 0.5 / tau_bar)]),
            2 => HistoryFn::Polynomial(vec![
                vec(rng, 1.0),
                vec(rng, 0.3 / tau_bar),
                vec(rng, 0.3 / (tau_bar * tau_bar)),
            ]),
            _ => {
                let nodes = 5;
                HistoryFn::Sampled(
                    (0..nodes)
                        .map(|k| {
                            let s = if k == nodes - 1 {
                                0.0
                            } else {
                                -tau_bar + tau_bar * k as f64 / (nodes - 1) as f64
                            };
                            (s, vec(rng, 1.0))
                        })
                        .collect(),
                )
            }
        })
        .collect();
    InitialHistory::new(tau_bar, d, fns).unwrap()
}

/// Constant `psi` or `a / (1 + r^2)`.
pub fn random_influence(rng: &mut ChaCha8Rng) -> InfluenceSpec {
    let a = rng.gen_range(0.5..2.0);
    if rng.gen_bool(0.5) {
        InfluenceSpec::constant(a).unwrap()
    } else {
        InfluenceSpec::inverse_quadratic(a).unwrap()
    }
}

/// Constant lag in `[0, tau_bar]` (sometimes exactly 0 or `tau_bar`), or a sinusoid
/// `tau_bar/2 (1 + sin(w t - pi/2))` that touches both 0 and `tau_bar`.
pub fn random_pointwise_delay(rng: &mut ChaCha8Rng, tau_bar: f64) -> DelaySpec {
    let tau = match rng.gen_range(0..5) {
        0 => ScalarFn::constant(0.0),
        1 => ScalarFn::constant(tau_bar),
        2 => ScalarFn::constant(rng.gen_range(0.0..tau_bar)),
        3 => ScalarFn::sinusoid(
            0.5 * tau_bar,
            0.5 * tau_bar,
            rng.gen_range(0.5..4.0),
            -FRAC_PI_2,
        ),
        _ => {
            let amp = rng.gen_range(0.1..0.5) * tau_bar;
            ScalarFn::sinusoid(
                0.5 * tau_bar,
                amp,
                rng.gen_range(0.5..4.0),
                rng.gen_range(0.0..6.0),
            )
        }
    };
    DelaySpec::pointwise(tau_bar, tau)
}

/// Lag window `[tau1, tau2]` inside `[0, tau_bar]` with a positive kernel.
pub fn random_distributed_delay(rng: &mut ChaCha8Rng, tau_bar: f64) -> DelaySpec {
    let tau1 = if rng.gen_bool(0.5) {
        ScalarFn::constant(0.0)
    } else {
        let hi = rng.gen_range(0.05..0.4) * tau_bar;
        ScalarFn::sinusoid(0.5 * hi, 0.5 * hi, rng.gen_range(0.5..3.0), -FRAC_PI_2)
    };
    let tau2 = if rng.gen_bool(0.5) {
        ScalarFn::constant(tau_bar)
    } else {
        let lo = rng.gen_range(0.5..0.9) * tau_bar;
        ScalarFn::sinusoid(
            0.5 * (lo + tau_bar),
            0.5 * (tau_bar - lo),
            rng.gen_range(0.5..3.0),
            0.0,
        )
    };
    let alpha = match rng.gen_range(0..3) {
        0 => ScalarFn::constant(1.0),
        1 => ScalarFn::Polynomial(vec![0.2, 1.0 / tau_bar]),
        _ => ScalarFn::Exponential {
            scale: 1.0,
            rate: -1.0 / tau_bar,
        },
    };
    DelaySpec::distributed(tau_bar, tau1, tau2, alpha)
}

fn random_shape(rng: &mut ChaCha8Rng) -> (f64, usize, usize) {
    let tau_bar = [0.25, 0.5, 0.75, 1.0][rng.gen_range(0..4)];
    (tau_bar, rng.gen_range(3..=16), rng.gen_range(1..=3))
}

fn assemble(
    tau_bar: f64,
    delay: DelaySpec,
    influence: InfluenceSpec,
    history: InitialHistory,
) -> Scenario {
    Scenario::new(
        RANDOM_WINDOWS * tau_bar,
        delay,
        influence,
        history,
        SolverParams::with_step(tau_bar / STEPS_PER_TAU),
    )
    .unwrap()
}

/// Randomized pointwise-delay scenario: `3 <= N <= 16`, `1 <= d <= 3`.
pub fn random_pointwise_scenario(seed: u64) -> Scenario {
    let mut rng = rng(seed);
    let (tau_bar, agents, d) = random_shape(&mut rng);
    let delay = random_pointwise_delay(&mut rng, tau_bar);
    let influence = random_influence(&mut rng);
    let history = random_history(&mut rng, tau_bar, agents, d);
    assemble(tau_bar, delay, influence, history)
}

/// Randomized distributed-delay scenario with the same ranges.
pub fn random_distributed_scenario(seed: u64) -> Scenario {
    let mut rng = rng(seed);
    let (tau_bar, agents, d) = random_shape(&mut rng);
    let delay = random_distributed_delay(&mut rng, tau_bar);
    let influence = random_influence(&mut rng);
    let history = random_history(&mut rng, tau_bar, agents, d);
    assemble(tau_bar, delay, influence, history)
}

/// Two scalar agents, constant `psi = value`, lag `tau`, window bound `tau_bar`.
pub fn two_agent(
    tau_bar: f64,
    tau: f64,
    psi: f64,
    x1: f64,
    x2: f64,
    horizon: f64,
    step: f64,
) -> Scenario {
    Scenario::new(
        horizon,
        DelaySpec::pointwise(tau_bar, ScalarFn::constant(tau)),
        InfluenceSpec::constant(psi).unwrap(),
        InitialHistory::constant(tau_bar, vec![vec![x1], vec![x2]]).unwrap(),
        SolverParams::with_step(step),
    )
    .unwrap()
}
