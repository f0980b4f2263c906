//! Distributed delay: each agent averages the others over a lag window with an
//! exponentially fading kernel.

use hkdelay::analysis::build_certificate;
use hkdelay::model::{DelaySpec, HistoryFn, InfluenceSpec, InitialHistory, ScalarFn, Scenario};
use hkdelay::solver::{integrate, rhs_distributed, SolverParams};

fn main() -> hkdelay::Result<()> {
    let tau_bar = 1.0;
    let delay = DelaySpec::distributed(
        tau_bar,
        ScalarFn::sinusoid(0.1, 0.1, 2.0, 0.0),
        ScalarFn::constant(tau_bar),
        ScalarFn::Exponential {
            scale: 1.0,
            rate: -1.5,
        },
    );
    println!(
        "h(0) = {:.6}, h(1) = {:.6}",
        delay.compute_h(0.0, 256)?,
        delay.compute_h(1.0, 256)?
    );

    // a constant integrand factors out of the weighted average
    let pair = Scenario::new(
        2.0,
        DelaySpec::distributed(
            tau_bar,
            ScalarFn::constant(0.0),
            ScalarFn::constant(1.0),
            ScalarFn::Polynomial(vec![0.1, 1.0]),
        ),
        InfluenceSpec::constant(1.0)?,
        InitialHistory::constant(tau_bar, vec![vec![1.0], vec![0.0]])?,
        SolverParams::with_step(1.0 / 64.0),
    )?;
    let slopes = rhs_distributed(&pair, pair.history(), 0.0, &[1.0, 0.0])?;
    println!("two-agent slopes at t = 0 with alpha(s) = 0.1 + s: {slopes:?}");

    let scenario = Scenario::new(
        6.0,
        delay,
        InfluenceSpec::inverse_quadratic(1.0)?,
        InitialHistory::new(
            tau_bar,
            2,
            vec![
                HistoryFn::Constant(vec![1.0, 0.0]),
                HistoryFn::Polynomial(vec![vec![-1.0, 0.5], vec![0.2, 0.2]]),
                HistoryFn::Sampled(vec![
                    (-1.0, vec![0.0, -1.0]),
                    (-0.5, vec![0.5, -0.5]),
                    (0.0, vec![0.0, -1.0]),
                ]),
                HistoryFn::Constant(vec![0.3, 1.2]),
            ],
        )?,
        SolverParams::with_step(1.0 / 64.0),
    )?;
    let traj = integrate(&scenario)?;
    let cert = build_certificate(&traj, &scenario)?;
    println!(
        "gamma = {:.5}, empirical rate = {:?}",
        cert.gamma, cert.empirical_rate
    );
    println!("window diameters: {:.4?}", cert.window_diameters);
    println!(
        "certificate {}",
        if cert.passed() { "passed" } else { "FAILED" }
    );
    Ok(())
}
