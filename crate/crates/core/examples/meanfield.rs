//! Agent-count ladder on a fixed support: the proof constants do not move with N and
//! the support diameter decays under the same bound for every member.

use hkdelay::meanfield::{n_independence_check, MeanFieldConfig};
use hkdelay::model::{DelaySpec, InfluenceSpec, InitialHistory, ScalarFn, Scenario};
use hkdelay::solver::{integrate, SolverParams};

fn main() -> hkdelay::Result<()> {
    let tau_bar = 0.5;
    // the ladder replaces this history; it only fixes the support [0, 1]
    let template = Scenario::new(
        5.0,
        DelaySpec::pointwise(tau_bar, ScalarFn::sinusoid(0.4, 0.1, 2.0, 0.0)),
        InfluenceSpec::constant(1.0)?,
        InitialHistory::constant(tau_bar, vec![vec![0.0], vec![1.0]])?,
        SolverParams::with_step(1.0 / 64.0),
    )?;
    let _ = integrate(&template)?;

    let config = MeanFieldConfig::new(vec![8, 32, 128], 0.3);
    let report = n_independence_check(&config, &template)?;
    for (m, c) in report.members.iter().zip(report.constants()) {
        println!(
            "N = {:>3}: gamma = {:.10}, d_X(0) = {:.3}, worst margin {:.3e}",
            m.agents, c.gamma, m.initial_support_diameter, m.worst_margin
        );
    }
    println!(
        "constants identical across the ladder: {}",
        report.constants_identical
    );
    println!("W1 to the N = 128 ensemble at window anchors:");
    for row in &report.w1 {
        println!(
            "  N = {:>3}  t = {:.2}  W1 = {:.3e}",
            row.agents, row.t, row.w1
        );
    }
    Ok(())
}
