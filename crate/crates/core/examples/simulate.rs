//! Eight planar agents with a time-varying lag and a distance-dependent influence.
//!
//! Prints the opinion diameter at every window anchor and writes the full trajectory
//! as CSV when a path is given: `cargo run --example simulate -- out.csv`.

use std::fs::File;
use std::io::BufWriter;

use hkdelay::analysis::diameter_at;
use hkdelay::model::{DelaySpec, HistoryFn, InfluenceSpec, InitialHistory, ScalarFn, Scenario};
use hkdelay::solver::{integrate, SolverParams};

fn main() -> hkdelay::Result<()> {
    let tau_bar = 0.9;
    // each agent drifts along a short segment before t = 0
    let history: Vec<HistoryFn> = (0..8)
        .map(|i| {
            let angle = i as f64 * std::f64::consts::TAU / 8.0;
            HistoryFn::Polynomial(vec![
                vec![2.0 * angle.cos(), 2.0 * angle.sin()],
                vec![0.3, -0.2],
            ])
        })
        .collect();
    let scenario = Scenario::new(
        7.2,
        DelaySpec::pointwise(tau_bar, ScalarFn::sinusoid(0.5, 0.4, 1.0, 0.0)),
        InfluenceSpec::inverse_quadratic(1.0)?,
        InitialHistory::new(tau_bar, 2, history)?,
        SolverParams::with_step(0.005),
    )?;

    let traj = integrate(&scenario)?;
    println!("{:>6}  {:>12}", "t", "d(t)");
    for n in 0..=8 {
        let t = n as f64 * tau_bar;
        println!("{t:>6.2}  {:>12.6e}", diameter_at(&traj, t)?);
    }
    let stats = traj.corrector_stats();
    println!(
        "corrected steps: {}, unconverged: {}, max residual {:.2e}",
        stats.corrected_steps, stats.unconverged_steps, stats.max_residual
    );

    if let Some(path) = std::env::args().nth(1) {
        traj.write_csv(BufWriter::new(File::create(&path)?))?;
        println!("wrote {path}");
    }
    Ok(())
}
