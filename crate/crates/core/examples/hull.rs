//! Opinions never leave the range of the previous delay window, in any direction,
//! even when an individual trajectory overshoots and changes sign.

use hkdelay::analysis::verify_hull_confinement;
use hkdelay::model::{DelaySpec, InfluenceSpec, InitialHistory, ScalarFn, Scenario};
use hkdelay::solver::{integrate, SolverParams};

fn main() -> hkdelay::Result<()> {
    let scenario = Scenario::new(
        4.0,
        DelaySpec::pointwise(1.0, ScalarFn::constant(1.0)),
        InfluenceSpec::constant(1.0)?,
        InitialHistory::constant(1.0, vec![vec![0.5], vec![-0.5]])?,
        SolverParams::with_step(1.0 / 128.0),
    )?;
    let traj = integrate(&scenario)?;
    for t in [0.5, 1.0, 1.5, 2.0] {
        println!(
            "t = {t}: x1 = {:+.5}, x2 = {:+.5}",
            traj.dense_eval(0, t)?[0],
            traj.dense_eval(1, t)?[0]
        );
    }
    for anchor in [0.0, 1.0, 2.0, 3.0] {
        let report = verify_hull_confinement(&traj, anchor, 16, 32)?;
        println!(
            "anchor {anchor}: worst margin {:+.3e} (slack {:.1e}) {}",
            report.worst_margin,
            report.slack,
            if report.pass { "confined" } else { "ESCAPED" }
        );
    }
    Ok(())
}
