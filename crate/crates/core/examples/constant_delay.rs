//! Two agents with a unit lag against the method-of-steps closed form
//! `y(t) = 2 e^{-t} - 1` on `[0, 1]` and the observed convergence order of the solver.

use hkdelay::model::{DelaySpec, InfluenceSpec, InitialHistory, ScalarFn, Scenario};
use hkdelay::solver::{integrate, SolverParams, Trajectory};

fn pair(step: f64) -> hkdelay::Result<Scenario> {
    Scenario::new(
        2.0,
        DelaySpec::pointwise(1.0, ScalarFn::constant(1.0)),
        InfluenceSpec::constant(1.0)?,
        InitialHistory::constant(1.0, vec![vec![1.0], vec![0.0]])?,
        SolverParams::with_step(step),
    )
}

fn exact(t: f64) -> f64 {
    if t <= 1.0 {
        2.0 * (-t).exp() - 1.0
    } else {
        2.0 * (-t).exp() + 1.0 - 2.0 * t * (1.0 - t).exp()
    }
}

fn max_error(traj: &Trajectory) -> f64 {
    (0..traj.node_count())
        .map(|k| {
            let x = traj.state(k);
            (x[0] - x[1] - exact(traj.time(k))).abs()
        })
        .fold(0.0, f64::max)
}

fn main() -> hkdelay::Result<()> {
    let mut previous: Option<f64> = None;
    println!("{:>10}  {:>12}  {:>6}", "step", "max error", "order");
    for step in [0.1, 0.05, 0.025, 0.0125, 0.00625] {
        let err = max_error(&integrate(&pair(step)?)?);
        let order = previous.map_or(String::from("-"), |p| format!("{:.2}", (p / err).log2()));
        println!("{step:>10}  {err:>12.3e}  {order:>6}");
        previous = Some(err);
    }

    // the gap changes sign at ln 2
    let traj = integrate(&pair(1e-3)?)?;
    let y = |t: f64| -> hkdelay::Result<f64> {
        Ok(traj.dense_eval(0, t)?[0] - traj.dense_eval(1, t)?[0])
    };
    println!(
        "y(ln 2) = {:.3e}, y(1) = {:.9} (exact {:.9})",
        y(2f64.ln())?,
        y(1.0)?,
        exact(1.0)
    );
    Ok(())
}
