//! How the certified rate depends on the delay bound and on the influence strength.

use hkdelay::analysis::{build_certificate, ProofConstants};
use hkdelay::model::{DelaySpec, InfluenceSpec, InitialHistory, ScalarFn, Scenario};
use hkdelay::solver::{integrate, SolverParams};

fn main() -> hkdelay::Result<()> {
    println!("constant influence, K = psi0 = 1");
    println!("{:>6}  {:>10}  {:>10}  {:>12}", "tau", "C", "C~", "gamma");
    for tau_bar in [0.125, 0.25, 0.5, 1.0, 2.0] {
        let p = ProofConstants::new(1.0, 1.0, tau_bar)?;
        println!(
            "{tau_bar:>6}  {:>10.6}  {:>10.6}  {:>12.6e}",
            p.c, p.c_tilde, p.gamma
        );
    }

    let base = Scenario::new(
        4.0,
        DelaySpec::pointwise(0.5, ScalarFn::constant(0.25)),
        InfluenceSpec::inverse_quadratic(1.0)?,
        InitialHistory::constant(0.5, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.5]])?,
        SolverParams::with_step(1.0 / 128.0),
    )?;
    println!();
    println!("inverse quadratic influence, scaled");
    println!(
        "{:>6}  {:>8}  {:>12}  {:>10}",
        "scale", "psi0", "gamma", "rate"
    );
    for scale in [0.5, 1.0, 2.0, 4.0] {
        let scenario = base.with_influence(base.influence().scaled(scale)?)?;
        let traj = integrate(&scenario)?;
        let cert = build_certificate(&traj, &scenario)?;
        let rate = cert
            .empirical_rate
            .map_or("-".into(), |r| format!("{r:.4}"));
        println!(
            "{scale:>6}  {:>8.4}  {:>12.6e}  {rate:>10}",
            cert.psi0, cert.gamma
        );
    }
    Ok(())
}
