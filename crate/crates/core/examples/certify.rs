//! Builds a consensus certificate for a random twelve-agent scenario in three
//! dimensions and prints every check with its worst margin.

use hkdelay::analysis::build_certificate;
use hkdelay::model::{DelaySpec, HistoryFn, InfluenceSpec, InitialHistory, ScalarFn, Scenario};
use hkdelay::solver::{integrate, SolverParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> hkdelay::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let tau_bar = 0.5;
    let agents = (0..12)
        .map(|_| {
            let p: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let v: Vec<f64> = (0..3).map(|_| rng.gen_range(-0.5..0.5)).collect();
            HistoryFn::Polynomial(vec![p, v])
        })
        .collect();
    let scenario = Scenario::new(
        4.0,
        // touches zero at t = 0, 2 pi / 3, ...
        DelaySpec::pointwise(
            tau_bar,
            ScalarFn::sinusoid(0.25, 0.25, 3.0, -std::f64::consts::FRAC_PI_2),
        ),
        InfluenceSpec::inverse_quadratic(1.5)?,
        InitialHistory::new(tau_bar, 3, agents)?,
        SolverParams::with_step(tau_bar / 64.0),
    )?;

    let traj = integrate(&scenario)?;
    let cert = build_certificate(&traj, &scenario)?;
    println!(
        "K = {}, M0 = {:.4}, psi0 = {:.4}, D0 = {:.4}",
        cert.k, cert.m0, cert.psi0, cert.d0
    );
    println!(
        "C = {:.6}, C~ = {:.6}, gamma = {:.6}",
        cert.c, cert.c_tilde, cert.gamma
    );
    if let Some(rate) = cert.empirical_rate {
        println!(
            "empirical rate {rate:.4} (certified lower bound {:.4})",
            cert.gamma
        );
    }
    for check in &cert.checks {
        let margin = check
            .worst_margin
            .map_or("skipped".into(), |m| format!("{m:+.3e}"));
        println!(
            "  {:<28} {:>5}  {margin}",
            check.name,
            if check.pass { "ok" } else { "FAIL" }
        );
    }
    println!(
        "d(T) = {:.3e} <= bound {:.3e}",
        hkdelay::analysis::diameter_at(&traj, 4.0)?,
        cert.bound_at(4.0)
    );
    Ok(())
}
