//! Scenarios can also be described in TOML, the format the `hkdelay` binary reads.

use hkdelay::analysis::build_certificate_with;
use hkdelay::cli::{decay_plot_svg, parse_document};
use hkdelay::solver::integrate;

const DOCUMENT: &str = r#"
horizon = 6.0

[delay]
kind = "pointwise"
tau_bar = 1.0
tau = { kind = "piecewise_linear", nodes = [[0.0, 0.0], [3.0, 1.0], [6.0, 0.5]] }

[influence]
kind = "exponential"
scale = 1.0
rate = 0.5

[solver]
step = 0.0078125

[analysis]
samples_per_window = 32

[[agents]]
kind = "constant"
value = [0.0, 0.0]

[[agents]]
kind = "polynomial"
coefficients = [[1.0, 0.0], [0.5, 0.5]]

[[agents]]
kind = "sampled"
nodes = [[-1.0, 0.0, 2.0], [0.0, 1.0, 1.0]]
"#;

fn main() -> hkdelay::Result<()> {
    let doc = parse_document(DOCUMENT)?;
    let traj = integrate(&doc.scenario)?;
    let cert = build_certificate_with(&traj, &doc.scenario, &doc.analysis)?;
    println!("{}", cert.to_json());
    if let Some(path) = std::env::args().nth(1) {
        std::fs::write(&path, decay_plot_svg(&traj, &cert))?;
        println!("wrote {path}");
    }

    match parse_document(&DOCUMENT.replace("tau_bar = 1.0", "tau_bar = 1.0\nlag = 2")) {
        Err(e) => println!("rejected as expected: {e}"),
        Ok(_) => println!("unexpectedly accepted"),
    }
    Ok(())
}
