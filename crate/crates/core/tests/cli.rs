use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hkdelay::cli::{EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_PASS, SEED_DIR_ENV};
use tempfile::TempDir;

const OVERSTATED: &str = r#"
horizon = 3.0

[delay]
kind = "pointwise"
tau_bar = 0.1
tau = { kind = "constant", value = 0.05 }

[influence]
kind = "inverse_quadratic"
scale = 1.0
psi0_override = 1.0

[solver]
step = 0.0125

[[agents]]
kind = "constant"
value = [0.0]

[[agents]]
kind = "constant"
value = [10.0]
"#;

fn golden() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

fn hkdelay(seed_dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hkdelay"))
        .args(args)
        .env(SEED_DIR_ENV, seed_dir)
        .output()
        .expect("binary runs")
}

fn out_arg(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines
        .next()
        .unwrap()
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    (header, rows)
}

#[test]
fn certify_undelayed_pair() {
    let tmp = TempDir::new().unwrap();
    let out = out_arg(&tmp, "run");
    let o = hkdelay(
        &golden(),
        &[
            "certify",
            "--scenario",
            "two_agent_undelayed",
            "--out",
            &out,
            "--plots",
        ],
    );
    assert_eq!(
        o.status.code(),
        Some(EXIT_PASS),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("certificate: PASS"));

    let cert: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("run/certificate.json")).unwrap())
            .unwrap();
    let rate = cert["empirical_rate"].as_f64().unwrap();
    let gamma = cert["gamma"].as_f64().unwrap();
    assert!((rate - 2.0).abs() <= 1e-4 && rate >= gamma);
    assert_eq!(cert["passed"], serde_json::Value::Bool(true));

    let (header, rows) = csv_rows(&tmp.path().join("run/metrics.csv"));
    assert_eq!(header, ["t", "d_t", "bound_t"]);
    assert_eq!(rows.len(), 5001);
    let svg = fs::read_to_string(tmp.path().join("run/decay.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<polyline"));
}

#[test]
fn simulate_consensus_gives_constant_columns() {
    let tmp = TempDir::new().unwrap();
    let out = out_arg(&tmp, "sim");
    let o = hkdelay(
        &golden(),
        &["simulate", "--scenario", "consensus.toml", "--out", &out],
    );
    assert_eq!(o.status.code(), Some(EXIT_PASS));
    let (header, rows) = csv_rows(&tmp.path().join("sim/trajectory.csv"));
    assert_eq!(header, ["t", "agent", "x0", "x1"]);
    assert!(!rows.is_empty());
    for r in &rows {
        assert_eq!(r[2], "0.3");
        assert_eq!(r[3], "-1.2");
    }
    assert!(rows
        .iter()
        .all(|r| r[0].split('.').nth(1).map(str::len) == Some(9)));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let tmp = TempDir::new().unwrap();
    let (a, b) = (out_arg(&tmp, "a"), out_arg(&tmp, "b"));
    for out in [&a, &b] {
        let o = hkdelay(
            &golden(),
            &[
                "certify",
                "--scenario",
                "sinusoidal_2d",
                "--out",
                out,
                "--jobs",
                "2",
            ],
        );
        assert_eq!(o.status.code(), Some(EXIT_PASS));
    }
    for file in ["trajectory.csv", "metrics.csv", "certificate.json"] {
        assert_eq!(
            fs::read(Path::new(&a).join(file)).unwrap(),
            fs::read(Path::new(&b).join(file)).unwrap(),
            "{file}"
        );
    }
}

#[test]
fn sweep_gamma_decreases_in_tau_bar() {
    let tmp = TempDir::new().unwrap();
    let out = out_arg(&tmp, "sweep");
    let o = hkdelay(
        &golden(),
        &[
            "sweep",
            "--scenario",
            "two_agent_undelayed",
            "--out",
            &out,
            "--param",
            "tau_bar",
            "--values",
            "0.25,0.5,1.0",
        ],
    );
    assert_eq!(
        o.status.code(),
        Some(EXIT_PASS),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let (header, rows) = csv_rows(&tmp.path().join("sweep/sweep.csv"));
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let gammas: Vec<f64> = rows
        .iter()
        .map(|r| r[col("gamma")].parse().unwrap())
        .collect();
    for (r, g) in rows.iter().zip(&gammas) {
        let tb: f64 = r[col("value")].parse().unwrap();
        let c = (1.0 - (-2.0 * tb).exp()).max((-tb).exp());
        let ct = 1.0 - (-tb).exp() * (1.0 - c);
        assert!((g - (1.0 / ct).ln() / (3.0 * tb)).abs() <= 1e-12);
        assert_eq!(r[col("passed")], "true");
    }
    assert!(gammas.windows(2).all(|w| w[0] > w[1]), "{gammas:?}");
    assert!(tmp.path().join("sweep/sweep_2_certificate.json").is_file());
}

#[test]
fn meanfield_writes_reports() {
    let tmp = TempDir::new().unwrap();
    let out = out_arg(&tmp, "mf");
    let o = hkdelay(
        &golden(),
        &[
            "meanfield",
            "--scenario",
            "meanfield",
            "--out",
            &out,
            "--ladder",
            "8,16",
            "--horizon",
            "2.5",
        ],
    );
    assert_eq!(
        o.status.code(),
        Some(EXIT_PASS),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let (header, rows) = csv_rows(&tmp.path().join("mf/meanfield.csv"));
    assert_eq!(header, ["N", "t", "dX", "bound", "margin"]);
    assert!(rows.iter().any(|r| r[0] == "8") && rows.iter().any(|r| r[0] == "16"));
    let (header, _) = csv_rows(&tmp.path().join("mf/meanfield_w1.csv"));
    assert_eq!(header, ["N", "t", "w1"]);

    let o = hkdelay(
        &golden(),
        &[
            "meanfield",
            "--scenario",
            "meanfield",
            "--out",
            &out,
            "--tau-star",
            "0.75",
        ],
    );
    assert_eq!(o.status.code(), Some(EXIT_CONFIG));
}

#[test]
fn failed_check_exits_one_after_writing_artifacts() {
    let tmp = TempDir::new().unwrap();
    fs::write(tmp.path().join("overstated.toml"), OVERSTATED).unwrap();
    let out = out_arg(&tmp, "bad");
    // bare name resolved through the seed directory override
    let o = hkdelay(
        tmp.path(),
        &["certify", "--scenario", "overstated", "--out", &out],
    );
    assert_eq!(o.status.code(), Some(EXIT_CHECK_FAILED));
    assert!(String::from_utf8(o.stdout).unwrap().contains("[FAIL]"));
    for file in ["trajectory.csv", "metrics.csv", "certificate.json"] {
        assert!(tmp.path().join("bad").join(file).is_file(), "{file}");
    }
}

#[test]
fn configuration_errors_exit_two() {
    let tmp = TempDir::new().unwrap();
    let out = out_arg(&tmp, "x");
    let o = hkdelay(
        tmp.path(),
        &["simulate", "--scenario", "missing", "--out", &out],
    );
    assert_eq!(o.status.code(), Some(EXIT_CONFIG));

    let zero = OVERSTATED.replace("tau_bar = 0.1", "tau_bar = 0.0");
    fs::write(tmp.path().join("zero.toml"), zero).unwrap();
    let o = hkdelay(
        tmp.path(),
        &["simulate", "--scenario", "zero", "--out", &out],
    );
    assert_eq!(o.status.code(), Some(EXIT_CONFIG));
    assert!(String::from_utf8(o.stderr).unwrap().contains("tau_bar > 0"));

    let typo = OVERSTATED.replace("scale = 1.0", "scael = 1.0");
    fs::write(tmp.path().join("typo.toml"), typo).unwrap();
    let o = hkdelay(
        tmp.path(),
        &["simulate", "--scenario", "typo", "--out", &out],
    );
    assert_eq!(o.status.code(), Some(EXIT_CONFIG));

    // step does not divide the horizon
    let o = hkdelay(
        tmp.path(),
        &[
            "simulate",
            "--scenario",
            "overstated",
            "--out",
            &out,
            "--step",
            "0.007",
        ],
    );
    assert_eq!(o.status.code(), Some(EXIT_CONFIG));
    // unknown flag rejected by the argument parser
    let o = hkdelay(
        tmp.path(),
        &["simulate", "--scenario", "overstated", "--bogus"],
    );
    assert_eq!(o.status.code(), Some(EXIT_CONFIG));
}
