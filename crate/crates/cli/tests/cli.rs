use std::path::PathBuf;
use std::process::{Command, Output};

fn cvpm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cvpm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cvpm-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn data_rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn qfi_point_queries() {
    let o = cvpm(&[
        "qfi", "--n0", "1", "--beta", "1", "--theta", "0", "--phi", "0", "--eta", "0",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "qfi=16\n");
    let o = cvpm(&[
        "qfi", "--n0", "1", "--beta", "0", "--phi", "0", "--delta", "0.5",
    ]);
    assert_eq!(stdout(&o), "qfi=2\n");
}

#[test]
fn usage_errors_exit_2() {
    let both = cvpm(&[
        "qfi", "--n0", "1", "--beta", "1", "--eta", "0", "--delta", "1",
    ]);
    assert_eq!(both.status.code(), Some(2));
    assert_eq!(cvpm(&["qfi", "--n0", "1"]).status.code(), Some(2));
    assert_eq!(cvpm(&["sweep", "--figure", "7"]).status.code(), Some(2));
    assert_eq!(cvpm(&["mle", "--m", "10"]).status.code(), Some(2));
    assert_eq!(cvpm(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_3() {
    let o = cvpm(&[
        "sweep",
        "--figure",
        "1",
        "--points",
        "3",
        "--out",
        "/nonexistent-dir/fig1.csv",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let o = cvpm(&["sweep", "--config", "/nonexistent-dir/run.cfg"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn sweep_csv_is_deterministic_and_sorted() {
    let dir = scratch("det");
    let a = dir.join("a.csv");
    let b = dir.join("b.csv");
    let o = cvpm(&[
        "sweep",
        "--figure",
        "2b",
        "--points",
        "41",
        "--out",
        a.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), a.to_str().unwrap());
    let o = Command::new(env!("CARGO_BIN_EXE_cvpm"))
        .args([
            "sweep",
            "--figure",
            "2b",
            "--points",
            "41",
            "--out",
            b.to_str().unwrap(),
        ])
        .env("CVPM_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# cv-phase-metrology schema v1"));
    assert!(text.contains("\nn0,eta,qfi,fi,ratio,omega_opt\n"));
    let rows = data_rows(&text);
    assert!(rows
        .windows(2)
        .all(|w| (w[0][0], w[0][1]) < (w[1][0], w[1][1])));
    for r in &rows {
        assert!(r[4] >= 0.75 - 1e-2 && r[4] <= 1.0 + 1e-9, "{r:?}");
    }
}

#[test]
fn figure1_noiseless_rows() {
    let dir = scratch("fig1");
    let out = dir.join("fig1.csv");
    let script = dir.join("fig1.gp");
    let o = cvpm(&[
        "sweep",
        "--figure",
        "1",
        "--points",
        "21",
        "--out",
        out.to_str().unwrap(),
        "--gnuplot",
        script.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rows = data_rows(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(rows.len(), 4 * 21);
    for r in rows.iter().filter(|r| r[0] == 0.0) {
        let n0 = r[1];
        assert!(
            (r[2] - 8.0 * n0 * (n0 + 1.0)).abs() <= 1e-10 * r[2].max(1.0),
            "{r:?}"
        );
    }
    let gp = std::fs::read_to_string(&script).unwrap();
    assert!(gp.contains(out.to_str().unwrap()));
}

#[test]
fn config_file_precedence() {
    let dir = scratch("cfg");
    let out = dir.join("fig5.csv");
    let cfg = dir.join("run.cfg");
    std::fs::write(
        &cfg,
        format!(
            "# sweep settings\nfigure = 5\npoints = 7\nout = {}\n",
            out.display()
        ),
    )
    .unwrap();
    let o = cvpm(&["sweep", "--config", cfg.to_str().unwrap(), "--points", "4"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("# figure=5\n# points=4\n# phi=0\n"));
    assert_eq!(data_rows(&text).len(), 6 * 4);

    std::fs::write(&cfg, "figure = 5\ncolour = red\n").unwrap();
    let o = cvpm(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn threshold_csv() {
    let o = cvpm(&[
        "threshold",
        "--n0-min",
        "1e-3",
        "--n0-max",
        "1",
        "--points",
        "4",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with(
        "# cv-phase-metrology schema v1\n# n0-min=0.001\n# n0-max=1\n# points=4\nn0,delta_t\n"
    ));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0][0], 0.001);
    assert!(rows.iter().all(|r| r[1] > 0.7 && r[1] < 0.83), "{rows:?}");
    let bad = cvpm(&["threshold", "--n0-min", "2", "--n0-max", "1"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn mle_report_is_reproducible() {
    let args = [
        "mle", "--seed", "7", "--m", "200", "--r", "200", "--n0", "1", "--eta", "0",
    ];
    let a = cvpm(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&cvpm(&args)));
    let line = stdout(&a);
    assert!(
        line.contains(" mse=") && line.contains(" crb=") && line.contains(" ratio="),
        "{line}"
    );
}

#[test]
fn oracle_failure_exits_4() {
    let o = cvpm(&["oracle-check", "--limit", "1", "--tolerance-scale", "1e-12"]);
    assert_eq!(o.status.code(), Some(4));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("n0=0.25 beta=0"), "{err}");
}

#[test]
fn bad_thread_count_is_usage_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_cvpm"))
        .args(["qfi", "--n0", "1", "--beta", "1", "--eta", "0"])
        .env("CVPM_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
