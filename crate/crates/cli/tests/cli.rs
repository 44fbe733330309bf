use std::path::Path;
use std::process::{Command, Output};

use exdyn_cli::csv::header_config;
use exdyn_cli::parse_config;

fn exdyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_exdyn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.cfg");
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn trajectory_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "preset = fig3-left\nn_steps = 100\nstride = 10\n",
    );
    let out_dir = dir.path().join("out");
    let out = exdyn(&[
        "trajectory",
        "--config",
        &cfg,
        "--seed",
        "3",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let csv = std::fs::read_to_string(out_dir.join("trajectory.csv")).unwrap();
    assert!(csv.contains("# seed=3\n"));
    assert!(csv.contains("# lambda=0.01\n"));
    let table: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(table[0], "n,x1,x2,b");
    assert_eq!(table.len(), 12);

    // the header alone reproduces the run
    let spec = parse_config(&header_config(&csv)).unwrap();
    assert_eq!(spec.seed, 3);
    assert_eq!(spec.output, out_dir);
    let again = tempfile::tempdir().unwrap();
    let cfg2 = write_config(again.path(), &header_config(&csv));
    let out = exdyn(&["trajectory", "--config", &cfg2]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        std::fs::read_to_string(out_dir.join("trajectory.csv")).unwrap(),
        csv
    );
}

#[test]
fn headers_round_trip_for_every_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let text = "preset = fig4\nlambda_grid = 0.1, 0.3\nn_list = 5, inf\nreplicas = 8\nseed = 11\n";
    let cfg = write_config(dir.path(), text);
    let out = dir.path().join("o");
    for sub in ["variance-curve", "ar1-table", "trajectory"] {
        let status = exdyn(&[
            sub,
            "--config",
            &cfg,
            "--out",
            out.to_str().unwrap(),
            "--seed",
            "11",
        ])
        .status;
        assert_eq!(status.code(), Some(0), "{sub}");
        let csv = std::fs::read_to_string(out.join(format!("{sub}.csv"))).unwrap();
        let mut expected = parse_config(text).unwrap();
        expected.output = out.clone();
        assert_eq!(
            parse_config(&header_config(&csv)).unwrap(),
            expected,
            "{sub}"
        );
    }
    let table = std::fs::read_to_string(out.join("ar1-table.csv")).unwrap();
    assert!(table
        .lines()
        .any(|l| l == "lambda,K,sigma,stationary_variance"));
    let curve = std::fs::read_to_string(out.join("variance-curve.csv")).unwrap();
    assert!(curve
        .lines()
        .any(|l| l == "lambda,n,var_b,stderr,var_Y_pred"));
    assert!(curve.lines().any(|l| l.starts_with("0.1,4000,")));
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "preset = fig3-left\nspeed = 3\n");
    let out = exdyn(&["trajectory", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2") && err.contains("speed"), "{err}");
    assert_eq!(err.lines().count(), 1);

    let cfg = write_config(dir.path(), "k = 2\nlambda = 0.1\ndomain.lower = 0\ndomain.upper = 1\ninit.means = 0.5; 0.5\ninit.weights = 1, 1\nseed = 1\n");
    let out = exdyn(&["trajectory", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("init.means"));

    let out = exdyn(&[
        "trajectory",
        "--config",
        dir.path().join("absent.cfg").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("absent.cfg"));

    assert_eq!(
        exdyn(&["no-such-command", "--config", "x"]).status.code(),
        Some(1)
    );
}

#[test]
fn runtime_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    // a snapshot needs a planar model
    let cfg = write_config(dir.path(), "preset = fig3-left\nn_steps = 5\n");
    let out = exdyn(&[
        "snapshot",
        "--config",
        &cfg,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));

    // output directory path blocked by a regular file
    let blocker = dir.path().join("blocked");
    std::fs::write(&blocker, "").unwrap();
    let out = exdyn(&[
        "ar1-table",
        "--config",
        &cfg,
        "--out",
        blocker.join("sub").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("blocked"));
}

#[test]
fn property_failure_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "preset = theorem-suite\nn_steps = 5000\nn_samples = 500\nwindow = 2\n",
    );
    let out = exdyn(&[
        "properties",
        "--config",
        &cfg,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert_eq!(err.lines().count(), 1);
    assert!(err.contains("non-extinction"), "{err}");
    let csv = std::fs::read_to_string(dir.path().join("properties.csv")).unwrap();
    assert!(csv.contains("# window=2\n"));
    assert!(csv.lines().any(|l| l == "property,passed,kind,name,value"));
}

#[test]
fn properties_pass_on_theorem_suite_sized_down() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "preset = theorem-suite\nn_steps = 100000\nn_samples = 2000\n",
    );
    let out = exdyn(&[
        "properties",
        "--config",
        &cfg,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
