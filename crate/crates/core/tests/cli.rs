use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scene(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenes")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_holonomy-lab"))
        .args(args)
        .env("HOLONOMY_LAB_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn run_scene(cmd: &str, file: &str, extra: &[&str]) -> Output {
    let path = scene(file);
    let mut args = vec![cmd, "--config", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn every_scene_runs_its_main_subcommand() {
    for (cmd, file, extra) in [
        ("transport", "ab.toml", vec![]),
        ("abphase", "three_solenoids.toml", vec![]),
        ("monodromy", "two_pole.toml", vec![]),
        ("wong", "ac.toml", vec!["--verify-ad"]),
        ("wong", "two_pole.toml", vec![]),
        ("vacua", "z2_vacuum.toml", vec!["--group", "Z2"]),
        ("vacua", "ab.toml", vec![]),
        ("ym-energy", "constant_field.toml", vec![]),
        ("flatness", "two_pole.toml", vec![]),
    ] {
        let o = run_scene(cmd, file, &extra);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{cmd} {file}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

#[test]
fn abphase_prints_the_predicted_phase() {
    let o = run_scene("abphase", "ab.toml", &[]);
    let out = stdout(&o);
    let mut parts = out
        .lines()
        .next()
        .unwrap()
        .split_whitespace()
        .map(|s| s.parse::<f64>().unwrap());
    let (re, im) = (parts.next().unwrap(), parts.next().unwrap());
    assert!(
        (re - 1.7f64.cos()).abs() < 1e-10 && (im + 1.7f64.sin()).abs() < 1e-10,
        "{out}"
    );
}

#[test]
fn vacua_z2_reports_multiplicities() {
    let out = stdout(&run_scene("vacua", "z2_vacuum.toml", &["--group", "Z2"]));
    assert!(out.contains("class 1 2"), "{out}");
    assert!(out.contains("classes_at_rank 4"), "{out}");
}

#[test]
fn ym_energy_of_constant_field() {
    let out = stdout(&run_scene("ym-energy", "constant_field.toml", &[]));
    let e: f64 = out.split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!((e - 13.5).abs() < 0.135, "{out}");
}

#[test]
fn touching_path_is_a_usage_error() {
    let o = run_scene("transport", "touching.toml", &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("pole proximity"));
}

#[test]
fn curved_custom_field_fails_flatness() {
    assert_eq!(
        run_scene("flatness", "custom_constant.toml", &[])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn custom_monodromy_needs_acknowledgement() {
    assert_eq!(
        run_scene("monodromy", "custom_constant.toml", &[])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run_scene("monodromy", "custom_constant.toml", &["--assume-flat"])
            .status
            .code(),
        Some(0)
    );
}

#[test]
fn bad_arguments_exit_with_usage_code() {
    assert_eq!(
        run_scene("transport", "ab.toml", &["--tol", "1e-20"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["transport", "--config", "/nonexistent/scene.toml"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(
        run_scene("vacua", "ab.toml", &["--group", "Z3"])
            .status
            .code(),
        Some(2)
    );
    let o = Command::new(env!("CARGO_BIN_EXE_holonomy-lab"))
        .args(["transport", "--config", scene("ab.toml").to_str().unwrap()])
        .env("HOLONOMY_LAB_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn malformed_config_reports_its_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(
        &path,
        "[connection]\nkind = \"aharonov_bohm\"\nflux = \"lots\"\n",
    )
    .unwrap();
    let o = run(&["transport", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn transport_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("traj.csv");
    let o = run_scene("transport", "ac.toml", &["--csv", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,re_v1,im_v1,re_v2,im_v2"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert!(rows.len() >= 2);
    assert_eq!(rows[0][0], 0.0);
    assert_eq!(rows.last().unwrap()[0], 1.0);
    // unitary transport keeps the norm
    for r in &rows {
        let n2: f64 = r[1..].iter().map(|x| x * x).sum();
        assert!((n2 - 1.0).abs() < 1e-8);
    }
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let path = scene("two_pole.toml");
    let outs: Vec<Vec<u8>> = ["1", "0", "3"]
        .iter()
        .map(|n| {
            Command::new(env!("CARGO_BIN_EXE_holonomy-lab"))
                .args([
                    "wong",
                    "--config",
                    path.to_str().unwrap(),
                    "--verify-ad",
                    "--seed",
                    "7",
                ])
                .env("HOLONOMY_LAB_THREADS", n)
                .output()
                .unwrap()
                .stdout
        })
        .collect();
    assert!(outs.windows(2).all(|w| w[0] == w[1]));
}
