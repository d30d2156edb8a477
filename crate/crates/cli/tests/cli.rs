use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn praudit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_praudit"))
        .args(args)
        .env_remove("PRAUDIT_SEED")
        .output()
        .unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn fixture(name: &str) -> PathBuf {
    root().join("fixtures").join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn audit_reports_failing_gates_with_exit_1() {
    let out = praudit(&[
        "audit",
        "--data",
        path(&fixture("resnet50_bosque.csv")),
        "--config",
        path(&fixture("audit.toml")),
    ]);
    assert_eq!(
        out.status.code(),
        Some(1),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let md = stdout(&out);
    assert!(md.contains("| Precision | 0.780 | 0.897 | 0.484 | 0.118 | -0.296 |"));
    assert!(md.contains("## Gates"));
}

#[test]
fn loose_tolerance_passes_with_exit_0() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let config = dir.path().join("audit.toml");
    std::fs::write(
        &config,
        "positive_label = \"malignant\"\ngroup_attribute = \"phototype\"\n",
    )
    .unwrap();
    let out = praudit(&[
        "audit",
        "--data",
        path(&fixture("resnet50_bosque.csv")),
        "--config",
        path(&config),
        "--epsilon",
        "0.5",
        "--format",
        "json",
        "--out",
        path(&report),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["metadata"]["n_records"], 165);
}

#[test]
fn seed_env_overrides_config_and_flag_overrides_env() {
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_praudit"));
        cmd.args(["audit", "--format", "json", "--data"])
            .arg(fixture("resnet50_bosque.csv"))
            .arg("--config")
            .arg(fixture("audit.toml"))
            .env_remove("PRAUDIT_SEED");
        if let Some(e) = env {
            cmd.env("PRAUDIT_SEED", e);
        }
        if let Some(f) = flag {
            cmd.args(["--seed", f]);
        }
        let out = cmd.output().unwrap();
        let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        json["metadata"]["config"]["bootstrap"]["seed"]
            .as_u64()
            .unwrap()
    };
    assert_eq!(run(None, None), 0);
    assert_eq!(run(Some("17"), None), 17);
    assert_eq!(run(Some("17"), Some("5")), 5);
}

#[test]
fn bad_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "positive_label = \"malignant\"\n").unwrap();
    let out = praudit(&[
        "audit",
        "--data",
        path(&fixture("resnet50_bosque.csv")),
        "--config",
        path(&bad),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("group_attribute"));

    let missing = praudit(&[
        "audit",
        "--data",
        "nope.csv",
        "--config",
        path(&fixture("audit.toml")),
    ]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn reconstruct_prints_unique_counts() {
    let out = praudit(&[
        "reconstruct",
        "--sens",
        "0.789",
        "--spec",
        "0.590",
        "--acc",
        "0.655",
        "--n",
        "58",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "tp=15 fp=16 tn=23 fn=4\n");
    let none = praudit(&[
        "reconstruct",
        "--sens",
        "0.5",
        "--spec",
        "0.5",
        "--acc",
        "0.9",
        "--n",
        "4",
    ]);
    assert_eq!(none.status.code(), Some(1));
}

#[test]
fn synth_regenerates_the_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let out_csv = dir.path().join("out.csv");
    let out = praudit(&[
        "synth",
        "--spec",
        path(&fixture("resnet50_bosque.toml")),
        "--out",
        path(&out_csv),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        std::fs::read_to_string(&out_csv).unwrap(),
        std::fs::read_to_string(fixture("resnet50_bosque.csv")).unwrap()
    );
}

#[test]
fn parity_on_fixture_is_not_validated() {
    let out = praudit(&[
        "parity",
        "--data",
        path(&fixture("resnet50_bosque.csv")),
        "--config",
        path(&fixture("audit.toml")),
        "--group-a",
        "light",
        "--group-b",
        "dark",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("parity gap"));
}

#[test]
fn transport_with_source_reports_shift() {
    let out = praudit(&[
        "transport",
        "--source",
        path(&fixture("resnet50_bosque.csv")),
        "--target",
        path(&fixture("resnet50_bosque.csv")),
        "--config",
        path(&fixture("audit.toml")),
        "--epsilon",
        "0.25",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert!(text.contains("PASS group=dark measure=f1"));
    assert!(text.contains("shift=0.000"));
}
