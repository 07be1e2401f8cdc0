use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn cogirs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cogirs")).args(args).output().expect("binary runs")
}

const TINY: &str = r#"
realizations = 2
base_seed = 3
output_stem = "tiny"

[sweep]
axis = "power_dbm"
values = [10, 20]

[dims]
n_t = 2
m = 2
k_users = 1
i_users = 1

[ao]
max_iter = 5
"#;

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("cfg.toml");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn validate_config_prints_resolved_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), TINY);
    let out = cogirs(&["validate-config", "--config", &cfg]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("irs_pathloss_exponent"));
    assert!(text.contains("realizations = 2"));
}

#[test]
fn shipped_configs_validate() {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in fs::read_dir(configs).unwrap() {
        let path = entry.unwrap().path();
        let out = cogirs(&["validate-config", "--config", path.to_str().unwrap()]);
        assert!(out.status.success(), "{}", path.display());
        seen += 1;
    }
    assert!(seen >= 4);
}

#[test]
fn invalid_config_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "realizations = 0\n[sweep]\naxis = \"power_dbm\"\nvalues = [1]\n");
    assert_eq!(cogirs(&["validate-config", "--config", &cfg]).status.code(), Some(2));
    let cfg = write_config(dir.path(), "[sweep]\naxis = \"power_dbm\"\n");
    assert_eq!(cogirs(&["sweep", "--config", &cfg]).status.code(), Some(2));
}

#[test]
fn sweep_writes_results_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), TINY);
    let run = |sub: &str| {
        let out_dir = dir.path().join(sub);
        let out = cogirs(&["sweep", "--config", &cfg, "--output-dir", out_dir.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        out_dir
    };
    let (a, b) = (run("a"), run("b"));
    let csv = fs::read_to_string(a.join("tiny.csv")).unwrap();
    assert_eq!(csv, fs::read_to_string(b.join("tiny.csv")).unwrap());
    assert_eq!(csv.lines().count(), 1 + 2 * 3);
    let plot = fs::read_to_string(a.join("tiny_plot.py")).unwrap();
    assert_eq!(plot.matches("label=").count(), 3);
}

#[test]
fn scheme_and_seed_flags_override_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), TINY);
    let out_dir = dir.path().join("o");
    let out = cogirs(&[
        "sweep",
        "--config",
        &cfg,
        "--seed",
        "9",
        "--schemes",
        "proposed,baseline2",
        "--realizations",
        "1",
        "--output-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = fs::read_to_string(out_dir.join("tiny.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 2);
    assert!(!csv.contains("baseline1"));
    let bad = cogirs(&["sweep", "--config", &cfg, "--schemes", "oracle"]);
    assert!(!bad.status.success());
}

#[test]
fn single_writes_traces() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), TINY);
    let out_dir = dir.path().join("s");
    let out = cogirs(&["single", "--config", &cfg, "--seed", "4", "--output-dir", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("status="));
    assert!(stdout.contains("baseline2"));
    for f in ["tiny_seed4_realization.txt", "tiny_seed4_proposed.json", "tiny_seed4_baseline2.json"] {
        assert!(out_dir.join(f).exists(), "{f}");
    }
}
