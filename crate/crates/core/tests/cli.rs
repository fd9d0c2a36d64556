use std::path::Path;
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_taskalloc");

fn configs() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/configs"))
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn simulate(config: &Path, out: &Path, extra: &[&str]) -> std::process::Output {
    Command::new(BIN)
        .arg("simulate")
        .arg(config)
        .arg("--out-dir")
        .arg(out)
        .args(extra)
        .output()
        .unwrap()
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (
        dir.path().join("a"),
        dir.path().join("b"),
        dir.path().join("c"),
    );
    let cfg = configs().join("minimal.toml");
    assert!(simulate(&cfg, &a, &[]).status.success());
    assert!(simulate(&cfg, &b, &[]).status.success());
    assert!(simulate(&cfg, &c, &["--parallel"]).status.success());
    let first = read_dir_sorted(&a);
    assert_eq!(first.len(), 7);
    assert_eq!(first, read_dir_sorted(&b));
    assert_eq!(first, read_dir_sorted(&c));
}

#[test]
fn seed_flag_runs_one_seed() {
    let dir = tempfile::tempdir().unwrap();
    let out = simulate(
        &configs().join("minimal.toml"),
        dir.path(),
        &["--seed", "42"],
    );
    assert!(out.status.success());
    let names: Vec<String> = read_dir_sorted(dir.path())
        .into_iter()
        .map(|f| f.0)
        .collect();
    assert_eq!(
        names,
        vec!["minimal_aggregate.csv", "minimal_seed42.csv", "summary.csv"]
    );
}

#[test]
fn unreachable_threshold_is_flagged() {
    let dir = tempfile::tempdir().unwrap();
    let out = simulate(
        &configs().join("minimal.toml"),
        dir.path(),
        &["--threshold", "1e-12", "--seed", "1"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FLAGGED"));
}

#[test]
fn invalid_config_reports_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.toml");
    std::fs::write(&p, "n = 4\nbudget = 0\nrounds = 10\npolicy = \"uta\"\n").unwrap();
    let out = Command::new(BIN).arg("simulate").arg(&p).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`budget`"));
}

#[test]
fn table_over_a_small_directory() {
    let dir = tempfile::tempdir().unwrap();
    let cfgs = dir.path().join("cfg");
    std::fs::create_dir(&cfgs).unwrap();
    for p in [
        "\"gta\"",
        "\"ofta\"",
        "{ kind = \"ata-empirical\", eta = 1.0 }",
    ] {
        let name = if p.starts_with('{') {
            "ata-empirical"
        } else {
            p.trim_matches('"')
        };
        std::fs::write(
            cfgs.join(format!("{name}.toml")),
            format!("n = 17\nbudget = 23\nrounds = 50000\nseeds = [1, 2]\nthreshold = 1e-4\npolicy = {p}\n[optimizer]\nd = 30\n"),
        )
        .unwrap();
    }
    let out_dir = dir.path().join("out");
    let out = Command::new(BIN)
        .arg("table")
        .arg(&cfgs)
        .arg("--out-dir")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let table = std::fs::read_to_string(out_dir.join("table.csv")).unwrap();
    let gta = table.lines().find(|l| l.contains(",gta,")).unwrap();
    assert!(gta.starts_with("sqrt-exp,17,23,gta,1,1,"), "{gta}");
    assert_eq!(table.lines().count(), 4);
}

#[test]
fn selftest_passes() {
    let out = Command::new(BIN).arg("selftest").output().unwrap();
    assert!(out.status.success());
    assert!(!String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn regret_reports_checkpoints() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("r.toml");
    std::fs::write(
        &p,
        "n = 5\nbudget = 3\nrounds = 20000\nseeds = [1]\nfamily = \"exp-only\"\npolicy = { kind = \"ata\", alpha = 2.0 }\n[optimizer]\nenabled = false\n",
    )
    .unwrap();
    let out = Command::new(BIN).arg("regret").arg(&p).output().unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(
        text.contains("R(1000)=") && text.contains("R(10000)="),
        "{text}"
    );
}
