use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli-tests").join(name);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(dir: &Path, config: &str, args: &[&str]) -> Output {
    let cfg = dir.join("scenario.toml");
    fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_wiretap"))
        .args(args)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap()
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn close(v: &Value, want: f64, tol: f64) -> bool {
    (v.as_f64().unwrap() - want).abs() <= tol
}

#[test]
fn empty_config_exits_with_code_2() {
    let dir = scratch("empty");
    let out = run(&dir, "", &["curve"]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn unknown_key_exits_with_code_2() {
    let dir = scratch("unknown");
    let out = run(&dir, "[code]\nfamily = \"bch\"\nk = 16\nn = 31\nrate = 2\n", &["curve"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("rate"));
}

#[test]
fn missing_config_flag_exits_with_code_2() {
    let out = Command::new(env!("CARGO_BIN_EXE_wiretap")).arg("gap").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn complexity_reproduces_systematic_row() {
    let dir = scratch("complexity");
    let cfg = "[complexity]\nn = 511\nk = 385\ndv = 3.8\ni_ave = 2.0\nmode = \"systematic\"\n";
    let out = run(&dir, cfg, &["complexity"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(dir.join("out/complexity.json"));
    assert!(close(&v["dense"]["log2_enc"], 14.6, 0.1), "{v}");
    assert!(close(&v["triangular"]["log2_enc"], 10.9, 0.1), "{v}");
    assert!(close(&v["dense"]["log2_dec"], 17.9, 0.1), "{v}");
    let meta = json(dir.join("out/meta.json"));
    assert_eq!(meta["command"], "complexity");
    assert!(meta["seed"].is_null());
}

#[test]
fn equivocation_of_bch_511_220() {
    let dir = scratch("equivocation");
    let cfg = "[code]\nfamily = \"bch\"\nn = 511\nk = 220\n[equivocation]\nrs = 0.43\nsg_db = 4.4\n";
    let out = run(&dir, cfg, &["equivocation"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(dir.join("out/equivocation.json"));
    assert!(close(&v[0]["eb_n0_bob_db"], 5.63, 0.05), "{v}");
    assert!(close(&v[0]["re_fraction"], 0.2496, 0.005), "{v}");
}

const SMALL_SIM: &str = "\
[code]
family = \"bch\"
n = 31
k = 16
[scrambler]
mode = \"real\"
weights = [5]
frames = [2]
[channel]
points = [1.0, 2.0, 3.0]
sg_db = 2.0
[sim]
seed = 7
min_errors = 40
max_frames = 20000
";

#[test]
fn reruns_are_byte_identical_across_worker_counts() {
    let a = scratch("rerun-a");
    let b = scratch("rerun-b");
    let oa = run(&a, SMALL_SIM, &["simulate", "--workers", "1"]);
    let ob = run(&b, SMALL_SIM, &["simulate", "--workers", "3"]);
    assert!(oa.status.success(), "{}", String::from_utf8_lossy(&oa.stderr));
    assert!(ob.status.success(), "{}", String::from_utf8_lossy(&ob.stderr));
    for name in ["bob.csv", "bob_raw.csv", "eve.csv", "eve_raw.csv", "stats.json", "meta.json"] {
        let x = fs::read(a.join("out").join(name)).unwrap();
        let y = fs::read(b.join("out").join(name)).unwrap();
        assert_eq!(x, y, "{name} differs");
    }
    let meta = json(a.join("out/meta.json"));
    assert_eq!(meta["seed"], 7);
    assert_eq!(meta["low_confidence"], false);
}

#[test]
fn exhausted_budget_exits_with_code_3() {
    let dir = scratch("budget");
    let out = run(&dir, SMALL_SIM, &["simulate", "--min-errors", "1000000", "--max-frames", "64"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(dir.join("out/meta.json"))["low_confidence"], true);
}

#[test]
fn single_transmission_harq_is_plain_transmission() {
    let dir = scratch("harq");
    let cfg = "[code]\nfamily = \"bch\"\nn = 511\nk = 385\n[channel]\nstart = 0.0\nstop = 8.0\nstep = 0.5\n[harq]\nq_max = 1\n";
    let out = run(&dir, cfg, &["harq"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let plain = fs::read_to_string(dir.join("out/plain.csv")).unwrap();
    assert_eq!(fs::read_to_string(dir.join("out/harq_bob.csv")).unwrap(), plain);
    assert_eq!(fs::read_to_string(dir.join("out/harq_eve_sg0.csv")).unwrap(), plain);
}

#[test]
fn unbracketed_threshold_is_reported_not_extrapolated() {
    let dir = scratch("gap");
    let cfg = "[code]\nfamily = \"unitary\"\nk = 385\n[channel]\nstart = 0.0\nstop = 4.0\nstep = 0.5\n";
    let out = run(&dir, cfg, &["gap"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(dir.join("out/gap.json"));
    let rec = &v[0];
    assert!(rec["gap_db"].is_null(), "{v}");
    assert!(rec["bob_bracket"].is_null());
    assert!(rec["error"].as_str().unwrap().starts_with("Bob"));
}
