use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use asg_core::asg::{keystream, validate};
use asg_core::io::{decode_bits, key_from_json, params_from_json, report_from_json};
use serde_json::Value;
use tempfile::TempDir;

fn asg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_asg")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = asg(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

struct Work {
    dir: TempDir,
}

impl Work {
    fn new() -> Self {
        Work {
            dir: TempDir::new().unwrap(),
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn s(&self, name: &str) -> String {
        self.path(name).to_str().unwrap().to_string()
    }

    fn params(&self, name: &str, lmn: (usize, usize, usize), polys: (&str, &str, &str)) -> String {
        let json = format!(
            r#"{{"l": {}, "m": {}, "n": {}, "poly_a": "{}", "poly_b": "{}", "poly_c": "{}"}}"#,
            lmn.0, lmn.1, lmn.2, polys.0, polys.1, polys.2
        );
        fs::write(self.path(name), json).unwrap();
        self.s(name)
    }

    fn small(&self) -> String {
        self.params("p334.json", (3, 3, 4), ("0xb", "0xb", "0x13"))
    }

    fn medium(&self) -> String {
        self.params("p875.json", (8, 7, 5), ("0x11d", "0x83", "0x25"))
    }
}

fn read(p: &Path) -> String {
    fs::read_to_string(p).unwrap()
}

#[test]
fn keygen_is_valid_and_deterministic() {
    let w = Work::new();
    let p = w.small();
    ok(&["keygen", "--params", &p, "--seed", "1", "--out", &w.s("k1.json")]);
    ok(&["keygen", "--params", &p, "--seed", "1", "--out", &w.s("k2.json")]);
    ok(&["keygen", "--params", &p, "--seed", "2", "--out", &w.s("k3.json")]);
    let a = fs::read(w.path("k1.json")).unwrap();
    assert_eq!(a, fs::read(w.path("k2.json")).unwrap());
    assert_ne!(a, fs::read(w.path("k3.json")).unwrap());
    let params = params_from_json(&read(Path::new(&p))).unwrap();
    let key = key_from_json(&read(&w.path("k1.json")), &params).unwrap();
    assert!(validate(&params, &key).is_empty());
}

#[test]
fn strict_mode_rejects_shared_factor() {
    let w = Work::new();
    let p = w.params("p.json", (3, 4, 6), ("0xb", "0x13", "0x43"));
    let out = asg(&["keygen", "--params", &p]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gcd(m, n)"));
    ok(&["keygen", "--params", &p, "--no-strict"]);
}

#[test]
fn keystream_formats_and_period() {
    let w = Work::new();
    let p = w.small();
    let k = w.s("k.json");
    ok(&["keygen", "--params", &p, "--seed", "3", "--out", &k]);
    ok(&["keystream", "--params", &p, "--key", &k, "--count", "0", "--out", &w.s("empty.txt")]);
    assert!(decode_bits(&fs::read(w.path("empty.txt")).unwrap()).unwrap().is_empty());
    ok(&["keystream", "--params", &p, "--key", &k, "--count", "0", "--format", "binary", "--out", &w.s("empty.bin")]);
    assert_eq!(fs::read(w.path("empty.bin")).unwrap().len(), 12);

    for (name, fmt) in [("z.txt", "text"), ("z.bin", "binary")] {
        ok(&["keystream", "--params", &p, "--key", &k, "--count", "1680", "--format", fmt, "--out", &w.s(name)]);
    }
    let text = decode_bits(&fs::read(w.path("z.txt")).unwrap()).unwrap();
    let bin = decode_bits(&fs::read(w.path("z.bin")).unwrap()).unwrap();
    assert_eq!(text.len(), 1680);
    assert_eq!(text, bin);

    let out = ok(&["analyze", "--in", &w.s("z.bin")]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["period"], 840);
}

#[test]
fn invalid_key_fails() {
    let w = Work::new();
    let p = w.small();
    fs::write(
        w.path("bad.json"),
        r#"{"r": 3, "s": 5, "state_a": "0x1", "state_b": "0x0", "state_c": "0x1"}"#,
    )
    .unwrap();
    let out = asg(&["keystream", "--params", &p, "--key", &w.s("bad.json"), "--count", "10"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("all-zero") && err.contains("gcd(5, 15)"), "{err}");
}

#[test]
fn attack_round_trip() {
    let w = Work::new();
    let p = w.medium();
    let k = w.s("k.json");
    ok(&["keygen", "--params", &p, "--seed", "4", "--out", &k]);
    let len = (4 * 12 + 8 + 20).to_string();
    ok(&["keystream", "--params", &p, "--key", &k, "--count", &len, "--out", &w.s("z.txt")]);
    let report_path = w.s("report.json");
    ok(&["attack", "--params", &p, "--in", &w.s("z.txt"), "--workers", "4", "--out", &report_path]);

    let params = params_from_json(&read(Path::new(&p))).unwrap();
    let z = decode_bits(&fs::read(w.path("z.txt")).unwrap()).unwrap();
    let report = report_from_json(&read(Path::new(&report_path))).unwrap();
    assert_eq!(report.counters.a_states_tried, 256);
    assert!(report.wall_time_seconds >= 0.0);
    assert!(!report.recovered_keys.is_empty());
    for rec in &report.recovered_keys {
        let key = rec.to_key(&params).unwrap();
        assert_eq!(keystream(&params, &key, z.len()).unwrap(), z);
    }
}

#[test]
fn attack_output_ignores_worker_count() {
    let w = Work::new();
    let p = w.small();
    let k = w.s("k.json");
    ok(&["keygen", "--params", &p, "--seed", "5", "--out", &k]);
    ok(&["keystream", "--params", &p, "--key", &k, "--count", "51", "--out", &w.s("z.txt")]);
    let keys = |workers: &str| {
        let out = ok(&["attack", "--params", &p, "--in", &w.s("z.txt"), "--workers", workers]);
        let r = report_from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
        (r.recovered_keys, r.counters)
    };
    assert_eq!(keys("1"), keys("3"));
}

#[test]
fn short_keystream_rejected() {
    let w = Work::new();
    let p = w.medium();
    let k = w.s("k.json");
    ok(&["keygen", "--params", &p, "--out", &k]);
    ok(&["keystream", "--params", &p, "--key", &k, "--count", "12", "--out", &w.s("z.txt")]);
    let out = asg(&["attack", "--params", &p, "--in", &w.s("z.txt")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("3(m+n) = 36"));
}

#[test]
fn attack_without_result_exits_one() {
    // A constant stream of 40 zeros cannot come from a valid key: both
    // generating registers would have to be stuck.
    let w = Work::new();
    let p = w.small();
    fs::write(w.path("z.txt"), "0".repeat(40)).unwrap();
    let out = asg(&["attack", "--params", &p, "--in", &w.s("z.txt"), "--out", &w.s("r.json")]);
    assert_eq!(out.status.code(), Some(1));
    let report = report_from_json(&read(&w.path("r.json"))).unwrap();
    assert!(report.recovered_keys.is_empty());
}

#[test]
fn analyze_m_sequence() {
    let w = Work::new();
    fs::write(w.path("m.txt"), "1001011 1001011\n").unwrap();
    let out = ok(&["analyze", "--in", &w.s("m.txt")]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["linear_complexity"], 3);
    assert_eq!(v["feedback"], "x^3 + x + 1");
    assert_eq!(v["period"], 7);
}

#[test]
fn estimate_tables() {
    let out = ok(&["estimate", "-l", "64", "-m", "64", "-n", "64", "--json"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let t1 = v["classical_asg"].as_array().unwrap();
    let want = [135.0, 118.8, 83.0, 76.0, 71.8, 70.0, 70.0, 54.7, 78.0];
    for (row, want) in t1.iter().zip(want) {
        assert!((row["complexity_log2"].as_f64().unwrap() - want).abs() <= 0.5);
    }
    assert_eq!(v["asg_r_s"].as_array().unwrap().len(), 9);
    let text = ok(&["estimate", "-l", "64", "-m", "64", "-n", "64"]);
    assert!(String::from_utf8_lossy(&text.stdout).contains("Our Algebraic Attack"));

    let w = Work::new();
    let p = w.small();
    ok(&["estimate", "--params", &p, "--exact-phi"]);
}

#[test]
fn oracle_and_cap() {
    let w = Work::new();
    let p = w.small();
    let k = w.s("k.json");
    ok(&["keygen", "--params", &p, "--seed", "6", "--out", &k]);
    ok(&["keystream", "--params", &p, "--key", &k, "--count", "40", "--out", &w.s("z.txt")]);
    let out = ok(&["oracle", "--params", &p, "--in", &w.s("z.txt")]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let key: Value = serde_json::from_str(&read(&w.path("k.json"))).unwrap();
    assert!(v["matching_keys"].as_array().unwrap().contains(&key));

    let big = w.medium();
    let out = asg(&["oracle", "--params", &big, "--in", &w.s("z.txt")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("2^26"));
}

#[test]
fn reduce_confirms_equivalence() {
    let w = Work::new();
    let p = w.small();
    let k = w.s("k.json");
    ok(&["keygen", "--params", &p, "--seed", "7", "--out", &k]);
    let out = ok(&["reduce", "--params", &p, "--key", &k, "--count", "1000"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["equivalent"], true);
    assert_eq!(v["checked_bits"], 1000);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(asg(&["keygen"]).status.code(), Some(2));
    assert_eq!(asg(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(asg(&["keystream", "--params", "p", "--key", "k", "--count", "x"]).status.code(), Some(2));
    assert_eq!(asg(&["estimate", "-l", "3"]).status.code(), Some(2));
}

#[test]
fn missing_file_is_domain_failure() {
    let out = asg(&["analyze", "--in", "/nonexistent/z.txt"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn manifest_records_run() {
    let w = Work::new();
    let p = w.small();
    ok(&["keygen", "--params", &p, "--seed", "9", "--manifest", &w.s("m.json"), "--out", &w.s("k.json")]);
    let v: Value = serde_json::from_str(&read(&w.path("m.json"))).unwrap();
    assert_eq!(v["subcommand"], "keygen");
    assert_eq!(v["seed"], 9);
    assert_eq!(v["params"], p);
}
