use std::fs;
use std::process::Command;

use ffharm::cache;
use ffharm::config::RunConfig;
use ffharm::dump;
use ffharm::records::{SubspaceRecord, VarietyRecord};
use ffharm_core::fourier::{self, AnyGridFunction};
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("ffharm").chain(args.iter().copied());
    let code = ffharm::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn sigma_hat_csv() {
    let (code, out, _) = run(&["sigma-hat", "--q", "3", "--d", "3", "--coeffs", "1,1,1", "--format", "csv", "--no-cache"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "index,re,im");
    assert_eq!(lines.len(), 28);
    // m = (1, 0, 0) has index 1.
    let fields: Vec<f64> = lines[2].split(',').map(|s| s.parse().unwrap()).collect();
    assert_eq!(fields[0], 1.0);
    assert!((fields[1] + 1.0 / 3.0).abs() < 1e-12 && fields[2].abs() < 1e-12);
}

#[test]
fn explicit_formula_suite_passes() {
    let v = json(&["suite", "explicit-formula", "--q", "3,5,7", "--d", "2,3", "--trials", "20", "--seed", "7", "--no-cache"]);
    assert_eq!(v["passed"], Value::Bool(true));
    let diff = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "max_abs_diff").unwrap();
    assert!(diff["measured"].as_f64().unwrap() <= 1e-9);
    assert_eq!(v["seed"], 7);
    assert_eq!(v["version"], ffharm_core::VERSION);
    for key in ["command", "params", "checks", "constants", "seed", "version"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn validation_errors_exit_2_with_one_line() {
    let (code, _, err) = run(&["gauss", "--q", "4"]);
    assert_eq!(code, 2);
    assert!(err.contains("EvenCharacteristic"));
    assert_eq!(err.trim_end().lines().count(), 1);
    let (code, _, err) = run(&["frobnicate"]);
    assert_eq!(code, 2);
    assert_eq!(err.trim_end().lines().count(), 1);
    assert_eq!(run(&["gauss", "--q", "6"]).0, 2);
    assert_eq!(run(&["variety", "--q", "5", "--d", "3", "--coeffs", "1,5,1"]).0, 2);
    assert_eq!(run(&["suite", "nope", "--seed", "1"]).0, 2);
    let (code, _, err) = run(&["suite", "decay"]);
    assert_eq!(code, 2);
    assert!(err.contains("--seed"));
    assert_eq!(run(&["norm", "--q", "3", "--d", "3", "--coeffs", "1,1,1", "--p", "0.5", "--r", "2"]).0, 2);
    assert_eq!(run(&["sweep", "--q", "3,5,7", "--d", "3", "--scheme", "nope", "--p", "2", "--r", "2", "--method", "exact22"]).0, 2);
}

#[test]
fn cache_reuses_reports_and_recovers_from_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let c = dir.path().to_str().unwrap();
    let args = ["gauss", "--q", "7", "--cache", c];
    let (code, first, _) = run(&args);
    assert_eq!(code, 0);
    let (_, second, _) = run(&args);
    assert_eq!(first, second);

    let entries: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(entries.len(), 1);
    let path = &entries[0];
    // A marked entry is served as-is: the second run does not recompute.
    let mut stored: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    stored["report"]["constants"]["sqrt_q"] = Value::from(-1.0);
    fs::write(path, stored.to_string()).unwrap();
    let v: Value = serde_json::from_str(&run(&args).1).unwrap();
    assert_eq!(v["constants"]["sqrt_q"], -1.0);
    // --no-cache bypasses it.
    let v: Value = serde_json::from_str(&run(&["gauss", "--q", "7", "--cache", c, "--no-cache"]).1).unwrap();
    assert!((v["constants"]["sqrt_q"].as_f64().unwrap() - 7f64.sqrt()).abs() < 1e-12);

    fs::write(path, "{ not json").unwrap();
    let (code, out, err) = run(&args);
    assert_eq!(code, 0);
    assert!(err.contains("CorruptCacheEntry"));
    assert_eq!(out, first);
    let (_, out, err) = run(&args);
    assert!(err.is_empty());
    assert_eq!(out, first);
}

#[test]
fn cache_keys_track_seed_and_version() {
    let cfg = RunConfig::parse_from(["ffharm", "suite", "decay", "--seed", "1", "--format", "csv"]).unwrap();
    let p = cfg.params();
    let k = cache::cache_key("suite", &p, Some(1), "0.1.0");
    assert_eq!(k, cache::cache_key("suite", &p, Some(1), "0.1.0"));
    assert_ne!(k, cache::cache_key("suite", &p, Some(2), "0.1.0"));
    assert_ne!(k, cache::cache_key("suite", &p, Some(1), "0.1.1"));
    // Output format is not part of the key.
    let csv = RunConfig::parse_from(["ffharm", "suite", "decay", "--seed", "1", "--format", "text"]).unwrap();
    assert_eq!(csv.params(), p);
}

#[test]
fn cache_write_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let (code, _, err) = run(&["gauss", "--q", "5", "--cache", blocker.to_str().unwrap()]);
    assert_eq!(code, 3, "{err}");
}

#[test]
fn failed_suite_exits_1_naming_the_check() {
    let dir = tempfile::tempdir().unwrap();
    let c = dir.path().to_str().unwrap();
    let args = ["suite", "decay", "--q", "3", "--d", "3", "--trials", "1", "--seed", "3", "--cache", c];
    assert_eq!(run(&args).0, 0);
    let path = fs::read_dir(dir.path()).unwrap().next().unwrap().unwrap().path();
    let mut stored: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    stored["report"]["passed"] = Value::Bool(false);
    stored["report"]["checks"][0]["passed"] = Value::Bool(false);
    fs::write(&path, stored.to_string()).unwrap();
    let (code, _, err) = run(&args);
    assert_eq!(code, 1);
    assert!(err.contains("odd_max_rel_err"), "{err}");
}

#[test]
fn run_config_round_trips() {
    let cfg = RunConfig::parse_from([
        "ffharm", "sweep", "--q", "3,5,7", "--d", "3", "--coeffs", "1,-1,1", "--p", "2", "--r", "inf", "--seed", "9", "--format", "text",
        "--threads", "2",
    ])
    .unwrap();
    let text = serde_json::to_string(&cfg).unwrap();
    let back: RunConfig = serde_json::from_str(&text).unwrap();
    assert_eq!(back, cfg);
    assert_eq!(cfg.options.q, vec![3, 5, 7]);
}

#[test]
fn records_parse_back() {
    let v = json(&["variety", "--q", "3", "--d", "3", "--coeffs", "1,1,1", "--points", "--no-cache"]);
    let rec: VarietyRecord = serde_json::from_value(v["info"].clone()).unwrap();
    assert_eq!(rec.point_count, 9);
    assert_eq!(rec.points.unwrap().len(), 9);
    assert_eq!(v["constants"]["closed_form_count"], 9.0);
    let v = json(&["variety", "--q", "9", "--d", "2", "--coeffs", "1:1,1", "--no-cache"]);
    let rec: VarietyRecord = serde_json::from_value(v["info"].clone()).unwrap();
    assert_eq!(rec.coefficients[0], "1:1");
    let v = json(&["subspaces", "--q", "5", "--d", "4", "--scheme", "alternating", "--no-cache"]);
    let subs: Vec<SubspaceRecord> = serde_json::from_value(v["info"]["subspaces"].clone()).unwrap();
    assert!(subs.iter().all(|s| s.verified));
    assert!(subs.iter().any(|s| s.kind == "alternating-even" && s.dim == 2));
}

#[test]
fn sigma_hat_dump_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.ffgf");
    let (code, _, _) = run(&["sigma-hat", "--q", "5", "--d", "2", "--coeffs", "1,-1", "--dump", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let back = dump::read_dump(&mut fs::File::open(&path).unwrap()).unwrap();
    let AnyGridFunction::Dual(g) = back else { panic!("expected dual side") };
    let f = ffharm_core::FiniteField::of_order(5).unwrap();
    let form = ffharm_core::QuadraticForm::from_ints(&f, &[1, -1]).unwrap();
    assert!(g.max_abs_diff(&fourier::sigma_inv_closed_form(&form).unwrap()).unwrap() == 0.0);
    let mut bad = fs::read(&path).unwrap();
    bad[0] = b'X';
    assert!(dump::read_dump(&mut bad.as_slice()).is_err());
}

#[test]
fn region_and_norm_commands() {
    let v = json(&["region", "--d", "3", "--k", "1", "--square-ratio", "--p", "2", "--r", "4"]);
    assert_eq!(v["constants"]["contains"], 1.0);
    let v = json(&["region", "--kind", "averaging", "--d", "3", "--p", "4", "--r", "4"]);
    assert_eq!(v["constants"]["contains"], 1.0);
    let v = json(&["norm", "--kind", "averaging", "--q", "5", "--d", "3", "--scheme", "all-ones", "--p", "2", "--r", "2", "--method", "exact22"]);
    assert!((v["constants"]["value"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn binary_output_is_reproducible_and_thread_independent() {
    let exe = env!("CARGO_BIN_EXE_ffharm");
    let args = ["sweep", "--q", "3,5,7", "--d", "3", "--scheme", "alternating", "--p", "2", "--r", "4", "--seed", "5", "--restarts", "3", "--max-iter", "60", "--no-cache"];
    let a = Command::new(exe).args(args).args(["--threads", "1"]).output().unwrap();
    let b = Command::new(exe).args(args).args(["--threads", "4"]).output().unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let bad = Command::new(exe).args(["gauss", "--q", "4"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn out_flag_writes_file_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let svg = dir.path().join("p.svg");
    let (code, stdout, _) = run(&[
        "sweep", "--q", "3,5,7", "--d", "3", "--p", "2", "--r", "2", "--kind", "averaging", "--method", "exact22", "--out",
        out.to_str().unwrap(), "--svg", svg.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
    assert!(fs::read_to_string(&svg).unwrap().starts_with("<svg"));
}
