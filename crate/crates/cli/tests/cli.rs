use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use haefliger_cli::batch::run_batch;
use haefliger_cli::{parse_config, render_table, run_job};
use proptest::prelude::*;
use serde_json::Value;

fn haefliger(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_haefliger")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut all = args.to_vec();
    all.extend(["--json", "-"]);
    let out = haefliger(&all);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    });
    (v, out.status.code().unwrap())
}

fn report(text: &str) -> Value {
    let r = run_job(&parse_config(text).unwrap()).unwrap();
    serde_json::from_str(&r.to_json()).unwrap()
}

fn corpus() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/jobs"))
}

#[test]
fn verify_coth_cancellation() {
    let (v, code) = json(&["verify", "coth-cancellation", "n=4"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"][0]["name"], "coth-cancellation");
    assert_eq!(v["result"][0]["verdict"], true);
}

#[test]
fn genus_cp3_is_zero() {
    let out = haefliger(&["genus", "cp", "q=3", "genus=ahat"]);
    assert_eq!(out.status.code(), Some(0));
    let table = String::from_utf8(out.stdout).unwrap();
    assert!(table.lines().any(|l| l.starts_with("value") && l.contains(" 0/1 ")), "{table}");
    let (v, _) = json(&["genus", "cp", "q=3", "genus=ahat"]);
    assert_eq!(v["result"]["value"]["coeffs"][0], "0/1");
}

#[test]
fn universal_signature_k1() {
    let out = haefliger(&["lefschetz", "universal", "k=1", "complex=signature", "current=1"]);
    assert_eq!(out.status.code(), Some(0));
    let table = String::from_utf8(out.stdout).unwrap();
    assert!(table.lines().any(|l| l.trim_start().starts_with("value") && l.contains(" -2i  ≈")), "{table}");
    assert!(table.contains("integrality  κ=8 true"), "{table}");
    assert!(table.contains("(approx)"));
    let (v, _) = json(&["lefschetz", "universal", "k=1", "complex=signature", "current=1"]);
    let r = &v["result"][0];
    assert_eq!(r["value"]["conductor"], 4);
    assert_eq!(r["value"]["coeffs"], serde_json::json!(["0/1", "-2/1"]));
    assert_eq!(r["integrality"], serde_json::json!({"kappa": 8, "verdict": true}));
}

#[test]
fn theta_zero_is_a_config_error() {
    let out = haefliger(&["lefschetz", "theta=0", "normal=0", "complex=signature"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("θ must lie in (0,π)"), "{err}");
    assert!(err.contains("1:7"), "{err}");
}

#[test]
fn diagnostics_carry_positions() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.job");
    fs::write(&p, "job = genus\ntarget = hp\nq = 2\n").unwrap();
    let out = haefliger(&["genus", "--config", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("bad.job:2:10: unknown builder `hp`"), "{err}");
}

#[test]
fn failed_check_exits_one() {
    let (v, code) = json(&["integrality", "universal", "k=1", "complex=signature", "kappa=3", "current=1"]);
    assert_eq!(code, 1);
    assert_eq!(v["ok"], false);
}

#[test]
fn engine_errors_exit_two_with_context() {
    // R_2 needs a q-order of at least 2
    let out = haefliger(&["bott-taubes", "point", "rank=2", "n=2", "--truncation", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.starts_with("error: bott-taubes point:"), "{err}");
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("v.job");
    fs::write(&p, "verify sqrt-claim\n").unwrap();
    let (v, code) = json(&["verify", "--config", p.to_str().unwrap(), "--max-n", "12"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"][0]["params"]["N"], "12");
    assert_eq!(v["input"]["max_n"], "12");
    let out_path = dir.path().join("r.json");
    let out = haefliger(&["genus", "cp", "q=4", "--json", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let written: Value = serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(written["result"]["value"]["coeffs"][0], "3/128");
}

#[test]
fn corpus_values() {
    let v = report(&fs::read_to_string(corpus().join("ahat-cp2.job")).unwrap());
    assert_eq!(v["result"]["value"]["coeffs"][0], "-1/8");
    let v = report(&fs::read_to_string(corpus().join("ahat-kp.job")).unwrap());
    assert_eq!(v["result"]["value"]["coeffs"][0], "0/1");
    let v = report(&fs::read_to_string(corpus().join("signature-cp2.job")).unwrap());
    assert_eq!(v["result"]["value"]["coeffs"][0], "1/1");
    let v = report(&fs::read_to_string(corpus().join("rigidity-atiyah.job")).unwrap());
    assert_eq!(v["result"][0]["verdict"], "OBSTRUCTED");
    assert_eq!(v["result"][0]["value"]["coeffs"][0], "-1/8");
    for name in ["rigidity-sphere-circle.job", "rigidity-torus-leaves.job"] {
        let v = report(&fs::read_to_string(corpus().join(name)).unwrap());
        assert_eq!(v["result"][0]["verdict"], "INCONCLUSIVE", "{name}");
        assert_eq!(v["result"][0]["value"]["coeffs"][0], "0/1", "{name}");
    }
    let v = report(&fs::read_to_string(corpus().join("bott-taubes-point.job")).unwrap());
    assert_eq!(v["result"][0]["value"]["coeffs"][0], "4/1");
    let v = report(&fs::read_to_string(corpus().join("genus-custom-ring.job")).unwrap());
    assert_eq!(v["result"]["value"]["coeffs"][0], "2/1");
}

#[test]
fn custom_components_agree_across_routes() {
    let text = fs::read_to_string(corpus().join("custom-component.job")).unwrap();
    let values: Vec<Value> = ["strict", "general", "basic3"]
        .iter()
        .map(|r| report(&text.replace("route = basic3", &format!("route = {r}")))["result"][0]["value"].clone())
        .collect();
    assert_eq!(values[0], values[1]);
    assert_eq!(values[1], values[2]);
    // 1/2 - (11/6)√3 i = -4/3 - (11/3)ζ3
    assert_eq!(values[0], serde_json::json!({"conductor": 3, "coeffs": ["-4/3", "-11/3"]}));
}

#[test]
fn batch_corpus_exits_zero_and_is_byte_stable() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let first = run_batch(corpus(), a.path()).unwrap();
    assert!(first.len() >= 20);
    for e in &first {
        assert_eq!(e.code, 0, "{}: {}", e.name, e.summary);
    }
    let second = run_batch(corpus(), b.path()).unwrap();
    assert_eq!(first.iter().map(|e| &e.name).collect::<Vec<_>>(), second.iter().map(|e| &e.name).collect::<Vec<_>>());
    for e in &first {
        let x = fs::read(a.path().join(format!("{}.json", e.name))).unwrap();
        let y = fs::read(b.path().join(format!("{}.json", e.name))).unwrap();
        assert_eq!(x, y, "{}", e.name);
    }
    let leftovers: Vec<_> = fs::read_dir(a.path())
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.path().extension().is_none_or(|x| x != "json"))
        .collect();
    assert!(leftovers.is_empty(), "temporary files left behind");
}

#[test]
fn batch_binary_reports_worst_code() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("good.job"), "genus cp q=2\n").unwrap();
    fs::write(dir.path().join("bad.job"), "genus cp q=0\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = haefliger(&["batch", dir.path().to_str().unwrap(), "--json", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out_dir.join("good.json").exists());
    assert!(!out_dir.join("bad.json").exists());
}

fn shuffled(tokens: &[String], seed: u64) -> Vec<String> {
    let mut v = tokens.to_vec();
    let n = v.len();
    for i in (1..n).rev() {
        let j = (seed.wrapping_mul(6364136223846793005).wrapping_add(i as u64 * 1442695040888963407) >> 33) as usize
            % (i + 1);
        v.swap(i, j);
    }
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Reports depend on the settings, not their order, and rerun to the same bytes.
    #[test]
    fn reports_are_canonical(
        k in 1u32..=2,
        complex in prop::sample::select(vec!["de_rham", "signature", "dolbeault j=1", "spin lift=-"]),
        current in prop::sample::select(vec!["1", "eta1*beta1", "all"]),
        seed in any::<u64>(),
    ) {
        let mut tokens: Vec<String> = vec![format!("k={k}"), format!("current={current}")];
        let mut parts = complex.split(' ');
        tokens.push(format!("complex={}", parts.next().unwrap()));
        tokens.extend(parts.map(str::to_string));
        let a = format!("lefschetz universal {}", tokens.join(" "));
        let b = format!("lefschetz universal {}", shuffled(&tokens, seed).join(" "));
        let ra = run_job(&parse_config(&a).unwrap()).unwrap();
        let rb = run_job(&parse_config(&b).unwrap()).unwrap();
        prop_assert_eq!(ra.to_json(), rb.to_json());
        prop_assert_eq!(render_table(&ra), render_table(&rb));
        let again = run_job(&parse_config(&a).unwrap()).unwrap();
        prop_assert_eq!(ra.to_json(), again.to_json());
    }
}
