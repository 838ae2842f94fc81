//! End-to-end tests of the `hew` binary: piped workflows, file formats,
//! JSON output and exit codes.

use std::io::Write;
use std::process::{Command, Output, Stdio};

fn hew(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hew"))
        .args(args)
        .output()
        .expect("spawn hew")
}

fn hew_stdin(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_hew"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn hew");
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().expect("wait hew")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn tmpfile(name: &str, contents: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join("hew-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn gen_weight_verify_roundtrip() {
    let fano = hew(&["gen", "fano"]);
    assert_eq!(fano.status.code(), Some(0));
    let weights = hew_stdin(&["weight", "--mode", "linear"], &stdout(&fano));
    assert_eq!(weights.status.code(), Some(0), "{weights:?}");

    let hg = tmpfile("fano.hg", &stdout(&fano));
    let wt = tmpfile("fano.wt", &stdout(&weights));
    let check = hew(&["verify", hg.to_str().unwrap(), wt.to_str().unwrap()]);
    assert_eq!(check.status.code(), Some(0));
    assert!(stdout(&check).contains("proper"));
}

#[test]
fn verify_all_ones_path() {
    let hg = tmpfile("path.hg", "3 2\n0 1\n1 2\n");
    let wt = tmpfile("path.wt", "0 1\n1 1\n");
    let check = hew(&["verify", hg.to_str().unwrap(), wt.to_str().unwrap()]);
    assert_eq!(check.status.code(), Some(0));
    assert_eq!(stdout(&check).trim(), "proper");
}

#[test]
fn verify_rejects_monochromatic_triangle() {
    let hg = tmpfile("tri.hg", "3 3\n0 1\n1 2\n0 2\n");
    let wt = tmpfile("tri.wt", "0 1\n1 1\n2 1\n");
    let check = hew(&["verify", hg.to_str().unwrap(), wt.to_str().unwrap()]);
    assert_eq!(check.status.code(), Some(1));
}

#[test]
fn oracle_exit_codes() {
    let k4 = hew(&["gen", "complete", "4"]);
    let inc = hew_stdin(&["gen", "incidence"], &stdout(&k4));
    let hg = tmpfile("k4inc.hg", &stdout(&inc));

    // Infeasible under cap 3.
    let r = hew(&["oracle", "--cap", "3", hg.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(1));

    // Feasible at cap 4, witness written and re-verifiable.
    let wt = std::env::temp_dir().join("hew-cli-tests/k4inc.wt");
    let r = hew(&[
        "oracle",
        "--cap",
        "4",
        "--witness",
        wt.to_str().unwrap(),
        hg.to_str().unwrap(),
    ]);
    assert_eq!(r.status.code(), Some(0));
    assert!(stdout(&r).contains("k_min = 4"));
    let check = hew(&["verify", hg.to_str().unwrap(), wt.to_str().unwrap()]);
    assert_eq!(check.status.code(), Some(0));

    // Budget exhaustion is exit 2.
    let r = hew(&["oracle", "--cap", "4", "--budget-nodes", "2", hg.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn twin_edge_maps_to_exit_one() {
    let hg = tmpfile("iso.hg", "2 1\n0 1\n");
    let r = hew(&["weight", hg.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(1));
}

#[test]
fn usage_errors_map_to_exit_three() {
    let r = hew(&["no-such-command"]);
    assert_eq!(r.status.code(), Some(3));
    let r = hew(&["weight", "--mode", "bogus", "-"]);
    assert_eq!(r.status.code(), Some(3));
}

#[test]
fn weight_json_report_parses() {
    let seeded = hew(&["gen", "random-linear", "12", "10", "4", "7"]);
    assert_eq!(seeded.status.code(), Some(0));
    let out = hew_stdin(&["weight", "--json", "--trace"], &stdout(&seeded));
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["verified"].as_bool().unwrap());
    assert!(v["max_weight"].as_i64().unwrap() <= v["budget"].as_i64().unwrap());
    assert!(v["weights"]["weights"].is_array());
}

#[test]
fn oracle_json_parses() {
    let c6 = hew(&["gen", "cycle", "6"]);
    let out = hew_stdin(&["oracle", "--cap", "5", "--json"], &stdout(&c6));
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["outcome"]["KMin"]["k_min"].as_i64(), Some(3));
}

#[test]
fn derive_dump_parses() {
    let seeded = hew(&["gen", "random-linear", "10", "8", "3", "3"]);
    let out = hew_stdin(&["derive"], &stdout(&seeded));
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["ordering"]["pi"].is_array());
    assert!(v["ordering"]["e2"].is_array());
}

#[test]
fn repro_experiments_confirm() {
    for name in ["c6", "k4-incidence", "fano-incidence"] {
        let r = hew(&["repro", name]);
        assert_eq!(r.status.code(), Some(0), "{name}: {r:?}");
        assert!(stdout(&r).contains("confirmed"), "{name}");
    }
    let r = hew(&["repro", "unknown-name"]);
    assert_eq!(r.status.code(), Some(3));
}

#[test]
fn piped_roundtrip_always_proper_on_twin_free_inputs() {
    for (kind, seed) in [("random-linear", "3"), ("random-linear", "8"), ("random", "5"), ("random", "21")] {
        let gen = hew(&["gen", kind, "14", "12", "4", seed]);
        assert_eq!(gen.status.code(), Some(0));
        let weights = hew_stdin(&["weight"], &stdout(&gen));
        assert_eq!(weights.status.code(), Some(0), "{kind} seed {seed}");
        let hg = tmpfile(&format!("pipe_{kind}_{seed}.hg"), &stdout(&gen));
        let wt = tmpfile(&format!("pipe_{kind}_{seed}.wt"), &stdout(&weights));
        let check = hew(&["verify", hg.to_str().unwrap(), wt.to_str().unwrap()]);
        assert_eq!(check.status.code(), Some(0), "{kind} seed {seed}");
    }
}

#[test]
fn seeded_generation_is_reproducible() {
    let a = hew(&["gen", "random", "20", "15", "4", "99"]);
    let b = hew(&["gen", "random", "20", "15", "4", "99"]);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn init_weights_flow_through_weight_and_verify() {
    let hg = tmpfile("init_flow.hg", "4 3\n0 1\n1 2\n2 3\n");
    let init = tmpfile("init_flow.init", "0 5\n2 1\n");
    let out = hew(&[
        "weight",
        "--init",
        init.to_str().unwrap(),
        hg.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let wt = tmpfile("init_flow.wt", &stdout(&out));
    let check = hew(&[
        "verify",
        "--init",
        init.to_str().unwrap(),
        hg.to_str().unwrap(),
        wt.to_str().unwrap(),
    ]);
    assert_eq!(check.status.code(), Some(0));
}

#[test]
fn json_weighting_accepted_by_verify() {
    let hg = tmpfile("jsonw.hg", "3 2\n0 1\n1 2\n");
    let wt = tmpfile("jsonw.wt", r#"{"weights":[1,1]}"#);
    let check = hew(&["verify", hg.to_str().unwrap(), wt.to_str().unwrap()]);
    assert_eq!(check.status.code(), Some(0));
}
