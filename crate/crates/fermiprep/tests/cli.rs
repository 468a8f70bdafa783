//! CLI contract: reproducible reports, embedded config, exit codes.

use std::process::Command;

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_fermiprep"))
        .args(args)
        .output()
        .unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn without_timestamp(json: &str) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_str(json).unwrap();
    v.as_object_mut().unwrap().remove("timestamp").unwrap();
    v
}

#[test]
fn identical_seeds_give_identical_reports() {
    let args = [
        "antisym", "--eta", "2", "--orbitals", "4", "--values", "1,3", "--network", "bitonic",
        "--seed", "9",
    ];
    let (code_a, out_a) = run(&args);
    let (code_b, out_b) = run(&args);
    assert_eq!((code_a, code_b), (0, 0));
    assert_eq!(without_timestamp(&out_a), without_timestamp(&out_b));
}

#[test]
fn report_embeds_resolved_config() {
    let (code, out) = run(&[
        "antisym", "--eta", "3", "--orbitals", "8", "--values", "0,2,7", "--network", "bitonic",
        "--seed", "42",
    ]);
    assert_eq!(code, 0);
    let v = without_timestamp(&out);
    assert_eq!(v["config"]["f_eta"], 16);
    assert_eq!(v["config"]["rng_seed"], 42);
    let p = v["success_probability"].as_f64().unwrap();
    assert!((p - 0.8203125).abs() < 1e-12);
    assert!(v["fidelity_vs_oracle"].as_f64().unwrap() >= 1.0 - 1e-10);
}

#[test]
fn netgen_bitonic_8() {
    let (code, out) = run(&["netgen", "--family", "bitonic", "--wires", "8", "--verify"]);
    assert_eq!(code, 0);
    let v = without_timestamp(&out);
    assert_eq!(v["comparators"], 24);
    assert_eq!(v["depth"], 6);
    assert_eq!(v["zero_one_verified"], true);
}

#[test]
fn validation_errors_exit_2() {
    // values not ascending
    let (code, _) = run(&[
        "antisym", "--eta", "2", "--orbitals", "4", "--values", "3,1", "--network", "bitonic",
        "--seed", "1",
    ]);
    assert_eq!(code, 2);
    let (code, _) = run(&["netgen", "--family", "nosuch", "--wires", "4"]);
    assert_eq!(code, 2);
}

#[test]
fn simulation_cap_exits_3() {
    let (code, _) = run(&[
        "shuffle", "--eta", "4", "--orbitals", "256", "--values", "0,1,2,3", "--seed", "1",
    ]);
    assert_eq!(code, 3);
}
