use std::process::{Command, Output};

use serde_json::Value;

fn qot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qot")).args(args).output().expect("binary runs")
}

fn first_line(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stdout);
    serde_json::from_str(text.lines().next().expect("some output")).expect("json line")
}

#[test]
fn group_length_exact_mean() {
    let out = qot(&["group-length", "--group", "zn:4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = first_line(&out);
    assert_eq!(v["mean"], "1/1");
    assert_eq!(v["lengths"], serde_json::json!([0, 1, 2, 1]));
    assert_eq!(v["method"], "exact");
}

#[test]
fn depolarizing_cost() {
    let out = qot(&["cost", "--channel", "depolarizing:2:0.5", "--restarts", "8", "--iterations", "100"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &first_line(&out)["report"];
    let lower = r["lower"].as_f64().unwrap();
    // p·√6/4
    assert!((lower - 0.5 * 6f64.sqrt() / 4.0).abs() < 1e-6, "{lower}");
    assert_eq!(r["lower_method"], "ascent-lower");
    assert!(r["upper"].as_f64().unwrap() >= lower);
}

#[test]
fn same_seed_same_bytes() {
    let args = ["cost", "--channel", "random:2:2:5", "--restarts", "4", "--iterations", "50", "--seed", "9"];
    assert_eq!(qot(&args).stdout, qot(&args).stdout);
}

#[test]
fn mixing_time_of_depolarizing() {
    let out = qot(&["mixing", "--channel", "depolarizing:2:0.5", "--eps", "0.1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(first_line(&out)["report"]["t_mix"], 4);
}

#[test]
fn cc_verify_csv() {
    let out = qot(&["cc-verify", "--samples", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("sample,distance,cost_lower,margin"));
    for _ in 0..3 {
        let cols: Vec<f64> = lines.next().unwrap().split(',').map(|c| c.parse().unwrap()).collect();
        assert!(cols[3] >= -1e-6);
    }
}

#[test]
fn bad_input_exits_one() {
    let out = qot(&["cost", "--channel", "depolarizing:2:7"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--channel"));

    assert_eq!(qot(&["verify", "--suite", "nope"]).status.code(), Some(1));
    assert_eq!(qot(&["lip", "--channel", "depolarizing:3:0.5", "--resource", "pauli"]).status.code(), Some(1));
    assert_eq!(qot(&["group-length", "--group", "missing.json"]).status.code(), Some(1));
}

#[test]
fn quick_suite_passes() {
    let out = qot(&["verify", "--suite", "group"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}
