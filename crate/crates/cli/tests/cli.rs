use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;
use tempfile::NamedTempFile;

const C3: &str = "0 1\n1 2\n2 0\n";
const C4: &str = "0 1\n1 2\n2 3\n3 0\n";
const P3: &str = "0 1\n1 2\n";

fn graph_file(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn labp(args: &[&str], graph: &str) -> Output {
    let f = graph_file(graph);
    Command::new(env!("CARGO_BIN_EXE_labp"))
        .args(args)
        .arg(f.path())
        .env_remove("LABP_THREADS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn line_value(out: &str, key: &str) -> String {
    let prefix = format!("{key} = ");
    out.lines()
        .map(str::trim_start)
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no `{key}` in\n{out}"))
        .to_string()
}

fn json(args: &[&str], graph: &str) -> (Value, i32) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let o = labp(&all, graph);
    (serde_json::from_slice(&o.stdout).unwrap(), o.status.code().unwrap())
}

#[test]
fn nu_star_examples() {
    let o = labp(&["nu-star"], C3);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(line_value(&stdout(&o), "nu_star"), "3/2");

    let o = labp(&["nu-star"], P3);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(line_value(&stdout(&o), "nu_star"), "1");
    assert_eq!(line_value(&stdout(&o), "cover_y"), "(0, 1, 0)");
}

#[test]
fn empty_and_malformed_inputs_are_hard_errors() {
    let o = labp(&["nu-star"], "# nothing here\n");
    assert_eq!(o.status.code(), Some(1));
    let o = labp(&["oracle"], "0 1\n1 x\n");
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    let o = labp(&["match", "--z", "0"], C3);
    assert_eq!(o.status.code(), Some(1));
    let o = labp(&["match", "--no-such-flag"], C3);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn cover_examples() {
    let o = labp(&["cover", "--bipartite"], C4);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(line_value(&stdout(&o), "cover_size"), "2");

    let o = labp(&["cover", "--bipartite"], "0 1\n");
    assert_eq!(line_value(&stdout(&o), "cover_size"), "1");

    let o = labp(&["cover"], C3);
    let out = stdout(&o);
    assert_eq!(line_value(&out, "cover_y"), "(1/2, 1/2, 1/2)");
    assert_eq!(line_value(&out, "rounded_size"), "3");

    let o = labp(&["cover", "--bipartite"], C3);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("odd cycle"));
}

#[test]
fn match_examples() {
    let o = labp(&["match", "--z", "2"], C3);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(line_value(&out, "x"), "(0.333333333333, 0.333333333333, 0.333333333333)");
    assert_eq!(line_value(&out, "sum_x"), "1.0");

    let (v, code) = json(&["match", "--anneal"], C3);
    assert_eq!(code, 0);
    let sums: Vec<f64> = v["results"]["ladder"].as_array().unwrap().iter().map(|r| r["sum_x"].as_f64().unwrap()).collect();
    assert!(sums.windows(2).all(|w| w[0] < w[1]));
    assert!(1.5 - sums.last().unwrap() <= 1e-4);

    let (v, _) = json(&["match", "--z", "5"], "0 1\n1 2\n1 3\n3 4\n");
    assert_eq!(v["certificates"]["gibbs_check_passed"], Value::Bool(true));
}

#[test]
fn unconverged_match_exits_two() {
    let o = labp(&["match", "--z", "100", "--max-rounds", "3"], C3);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("status: uncertified"));
}

#[test]
fn bethe_examples() {
    let (v, code) = json(&["bethe", "--z", "2", "--loops"], C3);
    assert_eq!(code, 0);
    let r = &v["results"];
    assert!((r["loop_z"].as_f64().unwrap() - 0.875).abs() <= 1e-10);
    assert!((r["phi_g"].as_f64().unwrap() - 7f64.ln()).abs() <= 1e-10);
    assert!(v["certificates"]["loop_residual"].as_f64().unwrap() <= 1e-10);

    let (v, _) = json(&["bethe", "--z", "3", "--loops"], "0 1\n1 2\n1 3\n");
    assert_eq!(v["results"]["loop_z"].as_f64(), Some(1.0));
    assert_eq!(v["results"]["loop_terms"].as_u64(), Some(0));

    let (v, _) = json(&["bethe", "--z", "1", "--loops"], C4);
    assert!(v["certificates"]["loop_residual"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn bethe_caps_leave_notices() {
    let mut text = String::new();
    for a in 0..9 {
        for b in a + 1..9 {
            text.push_str(&format!("{a} {b}\n"));
        }
    }
    let (v, _) = json(&["bethe", "--z", "1", "--loops"], &text);
    assert!(v["results"]["phi_b"].is_number());
    assert!(v["results"].get("loop_z").is_none());
    assert!(!v["notices"].as_array().unwrap().is_empty());
}

#[test]
fn oracle_examples() {
    let (v, _) = json(&["oracle"], C3);
    let r = &v["results"];
    assert_eq!((r["nu"].as_u64(), r["tau"].as_u64()), (Some(1), Some(2)));
    assert_eq!((r["nu_star"].as_str(), r["tau_star"].as_str()), (Some("3/2"), Some("3/2")));

    let (v, _) = json(&["oracle"], C4);
    let r = &v["results"];
    assert_eq!((r["nu"].as_u64(), r["tau"].as_u64(), r["nu_star"].as_str()), (Some(2), Some(2), Some("2")));

    let petersen = "0 1\n1 2\n2 3\n3 4\n4 0\n0 5\n1 6\n2 7\n3 8\n4 9\n5 7\n7 9\n9 6\n6 8\n8 5\n";
    let (v, code) = json(&["oracle"], petersen);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["nu"].as_u64(), Some(5));
}

#[test]
fn json_round_trips_and_agrees_with_text() {
    for args in [&["bethe", "--z", "2", "--loops"][..], &["nu-star"], &["match", "--z", "7"]] {
        let mut all = vec!["--json"];
        all.extend_from_slice(args);
        let raw = stdout(&labp(&all, C3));
        let v: Value = serde_json::from_str(&raw).unwrap();
        assert_eq!(serde_json::to_string_pretty(&v).unwrap() + "\n", raw);
        let text = stdout(&labp(args, C3));
        for (key, value) in v["results"].as_object().unwrap() {
            if let Value::Number(n) = value {
                assert_eq!(line_value(&text, key), n.to_string());
            }
        }
    }
}

#[test]
fn stdin_input_and_thread_independence() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_labp"))
        .args(["nu-star", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(C3.as_bytes()).unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(line_value(&stdout(&o), "nu_star"), "3/2");

    let outs: Vec<String> =
        ["1", "2", "8"].iter().map(|t| stdout(&labp(&["--threads", t, "bethe", "--z", "4", "--loops"], C4))).collect();
    assert!(outs.iter().all(|o| o == &outs[0]));
}
