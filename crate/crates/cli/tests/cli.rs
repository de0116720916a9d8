use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn precurse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_precurse"))
        .args(args)
        .env_remove("PRECURSE_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn binom(n: u64, k: u64) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

#[test]
fn b_table_agrees_with_dfs_to_sixty() {
    let text = stdout(&precurse(&["b", "--max", "60", "--check", "dfs"]));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,b,dfs,agree"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 61);
    let ones: Vec<usize> = rows
        .iter()
        .filter(|r| r[1] == "1")
        .map(|r| r[0].parse().unwrap())
        .collect();
    assert_eq!(ones, [7, 15, 23, 24, 33, 43, 45, 53, 54]);
    assert!(rows.iter().all(|r| r[1] == r[2] && r[3] == "true"));
}

#[test]
fn guess_recovers_catalan_recurrence() {
    let mut body = String::from("index,value\n");
    for n in 0..40u64 {
        body += &format!("{n},{}\n", binom(2 * n, n) / (n as u128 + 1));
    }
    let input = scratch("catalan.csv", &body);
    let text = stdout(&precurse(&["guess", "--input", input.to_str().unwrap(), "--max-order", "2", "--max-degree", "2"]));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["order"], 1);
    assert_eq!(v["polys"], serde_json::json!([["1", "1"], ["2", "-4"]]));
}

#[test]
fn guess_prints_null_for_the_automatic_sequence() {
    let b = stdout(&precurse(&["b", "--max", "400"]));
    let mut body = String::from("index,value\n");
    for line in b.lines().skip(2) {
        body += line;
        body.push('\n');
    }
    let input = scratch("b.csv", &body);
    let text = stdout(&precurse(&["guess", "--input", input.to_str().unwrap(), "--max-order", "3", "--max-degree", "3"]));
    assert_eq!(text.trim(), "null");
}

#[test]
fn walk_rows_start_with_known_counts() {
    let text = stdout(&precurse(&["walk", "--steps", "12"]));
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "n,a_n,p_n");
    assert_eq!(rows[1], "0,1,1/1");
    assert_eq!(rows[2], "1,0,0/1");
    assert_eq!(rows[3], "2,6,1/6");
    assert_eq!(rows[5], "4,74,37/648");
    assert_eq!(rows.len(), 14);
}

#[test]
fn eval_and_parity_agree_on_catalan() {
    let rec = scratch("catalan.json", r#"{"order":1,"polys":[["1","1"],["2","-4"]]}"#);
    let r = rec.to_str().unwrap();
    let table = stdout(&precurse(&["eval", "--recurrence", r, "--seeds", "1", "--start", "0", "--count", "30"]));
    let parity = stdout(&precurse(&[
        "eval", "--recurrence", r, "--seeds", "1", "--start", "0", "--count", "30", "--parity",
    ]));
    let from_table: String = table
        .lines()
        .skip(1)
        .map(|l| {
            let v: u128 = l.split(',').nth(1).unwrap().parse().unwrap();
            if v % 2 == 1 { '1' } else { '0' }
        })
        .collect();
    assert_eq!(parity.trim(), from_table);
    // C_n is odd exactly when n + 1 is a power of two.
    let oracle: String = (0..30u32).map(|n| if (n + 1).is_power_of_two() { '1' } else { '0' }).collect();
    assert_eq!(from_table, oracle);
}

#[test]
fn forbidden_word_is_absent_from_catalan_parity() {
    let rec = scratch("catalan_f.json", r#"{"order":1,"polys":[["1","1"],["2","-4"]]}"#);
    let text = stdout(&precurse(&[
        "forbidden", "--recurrence", rec.to_str().unwrap(), "--seeds", "1", "--start", "0", "--scan", "20000",
    ]));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!(v["found_at"].is_null());
    assert_eq!(v["scanned"], 20000);
}

#[test]
fn complexity_output_flags_lower_bounds() {
    let text = stdout(&precurse(&["complexity", "--b-prefix", "500", "--max-n", "3"]));
    assert!(text.starts_with("# "));
    assert!(text.lines().next().unwrap().contains("lower bounds"));
    assert_eq!(text.lines().nth(1), Some("n,factors,complete"));
}

#[test]
fn fit_is_labeled_diagnostic() {
    let text = stdout(&precurse(&["fit", "--steps", "16"]));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!(v["diagnostic"].as_str().unwrap().contains("not a certificate"));
    assert_eq!(v["fits"].as_array().unwrap().len(), 3);
}

#[test]
fn repeat_runs_are_byte_identical() {
    for args in [
        &["b", "--max", "40", "--check", "dfs"][..],
        &["paths", "--length", "15"][..],
        &["walk", "--steps", "10"][..],
        &["witness", "correspondence", "--max", "12"][..],
    ] {
        let a = precurse(args);
        let b = precurse(args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    let single = precurse(&["--threads", "1", "walk", "--steps", "10"]);
    assert_eq!(single.stdout, precurse(&["walk", "--steps", "10"]).stdout);
}

#[test]
fn output_flag_writes_file() {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("b_out.csv");
    let out = precurse(&["-o", path.to_str().unwrap(), "b", "--max", "8"]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert!(fs::read_to_string(&path).unwrap().starts_with("n,b\n0,0\n"));
}

#[test]
fn exit_codes() {
    assert_eq!(precurse(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(precurse(&["b", "--check", "bfs"]).status.code(), Some(2));
    assert_eq!(precurse(&["witness", "sl4", "--element", "q7"]).status.code(), Some(1));
    assert_eq!(precurse(&["walk", "--steps", "12", "--cap", "10"]).status.code(), Some(3));
    let budget = Command::new(env!("CARGO_BIN_EXE_precurse"))
        .args(["b", "--max", "30", "--check", "dfs"])
        .env("PRECURSE_BUDGET", "5")
        .output()
        .unwrap();
    assert_eq!(budget.status.code(), Some(3));
}
