use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::{json, Value};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_spectral-tiles"));
    c.env_remove("SPECTRAL_TILES_TOL");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json_out(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

const EXAMPLE: [&str; 4] = ["--set", "0,1,4,5", "--spectrum", "0,1/8,1/2,5/8"];

fn with_example<'a>(cmd: &'a str, extra: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec![cmd];
    v.extend(EXAMPLE);
    v.extend(extra);
    v
}

#[test]
fn verify_exit_codes() {
    assert_eq!(code(&run(&with_example("verify", &[]))), 0);
    assert_eq!(code(&run(&["verify", "--set", "0", "--spectrum", "0"])), 0);
    let o = run(&["verify", "--set", "0,1", "--spectrum", "0,1/3"]);
    assert_eq!(code(&o), 1);
    assert_eq!(json_out(&o)["spectral"], json!(false));
    let o = run(&with_example(
        "verify",
        &["--mode", "float", "--tol", "1e-12"],
    ));
    assert_eq!(code(&o), 0);
    assert_eq!(json_out(&o)["mode"], json!("float"));
}

#[test]
fn malformed_input_exits_two_with_an_error_object() {
    for args in [
        vec!["verify", "--set", "0,x", "--spectrum", "0"],
        vec!["verify", "--set", "0,1", "--spectrum", "0"],
        vec!["verify", "--set", "0,1", "--spectrum", "0,1/0"],
        vec!["ltm", "--set", "0,1", "--spectrum", "0,1/3"],
        vec!["classify", "--set", "0,1,2,3"],
        vec!["no-such-command"],
        vec!["ltm", "--set", "0,1", "--input", "{not json"],
    ] {
        let o = run(&args);
        assert_eq!(code(&o), 2, "{args:?}");
        let v = json_out(&o);
        assert!(
            v["error"].is_string() && v["detail"].is_string(),
            "{args:?}: {v}"
        );
    }
    let v = json_out(&run(&["ltm", "--set", "0,1", "--spectrum", "0,1/3"]));
    assert_eq!(v["error"], json!("not_a_spectrum"));
    let v = json_out(&run(&["classify", "--set", "0,1,2,3"]));
    assert_eq!(v["error"], json!("unsupported_cardinality"));
}

#[test]
fn tolerance_from_the_environment() {
    let o = bin()
        .args(with_example("verify", &["--mode", "float"]))
        .env("SPECTRAL_TILES_TOL", "-1")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
    let o = bin()
        .args(with_example("verify", &["--mode", "float"]))
        .env("SPECTRAL_TILES_TOL", "1e-10")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
}

#[test]
fn ltm_of_the_standard_triple_is_the_cyclic_shift() {
    let o = run(&["ltm", "--set", "0,1,2", "--spectrum", "0,1/3,2/3"]);
    assert_eq!(code(&o), 0);
    let v = json_out(&o);
    let m = &v["matrix"];
    assert_eq!(m["n"], json!(3));
    let entries = m["entries"].as_array().unwrap();
    for i in 0..3 {
        for j in 0..3 {
            let re = entries[3 * i + j][0].as_f64().unwrap();
            let im = entries[3 * i + j][1].as_f64().unwrap();
            let expected = if j == (i + 1) % 3 { 1.0 } else { 0.0 };
            assert!(
                (re - expected).abs() < 1e-12 && im.abs() < 1e-12,
                "({i},{j})"
            );
        }
    }
}

#[test]
fn ltm_output_feeds_recover_and_verify_ltm() {
    let ltm = run(&with_example("ltm", &[]));
    let text = String::from_utf8(ltm.stdout).unwrap();
    let recovered = run(&["recover", "--input", &text]);
    assert_eq!(code(&recovered), 0);
    let v = json_out(&recovered);
    assert_eq!(v["spectrum"], json!(["0", "1/8", "1/2", "5/8"]));
    let check = run_stdin(&["verify-ltm", "--input", "-"], &text);
    assert_eq!(code(&check), 0);
    assert_eq!(json_out(&check)["holds"], json!(true));
    // The recovered pair is accepted by verify.
    let again = run(&[
        "verify",
        "--input",
        &String::from_utf8(recovered.stdout).unwrap(),
    ]);
    assert_eq!(code(&again), 0);
}

#[test]
fn identity_is_not_a_local_translation() {
    let input =
        json!({"set": [0, 1], "matrix": {"n": 2, "entries": [[1, 0], [0, 0], [0, 0], [1, 0]]}});
    let o = run(&["verify-ltm", "--input", &input.to_string()]);
    assert_eq!(code(&o), 1);
    assert_eq!(json_out(&o)["witness"], json!([0, 1]));
    assert_eq!(code(&run(&["recover", "--input", &input.to_string()])), 2);
}

#[test]
fn complements_contain_the_expected_certificate() {
    let o = run(&with_example("complements", &[]));
    assert_eq!(code(&o), 0);
    let v = json_out(&o);
    let certs = v["complements"].as_array().unwrap();
    assert!(certs
        .iter()
        .any(|c| c["T"] == json!([0, 2]) && c["d"] == json!(8)));
    for c in certs {
        let back = run(&["verify-tiling", "--input", &c.to_string()]);
        assert_eq!(code(&back), 0);
    }
    let bad = run(&[
        "verify-tiling",
        "--set",
        "0,1,4,5",
        "--tile",
        "0,1",
        "--modulus",
        "8",
    ]);
    assert_eq!(code(&bad), 1);
    let all = json_out(&run(&with_example("complements", &["--all-translates"])));
    assert!(all["complements"].as_array().unwrap().len() > certs.len());
}

#[test]
fn theta_and_period() {
    let v = json_out(&run(&with_example("theta", &[])));
    assert_eq!(v["modulus"], json!(8));
    assert_eq!(v["residues"], json!([1, 3, 4, 5, 7]));
    assert_eq!(code(&run(&with_example("period", &["--d", "8"]))), 0);
    assert_eq!(code(&run(&with_example("period", &["--d", "4"]))), 1);
    let v = json_out(&run(&with_example("period", &[])));
    assert_eq!(v["d"], json!(8));
}

#[test]
fn group_at_one_matches_ltm() {
    let b = json_out(&run(&with_example("ltm", &[])));
    let exact = json_out(&run(&with_example("group", &["--t", "1"])));
    assert_eq!(exact["matrix"], b["matrix"]);
    let float = json_out(&run(&with_example("group", &["--t", "1.0"])));
    let (x, y) = (
        float["matrix"]["entries"].as_array().unwrap(),
        b["matrix"]["entries"].as_array().unwrap(),
    );
    for (p, q) in x.iter().zip(y) {
        for k in 0..2 {
            assert!((p[k].as_f64().unwrap() - q[k].as_f64().unwrap()).abs() < 1e-12);
        }
    }
    let half = run(&with_example("group", &["--t", "-1/2"]));
    assert_eq!(code(&half), 0);
}

#[test]
fn search_results_verify() {
    let o = run(&["search", "--set", "0,1,4,5", "--r", "8"]);
    assert_eq!(code(&o), 0);
    let v = json_out(&o);
    let spectra = v["spectra"].as_array().unwrap();
    assert!(spectra.contains(&json!(["0", "1/8", "1/2", "5/8"])));
    for g in spectra {
        let input = json!({"set": [0, 1, 4, 5], "spectrum": g});
        assert_eq!(code(&run(&["verify", "--input", &input.to_string()])), 0);
    }
    assert_eq!(code(&run(&["search", "--set", "0,1,3", "--r", "9"])), 1);
    let first = json_out(&run(&["search", "--set", "0,3", "--max-r", "10"]));
    assert_eq!(first["r"], json!(2));
    assert_eq!(first["spectrum"], json!(["0", "1/2"]));
    assert_eq!(
        code(&run(&["search", "--set", "0,1,3", "--max-r", "27"])),
        1
    );
}

#[test]
fn classify_verdicts() {
    let o = run(&["classify", "--set", "0,1,2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json_out(&o)["witness"], json!(["0", "1/3", "2/3"]));
    let o = run(&["classify", "--set", "0,1,3"]);
    assert_eq!(code(&o), 1);
    assert_eq!(json_out(&o)["witness"], Value::Null);
    assert_eq!(code(&run(&["classify", "--set", "0,1,2,3,4"])), 0);
}

#[test]
fn match_n4_example() {
    let o = run(&["match-n4", "--set", "0,1,4,5", "--l", "0,1,4,5", "--r", "8"]);
    assert_eq!(code(&o), 0);
    let v = json_out(&o);
    assert_eq!(v["result"], json!("match"));
    assert_eq!(v["params"]["alpha"], json!(2));
    assert_eq!(v["direct"], json!(true));
    let o = run(&["match-n4", "--set", "0,1,2,4", "--l", "0,1,2,3", "--r", "4"]);
    assert_eq!(code(&o), 1);
    assert_eq!(json_out(&o)["result"], json!("no_match"));
}

#[test]
fn fuglede_report_is_deterministic() {
    let a = run(&["fuglede", "--n", "8", "--jobs", "1"]);
    let b = run(&["fuglede", "--n", "8", "--jobs", "4"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let v = json_out(&a);
    assert_eq!(v["discrepancies"], json!([]));
    let rec = v["records"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["A"] == json!([0, 1, 4, 5]))
        .unwrap()
        .clone();
    assert_eq!(rec["tiles"], json!(true));
    assert_eq!(rec["spectral"], json!(true));
    assert_eq!(code(&run(&["fuglede", "--n", "31"])), 2);
}

#[test]
fn trajectory_csv_reproduces_the_unit_indicator_frames() {
    let o = run(&with_example(
        "trajectory",
        &[
            "--indicator",
            "0:[0,1)",
            "--t0",
            "0",
            "--t1",
            "-8",
            "--steps",
            "9",
            "--resolution",
            "256",
        ],
    ));
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,branch,x,re,im,abs"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 9 * 4 * 256);
    // At t = -4 all mass sits on branch 4.
    for r in rows.iter().filter(|r| r[0] == -4.0) {
        let expected = if r[1] == 4.0 { 1.0 } else { 0.0 };
        assert!((r[5] - expected).abs() < 1e-9, "{r:?}");
    }
}

#[test]
fn translate_json_and_csv_agree() {
    assert_eq!(
        code(&run(&with_example(
            "translate",
            &["--indicator", "1:[0,1/2)", "--t", "x"]
        ))),
        2
    );
    assert_eq!(
        code(&run(&with_example(
            "translate",
            &["--indicator", "1:[0,1/3)", "--t", "1"]
        ))),
        2
    );
    let args_f = [
        "--indicator",
        "1:[0,1/2)",
        "--resolution",
        "8",
        "--t",
        "-0.5",
    ];
    let csv = run(&with_example("translate", &args_f));
    let json = run(&with_example(
        "translate",
        &[&args_f[..], &["--output", "json"]].concat(),
    ));
    assert_eq!(code(&csv), 0);
    let rows = json_out(&json);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 4 * 8);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert_eq!(text.lines().count(), rows.len() + 1);
    let moved: Vec<f64> = rows
        .iter()
        .filter(|r| r["abs"].as_f64().unwrap() > 0.5)
        .map(|r| r["x"].as_f64().unwrap())
        .collect();
    assert_eq!(moved, vec![1.5625, 1.6875, 1.8125, 1.9375]);
}

#[test]
fn csv_is_rejected_for_json_commands() {
    assert_eq!(code(&run(&with_example("ltm", &["--output", "csv"]))), 2);
}

#[test]
fn rescale_and_eigencheck() {
    let o = run(&["rescale", "--set", "0,1", "--spectrum", "0,1/2", "--d", "3"]);
    assert_eq!(code(&o), 0);
    let v = json_out(&o);
    assert_eq!(v["set"], json!([0, 3]));
    assert_eq!(v["spectrum"], json!(["0", "1/6"]));
    let back = json_out(&run(&["recover", "--input", &v.to_string()]));
    assert_eq!(back["spectrum"], json!(["0", "1/6"]));
    let e = run(&with_example("eigencheck", &[]));
    assert_eq!(code(&e), 0);
    assert_eq!(json_out(&e)["eigenvectors"].as_array().unwrap().len(), 4);
}

#[test]
fn raw_spectra_round_trip() {
    let o = run(&["ltm", "--set", "0,1", "--spectrum", "raw:0,3/2"]);
    assert_eq!(code(&o), 0);
    let v = json_out(&o);
    assert_eq!(v["raw"], json!(true));
    assert_eq!(v["spectrum"], json!(["0", "3/2"]));
    assert_eq!(code(&run(&["verify", "--input", &v.to_string()])), 0);
    let g = json_out(&run(&["group", "--input", &v.to_string(), "--t", "1/3"]));
    assert_eq!(g["raw"], json!(true));
}
