//! Black-box tests against the compiled binary.

use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qpebt"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write_tmp(dir: &tempfile::TempDir, name: &str, contents: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, contents).unwrap();
    path.to_str().unwrap().to_string()
}

const IDENTITY_2: &str =
    r#"{"d_in":2,"d_out":2,"kraus":[{"rows":2,"cols":2,"data":[[1,0],[0,0],[0,0],[1,0]]}]}"#;

#[test]
fn choi_of_identity_is_max_entangled_projector() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_tmp(&dir, "id.json", IDENTITY_2);
    let v = stdout_json(&run(&["choi", &file]));
    assert_eq!(v["d"], 2);
    let data = v["matrix"]["data"].as_array().unwrap();
    // P+ for d = 2: entries 1/2 at the four corners of the |00>,|11> block.
    for (idx, entry) in data.iter().enumerate() {
        let (r, c) = (idx / 4, idx % 4);
        let expect = if (r == 0 || r == 3) && (c == 0 || c == 3) {
            0.5
        } else {
            0.0
        };
        assert!((entry[0].as_f64().unwrap() - expect).abs() < 1e-12);
        assert!(entry[1].as_f64().unwrap().abs() < 1e-12);
    }
}

#[test]
fn choi_kraus_choi_is_a_fixed_point() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_tmp(&dir, "id.json", IDENTITY_2);
    let c1 = run(&["choi", &file]);
    let choi_file = write_tmp(&dir, "c.json", &String::from_utf8_lossy(&c1.stdout));
    let k = run(&["kraus", &choi_file]);
    let kraus_file = write_tmp(&dir, "k.json", &String::from_utf8_lossy(&k.stdout));
    let c2 = run(&["choi", &kraus_file]);
    let a: Value = stdout_json(&c1);
    let b: Value = stdout_json(&c2);
    let da = a["matrix"]["data"].as_array().unwrap();
    let db = b["matrix"]["data"].as_array().unwrap();
    for (x, y) in da.iter().zip(db) {
        assert!((x[0].as_f64().unwrap() - y[0].as_f64().unwrap()).abs() < 1e-10);
        assert!((x[1].as_f64().unwrap() - y[1].as_f64().unwrap()).abs() < 1e-10);
    }
}

#[test]
fn malformed_json_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_tmp(&dir, "bad.json", "{not json");
    let out = run(&["choi", &file]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn non_psd_choi_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    // Hermitian, trace one, correct marginal shape — but indefinite.
    let bad = r#"{"d":2,"matrix":{"rows":4,"cols":4,"data":[
        [0.5,0],[0,0],[0,0],[0.5,0],
        [0,0],[0.25,0],[0,0],[0,0],
        [0,0],[0,0],[-0.25,0],[0,0],
        [0.5,0],[0,0],[0,0],[0.5,0]]}}"#;
    let file = write_tmp(&dir, "bad-choi.json", bad);
    let out = run(&["kraus", &file]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_file_exits_2() {
    let out = run(&["choi", "/definitely/not/here.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sn_of_product_state_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let mut data = vec!["[0,0]".to_string(); 16];
    data[0] = "[1,0]".to_string();
    let rho = format!(
        r#"{{"dims":[2,2],"matrix":{{"rows":4,"cols":4,"data":[{}]}}}}"#,
        data.join(",")
    );
    let file = write_tmp(&dir, "prod.json", &rho);
    let v = stdout_json(&run(&["sn", &file]));
    assert_eq!(v["lower"], 1);
    assert_eq!(v["upper"], 1);
    assert_eq!(v["exact"], true);
}

#[test]
fn sn_accepts_bare_matrix_with_dims_flag() {
    let dir = tempfile::tempdir().unwrap();
    let mut data = vec!["[0,0]".to_string(); 16];
    data[0] = "[1,0]".to_string();
    let m = format!(r#"{{"rows":4,"cols":4,"data":[{}]}}"#, data.join(","));
    let file = write_tmp(&dir, "m.json", &m);
    let v = stdout_json(&run(&["sn", &file, "--dims", "2,2"]));
    assert_eq!(v["upper"], 1);
}

#[test]
fn classify_identity_channel() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_tmp(&dir, "id.json", IDENTITY_2);
    let v = stdout_json(&run(&["classify", &file, "--r", "1"]));
    assert_eq!(v["verdict"], "certified_non_member");
    let v = stdout_json(&run(&["classify", &file, "--r", "2"]));
    assert_eq!(v["verdict"], "certified_member");
}

#[test]
fn example_isotropic_reports_schmidt_number_two() {
    let v = stdout_json(&run(&["example", "isotropic", "--d", "3", "--f", "0.5"]));
    assert_eq!(v["result"]["schmidt_number"], 2);
    assert_eq!(v["result"]["bounds"]["lower"], 2);
    assert_eq!(v["tolerances"]["rank_rel"], 1e-10);
    assert!(v["input_digest"].as_str().unwrap().len() == 64);
}

#[test]
fn example_w_reduction_is_two_two() {
    let v = stdout_json(&run(&["example", "w"]));
    assert_eq!(v["result"]["reduced_23_bounds"]["lower"], 2);
    assert_eq!(v["result"]["reduced_23_bounds"]["upper"], 2);
    assert_eq!(v["result"]["slice_ranks"], serde_json::json!([2, 1]));
}

#[test]
fn example_ghz_reduction_is_separable() {
    let v = stdout_json(&run(&["example", "ghz", "--cut", "1"]));
    assert_eq!(v["result"]["reduced_23_bounds"]["upper"], 1);
    assert_eq!(v["result"]["slice_ranks"], serde_json::json!([1, 1]));
}

#[test]
fn mixed_unitary_detection_follows_witness_rule() {
    let v = stdout_json(&run(&[
        "example",
        "mixed-unitary",
        "--d",
        "2",
        "--p",
        "0.7,0.1,0.1,0.1",
        "--mu",
        "1",
    ]));
    assert_eq!(v["result"]["detected"], true);
    assert_eq!(v["result"]["channel_bounds"]["lower"], 2);

    let v = stdout_json(&run(&[
        "example",
        "mixed-unitary",
        "--d",
        "2",
        "--p",
        "0.25,0.25,0.25,0.25",
    ]));
    assert_eq!(v["result"]["detected"], false);
    assert_eq!(v["result"]["channel_bounds"]["upper"], 1);
}

#[test]
fn identical_input_gives_identical_output() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_tmp(&dir, "id.json", IDENTITY_2);
    let a = run(&["choi", &file]);
    let b = run(&["choi", &file]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn env_var_tolerances_are_honored() {
    let v: Value = {
        let out = bin()
            .args(["example", "isotropic", "--d", "2", "--f", "0.9"])
            .env("QPEBT_TOL_RANK", "1e-6")
            .env("QPEBT_TOL_PSD", "1e-7")
            .output()
            .unwrap();
        stdout_json(&out)
    };
    assert_eq!(v["tolerances"]["rank_rel"], 1e-6);
    assert_eq!(v["tolerances"]["psd_abs"], 1e-7);
}

#[test]
fn unknown_example_exits_2() {
    let out = run(&["example", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn batch_runs_lines_in_order() {
    let dir = tempfile::tempdir().unwrap();
    let id = write_tmp(&dir, "id.json", IDENTITY_2);
    let list = write_tmp(
        &dir,
        "batch.txt",
        &format!(
            "example isotropic --d 2 --f 0.9\n# comment\nchoi {id}\nexample w\n"
        ),
    );
    let out = run(&["batch", &list]);
    assert!(out.status.success());
    let lines: Vec<Value> = String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0]["command"][1], "isotropic");
    assert_eq!(lines[1]["command"][0], "choi");
    assert_eq!(lines[2]["command"][1], "w");
    assert_eq!(lines[0]["result"]["schmidt_number"], 2);
}
