mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::{bin_path, p4_closed_form};
use serde_json::Value;

fn hardy_sim(args: &[&str]) -> Output {
    Command::new(bin_path()).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("valid json")
}

fn f(v: &Value) -> f64 {
    v.as_f64().expect("number")
}

#[test]
fn hardy_defaults_exit_zero() {
    let o = hardy_sim(&["hardy"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let doc = json(&o);
    assert_eq!(doc["tool"], "hardy-sim");
    assert_eq!(doc["command"], "hardy");
    assert_eq!(doc["verdict"], true);
    assert!((f(&doc["witness"]["p4"]) - 1.1278e-2).abs() < 1e-6);
    assert!((f(&doc["witness"]["p4"]) - p4_closed_form()).abs() < 1e-10);
    let disc = f(&doc["trace"]["discarded_probability"]);
    assert!((disc - (1.0 - 0.75 * (-2f64).exp())).abs() < 1e-10);
}

#[test]
fn verdict_false_exit_one() {
    assert_eq!(code(&hardy_sim(&["hardy", "--tol", "1"])), 1);
}

#[test]
fn config_errors_exit_two_and_write_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("doc.json");
    let out_s = out.to_str().unwrap();
    for args in [
        vec!["hardy", "--alpha", "1.5", "--mode", "full", "--out", out_s],
        vec!["experiment", "5", "--out", out_s],
        vec!["sweep", "--axis", "phi", "--values", "", "--out", out_s],
        vec!["sweep", "--axis", "cutoff", "--values", "default+x", "--out", out_s],
        vec!["sample", "--shots", "0", "--seed", "1", "--out", out_s],
        vec!["hardy", "--tol", "-1", "--out", out_s],
        vec!["hardy", "--format", "xml", "--out", out_s],
    ] {
        let o = hardy_sim(&args);
        assert_eq!(code(&o), 2, "{args:?}");
        assert!(!o.stderr.is_empty());
        assert!(!out.exists(), "{args:?} wrote output");
    }
    let missing = dir.path().join("nope").join("doc.json");
    let o = hardy_sim(&["hardy", "--out", missing.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn reruns_are_byte_identical() {
    for args in [
        vec!["hardy", "--phi", "0.3"],
        vec!["hardy", "--mode", "ideal", "--format", "csv"],
        vec!["experiment", "2"],
        vec!["sweep", "--axis", "phi", "--values", "0,1,2"],
        vec!["sample", "--shots", "2000", "--seed", "11"],
    ] {
        let a = hardy_sim(&args);
        let b = hardy_sim(&args);
        assert_eq!(code(&a), code(&b));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn params_echo_reproduces_document() {
    let first = hardy_sim(&["hardy", "--phi", "0.7", "--alpha", "3.4", "--mode", "ideal", "--tol", "1e-9"]);
    let doc = json(&first);
    let p = &doc["params"];
    // Echo values are written with 17 significant digits, so they parse back
    // to the same doubles.
    let echo: Vec<String> = ["alpha", "phi", "tail_threshold", "prune_eps", "tol"]
        .iter()
        .map(|k| p[*k].to_string())
        .collect();
    let mode = p["mode"].as_str().unwrap().to_string();
    let pad = p["cutoff_pad"].to_string();
    let args = [
        "hardy",
        "--alpha",
        &echo[0],
        "--phi",
        &echo[1],
        "--tail",
        &echo[2],
        "--prune-eps",
        &echo[3],
        "--tol",
        &echo[4],
        "--mode",
        &mode,
        "--cutoff-pad",
        &pad,
    ];
    assert_eq!(hardy_sim(&args).stdout, first.stdout);

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("params.toml");
    let toml = format!(
        "alpha = {}\nphi = {}\ntail_threshold = {}\nprune_eps = {}\ntol = {}\nmode = \"{mode}\"\ncutoff_pad = {pad}\n",
        echo[0], echo[1], echo[2], echo[3], echo[4]
    );
    std::fs::write(&cfg, toml).unwrap();
    let via_config = hardy_sim(&["hardy", "--config", cfg.to_str().unwrap()]);
    assert_eq!(via_config.stdout, first.stdout);
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    (header, lines.map(|l| l.split(',').map(String::from).collect()).collect())
}

#[test]
fn experiment_csv_and_json_agree() {
    let csv = hardy_sim(&["experiment", "4", "--format", "csv"]);
    let js = hardy_sim(&["experiment", "4"]);
    assert_eq!(code(&csv), 0);
    let (header, rows) = csv_rows(std::str::from_utf8(&csv.stdout).unwrap());
    assert_eq!(header.join(","), "c1,d1,c2,d2,probability");
    let doc = json(&js);
    let jrows = doc["table"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), jrows.len());
    let mut prev: Option<Vec<u32>> = None;
    for (r, j) in rows.iter().zip(jrows) {
        let counts: Vec<u32> = r[..4].iter().map(|x| x.parse().unwrap()).collect();
        if let Some(p) = &prev {
            assert!(p < &counts, "rows not sorted");
        }
        let j = j.as_array().unwrap();
        for i in 0..4 {
            assert_eq!(j[i].as_u64().unwrap() as u32, counts[i]);
        }
        let from_csv: f64 = r[4].parse().unwrap();
        assert_eq!(from_csv.to_bits(), f(&j[4]).to_bits());
        prev = Some(counts);
    }
    // The JSON rendering uses the same decimal text as the CSV.
    let raw = std::str::from_utf8(&js.stdout).unwrap();
    assert!(raw.contains(&format!("[0,1,0,1,{}]", rows.iter().find(|r| r[..4] == ["0", "1", "0", "1"]).unwrap()[4])));
}

#[test]
fn hardy_csv_and_json_agree() {
    let csv = hardy_sim(&["hardy", "--format", "csv"]);
    let js = json(&hardy_sim(&["hardy"]));
    let (header, rows) = csv_rows(std::str::from_utf8(&csv.stdout).unwrap());
    assert_eq!(header, ["quantity", "value"]);
    let get = |k: &str| rows.iter().find(|r| r[0] == k).unwrap()[1].clone();
    for k in ["p_joint_nn", "p_zero_hn", "p_zero_nh", "p4"] {
        let a: f64 = get(k).parse().unwrap();
        assert_eq!(a.to_bits(), f(&js["witness"][k]).to_bits(), "{k}");
    }
    assert_eq!(get("verdict"), "true");
}

#[test]
fn experiment_one_has_zero_joint_detection() {
    let doc = json(&hardy_sim(&["experiment", "1"]));
    let coarse = doc["coarse"].as_array().unwrap();
    let nn = coarse.iter().find(|r| r["alice"] == "1+" && r["bob"] == "1+").unwrap();
    assert_eq!(f(&nn["probability"]), 0.0);
}

#[test]
fn phi_sweep_is_flat() {
    let o = hardy_sim(&["sweep", "--axis", "phi", "--grid", "16"]);
    assert_eq!(code(&o), 0);
    let doc = json(&o);
    assert_eq!(doc["points"].as_array().unwrap().len(), 16);
    assert!(f(&doc["summary"]["max_tv_exp4"]) <= 1e-10);
}

#[test]
fn cutoff_sweep_converged() {
    let o = hardy_sim(&["sweep", "--axis", "cutoff", "--values", "default,default+5", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let (header, rows) = csv_rows(std::str::from_utf8(&o.stdout).unwrap());
    assert_eq!(header[0], "value");
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[2][0], "max");
    let max_abs: f64 = rows[2][7].parse().unwrap();
    assert!(max_abs <= 1e-8);
}

#[test]
fn sampling_hits_the_hardy_event() {
    let o = hardy_sim(&["sample", "--experiment", "4", "--shots", "100000", "--seed", "7"]);
    assert_eq!(code(&o), 0);
    let doc = json(&o);
    let ev = &doc["hardy_event"];
    let p = p4_closed_form();
    let sigma = (p * (1.0 - p) / 1e5).sqrt();
    assert!((f(&ev["frequency"]) - p).abs() < 5.0 * sigma);
    assert!(f(&ev["wilson_low"]) < f(&ev["frequency"]) && f(&ev["frequency"]) < f(&ev["wilson_high"]));
    let total: u64 = doc["rows"].as_array().unwrap().iter().map(|r| r[4].as_u64().unwrap()).sum();
    assert_eq!(total, 100000);
}

#[test]
fn single_shot_gives_single_row() {
    let o = hardy_sim(&["sample", "--shots", "1", "--seed", "3", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().nth(1).unwrap().contains(",1,1.0000000000000000e0,"));
}

#[test]
fn out_path_receives_document() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("hardy.json");
    let o = hardy_sim(&["hardy", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["verdict"], true);
}

#[test]
fn circuit_subcommand_runs_toml() {
    let file = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/circuits/mach_zehnder.toml");
    let o = hardy_sim(&["circuit", file.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let (header, rows) = csv_rows(std::str::from_utf8(&o.stdout).unwrap());
    assert_eq!(header, ["a", "b", "probability"]);
    let p10: f64 = rows.iter().find(|r| r[0] == "1" && r[1] == "0").unwrap()[2].parse().unwrap();
    // Mach-Zehnder with a π/3 phase: P(a) = sin²(π/6).
    assert!((p10 - 0.25).abs() < 1e-14);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "name = \"bad\"\n[[steps]]\nkind = \"mirror\"\nmode = \"x\"\n").unwrap();
    assert_eq!(code(&hardy_sim(&["circuit", bad.to_str().unwrap()])), 2);
}

#[test]
fn impossible_condition_is_numerical_error() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("impossible.toml");
    std::fs::write(
        &file,
        "name = \"hom\"\n\
         [[steps]]\nkind = \"add_fock\"\nlabel = \"a\"\nn = 1\n\
         [[steps]]\nkind = \"add_fock\"\nlabel = \"b\"\nn = 1\n\
         [[steps]]\nkind = \"beam_splitter\"\na = \"a\"\nb = \"b\"\nt = 0.7071067811865476\n\
         [[steps]]\nkind = \"condition\"\nmode = \"a\"\nn = 1\n",
    )
    .unwrap();
    let out = dir.path().join("x.json");
    let o = hardy_sim(&["circuit", file.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!out.exists());
}
