use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tranche-lab")).args(args).env("TRANCHE_LAB_THREADS", "1").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("tranche-lab-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn specs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/specs")
}

#[test]
fn build_warsaw_emits_a_cloud_with_one_tranche() {
    let o = lab(&["build", "warsaw", "--samples", "20000"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["label"], "warsaw");
    assert_eq!(v["points"].as_array().unwrap().len(), 20_000);
    assert_eq!(v["meta"]["tranches"].as_array().unwrap().len(), 1);
    // the schema the renderer reads
    for key in ["label", "mesh", "dim", "points", "meta"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    for key in ["base", "tags", "tag_names"] {
        assert!(v["meta"].get(key).is_some(), "{key}");
    }
    assert_eq!(v["meta"]["tag_names"], serde_json::json!(["quasi-arc", "base", "limit"]));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    for args in [
        &["build", "star4_route", "--samples", "4000"][..],
        &["dynamics", "entropy", "--n", "5", "--eps", "0.3", "--seed", "11"],
        &["spec", "reduce", specs().join("comb.json").to_str().unwrap()],
    ] {
        let (a, b) = (lab(args), lab(args));
        assert!(a.status.success(), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn unknown_names_are_usage_errors() {
    for args in [&["build", "moon"][..], &["verify", "nope"], &["figure", "fig12", "--out-dir", "x"], &["frobnicate"]] {
        assert_eq!(lab(args).status.code(), Some(2), "{args:?}");
    }
    let dir = scratch("cfg");
    let cfg = dir.join("bad.conf");
    std::fs::write(&cfg, "colour = red\n").unwrap();
    let o = lab(&["--config", cfg.to_str().unwrap(), "build", "warsaw"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown key"));
}

#[test]
fn config_values_apply_and_flags_win() {
    let dir = scratch("cfg2");
    let cfg = dir.join("lab.conf");
    std::fs::write(&cfg, "# sweep defaults\nseed = 11\nsamples = 3000\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let from_file = lab(&["--config", cfg, "dynamics", "entropy", "--n", "5", "--eps", "0.3"]);
    let from_flag = lab(&["dynamics", "entropy", "--n", "5", "--eps", "0.3", "--seed", "11"]);
    assert_eq!(from_file.stdout, from_flag.stdout);
    let v = json(&lab(&["--config", cfg, "build", "warsaw", "--samples", "5000"]));
    assert_eq!(v["points"].as_array().unwrap().len(), 5000);
    let v = json(&lab(&["--config", cfg, "build", "warsaw"]));
    assert_eq!(v["points"].as_array().unwrap().len(), 3000);
}

#[test]
fn hausdorff_reads_cloud_files() {
    let dir = scratch("hd");
    let (a, b) = (dir.join("a.json"), dir.join("b.json"));
    assert!(lab(&["build", "X_n", "--dim", "1", "--out", a.to_str().unwrap()]).status.success());
    assert!(lab(&["build", "X_n", "--dim", "2", "--out", b.to_str().unwrap()]).status.success());
    let v = json(&lab(&["hausdorff", a.to_str().unwrap(), a.to_str().unwrap()]));
    assert_eq!(v["distance"], 0.0);
    let v = json(&lab(&["hausdorff", a.to_str().unwrap(), b.to_str().unwrap()]));
    let d = v["distance"].as_f64().unwrap();
    assert!(d > 0.0 && d <= 0.125 + 0.1, "{d}");
    let o = lab(&["hausdorff", a.to_str().unwrap(), "missing.json"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_symbolic_passes_with_a_json_report() {
    let o = lab(&["verify", "symbolic"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["suite"], "symbolic");
    assert_eq!(v["status"], "pass");
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["status"] == "pass" && c.get("residual").is_some() && c.get("tolerance").is_some()));
}

#[test]
fn spec_commands_report_and_fail_on_violations() {
    let o = lab(&["spec", "validate", specs().join("partial_overlap.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(v["valid"], false);
    assert_eq!(v["violations"][0]["condition"], "iv");
    let v = json(&lab(&["spec", "quotient", specs().join("comb.json").to_str().unwrap()]));
    assert_eq!((v["betti1"].as_u64(), v["tranches"].as_u64()), (Some(3), Some(1)));
    let v = json(&lab(&["spec", "depth", specs().join("two_chain.json").to_str().unwrap()]));
    assert_eq!(v["depth"], 2);
    let dir = scratch("spec");
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{\"graph\": 3}").unwrap();
    assert_eq!(lab(&["spec", "validate", bad.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn figures_write_the_documented_csvs() {
    let dir = scratch("fig");
    let d = dir.to_str().unwrap();
    let cases: [(&str, &[(&str, &str)]); 5] = [
        ("warsaw", &[("warsaw.csv", "x0,x1,tag"), ("warsaw_quotient.csv", "base,tag")]),
        ("A-projections", &[("A0.csv", "x0,x1,x2,tag"), ("A1.csv", "x0,x1,x2,tag"), ("A2.csv", "x0,x1,x2,tag")]),
        ("X2-projection", &[("X2.csv", "x0,x1,x2")]),
        ("X1-depth", &[("X1_depth.csv", "x0,x1,x2,tag")]),
        ("comb", &[("comb_X1.csv", "x0,x1,tag"), ("comb_X.csv", "x0,x1,x2,tag")]),
    ];
    for (name, files) in cases {
        let o = lab(&["figure", name, "--out-dir", d, "--samples", "4000"]);
        assert!(o.status.success(), "{name}: {}", String::from_utf8_lossy(&o.stderr));
        for (file, header) in files {
            let text = std::fs::read_to_string(dir.join(file)).unwrap();
            let mut lines = text.lines();
            assert_eq!(lines.next(), Some(*header), "{file}");
            let width = header.split(',').count();
            assert!(lines.all(|l| l.split(',').count() == width), "{file}");
        }
    }
    let q = std::fs::read_to_string(dir.join("warsaw_quotient.csv")).unwrap();
    assert!(q.lines().skip(1).any(|l| l.ends_with(",limit")) && q.lines().skip(1).any(|l| l.ends_with(",quasi-arc")));
}

#[test]
fn dynamics_commands() {
    let v = json(&lab(&["dynamics", "entropy", "--n", "8", "--eps", "0.4"]));
    assert!(v["bound"].as_f64().unwrap() >= 2f64.ln() - 0.05);
    let o = lab(&["dynamics", "exact", "--tranche-level", "1"]);
    assert!(o.status.success());
    assert_eq!(json(&o)["witness"]["n"], 1);
    // no witness within zero shifts is a failed check
    let o = lab(&["dynamics", "exact", "--tranche-level", "1", "--max-n", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["witness"]["n"], Value::Null);
    assert_eq!(lab(&["dynamics", "exact", "--tranche-level", "0"]).status.code(), Some(2));
    assert_eq!(lab(&["dynamics", "entropy", "--n", "0", "--eps", "0.4"]).status.code(), Some(1));
}
