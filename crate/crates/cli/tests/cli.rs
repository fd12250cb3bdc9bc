use std::path::PathBuf;

use agv_cli::run_with;
use serde_json::Value;

fn corpus() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

/// Resolves corpus-relative arguments and runs the CLI in process.
fn agv(args: &[&str]) -> (i32, String, String) {
    let dir = corpus();
    let mut argv = vec!["agv".to_string()];
    for a in args {
        let p = dir.join(a);
        if !a.starts_with('-') && (p.exists() || a.ends_with(".agv")) {
            argv.push(p.display().to_string());
        } else {
            argv.push(a.to_string());
        }
    }
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn exit_code_matrix() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/exit_codes.json")).unwrap();
    let rows: Vec<Value> = serde_json::from_str(&text).unwrap();
    let mut wrong = Vec::new();
    for row in &rows {
        let args: Vec<&str> = row["args"].as_array().unwrap().iter().map(|a| a.as_str().unwrap()).collect();
        let want = row["exit"].as_i64().unwrap() as i32;
        let (got, _, err) = agv(&args);
        if got != want {
            wrong.push(format!("agv {}: expected {want}, got {got}\n{err}", args.join(" ")));
        }
    }
    assert!(wrong.is_empty(), "{}", wrong.join("\n"));
}

#[test]
fn layered_proof_reports_two_layers() {
    let (code, out, _) = agv(&["verify", "qfcs", "--root", "FCS.impl"]);
    assert_eq!(code, 0);
    assert!(out.contains("layer FCS.impl [FCS]: passed"), "{out}");
    assert!(out.contains("layer FCC.impl [fcc1, fcc2, fcc3, fcc4]: passed"), "{out}");
}

#[test]
fn realizability_witness_is_printed() {
    let (code, out, _) = agv(&["realizability", "qfcs/cases/osas_original.agv", "--component", "OSAS"]);
    assert_eq!(code, 1);
    assert!(out.contains("unrealizability witness:"), "{out}");
    assert!(out.contains("latched_failed: step0=true"), "{out}");
    assert!(out.contains("ccdl_failed:    step0=true"), "{out}");
}

#[test]
fn load_errors_go_to_stderr_with_positions() {
    let dir = std::env::temp_dir().join(format!("agv-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.agv");
    std::fs::write(&bad, "component C\n  out y : int;\n  guarantee \"g\" : y > z;\nend\n").unwrap();
    let (code, out, err) = agv(&["verify", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("bad.agv:3:"), "{err}");
    let (code, _, err) = agv(&["parse", bad.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    std::fs::write(&bad, "component C out y : int end end\n").unwrap();
    let (code, _, err) = agv(&["parse", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("bad.agv:1:"), "{err}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn parse_output_parses_again() {
    let (code, out, _) = agv(&["parse", "qfcs"]);
    assert_eq!(code, 0);
    let (file, diags) = agv_core::lang::parse_file(&out);
    assert!(diags.is_empty(), "{diags:?}");
    assert_eq!(agv_core::lang::file_to_string(&file), out);
}

fn check_obligation(o: &Value) {
    for key in ["name", "kind", "verdict", "provenance", "antecedent"] {
        assert!(!o[key].is_null(), "missing {key} in {o}");
    }
    assert!(o["time_ms"].is_u64());
    let verdict = o["verdict"].as_str().unwrap();
    let tags = ["proved", "falsified", "consistent", "inconsistent", "unrealizable", "no_witness", "unknown"];
    assert!(tags.contains(&verdict), "{verdict}");
    assert_eq!(o["k"].is_u64(), verdict == "proved");
    let has_trace = ["falsified", "consistent", "unrealizable"].contains(&verdict);
    assert_eq!(o.get("trace").is_some(), has_trace, "{o}");
    if let Some(t) = o.get("trace") {
        let len = t["length"].as_u64().unwrap() as usize;
        for v in t["variables"].as_array().unwrap() {
            assert!(["bool", "int", "real"].contains(&v["type"].as_str().unwrap()), "{v}");
            assert_eq!(v["values"].as_array().unwrap().len(), len);
        }
    }
}

#[test]
fn json_reports_follow_the_schema() {
    let text = std::fs::read_to_string(corpus().join("golden.json")).unwrap();
    let cases: Vec<Value> = serde_json::from_str(&text).unwrap();
    for case in &cases {
        let sub = case["analysis"].as_str().unwrap();
        let mut args = vec![sub.to_string()];
        args.extend(case["files"].as_array().unwrap().iter().map(|f| f.as_str().unwrap().to_string()));
        args.push(if sub == "verify" { "--root" } else { "--component" }.to_string());
        args.push(case["target"].as_str().unwrap().to_string());
        if let Some(d) = case["depth"].as_u64() {
            args.extend(["--depth".to_string(), d.to_string()]);
        }
        args.extend(["--format".to_string(), "json".to_string()]);
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let (code, out, err) = agv(&refs);
        let v: Value = serde_json::from_str(&out).unwrap_or_else(|e| panic!("{}: {e}\n{out}\n{err}", case["name"]));
        assert_eq!(v["status"], case["status"], "{}", case["name"]);
        let want = match case["status"].as_str().unwrap() {
            "passed" => 0,
            "failed" => 1,
            _ => 3,
        };
        assert_eq!(code, want, "{}", case["name"]);
        for l in v["layers"].as_array().unwrap() {
            for key in ["implementation", "instances", "order", "cyclic", "status", "sound"] {
                assert!(!l[key].is_null(), "missing {key}");
            }
            l["obligations"].as_array().unwrap().iter().for_each(check_obligation);
        }
        v["obligations"].as_array().unwrap().iter().for_each(check_obligation);
        assert!(v["lints"].as_array().unwrap().is_empty());
    }
}
