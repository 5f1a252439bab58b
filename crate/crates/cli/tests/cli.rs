use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;

use rigid_cli::{execute_command, EXIT_INPUT, EXIT_NOT_RIGID, EXIT_OK};
use rigid_core::io::{parse_certificate, parse_problem, print_certificate, print_problem};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).to_path_buf()
}

fn data(name: &str) -> String {
    root().join("data").join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("rigid").chain(args.iter().copied());
    let code = execute_command(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn validator(name: &str) -> jsonschema::Validator {
    let dir = root().join("schemas");
    let mut opts = jsonschema::options();
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let schema: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        let uri = format!("json-schema:///{}", path.file_name().unwrap().to_string_lossy());
        opts.with_resource(uri, jsonschema::Resource::from_contents(schema).unwrap());
    }
    let main: Value = serde_json::from_str(&fs::read_to_string(dir.join(name)).unwrap()).unwrap();
    opts.build(&main).unwrap()
}

fn assert_valid(v: &jsonschema::Validator, text: &str) {
    let inst: Value = serde_json::from_str(text).unwrap_or_else(|e| panic!("not JSON ({}): {}", e, text));
    let errors: Vec<String> = v.iter_errors(&inst).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errors.is_empty(), "{:?}\n{}", errors, text);
}

#[test]
fn spec_examples() {
    assert_eq!(run(&["rig", &data("hypergeom.json")]), (EXIT_OK, "2\n".into(), String::new()));
    let (code, out, _) = run(&["reduce", &data("fourpoint.json")]);
    assert_eq!((code, out.trim()), (EXIT_NOT_RIGID, "NotRigid (rig=0)"));
    let (code, _, err) = run(&["mc", &data("hypergeom.json"), "--chi", "0/1"]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("chi = 1"), "{}", err);
    assert_eq!(run(&["rig", &data("kloosterman.json")]).1, "2\n");
}

#[test]
fn reduce_writes_a_replayable_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.json");
    let cert_s = cert.to_string_lossy().into_owned();
    for file in ["hypergeom.json", "kloosterman.json"] {
        let (code, out, _) = run(&["reduce", &data(file), "--cert", &cert_s]);
        assert_eq!(code, EXIT_OK, "{}", out);
        assert!(out.starts_with("Certified"));
        let (code, out, err) = run(&["replay", &cert_s]);
        assert_eq!(code, EXIT_OK, "{}{}", out, err);
        let text = fs::read_to_string(&cert).unwrap();
        assert_eq!(print_certificate(&parse_certificate(&text).unwrap()), text);
    }
    // a tampered step rank no longer replays
    let text = fs::read_to_string(&cert).unwrap();
    let mut v: Value = serde_json::from_str(&text).unwrap();
    let steps = v["steps"].as_array_mut().unwrap();
    let last = steps.len() - 1;
    steps[last]["rank"] = Value::from(5);
    fs::write(&cert, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    let (code, _, err) = run(&["replay", &cert_s]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("replay mismatch"), "{}", err);
}

#[test]
fn transforms_print_canonical_problems() {
    let twist = data("kummer_twist.json");
    for args in [
        vec!["fourier", &*data("kloosterman.json")].into_iter().map(String::from).collect::<Vec<_>>(),
        vec!["mc".into(), data("hypergeom.json"), "--chi".into(), "1/3".into()],
        vec!["twist".into(), data("hypergeom.json"), twist.clone()],
    ] {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let (code, out, err) = run(&args);
        assert_eq!(code, EXIT_OK, "{:?}: {}", args, err);
        let p = parse_problem(&out).unwrap();
        assert_eq!(print_problem(&p), out);
    }
}

#[test]
fn parse_errors_point_into_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\n  \"version\": 1,\n  \"N\": 2,\n  \"points\": [{\"loc\": \"0\", \"factors\": [{\"phi\": \"t^(-1\", \"reg\": []}]}]\n}\n").unwrap();
    let (code, _, err) = run(&["rig", &bad.to_string_lossy()]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("parse error at 4:"), "{}", err);
    fs::write(&bad, "{\"version\": 1, \"N\": 2, \"points\": [], \"extra\": 0}").unwrap();
    let (code, _, err) = run(&["rig", &bad.to_string_lossy()]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("extra"), "{}", err);
    assert_eq!(run(&["rig", "/nonexistent.json"]).0, EXIT_INPUT);
    assert_eq!(run(&["frobnicate"]).0, EXIT_INPUT);
}

#[test]
fn enumerate_streams_json_lines() {
    let (code, out, _) = run(&["enumerate", "--points", "0,1,inf", "--order", "2", "--rank", "1"]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<Value> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 4);
    assert!(lines.iter().all(|l| l["verdict"] == "certified"));
    let (_, out, _) = run(&["enumerate", "--points", "0,inf", "--phi", &data("phi.json"), "--order", "2", "--rank", "1"]);
    assert_eq!(out.lines().count(), 8);
}

#[test]
fn stokes_arcs_are_exact() {
    let (code, out, _) = run(&["stokes-arcs", &data("kloosterman.json"), "--point", "inf"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    let pairs = v["pairs"].as_array().unwrap();
    assert_eq!(pairs.len(), 2);
    assert_eq!(pairs[0]["boundary"], serde_json::json!(["-1/4", "1/4"]));
    assert_eq!(run(&["stokes-arcs", &data("kloosterman.json"), "--point", "5"]).0, EXIT_INPUT);
}

#[test]
fn json_outputs_match_the_schemas() {
    let reports = validator("report.schema.json");
    let problems = validator("problem.schema.json");
    assert!(!reports.is_valid(&serde_json::json!({ "rig": "2" })));
    assert!(!problems.is_valid(&serde_json::json!({ "version": 1, "N": 2, "points": [], "extra": 0 })));
    for f in ["hypergeom.json", "fourpoint.json", "kloosterman.json"] {
        assert_valid(&problems, &fs::read_to_string(data(f)).unwrap());
        assert_valid(&reports, &run(&["--json", "rig", &data(f)]).1);
        assert_valid(&reports, &run(&["--json", "reduce", &data(f)]).1);
    }
    assert_valid(&validator("twist.schema.json"), &fs::read_to_string(data("kummer_twist.json")).unwrap());
    assert_valid(&validator("phi.schema.json"), &fs::read_to_string(data("phi.json")).unwrap());
    assert_valid(&reports, &run(&["--json", "stokes-arcs", &data("kloosterman.json"), "--point", "inf"]).1);
    assert_valid(&problems, &run(&["fourier", &data("kloosterman.json")]).1);
    for line in run(&["enumerate", "--points", "0,1,inf", "--order", "3", "--rank", "1"]).1.lines() {
        assert_valid(&reports, line);
    }

    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("c.json").to_string_lossy().into_owned();
    run(&["reduce", &data("hypergeom.json"), "--cert", &cert]);
    assert_valid(&validator("certificate.schema.json"), &fs::read_to_string(&cert).unwrap());
    assert_valid(&reports, &run(&["--json", "replay", &cert]).1);
}

#[test]
fn reports_are_deterministic() {
    for args in [
        vec!["--json".to_string(), "reduce".into(), data("hypergeom.json")],
        vec![
            "enumerate".into(),
            "--points".into(),
            "0,1,-1,inf".into(),
            "--order".into(),
            "2".into(),
            "--rank".into(),
            "1".into(),
        ],
        vec!["fourier".into(), data("kloosterman.json")],
    ] {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        assert_eq!(run(&args), run(&args));
    }
}
