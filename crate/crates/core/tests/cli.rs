use grtkit::cli::{run, CACHE_ENV};
use serde_json::Value;

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["grtkit"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = invoke(args);
    assert_eq!(code, 0, "{args:?}: {err}");
    serde_json::from_str(&out).unwrap()
}

fn schema(command: &str) -> jsonschema::Validator {
    let path = format!("{}/schemas/{command}.schema.json", env!("CARGO_MANIFEST_DIR"));
    let s: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&s).unwrap()
}

fn assert_valid(v: &Value) {
    let cmd = v["command"].as_str().unwrap();
    let val = schema(cmd);
    let errors: Vec<String> = val.iter_errors(v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{cmd}: {errors:?}");
}

#[test]
fn grt_dims_rows() {
    let v = json(&["grt-dims", "--max-weight", "3", "--format", "json"]);
    assert_valid(&v);
    let dims: Vec<u64> = v["rows"].as_array().unwrap().iter().map(|r| r["dim_grt"].as_u64().unwrap()).collect();
    assert_eq!(dims, [0, 0, 1]);
}

#[test]
fn dk_basis_dimension() {
    let v = json(&["dk-basis", "--points", "3", "--weight", "1"]);
    assert_valid(&v);
    assert_eq!(v["rows"][0]["dimension"], 3);
    assert_eq!(v["rows"][0]["representatives"], serde_json::json!(["t12", "t13", "t23"]));
}

#[test]
fn every_command_matches_its_schema() {
    let jobs: &[&[&str]] = &[
        &["freelie-dims", "--points", "2", "--max-weight", "5"],
        &["homology", "--complex", "ce", "--points", "2", "--max-weight", "2"],
        &["homology", "--complex", "bar", "--points", "3", "--max-weight", "2", "--min-degree", "-1"],
        &["defcomplex", "--arity-cap", "3", "--max-weight", "2"],
        &["grt-class-test", "--control"],
        &["check", "--suite", "dsquared", "--arity-cap", "4"],
        &["check", "--suite", "jacobi"],
        &["check", "--suite", "commutation", "--points", "4"],
        &["check", "--suite", "shuffles", "--max-weight", "3"],
    ];
    for args in jobs {
        let v = json(args);
        assert_valid(&v);
        assert_eq!(v["status"], "ok", "{args:?}");
    }
}

#[test]
fn control_fails_at_arity_four() {
    let v = json(&["grt-class-test", "--control"]);
    let row = &v["rows"][0];
    assert_eq!(row["cocycle"], false);
    assert_eq!(row["witness"]["arity"], 4);
}

#[test]
fn usage_errors_exit_two() {
    for args in [&["bogus"][..], &["grt-dims", "--max-weight", "0"], &["grt-dims", "--nope"], &["homology", "--points", "2"], &["grt-dims", "--format", "xml"]] {
        let (code, out, err) = invoke(args);
        assert_eq!(code, 2, "{args:?}");
        assert!(out.is_empty());
        assert!(err.contains("Usage"), "{err}");
    }
    let (code, out, _) = invoke(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("grt-dims"));
}

#[test]
fn computation_errors_exit_one() {
    // weight 2 has no grt element
    let (code, _, err) = invoke(&["grt-class-test", "--weight", "2"]);
    assert_eq!(code, 1);
    assert!(err.contains("no grt element"));
    let (code, _, _) = invoke(&["grt-class-test", "--weight", "3", "--arity-cap", "3"]);
    assert_eq!(code, 1);
}

#[test]
fn output_is_independent_of_parallelism() {
    for args in [&["homology", "--complex", "bar", "--points", "3", "--max-weight", "3"][..], &["grt-dims", "--max-weight", "4"], &["defcomplex", "--arity-cap", "4"]] {
        let mut a = args.to_vec();
        a.extend(["--parallelism", "1"]);
        let one = invoke(&a);
        a.pop();
        a.push("4");
        let four = invoke(&a);
        assert_eq!(one, four, "{args:?}");
    }
}

#[test]
fn csv_and_text_formats() {
    let (code, out, _) = invoke(&["freelie-dims", "--points", "2", "--max-weight", "3", "--format", "csv"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "agree,alphabet,lyndon_count,weight,witt_dimension");
    assert_eq!(lines[3], "true,2,2,3,2");
    let (_, out, _) = invoke(&["dk-basis", "--points", "3", "--weight", "2", "--format", "text"]);
    assert!(out.starts_with("# dk-basis (ok)\n"));
    assert!(out.contains("dimension=1"));
}

#[test]
fn dk_basis_cache_round_trip() {
    let dir = std::env::temp_dir().join(format!("grtkit-cache-{}", std::process::id()));
    std::env::set_var(CACHE_ENV, &dir);
    let first = invoke(&["dk-basis", "--points", "4", "--weight", "2"]);
    let file = dir.join("dk_basis_4_2.json");
    assert!(file.exists());
    let cached = invoke(&["dk-basis", "--points", "4", "--weight", "2"]);
    std::env::remove_var(CACHE_ENV);
    assert_eq!(first, cached);
    let v: Value = serde_json::from_str(&first.1).unwrap();
    assert_eq!(v["rows"][0]["dimension"], 4);
    std::fs::remove_dir_all(dir).unwrap();
}
