use serde_json::Value;
use vhk_cli::{run, Output};

fn vhk(args: &[&str]) -> Output {
    run(std::iter::once("vhk").chain(args.iter().copied()))
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn twist1_spec() -> std::path::PathBuf {
    let path = std::env::temp_dir().join(format!("vhk-cli-twist1-{}.json", std::process::id()));
    std::fs::write(
        &path,
        r#"{"generators":["x","y"],"relator":"XYXyxyxYXYxyxy","longitude":"yxyXYXYYXYXyxyxx","meridian":"x","family":{"name":"twist","n":1}}"#,
    )
    .unwrap();
    path
}

#[test]
fn certify_three_fold() {
    let out = vhk(&["certify", "--family", "twist", "--n", "1", "--cover", "3"]);
    assert_eq!(out.code, 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert_eq!(r["overall"]["certified"], true);
    assert_eq!(r["schema"], 1);
}

#[test]
fn certify_five_fold_text() {
    let out = vhk(&["certify", "--n", "1", "--cover", "5", "--format", "text"]);
    assert_eq!(out.code, 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("[PASS] side_b: Diskbusting"));
    assert!(text.contains("certified: true"));
}

#[test]
fn certify_withheld_is_negative() {
    let out = vhk(&["certify", "--n", "1", "--cover", "3", "--withhold-side-b"]);
    assert_eq!(out.code, 1);
    assert_eq!(json(&out)["overall"]["certified"], false);
}

#[test]
fn certify_rejects_conflicting_sources() {
    let out = vhk(&["certify", "--n", "1", "--cover", "3", "--withhold-side-b", "--fixtures", "/tmp"]);
    assert_eq!(out.code, 2);
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
}

#[test]
fn certify_rejects_bad_cover_and_family() {
    assert_eq!(vhk(&["certify", "--n", "1", "--cover", "4"]).code, 2);
    assert_eq!(vhk(&["certify", "--family", "pretzel", "--n", "1", "--cover", "3"]).code, 2);
    assert_eq!(vhk(&["certify", "--n", "1", "--cover", "3", "--slope", "2/0"]).code, 2);
}

#[test]
fn certify_inline_side_b() {
    let out = vhk(&[
        "certify", "--n", "1", "--cover", "3", "--side-b-alphabet", "w1,w2,w4", "--side-b-words", "[W1][W2]",
    ]);
    assert_eq!(out.code, 1);
    assert_eq!(json(&out)["overall"]["certified"], false);
}

#[test]
fn dot_bundle_has_graphs() {
    let out = vhk(&["certify", "--n", "1", "--cover", "3", "--format", "dot-bundle"]);
    assert_eq!(out.code, 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.matches("graph whitehead {").count() >= 2);
}

#[test]
fn decide_commutator() {
    let out = vhk(&["decide", "--alphabet", "x,y", "--words", "xyXY"]);
    assert_eq!(out.code, 0);
    assert_eq!(json(&out)["verdict"], "Diskbusting");
}

#[test]
fn decide_required_diskbusting() {
    let out = vhk(&["decide", "--alphabet", "x,y", "--words", "xxy", "--require-diskbusting"]);
    assert_eq!(out.code, 1);
    assert_eq!(json(&out)["verdict"], "Separable");
    assert_eq!(vhk(&["decide", "--alphabet", "x,y", "--words", "xxy"]).code, 0);
}

#[test]
fn decide_bad_input() {
    let out = vhk(&["decide", "--alphabet", "x,y", "--words", "xqz"]);
    assert_eq!(out.code, 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    assert_eq!(vhk(&["decide", "--alphabet", "x,y"]).code, 2);
}

#[test]
fn lift_reports_upstairs_slope() {
    let spec = twist1_spec();
    let out = vhk(&["lift", "--spec", spec.to_str().unwrap(), "--cover", "3", "--slope", "6/1"]);
    assert_eq!(out.code, 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["kernel"].as_array().unwrap().len(), 4);
    assert_eq!(v["disk_words"].as_array().unwrap().len(), 4);
    assert_eq!(v["slope_upstairs"], "2/1");
    let bad = vhk(&["lift", "--spec", spec.to_str().unwrap(), "--cover", "3", "--slope", "5/1"]);
    assert_eq!(bad.code, 2);
    std::fs::remove_file(spec).ok();
}

#[test]
fn graph_formats() {
    let out = vhk(&["graph", "--alphabet", "x,y", "--words", "xy"]);
    assert_eq!(out.code, 0);
    let v = json(&out);
    assert_eq!(v["edges"].as_array().unwrap().len(), 2);
    assert_eq!(v["connected"], false);
    let dot = vhk(&["graph", "--alphabet", "x,y", "--words", "xyXY", "--format", "dot"]);
    assert!(String::from_utf8(dot.stdout).unwrap().starts_with("graph whitehead {"));
    assert_eq!(vhk(&["graph", "--alphabet", "x,y", "--words", "xy", "--format", "text"]).code, 2);
}

#[test]
fn moves_apply() {
    let out = vhk(&["moves", "--alphabet", "x,y", "--words", "xxy", "--move", "({x-,y+},x-)"]);
    assert_eq!(out.code, 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["length_before"], 3);
    assert_eq!(v["length_after"], 2);
    assert_eq!(vhk(&["moves", "--alphabet", "x,y", "--words", "xy", "--move", "({x+,x-},x+)"]).code, 2);
}

#[test]
fn fixtures_verify() {
    let out = vhk(&["fixtures"]);
    assert_eq!(out.code, 0);
    let v = json(&out);
    assert_eq!(v["all_match"], true);
    assert_eq!(v["fixtures"].as_array().unwrap().len(), 7);
}

#[test]
fn output_file_and_determinism() {
    let a = vhk(&["certify", "--n", "2", "--cover", "5"]);
    let b = vhk(&["certify", "--n", "2", "--cover", "5"]);
    assert_eq!(a.stdout, b.stdout);
    let path = std::env::temp_dir().join(format!("vhk-cli-out-{}.json", std::process::id()));
    let c = vhk(&["certify", "--n", "2", "--cover", "5", "-o", path.to_str().unwrap()]);
    assert_eq!(c.code, 0);
    assert!(c.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), a.stdout);
    std::fs::remove_file(path).ok();
}

#[test]
fn help_documents_flags() {
    let out = vhk(&["--help"]);
    assert_eq!(out.code, 0);
    let text = String::from_utf8(out.stdout).unwrap();
    for sub in ["lift", "graph", "decide", "moves", "certify", "fixtures", "--format", "--output", "--verbose"] {
        assert!(text.contains(sub), "{sub}");
    }
    let out = vhk(&["certify", "--help"]);
    assert_eq!(out.code, 0);
    let text = String::from_utf8(out.stdout).unwrap();
    for flag in ["--family", "--n", "--cover", "--slope", "--fixtures", "--side-b-words", "--withhold-side-b", "--bound"] {
        assert!(text.contains(flag), "{flag}");
    }
}

#[test]
fn verbose_goes_to_stderr() {
    let out = vhk(&["-vv", "certify", "--n", "1", "--cover", "3"]);
    assert_eq!(out.code, 0);
    assert!(String::from_utf8(out.stderr).unwrap().contains("side_a: Diskbusting"));
    serde_json::from_slice::<Value>(&out.stdout).unwrap();
}

#[test]
fn fixture_directory_from_environment() {
    let dir = std::env::temp_dir().join(format!("vhk-cli-env-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_vhk"))
        .args(["certify", "--n", "1", "--cover", "3"])
        .env("VHK_FIXTURES", &dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["steps"].as_array().unwrap().iter().find(|s| s["name"] == "side_b").unwrap()["verdict"], "Unavailable");
    std::fs::remove_dir_all(dir).ok();
}
