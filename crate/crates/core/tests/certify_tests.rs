use std::path::PathBuf;

use vhk_core::certify::{
    certify_theorem1, certify_theorem3, emit_report, replay, verify_fixture, CertificateReport, CertifyOptions,
    Fixture, FixtureSource, ReportFormat, SideB,
};
use vhk_core::splittings::SlopeParam;

fn two() -> SlopeParam {
    SlopeParam::new(2, 1).unwrap()
}

fn scratch_dir(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("vhk-certify-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn bundled_fixtures_match_expectations() {
    for f in FixtureSource::Bundled.load_all().unwrap() {
        let c = verify_fixture(&f).unwrap();
        assert!(c.matches_expected, "{}: {c:?}", f.id);
    }
    let fig18 = FixtureSource::Bundled.load("fig18").unwrap().unwrap();
    assert_eq!(verify_fixture(&fig18).unwrap().cut_vertices, ["w2-"]);
}

#[test]
fn removing_an_edge_breaks_a_graph_fixture() {
    let mut f = FixtureSource::Bundled.load("fig19b").unwrap().unwrap();
    let edges = f.edges.as_mut().unwrap();
    // drop every edge at w6 except one, which leaves the w6 pair hanging off a bridge
    let keep_w6 = edges.iter().position(|[u, v]| u.starts_with("w6") || v.starts_with("w6")).unwrap();
    let mut i = 0;
    edges.retain(|[u, v]| {
        let hit = (u.starts_with("w6") || v.starts_with("w6")) && i != keep_w6;
        i += 1;
        !hit
    });
    let c = verify_fixture(&f).unwrap();
    assert!(!c.matches_expected);
}

#[test]
fn side_a_is_diskbusting_for_small_n() {
    for n in 1..=5 {
        let r = certify_theorem1(n, two(), &CertifyOptions::default()).unwrap();
        let side_a = r.step("side_a").unwrap();
        assert_eq!(side_a.verdict, "Diskbusting", "n={n}");
        assert!(r.overall.certified, "n={n}");
    }
}

#[test]
fn reports_are_deterministic_and_replayable() {
    let opts = CertifyOptions::default();
    let a = certify_theorem1(1, two(), &opts).unwrap();
    let b = certify_theorem1(1, two(), &opts).unwrap();
    let ja = emit_report(&a, ReportFormat::Json);
    assert_eq!(ja, emit_report(&b, ReportFormat::Json));
    let back = CertificateReport::from_json(std::str::from_utf8(&ja).unwrap()).unwrap();
    assert_eq!(back, a);
    assert!(replay(&back).unwrap());
}

#[test]
fn corrupting_a_required_verdict_decertifies() {
    let r = certify_theorem3(1, two(), &CertifyOptions::default()).unwrap();
    assert!(r.overall.certified);
    for (i, s) in r.steps.iter().enumerate() {
        if !s.required {
            continue;
        }
        let mut bad = r.clone();
        bad.steps[i].ok = false;
        bad.recompute();
        assert!(!bad.overall.certified, "step {}", s.name);
        bad.steps[i].ok = true;
        bad.steps[i].verdict = "Corrupted".into();
        bad.recompute();
        assert!(!replay(&bad).unwrap(), "step {}", s.name);
    }
}

#[test]
fn report_formats() {
    let r = certify_theorem1(1, two(), &CertifyOptions::default()).unwrap();
    let text = String::from_utf8(emit_report(&r, ReportFormat::Text)).unwrap();
    for s in &r.steps {
        assert_eq!(text.lines().filter(|l| l.contains(&format!("] {}: {}", s.name, s.verdict))).count(), 1);
    }
    let dot = String::from_utf8(emit_report(&r, ReportFormat::DotBundle)).unwrap();
    let files = dot.matches("// file: ").count();
    assert!(files >= 2);
    assert_eq!(files, dot.matches("graph whitehead {").count());
    assert!("svg".parse::<ReportFormat>().is_err());
}

#[test]
fn withheld_side_b_is_reported_not_fatal() {
    let opts = CertifyOptions { side_b: SideB::Withheld, ..CertifyOptions::default() };
    let r = certify_theorem1(1, two(), &opts).unwrap();
    assert!(!r.overall.certified);
    assert!(r.overall.caveats.iter().any(|c| c.contains("side-(b) words unavailable")));
}

#[test]
fn fixture_caveat_is_standing() {
    let r = certify_theorem3(1, two(), &CertifyOptions::default()).unwrap();
    assert!(r.overall.caveats.iter().any(|c| c.contains("fixture inputs")));
    let inline = SideB::Words {
        alphabet: vec!["w1".into(), "w2".into(), "w3".into(), "w6".into()],
        words: vec!["[W1][w2][w3][w2][W1][w2][w3]".into(), "[W2][W3][w6]^2[w2][w3]".into()],
    };
    let r = certify_theorem3(1, two(), &CertifyOptions { side_b: inline, ..CertifyOptions::default() }).unwrap();
    assert!(r.overall.certified);
    assert!(!r.overall.caveats.iter().any(|c| c.contains("fixture inputs")));
    assert!(replay(&r).unwrap());
}

#[test]
fn corrupted_fixture_directory() {
    let dir = scratch_dir("corrupt");
    let mut f = FixtureSource::Bundled.load("fig18").unwrap().unwrap();
    // the second word loses its w6 letters, so the graph splits
    f.words.as_mut().unwrap()[1] = "[W2][W3][w2][w3]".into();
    f.expected.cut_vertices.clear();
    std::fs::write(dir.join("fig18.json"), serde_json::to_string(&f).unwrap()).unwrap();
    let opts = CertifyOptions { side_b: SideB::Fixtures(FixtureSource::Dir(dir.clone())), ..CertifyOptions::default() };
    let r = certify_theorem3(1, two(), &opts).unwrap();
    assert!(!r.overall.certified);
    assert_eq!(r.step("side_b").unwrap().verdict, "Separable");
    // fig12 is absent from the directory
    let r1 = certify_theorem1(1, two(), &opts).unwrap();
    assert!(!r1.overall.certified);
    assert_eq!(r1.step("side_b").unwrap().verdict, "Unavailable");
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn mismatched_slope_fixture_is_unavailable() {
    let r = certify_theorem1(1, SlopeParam::new(4, 1).unwrap(), &CertifyOptions::default()).unwrap();
    assert!(!r.overall.certified);
    assert_eq!(r.step("side_b").unwrap().verdict, "Unavailable");
}

#[test]
fn fixture_json_round_trips() {
    for f in FixtureSource::Bundled.load_all().unwrap() {
        let text = serde_json::to_string(&f).unwrap();
        assert_eq!(Fixture::from_json(&text).unwrap(), f);
    }
}
