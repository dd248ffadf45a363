//! Certificate pipelines for the 3-fold and 5-fold cyclic covers of the
//! twist-family knot exteriors, figure fixtures and report output.
//!
//! Side (a) of each certificate is computed from the relator lifts. Side (b)
//! (the opposite disks read against the filled handlebody's dual basis) needs
//! diagram data the word layer does not have, so it is read from fixtures or
//! supplied by the caller, and every report says so.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::splittings::{self, SlopeParam, SplitError, WeakReductionOutcome};
use crate::whitehead::{self, DecisionResult, Verdict, WhiteheadError, WhiteheadGraph};
use crate::words::{parse_cyclic, Alphabet, CyclicWord, Morphism, WordError};

pub const REPORT_SCHEMA: u32 = 1;
pub const FIXTURE_ENV: &str = "VHK_FIXTURES";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertifyError {
    #[error(transparent)]
    Split(#[from] SplitError),
    #[error(transparent)]
    Whitehead(#[from] WhiteheadError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("malformed fixture {id}: {reason}")]
    Fixture { id: String, reason: String },
    #[error("{path}: {reason}")]
    Io { path: String, reason: String },
    #[error("unknown report format `{0}` (expected json, text or dot-bundle)")]
    UnknownFormat(String),
    #[error("malformed report: {0}")]
    Report(String),
}

const BUNDLED: &[(&str, &str)] = &[
    ("fig10", include_str!("../fixtures/fig10.json")),
    ("fig12", include_str!("../fixtures/fig12.json")),
    ("fig13", include_str!("../fixtures/fig13.json")),
    ("fig16", include_str!("../fixtures/fig16.json")),
    ("fig18", include_str!("../fixtures/fig18.json")),
    ("fig19a", include_str!("../fixtures/fig19a.json")),
    ("fig19b", include_str!("../fixtures/fig19b.json")),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FixtureKind {
    Graph,
    Words,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expected {
    pub connected: bool,
    pub cut_vertices: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fixture {
    pub id: String,
    pub kind: FixtureKind,
    pub alphabet: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<[String; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub words: Option<Vec<String>>,
    pub expected: Expected,
    /// Cover degree the words live in, for side-(b) fixtures.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cover: Option<u32>,
    /// Upstairs filling slope, for side-(b) fixtures.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slope: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Fixture {
    pub fn from_json(text: &str) -> Result<Fixture, CertifyError> {
        let f: Fixture = serde_json::from_str(text).map_err(|e| CertifyError::Fixture {
            id: "?".into(),
            reason: e.to_string(),
        })?;
        f.validate()?;
        Ok(f)
    }

    fn malformed(&self, reason: impl Into<String>) -> CertifyError {
        CertifyError::Fixture { id: self.id.clone(), reason: reason.into() }
    }

    pub fn alphabet(&self) -> Result<Alphabet, CertifyError> {
        Alphabet::new(&self.alphabet).map_err(|e| self.malformed(e.to_string()))
    }

    pub fn cyclic_words(&self) -> Result<Vec<CyclicWord>, CertifyError> {
        let a = self.alphabet()?;
        let words = self.words.as_ref().ok_or_else(|| self.malformed("kind `words` needs a `words` list"))?;
        words.iter().map(|w| parse_cyclic(w, &a).map_err(|e| self.malformed(e.to_string()))).collect()
    }

    pub fn graph(&self) -> Result<WhiteheadGraph, CertifyError> {
        let a = self.alphabet()?;
        match self.kind {
            FixtureKind::Words => Ok(WhiteheadGraph::from_words(&self.cyclic_words()?, a.rank())),
            FixtureKind::Graph => {
                let edges = self.edges.as_ref().ok_or_else(|| self.malformed("kind `graph` needs `edges`"))?;
                let pairs = edges
                    .iter()
                    .map(|[u, v]| {
                        let pu = a.parse_vertex(u).ok_or_else(|| self.malformed(format!("unknown vertex `{u}`")))?;
                        let pv = a.parse_vertex(v).ok_or_else(|| self.malformed(format!("unknown vertex `{v}`")))?;
                        Ok((pu, pv))
                    })
                    .collect::<Result<Vec<_>, CertifyError>>()?;
                Ok(WhiteheadGraph::from_edges(a.rank(), &pairs))
            }
        }
    }

    pub fn validate(&self) -> Result<(), CertifyError> {
        let a = self.alphabet()?;
        self.graph()?;
        for v in &self.expected.cut_vertices {
            a.parse_vertex(v).ok_or_else(|| self.malformed(format!("unknown expected cut vertex `{v}`")))?;
        }
        if let Some(s) = &self.slope {
            s.parse::<SlopeParam>().map_err(|e| self.malformed(e.to_string()))?;
        }
        Ok(())
    }
}

/// Where fixtures come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FixtureSource {
    Bundled,
    Dir(PathBuf),
}

impl FixtureSource {
    /// `VHK_FIXTURES` if set, otherwise the bundled set.
    pub fn from_env() -> FixtureSource {
        match std::env::var_os(FIXTURE_ENV) {
            Some(d) if !d.is_empty() => FixtureSource::Dir(PathBuf::from(d)),
            _ => FixtureSource::Bundled,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            FixtureSource::Bundled => "bundled".into(),
            FixtureSource::Dir(p) => format!("dir:{}", p.display()),
        }
    }

    pub fn load(&self, id: &str) -> Result<Option<Fixture>, CertifyError> {
        match self {
            FixtureSource::Bundled => BUNDLED
                .iter()
                .find(|(k, _)| *k == id)
                .map(|(_, text)| Fixture::from_json(text))
                .transpose(),
            FixtureSource::Dir(dir) => {
                let path = dir.join(format!("{id}.json"));
                if !path.exists() {
                    return Ok(None);
                }
                read_fixture(&path).map(Some)
            }
        }
    }

    pub fn load_all(&self) -> Result<Vec<Fixture>, CertifyError> {
        match self {
            FixtureSource::Bundled => BUNDLED.iter().map(|(_, t)| Fixture::from_json(t)).collect(),
            FixtureSource::Dir(dir) => {
                let io = |e: std::io::Error| CertifyError::Io { path: dir.display().to_string(), reason: e.to_string() };
                let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
                    .map_err(io)?
                    .filter_map(|e| e.ok().map(|e| e.path()))
                    .filter(|p| p.extension().is_some_and(|x| x == "json"))
                    .collect();
                paths.sort();
                paths.iter().map(|p| read_fixture(p)).collect()
            }
        }
    }
}

fn read_fixture(path: &Path) -> Result<Fixture, CertifyError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CertifyError::Io { path: path.display().to_string(), reason: e.to_string() })?;
    Fixture::from_json(&text)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureCheck {
    pub id: String,
    pub connected: bool,
    pub cut_vertices: Vec<String>,
    pub matches_expected: bool,
}

pub fn verify_fixture(f: &Fixture) -> Result<FixtureCheck, CertifyError> {
    let a = f.alphabet()?;
    let g = f.graph()?;
    let connected = g.is_connected(false);
    let cut_vertices: Vec<String> = g.cut_vertices().into_iter().map(|v| a.vertex_name(v)).collect();
    let mut want = f.expected.cut_vertices.clone();
    want.sort_by_key(|v| a.parse_vertex(v));
    let matches_expected = connected == f.expected.connected && cut_vertices == want;
    Ok(FixtureCheck { id: f.id.clone(), connected, cut_vertices, matches_expected })
}

/// Source of the side-(b) word system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SideB {
    Fixtures(FixtureSource),
    Words { alphabet: Vec<String>, words: Vec<String> },
    Withheld,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertifyOptions {
    pub side_b: SideB,
    pub weak_bound: usize,
    pub decide_bound: usize,
}

impl Default for CertifyOptions {
    fn default() -> CertifyOptions {
        CertifyOptions {
            side_b: SideB::Fixtures(FixtureSource::Bundled),
            weak_bound: splittings::DEFAULT_WEAK_BOUND,
            decide_bound: whitehead::DEFAULT_DECIDE_BOUND,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineWords {
    pub alphabet: Vec<String>,
    pub words: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Request {
    pub theorem: u32,
    pub family: String,
    pub n: u32,
    pub cover: u32,
    pub slope: String,
    pub side_b: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side_b_words: Option<InlineWords>,
    pub weak_bound: usize,
    pub decide_bound: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Step {
    pub name: String,
    pub required: bool,
    pub ok: bool,
    pub verdict: String,
    pub inputs: Value,
    pub outputs: Value,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphRecord {
    pub step: String,
    pub name: String,
    pub dot: String,
    pub json: Value,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overall {
    pub certified: bool,
    pub caveats: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateReport {
    pub schema: u32,
    pub request: Request,
    pub steps: Vec<Step>,
    pub graphs: Vec<GraphRecord>,
    pub overall: Overall,
}

impl CertificateReport {
    pub fn step(&self, name: &str) -> Option<&Step> {
        self.steps.iter().find(|s| s.name == name)
    }

    /// Recomputes `overall.certified` from the required steps.
    pub fn recompute(&mut self) {
        self.overall.certified = self.steps.iter().filter(|s| s.required).all(|s| s.ok);
    }

    pub fn from_json(text: &str) -> Result<CertificateReport, CertifyError> {
        let r: CertificateReport = serde_json::from_str(text).map_err(|e| CertifyError::Report(e.to_string()))?;
        if r.schema != REPORT_SCHEMA {
            return Err(CertifyError::Report(format!("unsupported schema {}", r.schema)));
        }
        Ok(r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Text,
    DotBundle,
}

impl FromStr for ReportFormat {
    type Err = CertifyError;

    fn from_str(s: &str) -> Result<ReportFormat, CertifyError> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "text" => Ok(ReportFormat::Text),
            "dot-bundle" | "dot" => Ok(ReportFormat::DotBundle),
            other => Err(CertifyError::UnknownFormat(other.to_string())),
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportFormat::Json => "json",
            ReportFormat::Text => "text",
            ReportFormat::DotBundle => "dot-bundle",
        })
    }
}

pub fn emit_report(r: &CertificateReport, format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Json => {
            let mut out = serde_json::to_vec_pretty(r).expect("report serializes");
            out.push(b'\n');
            out
        }
        ReportFormat::Text => {
            let q = &r.request;
            let mut s = format!(
                "theorem {} | {} n={} | cover {} | slope {} | side-b {}\n",
                q.theorem, q.family, q.n, q.cover, q.slope, q.side_b
            );
            for st in &r.steps {
                let mark = match (st.required, st.ok) {
                    (true, true) => "PASS",
                    (true, false) => "FAIL",
                    (false, _) => "INFO",
                };
                s.push_str(&format!("[{mark}] {}: {}\n", st.name, st.verdict));
            }
            s.push_str(&format!("certified: {}\n", r.overall.certified));
            for c in &r.overall.caveats {
                s.push_str(&format!("caveat: {c}\n"));
            }
            s.into_bytes()
        }
        ReportFormat::DotBundle => {
            let mut s = String::new();
            for g in &r.graphs {
                s.push_str(&format!("// file: {}-{}.dot\n", g.step, g.name));
                s.push_str(&g.dot);
            }
            s.into_bytes()
        }
    }
}

struct Builder {
    steps: Vec<Step>,
    graphs: Vec<GraphRecord>,
    caveats: Vec<String>,
}

impl Builder {
    fn new() -> Builder {
        Builder { steps: Vec::new(), graphs: Vec::new(), caveats: Vec::new() }
    }

    fn step(&mut self, name: &str, required: bool, ok: bool, verdict: impl Into<String>, inputs: Value, outputs: Value) {
        self.steps.push(Step { name: name.into(), required, ok, verdict: verdict.into(), inputs, outputs });
    }

    fn graph(&mut self, step: &str, name: &str, words: &[CyclicWord], alphabet: &Alphabet) {
        let texts = texts(words, alphabet);
        let g = WhiteheadGraph::from_words(words, alphabet.rank());
        self.graphs.push(GraphRecord {
            step: step.into(),
            name: name.into(),
            dot: g.to_dot(alphabet, &texts),
            json: g.to_json(alphabet, &texts),
        });
    }

    fn finish(self, request: Request) -> CertificateReport {
        let mut r = CertificateReport {
            schema: REPORT_SCHEMA,
            request,
            steps: self.steps,
            graphs: self.graphs,
            overall: Overall { certified: false, caveats: self.caveats },
        };
        r.recompute();
        r
    }
}

fn texts(words: &[CyclicWord], a: &Alphabet) -> Vec<String> {
    words.iter().map(|w| w.to_text(a)).collect()
}

pub fn morphism_json(m: &Morphism, a: &Alphabet) -> Value {
    let map: serde_json::Map<String, Value> = m.to_text(a).into_iter().map(|(k, v)| (k, Value::String(v))).collect();
    Value::Object(map)
}

pub fn decision_json(d: &DecisionResult, a: &Alphabet) -> Value {
    let trace: Vec<Value> = d
        .trace
        .iter()
        .map(|s| {
            json!({
                "kind": format!("{:?}", s.kind),
                "move": s.mv.to_text(a),
                "length_before": s.length_before,
                "length_after": s.length_after,
            })
        })
        .collect();
    let witness = match &d.witness {
        Some(whitehead::Witness::Omits { generator }) => json!({ "omits": a.name(*generator) }),
        Some(whitehead::Witness::Partition { blocks }) => {
            let names: Vec<Vec<&str>> = blocks.iter().map(|b| b.iter().map(|&g| a.name(g)).collect()).collect();
            json!({ "partition": names })
        }
        Some(whitehead::Witness::Exhausted { bound }) => json!({ "exhausted": bound }),
        None => Value::Null,
    };
    json!({
        "verdict": d.verdict.as_str(),
        "trace": trace,
        "cut_vertex_moves": d.cut_vertex_moves(),
        "witness": witness,
        "final_words": texts(&d.final_words, a),
        "automorphism": morphism_json(&d.automorphism, a),
        "states": d.states,
    })
}

fn directly_omitted(w: &CyclicWord, a: &Alphabet) -> Vec<String> {
    (0..a.rank() as u32).filter(|&g| !w.contains_gen(g)).map(|g| a.name(g).to_string()).collect()
}

struct SideBInput {
    alphabet: Alphabet,
    words: Vec<CyclicWord>,
    origin: String,
}

fn side_b_input(opts: &CertifyOptions, fixture_id: &str, cover: u32, slope: SlopeParam) -> Result<SideBInput, String> {
    match &opts.side_b {
        SideB::Withheld => Err("side-(b) words unavailable: withheld by request".into()),
        SideB::Words { alphabet, words } => {
            let a = Alphabet::new(alphabet).map_err(|e| format!("side-(b) words unavailable: {e}"))?;
            let words = words
                .iter()
                .map(|w| parse_cyclic(w, &a))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| format!("side-(b) words unavailable: {e}"))?;
            Ok(SideBInput { alphabet: a, words, origin: "inline".into() })
        }
        SideB::Fixtures(src) => {
            let f = src
                .load(fixture_id)
                .map_err(|e| format!("side-(b) words unavailable: {e}"))?
                .ok_or_else(|| format!("side-(b) words unavailable: fixture {fixture_id} not found in {}", src.describe()))?;
            if f.cover.is_some_and(|c| c != cover) {
                return Err(format!("side-(b) words unavailable: fixture {fixture_id} is for another cover"));
            }
            if let Some(s) = &f.slope {
                let fs: SlopeParam = s.parse().map_err(|e| format!("side-(b) words unavailable: {e}"))?;
                if fs != slope {
                    return Err(format!(
                        "side-(b) words unavailable: fixture {fixture_id} is for slope {fs}, not {slope}"
                    ));
                }
            }
            let words = f.cyclic_words().map_err(|e| format!("side-(b) words unavailable: {e}"))?;
            Ok(SideBInput { alphabet: f.alphabet().map_err(|e| e.to_string())?, words, origin: f.id.clone() })
        }
    }
}

fn request(theorem: u32, n: u32, cover: u32, slope: SlopeParam, opts: &CertifyOptions) -> Request {
    let (side_b, side_b_words) = match &opts.side_b {
        SideB::Fixtures(src) => (src.describe(), None),
        SideB::Words { alphabet, words } => {
            ("inline".to_string(), Some(InlineWords { alphabet: alphabet.clone(), words: words.clone() }))
        }
        SideB::Withheld => ("withheld".to_string(), None),
    };
    Request {
        theorem,
        family: "twist".into(),
        n,
        cover,
        slope: slope.to_string(),
        side_b,
        side_b_words,
        weak_bound: opts.weak_bound,
        decide_bound: opts.decide_bound,
    }
}

/// Shared opening: family, Schreier data and lifts.
fn lift_steps(
    b: &mut Builder,
    n: u32,
    m: u32,
    slope: SlopeParam,
) -> Result<(splittings::SplittingSpec, splittings::CoverSide), CertifyError> {
    let spec = splittings::twist_family(n)?;
    let xy = &spec.alphabet;
    b.step(
        "family",
        false,
        true,
        "ok",
        json!({ "family": "twist", "n": n }),
        json!({
            "relator": spec.relator.to_text(xy),
            "longitude": spec.longitude.to_text(xy),
            "relator_exponents": spec.relator.as_word().exponent_vector(2)?.0,
        }),
    );
    let side = splittings::build_cover_side(&spec, m, Some(slope))?;
    let k = &side.data.kernel;
    let defs: serde_json::Map<String, Value> = side
        .data
        .definitions
        .iter()
        .enumerate()
        .map(|(i, d)| (k.name(i as u32).to_string(), Value::String(d.to_text(xy))))
        .collect();
    b.step(
        "schreier",
        false,
        true,
        "ok",
        json!({ "cover": m, "transversal": xy.name(side.data.transversal_gen) }),
        json!({ "weights": side.data.weights.weights, "kernel": k.names(), "definitions": defs }),
    );
    b.step(
        "lift",
        false,
        true,
        "ok",
        json!({ "slope_upstairs": slope.to_string() }),
        json!({
            "relator_lifts": texts(&side.relator_lifts.words, k),
            "period_collapse": side.relator_lifts.period_collapse,
            "slope_downstairs": side.downstairs_slope.map(|s| s.to_string()),
            "slope_lift": side.slope_lift.as_ref().map(|w| w.to_text(k)),
            "longitude_lift": side.longitude_lift.to_text(k),
        }),
    );
    if slope.q > 1 {
        b.caveats.push(format!(
            "slope {slope} has q > 1; the slope curve is taken as longitude^q * meridian^p, an extrapolation from q = 1"
        ));
    }
    Ok((spec, side))
}

fn side_b_steps(
    b: &mut Builder,
    opts: &CertifyOptions,
    fixture_id: &str,
    m: u32,
    slope: SlopeParam,
    individual: bool,
) -> Result<(), CertifyError> {
    match side_b_input(opts, fixture_id, m, slope) {
        Err(reason) => {
            b.step("side_b", true, false, "Unavailable", json!({ "fixture": fixture_id }), json!({ "reason": reason }));
            b.caveats.push(reason);
        }
        Ok(input) => {
            let a = &input.alphabet;
            let d = whitehead::decide_separable(&input.words, a.rank(), opts.decide_bound)?;
            b.graph("side_b", "initial", &input.words, a);
            b.graph("side_b", "final", &d.final_words, a);
            b.step(
                "side_b",
                true,
                d.verdict == Verdict::Diskbusting,
                d.verdict.as_str(),
                json!({ "origin": input.origin, "alphabet": a.names(), "words": texts(&input.words, a) }),
                decision_json(&d, a),
            );
            if individual {
                individual_step(b, "side_b_individual", &input.words, a, opts.decide_bound)?;
            }
            if input.origin != "inline" {
                b.caveats.push(format!(
                    "side-(b) words are fixture inputs ({}), derived from a reconstructed Heegaard diagram rather than computed by this pipeline",
                    input.origin
                ));
            }
        }
    }
    Ok(())
}

/// Each word on its own must be separable in the cut basis.
fn individual_step(
    b: &mut Builder,
    name: &str,
    words: &[CyclicWord],
    a: &Alphabet,
    bound: usize,
) -> Result<(), CertifyError> {
    let mut per_word = Vec::new();
    let mut ok = true;
    for w in words {
        let d = whitehead::decide_separable(std::slice::from_ref(w), a.rank(), bound)?;
        ok &= d.verdict == Verdict::Separable;
        per_word.push(json!({
            "word": w.to_text(a),
            "verdict": d.verdict.as_str(),
            "witness": d.omitted().map(|g| a.name(g).to_string()),
            "directly_omits": directly_omitted(w, a),
        }));
    }
    let verdict = if ok { "Separable" } else { "NotSeparable" };
    b.step(name, true, ok, verdict, json!({ "alphabet": a.names() }), Value::Array(per_word));
    Ok(())
}

/// Certificate for the 3-fold cyclic cover of the `n`-th twist-family knot
/// exterior filled along `slope` (upstairs).
pub fn certify_theorem1(n: u32, slope: SlopeParam, opts: &CertifyOptions) -> Result<CertificateReport, CertifyError> {
    let m = 3;
    if n < 1 {
        return Err(SplitError::BadN.into());
    }
    let mut b = Builder::new();
    let (_, side) = lift_steps(&mut b, n, m, slope)?;
    let k = side.data.kernel.clone();
    let lifts = &side.relator_lifts.words;

    let weak = splittings::find_weak_reduction(lifts, k.rank(), opts.weak_bound)?;
    match weak {
        WeakReductionOutcome::NotFound { bound, inconclusive } => {
            b.step(
                "weak_reduction",
                true,
                false,
                "NotFound",
                json!({ "disks": texts(lifts, &k) }),
                json!({ "bound": bound, "inconclusive": inconclusive }),
            );
            b.caveats.push("no weak reduction found; side (a) skipped".into());
        }
        WeakReductionOutcome::Found(r) => {
            let trace: Vec<String> = r.trace.iter().map(|s| s.mv.to_text(&k)).collect();
            b.step(
                "weak_reduction",
                true,
                true,
                "Found",
                json!({ "disks": texts(lifts, &k) }),
                json!({
                    "disk_index": r.disk_index,
                    "omitted": k.name(r.omitted),
                    "basis_change": morphism_json(&r.basis_change, &k),
                    "trace": trace,
                }),
            );
            let image = r.basis_change.apply_cyclic(&lifts[r.disk_index])?;
            let cut = splittings::cut_along(std::slice::from_ref(&image), k.rank(), r.omitted)?;
            let ca = k.without(r.omitted);
            let d = whitehead::decide_separable(&cut, ca.rank(), opts.decide_bound)?;
            b.graph("side_a", "initial", &cut, &ca);
            b.step(
                "side_a",
                true,
                d.verdict == Verdict::Diskbusting,
                d.verdict.as_str(),
                json!({ "alphabet": ca.names(), "words": texts(&cut, &ca) }),
                decision_json(&d, &ca),
            );
            longitude_step(&mut b, &side.longitude_lift, &r.basis_change, &[r.omitted], &k)?;
        }
    }

    side_b_steps(&mut b, opts, "fig12", m, slope, false)?;
    if n > 1 && matches!(opts.side_b, SideB::Fixtures(_)) {
        b.caveats.push(format!(
            "side-(b) fixture fig12 is reused for n = {n}: the side-(b) graph is taken to be the same as for n = 1"
        ));
    }
    Ok(b.finish(request(1, n, m, slope, opts)))
}

/// Certificate for the 5-fold cyclic cover, with two reducing disks per side.
pub fn certify_theorem3(n: u32, slope: SlopeParam, opts: &CertifyOptions) -> Result<CertificateReport, CertifyError> {
    let m = 5;
    if n < 1 {
        return Err(SplitError::BadN.into());
    }
    let mut b = Builder::new();
    let (_, side) = lift_steps(&mut b, n, m, slope)?;
    let k = side.data.kernel.clone();
    let lifts = &side.relator_lifts.words;

    match splittings::find_pair_reduction(lifts, k.rank(), 2, opts.decide_bound)? {
        None => {
            b.step(
                "weak_reduction",
                true,
                false,
                "NotFound",
                json!({ "disks": texts(lifts, &k) }),
                json!({ "pairs_tried": lifts.len() * lifts.len().saturating_sub(1) / 2 }),
            );
            b.caveats.push("no pair of lifts misses two disks; side (a) skipped".into());
        }
        Some(p) => {
            let omitted: Vec<&str> = p.omitted.iter().map(|&g| k.name(g)).collect();
            b.step(
                "weak_reduction",
                true,
                true,
                "Found",
                json!({ "disks": texts(lifts, &k) }),
                json!({
                    "disk_indices": [p.disks.0, p.disks.1],
                    "omitted": omitted,
                    "basis_change": morphism_json(&p.basis_change, &k),
                }),
            );
            let names: Vec<&str> = p.kept.iter().map(|&g| k.name(g)).collect();
            let ca = Alphabet::new(&names)?;
            let d = whitehead::decide_separable(&p.cut_words, ca.rank(), opts.decide_bound)?;
            b.graph("side_a", "initial", &p.cut_words, &ca);
            b.step(
                "side_a",
                true,
                d.verdict == Verdict::Diskbusting,
                d.verdict.as_str(),
                json!({ "alphabet": ca.names(), "words": texts(&p.cut_words, &ca) }),
                decision_json(&d, &ca),
            );
            individual_step(&mut b, "side_a_individual", &p.cut_words, &ca, opts.decide_bound)?;
            longitude_step(&mut b, &side.longitude_lift, &p.basis_change, &p.omitted, &k)?;
        }
    }

    side_b_steps(&mut b, opts, "fig18", m, slope, true)?;
    if n > 1 && matches!(opts.side_b, SideB::Fixtures(_)) {
        b.caveats.push(format!(
            "side-(b) fixture fig18 is reused for n = {n}: the side-(b) words are taken to be the same as for n = 1"
        ));
    }
    Ok(b.finish(request(3, n, m, slope, opts)))
}

fn longitude_step(
    b: &mut Builder,
    longitude_lift: &crate::words::Word,
    basis_change: &Morphism,
    omitted: &[u32],
    k: &Alphabet,
) -> Result<(), CertifyError> {
    let image = basis_change.apply(longitude_lift)?;
    let misses: Vec<bool> = omitted.iter().map(|&g| !image.contains_gen(g)).collect();
    let verdict = if misses.iter().all(|&x| x) { "MissesCut" } else { "MeetsCut" };
    b.step(
        "longitude",
        false,
        true,
        verdict,
        json!({ "longitude_lift": longitude_lift.to_text(k) }),
        json!({
            "after_basis_change": image.to_text(k),
            "omitted": omitted.iter().map(|&g| k.name(g)).collect::<Vec<_>>(),
            "misses": misses,
        }),
    );
    b.caveats.push("longitude step is a word-level necessary condition only and does not gate certification".into());
    Ok(())
}

/// Options reconstructed from a report's request echo.
pub fn options_from_request(q: &Request) -> Result<CertifyOptions, CertifyError> {
    let side_b = match (q.side_b.as_str(), &q.side_b_words) {
        ("bundled", _) => SideB::Fixtures(FixtureSource::Bundled),
        ("withheld", _) => SideB::Withheld,
        ("inline", Some(w)) => SideB::Words { alphabet: w.alphabet.clone(), words: w.words.clone() },
        (s, _) => match s.strip_prefix("dir:") {
            Some(p) => SideB::Fixtures(FixtureSource::Dir(PathBuf::from(p))),
            None => return Err(CertifyError::Report(format!("unknown side_b source `{s}`"))),
        },
    };
    Ok(CertifyOptions { side_b, weak_bound: q.weak_bound, decide_bound: q.decide_bound })
}

pub fn run_request(q: &Request) -> Result<CertificateReport, CertifyError> {
    let opts = options_from_request(q)?;
    let slope: SlopeParam = q.slope.parse()?;
    match (q.theorem, q.family.as_str()) {
        (1, "twist") => certify_theorem1(q.n, slope, &opts),
        (3, "twist") => certify_theorem3(q.n, slope, &opts),
        _ => Err(CertifyError::Report(format!("unsupported request: theorem {} family {}", q.theorem, q.family))),
    }
}

/// Re-runs the echoed request and checks every step verdict matches.
pub fn replay(r: &CertificateReport) -> Result<bool, CertifyError> {
    let again = run_request(&r.request)?;
    let verdicts = |x: &CertificateReport| x.steps.iter().map(|s| (s.name.clone(), s.verdict.clone(), s.ok)).collect::<Vec<_>>();
    Ok(verdicts(&again) == verdicts(r) && again.overall.certified == r.overall.certified)
}
