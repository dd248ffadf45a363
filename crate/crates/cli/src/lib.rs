//! `vhk` command-line front end. [`run`] does all the work and returns the
//! exit code and both output streams, so the binary is a thin wrapper.
//!
//! Exit codes: 0 success, 1 valid input with a negative outcome, 2 usage or
//! input error.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use vhk_core::certify::{
    self, CertifyOptions, FixtureSource, ReportFormat, SideB,
};
use vhk_core::splittings::{self, SlopeParam, SplittingSpec};
use vhk_core::whitehead::{self, Verdict, WhiteheadGraph, WhiteheadMove};
use vhk_core::words::{parse_cyclic, Alphabet, CyclicWord};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: Vec<u8>,
    pub stderr: Vec<u8>,
}

#[derive(Debug, Parser)]
#[command(name = "vhk", version, about = "Word-level incompressibility certificates for cyclic covers of knot exteriors")]
struct Cli {
    /// Output format; each subcommand accepts a subset.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the result to this file instead of stdout.
    #[arg(short, long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Print progress diagnostics on stderr (repeat for more).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    Dot,
    DotBundle,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Lift a splitting spec to the m-fold cyclic cover.
    Lift {
        /// SplittingSpec JSON file.
        #[arg(long, value_name = "FILE")]
        spec: PathBuf,
        /// Cover degree m.
        #[arg(long, value_name = "M")]
        cover: u32,
        /// Downstairs filling slope P/Q; P must be divisible by M.
        #[arg(long, value_name = "P/Q")]
        slope: Option<String>,
    },
    /// Build the Whitehead graph of a word system.
    Graph(WordsArgs),
    /// Decide whether a word system is diskbusting or separable.
    Decide {
        #[command(flatten)]
        words: WordsArgs,
        /// Maximum number of states for the fallback search.
        #[arg(long, value_name = "N", default_value_t = whitehead::DEFAULT_DECIDE_BOUND)]
        bound: usize,
        /// Exit 1 unless the verdict is Diskbusting.
        #[arg(long)]
        require_diskbusting: bool,
    },
    /// Apply a Type II Whitehead move such as "({x+,y-},x+)".
    Moves {
        #[command(flatten)]
        words: WordsArgs,
        /// Move in the form "({v,...},a)" with vertices like x+ or y-.
        #[arg(long = "move", value_name = "MOVE")]
        mv: String,
    },
    /// Run a certificate pipeline.
    Certify {
        /// Knot family (only `twist` is bundled).
        #[arg(long, default_value = "twist")]
        family: String,
        /// Family parameter n >= 1.
        #[arg(long, value_name = "N")]
        n: u32,
        /// Cover degree: 3 or 5.
        #[arg(long, value_name = "M")]
        cover: u32,
        /// Upstairs filling slope P/Q.
        #[arg(long, value_name = "P/Q", default_value = "2/1")]
        slope: String,
        /// Read side-(b) fixtures from DIR (overrides VHK_FIXTURES).
        #[arg(long, value_name = "DIR", conflicts_with_all = ["side_b_words", "withhold_side_b"])]
        fixtures: Option<PathBuf>,
        /// Side-(b) word system supplied directly, with --side-b-alphabet.
        #[arg(long, value_name = "WORD", num_args = 1.., value_delimiter = ',', requires = "side_b_alphabet", conflicts_with = "withhold_side_b")]
        side_b_words: Option<Vec<String>>,
        /// Comma-separated alphabet for --side-b-words.
        #[arg(long, value_name = "NAMES", requires = "side_b_words")]
        side_b_alphabet: Option<String>,
        /// Run without side-(b) words (the report cannot certify).
        #[arg(long)]
        withhold_side_b: bool,
        /// Maximum number of bases visited by the weak-reduction search.
        #[arg(long, value_name = "N", default_value_t = splittings::DEFAULT_WEAK_BOUND)]
        weak_bound: usize,
        /// Maximum number of states for each decision.
        #[arg(long, value_name = "N", default_value_t = whitehead::DEFAULT_DECIDE_BOUND)]
        bound: usize,
    },
    /// Verify every fixture against its expected graph properties.
    Fixtures {
        /// Fixture directory (overrides VHK_FIXTURES).
        #[arg(long, value_name = "DIR")]
        dir: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct WordsArgs {
    /// Comma-separated generator names, e.g. x,y.
    #[arg(long, value_name = "NAMES")]
    alphabet: String,
    /// Cyclic words (repeat the flag or separate with commas).
    #[arg(long, value_name = "WORD", num_args = 1.., value_delimiter = ',', required = true)]
    words: Vec<String>,
}

enum Failure {
    Input(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Failure {
        Failure::Input(e.to_string())
    }
}

struct Success {
    code: i32,
    body: Vec<u8>,
}

struct Diag {
    level: u8,
    buf: Vec<u8>,
}

impl Diag {
    fn note(&mut self, level: u8, msg: impl AsRef<str>) {
        if self.level >= level {
            self.buf.extend_from_slice(msg.as_ref().as_bytes());
            self.buf.push(b'\n');
        }
    }
}

pub fn run<I, T>(argv: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string().into_bytes();
            return if code == 0 {
                Output { code, stdout: text, stderr: Vec::new() }
            } else {
                Output { code, stdout: Vec::new(), stderr: text }
            };
        }
    };
    let mut diag = Diag { level: cli.verbose, buf: Vec::new() };
    match execute(&cli, &mut diag) {
        Ok(s) => {
            if let Some(path) = &cli.output {
                if let Err(e) = std::fs::write(path, &s.body) {
                    diag.buf.extend_from_slice(format!("error: {}: {e}\n", path.display()).as_bytes());
                    return Output { code: 2, stdout: Vec::new(), stderr: diag.buf };
                }
                diag.note(1, format!("wrote {}", path.display()));
                Output { code: s.code, stdout: Vec::new(), stderr: diag.buf }
            } else {
                Output { code: s.code, stdout: s.body, stderr: diag.buf }
            }
        }
        Err(Failure::Input(msg)) => {
            diag.buf.extend_from_slice(format!("error: {msg}\n").as_bytes());
            Output { code: 2, stdout: Vec::new(), stderr: diag.buf }
        }
    }
}

fn pick_format(given: Option<Format>, allowed: &[Format], cmd: &str) -> Result<Format, Failure> {
    match given {
        None => Ok(Format::Json),
        Some(f) if allowed.contains(&f) => Ok(f),
        Some(f) => {
            let name = f.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
            Err(Failure::Input(format!("--format {name} is not supported by `{cmd}`")))
        }
    }
}

fn json_body(v: &Value) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(v).expect("json value serializes");
    out.push(b'\n');
    out
}

fn parse_system(a: &WordsArgs) -> Result<(Alphabet, Vec<CyclicWord>), Failure> {
    let alphabet = Alphabet::parse_list(&a.alphabet)?;
    let words = a
        .words
        .iter()
        .map(|w| parse_cyclic(w, &alphabet).map_err(|e| Failure::Input(format!("word `{w}`: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((alphabet, words))
}

fn texts(words: &[CyclicWord], a: &Alphabet) -> Vec<String> {
    words.iter().map(|w| w.to_text(a)).collect()
}

fn execute(cli: &Cli, diag: &mut Diag) -> Result<Success, Failure> {
    match &cli.command {
        Command::Lift { spec, cover, slope } => {
            pick_format(cli.format, &[Format::Json], "lift")?;
            let text = std::fs::read_to_string(spec).map_err(|e| Failure::Input(format!("{}: {e}", spec.display())))?;
            let spec = SplittingSpec::from_json(&text)?;
            let down = slope.as_deref().map(str::parse::<SlopeParam>).transpose()?;
            let up = down.map(|d| splittings::lift_slope(*cover, d)).transpose()?;
            diag.note(1, format!("lifting to the {cover}-fold cover"));
            let side = splittings::build_cover_side(&spec, *cover, up)?;
            let k = &side.data.kernel;
            let defs: serde_json::Map<String, Value> = side
                .data
                .definitions
                .iter()
                .enumerate()
                .map(|(i, d)| (k.name(i as u32).to_string(), Value::String(d.to_text(&spec.alphabet))))
                .collect();
            let v = json!({
                "cover": cover,
                "weights": side.data.weights.weights,
                "kernel": k.names(),
                "definitions": defs,
                "relator_lifts": texts(&side.relator_lifts.words, k),
                "period_collapse": side.relator_lifts.period_collapse,
                "slope_downstairs": side.downstairs_slope.map(|s| s.to_string()),
                "slope_upstairs": up.map(|s| s.to_string()),
                "slope_lift": side.slope_lift.as_ref().map(|w| w.to_text(k)),
                "disk_words": texts(&side.disk_words, k),
                "longitude_lift": side.longitude_lift.to_text(k),
            });
            Ok(Success { code: 0, body: json_body(&v) })
        }
        Command::Graph(args) => {
            let format = pick_format(cli.format, &[Format::Json, Format::Dot], "graph")?;
            let (a, words) = parse_system(args)?;
            let g = WhiteheadGraph::from_words(&words, a.rank());
            let labels = texts(&words, &a);
            let body = match format {
                Format::Dot => g.to_dot(&a, &labels).into_bytes(),
                _ => {
                    let mut v = g.to_json(&a, &labels);
                    let cut: Vec<String> = g.cut_vertices().into_iter().map(|x| a.vertex_name(x)).collect();
                    v["connected"] = json!(g.is_connected(false));
                    v["cut_vertices"] = json!(cut);
                    json_body(&v)
                }
            };
            Ok(Success { code: 0, body })
        }
        Command::Decide { words: args, bound, require_diskbusting } => {
            let format = pick_format(cli.format, &[Format::Json, Format::Text], "decide")?;
            let (a, words) = parse_system(args)?;
            let d = whitehead::decide_separable(&words, a.rank(), *bound)?;
            diag.note(1, format!("verdict {} after {} states", d.verdict.as_str(), d.states));
            let negative = match d.verdict {
                Verdict::Inconclusive => true,
                Verdict::Separable => *require_diskbusting,
                Verdict::Diskbusting => false,
            };
            let body = match format {
                Format::Text => {
                    let mut s = format!("verdict: {}\n", d.verdict.as_str());
                    for st in &d.trace {
                        s.push_str(&format!("move {} ({} -> {})\n", st.mv.to_text(&a), st.length_before, st.length_after));
                    }
                    s.push_str(&format!("final: {}\n", texts(&d.final_words, &a).join(", ")));
                    s.into_bytes()
                }
                _ => json_body(&certify::decision_json(&d, &a)),
            };
            Ok(Success { code: if negative { 1 } else { 0 }, body })
        }
        Command::Moves { words: args, mv } => {
            pick_format(cli.format, &[Format::Json], "moves")?;
            let (a, words) = parse_system(args)?;
            let m = WhiteheadMove::parse(mv, &a)?;
            let (out, phi) = whitehead::apply_move(&m, &words, a.rank())?;
            let v = json!({
                "move": m.to_text(&a),
                "words": texts(&out, &a),
                "length_before": whitehead::total_length(&words),
                "length_after": whitehead::total_length(&out),
                "automorphism": certify::morphism_json(&phi, &a),
            });
            Ok(Success { code: 0, body: json_body(&v) })
        }
        Command::Certify {
            family,
            n,
            cover,
            slope,
            fixtures,
            side_b_words,
            side_b_alphabet,
            withhold_side_b,
            weak_bound,
            bound,
        } => {
            let format = pick_format(cli.format, &[Format::Json, Format::Text, Format::DotBundle], "certify")?;
            if family != "twist" {
                return Err(Failure::Input(format!("unknown family `{family}` (only `twist` is bundled)")));
            }
            let slope: SlopeParam = slope.parse()?;
            let side_b = if *withhold_side_b {
                SideB::Withheld
            } else if let (Some(words), Some(alpha)) = (side_b_words, side_b_alphabet) {
                let alphabet = Alphabet::parse_list(alpha)?.names().iter().map(|s| s.to_string()).collect();
                SideB::Words { alphabet, words: words.clone() }
            } else if let Some(dir) = fixtures {
                SideB::Fixtures(FixtureSource::Dir(dir.clone()))
            } else {
                SideB::Fixtures(FixtureSource::from_env())
            };
            let opts = CertifyOptions { side_b, weak_bound: *weak_bound, decide_bound: *bound };
            diag.note(1, format!("certifying twist n={n} in the {cover}-fold cover, slope {slope}"));
            let report = match cover {
                3 => certify::certify_theorem1(*n, slope, &opts)?,
                5 => certify::certify_theorem3(*n, slope, &opts)?,
                other => return Err(Failure::Input(format!("--cover must be 3 or 5, got {other}"))),
            };
            for st in &report.steps {
                diag.note(2, format!("{}: {}", st.name, st.verdict));
            }
            let rf = match format {
                Format::Text => ReportFormat::Text,
                Format::DotBundle => ReportFormat::DotBundle,
                _ => ReportFormat::Json,
            };
            let code = if report.overall.certified { 0 } else { 1 };
            Ok(Success { code, body: certify::emit_report(&report, rf) })
        }
        Command::Fixtures { dir } => {
            let format = pick_format(cli.format, &[Format::Json, Format::Text], "fixtures")?;
            let src = match dir {
                Some(d) => FixtureSource::Dir(d.clone()),
                None => FixtureSource::from_env(),
            };
            diag.note(1, format!("fixtures from {}", src.describe()));
            let checks = src
                .load_all()?
                .iter()
                .map(certify::verify_fixture)
                .collect::<Result<Vec<_>, _>>()?;
            let all = checks.iter().all(|c| c.matches_expected);
            let body = match format {
                Format::Text => checks
                    .iter()
                    .map(|c| {
                        format!(
                            "{} {}: connected={} cut_vertices=[{}]\n",
                            if c.matches_expected { "ok  " } else { "FAIL" },
                            c.id,
                            c.connected,
                            c.cut_vertices.join(",")
                        )
                    })
                    .collect::<String>()
                    .into_bytes(),
                _ => json_body(&json!({ "source": src.describe(), "all_match": all, "fixtures": checks })),
            };
            Ok(Success { code: if all { 0 } else { 1 }, body })
        }
    }
}
