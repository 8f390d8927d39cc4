//! The `lcfrs` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::rngs::StdRng;
use rand::SeedableRng;
use serde::Serialize;

use crate::boolean::Backend;
use crate::bundled;
use crate::error::{Error, Result};
use crate::grammar::{parse_grammar, AnalysisReport, Grammar, DEFAULT_OMEGA};
use crate::oracle::tabular_recognize;
use crate::recognizer::{
    derive, extract_derivation, recognize, ClosureAlgorithm, DerivationNode, Multiplier, Options,
    RecognitionPath, Stats,
};
use crate::sample::{sample_sentence, LengthTable};

pub const EXIT_ACCEPT: i32 = 0;
pub const EXIT_REJECT: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

pub const BENCH_HEADER: &str = "grammar,n,engine,backend,closure,ms,facts,muls";

#[derive(Parser, Debug)]
#[command(name = "lcfrs", version, about = "Binary LCFRS recognition by Boolean matrix multiplication")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fan-out, contact rank, balance and predicted exponents.
    Analyze(Common),
    /// Print ACCEPT or REJECT.
    Recognize(SentenceArgs),
    /// Print a derivation as JSON, or `null`.
    Parse(SentenceArgs),
    /// Time recognition over a sweep of sentence lengths.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// Grammar file, or `bundled:NAME`.
    #[arg(long, short)]
    grammar: String,
    #[arg(long)]
    json: bool,
    #[arg(long, default_value_t = DEFAULT_OMEGA)]
    omega: f64,
}

#[derive(Args, Debug)]
struct EngineArgs {
    #[arg(long, value_enum, default_value_t = Engine::Matmul)]
    engine: Engine,
    #[arg(long, value_enum, default_value_t = BackendArg::Bitset)]
    backend: BackendArg,
    #[arg(long, value_enum, default_value_t = ClosureArg::Fixpoint)]
    closure: ClosureArg,
}

#[derive(Args, Debug)]
struct SentenceArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    engine: EngineArgs,
    /// Whitespace-separated tokens.
    #[arg(long, short, conflicts_with = "sentence_file")]
    sentence: Option<String>,
    #[arg(long)]
    sentence_file: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    engine: EngineArgs,
    /// Longest sentence in the sweep 4, 8, 16, 32, ...
    #[arg(long, default_value_t = 16)]
    max_len: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Engine {
    Matmul,
    Tabular,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BackendArg {
    Naive,
    Bitset,
    Strassen,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ClosureArg {
    Fixpoint,
    Valiant,
}

impl EngineArgs {
    fn options(&self) -> Options {
        let backend = match self.backend {
            BackendArg::Naive => Backend::Naive,
            BackendArg::Bitset => Backend::Bitset,
            BackendArg::Strassen => Backend::STRASSEN,
        };
        let closure = match self.closure {
            ClosureArg::Fixpoint => ClosureAlgorithm::Fixpoint,
            ClosureArg::Valiant => ClosureAlgorithm::Valiant,
        };
        Options {
            multiplier: Multiplier::Boolean(backend),
            closure,
        }
    }

    fn engine_name(&self) -> &'static str {
        match self.engine {
            Engine::Matmul => "matmul",
            Engine::Tabular => "tabular",
        }
    }
}

fn load_grammar(source: &str) -> Result<(String, Grammar)> {
    if let Some(name) = source.strip_prefix("bundled:") {
        let src = bundled::source(name).ok_or_else(|| {
            let known: Vec<_> = bundled::names().collect();
            Error::Precondition(format!("no bundled grammar `{name}` ({})", known.join(", ")))
        })?;
        return Ok((name.to_string(), parse_grammar(src)?));
    }
    let text = std::fs::read_to_string(source)?;
    let name = std::path::Path::new(source)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| source.to_string());
    Ok((name, parse_grammar(&text)?))
}

fn tokens(text: &str) -> Vec<String> {
    text.split_whitespace().map(String::from).collect()
}

impl SentenceArgs {
    fn sentence(&self) -> Result<Vec<String>> {
        match (&self.sentence, &self.sentence_file) {
            (Some(s), _) => Ok(tokens(s)),
            (None, Some(p)) => Ok(tokens(&std::fs::read_to_string(p)?)),
            (None, None) => Err(Error::Precondition("one of --sentence or --sentence-file is required".into())),
        }
    }
}

#[derive(Serialize)]
struct Verdict<'a> {
    accepted: bool,
    engine: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    path: Option<RecognitionPath>,
    #[serde(skip_serializing_if = "Option::is_none")]
    converted: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stats: Option<Stats>,
}

struct Outcome {
    accepted: bool,
    path: Option<RecognitionPath>,
    converted: Option<bool>,
    stats: Option<Stats>,
    derivation: Option<DerivationNode>,
    facts: usize,
    multiplications: usize,
}

fn run_engine(g: &Grammar, sentence: &[String], args: &EngineArgs, want_tree: bool) -> Result<Outcome> {
    match args.engine {
        Engine::Tabular => {
            let chart = tabular_recognize(g, sentence);
            let accepted = chart.accepted();
            let derivation = if want_tree && accepted {
                Some(derive(g, sentence, &chart.items).ok_or_else(|| {
                    Error::Internal("accepted input has no derivation in the chart".into())
                })?)
            } else {
                None
            };
            Ok(Outcome {
                accepted,
                path: None,
                converted: None,
                stats: None,
                derivation,
                facts: chart.len(),
                multiplications: 0,
            })
        }
        Engine::Matmul => {
            let rec = recognize(g, sentence, args.options())?;
            let derivation = if want_tree { extract_derivation(&rec)? } else { None };
            Ok(Outcome {
                accepted: rec.accepted,
                path: Some(rec.path),
                converted: Some(rec.converted),
                facts: rec.stats.facts,
                multiplications: rec.stats.multiplications,
                stats: Some(rec.stats),
                derivation,
            })
        }
    }
}

fn cmd_analyze(c: &Common, out: &mut dyn Write) -> Result<i32> {
    let (_, g) = load_grammar(&c.grammar)?;
    let report = AnalysisReport::new(&g, c.omega);
    if c.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("report serializes"))?;
    } else {
        write!(out, "{}", report.to_text())?;
    }
    Ok(EXIT_ACCEPT)
}

fn cmd_recognize(a: &SentenceArgs, out: &mut dyn Write) -> Result<i32> {
    let (_, g) = load_grammar(&a.common.grammar)?;
    let s = a.sentence()?;
    let o = run_engine(&g, &s, &a.engine, false)?;
    if a.common.json {
        let v = Verdict {
            accepted: o.accepted,
            engine: a.engine.engine_name(),
            path: o.path,
            converted: o.converted,
            stats: o.stats,
        };
        writeln!(out, "{}", serde_json::to_string(&v).expect("verdict serializes"))?;
    } else {
        writeln!(out, "{}", if o.accepted { "ACCEPT" } else { "REJECT" })?;
    }
    Ok(if o.accepted { EXIT_ACCEPT } else { EXIT_REJECT })
}

fn cmd_parse(a: &SentenceArgs, out: &mut dyn Write) -> Result<i32> {
    let (_, g) = load_grammar(&a.common.grammar)?;
    let s = a.sentence()?;
    let o = run_engine(&g, &s, &a.engine, true)?;
    let json = match &o.derivation {
        Some(d) => serde_json::to_string_pretty(d).expect("derivation serializes"),
        None => "null".to_string(),
    };
    writeln!(out, "{json}")?;
    Ok(if o.accepted { EXIT_ACCEPT } else { EXIT_REJECT })
}

fn cmd_bench(a: &BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let (name, g) = load_grammar(&a.common.grammar)?;
    let table = LengthTable::new(&g, a.max_len);
    let lengths = table.sentence_lengths(&g);
    let mut rng = StdRng::seed_from_u64(a.seed);
    let opts = a.engine.options();
    let mut rows = vec![BENCH_HEADER.to_string()];
    let mut target = 4;
    let mut seen = Vec::new();
    while target <= a.max_len {
        let n = lengths.iter().copied().filter(|&l| l <= target).max();
        target *= 2;
        let Some(n) = n.filter(|n| !seen.contains(n)) else {
            continue;
        };
        seen.push(n);
        let Some(s) = sample_sentence(&g, &table, n, &mut rng) else {
            continue;
        };
        let t0 = Instant::now();
        let o = match run_engine(&g, &s, &a.engine, false) {
            Ok(o) => o,
            Err(e @ Error::Limit(_)) => {
                writeln!(err, "skipping n = {n}: {e}")?;
                continue;
            }
            Err(e) => return Err(e),
        };
        let ms = t0.elapsed().as_secs_f64() * 1e3;
        if !o.accepted {
            return Err(Error::Internal(format!("sampled sentence of length {n} was rejected")));
        }
        rows.push(format!(
            "{name},{n},{},{},{},{ms:.3},{},{}",
            a.engine.engine_name(),
            opts.multiplier,
            opts.closure.name(),
            o.facts,
            o.multiplications
        ));
    }
    writeln!(out, "{}", rows.join("\n"))?;
    Ok(EXIT_ACCEPT)
}

/// Runs one command and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_ACCEPT };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    let res = match &cli.command {
        Command::Analyze(c) => cmd_analyze(c, out),
        Command::Recognize(a) => cmd_recognize(a, out),
        Command::Parse(a) => cmd_parse(a, out),
        Command::Bench(a) => cmd_bench(a, out, err),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut argv = vec!["lcfrs"];
        argv.extend_from_slice(args);
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn verdicts() {
        let (c, o, _) = call(&["recognize", "-g", "bundled:count4", "-s", "a b c d"]);
        assert_eq!((c, o.trim()), (0, "ACCEPT"));
        let (c, o, _) = call(&["recognize", "-g", "bundled:count4", "-s", "a c b d"]);
        assert_eq!((c, o.trim()), (1, "REJECT"));
    }

    #[test]
    fn errors_exit_2() {
        assert_eq!(call(&["recognize", "-g", "/nonexistent/x.lcfrs", "-s", "a"]).0, 2);
        assert_eq!(call(&["recognize", "-g", "bundled:nope", "-s", "a"]).0, 2);
        assert_eq!(call(&["recognize", "-g", "bundled:count4"]).0, 2);
        assert_eq!(call(&["recognize", "-g", "bundled:count4", "-s", "a", "--backend", "x"]).0, 2);
        assert_eq!(call(&["frobnicate"]).0, 2);
    }

    #[test]
    fn help_exits_0() {
        let (c, o, _) = call(&["--help"]);
        assert_eq!(c, 0);
        assert!(o.contains("recognize"));
    }
}
