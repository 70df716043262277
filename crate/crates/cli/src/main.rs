//! `ssc`: strong structural controllability from the command line.
//!
//! Exit codes: 0 affirmative, 1 negative, 2 input error, 3 internal inconsistency.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ssc_core::graph::ColorTrace;
use ssc_core::network::{
    compare_network, equivalence_sweep, parse_network, NetworkFamily, SweepSummary,
};
use ssc_core::oracle::{exhaustive_small, MonteCarlo, OracleVerdict, ValueGrid, MAX_FREE_ENTRIES};
use ssc_core::rational::rational_string;
use ssc_core::{
    build_graph, colorability, export_dot, parse_pattern, strong_controllability_with,
    weak_controllability, AnalysisOptions, AnalysisReport, Error, Execution, ParseError,
    PatternMatrix, Rational, StructuredSystem,
};

#[derive(Parser, Debug)]
#[command(
    name = "ssc",
    version,
    about = "Strong structural controllability of 0/*/? pattern systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Base seed for Monte Carlo sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Number of Monte Carlo trials.
    #[arg(long, global = true, default_value_t = 200)]
    trials: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
    /// Also write the colored graph as Graphviz text to this path.
    #[arg(long, global = true)]
    dot: Option<PathBuf>,
    /// Compute both color traces even when one is implied.
    #[arg(long, global = true)]
    full: bool,
    /// Compare against zero forcing on every network with at most N nodes.
    #[arg(long, global = true, value_name = "N")]
    sweep: Option<usize>,
    /// Comma-separated grid values for exhaustive enumeration, e.g. `1,-1,2,-2`.
    #[arg(long, global = true, value_name = "LIST")]
    values: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide strong structural controllability of (A, B).
    Check { a: PathBuf, b: Option<PathBuf> },
    /// Run the color change rule on G(M).
    Colorable { m: PathBuf },
    /// Cross-check the pattern verdict with exact random and exhaustive members.
    Oracle { a: PathBuf, b: Option<PathBuf> },
    /// Compare the pattern verdict of a leader network with zero forcing.
    Net { network: Option<PathBuf> },
    /// Decide weak structural controllability of (A, B).
    Weak { a: PathBuf, b: Option<PathBuf> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
    Dot,
}

const EXIT_NEGATIVE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_INCONSISTENT: u8 = 3;

enum Failure {
    Input(String),
    Inconsistent(String),
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Inconsistent(msg)) => {
            eprintln!("inconsistency: {msg}");
            ExitCode::from(EXIT_INCONSISTENT)
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    if cli.format == Format::Dot && !matches!(cli.command, Command::Colorable { .. }) {
        return Err(Failure::Input(
            "`--format dot` is only available for `colorable`".into(),
        ));
    }
    match &cli.command {
        Command::Check { a, b } => cmd_check(cli, &load_system(a, b.as_deref())?),
        Command::Colorable { m } => cmd_colorable(cli, m),
        Command::Oracle { a, b } => cmd_oracle(cli, &load_system(a, b.as_deref())?),
        Command::Net { network } => cmd_net(cli, network.as_deref()),
        Command::Weak { a, b } => cmd_weak(cli, &load_system(a, b.as_deref())?),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

/// 1-based character column of the `k`-th whitespace token on `line`, or of `token`.
fn token_column(line: &str, k: usize, token: &str) -> usize {
    let mut starts = Vec::new();
    let mut in_token = false;
    for (pos, ch) in line.char_indices() {
        if ch.is_whitespace() {
            in_token = false;
        } else if !in_token {
            in_token = true;
            starts.push(pos);
        }
    }
    let byte = starts
        .get(k)
        .filter(|&&s| line[s..].starts_with(token))
        .copied()
        .or_else(|| line.find(token))
        .unwrap_or(0);
    line[..byte].chars().count() + 1
}

fn locate(path: &Path, text: &str, err: &ParseError) -> String {
    let (line, col) = match err {
        ParseError::EmptyInput => (0, 1),
        ParseError::RaggedRows(r) => (*r, 1),
        ParseError::BadToken(r, k, tok) => (
            *r,
            token_column(text.lines().nth(*r).unwrap_or(""), *k, tok),
        ),
        ParseError::BadLine { line, .. } => (*line, 1),
    };
    format!("{}:{}:{}: {err}", path.display(), line + 1, col)
}

fn input_error(path: &Path, text: &str, err: Error) -> Failure {
    match err {
        Error::Parse(p) => Failure::Input(locate(path, text, &p)),
        other => Failure::Input(format!("{}: {other}", path.display())),
    }
}

fn load_pattern(path: &Path) -> Result<PatternMatrix, Failure> {
    let text = read(path)?;
    parse_pattern(&text).map_err(|e| Failure::Input(locate(path, &text, &e)))
}

/// Separate `A` and `B` files, or one file with rows `A-row | B-row`.
fn load_system(a: &Path, b: Option<&Path>) -> Result<StructuredSystem, Failure> {
    match b {
        Some(b) => {
            let (pa, pb) = (load_pattern(a)?, load_pattern(b)?);
            StructuredSystem::new(pa, pb)
                .map_err(|e| Failure::Input(format!("{} / {}: {e}", a.display(), b.display())))
        }
        None => {
            let text = read(a)?;
            StructuredSystem::parse_combined(&text).map_err(|e| input_error(a, &text, e))
        }
    }
}

fn emit_json(v: &Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(v).expect("JSON values serialize")
    );
}

fn push_trace(out: &mut String, trace: &ColorTrace) {
    if trace.changes.is_empty() {
        let _ = writeln!(out, "  (no color changes)");
    }
    for c in &trace.changes {
        let _ = writeln!(out, "  {c}");
    }
}

fn rows_string(m: &ssc_core::RationalMatrix) -> String {
    let rows: Vec<String> = m.to_string_rows().iter().map(|r| r.join(" ")).collect();
    format!("[{}]", rows.join("; "))
}

fn human_report(r: &AnalysisReport) -> String {
    let mut out = String::new();
    let verdict = if r.verdict {
        "controllable"
    } else {
        "not controllable"
    };
    let _ = writeln!(out, "verdict: {verdict}");
    for (name, cond) in [("[A B]", &r.condition1), ("[Ā B]", &r.condition2)] {
        let _ = writeln!(out, "G({name}) colorable: {}", cond.holds);
        match &cond.trace {
            Some(t) => push_trace(&mut out, t),
            None => {
                let _ = writeln!(out, "  (implied by G([Ā B]); no zero on the diagonal of A)");
            }
        }
    }
    if let Some(w) = &r.witness {
        let _ = writeln!(out, "witness:");
        let _ = writeln!(out, "  A0 = {}", rows_string(&w.a0));
        let _ = writeln!(out, "  B0 = {}", rows_string(&w.b0));
        let _ = writeln!(out, "  lambda = {}", rational_string(&w.lambda));
        let x: Vec<String> = w.x.iter().map(rational_string).collect();
        let _ = writeln!(out, "  x = [{}]", x.join(" "));
    }
    out
}

fn exit_for(affirmative: bool) -> u8 {
    if affirmative {
        0
    } else {
        EXIT_NEGATIVE
    }
}

fn cmd_check(cli: &Cli, sys: &StructuredSystem) -> Outcome {
    let opts = AnalysisOptions {
        full_traces: cli.full,
        ..AnalysisOptions::default()
    };
    let report = strong_controllability_with(sys, opts);
    if let Some(w) = &report.witness {
        if !w.verify(sys).unwrap_or(false) {
            return Err(Failure::Inconsistent(
                "the uncontrollability witness fails exact verification".into(),
            ));
        }
    }
    match cli.format {
        Format::Json => emit_json(&serde_json::to_value(&report).expect("report serializes")),
        _ => print!("{}", human_report(&report)),
    }
    Ok(exit_for(report.verdict))
}

fn cmd_colorable(cli: &Cli, path: &Path) -> Outcome {
    let m = load_pattern(path)?;
    let graph = build_graph(&m).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let (colorable, trace) = colorability(&m).expect("shape checked by build_graph");
    let dot = export_dot(&graph, Some(&trace));
    if let Some(out) = &cli.dot {
        fs::write(out, &dot).map_err(|e| Failure::Input(format!("{}: {e}", out.display())))?;
    }
    match cli.format {
        Format::Json => emit_json(&json!({ "colorable": colorable, "trace": trace })),
        Format::Dot => print!("{dot}"),
        Format::Human => {
            let mut out = format!("colorable: {colorable}\n");
            push_trace(&mut out, &trace);
            print!("{out}");
        }
    }
    Ok(exit_for(colorable))
}

fn parse_values(list: &str) -> Result<ValueGrid, Failure> {
    let values = list
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            Rational::from_str(t)
                .map_err(|_| Failure::Input(format!("--values: `{t}` is not a rational")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let grid = ValueGrid::from_values(&values);
    if grid.star.is_empty() {
        return Err(Failure::Input(
            "--values needs at least one nonzero value".into(),
        ));
    }
    Ok(grid)
}

fn verdict_json(v: &OracleVerdict) -> Value {
    serde_json::to_value(v).expect("verdict serializes")
}

fn cmd_oracle(cli: &Cli, sys: &StructuredSystem) -> Outcome {
    let grid = match &cli.values {
        Some(list) => parse_values(list)?,
        None => ValueGrid::default(),
    };
    let report = strong_controllability_with(sys, AnalysisOptions::default());
    let expected = report.verdict;
    let mut mc = MonteCarlo::new(cli.trials, cli.seed);
    if let Some(w) = &report.witness {
        mc = mc.inject(w.a0.clone(), w.b0.clone());
    }
    let monte_carlo = mc
        .run(sys, expected)
        .map_err(|e| Failure::Inconsistent(format!("witness rejected by the oracle: {e}")))?;
    let free = sys.a().free_entries() + sys.b().free_entries();
    let exhaustive = if free <= MAX_FREE_ENTRIES {
        Some(exhaustive_small(sys, &grid, expected, Execution::default()).expect("size checked"))
    } else {
        None
    };

    let mut problems = Vec::new();
    if !monte_carlo.agrees {
        problems.push("Monte Carlo result contradicts the pattern verdict");
    }
    if exhaustive
        .as_ref()
        .is_some_and(|e| e.contradicts_positive(expected))
    {
        problems.push("exhaustive grid found an uncontrollable member of a controllable system");
    }
    // Finding nothing on a finite grid does not refute a negative verdict.
    let exhaustive_status = match &exhaustive {
        None => "skipped",
        Some(e) if e.agrees => "agrees",
        Some(e) if e.contradicts_positive(expected) => "disagrees",
        Some(_) => "inconclusive",
    };

    match cli.format {
        Format::Json => emit_json(&json!({
            "pattern_verdict": expected,
            "monte_carlo": verdict_json(&monte_carlo),
            "exhaustive": exhaustive.as_ref().map(verdict_json),
            "exhaustive_status": exhaustive_status,
            "consistent": problems.is_empty(),
        })),
        _ => {
            let mut out = String::new();
            let verdict = if expected {
                "controllable"
            } else {
                "not controllable"
            };
            let _ = writeln!(out, "pattern verdict: {verdict}");
            let _ = writeln!(
                out,
                "monte carlo: {} trials (seed {}), {}",
                monte_carlo.trials,
                cli.seed,
                oracle_line(&monte_carlo)
            );
            match &exhaustive {
                Some(e) => {
                    let _ = writeln!(
                        out,
                        "exhaustive: {} assignments, {} ({exhaustive_status})",
                        e.trials,
                        oracle_line(e)
                    );
                }
                None => {
                    let _ = writeln!(
                        out,
                        "exhaustive: skipped ({free} free entries > {MAX_FREE_ENTRIES})"
                    );
                }
            }
            let _ = writeln!(
                out,
                "{}",
                if problems.is_empty() {
                    "agrees"
                } else {
                    "DISAGREES"
                }
            );
            print!("{out}");
        }
    }
    if problems.is_empty() {
        Ok(0)
    } else {
        Err(Failure::Inconsistent(problems.join("; ")))
    }
}

fn oracle_line(v: &OracleVerdict) -> String {
    match &v.counterexample {
        None => "no uncontrollable member".to_string(),
        Some(c) => format!(
            "uncontrollable member at index {}: A0 = {}, B0 = {}",
            c.index,
            rows_string(&c.a),
            rows_string(&c.b)
        ),
    }
}

fn family_name(f: NetworkFamily) -> &'static str {
    match f {
        NetworkFamily::Star => "star (loops allowed, loopy zero forcing)",
        NetworkFamily::Qdiag => "qdiag (loops forbidden, ordinary zero forcing)",
    }
}

fn cmd_net(cli: &Cli, path: Option<&Path>) -> Outcome {
    match (path, cli.sweep) {
        (Some(path), None) => {
            let text = read(path)?;
            let file = parse_network(&text).map_err(|e| input_error(path, &text, e))?;
            let c = compare_network(&file.network, file.family)
                .map_err(|e| Failure::Input(e.to_string()))?;
            match cli.format {
                Format::Json => emit_json(&json!({
                    "family": c.family,
                    "pattern_verdict": c.pattern_verdict,
                    "graph_verdict": c.graph_verdict,
                    "match": c.matches(),
                })),
                _ => print!(
                    "family: {}\npattern verdict: {}\nzero forcing verdict: {}\nmatch: {}\n",
                    family_name(c.family),
                    c.pattern_verdict,
                    c.graph_verdict,
                    if c.matches() { "yes" } else { "NO" }
                ),
            }
            if c.matches() {
                Ok(exit_for(c.pattern_verdict))
            } else {
                Err(Failure::Inconsistent(
                    "pattern and zero forcing verdicts differ".into(),
                ))
            }
        }
        (None, Some(n)) => {
            let summary = equivalence_sweep(n, Execution::default());
            print_sweep(cli, &summary);
            if summary.mismatches.is_empty() {
                Ok(0)
            } else {
                Err(Failure::Inconsistent(format!(
                    "{} mismatches",
                    summary.mismatches.len()
                )))
            }
        }
        _ => Err(Failure::Input(
            "`net` takes either a network file or `--sweep N`".into(),
        )),
    }
}

fn print_sweep(cli: &Cli, s: &SweepSummary) {
    match cli.format {
        Format::Json => emit_json(&serde_json::to_value(s).expect("summary serializes")),
        _ => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "networks with at most {} nodes, every nonempty leader set",
                s.max_nodes
            );
            let _ = writeln!(out, "star family:  {} cases", s.star_cases);
            let _ = writeln!(out, "qdiag family: {} cases", s.qdiag_cases);
            let _ = writeln!(out, "mismatches: {}", s.mismatches.len());
            for m in &s.mismatches {
                let _ = writeln!(
                    out,
                    "  {:?} n={} edges={:?} leaders={:?}: pattern {} vs zero forcing {}",
                    m.family, m.node_count, m.edges, m.leaders, m.pattern_verdict, m.graph_verdict
                );
            }
            print!("{out}");
        }
    }
}

fn cmd_weak(cli: &Cli, sys: &StructuredSystem) -> Outcome {
    let weak = weak_controllability(sys);
    match cli.format {
        Format::Json => emit_json(&json!({ "weakly_controllable": weak })),
        _ => println!("weakly controllable: {weak}"),
    }
    Ok(exit_for(weak))
}
