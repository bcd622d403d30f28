//! The `setmatch` command line.
//!
//! Exit codes: 0 on success, 1 when `match --verify` finds a disagreement
//! with the brute-force matcher, 2 for usage, I/O and parse errors.

use std::fmt::Write as _;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::automaton::{build, BuildOptions, LabelStrategy, SetAutomaton};
use crate::dot::to_dot;
use crate::eval::{evaluate, EvalOptions, MatchReport, Strategy};
use crate::oracle::{brute_force_inspections, brute_force_matches, random_instance, InstanceConfig, SignatureProfile};
use crate::serial::{deserialize, serialize};
use crate::term::{parse_term_in, ParseOptions, PatternSet, Signature, Term};

#[derive(Parser, Debug)]
#[command(name = "setmatch", version, about = "Compile term patterns into set automata and find every match")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build an automaton from a pattern file and write it as JSON.
    Compile(CompileArgs),
    /// Find all matches of a compiled automaton in a subject term.
    Match(MatchArgs),
    /// Render a compiled automaton as Graphviz.
    ExportDot(ExportDotArgs),
    /// Automaton sizes for the t_n family, or evaluator vs. brute force timings.
    Bench(BenchArgs),
    /// Write a reproducible random instance to a directory.
    Gen(GenArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LabelArg {
    Leftmost,
    Rightmost,
}

impl From<LabelArg> for LabelStrategy {
    fn from(l: LabelArg) -> Self {
        match l {
            LabelArg::Leftmost => LabelStrategy::Leftmost,
            LabelArg::Rightmost => LabelStrategy::Rightmost,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    #[value(alias = "dfs")]
    DepthFirst,
    #[value(alias = "bfs")]
    BreadthFirst,
    Parallel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProfileArg {
    Small,
    Mixed,
}

impl From<ProfileArg> for SignatureProfile {
    fn from(p: ProfileArg) -> Self {
        match p {
            ProfileArg::Small => SignatureProfile::small(),
            ProfileArg::Mixed => SignatureProfile::mixed(),
        }
    }
}

#[derive(Args, Debug)]
pub struct CompileArgs {
    /// One pattern per line; `#` starts a comment line.
    #[arg(long)]
    pub patterns: PathBuf,
    /// `name/arity` per line. Inferred from the patterns when omitted.
    #[arg(long)]
    pub signature: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = LabelArg::Rightmost)]
    pub label: LabelArg,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct MatchArgs {
    #[arg(long)]
    pub automaton: PathBuf,
    /// Subject term file, or `-` for stdin.
    #[arg(long)]
    pub term: String,
    #[arg(long, value_enum, default_value_t = StrategyArg::DepthFirst)]
    pub strategy: StrategyArg,
    /// Worker threads for the parallel strategy.
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
    pub workers: u32,
    /// Cross-check against the brute-force matcher; exit 1 on mismatch.
    #[arg(long)]
    pub verify: bool,
    /// Print inspection and work-item counts to stderr.
    #[arg(long)]
    pub stats: bool,
    /// Emit matches as JSON announcements instead of text lines.
    #[arg(long)]
    pub json: bool,
    /// Carry subterm references with work items.
    #[arg(long)]
    pub cache: bool,
}

#[derive(Args, Debug)]
pub struct ExportDotArgs {
    #[arg(long)]
    pub automaton: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    /// t_0 = _, t_{n+1} = f(t_n, g(_)).
    Tn,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long, value_enum, conflicts_with = "random")]
    pub family: Option<FamilyArg>,
    #[arg(long, default_value_t = 8)]
    pub n_max: usize,
    /// Restrict the size table to one strategy.
    #[arg(long, value_enum)]
    pub label: Option<LabelArg>,
    /// Random mode: seed of the first instance.
    #[arg(long)]
    pub random: Option<u64>,
    #[arg(long, default_value_t = 100)]
    pub count: u64,
    #[arg(long, default_value_t = 8)]
    pub patterns: usize,
    #[arg(long, default_value_t = 4)]
    pub depth: usize,
    #[arg(long, default_value_t = 200)]
    pub subject_size: usize,
    #[arg(long, value_enum, default_value_t = ProfileArg::Small)]
    pub profile: ProfileArg,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 3)]
    pub patterns: usize,
    #[arg(long, default_value_t = 3)]
    pub depth: usize,
    #[arg(long, default_value_t = 50)]
    pub subject_size: usize,
    #[arg(long, value_enum, default_value_t = ProfileArg::Small)]
    pub profile: ProfileArg,
    /// Receives `patterns.txt`, `signature.txt` and `subject.txt`.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug)]
enum CliError {
    /// Bad input: exit code 2.
    Input(String),
    /// Verification failed: exit code 1.
    Mismatch(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Mismatch(_) => 1,
            CliError::Input(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Mismatch(m) => m,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn input<E: std::fmt::Display>(context: impl std::fmt::Display) -> impl FnOnce(E) -> CliError {
    move |e| CliError::Input(format!("{context}: {e}"))
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(input(path.display()))
}

fn write(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(input(path.display()))
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code. `stdin` is read only for `match --term -`.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(rendered.as_bytes())
            } else {
                stdout.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Compile(a) => compile(&a, stdout),
        Command::Match(a) => run_match(&a, stdin, stdout, stderr),
        Command::ExportDot(a) => export_dot(&a, stdout),
        Command::Bench(a) => bench(&a, stdout),
        Command::Gen(a) => gen(&a, stdout),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            e.code()
        }
    }
}

fn compile(args: &CompileArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let text = read(&args.patterns)?;
    let signature = match &args.signature {
        Some(path) => Some(Signature::parse(&read(path)?).map_err(input(path.display()))?),
        None => None,
    };
    let patterns = PatternSet::parse(&text, signature).map_err(input(args.patterns.display()))?;
    let automaton = build(&patterns, BuildOptions::with_strategy(args.label.into()))
        .map_err(input("construction failed"))?;
    write(&args.out, &serialize(&automaton))?;
    let _ = writeln!(stdout, "states: {}", automaton.state_count());
    let _ = writeln!(stdout, "transitions: {}", automaton.target_count());
    Ok(())
}

fn load_automaton(path: &Path) -> CliResult<SetAutomaton> {
    deserialize(&read(path)?).map_err(input(path.display()))
}

fn read_subject(a: &SetAutomaton, spec: &str, stdin: &mut dyn Read) -> CliResult<Term> {
    let text = if spec == "-" {
        let mut s = String::new();
        stdin.read_to_string(&mut s).map_err(input("stdin"))?;
        s
    } else {
        read(Path::new(spec))?
    };
    parse_term_in(text.trim(), a.signature(), ParseOptions::SUBJECT).map_err(input(spec))
}

/// `<pattern> @ <position>` lines, sorted.
pub fn format_matches(a: &SetAutomaton, report: &MatchReport) -> String {
    let mut lines: Vec<String> = report
        .matches
        .iter()
        .map(|m| format!("{} @ {}", a.patterns().canonical(m.pattern), m.position))
        .collect();
    lines.sort();
    let mut out = String::new();
    for l in lines {
        out.push_str(&l);
        out.push('\n');
    }
    out
}

fn matches_json(report: &MatchReport) -> String {
    let items: Vec<serde_json::Value> = report
        .matches
        .iter()
        .map(|m| serde_json::json!({ "pattern": m.pattern.0, "pos": m.position.indices() }))
        .collect();
    let mut s = serde_json::to_string_pretty(&items).expect("plain JSON values encode");
    s.push('\n');
    s
}

fn run_match(args: &MatchArgs, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let automaton = load_automaton(&args.automaton)?;
    let subject = read_subject(&automaton, &args.term, stdin)?;
    let strategy = match args.strategy {
        StrategyArg::DepthFirst => Strategy::DepthFirst,
        StrategyArg::BreadthFirst => Strategy::BreadthFirst,
        StrategyArg::Parallel => Strategy::Parallel(args.workers as usize),
    };
    let options = EvalOptions {
        strategy,
        instrument: args.stats,
        cache_subterms: args.cache,
    };
    let report = evaluate(&automaton, &subject, &options).map_err(input("evaluation failed"))?;
    let rendered = if args.json {
        matches_json(&report)
    } else {
        format_matches(&automaton, &report)
    };
    let _ = stdout.write_all(rendered.as_bytes());
    if args.stats {
        let _ = writeln!(stderr, "inspections: {}", report.count_inspections());
        let _ = writeln!(stderr, "nodes: {}", report.node_count);
        let _ = writeln!(stderr, "subject size: {}", subject.size());
        let _ = writeln!(stderr, "matches: {}", report.matches.len());
    }
    if args.verify {
        let expected = brute_force_matches(automaton.patterns(), &subject);
        let mut found: Vec<_> = report.matches.iter().map(|m| (m.pattern, m.position.clone())).collect();
        found.sort();
        if found != expected {
            let mut msg = String::from("automaton and brute-force matcher disagree");
            for (p, pos) in expected.iter().filter(|e| !found.contains(e)) {
                let _ = write!(msg, "\n  missing: {} @ {}", automaton.patterns().canonical(*p), pos);
            }
            for (p, pos) in found.iter().filter(|f| !expected.contains(f)) {
                let _ = write!(msg, "\n  spurious: {} @ {}", automaton.patterns().canonical(*p), pos);
            }
            return Err(CliError::Mismatch(msg));
        }
        let _ = writeln!(stderr, "verified: {} matches", found.len());
    }
    Ok(())
}

fn export_dot(args: &ExportDotArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let automaton = load_automaton(&args.automaton)?;
    write(&args.out, &to_dot(&automaton))?;
    let _ = writeln!(stdout, "wrote {}", args.out.display());
    Ok(())
}

/// `t_0 = _` and `t_{n+1} = f(t_n, g(_))` over `f/2, g/1, a/0`. Requires
/// `n ≥ 1`, since `t_0` is not a pattern.
pub fn tn_family(n: usize) -> PatternSet {
    let mut text = String::from("_");
    for _ in 0..n {
        text = format!("f({text},g(_))");
    }
    let sig = Signature::parse("f/2\ng/1\na/0\n").expect("fixed signature");
    PatternSet::from_strs(sig, &[text.as_str()]).expect("t_n is a valid pattern for n >= 1")
}

fn bench(args: &BenchArgs, stdout: &mut dyn Write) -> CliResult<()> {
    if let Some(seed) = args.random {
        return bench_random(args, seed, stdout);
    }
    if args.family.is_none() {
        return Err(CliError::Input("bench needs --family tn or --random SEED".into()));
    }
    let strategies: Vec<LabelStrategy> = match args.label {
        Some(l) => vec![l.into()],
        None => vec![LabelStrategy::Rightmost, LabelStrategy::Leftmost],
    };
    let mut header = String::from("n");
    for s in &strategies {
        let _ = write!(header, "\t{}", if *s == LabelStrategy::Rightmost { "rightmost" } else { "leftmost" });
    }
    let _ = writeln!(stdout, "{header}");
    for n in 1..=args.n_max {
        let ps = tn_family(n);
        let mut row = n.to_string();
        for s in &strategies {
            let a = build(&ps, BuildOptions::with_strategy(*s)).map_err(input("construction failed"))?;
            let _ = write!(row, "\t{}", a.state_count());
        }
        let _ = writeln!(stdout, "{row}");
    }
    Ok(())
}

fn bench_random(args: &BenchArgs, seed: u64, stdout: &mut dyn Write) -> CliResult<()> {
    let config = InstanceConfig {
        profile: args.profile.into(),
        pattern_count: args.patterns,
        pattern_depth: args.depth,
        subject_size: args.subject_size,
        ..InstanceConfig::default()
    };
    let (mut t_build, mut t_eval, mut t_oracle) = (0f64, 0f64, 0f64);
    let (mut insp_eval, mut insp_oracle, mut states, mut matches) = (0usize, 0usize, 0usize, 0usize);
    for k in 0..args.count {
        let (ps, subject) = random_instance(seed.wrapping_add(k), &config);
        let start = Instant::now();
        let a = build(&ps, BuildOptions::default()).map_err(input("construction failed"))?;
        t_build += start.elapsed().as_secs_f64();
        states += a.state_count();
        let start = Instant::now();
        let report = evaluate(&a, &subject, &EvalOptions::default().instrumented())
            .map_err(input("evaluation failed"))?;
        t_eval += start.elapsed().as_secs_f64();
        let start = Instant::now();
        let expected = brute_force_matches(&ps, &subject);
        t_oracle += start.elapsed().as_secs_f64();
        insp_eval += report.count_inspections();
        insp_oracle += brute_force_inspections(&ps, &subject);
        matches += expected.len();
        if expected.len() != report.matches.len() {
            return Err(CliError::Mismatch(format!("instance {} disagrees with the oracle", seed.wrapping_add(k))));
        }
    }
    let _ = writeln!(stdout, "instances: {}", args.count);
    let _ = writeln!(stdout, "states: {states}");
    let _ = writeln!(stdout, "matches: {matches}");
    let _ = writeln!(stdout, "build time: {:.3} ms", t_build * 1e3);
    let _ = writeln!(stdout, "automaton time: {:.3} ms", t_eval * 1e3);
    let _ = writeln!(stdout, "brute-force time: {:.3} ms", t_oracle * 1e3);
    let _ = writeln!(stdout, "automaton inspections: {insp_eval}");
    let _ = writeln!(stdout, "brute-force inspections: {insp_oracle}");
    Ok(())
}

fn gen(args: &GenArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let config = InstanceConfig {
        profile: args.profile.into(),
        pattern_count: args.patterns,
        pattern_depth: args.depth,
        subject_size: args.subject_size,
        ..InstanceConfig::default()
    };
    let (ps, subject) = random_instance(args.seed, &config);
    fs::create_dir_all(&args.out_dir).map_err(input(args.out_dir.display()))?;
    let mut patterns = String::new();
    for id in ps.ids() {
        patterns.push_str(&ps.canonical(id));
        patterns.push('\n');
    }
    write(&args.out_dir.join("patterns.txt"), &patterns)?;
    write(&args.out_dir.join("signature.txt"), &ps.signature().to_file_text())?;
    write(
        &args.out_dir.join("subject.txt"),
        &format!("{}\n", subject.display(ps.signature())),
    )?;
    let _ = writeln!(
        stdout,
        "wrote {} patterns and a subject of size {} to {}",
        ps.len(),
        subject.size(),
        args.out_dir.display()
    );
    Ok(())
}
