use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use mpg::belief::build_belief_game;
use mpg::classify::{is_fac, is_forcibly_fac, is_forcibly_terminating_bounded, is_visible_weights, Termination};
use mpg::cycle_game::{solve_gamma_prime_tree, verdict_of, Player};
use mpg::format::{load_game, render_game, to_dot};
use mpg::generators::{builtin_game, gen_expmem, gen_hamiltonian, gen_qbf, parse_graph, parse_qbf, QbfVariant, BUILTIN_NAMES};
use mpg::safety::safety_verdict;
use mpg::sim::{simulate, AdamPolicy, EvePolicy, ScriptedStrategy};
use mpg::strategy::{
    check_adam_machine, extract_adam_machine, extract_eve_machine, parse_strategy, render_strategy, search_positional,
    verify_eve_machine, verify_positional, Counterexample, PositionalStrategy, Strategy,
};
use mpg::{Game, MpgError, SuccessorMode, VerdictTag, Witness};

const EXIT_EVE: u8 = 0;
const EXIT_INTERNAL: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_ADAM: u8 = 10;
const EXIT_OTHER: u8 = 20;

/// Horizon of the exhaustive check run by `verify` on Adam machines.
const ADAM_VERIFY_HORIZON: usize = 10;

#[derive(Parser)]
#[command(name = "mpg", version, about = "Mean-payoff games with limited observation")]
struct Cli {
    /// Print only stable `key: value` lines.
    #[arg(long, global = true)]
    porcelain: bool,
    /// Worker threads for parallel solvers (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Proper,
    Masked,
}

impl From<ModeArg> for SuccessorMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Proper => SuccessorMode::Proper,
            ModeArg::Masked => SuccessorMode::Masked,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    GammaPrime,
    Safety,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Membership,
    Winner,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a game and report its shape.
    Validate { game: String },
    /// Write the limited-observation belief game.
    Belief {
        game: String,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// FAC, forcibly-FAC and related class checks.
    Classify {
        game: String,
        #[arg(long, value_enum, default_value = "proper")]
        mode: ModeArg,
        /// Also run the depth-bounded forcibly-terminating check.
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Decide the winner.
    Solve {
        game: String,
        #[arg(long, value_enum, default_value = "gamma-prime")]
        method: MethodArg,
        #[arg(long, value_enum, default_value = "proper")]
        mode: ModeArg,
    },
    /// Synthesize a winning strategy file.
    Synth {
        game: String,
        #[arg(short, long)]
        output: PathBuf,
        /// Search for a positional strategy instead of a memory machine.
        #[arg(long)]
        positional: bool,
    },
    /// Check a strategy file against a game.
    Verify { game: String, strategy: PathBuf },
    /// Play a game between two strategies and print the trace.
    Simulate {
        game: String,
        /// synth | safety | file:PATH | periodic:U/V | triangular:A,B
        #[arg(long)]
        eve: String,
        /// synth | file:PATH | random | greedy-min | concrete
        #[arg(long)]
        adam: String,
        #[arg(long)]
        horizon: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Generate a game.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Graphviz export.
    Dot {
        game: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GenKind {
    /// Reduction from a QBF file (`exists x`, `forall y`, `clause x -y`).
    Qbf {
        formula: PathBuf,
        #[arg(long, value_enum, default_value = "winner")]
        variant: VariantArg,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Reduction from a graph file (`vertex a b c`, `edge a b`).
    Hamilton {
        graph: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Winner-variant family whose Eve strategies need exponential memory.
    Expmem {
        n: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// One of the built-in example games.
    Builtin {
        name: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Mpg(#[from] MpgError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Mpg(MpgError::Parse { .. }) | CliError::Mpg(MpgError::UnknownName(_)) | CliError::Usage(_) => {
                EXIT_PARSE
            }
            _ => EXIT_INTERNAL,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Collected output; human mode adds free-form notes to the key lines.
struct Report {
    porcelain: bool,
    lines: Vec<String>,
}

impl Report {
    fn kv(&mut self, key: &str, value: impl std::fmt::Display) {
        self.lines.push(format!("{key}: {value}"));
    }

    fn note(&mut self, text: impl Into<String>) {
        if !self.porcelain {
            self.lines.push(text.into());
        }
    }
}

fn verdict_exit(tag: VerdictTag) -> u8 {
    match tag {
        VerdictTag::EveWins => EXIT_EVE,
        VerdictTag::AdamWins => EXIT_ADAM,
        VerdictTag::Neither | VerdictTag::Unknown => EXIT_OTHER,
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

/// A path to a game file, or the name of a built-in game.
fn load(arg: &str) -> CliResult<Game> {
    let path = Path::new(arg);
    if path.exists() {
        return Ok(load_game(&read(path)?)?);
    }
    if BUILTIN_NAMES.contains(&arg) {
        return Ok(builtin_game(arg)?);
    }
    Err(MpgError::UnknownName(format!("{arg} is neither a file nor a built-in game ({})", BUILTIN_NAMES.join(", "))).into())
}

fn emit(out: Option<&Path>, text: &str, rep: &mut Report) -> CliResult<()> {
    match out {
        Some(p) => {
            write(p, text)?;
            rep.kv("written", p.display());
        }
        None => rep.lines.push(text.trim_end().to_string()),
    }
    Ok(())
}

fn cmd_validate(arg: &str, rep: &mut Report) -> CliResult<u8> {
    let g = load(arg)?;
    rep.kv("valid", true);
    rep.kv("name", g.name());
    rep.kv("states", g.num_states());
    rep.kv("actions", g.num_actions());
    rep.kv("observations", g.num_obs());
    let lim = g.check_limited();
    rep.kv("limited", lim.is_limited());
    if let Err(e) = g.require_limited() {
        rep.note(format!("note: {e}"));
    }
    rep.kv("visible-weights", is_visible_weights(&g));
    Ok(EXIT_EVE)
}

fn cmd_belief(arg: &str, output: &Path, rep: &mut Report) -> CliResult<u8> {
    let g = load(arg)?;
    let b = build_belief_game(&g)?;
    write(output, &render_game(&b))?;
    rep.kv("states", b.num_states());
    rep.kv("observations", b.num_obs());
    rep.kv("written", output.display());
    Ok(EXIT_EVE)
}

fn cmd_classify(arg: &str, mode: SuccessorMode, depth: Option<usize>, rep: &mut Report) -> CliResult<u8> {
    let g = load(arg)?;
    let limited = g.check_limited().is_limited();
    rep.kv("limited", limited);
    rep.kv("visible-weights", is_visible_weights(&g));
    let (g, prefix) = if limited { (g, "") } else { (build_belief_game(&g)?, "belief-") };
    if !limited {
        rep.kv("belief-states", g.num_states());
    }
    let (fac, leaf) = is_fac(&g, mode)?;
    let (ffac, verdict) = is_forcibly_fac(&g, mode)?;
    let (fac_key, ffac_key) = if limited { ("fac", "forcibly-fac") } else { ("fbc", "forcibly-fbc") };
    rep.kv(fac_key, fac);
    rep.kv(ffac_key, ffac);
    rep.kv("verdict", verdict.tag);
    if let Some(leaf) = leaf {
        rep.note(format!("{prefix}non-terminal leaf: {}", leaf.render(&g)));
    }
    if let Some(d) = depth {
        let t = is_forcibly_terminating_bounded(&g, d, mode)?;
        let value = match t {
            Termination::Yes(v) => format!("yes ({})", v.tag),
            Termination::Unknown => "unknown".to_string(),
        };
        rep.kv("forcibly-terminating", value);
    }
    Ok(verdict_exit(verdict.tag))
}

fn cmd_solve(arg: &str, method: MethodArg, mode: SuccessorMode, rep: &mut Report) -> CliResult<u8> {
    let g = load(arg)?;
    let g = if g.check_limited().is_limited() {
        g
    } else {
        let b = build_belief_game(&g)?;
        rep.kv("belief-states", b.num_states());
        b
    };
    match method {
        MethodArg::GammaPrime => {
            let tree = solve_gamma_prime_tree(&g, mode)?;
            let v = verdict_of(&tree);
            rep.kv("verdict", v.tag);
            rep.kv("method", "gamma-prime");
            rep.kv("tree-nodes", tree.size());
            match &v.witness {
                Some(Witness::DeadLeaf(leaf)) => rep.note(format!("unresolved leaf: {}", leaf.render(&g))),
                Some(Witness::Eve(t)) | Some(Witness::Adam(t)) => {
                    rep.note(format!("strategy tree: {} nodes, height {}", t.len(), t.height()))
                }
                None => {}
            }
            Ok(verdict_exit(v.tag))
        }
        MethodArg::Safety => {
            let s = safety_verdict(&g, true)?;
            rep.kv("verdict", s.verdict.tag);
            rep.kv("method", "safety");
            rep.kv("conclusive", s.conclusive);
            rep.kv("safety-nodes", s.solution.nodes.len());
            rep.note(format!("clamp: cap {}, initial value {}", s.solution.cap, s.solution.initial_value));
            Ok(if s.conclusive { verdict_exit(s.verdict.tag) } else { EXIT_OTHER })
        }
    }
}

fn synth_machine(g: &Game) -> CliResult<(VerdictTag, Option<Strategy>)> {
    let tree = solve_gamma_prime_tree(g, SuccessorMode::Proper)?;
    let tag = verdict_of(&tree).tag;
    let strategy = match tag {
        VerdictTag::EveWins => tree.strategy(Player::Eve).map(|t| extract_eve_machine(&t)).transpose()?.map(Strategy::EveMachine),
        VerdictTag::AdamWins => {
            tree.strategy(Player::Adam).map(|t| extract_adam_machine(&t)).transpose()?.map(Strategy::AdamMachine)
        }
        _ => None,
    };
    Ok((tag, strategy))
}

fn strategy_kind(s: &Strategy) -> (&'static str, usize) {
    match s {
        Strategy::EveMachine(m) => ("eve-machine", m.len()),
        Strategy::AdamMachine(m) => ("adam-machine", m.len()),
        Strategy::Positional(PositionalStrategy::Eve(_)) => ("eve-positional", 1),
        Strategy::Positional(PositionalStrategy::Adam(_)) => ("adam-positional", 1),
    }
}

fn cmd_synth(arg: &str, output: &Path, positional: bool, rep: &mut Report) -> CliResult<u8> {
    let g = load(arg)?;
    g.require_limited()?;
    let (tag, strategy) = if positional {
        match search_positional(&g)? {
            Some(p) => {
                let tag = match p {
                    PositionalStrategy::Eve(_) => VerdictTag::EveWins,
                    PositionalStrategy::Adam(_) => VerdictTag::AdamWins,
                };
                (tag, Some(Strategy::Positional(p)))
            }
            None => (VerdictTag::Unknown, None),
        }
    } else {
        synth_machine(&g)?
    };
    rep.kv("verdict", tag);
    match strategy {
        Some(s) => {
            let (kind, mem) = strategy_kind(&s);
            write(output, &render_strategy(&g, &s))?;
            rep.kv("strategy", kind);
            rep.kv("memory", mem);
            rep.kv("written", output.display());
            Ok(verdict_exit(tag))
        }
        None => {
            rep.kv("strategy", "none");
            Ok(EXIT_OTHER)
        }
    }
}

fn cmd_verify(arg: &str, path: &Path, rep: &mut Report) -> CliResult<u8> {
    let g = load(arg)?;
    g.require_limited()?;
    let s = parse_strategy(&g, &read(path)?)?;
    let (kind, _) = strategy_kind(&s);
    rep.kv("strategy", kind);
    let counterexample: Option<String> = match &s {
        Strategy::EveMachine(m) => verify_eve_machine(&g, m)?.map(|p| format!("negative cycle {}", p.render(&g))),
        Strategy::AdamMachine(m) => {
            let reachable = check_adam_machine(&g, m)?;
            rep.note(format!("reachable configurations: {reachable}"));
            let an = mpg::sim::exhaustive_eve_words(&g, m, ADAM_VERIFY_HORIZON)?;
            rep.kv("horizon", ADAM_VERIFY_HORIZON);
            if an.descent_holds {
                None
            } else {
                Some(format!("tracked minimum exceeds ceiling minus resets within {ADAM_VERIFY_HORIZON} steps"))
            }
        }
        Strategy::Positional(p) => verify_positional(&g, p)?.map(|c| match c {
            Counterexample::NegativeCycle(p) => format!("negative cycle {}", p.render(&g)),
            Counterexample::NonBadCycle(c, class) => format!("{:?} cycle {}", class, c.render(&g)).to_lowercase(),
        }),
    };
    rep.kv("valid", counterexample.is_none());
    match counterexample {
        None => Ok(EXIT_EVE),
        Some(c) => {
            rep.kv("counterexample", c);
            Ok(EXIT_OTHER)
        }
    }
}

fn action_list(g: &Game, text: &str) -> CliResult<Vec<usize>> {
    text.split(',')
        .filter(|s| !s.is_empty())
        .map(|s| g.action_id(s).ok_or_else(|| MpgError::UnknownName(format!("action {s}")).into()))
        .collect()
}

fn eve_policy(g: &Game, spec: &str) -> CliResult<EvePolicy> {
    let (head, rest) = spec.split_once(':').unwrap_or((spec, ""));
    match head {
        "synth" => match synth_machine(g)? {
            (_, Some(Strategy::EveMachine(m))) => Ok(EvePolicy::Machine(m)),
            (tag, _) => Err(CliError::Usage(format!("no Eve machine to synthesize (verdict {tag})"))),
        },
        "safety" => Ok(EvePolicy::Safety(safety_verdict(g, false)?.solution)),
        "file" => match parse_strategy(g, &read(Path::new(rest))?)? {
            Strategy::EveMachine(m) => Ok(EvePolicy::Machine(m)),
            Strategy::Positional(PositionalStrategy::Eve(map)) => Ok(EvePolicy::Positional(map)),
            _ => Err(CliError::Usage(format!("{rest} is not an Eve strategy"))),
        },
        "periodic" => {
            let (u, v) = rest.split_once('/').unwrap_or(("", rest));
            Ok(EvePolicy::Scripted(ScriptedStrategy::periodic(action_list(g, u)?, action_list(g, v)?)?))
        }
        "triangular" => match action_list(g, rest)?.as_slice() {
            [a, b] => Ok(EvePolicy::Scripted(ScriptedStrategy::Triangular { a: *a, b: *b })),
            _ => Err(CliError::Usage("triangular needs two actions, e.g. triangular:a,b".into())),
        },
        _ => Err(CliError::Usage(format!("unknown Eve strategy {spec}"))),
    }
}

fn adam_policy(g: &Game, spec: &str, seed: u64) -> CliResult<AdamPolicy> {
    let (head, rest) = spec.split_once(':').unwrap_or((spec, ""));
    match head {
        "synth" => match synth_machine(g)? {
            (_, Some(Strategy::AdamMachine(m))) => Ok(AdamPolicy::Machine(m)),
            (tag, _) => Err(CliError::Usage(format!("no Adam machine to synthesize (verdict {tag})"))),
        },
        "file" => match parse_strategy(g, &read(Path::new(rest))?)? {
            Strategy::AdamMachine(m) => Ok(AdamPolicy::Machine(m)),
            Strategy::Positional(PositionalStrategy::Adam(map)) => Ok(AdamPolicy::Positional(map)),
            _ => Err(CliError::Usage(format!("{rest} is not an Adam strategy"))),
        },
        "random" => Ok(AdamPolicy::Random(seed)),
        "greedy-min" => Ok(AdamPolicy::GreedyMin),
        "concrete" => Ok(AdamPolicy::Concrete),
        _ => Err(CliError::Usage(format!("unknown Adam strategy {spec}"))),
    }
}

fn cmd_simulate(arg: &str, eve: &str, adam: &str, horizon: usize, seed: u64, rep: &mut Report) -> CliResult<u8> {
    let g = load(arg)?;
    let eve = eve_policy(&g, eve)?;
    let adam = adam_policy(&g, adam, seed)?;
    let trace = simulate(&g, &eve, &adam, horizon)?;
    rep.note(trace.to_tsv(&g).trim_end().to_string());
    rep.kv("horizon", trace.horizon());
    rep.kv("min", trace.min_value().map_or("-".to_string(), |v| v.to_string()));
    rep.kv("final-mean", trace.final_mean().map_or("-".to_string(), |m| m.to_string()));
    rep.kv("eve-resets", trace.rows.iter().filter(|r| r.eve_reset).count());
    rep.kv("adam-resets", trace.rows.iter().filter(|r| r.adam_reset).count());
    Ok(EXIT_EVE)
}

fn cmd_gen(kind: &GenKind, rep: &mut Report) -> CliResult<u8> {
    let (g, out) = match kind {
        GenKind::Qbf { formula, variant, output } => {
            let phi = parse_qbf(&read(formula)?)?;
            let variant = match variant {
                VariantArg::Membership => QbfVariant::Membership,
                VariantArg::Winner => QbfVariant::Winner,
            };
            (gen_qbf(&phi, variant)?, output)
        }
        GenKind::Hamilton { graph, output } => (gen_hamiltonian(&parse_graph(&read(graph)?)?)?, output),
        GenKind::Expmem { n, output } => (gen_expmem(*n)?, output),
        GenKind::Builtin { name, output } => (builtin_game(name)?, output),
    };
    emit(out.as_deref(), &render_game(&g), rep)?;
    if out.is_some() {
        rep.kv("states", g.num_states());
        rep.kv("observations", g.num_obs());
    }
    Ok(EXIT_EVE)
}

fn run(cli: &Cli, rep: &mut Report) -> CliResult<u8> {
    match &cli.command {
        Command::Validate { game } => cmd_validate(game, rep),
        Command::Belief { game, output } => cmd_belief(game, output, rep),
        Command::Classify { game, mode, depth } => cmd_classify(game, (*mode).into(), *depth, rep),
        Command::Solve { game, method, mode } => cmd_solve(game, *method, (*mode).into(), rep),
        Command::Synth { game, output, positional } => cmd_synth(game, output, *positional, rep),
        Command::Verify { game, strategy } => cmd_verify(game, strategy, rep),
        Command::Simulate { game, eve, adam, horizon, seed } => cmd_simulate(game, eve, adam, *horizon, *seed, rep),
        Command::Gen { kind } => cmd_gen(kind, rep),
        Command::Dot { game, output } => {
            let g = load(game)?;
            emit(output.as_deref(), &to_dot(&g), rep)?;
            Ok(EXIT_EVE)
        }
    }
}

#[cfg(feature = "parallel")]
fn configure_jobs(jobs: Option<usize>) -> CliResult<()> {
    if let Some(n) = jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| CliError::Usage(format!("--jobs: {e}")))?;
    }
    Ok(())
}

#[cfg(not(feature = "parallel"))]
fn configure_jobs(_jobs: Option<usize>) -> CliResult<()> {
    Ok(())
}

fn print_lines(lines: &[String]) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    for l in lines {
        if writeln!(out, "{l}").is_err() {
            return;
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut rep = Report { porcelain: cli.porcelain, lines: Vec::new() };
    let code = match configure_jobs(cli.jobs).and_then(|_| run(&cli, &mut rep)) {
        Ok(code) => code,
        Err(e) => {
            print_lines(&rep.lines);
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    print_lines(&rep.lines);
    ExitCode::from(code)
}
