//! The `cma` command line. [`dispatch`] parses arguments, runs one library
//! operation and returns the exit code together with everything meant for
//! standard output, so the binary stays a one-liner and tests can call it
//! directly.
//!
//! Exit codes: 0 on success, 1 on domain errors, 2 on usage errors. Errors
//! print one line, `error[kind]: message` in text mode and
//! `{"error":{"kind":..,"message":..}}` in JSON mode.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, Value};

use crate::analysis::{
    approximate_distribution, cycle_occupancy, monte_carlo_occupancy, path_count_occupancy,
    stationary_distribution, synchronizing_word, FiniteDistribution, OccupancyVector,
};
use crate::cluster::{
    bisimilar, classify_cluster, classify_with, cycle_length, default_horizon, prime_power_construction,
    quotient, simulate, validate_cluster, wheel_cluster_cycle, ClusterNode, Openness, ScaleSystem,
    TickPolicy,
};
use crate::error::{Error, Result};
use crate::fluents::{FluentStore, Mode, Threshold, TimePoint};
use crate::lingua::{disambiguate, parse, ActivationNetwork, Context, Grammar};
use crate::machine::{Automaton, Constraints};
use crate::memory::{parse_script, Tape, MAX_TAPE_BITS};
use crate::menagerie::{build_with, MachineSpec};

/// Environment variable holding constraint overrides such as `m=100,o=4`.
pub const CONSTRAINTS_VAR: &str = "CMA_CONSTRAINTS";

/// States an unfolded cluster may reach before classification gives up.
const UNFOLD_LIMIT: usize = 1_000_000;

#[derive(Parser, Debug)]
#[command(name = "cma", version, about = "Clustered Moore automata toolkit")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a machine or cluster against the structural limits.
    Validate(ValidateArgs),
    /// Run a cluster tick by tick and report where the outer machine spent its time.
    Simulate(SimulateArgs),
    /// Occupancy fractions by path counting, stationary analysis, sampling or cycle analysis.
    Occupancy(OccupancyArgs),
    /// Build the smallest labeled wheel approximating a finite distribution.
    ApproxDist(ApproxArgs),
    /// Find a word driving every state to a single one.
    SyncWord(MachineArg),
    /// Place a machine or cluster in the Z/N/P/L/C taxonomy.
    Classify(ClassifyArgs),
    /// Exact first-return time of an all-wheel cluster.
    CycleLength(CycleArgs),
    /// Compare two machines up to bisimulation.
    Bisim(BisimArgs),
    /// Run a script of memory symbols on a replicated tape.
    Tape(TapeArgs),
    /// Evaluate fluents over timescale windows.
    Fluent {
        #[command(subcommand)]
        command: FluentCommand,
    },
    /// Parse a sentence into trees with sense sets.
    Parse(ParseArgs),
    /// Inject impulses into an activation network and trace what fires.
    Activate(ActivateArgs),
    /// Write a machine as a Graphviz graph.
    ExportDot(ExportArgs),
}

#[derive(Args, Debug)]
struct MachineArg {
    /// Inline spec such as `wheel:4`, or a path to a CMA-JSON file.
    #[arg(long)]
    machine: String,
}

#[derive(Args, Debug)]
struct ClusterArgs {
    /// Inline spec or CMA-JSON path for the outer (or only) machine.
    #[arg(long, conflicts_with = "cluster")]
    machine: Option<String>,
    /// Inner machine for an outer state, as `state=spec`; repeatable.
    #[arg(long, requires = "machine")]
    inner: Vec<String>,
    /// Cluster document path.
    #[arg(long)]
    cluster: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[command(flatten)]
    target: ClusterArgs,
    /// Scale system for cluster checks: `modern` or `naive`.
    #[arg(long, default_value = "modern")]
    scales: String,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    target: ClusterArgs,
    /// Policy for the outer machine when built from `--machine` and `--inner`.
    #[arg(long)]
    policy: Option<String>,
    #[arg(long, default_value_t = 10_000)]
    ticks: u64,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum OccMode {
    PathCount,
    Stationary,
    Mc,
    Cycle,
}

#[derive(Args, Debug)]
struct OccupancyArgs {
    #[arg(long)]
    machine: String,
    #[arg(long, value_enum, default_value_t = OccMode::Stationary)]
    mode: OccMode,
    /// Path length for `path-count`, sample count for `mc`.
    #[arg(long, default_value_t = 40)]
    steps: u64,
    #[arg(long)]
    seed: Option<u64>,
    /// Group fractions by output signal rather than by state.
    #[arg(long)]
    by_signal: bool,
}

#[derive(Args, Debug)]
struct ApproxArgs {
    /// Comma-separated probabilities.
    #[arg(long, value_delimiter = ',', required = true)]
    probs: Vec<f64>,
    /// Comma-separated outcome names; defaults to 1, 2, ...
    #[arg(long, value_delimiter = ',')]
    outcomes: Vec<String>,
    #[arg(long, default_value_t = 0.01)]
    eps: f64,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[command(flatten)]
    target: ClusterArgs,
    /// Runs longer than this count as unbounded.
    #[arg(long)]
    horizon: Option<BigUint>,
    #[arg(long)]
    open_start: bool,
    #[arg(long)]
    open_end: bool,
}

#[derive(Args, Debug)]
struct CycleArgs {
    #[command(flatten)]
    target: ClusterArgs,
    /// Report the one-wheel-per-prime-power construction for this many states per layer.
    #[arg(long, conflicts_with_all = ["machine", "cluster"])]
    prime_powers: Option<u64>,
}

#[derive(Args, Debug)]
struct BisimArgs {
    #[arg(long)]
    left: String,
    /// Omit to print the quotient of `--left` instead.
    #[arg(long)]
    right: Option<String>,
}

#[derive(Args, Debug)]
struct TapeArgs {
    /// Symbols separated by whitespace (`e`, `mu`, `nu`, `alpha`, `omega` or
    /// their Greek letters); `#` starts a comment.
    #[arg(long)]
    script: PathBuf,
    #[arg(long, default_value_t = MAX_TAPE_BITS)]
    len: usize,
    #[arg(long, default_value_t = 3)]
    replicas: usize,
    /// Flip one stored bit after the script, as `replica:pos`.
    #[arg(long)]
    inject_fault: Option<String>,
    /// Idle ticks to run after the script.
    #[arg(long, default_value_t = 0)]
    idle: u64,
}

#[derive(Subcommand, Debug)]
enum FluentCommand {
    /// Truth value of one fluent at one time point.
    Eval(FluentArgs),
}

#[derive(Args, Debug)]
struct FluentArgs {
    /// Fluent store JSON.
    #[arg(long)]
    store: PathBuf,
    /// Time point `i.j`: index `j` on scale `i`.
    #[arg(long)]
    at: TimePoint,
    #[arg(long, default_value = "preponderant")]
    mode: Mode,
    #[arg(long)]
    fluent: String,
    /// Preponderance threshold as a fraction, e.g. `2/3`.
    #[arg(long, default_value = "2/3")]
    theta: Threshold,
}

#[derive(Args, Debug)]
struct ParseArgs {
    /// `demo` or a grammar JSON path.
    #[arg(long, default_value = "demo")]
    lexicon: String,
    #[arg(long)]
    sentence: String,
    /// Context fact `subject:property`; repeatable.
    #[arg(long)]
    context: Vec<String>,
}

#[derive(Args, Debug)]
struct ActivateArgs {
    /// Preset (`grief`, `grief-unaware`) or a network JSON path.
    #[arg(long, default_value = "grief")]
    net: String,
    /// Node receiving one impulse before the run; repeat to send several.
    #[arg(long)]
    inject: Vec<String>,
    #[arg(long, default_value_t = 5)]
    steps: usize,
}

#[derive(Args, Debug)]
struct ExportArgs {
    #[arg(long)]
    machine: String,
    #[arg(long)]
    out: PathBuf,
}

/// Parses `args` (program name first) and runs the command.
pub fn dispatch<I, S>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return (code, e.to_string());
        }
    };
    let json_mode = cli.format == Format::Json;
    let constraints = match std::env::var(CONSTRAINTS_VAR) {
        Ok(text) => match Constraints::parse_overrides(&text) {
            Ok(c) => c,
            Err(e) => return (2, error_line(json_mode, &e)),
        },
        Err(_) => Constraints::default(),
    };
    let ctx = Ctx {
        json: json_mode,
        constraints,
    };
    match run(&ctx, cli.command) {
        Ok(Report { text, json }) => (0, if json_mode { format!("{json}\n") } else { text }),
        Err(Failure::Usage(msg)) => (2, error_line(json_mode, &Error::Invalid(msg))),
        Err(Failure::Domain(e)) => (1, error_line(json_mode, &e)),
    }
}

fn error_line(json_mode: bool, e: &Error) -> String {
    let msg = e.to_string().replace('\n', " ");
    if json_mode {
        format!("{}\n", json!({"error": {"kind": e.kind(), "message": msg}}))
    } else {
        format!("error[{}]: {msg}\n", e.kind())
    }
}

struct Ctx {
    json: bool,
    constraints: Constraints,
}

struct Report {
    text: String,
    json: Value,
}

enum Failure {
    Usage(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

type Outcome = std::result::Result<Report, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn require_seed(ctx: &Ctx, seed: Option<u64>, what: &str) -> std::result::Result<u64, Failure> {
    match seed {
        Some(s) => Ok(s),
        None if ctx.json => Err(usage(format!("{what} needs --seed in JSON mode"))),
        None => Ok(0),
    }
}

/// Inline specs win over file paths; anything else is read as CMA-JSON.
fn load_machine(text: &str, c: &Constraints) -> Result<Automaton> {
    match text.parse::<MachineSpec>() {
        Ok(spec) => build_with(&spec, c),
        Err(spec_err) => {
            let path = Path::new(text);
            if path.is_file() {
                Automaton::from_json(&std::fs::read_to_string(path)?)
            } else {
                Err(spec_err)
            }
        }
    }
}

/// Builds without enforcing limits, so `validate` can report them.
fn load_unchecked(text: &str) -> Result<Automaton> {
    let open = Constraints::new(usize::MAX, usize::MAX, usize::MAX, usize::MAX)?;
    load_machine(text, &open)
}

fn load_cluster(t: &ClusterArgs, c: &Constraints, policy: Option<TickPolicy>) -> Result<ClusterNode> {
    if let Some(path) = &t.cluster {
        let mut node = ClusterNode::from_json(&std::fs::read_to_string(path)?)?;
        if let Some(p) = policy {
            node = node.with_policy(p);
        }
        return Ok(node);
    }
    let spec = t
        .machine
        .as_deref()
        .ok_or_else(|| Error::Invalid("give --machine or --cluster".into()))?;
    let outer = load_machine(spec, c)?;
    if t.inner.is_empty() {
        return Ok(ClusterNode::leaf(outer, 0).with_policy(policy.unwrap_or(TickPolicy::External)));
    }
    let mut node = ClusterNode::leaf(outer, 1).with_policy(policy.unwrap_or(TickPolicy::Union));
    for item in &t.inner {
        let (state, spec) = item
            .split_once('=')
            .ok_or_else(|| Error::Invalid(format!("--inner expects state=spec, got `{item}`")))?;
        node = node.with_inner(state, ClusterNode::leaf(load_machine(spec, c)?, 0))?;
    }
    Ok(node)
}

fn run(ctx: &Ctx, cmd: Command) -> Outcome {
    match cmd {
        Command::Validate(a) => cmd_validate(ctx, a),
        Command::Simulate(a) => cmd_simulate(ctx, a),
        Command::Occupancy(a) => cmd_occupancy(ctx, a),
        Command::ApproxDist(a) => cmd_approx(ctx, a),
        Command::SyncWord(a) => cmd_sync(ctx, a),
        Command::Classify(a) => cmd_classify(ctx, a),
        Command::CycleLength(a) => cmd_cycle(ctx, a),
        Command::Bisim(a) => cmd_bisim(ctx, a),
        Command::Tape(a) => cmd_tape(a),
        Command::Fluent {
            command: FluentCommand::Eval(a),
        } => cmd_fluent(a),
        Command::Parse(a) => cmd_parse(a),
        Command::Activate(a) => cmd_activate(a),
        Command::ExportDot(a) => cmd_export(ctx, a),
    }
}

fn cmd_validate(ctx: &Ctx, a: ValidateArgs) -> Outcome {
    let c = &ctx.constraints;
    let (name, violations): (String, Vec<String>) = if a.target.cluster.is_some() || !a.target.inner.is_empty() {
        let open = Constraints::new(usize::MAX, usize::MAX, usize::MAX, usize::MAX)?;
        let node = load_cluster(&a.target, &open, None)?;
        let scales = ScaleSystem::preset(&a.scales)?;
        let v = validate_cluster(&node, &scales, c);
        (node.machine().name().to_string(), v.iter().map(ToString::to_string).collect())
    } else {
        let spec = a.target.machine.as_deref().ok_or_else(|| usage("give --machine or --cluster"))?;
        let m = load_unchecked(spec)?;
        let v = m.validate(c);
        (m.name().to_string(), v.iter().map(ToString::to_string).collect())
    };
    let mut text = format!("{name}: {}\n", if violations.is_empty() { "ok" } else { "violations" });
    for v in &violations {
        let _ = writeln!(text, "  {v}");
    }
    Ok(Report {
        text,
        json: json!({"machine": name, "valid": violations.is_empty(), "violations": violations}),
    })
}

fn occupancy_lines(v: &OccupancyVector) -> String {
    let mut out = String::new();
    for (label, value) in v.labels.iter().zip(v.to_f64()) {
        let _ = writeln!(out, "{label}\t{value:.6}");
    }
    out
}

fn cmd_simulate(ctx: &Ctx, a: SimulateArgs) -> Outcome {
    let seed = require_seed(ctx, a.seed, "simulate")?;
    let policy = a.policy.as_deref().map(str::parse::<TickPolicy>).transpose()?;
    let node = load_cluster(&a.target, &ctx.constraints, policy)?;
    let r = simulate(&node, a.ticks, seed);
    let mut text = format!(
        "{} ticks, {} outer steps{}\n",
        r.ticks,
        r.outer_steps,
        if r.halted { ", halted" } else { "" }
    );
    text.push_str(&occupancy_lines(&r.occupancy));
    Ok(Report {
        text,
        json: json!({
            "ticks": r.ticks,
            "outer_steps": r.outer_steps,
            "halted": r.halted,
            "seed": seed,
            "occupancy": r.occupancy.report(),
        }),
    })
}

fn cmd_occupancy(ctx: &Ctx, a: OccupancyArgs) -> Outcome {
    let m = load_machine(&a.machine, &ctx.constraints)?;
    let (mode, v) = match a.mode {
        OccMode::PathCount => ("path-count", path_count_occupancy(&m, a.steps)?),
        OccMode::Stationary => ("stationary", stationary_distribution(&m)?),
        OccMode::Mc => {
            let seed = require_seed(ctx, a.seed, "monte carlo occupancy")?;
            ("mc", monte_carlo_occupancy(&m, a.steps, seed)?)
        }
        OccMode::Cycle => ("cycle", cycle_occupancy(&m)?),
    };
    let v = if a.by_signal { v.by_signal(&m) } else { v };
    Ok(Report {
        text: occupancy_lines(&v),
        json: json!({"machine": m.name(), "mode": mode, "occupancy": v.report()}),
    })
}

fn cmd_approx(ctx: &Ctx, a: ApproxArgs) -> Outcome {
    let d = if a.outcomes.is_empty() {
        FiniteDistribution::numbered(a.probs)?
    } else {
        FiniteDistribution::new(a.outcomes, a.probs)?
    };
    let r = approximate_distribution(&d, a.eps, &ctx.constraints)?;
    let counts: BTreeMap<&str, usize> = d
        .outcomes()
        .iter()
        .map(String::as_str)
        .zip(r.counts.iter().copied())
        .collect();
    let mut text = format!("wheel of {} states, max deviation {:.6}\n", r.size, r.max_deviation);
    for (o, n) in &counts {
        let _ = writeln!(text, "{o}\t{n}/{}", r.size);
    }
    Ok(Report {
        text,
        json: json!({
            "size": r.size,
            "counts": counts,
            "max_deviation": r.max_deviation,
            "machine": r.machine.to_doc(),
        }),
    })
}

fn cmd_sync(ctx: &Ctx, a: MachineArg) -> Outcome {
    let m = load_machine(&a.machine, &ctx.constraints)?;
    let w = synchronizing_word(&m)?;
    let text = match &w {
        Some(w) => format!("{} -> {}\n", w.word.join(" "), w.target),
        None => "not synchronizing\n".to_string(),
    };
    Ok(Report {
        text,
        json: json!({"machine": m.name(), "synchronizing": w.is_some(), "word": w}),
    })
}

fn cmd_classify(ctx: &Ctx, a: ClassifyArgs) -> Outcome {
    let horizon = a.horizon.unwrap_or_else(default_horizon);
    let declared = Openness {
        open_start: a.open_start,
        open_end: a.open_end,
    };
    let class = if a.target.cluster.is_some() || !a.target.inner.is_empty() {
        if declared != Openness::default() {
            return Err(usage("openness can only be declared for single machines"));
        }
        let node = load_cluster(&a.target, &ctx.constraints, None)?;
        classify_cluster(&node, &horizon, UNFOLD_LIMIT)?
    } else {
        let spec = a.target.machine.as_deref().ok_or_else(|| usage("give --machine or --cluster"))?;
        classify_with(&load_machine(spec, &ctx.constraints)?, &horizon, declared)?
    };
    let mut notes = Vec::new();
    if class.effective {
        notes.push("effective".to_string());
    }
    if class.absorbing {
        notes.push("absorbing".to_string());
    }
    if class.lead_in > 0 {
        notes.push(format!("lead-in {}", class.lead_in));
    }
    let text = if notes.is_empty() {
        format!("{class}\n")
    } else {
        format!("{class} ({})\n", notes.join(", "))
    };
    Ok(Report {
        text,
        json: json!({"class": class.to_string(), "detail": class}),
    })
}

fn cmd_cycle(ctx: &Ctx, a: CycleArgs) -> Outcome {
    let r = match a.prime_powers {
        Some(m) => wheel_cluster_cycle(&prime_power_construction(m))?,
        None => cycle_length(&load_cluster(&a.target, &ctx.constraints, None)?)?,
    };
    let shown = if r.digits <= 60 {
        r.value.to_string()
    } else {
        format!("a {}-digit number", r.digits)
    };
    Ok(Report {
        text: format!(
            "cycle length {shown}{}\n",
            if r.simulated { " (confirmed by simulation)" } else { "" }
        ),
        json: serde_json::to_value(&r).map_err(Error::from)?,
    })
}

fn cmd_bisim(ctx: &Ctx, a: BisimArgs) -> Outcome {
    let left = load_machine(&a.left, &ctx.constraints)?;
    match a.right {
        Some(r) => {
            let right = load_machine(&r, &ctx.constraints)?;
            let b = bisimilar(&left, &right);
            let mut text = format!("{}\n", if b.bisimilar { "bisimilar" } else { "not bisimilar" });
            for block in &b.partition {
                let _ = writeln!(text, "  {{{}}}", block.join(", "));
            }
            Ok(Report {
                text,
                json: serde_json::to_value(&b).map_err(Error::from)?,
            })
        }
        None => {
            let q = quotient(&left)?;
            Ok(Report {
                text: format!("quotient has {} of {} states\n{}", q.num_states(), left.num_states(), q.to_json()),
                json: json!({"states": left.num_states(), "quotient": q.to_doc()}),
            })
        }
    }
}

fn cmd_tape(a: TapeArgs) -> Outcome {
    let script = parse_script(&std::fs::read_to_string(&a.script).map_err(Error::from)?)?;
    let mut tape = Tape::new(a.len, a.replicas, 1)?;
    let emissions = tape.run(&script);
    let boundary_hits = emissions.iter().filter(|e| e.boundary).count();
    let mut fault = Value::Null;
    let mut text = String::new();
    if let Some(spec) = &a.inject_fault {
        let (r, p) = spec
            .split_once(':')
            .and_then(|(r, p)| Some((r.parse::<usize>().ok()?, p.parse::<usize>().ok()?)))
            .ok_or_else(|| usage(format!("--inject-fault expects replica:pos, got `{spec}`")))?;
        let stored = tape.read(p);
        tape.corrupt(r, p)?;
        let recovered = tape.majority_read(p)?;
        let _ = writeln!(
            text,
            "fault at replica {r} bit {p}: majority read {} ({})",
            u8::from(recovered),
            if recovered == stored { "corrected" } else { "lost" }
        );
        fault = json!({"replica": r, "pos": p, "stored": stored, "majority": recovered, "corrected": recovered == stored});
    }
    if a.idle > 0 {
        tape = tape.idle(a.idle);
    }
    let d = tape.dump();
    text.insert_str(
        0,
        &format!(
            "{} symbols, {} boundary hits\ncontent {}\nhead {} counter {}\n",
            script.len(),
            boundary_hits,
            d.content,
            d.head,
            d.counter
        ),
    );
    Ok(Report {
        text,
        json: json!({"symbols": script.len(), "boundary_hits": boundary_hits, "tape": d, "fault": fault}),
    })
}

fn cmd_fluent(a: FluentArgs) -> Outcome {
    let store = FluentStore::from_json(&std::fs::read_to_string(&a.store).map_err(Error::from)?)?;
    let v = store.eval(&a.fluent, a.at, a.mode, a.theta)?;
    Ok(Report {
        text: format!("{v}\n"),
        json: json!({
            "fluent": a.fluent,
            "at": a.at.to_string(),
            "mode": a.mode,
            "theta": a.theta.ratio().to_string(),
            "value": v,
        }),
    })
}

fn cmd_parse(a: ParseArgs) -> Outcome {
    let grammar = if a.lexicon == "demo" {
        Grammar::demo()
    } else {
        Grammar::from_json(&std::fs::read_to_string(&a.lexicon).map_err(Error::from)?)?
    };
    let mut context: Context = Vec::new();
    for fact in &a.context {
        let (s, p) = fact
            .split_once(':')
            .ok_or_else(|| usage(format!("--context expects subject:property, got `{fact}`")))?;
        context.push((s.trim().to_string(), p.trim().to_string()));
    }
    let result = parse(&a.sentence, &grammar)?;
    let (trees, complete) = if result.full.is_empty() {
        (result.islands.clone(), false)
    } else {
        (result.full.clone(), true)
    };
    let trees = trees
        .iter()
        .map(|t| disambiguate(t, &context, &grammar.rules))
        .collect::<Result<Vec<_>>>()?;
    let mut text = String::new();
    if !complete {
        text.push_str("no complete parse; islands:\n");
    }
    for t in &trees {
        let _ = writeln!(text, "{t}");
    }
    Ok(Report {
        text,
        json: json!({"sentence": a.sentence, "complete": complete, "trees": trees}),
    })
}

fn cmd_activate(a: ActivateArgs) -> Outcome {
    let mut net = match ActivationNetwork::preset(&a.net) {
        Ok(n) => n,
        Err(preset_err) => {
            if Path::new(&a.net).is_file() {
                ActivationNetwork::from_json(&std::fs::read_to_string(&a.net).map_err(Error::from)?)?
            } else {
                return Err(preset_err.into());
            }
        }
    };
    for n in &a.inject {
        net.inject(n)?;
    }
    let trace = net.trace(a.steps);
    let mut text = String::new();
    for r in &trace {
        let states: Vec<String> = r.states.iter().map(|(n, s)| format!("{n}={s}")).collect();
        let _ = writeln!(
            text,
            "step {}: fired [{}]  {}",
            r.step,
            r.fired.join(", "),
            states.join(" ")
        );
    }
    Ok(Report {
        text,
        json: json!({"trace": trace}),
    })
}

fn cmd_export(ctx: &Ctx, a: ExportArgs) -> Outcome {
    let m = load_machine(&a.machine, &ctx.constraints)?;
    std::fs::write(&a.out, m.to_dot()).map_err(Error::from)?;
    Ok(Report {
        text: format!("wrote {}\n", a.out.display()),
        json: json!({"machine": m.name(), "out": a.out.display().to_string()}),
    })
}
