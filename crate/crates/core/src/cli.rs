//! The `ictol` command line.
//!
//! Exit codes: 0 success (update accepted, state consistent, no audit
//! failures), 1 negative outcome (rejected, inconsistent, audit failures),
//! 2 usage or input error, 3 internal error.
//!
//! With `--json` every command prints one JSON object. Lists inside it are
//! sorted, so reordering the lines of an input file does not change the
//! output except where a position is part of the answer (step numbers of a
//! trace).

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::Error;
use crate::lab::{
    audit_method, violated_cases, GenConfig, Measure, MethodReport, Schema, GEN_SCHEME_VERSION,
};
use crate::logic::{Constraint, IntegrityTheory};
use crate::simplify::{check_update, generate_test, Method, Protocol, Test};
use crate::store::{holds_theory, Database, Update, ViolationReport};
use crate::syntax::{Diagnostics, Session, SourceKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "ictol",
    version,
    about = "Inconsistency-tolerant integrity checking for datalog databases"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide whether an update may run, using a simplified test.
    Check(CheckArgs),
    /// Print the test a method generates for an update.
    Simplify(SimplifyArgs),
    /// Count violated ground cases, optionally along a trace of updates.
    Measure(MeasureArgs),
    /// Search random instances for correctness and tolerance failures.
    Audit(AuditArgs),
    /// Check every constraint in the current state.
    Eval(EvalArgs),
}

#[derive(Debug, Args)]
struct Inputs {
    /// Database file: facts and rules.
    #[arg(long, value_name = "FILE")]
    db: PathBuf,
    /// Integrity theory file.
    #[arg(long, value_name = "FILE")]
    ics: PathBuf,
    /// Accept `exists` constraints in the theory.
    #[arg(long)]
    allow_exists: bool,
    /// Print JSON with sorted lists.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[command(flatten)]
    inputs: Inputs,
    /// Update file: `+ fact.` and `- fact.` entries.
    #[arg(long, value_name = "FILE")]
    update: PathBuf,
    /// delta-pre, delta-post, plain-pre, plain-post or example3-adversarial.
    #[arg(long, value_name = "M")]
    method: String,
    /// Must match the method, except for example3-adversarial.
    #[arg(long, value_enum)]
    protocol: Option<ProtocolArg>,
}

#[derive(Debug, Args)]
struct SimplifyArgs {
    #[command(flatten)]
    inputs: Inputs,
    /// Update file: `+ fact.` and `- fact.` entries.
    #[arg(long, value_name = "FILE")]
    update: PathBuf,
    /// Delta or plain test for the given protocol.
    #[arg(
        long,
        value_enum,
        required_unless_present = "method",
        conflicts_with = "method"
    )]
    kind: Option<KindArg>,
    /// Any method, including example3-adversarial[/pre|/post].
    #[arg(long, value_name = "M")]
    method: Option<String>,
}

#[derive(Debug, Args)]
struct MeasureArgs {
    #[command(flatten)]
    inputs: Inputs,
    /// Updates separated by `---` lines, applied in order.
    #[arg(long, value_name = "FILE")]
    trace: Option<PathBuf>,
    /// Method deciding which trace steps are accepted.
    #[arg(long, value_name = "M", default_value = "delta-pre")]
    method: String,
}

#[derive(Debug, Args)]
struct AuditArgs {
    /// delta-pre, delta-post, plain-pre, plain-post or example3-adversarial.
    #[arg(long, value_name = "M")]
    method: String,
    /// Must match the method, except for example3-adversarial.
    #[arg(long, value_enum)]
    protocol: Option<ProtocolArg>,
    /// Generator seed; a seed and trial number identify an instance.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 500)]
    trials: u64,
    /// Instance family; example3 by default for the adversarial method.
    #[arg(long, value_enum)]
    schema: Option<SchemaArg>,
    #[arg(long)]
    max_constants: Option<usize>,
    #[arg(long)]
    max_predicates: Option<usize>,
    #[arg(long)]
    max_arity: Option<usize>,
    #[arg(long)]
    max_facts: Option<usize>,
    #[arg(long)]
    max_ics: Option<usize>,
    #[arg(long)]
    max_body_literals: Option<usize>,
    #[arg(long)]
    max_update_facts: Option<usize>,
    /// Also generate stratified view definitions.
    #[arg(long)]
    allow_rules: bool,
    /// Failures printed in full (text output only).
    #[arg(long, default_value_t = 3)]
    show: usize,
    /// Print JSON with sorted lists.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[command(flatten)]
    inputs: Inputs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProtocolArg {
    Pre,
    Post,
}

impl From<ProtocolArg> for Protocol {
    fn from(p: ProtocolArg) -> Self {
        match p {
            ProtocolArg::Pre => Protocol::Pre,
            ProtocolArg::Post => Protocol::Post,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Pre,
    Post,
    PlainPre,
    PlainPost,
}

impl From<KindArg> for Method {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Pre => Method::DeltaPre,
            KindArg::Post => Method::DeltaPost,
            KindArg::PlainPre => Method::PlainPre,
            KindArg::PlainPost => Method::PlainPost,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SchemaArg {
    Random,
    Example3,
}

/// A failure with its exit code, reported on the error stream.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn diagnostics(path: &Path, d: &Diagnostics) -> Self {
        let lines: Vec<String> = d
            .iter()
            .map(|d| format!("{}:{d}", path.display()))
            .collect();
        Failure::usage(lines.join("\n"))
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::MethodNotApplicable { .. }
            | Error::UnknownMethod(_)
            | Error::InvalidConfig(_)
            | Error::NotDenial(_)
            | Error::ConflictingUpdate(_)
            | Error::DerivedPredicate(_)
            | Error::ArityMismatch { .. } => EXIT_USAGE,
            _ => EXIT_INTERNAL,
        };
        Failure {
            code,
            message: format!("error: {e}"),
        }
    }
}

type CliResult = Result<i32, Failure>;

/// Runs the command line `args` (program name first), writing results to
/// `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let shown = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{shown}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{shown}");
                    EXIT_USAGE
                }
            };
        }
    };
    let mut cx = Ctx::default();
    let result = match &cli.command {
        Command::Check(a) => cmd_check(a, &mut cx, out),
        Command::Simplify(a) => cmd_simplify(a, &mut cx, out),
        Command::Measure(a) => cmd_measure(a, &mut cx, out),
        Command::Audit(a) => cmd_audit(a, out),
        Command::Eval(a) => cmd_eval(a, &mut cx, out),
    };
    for w in &cx.warnings {
        let _ = writeln!(err, "{w}");
    }
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "{}", f.message);
            f.code
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("{}: cannot read: {e}", path.display())))
}

/// Parser state shared by the input files, plus their located warnings.
#[derive(Default)]
struct Ctx {
    session: Session,
    warnings: Vec<String>,
}

fn load(
    cx: &mut Ctx,
    path: &Path,
    kind: SourceKind,
    allow_exists: bool,
) -> Result<Loaded, Failure> {
    let text = read(path)?;
    let s = &mut cx.session;
    let r = match kind {
        SourceKind::Database => s.database(&text).map(Loaded::Database),
        SourceKind::Theory => s.theory(&text, allow_exists).map(Loaded::Theory),
        SourceKind::Update => s.update(&text).map(Loaded::Update),
        SourceKind::Trace => s.trace(&text).map(Loaded::Trace),
    };
    let loaded = r.map_err(|d| Failure::diagnostics(path, &d))?;
    cx.warnings.extend(
        s.take_warnings()
            .into_iter()
            .map(|w| format!("{}:{w}", path.display())),
    );
    Ok(loaded)
}

enum Loaded {
    Database(Database),
    Theory(IntegrityTheory),
    Update(Update),
    Trace(Vec<Update>),
}

fn load_inputs(cx: &mut Ctx, i: &Inputs) -> Result<(Database, IntegrityTheory), Failure> {
    let Loaded::Database(d) = load(cx, &i.db, SourceKind::Database, false)? else {
        unreachable!()
    };
    let Loaded::Theory(g) = load(cx, &i.ics, SourceKind::Theory, i.allow_exists)? else {
        unreachable!()
    };
    Ok((d, g))
}

fn load_update(cx: &mut Ctx, path: &Path) -> Result<Update, Failure> {
    let Loaded::Update(u) = load(cx, path, SourceKind::Update, false)? else {
        unreachable!()
    };
    Ok(u)
}

fn parse_method(s: &str, protocol: Option<ProtocolArg>) -> Result<Method, Failure> {
    let m: Method = s.parse().map_err(|_| {
        Failure::usage(format!(
            "error: unknown method '{s}' (expected delta-pre, delta-post, plain-pre, plain-post or example3-adversarial)"
        ))
    })?;
    match protocol {
        Some(p) => Ok(m.with_protocol(p.into())?),
        None => Ok(m),
    }
}

fn emit_json(out: &mut dyn Write, v: &Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(v).map_err(|e| Failure {
        code: EXIT_INTERNAL,
        message: format!("error: {e}"),
    })?;
    writeln!(out, "{text}").map_err(io_failure)
}

fn io_failure(e: std::io::Error) -> Failure {
    Failure {
        code: EXIT_INTERNAL,
        message: format!("error: writing output: {e}"),
    }
}

fn sorted(items: impl IntoIterator<Item = String>) -> Vec<String> {
    let mut v: Vec<String> = items.into_iter().collect();
    v.sort();
    v
}

/// Violations keyed by constraint text, the originating constraint of the
/// input theory, and sorted witnesses.
fn violations_json(report: &ViolationReport, origin: impl Fn(usize) -> Option<String>) -> Value {
    let mut items: Vec<Value> = report
        .violations
        .iter()
        .map(|v| {
            json!({
                "constraint": v.constraint.to_string(),
                "source": origin(v.index),
                "witnesses": sorted(v.witnesses.iter().map(ToString::to_string)),
            })
        })
        .collect();
    items.sort_by_key(|v| v.to_string());
    Value::Array(items)
}

fn write_violations(out: &mut dyn Write, report: &ViolationReport) -> std::io::Result<()> {
    for v in &report.violations {
        writeln!(out, "  {} {}", v.name, v.constraint)?;
        for w in &v.witnesses {
            writeln!(out, "    witness {w}")?;
        }
    }
    Ok(())
}

fn test_origin<'a>(
    t: &'a Test,
    theory: &'a IntegrityTheory,
) -> impl Fn(usize) -> Option<String> + 'a {
    move |i| {
        t.sources
            .get(i)
            .and_then(|s| theory.constraints.get(s.ic))
            .map(ToString::to_string)
    }
}

fn cmd_check(a: &CheckArgs, cx: &mut Ctx, out: &mut dyn Write) -> CliResult {
    let method = parse_method(&a.method, a.protocol)?;
    let (d, g) = load_inputs(cx, &a.inputs)?;
    let u = load_update(cx, &a.update)?;
    let (decision, _) = check_update(&d, &g, &u, method)?;
    let code = if decision.accepted {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    };
    if a.inputs.json {
        emit_json(
            out,
            &json!({
                "command": "check",
                "method": method.to_string(),
                "protocol": decision.protocol.to_string(),
                "accepted": decision.accepted,
                "test": sorted(decision.test_used.constraints.iter().map(ToString::to_string)),
                "violations": violations_json(&decision.evaluation_witnesses, test_origin(&decision.test_used, &g)),
            }),
        )?;
        return Ok(code);
    }
    let mut w = || -> std::io::Result<()> {
        writeln!(
            out,
            "{}",
            if decision.accepted {
                "accepted"
            } else {
                "rejected"
            }
        )?;
        writeln!(out, "method {method} ({} protocol)", decision.protocol)?;
        writeln!(
            out,
            "test ({} constraints):",
            decision.test_used.constraints.len()
        )?;
        for c in &decision.test_used.constraints {
            writeln!(out, "  {c}")?;
        }
        if !decision.evaluation_witnesses.is_empty() {
            writeln!(out, "violated:")?;
            write_violations(out, &decision.evaluation_witnesses)?;
        }
        Ok(())
    };
    w().map_err(io_failure)?;
    Ok(code)
}

fn cmd_simplify(a: &SimplifyArgs, cx: &mut Ctx, out: &mut dyn Write) -> CliResult {
    let method = match (&a.kind, &a.method) {
        (Some(k), _) => Method::from(*k),
        (None, Some(m)) => parse_method(m, None)?,
        (None, None) => {
            return Err(Failure::usage(
                "error: one of --kind or --method is required",
            ))
        }
    };
    let (d, g) = load_inputs(cx, &a.inputs)?;
    let u = load_update(cx, &a.update)?;
    let test = generate_test(method, &g, &u, &d)?;
    if a.inputs.json {
        emit_json(
            out,
            &json!({
                "command": "simplify",
                "method": method.to_string(),
                "kind": test.kind.to_string(),
                "reading": test.reading,
                "constraints": sorted(test.constraints.iter().map(ToString::to_string)),
            }),
        )?;
    } else {
        write!(out, "{test}").map_err(io_failure)?;
    }
    Ok(EXIT_OK)
}

fn measure_json(step: usize, accepted: Option<bool>, m: &Measure) -> Value {
    json!({
        "step": step,
        "accepted": accepted,
        "violated": m.violated_cases.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "count": m.violated_count(),
        "total": m.total_cases,
        "ratio": m.ratio,
    })
}

fn write_measure(
    out: &mut dyn Write,
    step: usize,
    accepted: Option<bool>,
    m: &Measure,
) -> std::io::Result<()> {
    let status = match accepted {
        None => "initial",
        Some(true) => "accepted",
        Some(false) => "rejected",
    };
    writeln!(
        out,
        "state {step} ({status}): {} of {} ground cases violated, ratio {:.6}",
        m.violated_count(),
        m.total_cases,
        m.ratio
    )?;
    for c in &m.violated_cases {
        writeln!(out, "  {c}")?;
    }
    Ok(())
}

fn cmd_measure(a: &MeasureArgs, cx: &mut Ctx, out: &mut dyn Write) -> CliResult {
    let method = parse_method(&a.method, None)?;
    let (d, g) = load_inputs(cx, &a.inputs)?;
    let updates = match &a.trace {
        Some(p) => {
            let Loaded::Trace(t) = load(cx, p, SourceKind::Trace, false)? else {
                unreachable!()
            };
            t
        }
        None => Vec::new(),
    };
    let mut states = vec![(None, violated_cases(&d, &g)?)];
    let mut state = d;
    for u in &updates {
        let (decision, next) = check_update(&state, &g, u, method)?;
        if decision.accepted {
            state = next;
            states.push((Some(true), violated_cases(&state, &g)?));
        } else {
            let prev = states.last().unwrap().1.clone();
            states.push((Some(false), prev));
        }
    }
    if a.inputs.json {
        let items: Vec<Value> = states
            .iter()
            .enumerate()
            .map(|(i, (acc, m))| measure_json(i, *acc, m))
            .collect();
        emit_json(
            out,
            &json!({ "command": "measure", "method": method.to_string(), "states": items }),
        )?;
    } else {
        for (i, (acc, m)) in states.iter().enumerate() {
            write_measure(out, i, *acc, m).map_err(io_failure)?;
        }
    }
    Ok(EXIT_OK)
}

fn audit_config(a: &AuditArgs, method: Method) -> GenConfig {
    let schema = match a.schema {
        Some(SchemaArg::Random) => Schema::Random,
        Some(SchemaArg::Example3) => Schema::Example3,
        None if matches!(method, Method::Adversarial(_)) => Schema::Example3,
        None => Schema::Random,
    };
    let base = match schema {
        Schema::Example3 => GenConfig::example3(a.seed, a.trials),
        Schema::Random => GenConfig {
            seed: a.seed,
            trials: a.trials,
            ..GenConfig::default()
        },
    };
    GenConfig {
        max_constants: a.max_constants.unwrap_or(base.max_constants),
        max_predicates: a.max_predicates.unwrap_or(base.max_predicates),
        max_arity: a.max_arity.unwrap_or(base.max_arity),
        max_facts: a.max_facts.unwrap_or(base.max_facts),
        max_ics: a.max_ics.unwrap_or(base.max_ics),
        max_body_literals: a.max_body_literals.unwrap_or(base.max_body_literals),
        max_update_facts: a.max_update_facts.unwrap_or(base.max_update_facts),
        allow_rules: a.allow_rules,
        ..base
    }
}

fn report_json(r: &MethodReport, cfg: &GenConfig) -> Value {
    let correctness: Vec<Value> = r
        .correctness_failures
        .iter()
        .map(|f| {
            json!({
                "trial": f.instance.trial,
                "instance": f.instance.to_string(),
                "test_verdict": f.test_verdict,
                "full_verdict": f.full_verdict,
            })
        })
        .collect();
    let tolerance: Vec<Value> = r
        .tolerance_failures
        .iter()
        .map(|f| {
            let mut cx: Vec<Value> = f
                .verdict
                .counterexamples
                .iter()
                .map(|c| {
                    json!({
                        "constraint": f.instance.theory.constraints[c.ic].to_string(),
                        "case": c.case.to_string(),
                    })
                })
                .collect();
            cx.sort_by_key(|v| v.to_string());
            json!({
                "trial": f.instance.trial,
                "instance": f.instance.to_string(),
                "cases_checked": f.verdict.cases_checked,
                "counterexamples": cx,
            })
        })
        .collect();
    json!({
        "command": "audit",
        "method": r.method.to_string(),
        "passed": r.passed(),
        "trials_run": r.trials_run,
        "consistent_trials": r.consistent_trials,
        "not_applicable": r.not_applicable,
        "correctness_failures": correctness,
        "tolerance_failures": tolerance,
        "generator": {
            "scheme_version": GEN_SCHEME_VERSION,
            "config": cfg,
        },
    })
}

fn write_report(
    out: &mut dyn Write,
    r: &MethodReport,
    cfg: &GenConfig,
    show: usize,
) -> std::io::Result<()> {
    writeln!(out, "method {}", r.method)?;
    writeln!(
        out,
        "trials {} (seed {}, consistent {}, not applicable {})",
        r.trials_run, cfg.seed, r.consistent_trials, r.not_applicable
    )?;
    writeln!(out, "correctness failures {}", r.correctness_failures.len())?;
    writeln!(out, "tolerance failures {}", r.tolerance_failures.len())?;
    for f in r.correctness_failures.iter().take(show) {
        writeln!(
            out,
            "\ncorrectness failure: test says {}, full check says {}",
            verdict(f.test_verdict),
            verdict(f.full_verdict)
        )?;
        write!(out, "{}", f.instance)?;
    }
    for f in r.tolerance_failures.iter().take(show) {
        writeln!(
            out,
            "\ntolerance failure ({} ground cases checked):",
            f.verdict.cases_checked
        )?;
        for c in &f.verdict.counterexamples {
            writeln!(
                out,
                "  counterexample {} (case of {})",
                c.case, f.instance.theory.constraints[c.ic]
            )?;
        }
        write!(out, "{}", f.instance)?;
    }
    if r.passed() {
        writeln!(out, "no counterexample found in {} trials", r.trials_run)?;
    }
    Ok(())
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "satisfied"
    } else {
        "violated"
    }
}

fn cmd_audit(a: &AuditArgs, out: &mut dyn Write) -> CliResult {
    let method = parse_method(&a.method, a.protocol)?;
    let cfg = audit_config(a, method);
    let report = audit_method(method, &cfg)?;
    if a.json {
        emit_json(out, &report_json(&report, &cfg))?;
    } else {
        write_report(out, &report, &cfg, a.show).map_err(io_failure)?;
    }
    Ok(if report.passed() {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    })
}

fn cmd_eval(a: &EvalArgs, cx: &mut Ctx, out: &mut dyn Write) -> CliResult {
    let (d, g) = load_inputs(cx, &a.inputs)?;
    let (ok, report) = holds_theory(&d, &g)?;
    let origin = |i: usize| g.constraints.get(i).map(Constraint::to_string);
    if a.inputs.json {
        emit_json(
            out,
            &json!({
                "command": "eval",
                "consistent": ok,
                "violations": violations_json(&report, origin),
            }),
        )?;
    } else {
        let mut w = || -> std::io::Result<()> {
            writeln!(out, "{}", if ok { "consistent" } else { "inconsistent" })?;
            write_violations(out, &report)
        };
        w().map_err(io_failure)?;
    }
    Ok(if ok { EXIT_OK } else { EXIT_NEGATIVE })
}
