use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use bracekit::brace::{verify_brace_axioms, TableBraceFile};
use bracekit::filters::order_filter;
use bracekit::ideals::{is_simple, socle};
use bracekit::matched::{decompose_and_rebuild, graph_verdict, CycleMode, GraphVerdict};
use bracekit::report::{DEFAULT_CAP, DEFAULT_SAMPLES, DEFAULT_SEED, DEFAULT_TRIPLE_BUDGET};
use bracekit::spec::{build, BuildSpec, Built};
use bracekit::ybe::{canonical_solution, permutation_group, verify_solution, SetSolution, SolutionFile};
use bracekit::{BraceError, LeftBrace, TableBrace, VerifyConfig};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

#[derive(Parser, Debug)]
#[command(name = "bracekit", version, about = "Build and check finite left braces and their Yang-Baxter solutions")]
struct Cli {
    /// Largest brace order handled as a table.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    cap: usize,
    /// Seed for every sampled check.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Number of random tuples per sampled check.
    #[arg(long, global = true, default_value_t = DEFAULT_SAMPLES)]
    samples: u64,
    /// Largest number of triples checked exhaustively.
    #[arg(long, global = true, default_value_t = DEFAULT_TRIPLE_BUDGET)]
    triple_budget: u64,
    /// Write the result here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Include wall-clock timings (makes output nondeterministic).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Construct a brace from a JSON spec.
    Build {
        spec: PathBuf,
        /// Emit a formula descriptor when the order exceeds the cap.
        #[arg(long)]
        formula: bool,
    },
    /// Run checks on a brace file (table or formula descriptor).
    Check {
        brace: PathBuf,
        /// Brace axioms (the default when no check is named)
        #[arg(long)]
        axioms: bool,
        /// Exhaustive simplicity by ideal closure
        #[arg(long)]
        simple: bool,
        /// Elements with identity lambda
        #[arg(long)]
        socle: bool,
        /// Sylow decomposition and rebuild
        #[arg(long)]
        decompose: bool,
        /// Simplicity verdict from the graph of actions of a product.
        #[arg(long)]
        graph: bool,
        #[arg(long, value_enum, default_value_t = ModeArg::WalkCycle)]
        mode: ModeArg,
    },
    /// Canonical set-theoretic solution of a brace file.
    Solution { brace: PathBuf },
    /// Check a solution file.
    Verify { solution: PathBuf },
    /// Screen an order for simple braces.
    Filter { n: u64 },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    WalkCycle,
    StrictCycle,
}

impl From<ModeArg> for CycleMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::WalkCycle => CycleMode::WalkCycle,
            ModeArg::StrictCycle => CycleMode::StrictCycle,
        }
    }
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Cap(String),
}

impl From<BraceError> for Failure {
    fn from(e: BraceError) -> Self {
        match e {
            BraceError::CapExceeded { .. } => Failure::Cap(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

/// Outcome of a command, ordered by exit-code precedence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Status {
    True,
    Inapplicable,
    False,
}

impl Status {
    fn of(b: bool) -> Self {
        if b {
            Status::True
        } else {
            Status::False
        }
    }

    fn code(self) -> u8 {
        match self {
            Status::True => 0,
            Status::False => 1,
            Status::Inapplicable => 2,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Status::True => "true",
            Status::False => "false",
            Status::Inapplicable => "inapplicable",
        }
    }
}

struct Input {
    path: PathBuf,
    bytes: Vec<u8>,
}

impl Input {
    fn read(path: &Path) -> Result<Self, Failure> {
        let bytes = fs::read(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        Ok(Self { path: path.to_path_buf(), bytes })
    }

    fn json(&self) -> Result<Value, Failure> {
        serde_json::from_slice(&self.bytes).map_err(|e| Failure::Input(format!("{}: {e}", self.path.display())))
    }

    fn describe(&self) -> Value {
        json!({ "path": self.path.display().to_string(), "sha256": format!("{:x}", Sha256::digest(&self.bytes)) })
    }
}

struct Ctx {
    cfg: VerifyConfig,
    timing: bool,
    inputs: Vec<Value>,
    start: Instant,
}

impl Ctx {
    fn tool(&self) -> Value {
        json!({
            "name": "bracekit",
            "version": env!("CARGO_PKG_VERSION"),
            "inputs": self.inputs,
            "cap": self.cfg.cap,
            "samples": self.cfg.samples,
            "seed": self.cfg.seed,
            "triple_budget": self.cfg.triple_budget,
        })
    }

    fn envelope(&self, command: &str, status: Status, results: Value) -> Value {
        let mut out = json!({
            "format": bracekit::FORMAT,
            "command": command,
            "verdict": status.label(),
            "results": results,
            "tool": self.tool(),
        });
        if self.timing {
            out["timing_ms"] = json!(self.start.elapsed().as_secs_f64() * 1e3);
        }
        out
    }
}

/// A brace file: either a table or a formula descriptor produced by `build --formula`.
enum Loaded {
    Table(TableBrace, Option<BuildSpec>),
    Formula(Built, BuildSpec),
}

impl Loaded {
    fn spec(&self) -> Option<&BuildSpec> {
        match self {
            Loaded::Table(_, s) => s.as_ref(),
            Loaded::Formula(_, s) => Some(s),
        }
    }

    fn table(&self, cfg: &VerifyConfig) -> Result<TableBrace, Failure> {
        match self {
            Loaded::Table(t, _) => Ok(t.clone()),
            Loaded::Formula(b, _) => Ok(TableBrace::tabulate_unverified(&b.brace, cfg)?),
        }
    }
}

fn load_brace(input: &Input, cfg: &VerifyConfig) -> Result<Loaded, Failure> {
    let value = input.json()?;
    if value.get("kind").and_then(Value::as_str) == Some("formula") {
        let spec = value.get("spec").cloned().ok_or_else(|| Failure::Input("formula descriptor without spec".into()))?;
        let spec = BuildSpec::from_value(spec).map_err(Failure::Input)?;
        let built = build(&spec, cfg)?;
        return Ok(Loaded::Formula(built, spec));
    }
    let file: TableBraceFile = serde_json::from_value(value).map_err(|e| Failure::Input(e.to_string()))?;
    if let Some(f) = &file.format {
        if f != bracekit::FORMAT {
            return Err(Failure::Input(format!("unsupported format {f:?}")));
        }
    }
    let spec = file.provenance.get("spec").cloned().and_then(|s| BuildSpec::from_value(s).ok());
    Ok(Loaded::Table(TableBrace::from_file(file)?, spec))
}

fn cmd_build(ctx: &Ctx, input: &Input, formula: bool) -> Result<(Status, Value), Failure> {
    let spec = BuildSpec::from_value(input.json()?).map_err(Failure::Input)?;
    let built = build(&spec, &ctx.cfg)?;
    let spec_value = serde_json::to_value(&spec).expect("spec serializes");
    if !built.certificate.passed() {
        return Ok((
            Status::False,
            ctx.envelope("build", Status::False, json!({ "spec": spec_value, "certificate": built.certificate })),
        ));
    }
    let provenance = json!({
        "brace": built.brace.provenance(),
        "spec": spec_value,
        "certificate": built.certificate,
        "tool": ctx.tool(),
    });
    let order = built.brace.order().filter(|&o| o <= ctx.cfg.cap);
    if order.is_some() {
        let mut t = TableBrace::tabulate(&built.brace, &ctx.cfg)?;
        t.set_provenance(provenance);
        let file = serde_json::to_value(t.to_file()).expect("table serializes");
        return Ok((Status::True, file));
    }
    if !formula {
        return Err(Failure::Cap(format!(
            "order {} exceeds the cap {}; pass --formula for a formula descriptor",
            built.brace.shape().order_big(),
            ctx.cfg.cap
        )));
    }
    let mut out = json!({
        "format": bracekit::FORMAT,
        "kind": "formula",
        "shape": built.brace.shape(),
        "order": built.brace.shape().order_big().to_string(),
    });
    let Value::Object(prov) = provenance else { unreachable!() };
    out.as_object_mut().expect("object").extend(prov);
    Ok((Status::True, out))
}

struct CheckFlags {
    axioms: bool,
    simple: bool,
    socle: bool,
    decompose: bool,
    graph: bool,
    mode: CycleMode,
}

fn cmd_check(ctx: &Ctx, input: &Input, flags: CheckFlags) -> Result<(Status, Value), Failure> {
    let cfg = &ctx.cfg;
    let loaded = load_brace(input, cfg)?;
    let axioms = flags.axioms || !(flags.simple || flags.socle || flags.decompose || flags.graph);
    let mut results = Map::new();
    let mut status = Status::True;
    let mut record = |key: &str, s: Status, value: Value, status: &mut Status| {
        *status = (*status).max(s);
        results.insert(key.into(), value);
    };
    let within_cap = match &loaded {
        Loaded::Table(..) => true,
        Loaded::Formula(b, _) => b.brace.order().is_some_and(|o| o <= cfg.cap),
    };
    let table = if within_cap && (flags.simple || flags.socle || flags.decompose || (axioms && matches!(loaded, Loaded::Table(..)))) {
        Some(loaded.table(cfg)?)
    } else {
        None
    };
    let needs_table = |what: &str| json!({ "inapplicable": format!("{what} needs a table within the cap {}", cfg.cap) });

    if axioms {
        let report = match (&table, &loaded) {
            (Some(t), _) => t.verify_axioms(cfg),
            (None, Loaded::Formula(b, _)) => verify_brace_axioms(&b.brace, cfg),
            (None, Loaded::Table(t, _)) => t.verify_axioms(cfg),
        };
        record("axioms", Status::of(report.passed()), json!(report), &mut status);
    }
    if flags.simple {
        match &table {
            Some(t) => {
                let cert = is_simple(t);
                record("simple", Status::of(cert.simple), json!(cert), &mut status);
            }
            None => record("simple", Status::Inapplicable, needs_table("simplicity"), &mut status),
        }
    }
    if flags.socle {
        match &table {
            Some(t) => {
                let s = socle(t);
                let value = json!({ "size": s.len(), "indices": s, "elements": t.elements_of(&s) });
                record("socle", Status::True, value, &mut status);
            }
            None => record("socle", Status::Inapplicable, needs_table("the socle"), &mut status),
        }
    }
    if flags.decompose {
        match &table {
            Some(t) => {
                let d = decompose_and_rebuild(t, cfg)?;
                let components: Vec<Value> = d
                    .components
                    .iter()
                    .map(|c| json!({ "prime": c.prime, "shape": c.brace.shape(), "order": c.brace.order() }))
                    .collect();
                let value = json!({ "components": components, "eta_check": d.eta_check, "validation": d.validation });
                record("decompose", Status::of(d.eta_check), value, &mut status);
            }
            None => record("decompose", Status::Inapplicable, needs_table("decomposition"), &mut status),
        }
    }
    if flags.graph {
        let built = match loaded.spec() {
            Some(spec) => Some(build(spec, cfg)?),
            None => None,
        };
        match built.as_ref().and_then(|b| b.actions.as_ref()) {
            Some(actions) => {
                let factor_simple: Vec<Option<bool>> = actions
                    .braces()
                    .iter()
                    .map(|b| match b.order() {
                        Some(o) if o <= cfg.cap => TableBrace::tabulate_unverified(b, cfg).ok().map(|t| is_simple(&t).simple),
                        _ => None,
                    })
                    .collect();
                let verdict = graph_verdict(actions, &factor_simple, flags.mode, cfg);
                let s = match verdict {
                    GraphVerdict::Simple => Status::True,
                    GraphVerdict::NotSimple { .. } => Status::False,
                    GraphVerdict::Inapplicable { .. } => Status::Inapplicable,
                };
                let graph = bracekit::matched::action_graph(actions, cfg);
                record("graph", s, json!({ "graph": graph, "mode": flags.mode, "verdict": verdict }), &mut status);
            }
            None => record(
                "graph",
                Status::Inapplicable,
                json!({ "inapplicable": "the brace file does not record a product construction" }),
                &mut status,
            ),
        }
    }
    Ok((status, ctx.envelope("check", status, Value::Object(results))))
}

fn cmd_solution(ctx: &Ctx, input: &Input) -> Result<(Status, Value), Failure> {
    let loaded = load_brace(input, &ctx.cfg)?;
    let t = loaded.table(&ctx.cfg)?;
    let sol = canonical_solution(&t, &ctx.cfg)?;
    let mut file = sol.to_file();
    file.provenance = json!({ "solution": file.provenance, "tool": ctx.tool() });
    Ok((Status::True, serde_json::to_value(file).expect("solution serializes")))
}

fn cmd_verify(ctx: &Ctx, input: &Input) -> Result<(Status, Value), Failure> {
    let file: SolutionFile = serde_json::from_value(input.json()?).map_err(|e| Failure::Input(e.to_string()))?;
    let sol = SetSolution::from_file(file)?;
    let report = verify_solution(&sol, &ctx.cfg);
    let group = permutation_group(&sol, ctx.cfg.cap.saturating_mul(16)).ok();
    let status = Status::of(report.passed());
    Ok((status, ctx.envelope("verify", status, json!({ "report": report, "group": group }))))
}

fn cmd_filter(ctx: &Ctx, n: u64) -> Result<(Status, Value), Failure> {
    let verdict = order_filter(n)?;
    let status = Status::of(verdict.is_possible());
    Ok((status, ctx.envelope("filter", status, json!({ "n": n, "filter": verdict }))))
}

fn run(cli: Cli) -> Result<Status, Failure> {
    let cfg = VerifyConfig { cap: cli.cap, samples: cli.samples, seed: cli.seed, triple_budget: cli.triple_budget };
    let input = match &cli.command {
        Command::Build { spec: p, .. } | Command::Check { brace: p, .. } | Command::Solution { brace: p } | Command::Verify { solution: p } => {
            Some(Input::read(p)?)
        }
        Command::Filter { .. } => None,
    };
    let ctx = Ctx { cfg, timing: cli.timing, inputs: input.iter().map(Input::describe).collect(), start: Instant::now() };
    let (status, value) = match cli.command {
        Command::Build { formula, .. } => cmd_build(&ctx, input.as_ref().expect("input"), formula)?,
        Command::Check { axioms, simple, socle, decompose, graph, mode, .. } => cmd_check(
            &ctx,
            input.as_ref().expect("input"),
            CheckFlags { axioms, simple, socle, decompose, graph, mode: mode.into() },
        )?,
        Command::Solution { .. } => cmd_solution(&ctx, input.as_ref().expect("input"))?,
        Command::Verify { .. } => cmd_verify(&ctx, input.as_ref().expect("input"))?,
        Command::Filter { n } => cmd_filter(&ctx, n)?,
    };
    let mut text = serde_json::to_string_pretty(&value).expect("json");
    text.push('\n');
    match &cli.output {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(status)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(status) => ExitCode::from(status.code()),
        Err(Failure::Cap(msg)) => {
            eprintln!("bracekit: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("bracekit: {msg}");
            ExitCode::from(3)
        }
    }
}
