//! `reconcile`: JSON-in, JSON-out front end for reconcile-core.
//!
//! Every command prints one envelope `{"diagnostics", "payload", "status"}`
//! with sorted keys. Exit codes: 0 ok, 2 input error, 3 domain error,
//! 4 resource limit.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use reconcile_core::belief::{
    abduce, diagnose, revise, update_pma, AbductionProblem, ChangeResult, DiagnosisProblem,
};
use reconcile_core::encoder::{encode_bounded, solve_with_deepening};
use reconcile_core::logic::{
    entails, enumerate_models, parse_formula, Atom, Formula, KbEntry, KnowledgeBase, Limits, Mode,
    Model,
};
use reconcile_core::planning::{bfs_optimal_plan, plan_trace_model, Plan, PlanningProblem};
use reconcile_core::reconcile::{
    check_plan_optimality, check_plan_validity_in, explain_plan, find_explanation, update_kb,
    CostModel, Explanation, GammaPolicy, SearchOptions,
};
use reconcile_core::{Error, ErrorKind};

const ATOM_CAP_VAR: &str = "RECONCILE_ATOM_CAP";

#[derive(Parser)]
#[command(
    name = "reconcile",
    version,
    about = "Explainable planning over propositional knowledge bases"
)]
struct Cli {
    /// Indent the JSON output.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Skeptical,
    Credulous,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Skeptical => Mode::Skeptical,
            ModeArg::Credulous => Mode::Credulous,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum GammaArg {
    None,
    MinCard,
    Trace,
}

#[derive(Clone, Copy, ValueEnum)]
enum Engine {
    Sat,
    Bfs,
}

#[derive(clap::Args)]
struct PlanArgs {
    /// Planning problem JSON.
    #[arg(long)]
    problem: PathBuf,
    /// Plan JSON (array of action names).
    #[arg(long)]
    plan: PathBuf,
    /// Encoding horizon; defaults to the plan length.
    #[arg(long)]
    horizon: Option<usize>,
    /// Human knowledge base; defaults to the problem's own encoding.
    #[arg(long)]
    kb_h: Option<PathBuf>,
}

#[derive(clap::Args)]
struct SearchArgs {
    #[arg(long, value_enum, default_value = "min-card")]
    gamma: GammaArg,
    /// Also require the explanation to entail the query on its own.
    #[arg(long)]
    require_support: bool,
    /// Stop after examining this many candidate subsets.
    #[arg(long)]
    max_steps: Option<u64>,
    /// JSON object mapping labels to integer costs (default 1 each).
    #[arg(long)]
    weights: Option<PathBuf>,
    /// Planning problem whose plan provides the trace model.
    #[arg(long)]
    problem: Option<PathBuf>,
    /// Plan for the trace model or for plan explanations.
    #[arg(long)]
    plan: Option<PathBuf>,
}

#[derive(clap::Args)]
struct ChangeArgs {
    #[arg(long)]
    kb: PathBuf,
    /// Formula text to incorporate.
    #[arg(long, conflicts_with = "epsilon", required_unless_present = "epsilon")]
    formula: Option<String>,
    /// Knowledge base whose conjunction is incorporated.
    #[arg(long)]
    epsilon: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the models of a knowledge base.
    Models {
        #[arg(long)]
        kb: PathBuf,
    },
    /// Decide entailment of a formula.
    Entail {
        #[arg(long)]
        kb: PathBuf,
        #[arg(long)]
        query: String,
        #[arg(long, value_enum, default_value = "skeptical")]
        mode: ModeArg,
    },
    /// Dump the bounded encoding of a planning problem.
    Encode {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        horizon: usize,
        /// Leave out the goal clause.
        #[arg(long)]
        no_goal: bool,
    },
    /// Find an optimal plan.
    Plan {
        #[arg(long)]
        problem: PathBuf,
        /// Largest horizon tried by the SAT engine.
        #[arg(long, default_value_t = 10)]
        horizon: usize,
        #[arg(long, value_enum, default_value = "sat")]
        engine: Engine,
    },
    /// Check plan validity in a knowledge base.
    Validate {
        #[command(flatten)]
        plan: PlanArgs,
        #[arg(long, value_enum, default_value = "credulous")]
        mode: ModeArg,
    },
    /// Check plan optimality in a knowledge base.
    Optimal {
        #[command(flatten)]
        plan: PlanArgs,
    },
    /// Explain a query (or a plan) from the agent's knowledge base to the human's.
    Explain {
        #[arg(long)]
        kb_a: PathBuf,
        #[arg(long)]
        kb_h: PathBuf,
        /// Query formula; without it, explain validity and optimality of --plan.
        #[arg(long)]
        query: Option<String>,
        #[arg(long, value_enum, default_value = "skeptical")]
        mode: ModeArg,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Update a knowledge base with a set of formulas, restoring consistency.
    Update {
        #[arg(long)]
        kb: PathBuf,
        /// Formulas to add, as a knowledge base file.
        #[arg(long)]
        epsilon: PathBuf,
        /// Agent knowledge base, for the trace policy.
        #[arg(long)]
        kb_a: Option<PathBuf>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Dalal revision.
    Revise(ChangeArgs),
    /// Possible-models update.
    PmaUpdate(ChangeArgs),
    /// Abductive explanations over positive hypotheses.
    Abduce {
        #[arg(long)]
        kb: PathBuf,
        #[arg(long)]
        query: String,
        /// Comma-separated hypothesis atoms; defaults to the whole signature.
        #[arg(long, value_delimiter = ',')]
        hypotheses: Option<Vec<String>>,
    },
    /// Minimal diagnoses.
    Diagnose {
        #[arg(long)]
        kb: PathBuf,
        /// Observation formula; repeatable.
        #[arg(long)]
        obs: Vec<String>,
        /// Component and its abnormality atom as `name=atom`; repeatable.
        #[arg(long)]
        component: Vec<String>,
    },
}

struct Failure {
    kind: ErrorKind,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            kind: e.kind(),
            message: e.to_string(),
        }
    }
}

fn input_error(message: String) -> Failure {
    Failure {
        kind: ErrorKind::Input,
        message,
    }
}

type CmdResult = Result<(Value, Vec<String>), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn in_file<T>(path: &Path, r: Result<T, Error>) -> Result<T, Failure> {
    r.map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })
}

fn load_kb(path: &Path) -> Result<KnowledgeBase, Failure> {
    in_file(path, KnowledgeBase::from_json(&read(path)?))
}

fn load_problem(path: &Path) -> Result<PlanningProblem, Failure> {
    in_file(path, PlanningProblem::from_json(&read(path)?))
}

fn load_plan(path: &Path) -> Result<Plan, Failure> {
    in_file(path, Plan::from_json(&read(path)?))
}

fn formula(text: &str) -> Result<Formula, Failure> {
    parse_formula(text).map_err(|e| input_error(format!("formula `{text}`: {e}")))
}

fn limits() -> Result<Limits, Failure> {
    match std::env::var(ATOM_CAP_VAR) {
        Err(_) => Ok(Limits::default()),
        Ok(v) => v.trim().parse().map(Limits::with_atom_cap).map_err(|_| {
            input_error(format!(
                "{ATOM_CAP_VAR}=`{v}` is not a non-negative integer"
            ))
        }),
    }
}

fn model_json(m: &Model) -> Value {
    json!(m.sorted_names())
}

fn labels(entries: &[KbEntry]) -> Value {
    json!(entries.iter().map(|e| e.label.as_str()).collect::<Vec<_>>())
}

fn plan_json(plan: &Plan) -> Value {
    json!(plan.steps())
}

fn cmd_models(kb: &Path) -> CmdResult {
    let kb = load_kb(kb)?;
    let models = enumerate_models(&kb, &limits()?)?;
    let diagnostics = if models.is_empty() {
        vec!["knowledge base is inconsistent".to_string()]
    } else {
        Vec::new()
    };
    Ok((
        Value::Array(models.iter().map(model_json).collect()),
        diagnostics,
    ))
}

fn cmd_entail(kb: &Path, query: &str, mode: Mode) -> CmdResult {
    let kb = load_kb(kb)?;
    let phi = formula(query)?;
    let payload = json!({
        "entailed": entails(&kb, &phi, mode),
        "mode": mode.to_string(),
        "query": phi.to_string(),
    });
    Ok((payload, Vec::new()))
}

fn cmd_encode(problem: &Path, horizon: usize, no_goal: bool) -> CmdResult {
    let problem = load_problem(problem)?;
    let enc = encode_bounded(&problem, horizon, !no_goal)?;
    Ok((enc.kb().to_json_value(), Vec::new()))
}

fn cmd_plan(problem: &Path, horizon: usize, engine: Engine) -> CmdResult {
    let problem = load_problem(problem)?;
    let found = match engine {
        Engine::Sat => solve_with_deepening(&problem, horizon)?.map(|(p, _)| p),
        Engine::Bfs => bfs_optimal_plan(&problem),
    };
    Ok(match found {
        Some(plan) => (
            json!({ "length": plan.len(), "plan": plan_json(&plan) }),
            Vec::new(),
        ),
        None => (Value::Null, vec!["no plan found".to_string()]),
    })
}

struct PlanContext {
    kb_h: KnowledgeBase,
    enc: reconcile_core::encoder::BoundedEncoding,
    plan: Plan,
}

fn plan_context(args: &PlanArgs) -> Result<PlanContext, Failure> {
    let problem = load_problem(&args.problem)?;
    let plan = load_plan(&args.plan)?;
    let horizon = args.horizon.unwrap_or(plan.len());
    let enc = encode_bounded(&problem, horizon, true)?;
    let kb_h = match &args.kb_h {
        Some(p) => load_kb(p)?,
        None => enc.kb().clone(),
    };
    Ok(PlanContext { kb_h, enc, plan })
}

fn cmd_validate(args: &PlanArgs, mode: Mode) -> CmdResult {
    let ctx = plan_context(args)?;
    let valid = check_plan_validity_in(&ctx.kb_h, &ctx.enc, &ctx.plan, mode)?;
    let payload = json!({
        "horizon": ctx.enc.horizon(),
        "mode": mode.to_string(),
        "plan": plan_json(&ctx.plan),
        "valid": valid,
    });
    Ok((payload, Vec::new()))
}

fn cmd_optimal(args: &PlanArgs) -> CmdResult {
    let ctx = plan_context(args)?;
    let valid = check_plan_validity_in(&ctx.kb_h, &ctx.enc, &ctx.plan, Mode::Credulous)?;
    let optimal = check_plan_optimality(&ctx.kb_h, &ctx.enc, &ctx.plan)?;
    let payload = json!({
        "horizon": ctx.enc.horizon(),
        "optimal": optimal,
        "plan": plan_json(&ctx.plan),
        "valid": valid,
    });
    Ok((payload, Vec::new()))
}

fn search_options(args: &SearchArgs) -> Result<SearchOptions, Failure> {
    let cost = match &args.weights {
        None => CostModel::Cardinality,
        Some(path) => {
            let weights: BTreeMap<String, u64> = serde_json::from_str(&read(path)?)
                .map_err(|e| input_error(format!("{}: {e}", path.display())))?;
            CostModel::Weighted(weights)
        }
    };
    Ok(SearchOptions {
        max_steps: args.max_steps,
        cost,
        require_support: args.require_support,
        limits: limits()?,
    })
}

/// The trace model comes from `--problem`/`--plan` when given, otherwise
/// from the agent knowledge base if it has exactly one model.
fn trace_model(args: &SearchArgs, kb_a: &KnowledgeBase) -> Result<Model, Failure> {
    if let (Some(problem), Some(plan)) = (&args.problem, &args.plan) {
        let problem = load_problem(problem)?;
        let plan = load_plan(plan)?;
        return Ok(plan_trace_model(&problem, &plan, plan.len())?);
    }
    let models = enumerate_models(kb_a, &limits()?)?;
    match models.as_slice() {
        [m] => Ok(m.clone()),
        _ => Err(Error::Precondition(format!(
            "the trace policy needs --problem and --plan, or an agent knowledge base with exactly one model (found {})",
            models.len()
        ))
        .into()),
    }
}

fn policy(args: &SearchArgs, kb_a: Option<&KnowledgeBase>) -> Result<GammaPolicy, Failure> {
    Ok(match args.gamma {
        GammaArg::None => GammaPolicy::None,
        GammaArg::MinCard => GammaPolicy::MinCard,
        GammaArg::Trace => {
            let kb_a = kb_a
                .ok_or_else(|| input_error("the trace policy needs --kb-a".to_string()))?
                .clone();
            GammaPolicy::Trace {
                trace: trace_model(args, &kb_a)?,
                kb_a,
            }
        }
    })
}

fn explanation_json(e: &Explanation) -> Value {
    json!({
        "cost": e.cost,
        "epsilon": labels(&e.epsilon),
        "gamma": labels(&e.gamma),
        "mode": e.mode.to_string(),
        "updated_kb": e.updated().to_json_value(),
    })
}

fn cmd_explain(
    kb_a: &Path,
    kb_h: &Path,
    query: Option<&str>,
    mode: Mode,
    search: &SearchArgs,
) -> CmdResult {
    let kb_a = load_kb(kb_a)?;
    let kb_h = load_kb(kb_h)?;
    let opts = search_options(search)?;
    let policy = policy(search, Some(&kb_a))?;
    let found = match query {
        Some(q) => find_explanation(&kb_a, &kb_h, &formula(q)?, mode, &policy, &opts)?,
        None => {
            let (Some(problem), Some(plan)) = (&search.problem, &search.plan) else {
                return Err(input_error(
                    "explain needs --query, or --problem and --plan".into(),
                ));
            };
            let problem = load_problem(problem)?;
            let plan = load_plan(plan)?;
            let enc = encode_bounded(&problem, plan.len(), true)?;
            explain_plan(&kb_a, &kb_h, &enc, &plan, &policy, &opts)?
        }
    };
    Ok(match found {
        Some(e) => (explanation_json(&e), e.notes.clone()),
        None => (
            Value::Null,
            vec!["no subset of the agent knowledge base explains the query".into()],
        ),
    })
}

fn cmd_update(kb: &Path, epsilon: &Path, kb_a: Option<&Path>, search: &SearchArgs) -> CmdResult {
    let kb = load_kb(kb)?;
    let epsilon = load_kb(epsilon)?;
    let kb_a = kb_a.map(load_kb).transpose()?;
    let opts = search_options(search)?;
    let policy = policy(search, kb_a.as_ref())?;
    let r = update_kb(&kb, epsilon.entries(), &policy, &opts)?;
    let payload = json!({
        "added": labels(&r.added),
        "removed": labels(&r.removed),
        "updated_kb": r.updated.to_json_value(),
    });
    Ok((payload, Vec::new()))
}

fn change_input(args: &ChangeArgs) -> Result<(KnowledgeBase, Formula), Failure> {
    let kb = load_kb(&args.kb)?;
    let phi = match (&args.formula, &args.epsilon) {
        (Some(text), _) => formula(text)?,
        (None, Some(path)) => {
            let eps = load_kb(path)?;
            let conj = eps.conjunction();
            // keep the epsilon file's declared atoms in play
            let kb = kb.with_signature(eps.signature());
            return Ok((kb, conj));
        }
        (None, None) => unreachable!("clap requires one of --formula and --epsilon"),
    };
    Ok((kb, phi))
}

fn change_json(r: &ChangeResult) -> Value {
    let formula = r.kb.entries().first().map(|e| e.formula.to_string());
    json!({
        "formula": formula,
        "kb": r.kb.to_json_value(),
        "models": r.models.iter().map(model_json).collect::<Vec<_>>(),
    })
}

fn cmd_revise(args: &ChangeArgs) -> CmdResult {
    let (kb, phi) = change_input(args)?;
    Ok((change_json(&revise(&kb, &phi, &limits()?)?), Vec::new()))
}

fn cmd_pma(args: &ChangeArgs) -> CmdResult {
    let (kb, phi) = change_input(args)?;
    Ok((change_json(&update_pma(&kb, &phi, &limits()?)?), Vec::new()))
}

fn atom(name: &str) -> Result<Atom, Failure> {
    Atom::new(name).map_err(|e| input_error(e.to_string()))
}

fn cmd_abduce(kb: &Path, query: &str, hypotheses: Option<&[String]>) -> CmdResult {
    let kb = load_kb(kb)?;
    let q = formula(query)?;
    let problem = match hypotheses {
        None => AbductionProblem::with_all_atoms(kb, q),
        Some(names) => {
            let atoms = names
                .iter()
                .map(|n| atom(n))
                .collect::<Result<Vec<_>, _>>()?;
            AbductionProblem::new(kb, q, atoms)?
        }
    };
    let r = abduce(&problem)?;
    let diagnostics = r
        .failure
        .iter()
        .map(|f| format!("abduction failed: {f}"))
        .collect();
    let payload = json!({
        "abducibles": r.abducibles.iter().map(Atom::name).collect::<Vec<_>>(),
        "explanations": r.explanations.iter().map(Formula::to_string).collect::<Vec<_>>(),
        "reason": r.failure.map(|f| f.to_string()),
    });
    Ok((payload, diagnostics))
}

fn cmd_diagnose(kb: &Path, obs: &[String], components: &[String]) -> CmdResult {
    let kb = load_kb(kb)?;
    let observations = obs
        .iter()
        .map(|o| formula(o))
        .collect::<Result<Vec<_>, _>>()?;
    let mut ab = Vec::new();
    for c in components {
        let (name, a) = c
            .split_once('=')
            .ok_or_else(|| input_error(format!("component `{c}` is not `name=atom`")))?;
        ab.push((name.to_string(), atom(a)?));
    }
    let problem = DiagnosisProblem::new(kb, observations, ab)?;
    let diagnoses = diagnose(&problem);
    let diagnostics = if diagnoses.is_empty() {
        vec!["no set of faulty components restores consistency".to_string()]
    } else {
        Vec::new()
    };
    Ok((json!({ "diagnoses": diagnoses }), diagnostics))
}

fn run(command: &Command) -> CmdResult {
    match command {
        Command::Models { kb } => cmd_models(kb),
        Command::Entail { kb, query, mode } => cmd_entail(kb, query, (*mode).into()),
        Command::Encode {
            problem,
            horizon,
            no_goal,
        } => cmd_encode(problem, *horizon, *no_goal),
        Command::Plan {
            problem,
            horizon,
            engine,
        } => cmd_plan(problem, *horizon, *engine),
        Command::Validate { plan, mode } => cmd_validate(plan, (*mode).into()),
        Command::Optimal { plan } => cmd_optimal(plan),
        Command::Explain {
            kb_a,
            kb_h,
            query,
            mode,
            search,
        } => cmd_explain(kb_a, kb_h, query.as_deref(), (*mode).into(), search),
        Command::Update {
            kb,
            epsilon,
            kb_a,
            search,
        } => cmd_update(kb, epsilon, kb_a.as_deref(), search),
        Command::Revise(args) => cmd_revise(args),
        Command::PmaUpdate(args) => cmd_pma(args),
        Command::Abduce {
            kb,
            query,
            hypotheses,
        } => cmd_abduce(kb, query, hypotheses.as_deref()),
        Command::Diagnose { kb, obs, component } => cmd_diagnose(kb, obs, component),
    }
}

fn exit_code(kind: ErrorKind) -> u8 {
    match kind {
        ErrorKind::Input => 2,
        ErrorKind::Domain => 3,
        ErrorKind::Resource => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (envelope, code) = match run(&cli.command) {
        Ok((payload, diagnostics)) => (
            json!({ "diagnostics": diagnostics, "payload": payload, "status": "ok" }),
            0,
        ),
        Err(f) => (
            json!({ "diagnostics": [f.message], "payload": null, "status": "error" }),
            exit_code(f.kind),
        ),
    };
    let text = if cli.pretty {
        serde_json::to_string_pretty(&envelope)
    } else {
        serde_json::to_string(&envelope)
    }
    .expect("json values serialize");
    println!("{text}");
    ExitCode::from(code)
}
