//! Command-line front end.
//!
//! Five subcommands share one flag set (`--spec`, `--n`, `--a`, `--b`, `--c`,
//! `--t`, `--alpha`, `--lambda`, `--samples`, `--seed`, `--workers`,
//! `--format`, `--out`). Distribution documents are JSON:
//!
//! ```json
//! {"kind": "boolean_iid", "n": 4, "params": {"p": 0.5}}
//! {"kind": "explicit_table", "support": [{"x": [0, 1], "p": 0.5}, {"x": [1, 0], "p": 0.5}]}
//! ```
//!
//! Exit codes: 0 success (or `found`), 2 validation error, 3 `not_found`,
//! 4 exhausted budget.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Read;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::entropy::{evaluate_bound, g_objective, kl_div, normalize, BoundParams, LAMBDA_CAP};
use crate::error::{Error, Result};
use crate::mc::{
    estimate_product, exact_conditional_product_expectation, exact_product_expectation, verify_chain, ChainOutcome,
    SamplerConfig,
};
use crate::models::{Atom, JointModel, Marginal, SupportPoint};
use crate::sampling::DEFAULT_SEED;
use crate::witness::{default_budgets, find_dependent_set, Verdict, WitnessParams};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NOT_FOUND: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

const DEFAULT_SAMPLES: u64 = 100_000;

#[derive(Debug, Parser)]
#[command(
    name = "concentrate",
    version,
    about = "Real-valued Chernoff-Hoeffding bound toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    T,
    Lambda,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Distribution document (JSON); `-` reads stdin.
    #[arg(long)]
    pub spec: Option<String>,
    /// Number of variables; defaults to the document's n.
    #[arg(long)]
    pub n: Option<usize>,
    /// Lower endpoints a_i; one value broadcasts.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub a: Option<Vec<f64>>,
    /// Common range width.
    #[arg(long, default_value_t = 1.0)]
    pub b: f64,
    /// Moment constants c_i; one value broadcasts.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub c: Option<Vec<f64>>,
    /// Deviation parameter t.
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Subset inclusion rate; defaults to the optimal λ.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: u64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the bound, normalized parameters and optimal λ.
    Bound(CommonArgs),
    /// Monte Carlo estimates of the subset-product expectations.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        /// Also estimate the expectation conditional on the tail event.
        #[arg(long)]
        conditional: bool,
        /// Rejection budget (draws) for the conditional estimate.
        #[arg(long)]
        max_draws: Option<u64>,
    },
    /// Search for a dependent subset.
    Detect(CommonArgs),
    /// Exact check of the hypothesis, the bound and the inequality chain.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Largest subset size for the moment certificates (default min(n, 6)).
        #[arg(long)]
        max_subset: Option<usize>,
    },
    /// Tabulate bound and exact quantities over a grid of t or λ.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum, default_value_t = SweepAxis::T)]
        over: SweepAxis,
        #[arg(long, default_value_t = 50)]
        points: usize,
        /// First grid value (default 0).
        #[arg(long, allow_hyphen_values = true)]
        from: Option<f64>,
        /// Last grid value (default b + mean(a) - mean(c) for t, 1 - 1e-6 for λ).
        #[arg(long, allow_hyphen_values = true)]
        to: Option<f64>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Bound(_) => "bound",
            Command::Simulate { .. } => "simulate",
            Command::Detect(_) => "detect",
            Command::Verify { .. } => "verify",
            Command::Sweep { .. } => "sweep",
        }
    }

    fn common(&self) -> &CommonArgs {
        match self {
            Command::Bound(c) | Command::Detect(c) => c,
            Command::Simulate { common, .. } | Command::Verify { common, .. } | Command::Sweep { common, .. } => common,
        }
    }
}

/// Per-variable marginal in a distribution document.
#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MarginalSpec {
    Bernoulli(f64),
    Atoms(Vec<Atom>),
    Uniform { lo: f64, hi: f64 },
}

impl MarginalSpec {
    fn build(&self) -> Result<Marginal> {
        match self {
            MarginalSpec::Bernoulli(p) => Marginal::bernoulli(*p),
            MarginalSpec::Atoms(atoms) => Marginal::discrete(atoms.clone()),
            MarginalSpec::Uniform { lo, hi } => Marginal::uniform(*lo, *hi),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    #[serde(default)]
    pub schema_version: Option<u32>,
    pub kind: String,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub params: Value,
    #[serde(default)]
    pub support: Option<Vec<SupportPoint>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct KindParams {
    p: Option<Value>,
    marginal: Option<MarginalSpec>,
    marginals: Option<Vec<MarginalSpec>>,
    k: Option<usize>,
    clique: Option<Vec<usize>>,
    rho: Option<f64>,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidModel(msg.into())
}

impl KindParams {
    fn scalar_p(&self) -> Result<Option<f64>> {
        match &self.p {
            None => Ok(None),
            Some(v) => v.as_f64().map(Some).ok_or_else(|| invalid("`p` must be a number")),
        }
    }

    fn shared_marginal(&self) -> Result<Marginal> {
        match (&self.marginal, self.scalar_p()?) {
            (Some(m), None) => m.build(),
            (None, Some(p)) => Marginal::bernoulli(p),
            _ => Err(invalid("give exactly one of `p` or `marginal`")),
        }
    }
}

fn require_n(doc: &ModelDocument) -> Result<usize> {
    doc.n.ok_or_else(|| invalid(format!("kind `{}` needs `n`", doc.kind)))
}

/// Parses a distribution document into a model.
pub fn parse_model(text: &str) -> Result<JointModel> {
    let doc: ModelDocument = serde_json::from_str(text).map_err(|e| invalid(format!("distribution document: {e}")))?;
    if let Some(v) = doc.schema_version {
        if v != SCHEMA_VERSION {
            return Err(invalid(format!("unsupported schema_version {v}")));
        }
    }
    let params: KindParams = if doc.params.is_null() {
        KindParams::default()
    } else {
        serde_json::from_value(doc.params.clone()).map_err(|e| invalid(format!("params: {e}")))?
    };
    if doc.support.is_some() && doc.kind != "explicit_table" {
        return Err(invalid("`support` is only valid for kind explicit_table"));
    }
    let model = match doc.kind.as_str() {
        "boolean_iid" => {
            let p = params.scalar_p()?.ok_or_else(|| invalid("boolean_iid needs `p`"))?;
            JointModel::boolean_iid(require_n(&doc)?, p)?
        }
        "independent" => {
            let marginals = match (&params.marginals, &params.p) {
                (Some(ms), None) => ms.iter().map(MarginalSpec::build).collect::<Result<Vec<_>>>()?,
                (None, Some(Value::Array(ps))) => ps
                    .iter()
                    .map(|p| {
                        p.as_f64()
                            .ok_or_else(|| invalid("`p` entries must be numbers"))
                            .and_then(Marginal::bernoulli)
                    })
                    .collect::<Result<Vec<_>>>()?,
                _ => return Err(invalid("independent needs `marginals` or a `p` array")),
            };
            if let Some(n) = doc.n {
                if n != marginals.len() {
                    return Err(invalid(format!("n = {n} but {} marginals given", marginals.len())));
                }
            }
            JointModel::independent(marginals)?
        }
        "planted_clique" => {
            let n = require_n(&doc)?;
            let clique: Vec<usize> = match (&params.clique, params.k) {
                (Some(c), None) => c.clone(),
                (None, Some(k)) if k <= n => (0..k).collect(),
                (None, Some(k)) => return Err(invalid(format!("k = {k} exceeds n = {n}"))),
                _ => return Err(invalid("planted_clique needs exactly one of `k` or `clique`")),
            };
            JointModel::planted_clique(n, &clique, params.shared_marginal()?)?
        }
        "exchangeable_mixture" => {
            let rho = params.rho.ok_or_else(|| invalid("exchangeable_mixture needs `rho`"))?;
            JointModel::exchangeable_mixture(require_n(&doc)?, rho, params.shared_marginal()?)?
        }
        "explicit_table" => {
            let support = doc
                .support
                .clone()
                .ok_or_else(|| invalid("explicit_table needs `support`"))?;
            let model = JointModel::explicit_table(support)?;
            if let Some(n) = doc.n {
                if n != model.n() {
                    return Err(invalid(format!(
                        "n = {n} but support atoms have {} coordinates",
                        model.n()
                    )));
                }
            }
            model
        }
        other => return Err(invalid(format!("unknown kind `{other}`"))),
    };
    Ok(model)
}

/// Resolved configuration embedded in every JSON report.
///
/// The worker count is left out: it never changes a result.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub spec_path: Option<String>,
    pub n: Option<usize>,
    pub a: Option<Vec<f64>>,
    pub b: f64,
    pub c: Option<Vec<f64>>,
    pub t: Option<f64>,
    pub alpha: Option<f64>,
    pub lambda: Option<f64>,
    pub samples: Option<u64>,
    pub seed: u64,
    pub output_format: OutputFormat,
    pub output_path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub extra: Value,
}

/// What a run produced: the process exit code and the rendered report.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub output: String,
    pub error: Option<String>,
}

/// Maps an error to its exit code.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::SupportTooLarge { .. }
        | Error::BudgetExceeded { .. }
        | Error::TailTooRare { .. }
        | Error::BudgetOverflow(_) => EXIT_BUDGET,
        _ => EXIT_VALIDATION,
    }
}

/// A report as a JSON value plus a flat table for CSV output.
struct Report {
    json: Value,
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
    code: i32,
}

/// JSON body, CSV columns and CSV rows.
type Table = (Value, Vec<&'static str>, Vec<Vec<Cell>>);

enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl Cell {
    fn opt(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }

    fn render(&self) -> String {
        match self {
            // 17 significant digits
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

fn render_csv(columns: &[&str], rows: &[Vec<Cell>]) -> String {
    let mut out = columns.join(",");
    out.push('\n');
    for row in rows {
        let line: Vec<String> = row.iter().map(Cell::render).collect();
        let _ = writeln!(out, "{}", line.join(","));
    }
    out
}

struct Context<'a> {
    args: &'a CommonArgs,
    model: Option<JointModel>,
}

impl<'a> Context<'a> {
    fn load(args: &'a CommonArgs, stdin: &mut dyn Read) -> Result<Self> {
        let model = match args.spec.as_deref() {
            None => None,
            Some("-") => {
                let mut text = String::new();
                stdin
                    .read_to_string(&mut text)
                    .map_err(|e| invalid(format!("reading stdin: {e}")))?;
                Some(parse_model(&text)?)
            }
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("reading {path}: {e}")))?;
                Some(parse_model(&text)?)
            }
        };
        if let (Some(m), Some(n)) = (&model, args.n) {
            if m.n() != n {
                return Err(Error::InvalidParam {
                    field: "n",
                    reason: format!("--n {n} disagrees with the document's n = {}", m.n()),
                });
            }
        }
        Ok(Self { args, model })
    }

    fn model(&self) -> Result<&JointModel> {
        self.model.as_ref().ok_or(Error::InvalidParam {
            field: "spec",
            reason: "this command needs --spec".into(),
        })
    }

    fn n(&self) -> Result<usize> {
        if let Some(n) = self.args.n.or(self.model.as_ref().map(JointModel::n)) {
            return Ok(n);
        }
        let from_vec = |v: &Option<Vec<f64>>| v.as_ref().filter(|v| v.len() > 1).map(Vec::len);
        from_vec(&self.args.a)
            .or(from_vec(&self.args.c))
            .ok_or(Error::InvalidParam {
                field: "n",
                reason: "give --n, --spec, or a vector-valued --a/--c".into(),
            })
    }

    fn vector(&self, field: &'static str, v: &Option<Vec<f64>>, default: Option<f64>, n: usize) -> Result<Vec<f64>> {
        match (v, default) {
            (Some(v), _) if v.len() == 1 => Ok(vec![v[0]; n]),
            (Some(v), _) if v.len() == n => Ok(v.clone()),
            (Some(v), _) => Err(Error::InvalidParam {
                field,
                reason: format!("{} values given for n = {n}", v.len()),
            }),
            (None, Some(d)) => Ok(vec![d; n]),
            (None, None) => Err(Error::InvalidParam {
                field,
                reason: "required".into(),
            }),
        }
    }

    fn params_with_t(&self, t: f64) -> Result<BoundParams> {
        let n = self.n()?;
        let a = self.vector("a", &self.args.a, Some(0.0), n)?;
        let c = self.vector("c", &self.args.c, None, n)?;
        BoundParams::new(a, self.args.b, c, t)
    }

    fn t(&self) -> Result<f64> {
        self.args.t.ok_or(Error::InvalidParam {
            field: "t",
            reason: "required".into(),
        })
    }

    fn params(&self) -> Result<BoundParams> {
        self.params_with_t(self.t()?)
    }

    fn lambda_for(&self, params: &BoundParams) -> Result<f64> {
        if let Some(l) = self.args.lambda {
            return Ok(l);
        }
        Ok(evaluate_bound(params)?.lambda_star.map_or(0.0, |l| l.lambda))
    }
}

fn run_config(cmd: &Command, extra: Value) -> RunConfig {
    let a = cmd.common();
    RunConfig {
        command: cmd.name(),
        spec_path: a.spec.clone(),
        n: a.n,
        a: a.a.clone(),
        b: a.b,
        c: a.c.clone(),
        t: a.t,
        alpha: a.alpha,
        lambda: a.lambda,
        samples: a.samples,
        seed: a.seed,
        output_format: a.format,
        output_path: a.out.clone(),
        extra,
    }
}

fn envelope(config: &RunConfig, body: Value) -> Value {
    let mut out = json!({
        "schema_version": SCHEMA_VERSION,
        "command": config.command,
        "config": config,
    });
    if let (Value::Object(map), Value::Object(extra)) = (&mut out, body) {
        map.extend(extra);
    }
    out
}

fn cmd_bound(ctx: &Context<'_>) -> Result<Table> {
    let params = ctx.params()?;
    let eval = evaluate_bound(&params)?;
    let row = bound_row(&params, &eval, None);
    let body = json!({
        "bound": eval.value,
        "case": eval.case.as_str(),
        "normalized": eval.normalized,
        "lambda_star": eval.lambda_star,
        "t_max": params.t_max(),
        "tail_threshold": params.tail_threshold(),
    });
    Ok((body, BOUND_COLUMNS.to_vec(), vec![row]))
}

const BOUND_COLUMNS: [&str; 8] = [
    "t",
    "ttilde",
    "ctilde",
    "bound",
    "case",
    "lambda_star",
    "g_lambda_star",
    "exact_tail",
];

fn bound_row(params: &BoundParams, eval: &crate::entropy::BoundEvaluation, exact_tail: Option<f64>) -> Vec<Cell> {
    vec![
        Cell::Num(params.t()),
        Cell::Num(eval.normalized.ttilde),
        Cell::Num(eval.normalized.ctilde),
        Cell::Num(eval.value),
        Cell::Text(eval.case.as_str().into()),
        Cell::opt(eval.lambda_star.map(|l| l.lambda)),
        Cell::opt(eval.lambda_star.map(|l| l.g_value)),
        Cell::opt(exact_tail),
    ]
}

fn cmd_verify(ctx: &Context<'_>, max_subset: Option<usize>) -> Result<Table> {
    let model = ctx.model()?;
    let params = ctx.params()?;
    model.check_range(&params)?;
    let lambda = ctx.lambda_for(&params)?;
    let max_subset = max_subset.unwrap_or(params.n().min(6));
    let eval = evaluate_bound(&params)?;
    let tail = model.exact_tail(params.tail_threshold())?;
    let bound_holds = tail <= eval.value + 1e-12;
    let chain = verify_chain(model, &params, lambda, max_subset)?;

    let mut rows = vec![
        vec![
            Cell::Text("moment_condition".into()),
            Cell::Empty,
            Cell::Empty,
            Cell::Text(if chain.hypothesis.holds { "pass" } else { "violated" }.into()),
        ],
        vec![
            Cell::Text("main_bound".into()),
            Cell::Num(eval.value),
            Cell::Num(tail),
            Cell::Text(if bound_holds { "pass" } else { "fail" }.into()),
        ],
    ];
    for link in &chain.links {
        rows.push(vec![
            Cell::Text(link.name.into()),
            Cell::Num(link.lhs),
            Cell::Num(link.rhs),
            Cell::Text(serde_json::to_value(link.status)?.as_str().unwrap_or_default().into()),
        ]);
    }
    let status = match (chain.outcome, bound_holds) {
        (ChainOutcome::HypothesisViolated, _) => "hypothesis_violated",
        (ChainOutcome::Pass, true) => "pass",
        _ => "fail",
    };
    let body = json!({
        "status": status,
        "lambda": lambda,
        "main_bound": {
            "bound": eval.value,
            "case": eval.case.as_str(),
            "exact_tail": tail,
            "holds": bound_holds,
        },
        "chain": chain,
    });
    Ok((body, vec!["check", "lhs", "rhs", "status"], rows))
}

fn cmd_simulate(ctx: &Context<'_>, conditional: bool, max_draws: Option<u64>) -> Result<Table> {
    let model = ctx.model()?;
    let params = ctx.params()?;
    let lambda = ctx.lambda_for(&params)?;
    let samples = ctx.args.samples.unwrap_or(DEFAULT_SAMPLES);
    let cfg = SamplerConfig {
        max_draws,
        ..SamplerConfig::new(ctx.args.seed, ctx.args.workers as usize)
    };
    let norm = normalize(&params);
    let n = params.n() as f64;
    let upper = (1.0 - lambda * (1.0 - norm.ctilde)).powi(params.n() as i32);
    let lower = (1.0 - lambda).powf(n * (1.0 - norm.ctilde - norm.ttilde).max(0.0));

    let z = |mean: f64, se: f64, exact: Option<f64>| {
        exact.map(|e| {
            if se > 0.0 {
                (mean - e) / se
            } else if mean == e {
                0.0
            } else {
                f64::INFINITY
            }
        })
    };

    let estimate = estimate_product(model, &params, lambda, samples, false, &cfg)?;
    let exact = model
        .is_enumerable()
        .then(|| exact_product_expectation(model, &params, lambda))
        .transpose()?;
    let mut rows = vec![vec![
        Cell::Text("unconditional".into()),
        Cell::Num(estimate.mean),
        Cell::Num(estimate.std_error),
        Cell::Int(estimate.n_samples),
        Cell::Int(estimate.draws),
        Cell::opt(exact),
        Cell::opt(z(estimate.mean, estimate.std_error, exact)),
        Cell::Num(upper),
    ]];
    let mut body = json!({
        "lambda": lambda,
        "unconditional": {
            "estimate": estimate,
            "exact": exact,
            "z": z(estimate.mean, estimate.std_error, exact),
            "upper_bound": upper,
        },
    });
    if conditional {
        let est = estimate_product(model, &params, lambda, samples, true, &cfg)?;
        let (exact_cond, p_tail) = if model.is_enumerable() {
            let (c, p) = exact_conditional_product_expectation(model, &params, lambda)?;
            (c, Some(p))
        } else {
            (None, None)
        };
        rows.push(vec![
            Cell::Text("conditional".into()),
            Cell::Num(est.mean),
            Cell::Num(est.std_error),
            Cell::Int(est.n_samples),
            Cell::Int(est.draws),
            Cell::opt(exact_cond),
            Cell::opt(z(est.mean, est.std_error, exact_cond)),
            Cell::Num(lower),
        ]);
        body["conditional"] = json!({
            "estimate": est,
            "exact": exact_cond,
            "exact_tail_probability": p_tail,
            "z": z(est.mean, est.std_error, exact_cond),
            "lower_bound": lower,
        });
    }
    Ok((
        body,
        vec![
            "quantity",
            "mean",
            "std_error",
            "n_samples",
            "draws",
            "exact",
            "z",
            "analytic_bound",
        ],
        rows,
    ))
}

fn cmd_detect(ctx: &Context<'_>) -> Result<(Table, i32)> {
    let model = ctx.model()?;
    let n = model.n();
    let c = match ctx.args.c.as_deref() {
        Some([c]) => *c,
        Some(_) => {
            return Err(Error::InvalidParam {
                field: "c",
                reason: "detect takes a single scalar c".into(),
            })
        }
        None => {
            return Err(Error::InvalidParam {
                field: "c",
                reason: "required".into(),
            })
        }
    };
    let t = ctx.t()?;
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::InvalidParam {
            field: "c",
            reason: format!("{c} is outside (0, 1)"),
        });
    }
    if !(t > 0.0 && t <= 1.0 - c) {
        return Err(Error::InvalidParam {
            field: "t",
            reason: format!("{t} is outside (0, 1 - c]"),
        });
    }
    let alpha = match ctx.args.alpha {
        Some(a) => a,
        None => (-kl_div(c + t, c)? * n as f64).exp(),
    };
    let budgets = default_budgets(n, c, t, alpha)?;
    let mut wp = WitnessParams::with_default_budgets(n, c, t, alpha)?;
    if let Some(l) = ctx.args.lambda {
        wp.lambda = l;
    }
    if let Some(s) = ctx.args.samples {
        wp.m_search = s;
    }
    let report = find_dependent_set(model, &wp, ctx.args.seed, ctx.args.workers as usize)?;
    let code = match report.verdict {
        Verdict::Found => EXIT_OK,
        Verdict::NotFound => EXIT_NOT_FOUND,
    };
    let subset = report.subset.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
    let row = vec![
        Cell::Text(
            serde_json::to_value(report.verdict)?
                .as_str()
                .unwrap_or_default()
                .into(),
        ),
        Cell::Text(subset),
        Cell::Num(report.empirical_moment),
        Cell::Num(report.std_error),
        Cell::Num(report.threshold),
        Cell::Int(report.samples_used),
    ];
    let body = json!({
        "witness_params": wp,
        "budgets": budgets,
        "report": report,
    });
    Ok((
        (
            body,
            vec![
                "verdict",
                "subset",
                "empirical_moment",
                "std_error",
                "threshold",
                "samples_used",
            ],
            vec![row],
        ),
        code,
    ))
}

fn grid(from: f64, to: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![from];
    }
    (0..points)
        .map(|k| {
            if k + 1 == points {
                to
            } else {
                from + (to - from) * k as f64 / (points - 1) as f64
            }
        })
        .collect()
}

fn cmd_sweep(ctx: &Context<'_>, over: SweepAxis, points: usize, from: Option<f64>, to: Option<f64>) -> Result<Table> {
    if points == 0 {
        return Err(Error::InvalidParam {
            field: "points",
            reason: "grid is empty".into(),
        });
    }
    let model = ctx.model.as_ref().filter(|m| m.is_enumerable());
    match over {
        SweepAxis::T => {
            let base = ctx.params_with_t(0.0)?;
            if let Some(m) = &ctx.model {
                m.check_range(&base)?;
            }
            let t_max = base.t_max();
            let (lo, hi) = (from.unwrap_or(0.0), to.unwrap_or(t_max));
            let mut rows = Vec::with_capacity(points);
            let mut json_rows = Vec::with_capacity(points);
            for t in grid(lo, hi, points) {
                let params = base.with_t(t).map_err(|_| Error::InvalidParam {
                    field: "t",
                    reason: format!("grid point {t} is outside [0, {t_max}]"),
                })?;
                let eval = evaluate_bound(&params)?;
                let tail = model.map(|m| m.exact_tail(params.tail_threshold())).transpose()?;
                json_rows.push(json!({
                    "t": t,
                    "ttilde": eval.normalized.ttilde,
                    "bound": eval.value,
                    "case": eval.case.as_str(),
                    "lambda_star": eval.lambda_star,
                    "exact_tail": tail,
                }));
                rows.push(bound_row(&params, &eval, tail));
            }
            Ok((json!({ "over": "t", "rows": json_rows }), BOUND_COLUMNS.to_vec(), rows))
        }
        SweepAxis::Lambda => {
            let params = ctx.params()?;
            let norm = normalize(&params);
            let (lo, hi) = (from.unwrap_or(0.0), to.unwrap_or(LAMBDA_CAP));
            if !(0.0..1.0).contains(&lo) || !(0.0..1.0).contains(&hi) {
                return Err(Error::InvalidParam {
                    field: "lambda",
                    reason: "grid must lie in [0, 1)".into(),
                });
            }
            let mut rows = Vec::with_capacity(points);
            let mut json_rows = Vec::with_capacity(points);
            for lambda in grid(lo, hi, points) {
                let g = g_objective(lambda, &norm)?;
                let g_pow_n = g.powi(params.n() as i32);
                let (expectation, tail, chain_pass) = match model {
                    Some(m) => {
                        let chain = verify_chain(m, &params, lambda, params.n().min(6))?;
                        let e = exact_product_expectation(m, &params, lambda)?;
                        (
                            Some(e),
                            Some(chain.tail_probability),
                            Some(chain.outcome == ChainOutcome::Pass),
                        )
                    }
                    None => (None, None, None),
                };
                json_rows.push(json!({
                    "lambda": lambda,
                    "g": g,
                    "g_pow_n": g_pow_n,
                    "exact_product_expectation": expectation,
                    "exact_tail": tail,
                    "chain_pass": chain_pass,
                }));
                rows.push(vec![
                    Cell::Num(lambda),
                    Cell::Num(g),
                    Cell::Num(g_pow_n),
                    Cell::opt(expectation),
                    Cell::opt(tail),
                    chain_pass.map_or(Cell::Empty, |p| Cell::Text(p.to_string())),
                ]);
            }
            Ok((
                json!({ "over": "lambda", "rows": json_rows }),
                vec![
                    "lambda",
                    "g",
                    "g_pow_n",
                    "exact_product_expectation",
                    "exact_tail",
                    "chain_pass",
                ],
                rows,
            ))
        }
    }
}

fn execute(cmd: &Command, stdin: &mut dyn Read) -> Result<Report> {
    let ctx = Context::load(cmd.common(), stdin)?;
    let mut code = EXIT_OK;
    let mut extra = Value::Null;
    let (body, columns, rows) = match cmd {
        Command::Bound(_) => cmd_bound(&ctx)?,
        Command::Verify { max_subset, .. } => {
            extra = json!({ "max_subset": max_subset });
            cmd_verify(&ctx, *max_subset)?
        }
        Command::Simulate {
            conditional, max_draws, ..
        } => {
            extra = json!({ "conditional": conditional, "max_draws": max_draws });
            cmd_simulate(&ctx, *conditional, *max_draws)?
        }
        Command::Detect(_) => {
            let (table, c) = cmd_detect(&ctx)?;
            code = c;
            table
        }
        Command::Sweep {
            over, points, from, to, ..
        } => {
            extra = json!({ "over": over, "points": points, "from": from, "to": to });
            cmd_sweep(&ctx, *over, *points, *from, *to)?
        }
    };
    let config = run_config(cmd, extra);
    Ok(Report {
        json: envelope(&config, body),
        columns,
        rows,
        code,
    })
}

/// Parses `args` (including the program name) and runs the command.
///
/// Output is returned rather than printed; with `--out` it is also written
/// to that file.
pub fn run<I, T>(args: I, stdin: &mut dyn Read) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            return Outcome {
                code,
                output: if code == EXIT_OK { e.to_string() } else { String::new() },
                error: (code != EXIT_OK).then(|| e.to_string()),
            };
        }
    };
    run_command(&cli.command, stdin)
}

pub fn run_command(cmd: &Command, stdin: &mut dyn Read) -> Outcome {
    let failed = |err: Error| Outcome {
        code: exit_code(&err),
        output: String::new(),
        error: Some(err.to_string()),
    };
    let report = match execute(cmd, stdin) {
        Ok(r) => r,
        Err(e) => return failed(e),
    };
    let output = match cmd.common().format {
        OutputFormat::Json => match serde_json::to_string_pretty(&report.json) {
            Ok(s) => s + "\n",
            Err(e) => return failed(Error::Domain(e.to_string())),
        },
        OutputFormat::Csv => render_csv(&report.columns, &report.rows),
    };
    if let Some(path) = &cmd.common().out {
        if let Err(e) = std::fs::write(path, &output) {
            return failed(invalid(format!("writing {}: {e}", path.display())));
        }
    }
    Outcome {
        code: report.code,
        output,
        error: None,
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Domain(e.to_string())
    }
}
