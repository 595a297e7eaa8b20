mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use renyi_core::bounds::{
    afw_von_neumann, bound_high, bound_high_beyond_unit, bound_hmin, bound_jabbour_datta,
    bound_low, bound_low_classical, leditzky_gap,
};
use renyi_core::channel::ChannelFamily;
use renyi_core::entropy::{
    conditional_entropy_up, duality_check, hmax, hmin, von_neumann_conditional, DirectSearchPolicy,
    EntropyResult, RenyiOrder, SolverConfig,
};
use renyi_core::harness::{
    run_campaign, run_classical_campaign, run_extremal_probe, CampaignConfig, CampaignReport,
    Check, ProbeConfig, Status, Verdict,
};
use renyi_core::state::{
    read_state_file, sample_random_state, BipartiteState, Ensemble, PerturbationMode,
};
use renyi_core::Error;

use output::{emit, number};

const SEED_ENV: &str = "RENYI_SEED";

const FORMULAS: &str = "\
All entropies and bounds are in bits. eps is the trace distance (1/2)||rho - sigma||_1,
d_A the dimension of the unconditioned system; no bound depends on d_B.

  thm1     alpha in [1/2, 1):
             log2(1 + eps) + log2(1 + eps^alpha d_A^(2(1-alpha)) - eps (1 + eps)^(alpha-1)) / (1 - alpha)
  thm1cl   alpha in [1/2, 1), A classical in both states:
             log2(1 + eps) + log2(1 + eps^alpha d_A^(1-alpha) - eps (d_A (1 + eps))^(alpha-1)) / (1 - alpha)
  cor1     alpha in (1, inf]: thm1 evaluated at sqrt(2 eps) and the order beta with
             1/alpha + 1/beta = 2; outside its proven range once sqrt(2 eps) >= 1
  thm3     alpha = inf (min-entropy): log2(1 + eps d_A^2)
  afw      von Neumann limit: 2 eps log2 d_A + (1 + eps) h(eps / (1 + eps)), h the binary entropy
  jd       classical comparison bound: log2((1 - eps)^alpha + eps^alpha (d_A - 1)^(1-alpha)) / (1 - alpha)
  leditzky lower bound on H_alpha(rho) - H_beta(sigma) for alpha < 1, F the root fidelity:
             (2 alpha / (1 - alpha)) log2 F

Exit codes: 0 success, 1 input error, 2 solver uncertain, 3 verified violation.
JSON goes to stdout, rounded to 12 significant digits; diagnostics go to stderr.";

#[derive(Parser, Debug)]
#[command(
    name = "renyi",
    version,
    about = "Sandwiched Rényi conditional entropies, their continuity bounds, and verification campaigns",
    after_long_help = FORMULAS
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Conditional entropy of a state file.
    #[command(after_long_help = COMPUTE_HELP)]
    Compute(ComputeArgs),
    /// Evaluates one continuity bound.
    #[command(after_long_help = FORMULAS)]
    Bound(BoundArgs),
    /// Runs a randomized verification campaign and writes JSON and CSV reports.
    Verify(VerifyArgs),
    /// Checks H_alpha(A|B) = -H_beta(A|C) on a purification, with 1/alpha + 1/beta = 2.
    Duality(DualityArgs),
    /// Searches for state pairs that come close to saturating a bound.
    Probe(ProbeArgs),
}

const COMPUTE_HELP: &str = "\
sandwich  H~_alpha^up(A|B) = sup over eta_B of -D~_alpha(rho_AB || I_A ⊗ eta_B), with
          D~_alpha(P||Q) = log2 tr((Q^((1-alpha)/(2 alpha)) P Q^((1-alpha)/(2 alpha)))^alpha) / (alpha - 1)
hmin      the alpha = inf case: -log2 min{tr X : I ⊗ X >= rho}
hmax      the alpha = 1/2 case
vn        H(A|B) = H(AB) - H(B)

State files are {\"d_A\", \"d_B\", \"classical_A\", \"classical_B\", \"matrix\"} with matrix
entries [re, im] in row-major order, or probability tables {\"table\": [[p(a, b)]]}.";

fn parse_order(s: &str) -> Result<RenyiOrder, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_dims(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("dims '{s}' must look like 2x3"))?;
    let a = a.trim().parse().map_err(|_| format!("bad d_A in '{s}'"))?;
    let b = b.trim().parse().map_err(|_| format!("bad d_B in '{s}'"))?;
    Ok((a, b))
}

fn parse_from_str<T: std::str::FromStr<Err = Error>>(s: &str) -> Result<T, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum EntropyKind {
    Sandwich,
    Hmin,
    Hmax,
    Vn,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SolverChoice {
    /// Fixed point, direct search as fallback, closed forms where they apply.
    Auto,
    FixedPoint,
    DirectSearch,
    /// Bloch-ball grid; needs d_B = 2.
    Grid,
    /// Every solver, cross-checked.
    All,
}

impl SolverChoice {
    fn config(self, seed: u64) -> SolverConfig {
        let base = match self {
            SolverChoice::Auto => SolverConfig::default(),
            SolverChoice::FixedPoint => SolverConfig::fixed_point_only(),
            SolverChoice::DirectSearch => SolverConfig::direct_search_only(),
            SolverChoice::Grid => SolverConfig::grid_only(),
            SolverChoice::All => SolverConfig {
                direct_search: DirectSearchPolicy::Always,
                grid_oracle: true,
                ..SolverConfig::default()
            },
        };
        SolverConfig { seed, ..base }
    }
}

#[derive(Args, Debug)]
struct ComputeArgs {
    /// State or probability-table JSON file.
    #[arg(long)]
    state: PathBuf,
    /// Rényi order in [1/2, 1) ∪ (1, ∞]; required for the sandwiched entropy.
    #[arg(long, value_parser = parse_order, allow_hyphen_values = true)]
    alpha: Option<RenyiOrder>,
    #[arg(long, value_enum, default_value_t = EntropyKind::Sandwich)]
    entropy: EntropyKind,
    #[arg(long, value_enum, default_value_t = SolverChoice::Auto)]
    solver: SolverChoice,
    /// Seed for solver restarts [default: $RENYI_SEED or 0].
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BoundKind {
    Thm1,
    Thm1cl,
    Cor1,
    Thm3,
    Afw,
    Jd,
    Leditzky,
}

impl BoundKind {
    fn requirements(self) -> &'static str {
        match self {
            BoundKind::Thm1 | BoundKind::Thm1cl | BoundKind::Jd => {
                "--eps, --dA and --alpha in [1/2, 1)"
            }
            BoundKind::Cor1 => "--eps, --dA and --alpha in (1, inf]",
            BoundKind::Thm3 | BoundKind::Afw => "--eps and --dA",
            BoundKind::Leditzky => "--fidelity and --alpha in [1/2, 1)",
        }
    }

    fn name(self) -> &'static str {
        match self {
            BoundKind::Thm1 => "thm1",
            BoundKind::Thm1cl => "thm1cl",
            BoundKind::Cor1 => "cor1",
            BoundKind::Thm3 => "thm3",
            BoundKind::Afw => "afw",
            BoundKind::Jd => "jd",
            BoundKind::Leditzky => "leditzky",
        }
    }
}

#[derive(Args, Debug)]
struct BoundArgs {
    #[arg(long, value_enum)]
    which: BoundKind,
    /// Trace distance in [0, 1].
    #[arg(long)]
    eps: Option<f64>,
    /// Dimension of the unconditioned system.
    #[arg(long = "dA")]
    d_a: Option<usize>,
    /// Rényi order in [1/2, 1) ∪ (1, ∞]; `inf` is accepted.
    #[arg(long, value_parser = parse_order)]
    alpha: Option<RenyiOrder>,
    /// Root fidelity ||sqrt(rho) sqrt(sigma)||_1 in [0, 1].
    #[arg(long)]
    fidelity: Option<f64>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Campaign config JSON; inline flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Checks to run (repeatable or comma separated).
    #[arg(long = "check", value_delimiter = ',', value_parser = parse_from_str::<Check>)]
    checks: Vec<Check>,
    /// Dimension pairs such as 2x2,2x3.
    #[arg(long, value_delimiter = ',', value_parser = parse_dims)]
    dims: Vec<(usize, usize)>,
    #[arg(long, value_delimiter = ',', value_parser = parse_order)]
    orders: Vec<RenyiOrder>,
    #[arg(long, value_delimiter = ',')]
    epsilons: Vec<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, value_parser = parse_from_str::<Ensemble>)]
    ensemble: Option<Ensemble>,
    #[arg(long, value_parser = parse_from_str::<PerturbationMode>)]
    perturbation: Option<PerturbationMode>,
    #[arg(long, value_delimiter = ',', value_parser = parse_channel)]
    channels: Vec<ChannelFamily>,
    /// Master seed [default: config, then $RENYI_SEED, then 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; the reports do not depend on it.
    #[arg(long)]
    jobs: Option<usize>,
    /// Classical campaign: states diagonal in the product basis, classical checks only.
    #[arg(long)]
    classical: bool,
    /// Directory for the reports.
    #[arg(long, default_value = "renyi-report")]
    out: PathBuf,
    /// File stem of the reports.
    #[arg(long, default_value = "report")]
    stem: String,
}

fn parse_channel(s: &str) -> Result<ChannelFamily, String> {
    ChannelFamily::ALL
        .into_iter()
        .find(|c| c.to_string() == s)
        .ok_or_else(|| {
            let names: Vec<String> = ChannelFamily::ALL.iter().map(|c| c.to_string()).collect();
            format!(
                "unknown channel family '{s}' (expected one of {})",
                names.join(", ")
            )
        })
}

#[derive(Args, Debug)]
struct DualityArgs {
    /// State file; omit to draw a random state with --random.
    #[arg(long, conflicts_with = "random", required_unless_present = "random")]
    state: Option<PathBuf>,
    /// Random state of the given dims, e.g. 2x2.
    #[arg(long, value_parser = parse_dims)]
    random: Option<(usize, usize)>,
    #[arg(long, value_parser = parse_from_str::<Ensemble>, default_value = "hilbert-schmidt")]
    ensemble: Ensemble,
    #[arg(long, value_parser = parse_order)]
    alpha: RenyiOrder,
    /// Seed for the random state and solver restarts [default: $RENYI_SEED or 0].
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct ProbeArgs {
    /// Probe config JSON; inline flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = parse_dims)]
    dims: Option<(usize, usize)>,
    #[arg(long, value_parser = parse_order)]
    alpha: Option<RenyiOrder>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    restarts: Option<usize>,
    /// Nelder–Mead iterations per restart.
    #[arg(long)]
    iterations: Option<u64>,
    #[arg(long)]
    classical: bool,
    #[arg(long)]
    seed: Option<u64>,
}

/// Failure classes mapped onto the exit-code contract.
#[derive(Debug)]
enum Failure {
    Input(String),
    Uncertain(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotConverged { .. } | Error::Numerical { .. } => {
                Failure::Uncertain(e.to_string())
            }
            other => Failure::Input(other.to_string()),
        }
    }
}

const EXIT_INPUT: u8 = 1;
const EXIT_UNCERTAIN: u8 = 2;
const EXIT_VIOLATION: u8 = 3;

fn env_seed() -> Result<Option<u64>, Failure> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure::Input(format!("{SEED_ENV}='{s}' is not an unsigned integer"))),
        Err(_) => Ok(None),
    }
}

fn seed_or_env(flag: Option<u64>) -> Result<u64, Failure> {
    Ok(match flag {
        Some(s) => s,
        None => env_seed()?.unwrap_or(0),
    })
}

fn read_state(path: &Path) -> Result<BipartiteState, Failure> {
    read_state_file(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

/// Reads a JSON object from `path`, filling `seed` from the environment when absent.
fn read_config_value(path: Option<&Path>) -> Result<Value, Failure> {
    let mut value = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| Failure::Input(format!("{}: {}", p.display(), Error::from(e))))?
        }
        None => Value::Object(Map::new()),
    };
    let map = value
        .as_object_mut()
        .ok_or_else(|| Failure::Input("config must be a JSON object".into()))?;
    if !map.contains_key("seed") {
        if let Some(s) = env_seed()? {
            map.insert("seed".into(), json!(s));
        }
    }
    Ok(value)
}

fn result_json(
    entropy: &str,
    order: Option<RenyiOrder>,
    state: &BipartiteState,
    r: &EntropyResult,
) -> Value {
    let mut v = json!({
        "entropy": entropy,
        "d_A": state.d_a(),
        "d_B": state.d_b(),
        "value": number(r.value),
        "optimizer": r.optimizer.hermitian().to_rows(),
        "solver": r.solver,
        "iterations": r.iterations,
        "residual": number(r.residual),
        "converged": r.converged,
    });
    if let Some(o) = order {
        v["alpha"] = json!(o);
    }
    if let Some(c) = r.certificate {
        v["certificate"] = json!(c);
    }
    if r.solver_values.len() > 1 {
        let values: Map<String, Value> = r
            .solver_values
            .iter()
            .map(|(k, x)| (k.to_string(), number(*x)))
            .collect();
        v["solver_values"] = Value::Object(values);
    }
    v
}

fn compute(args: ComputeArgs) -> Result<u8, Failure> {
    let state = read_state(&args.state)?;
    let solver = args.solver.config(seed_or_env(args.seed)?);
    let (name, order, outcome) = match args.entropy {
        EntropyKind::Sandwich => {
            let order = args.alpha.ok_or_else(|| {
                Failure::Input("--entropy sandwich needs --alpha in [1/2, 1) ∪ (1, ∞]".into())
            })?;
            (
                "sandwich",
                Some(order),
                conditional_entropy_up(&state, order, &solver),
            )
        }
        EntropyKind::Hmin => ("hmin", Some(RenyiOrder::INFINITY), hmin(&state)),
        EntropyKind::Hmax => ("hmax", Some(RenyiOrder::HALF), hmax(&state, &solver)),
        EntropyKind::Vn => {
            let value = von_neumann_conditional(&state)?;
            emit(&json!({
                "entropy": "vn",
                "d_A": state.d_a(),
                "d_B": state.d_b(),
                "value": number(value),
                "optimizer": state.marginal_b().hermitian().to_rows(),
                "solver": "closed-form",
                "iterations": 0,
                "residual": 0.0,
                "converged": true,
            }));
            return Ok(0);
        }
    };
    if args.alpha.is_some() && args.entropy != EntropyKind::Sandwich {
        eprintln!("warning: --alpha is ignored for --entropy {name}");
    }
    match outcome {
        Ok(r) => {
            emit(&result_json(name, order, &state, &r));
            Ok(0)
        }
        Err(Error::NotConverged { best, .. }) => {
            emit(&result_json(name, order, &state, &best));
            eprintln!(
                "solver uncertain: best value {} with residual {:.3e}",
                best.value, best.residual
            );
            Ok(EXIT_UNCERTAIN)
        }
        Err(e) => Err(e.into()),
    }
}

fn bound(args: BoundArgs) -> Result<u8, Failure> {
    let which = args.which;
    let missing = || {
        Failure::Input(format!(
            "--which {} needs {}",
            which.name(),
            which.requirements()
        ))
    };
    let eps = || args.eps.ok_or_else(missing);
    let d_a = || args.d_a.ok_or_else(missing);
    let alpha = || args.alpha.ok_or_else(missing);
    let mut inputs = Map::new();
    let value = match which {
        BoundKind::Thm1 => bound_low(eps()?, d_a()?, alpha()?)?,
        BoundKind::Thm1cl => bound_low_classical(eps()?, d_a()?, alpha()?)?,
        BoundKind::Cor1 => {
            let v = bound_high(eps()?, d_a()?, alpha()?)?;
            if bound_high_beyond_unit(eps()?) {
                eprintln!(
                    "warning: sqrt(2 eps) = {:.6} >= 1; the bound is evaluated as written but lies outside its proven range",
                    (2.0 * eps()?).sqrt()
                );
                inputs.insert("beyond_unit".into(), json!(true));
            }
            v
        }
        BoundKind::Thm3 => bound_hmin(eps()?, d_a()?)?,
        BoundKind::Afw => afw_von_neumann(eps()?, d_a()?)?,
        BoundKind::Jd => bound_jabbour_datta(eps()?, d_a()?, alpha()?)?,
        BoundKind::Leditzky => {
            let f = args.fidelity.ok_or_else(missing)?;
            leditzky_gap(f, alpha()?)?
        }
    };
    let mut given = Map::new();
    if let Some(e) = args.eps {
        given.insert("epsilon".into(), number(e));
    }
    if let Some(d) = args.d_a {
        given.insert("d_A".into(), json!(d));
    }
    if let Some(a) = args.alpha {
        given.insert("alpha".into(), json!(a));
    }
    if let Some(f) = args.fidelity {
        given.insert("fidelity".into(), number(f));
    }
    let mut out = json!({ "which": which.name(), "inputs": given, "value": number(value) });
    if let Some(flag) = inputs.remove("beyond_unit") {
        out["beyond_unit"] = flag;
    }
    emit(&out);
    Ok(0)
}

fn campaign_config(args: &VerifyArgs) -> Result<CampaignConfig, Failure> {
    let mut value = read_config_value(args.config.as_deref())?;
    let map = value.as_object_mut().expect("object");
    let mut set = |key: &str, v: Value| {
        map.insert(key.into(), v);
    };
    if !args.checks.is_empty() {
        set("checks", json!(args.checks));
    }
    if !args.dims.is_empty() {
        set("dims", json!(args.dims));
    }
    if !args.orders.is_empty() {
        set("orders", json!(args.orders));
    }
    if !args.epsilons.is_empty() {
        set("epsilons", json!(args.epsilons));
    }
    if !args.channels.is_empty() {
        set("channels", json!(args.channels));
    }
    if let Some(n) = args.samples {
        set("samples_per_cell", json!(n));
    }
    if let Some(e) = args.ensemble {
        set("ensemble", json!(e));
    }
    if let Some(p) = args.perturbation {
        set("perturbation", json!(p));
    }
    if let Some(s) = args.seed {
        set("seed", json!(s));
    }
    if let Some(j) = args.jobs {
        set("jobs", json!(j));
    }
    if args.classical {
        set("perturbation", json!(PerturbationMode::ClassicalOnly));
        let keep_classical = map
            .get("checks")
            .and_then(|c| serde_json::from_value::<Vec<Check>>(c.clone()).ok())
            .filter(|c| c.iter().any(|x| x.is_classical()));
        if keep_classical.is_none() {
            map.insert(
                "checks".into(),
                json!([Check::Thm1Classical, Check::JabbourCompare]),
            );
        }
    }
    let text = value.to_string();
    CampaignConfig::from_json(&text).map_err(|e| Failure::Input(format!("config: {e}")))
}

fn verify_summary(report: &CampaignReport, out: &Path, stem: &str) -> Value {
    let cells: Vec<Value> = report
        .cells
        .iter()
        .map(|c| {
            json!({
                "index": c.cell.index,
                "check": c.cell.check,
                "d_A": c.cell.d_a,
                "d_B": c.cell.d_b,
                "order": c.cell.order,
                "epsilon": c.cell.epsilon,
                "channel": c.cell.channel,
                "exponent": c.cell.exponent,
                "samples": c.samples,
                "violations": c.violations,
                "uncertain": c.uncertain,
                "min_margin": c.min_margin,
                "flags": c.flags,
            })
        })
        .collect();
    json!({
        "schema": report.schema,
        "kind": report.kind,
        "verdict": report.verdict,
        "totals": report.totals,
        "failures": report.failures,
        "reports": {
            "json": out.join(format!("{stem}.json")),
            "csv": out.join(format!("{stem}.csv")),
        },
        "cells": cells,
    })
}

fn verify(args: VerifyArgs) -> Result<u8, Failure> {
    let config = campaign_config(&args)?;
    let report = if args.classical {
        run_classical_campaign(&config)
    } else {
        run_campaign(&config)
    }
    .map_err(|e| Failure::Input(e.to_string()))?;
    report.write(&args.out, &args.stem).map_err(|e| {
        Failure::Input(format!(
            "cannot write reports to {}: {e}",
            args.out.display()
        ))
    })?;
    emit(&verify_summary(&report, &args.out, &args.stem));
    let t = &report.totals;
    eprintln!(
        "{}: {} records, {} violations, {} uncertain ({:.2}%)",
        report.kind,
        t.records,
        t.violations,
        t.uncertain,
        100.0 * t.uncertain_rate
    );
    for f in &report.failures {
        eprintln!("  {f}");
    }
    Ok(match report.verdict {
        Verdict::Pass => 0,
        Verdict::SolverUncertain => EXIT_UNCERTAIN,
        Verdict::Violation => EXIT_VIOLATION,
    })
}

fn duality(args: DualityArgs) -> Result<u8, Failure> {
    let seed = seed_or_env(args.seed)?;
    let state = match (&args.state, args.random) {
        (Some(p), _) => read_state(p)?,
        (None, Some((d_a, d_b))) => sample_random_state(d_a, d_b, args.ensemble, seed)?,
        (None, None) => return Err(Failure::Input("duality needs --state or --random".into())),
    };
    let solver = SolverConfig {
        seed,
        ..SolverConfig::default()
    };
    let check = duality_check(&state, args.alpha, &solver)?;
    emit(&json!({
        "d_A": state.d_a(),
        "d_B": state.d_b(),
        "d_C": check.d_c,
        "alpha": check.order,
        "beta": check.dual,
        "h_ab": number(check.h_ab),
        "h_ac": number(check.h_ac),
        "residual": number(check.residual()),
    }));
    Ok(0)
}

fn probe(args: ProbeArgs) -> Result<u8, Failure> {
    let mut value = read_config_value(args.config.as_deref())?;
    let map = value.as_object_mut().expect("object");
    if let Some(d) = args.dims {
        map.insert("dims".into(), json!(d));
    }
    if let Some(a) = args.alpha {
        map.insert("order".into(), json!(a));
    }
    if let Some(e) = args.eps {
        map.insert("epsilon".into(), json!(e));
    }
    if let Some(r) = args.restarts {
        map.insert("restarts".into(), json!(r));
    }
    if let Some(i) = args.iterations {
        map.insert("max_iterations".into(), json!(i));
    }
    if let Some(s) = args.seed {
        map.insert("seed".into(), json!(s));
    }
    if args.classical {
        map.insert("classical".into(), json!(true));
    }
    let config: ProbeConfig =
        serde_json::from_value(value).map_err(|e| Failure::Input(format!("probe config: {e}")))?;
    let outcome = run_extremal_probe(&config)?;
    emit(&outcome);
    Ok(match outcome.record.status {
        Status::Pass => 0,
        Status::SolverUncertain => EXIT_UNCERTAIN,
        Status::Violation => EXIT_VIOLATION,
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    let outcome = match cli.command {
        Command::Compute(a) => compute(a),
        Command::Bound(a) => bound(a),
        Command::Verify(a) => verify(a),
        Command::Duality(a) => duality(a),
        Command::Probe(a) => probe(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Uncertain(msg)) => {
            eprintln!("solver uncertain: {msg}");
            ExitCode::from(EXIT_UNCERTAIN)
        }
    }
}
