//! The `cal` command line. [`run_command`] maps argv to an exit code: 0 on success,
//! 1 on input errors, 2 when a search budget or expert cap binds.

mod report;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::adversaries::AdversarySpec;
use crate::arena::{
    estimate_regret, run_game, sweep, write_csv, GameConfig, RegretMode, SweepAxis, SweepRow,
};
use crate::critical::{k_of_eps, tilde_k, tilde_levels};
use crate::dims::{
    eps_dimension, littlestone_dimension, threshold_dimension, vc_dimension, Certificate,
    SearchConfig, TreeKind, DEFAULT_BUDGET, DEFAULT_MAX_DEPTH,
};
use crate::error::{Error, Result};
use crate::learners::{LearnerSpec, DEFAULT_EXPERT_CAP};
use crate::problem::Problem;
use crate::rational::{format_rational, parse_list, parse_rational, Rational};

/// Environment variable that overrides `--seed`.
pub const SEED_ENV: &str = "CAL_SEED";

#[derive(Parser, Debug)]
#[command(
    name = "cal",
    version,
    about = "Distributionally constrained online classification toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// VC and Littlestone dimensions, k(eps) and tree dimensions of a finite problem.
    Dims(DimsArgs),
    /// k(eps) over a grid of scales, as CSV.
    Kcurve(GridArgs),
    /// Threshold dimension and compressed level count of a tree-ordered problem, as CSV.
    Tdim(GridArgs),
    /// Runs repeated games and prints the regret estimate as one CSV row.
    Game(GameArgs),
    /// Regret estimates over a T axis (--T a,b,c) or an eps axis (--grid), as CSV or JSON.
    Sweep(GameArgs),
    /// Checks a tree certificate.
    Validate(ValidateArgs),
    /// Merges sweep CSVs into a JSON summary, or gnuplot tables with --plot-data.
    Report(ReportArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// Output path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DimsArgs {
    problem: PathBuf,
    /// Scales, one or more comma-separated rationals.
    #[arg(long, value_delimiter = ',')]
    eps: Vec<String>,
    /// Tree-search node cap.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_DEPTH)]
    max_depth: usize,
    /// Writes the certificate of `--kind` at the first scale to this path.
    #[arg(long)]
    certificate: Option<PathBuf>,
    /// Tree kind of the written certificate: plain, relaxed or strict_eta (with --eta).
    #[arg(long, default_value = "plain")]
    kind: String,
    #[arg(long)]
    eta: Option<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct GridArgs {
    problem: PathBuf,
    /// Comma-separated rationals.
    #[arg(long)]
    grid: String,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct GameArgs {
    problem: PathBuf,
    /// Learner spec, e.g. `level:eps=1/8`.
    #[arg(long)]
    learner: String,
    /// Adversary spec, e.g. `critical:realizable,eps=1/8`.
    #[arg(long)]
    adversary: String,
    /// Horizon; a comma-separated list gives the axis of a sweep.
    #[arg(long = "T", value_delimiter = ',', required = true)]
    horizon: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[arg(long, default_value = "adaptive")]
    mode: String,
    /// Scales of an eps sweep, comma-separated rationals.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long, default_value_t = DEFAULT_EXPERT_CAP)]
    expert_cap: u64,
    /// Tree-search node cap for adversaries that search trees.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Writes the transcript of the first repetition to this path (game only).
    #[arg(long)]
    transcript: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    certificate: PathBuf,
    /// Kind to check against; defaults to the kind recorded in the certificate.
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    eta: Option<String>,
}

#[derive(Args, Debug)]
struct ReportArgs {
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Emits whitespace-separated tables, one block per input.
    #[arg(long)]
    plot_data: bool,
    #[command(flatten)]
    common: Common,
}

/// Runs the command line on `argv` (program name first), writing to the given streams.
pub fn run_command<I, S>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(stdout, "{text}")
            } else {
                write!(stderr, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Dims(a) => dims(a, stdout),
        Command::Kcurve(a) => kcurve(a, stdout),
        Command::Tdim(a) => tdim(a, stdout),
        Command::Game(a) => game(a, stdout),
        Command::Sweep(a) => sweep_cmd(a, stdout),
        Command::Validate(a) => validate(a, stdout),
        Command::Report(a) => {
            report::report(&a.inputs, a.plot_data, a.common.out.as_deref(), stdout)
        }
    }
}

/// Writes to `--out` when given, otherwise to standard output.
pub(crate) fn emit(out: Option<&Path>, stdout: &mut dyn Write, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| Error::input(format!("cannot write {}: {e}", p.display()))),
        None => Ok(stdout.write_all(text.as_bytes())?),
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn dims(a: DimsArgs, stdout: &mut dyn Write) -> Result<i32> {
    let problem = Problem::load(&a.problem)?;
    let env = problem.require_finite()?;
    let cfg = SearchConfig {
        max_depth: a.max_depth,
        budget: a.budget,
    };
    let scales: Vec<Rational> = a
        .eps
        .iter()
        .map(|e| parse_rational(e))
        .collect::<Result<_>>()?;
    let mut per_eps = serde_json::Map::new();
    let mut exhausted = false;
    for (i, eps) in scales.iter().enumerate() {
        let mut entry = serde_json::Map::new();
        entry.insert("k".into(), json!(k_of_eps(&env.class, &env.u, eps)?));
        for kind in [TreeKind::Plain(eps.clone()), TreeKind::Relaxed(eps.clone())] {
            let r = eps_dimension(&env.class, &env.u, &kind, cfg)?;
            exhausted |= r.budget_exhausted;
            entry.insert(
                kind.name().into(),
                json!({"value": r.value, "exact": r.exact, "budget_exhausted": r.budget_exhausted}),
            );
        }
        if i == 0 {
            if let Some(path) = &a.certificate {
                let eta = a.eta.as_deref().map(parse_rational).transpose()?;
                let kind = TreeKind::parse(&a.kind, eps.clone(), eta)?;
                let r = eps_dimension(&env.class, &env.u, &kind, cfg)?;
                exhausted |= r.budget_exhausted;
                let tree = r
                    .certificate
                    .unwrap_or_else(crate::dims::InteractionTree::empty);
                let cert = Certificate {
                    class: (*env.class).clone(),
                    tree,
                    kind,
                };
                emit(Some(path), stdout, &pretty(&cert.to_json()))?;
            }
        }
        per_eps.insert(format_rational(eps), Value::Object(entry));
    }
    let doc = json!({
        "n": env.n(),
        "m": env.class.m(),
        "vc": vc_dimension(&env.class),
        "littlestone": littlestone_dimension(&env.class),
        "eps": per_eps,
    });
    emit(a.common.out.as_deref(), stdout, &pretty(&doc))?;
    Ok(if exhausted { 2 } else { 0 })
}

fn kcurve(a: GridArgs, stdout: &mut dyn Write) -> Result<i32> {
    let problem = Problem::load(&a.problem)?;
    let env = problem.require_finite()?;
    let mut text = String::from("eps,k\n");
    for eps in parse_list(&a.grid)? {
        text.push_str(&format!(
            "{},{}\n",
            format_rational(&eps),
            k_of_eps(&env.class, &env.u, &eps)?
        ));
    }
    emit(a.common.out.as_deref(), stdout, &text)?;
    Ok(0)
}

fn tdim(a: GridArgs, stdout: &mut dyn Write) -> Result<i32> {
    let problem = Problem::load(&a.problem)?;
    let env = problem.require_finite()?;
    let order = env.require_order()?;
    let mut text = String::from("eps,tdim,tilde_k\n");
    for eps in parse_list(&a.grid)? {
        let t = threshold_dimension(&order, &env.u, &eps)?;
        let tk = tilde_k(&tilde_levels(&order, &env.u, &eps, env.n() + 1)?);
        text.push_str(&format!("{},{t},{tk}\n", format_rational(&eps)));
    }
    emit(a.common.out.as_deref(), stdout, &text)?;
    Ok(0)
}

fn seed_from(flag: u64) -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::input(format!("{SEED_ENV} must be an unsigned integer"))),
        Err(_) => Ok(flag),
    }
}

fn template(a: &GameArgs, horizon: usize) -> Result<GameConfig> {
    Ok(GameConfig {
        learner: LearnerSpec::parse(&a.learner)?,
        adversary: AdversarySpec::parse(&a.adversary)?,
        horizon,
        reps: a.reps,
        seed: seed_from(a.seed)?,
        mode: RegretMode::parse(&a.mode)?,
        expert_cap: a.expert_cap,
        jobs: a.jobs,
    })
}

fn load_with_budget(path: &Path, budget: u64) -> Result<Problem> {
    let mut problem = Problem::load(path)?;
    if let Some(env) = problem.finite.take() {
        problem.finite = Some(env.with_search(SearchConfig {
            budget,
            ..SearchConfig::default()
        }));
    }
    Ok(problem)
}

fn game(a: GameArgs, stdout: &mut dyn Write) -> Result<i32> {
    if a.horizon.len() != 1 || a.grid.is_some() {
        return Err(Error::input(
            "game takes a single --T and no --grid; use sweep for axes",
        ));
    }
    let problem = load_with_budget(&a.problem, a.budget)?;
    let cfg = template(&a, a.horizon[0])?;
    if let Some(path) = &a.transcript {
        let tr = run_game(&problem, &cfg, crate::arena::rep_seed(cfg.seed, 0))?;
        emit(Some(path), stdout, &tr.to_csv())?;
    }
    let estimate = estimate_regret(&problem, &cfg)?;
    let row = SweepRow {
        axis: cfg.horizon.to_string(),
        estimate,
        horizon: cfg.horizon,
        reps: cfg.reps,
        seed: cfg.seed,
    };
    let mut buf = Vec::new();
    write_csv(&[row], &mut buf)?;
    emit(
        a.common.out.as_deref(),
        stdout,
        &String::from_utf8(buf).expect("utf-8"),
    )?;
    Ok(0)
}

fn sweep_cmd(a: GameArgs, stdout: &mut dyn Write) -> Result<i32> {
    let problem = load_with_budget(&a.problem, a.budget)?;
    let (axis, horizon) = match &a.grid {
        Some(g) => {
            if a.horizon.len() != 1 {
                return Err(Error::input("an eps sweep takes a single --T"));
            }
            (SweepAxis::Eps(parse_list(g)?), a.horizon[0])
        }
        None => (SweepAxis::Horizon(a.horizon.clone()), a.horizon[0]),
    };
    let cfg = template(&a, horizon)?;
    let rows = sweep(&problem, &cfg, &axis)?;
    let json_out = a
        .common
        .out
        .as_ref()
        .is_some_and(|p| p.extension().is_some_and(|e| e == "json"));
    let text = if json_out {
        let doc = json!({
            "config": {
                "problem": a.problem.display().to_string(),
                "learner": a.learner,
                "adversary": a.adversary,
                "axis": if a.grid.is_some() { "eps" } else { "T" },
                "R": cfg.reps,
                "seed": cfg.seed,
                "mode": cfg.mode.name(),
                "expert_cap": cfg.expert_cap,
            },
            "columns": crate::arena::CSV_HEADER.split(',').collect::<Vec<_>>(),
            "rows": rows.iter().map(SweepRow::to_json).collect::<Vec<_>>(),
        });
        pretty(&doc)
    } else {
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf)?;
        String::from_utf8(buf).expect("utf-8")
    };
    emit(a.common.out.as_deref(), stdout, &text)?;
    Ok(0)
}

fn validate(a: ValidateArgs, stdout: &mut dyn Write) -> Result<i32> {
    let text = std::fs::read_to_string(&a.certificate)
        .map_err(|e| Error::input(format!("cannot read {}: {e}", a.certificate.display())))?;
    let mut cert = Certificate::from_json(serde_json::from_str(&text)?)?;
    if a.kind.is_some() || a.eps.is_some() || a.eta.is_some() {
        let name = a
            .kind
            .clone()
            .unwrap_or_else(|| cert.kind.name().to_string());
        let eps = match &a.eps {
            Some(e) => parse_rational(e)?,
            None => cert.kind.eps().clone(),
        };
        let eta = match (&a.eta, &cert.kind) {
            (Some(e), _) => Some(parse_rational(e)?),
            (None, TreeKind::StrictEta(_, eta)) => Some(eta.clone()),
            _ => None,
        };
        cert.kind = TreeKind::parse(&name, eps, eta)?;
    }
    let ok = cert.validate()?;
    writeln!(
        stdout,
        "{} {} eps={} depth={}",
        if ok { "valid" } else { "invalid" },
        cert.kind.name(),
        format_rational(cert.kind.eps()),
        cert.tree.depth
    )?;
    Ok(if ok { 0 } else { 1 })
}
