//! Command-line front end.
//!
//! Subcommands: `simulate`, `sweep`, `hard-instance`, `verify-bounds`,
//! `empirical`, `enumerate`. Results go to stdout (or `--out` files),
//! diagnostics to stderr. Exit codes: 0 success, 1 usage error, 2
//! validation/precondition error. Every flag can also be supplied through a
//! `--config` TOML file of `flag-name = value` pairs; explicit flags win.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::bounds;
use crate::error::Error;
use crate::hard_instances;
use crate::ingest;
use crate::instance::Instance;
use crate::rng;
use crate::simulation::{self, SweepResult, SweepRow};
use crate::strategies::{AlphaSpec, StrategySpec};
use crate::svg;

#[derive(Debug)]
enum CliError {
    /// Bad flags or flag values: exit 1.
    Usage(String),
    /// Invalid inputs, failed validation, violated preconditions: exit 2.
    Data(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Data(e)
    }
}

fn usage(message: impl Into<String>) -> CliError {
    CliError::Usage(message.into())
}

#[derive(Parser)]
#[command(
    name = "passk",
    version,
    about = "Pass@k inference-selection strategies: regret simulation, hard instances, bound checks"
)]
struct Cli {
    /// TOML file whose keys mirror this subcommand's flags; flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Cap on worker threads (results do not depend on this).
    #[arg(long, global = true, value_name = "COUNT")]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the regret of one strategy on one instance.
    Simulate(SimulateArgs),
    /// Run a (strategy, N, k) grid and emit CSV (and optional SVG charts).
    Sweep(SweepArgs),
    /// Generate an adversarial instance (or family) as JSON files.
    HardInstance(HardInstanceArgs),
    /// Compare analytic bounds against Monte Carlo estimates.
    VerifyBounds(VerifyBoundsArgs),
    /// Score strategies on a pre-sampled trajectory log.
    Empirical(EmpiricalArgs),
    /// Exact regret by exhaustive enumeration (tiny instances only).
    Enumerate(EnumerateArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Instance JSON file.
    #[arg(long, value_name = "FILE")]
    instance: Option<PathBuf>,
    /// Named generator spec, e.g. `mv:cstar=20,k=2` (see README).
    #[arg(long, value_name = "SPEC")]
    hard: Option<String>,
    /// Family member index when --hard generates a family.
    #[arg(long, value_name = "INDEX")]
    member: Option<usize>,
    /// Strategy config string: mv | wmv:w=identity | bon | bom:alpha=<f>|auto.
    #[arg(long, value_name = "SPEC")]
    strategy: Option<String>,
    /// Sampling budget N.
    #[arg(long, value_name = "N")]
    n: Option<usize>,
    /// Number of submitted responses k.
    #[arg(long, value_name = "K")]
    k: Option<usize>,
    #[arg(long, value_name = "COUNT")]
    trials: Option<u64>,
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_name = "FILE")]
    instance: Option<PathBuf>,
    /// Generator spec; families are scored by their average regret.
    #[arg(long, value_name = "SPEC")]
    hard: Option<String>,
    /// Comma-separated strategy specs.
    #[arg(long, value_name = "LIST")]
    strategies: Option<String>,
    /// Comma-separated N values.
    #[arg(long = "n-grid", value_name = "LIST")]
    n_grid: Option<String>,
    /// Comma-separated k values.
    #[arg(long = "k-grid", value_name = "LIST")]
    k_grid: Option<String>,
    #[arg(long, value_name = "COUNT")]
    trials: Option<u64>,
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,
    /// CSV output file (stdout when omitted).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Regret-vs-N chart (one series per strategy and k).
    #[arg(long, value_name = "FILE")]
    svg: Option<PathBuf>,
    /// Regret-vs-k chart at the largest N (one series per strategy).
    #[arg(long = "svg-k", value_name = "FILE")]
    svg_k: Option<PathBuf>,
}

#[derive(Args)]
struct HardInstanceArgs {
    /// Generator: mv | bon1 | bon2 | hammer | epsopt.
    generator: Option<String>,
    #[arg(long, value_name = "C")]
    cstar: Option<f64>,
    #[arg(long, value_name = "K")]
    k: Option<usize>,
    /// Family size (hammer).
    #[arg(long, value_name = "M")]
    m: Option<usize>,
    /// Bait mass p (bon2); defaults to 4k/N when --n is given.
    #[arg(long, value_name = "P")]
    p: Option<f64>,
    /// Sampling budget used to derive p = 4k/N (bon2).
    #[arg(long, value_name = "N")]
    n: Option<usize>,
    #[arg(long = "eps-rm", value_name = "EPS")]
    eps_rm: Option<f64>,
    /// eps_opt value (epsopt) or target from which bon2 takes delta/2.
    #[arg(long = "eps-opt", value_name = "EPS")]
    eps_opt: Option<f64>,
    /// Estimated-reward deficit of the optimum (bon2).
    #[arg(long, value_name = "DELTA")]
    delta: Option<f64>,
    /// Output directory for the JSON files.
    #[arg(long = "out-dir", value_name = "DIR")]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyBoundsArgs {
    #[arg(long, value_name = "FILE")]
    instance: Option<PathBuf>,
    #[arg(long, value_name = "SPEC")]
    hard: Option<String>,
    #[arg(long, value_name = "N")]
    n: Option<usize>,
    #[arg(long, value_name = "K")]
    k: Option<usize>,
    #[arg(long, value_name = "COUNT")]
    trials: Option<u64>,
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,
    /// Family size for the general lower bound (defaults to the family size).
    #[arg(long, value_name = "M")]
    m: Option<usize>,
}

#[derive(Args)]
struct EmpiricalArgs {
    /// Line-delimited JSON trajectory log.
    #[arg(long, value_name = "FILE")]
    input: Option<PathBuf>,
    #[arg(long, value_name = "LIST")]
    strategies: Option<String>,
    /// Comma-separated k values.
    #[arg(long = "k-list", value_name = "LIST")]
    k_list: Option<String>,
    /// Threshold substituted for `bom:alpha=auto`; a float or
    /// `auto-frequency:<f>` (both mean the fixed value f).
    #[arg(long, value_name = "ALPHA")]
    alpha: Option<String>,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EnumerateArgs {
    #[arg(long, value_name = "FILE")]
    instance: Option<PathBuf>,
    #[arg(long, value_name = "SPEC")]
    hard: Option<String>,
    #[arg(long, value_name = "INDEX")]
    member: Option<usize>,
    #[arg(long, value_name = "SPEC")]
    strategy: Option<String>,
    #[arg(long, value_name = "N")]
    n: Option<usize>,
    #[arg(long, value_name = "K")]
    k: Option<usize>,
}

/// Entry point used by the binary and by tests.
///
/// Identical argv (including `--seed`) produce byte-identical CSV output at
/// any `--workers` value.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };

    let config = match load_config(cli.config.as_deref()) {
        Ok(table) => table,
        Err(err) => return report(err),
    };

    let workers = cli.workers;
    let outcome = match resolve_workers(workers, &config) {
        Ok(w) => with_pool(w, || dispatch(cli.command, &config)),
        Err(err) => Err(err),
    };
    match outcome {
        Ok(()) => 0,
        Err(err) => report(err),
    }
}

fn report(err: CliError) -> i32 {
    match err {
        CliError::Usage(message) => {
            eprintln!("error: {message}");
            1
        }
        CliError::Data(error) => {
            eprintln!("error: {error}");
            2
        }
    }
}

fn resolve_workers(flag: Option<usize>, cfg: &toml::Table) -> Result<Option<usize>, CliError> {
    resolve(flag, cfg, "workers")
}

fn with_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match workers {
        Some(count) if count > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(count)
            .build()
            .expect("worker pool")
            .install(f),
        _ => f(),
    }
}

fn dispatch(command: Command, cfg: &toml::Table) -> Result<(), CliError> {
    match command {
        Command::Simulate(args) => simulate(args, cfg),
        Command::Sweep(args) => sweep_cmd(args, cfg),
        Command::HardInstance(args) => hard_instance(args, cfg),
        Command::VerifyBounds(args) => verify_bounds(args, cfg),
        Command::Empirical(args) => empirical(args, cfg),
        Command::Enumerate(args) => enumerate_cmd(args, cfg),
    }
}

// ---- config handling -------------------------------------------------------

fn load_config(path: Option<&Path>) -> Result<toml::Table, CliError> {
    let Some(path) = path else { return Ok(toml::Table::new()) };
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
    text.parse::<toml::Table>()
        .map_err(|e| usage(format!("config {}: {e}", path.display())))
}

/// Flag value if present, else the config value under `key`, parsed with the
/// flag's own parser.
fn resolve<T: FromStr>(flag: Option<T>, cfg: &toml::Table, key: &str) -> Result<Option<T>, CliError> {
    if flag.is_some() {
        return Ok(flag);
    }
    let Some(value) = cfg.get(key) else { return Ok(None) };
    let text = match value {
        toml::Value::String(s) => s.clone(),
        toml::Value::Integer(i) => i.to_string(),
        toml::Value::Float(f) => f.to_string(),
        toml::Value::Boolean(b) => b.to_string(),
        other => {
            return Err(usage(format!(
                "config key `{key}` has unsupported type `{}`",
                other.type_str()
            )))
        }
    };
    text.parse::<T>()
        .map(Some)
        .map_err(|_| usage(format!("config key `{key}`: cannot parse `{text}`")))
}

fn require<T>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| usage(format!("missing required --{flag} (flag or config key)")))
}

fn parse_list<T: FromStr>(text: &str, what: &str) -> Result<Vec<T>, CliError> {
    let items: Result<Vec<T>, _> = text.split(',').map(|s| s.trim().parse::<T>()).collect();
    items.map_err(|_| usage(format!("cannot parse {what} list `{text}`")))
}

fn parse_strategies(text: &str) -> Result<Vec<StrategySpec>, CliError> {
    StrategySpec::parse_list(text).map_err(|e| usage(e.to_string()))
}

// ---- shared input loading ---------------------------------------------------

fn load_family(
    instance: Option<PathBuf>,
    hard: Option<String>,
) -> Result<Vec<Instance>, CliError> {
    match (instance, hard) {
        (Some(_), Some(_)) => Err(usage("--instance and --hard are mutually exclusive")),
        (Some(path), None) => Ok(vec![Instance::load(&path)?]),
        (None, Some(spec)) => Ok(hard_instances::from_spec(&spec)?),
        (None, None) => Err(usage("one of --instance or --hard is required")),
    }
}

fn pick_member(family: Vec<Instance>, member: usize) -> Result<Instance, CliError> {
    let len = family.len();
    family
        .into_iter()
        .nth(member)
        .ok_or_else(|| usage(format!("--member {member} out of range for a family of {len}")))
}

fn write_output(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content).map_err(|e| CliError::Data(e.into())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .map_err(|e| CliError::Data(e.into()))
        }
    }
}

// ---- subcommands ------------------------------------------------------------

fn simulate(args: SimulateArgs, cfg: &toml::Table) -> Result<(), CliError> {
    let instance = resolve(args.instance, cfg, "instance")?;
    let hard = resolve(args.hard, cfg, "hard")?;
    let member = resolve(args.member, cfg, "member")?.unwrap_or(0);
    let strategy = require(resolve(args.strategy, cfg, "strategy")?, "strategy")?;
    let n = require(resolve(args.n, cfg, "n")?, "n")?;
    let k = require(resolve(args.k, cfg, "k")?, "k")?;
    let trials = resolve(args.trials, cfg, "trials")?.unwrap_or(10_000);
    let seed = resolve(args.seed, cfg, "seed")?.unwrap_or(0);

    let strategy = StrategySpec::parse(&strategy).map_err(|e| usage(e.to_string()))?;
    let inst = pick_member(load_family(instance, hard)?, member)?;
    let stats = inst.derived_stats()?;
    let estimate = simulation::estimate_regret(&inst, &strategy, n, k, trials, seed)?;

    let mut table = SweepResult::new();
    table.push(SweepRow {
        strategy,
        n,
        k,
        estimate,
        bound_upper: Some(bounds::bom_upper_bound(stats.coverage, k, stats.eps_rm, stats.eps_opt, n)),
        bound_lower: None,
    });
    write_output(None, &table.to_csv())
}

fn sweep_cmd(args: SweepArgs, cfg: &toml::Table) -> Result<(), CliError> {
    let instance = resolve(args.instance, cfg, "instance")?;
    let hard = resolve(args.hard, cfg, "hard")?;
    let strategies = require(resolve(args.strategies, cfg, "strategies")?, "strategies")?;
    let n_grid = require(resolve(args.n_grid, cfg, "n-grid")?, "n-grid")?;
    let k_grid = require(resolve(args.k_grid, cfg, "k-grid")?, "k-grid")?;
    let trials = resolve(args.trials, cfg, "trials")?.unwrap_or(10_000);
    let seed = resolve(args.seed, cfg, "seed")?.unwrap_or(0);
    let out = resolve(args.out, cfg, "out")?;
    let svg_n = resolve(args.svg, cfg, "svg")?;
    let svg_k = resolve(args.svg_k, cfg, "svg-k")?;

    let strategies = parse_strategies(&strategies)?;
    let n_grid: Vec<usize> = parse_list(&n_grid, "N")?;
    let k_grid: Vec<usize> = parse_list(&k_grid, "k")?;
    let family = load_family(instance, hard)?;

    let result = simulation::sweep(&family, &strategies, &n_grid, &k_grid, trials, seed)?;
    write_output(out.as_deref(), &result.to_csv())?;

    if let Some(path) = svg_n {
        let mut series = Vec::new();
        for strategy in &strategies {
            for &k in &k_grid {
                let points: Vec<(f64, f64)> = result
                    .series(strategy, k)
                    .iter()
                    .map(|row| (row.n as f64, row.estimate.mean))
                    .collect();
                let label = if k_grid.len() > 1 {
                    format!("{strategy} (k={k})")
                } else {
                    strategy.to_string()
                };
                series.push(svg::Series { label, points });
            }
        }
        let chart = svg::line_chart("regret vs N", "N", "regret", &series);
        std::fs::write(&path, chart).map_err(|e| CliError::Data(e.into()))?;
    }

    if let Some(path) = svg_k {
        let n_max = *n_grid.iter().max().expect("nonempty grid");
        let mut series = Vec::new();
        for strategy in &strategies {
            let mut points: Vec<(f64, f64)> = result
                .rows
                .iter()
                .filter(|row| &row.strategy == strategy && row.n == n_max)
                .map(|row| (row.k as f64, row.estimate.mean))
                .collect();
            points.sort_by(|a, b| a.0.total_cmp(&b.0));
            series.push(svg::Series { label: strategy.to_string(), points });
        }
        let chart = svg::line_chart(&format!("regret vs k (N={n_max})"), "k", "regret", &series);
        std::fs::write(&path, chart).map_err(|e| CliError::Data(e.into()))?;
    }

    Ok(())
}

/// Formats a float for filenames: integral values lose the trailing `.0`.
fn fmt_num(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        v.to_string()
    }
}

fn hard_instance(args: HardInstanceArgs, cfg: &toml::Table) -> Result<(), CliError> {
    let generator = require(resolve(args.generator, cfg, "generator")?, "generator")
        .map_err(|_| usage("missing generator name (mv | bon1 | bon2 | hammer | epsopt)"))?;
    let cstar = require(resolve(args.cstar, cfg, "cstar")?, "cstar")?;
    let k = resolve(args.k, cfg, "k")?;
    let m = resolve(args.m, cfg, "m")?;
    let p = resolve(args.p, cfg, "p")?;
    let n = resolve(args.n, cfg, "n")?;
    let eps_rm = resolve(args.eps_rm, cfg, "eps-rm")?;
    let eps_opt = resolve(args.eps_opt, cfg, "eps-opt")?;
    let delta = resolve(args.delta, cfg, "delta")?;
    let out_dir = resolve(args.out_dir, cfg, "out-dir")?.unwrap_or_else(|| PathBuf::from("."));

    let c = fmt_num(cstar);
    let (base, family): (String, Vec<Instance>) = match generator.as_str() {
        "mv" => {
            let k = require(k, "k")?;
            let inst = hard_instances::mv_hard_instance(cstar, k, |r| crate::strategies::WeightFn::Identity.eval(r))?;
            (format!("mv_c{c}_k{k}"), vec![inst])
        }
        "bon1" => (format!("bon1_c{c}"), vec![hard_instances::bon_hard_case1(cstar)?]),
        "bon2" => {
            let k = require(k, "k")?;
            let eps_rm = require(eps_rm, "eps-rm")?;
            let p = match (p, n) {
                (Some(p), _) => p,
                (None, Some(n)) => hard_instances::case2_recommended_p(k, n),
                (None, None) => return Err(usage("bon2 needs --p or --n (to derive p = 4k/N)")),
            };
            let inst = match (delta, eps_opt) {
                (Some(d), _) => hard_instances::bon_hard_case2(cstar, k, p, eps_rm, d)?,
                (None, Some(target)) => {
                    hard_instances::bon_hard_case2_with_target(cstar, k, p, eps_rm, target)?
                }
                (None, None) => hard_instances::bon_hard_case2(cstar, k, p, eps_rm, 0.01)?,
            };
            (format!("bon2_c{c}_k{k}"), vec![inst])
        }
        "hammer" => {
            let k = require(k, "k")?;
            let m = require(m, "m")?;
            let eps_rm = require(eps_rm, "eps-rm")?;
            let family = hard_instances::averaging_hammer_family(cstar, k, m, eps_rm)?;
            (format!("hammer_c{c}_k{k}_m{m}"), family)
        }
        "epsopt" => {
            let k = require(k, "k")?;
            let eps_opt = require(eps_opt, "eps-opt")?;
            let eps_rm = require(eps_rm, "eps-rm")?;
            let family = hard_instances::eps_opt_family(cstar, k, eps_opt, eps_rm)?;
            (format!("epsopt_c{c}_k{k}"), family)
        }
        other => return Err(usage(format!("unknown generator `{other}`"))),
    };

    std::fs::create_dir_all(&out_dir).map_err(|e| CliError::Data(e.into()))?;
    let mut listing = String::new();
    if family.len() == 1 {
        let path = out_dir.join(format!("{base}.json"));
        family[0].save(&path)?;
        listing.push_str(&format!("{}\n", path.display()));
    } else {
        for (j, inst) in family.iter().enumerate() {
            let path = out_dir.join(format!("{base}_{j}.json"));
            inst.save(&path)?;
            listing.push_str(&format!("{}\n", path.display()));
        }
    }
    write_output(None, &listing)
}

fn verify_bounds(args: VerifyBoundsArgs, cfg: &toml::Table) -> Result<(), CliError> {
    let instance = resolve(args.instance, cfg, "instance")?;
    let hard = resolve(args.hard, cfg, "hard")?;
    let n = require(resolve(args.n, cfg, "n")?, "n")?;
    let k = require(resolve(args.k, cfg, "k")?, "k")?;
    let trials = resolve(args.trials, cfg, "trials")?.unwrap_or(10_000);
    let seed = resolve(args.seed, cfg, "seed")?.unwrap_or(0);
    let m_flag = resolve(args.m, cfg, "m")?;

    let family = load_family(instance, hard)?;
    let stats = family[0].derived_stats()?;
    let m = m_flag.unwrap_or(family.len());

    let family_regret = |strategy: &StrategySpec, salt: u64| -> Result<f64, CliError> {
        let mut total = 0.0;
        for (j, member) in family.iter().enumerate() {
            let member_seed = rng::derive_seed(seed, &[salt, j as u64]);
            total += simulation::estimate_regret(member, strategy, n, k, trials, member_seed)?.mean;
        }
        Ok(total / family.len() as f64)
    };

    let params = format!("C*={};k={k};N={n};trials={trials}", fmt_num(stats.coverage));
    let mut out = String::from("bound,params,analytic,empirical,margin\n");

    let analytic = bounds::event_e_prob_bound(stats.coverage, n);
    let empirical = bounds::event_e_monte_carlo(&family[0], n, trials, rng::derive_seed(seed, &[0]))?;
    out.push_str(&format!("event_e_prob,{params},{analytic},{empirical},{}\n", empirical - analytic));

    let bom = StrategySpec::BestOfMajority { alpha: AlphaSpec::Auto };
    let bom_regret = family_regret(&bom, 1)?;
    let analytic = bounds::bom_upper_bound(stats.coverage, k, stats.eps_rm, stats.eps_opt, n);
    out.push_str(&format!("bom_upper,{params},{analytic},{bom_regret},{}\n", analytic - bom_regret));

    if let Ok(analytic) = bounds::general_lower_bound(stats.coverage, k, m, stats.eps_rm) {
        out.push_str(&format!(
            "general_lower,{params};M={m},{analytic},{bom_regret},{}\n",
            bom_regret - analytic
        ));
    }

    if stats.eps_rm > 0.0 {
        let bon_regret = family_regret(&StrategySpec::BestOfN, 2)?;
        let analytic = bounds::bon_lower_bound(n, k, stats.eps_rm);
        out.push_str(&format!("bon_lower,{params},{analytic},{bon_regret},{}\n", bon_regret - analytic));
    }

    write_output(None, &out)
}

fn empirical(args: EmpiricalArgs, cfg: &toml::Table) -> Result<(), CliError> {
    let input = require(resolve(args.input, cfg, "input")?, "input")?;
    let strategies = require(resolve(args.strategies, cfg, "strategies")?, "strategies")?;
    let k_list = require(resolve(args.k_list, cfg, "k-list")?, "k-list")?;
    let alpha = resolve(args.alpha, cfg, "alpha")?;
    let out = resolve(args.out, cfg, "out")?;

    let alpha: Option<f64> = match alpha.as_deref() {
        None => None,
        Some(text) => {
            let raw = text.strip_prefix("auto-frequency:").unwrap_or(text);
            let value: f64 = raw
                .parse()
                .map_err(|_| usage(format!("--alpha: cannot parse `{text}`")))?;
            if !(value > 0.0 && value < 1.0) {
                return Err(usage(format!("--alpha {value} must lie in (0, 1)")));
            }
            Some(value)
        }
    };

    let mut strategies = parse_strategies(&strategies)?;
    for strategy in &mut strategies {
        if let StrategySpec::BestOfMajority { alpha: spec @ AlphaSpec::Auto } = strategy {
            match alpha {
                Some(value) => *spec = AlphaSpec::Fixed(value),
                None => {
                    return Err(usage(
                        "bom:alpha=auto needs --alpha on empirical data (coverage is unknown)",
                    ))
                }
            }
        }
    }
    let k_list: Vec<usize> = parse_list(&k_list, "k")?;

    let prompts = ingest::load_records(&input)?;
    let mut prompt_groups = Vec::with_capacity(prompts.len());
    for records in prompts.values() {
        prompt_groups.push(ingest::build_groups(records)?);
    }

    let mut csv = String::from("strategy,k,alpha,n_prompts,accuracy\n");
    let mut skipped = 0;
    for strategy in &strategies {
        let alpha_col = match strategy {
            StrategySpec::BestOfMajority { alpha: AlphaSpec::Fixed(a) } => a.to_string(),
            _ => String::new(),
        };
        for &k in &k_list {
            let report = ingest::passk_accuracy(&prompt_groups, strategy, k)?;
            skipped = report.prompts_skipped;
            csv.push_str(&format!(
                "{strategy},{k},{alpha_col},{},{}\n",
                report.prompts_scored, report.accuracy
            ));
        }
    }
    if skipped > 0 {
        eprintln!("skipped {skipped} prompts with no records");
    }
    write_output(out.as_deref(), &csv)
}

fn enumerate_cmd(args: EnumerateArgs, cfg: &toml::Table) -> Result<(), CliError> {
    let instance = resolve(args.instance, cfg, "instance")?;
    let hard = resolve(args.hard, cfg, "hard")?;
    let member = resolve(args.member, cfg, "member")?.unwrap_or(0);
    let strategy = require(resolve(args.strategy, cfg, "strategy")?, "strategy")?;
    let n = require(resolve(args.n, cfg, "n")?, "n")?;
    let k = require(resolve(args.k, cfg, "k")?, "k")?;

    let strategy = StrategySpec::parse(&strategy).map_err(|e| usage(e.to_string()))?;
    let inst = pick_member(load_family(instance, hard)?, member)?;
    let regret = simulation::exact_regret_enumeration(&inst, &strategy, n, k)?;
    write_output(None, &format!("strategy,N,k,regret\n{strategy},{n},{k},{regret}\n"))
}
