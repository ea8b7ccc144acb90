mod config;
mod output;

use clap::{Args, Parser, Subcommand};
use config::{builtin_example, load_config, write_config, ConfigError, RunConfig};
use embedcap::region::EncoderPolicy;
use embedcap::search::{
    compute_inner_region, compute_outer_subset, exhaustive_inner_count, CardinalityCaps, Formula,
    SearchError, SearchMode, SearchStrategy,
};
use embedcap::sim::{run_trials, uniform_copy_policy, SimError, SimulationConfig};
use thiserror::Error;

#[derive(Parser)]
#[command(
    name = "embedcap",
    version,
    about = "Inner/outer bounds for the two-user public embedding capacity region, plus a coding-scheme simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute an inner-bound region over factored policies
    RegionInner(RegionArgs),
    /// Compute a subset of the outer bound over joint policies
    RegionOuter(RegionArgs),
    /// Monte-Carlo run of the random-coding scheme
    Simulate(SimulateArgs),
    /// Print the built-in example configuration
    Example(CommonArgs),
    /// Summarize a problem configuration
    Info(CommonArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Configuration file; the built-in example when omitted
    #[arg(long)]
    config: Option<String>,
    /// Output path prefix for emitted files
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct RegionArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Auxiliary alphabet size for user 1 (default: support-lemma cap)
    #[arg(long)]
    t1_size: Option<usize>,
    /// Auxiliary alphabet size for user 2 (default: support-lemma cap)
    #[arg(long)]
    t2_size: Option<usize>,
    /// Shorthand setting both auxiliary sizes
    #[arg(long)]
    t_size: Option<usize>,
    /// Grid step (must divide 1)
    #[arg(long)]
    step: Option<f64>,
    /// Sampling budget for the non-exhaustive modes
    #[arg(long)]
    budget: Option<u64>,
    /// Refinement sweeps per support direction
    #[arg(long)]
    refine: Option<usize>,
    /// general | independent (default: by covertext dependence)
    #[arg(long)]
    formula: Option<String>,
    /// auto | exhaustive | sample | sample-then-refine
    #[arg(long)]
    mode: Option<String>,
    /// Also write the whitespace-separated .dat twin
    #[arg(long)]
    dat: bool,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    r1: Option<f64>,
    #[arg(long)]
    r2: Option<f64>,
}

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("invalid {field}: {message}")]
    Flag { field: String, message: String },
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 1 for configuration/usage problems, 2 for runtime failures.
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Flag { .. } => 1,
            _ => 2,
        }
    }
}

fn flag_error(field: &str, message: impl ToString) -> CliError {
    CliError::Flag {
        field: field.to_string(),
        message: message.to_string(),
    }
}

fn main() {
    init_threads();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders help/version itself with status 0
            if e.use_stderr() {
                eprint!("{e}");
                std::process::exit(1);
            }
            print!("{e}");
            std::process::exit(0);
        }
    };
    let result = match cli.command {
        Command::RegionInner(args) => region_command(args, true),
        Command::RegionOuter(args) => region_command(args, false),
        Command::Simulate(args) => simulate_command(args),
        Command::Example(args) => example_command(args),
        Command::Info(args) => info_command(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

#[cfg(feature = "parallel")]
fn init_threads() {
    if let Ok(v) = std::env::var("ERL_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn init_threads() {}

fn load(common: &CommonArgs) -> Result<RunConfig, CliError> {
    let mut cfg = match &common.config {
        Some(path) => load_config(path)?,
        None => builtin_example(),
    };
    if let Some(seed) = common.seed {
        cfg.search.seed = seed;
    }
    Ok(cfg)
}

fn resolve_formula(cfg: &RunConfig, flag: &Option<String>) -> Result<Formula, CliError> {
    let choice = flag.as_deref().unwrap_or(&cfg.search.formula);
    match choice {
        "general" => Ok(Formula::General),
        "independent" => Ok(Formula::Independent),
        "auto" => Ok(if cfg.problem.covertext_dependence() <= 1e-9 {
            Formula::Independent
        } else {
            Formula::General
        }),
        other => Err(flag_error("formula", format!("unknown formula `{other}`"))),
    }
}

fn resolve_caps(
    cfg: &RunConfig,
    args: &RegionArgs,
    formula: Formula,
    inner: bool,
) -> CardinalityCaps {
    let default = match formula {
        Formula::General => CardinalityCaps::inner_general(&cfg.problem),
        Formula::Independent => CardinalityCaps::inner_independent(&cfg.problem),
    };
    // the outer bound has no support-lemma cap; default to one above the
    // inner cap so the subset strictly extends the searched class
    let default = if inner {
        default
    } else {
        CardinalityCaps {
            t1_size: default.t1_size + 1,
            t2_size: default.t2_size + 1,
        }
    };
    let t1 = args
        .t1_size
        .or(args.t_size)
        .or(cfg.search.t1_size)
        .unwrap_or(default.t1_size);
    let t2 = args
        .t2_size
        .or(args.t_size)
        .or(cfg.search.t2_size)
        .unwrap_or(default.t2_size);
    CardinalityCaps {
        t1_size: t1,
        t2_size: t2,
    }
}

fn resolve_strategy(
    cfg: &RunConfig,
    args: &RegionArgs,
    caps: CardinalityCaps,
    inner: bool,
) -> Result<SearchStrategy, CliError> {
    let mut strategy = SearchStrategy::exhaustive(args.step.unwrap_or(cfg.search.step));
    strategy.sample_budget = args.budget.unwrap_or(cfg.search.budget);
    strategy.refine_steps = args.refine.unwrap_or(cfg.search.refine_steps);
    strategy.refine_directions = cfg.search.refine_directions;
    strategy.rate_margin = cfg.search.rate_margin;
    strategy.seed = args.common.seed.unwrap_or(cfg.search.seed);
    let mode = args.mode.as_deref().unwrap_or(&cfg.search.mode);
    strategy.mode = match mode {
        "exhaustive" => SearchMode::ExhaustiveGrid,
        "sample" => SearchMode::RandomSample,
        "sample-then-refine" => SearchMode::SampleThenRefine,
        "auto" => {
            // exhaustive only when the predicted candidate count fits the cap;
            // the outer joint grid grows too fast to enumerate by default
            let feasible_grid = inner
                && exhaustive_inner_count(&cfg.problem, caps, strategy.grid_step)
                    .map(|c| c <= strategy.exhaustive_cap)
                    .unwrap_or(false);
            if feasible_grid {
                SearchMode::ExhaustiveGrid
            } else {
                SearchMode::SampleThenRefine
            }
        }
        other => return Err(flag_error("mode", format!("unknown mode `{other}`"))),
    };
    Ok(strategy)
}

fn region_command(args: RegionArgs, inner: bool) -> Result<(), CliError> {
    let cfg = load(&args.common)?;
    let formula = resolve_formula(&cfg, &args.formula)?;
    let caps = resolve_caps(&cfg, &args, formula, inner);
    let strategy = resolve_strategy(&cfg, &args, caps, inner)?;
    let (task, label) = if inner {
        ("region-inner", "inner")
    } else {
        // the search yields an inner approximation: a SUBSET of the outer
        // bound at these auxiliary sizes
        ("region-outer", "outer-subset")
    };
    let report = if inner {
        compute_inner_region(&cfg.problem, caps, &strategy, formula)?
    } else {
        compute_outer_subset(&cfg.problem, caps, &strategy, formula)?
    };
    let prefix = args
        .common
        .out
        .clone()
        .or(cfg.out_prefix.clone())
        .unwrap_or_else(|| task.to_string());
    output::write_region_files(
        &prefix, task, label, formula, caps, &strategy, &report, args.dat,
    )?;
    println!(
        "{label} region: {} vertices, max sum rate {:.6} ({} candidates, {} feasible) -> {prefix}.csv",
        report.region.vertices().len(),
        report.region.max_sum_rate(),
        report.candidates_evaluated,
        report.feasible_count
    );
    Ok(())
}

fn simulate_command(args: SimulateArgs) -> Result<(), CliError> {
    let cfg = load(&args.common)?;
    let policy = match (&cfg.policy1, &cfg.policy2) {
        (Some(p1), Some(p2)) => EncoderPolicy::new(p1.clone(), p2.clone())
            .map_err(|e| flag_error("policy", e))?,
        (None, None) => uniform_copy_policy(&cfg.problem)?,
        _ => {
            return Err(flag_error(
                "policy",
                "either both [policy 1] and [policy 2] sections or neither",
            ))
        }
    };
    let s = &cfg.simulation;
    let mut sim = SimulationConfig::new(
        cfg.problem.clone(),
        policy,
        args.n.unwrap_or(s.n),
        args.epsilon.unwrap_or(s.epsilon),
    );
    sim.mu = args.mu.unwrap_or(s.mu);
    sim.nu = args.nu.unwrap_or(s.nu);
    sim.r1 = args.r1.unwrap_or(s.r1);
    sim.r2 = args.r2.unwrap_or(s.r2);
    sim.trials = args.trials.unwrap_or(s.trials);
    sim.estimator_samples = s.estimator_samples;
    sim.codebook_cap = s.codebook_cap;
    sim.sample_max_tries = s.max_tries;
    sim.rate_margin = s.rate_margin;
    sim.seed = args.common.seed.unwrap_or(cfg.search.seed);
    let report = run_trials(&sim)?;
    println!(
        "p_e_hat = {:.6} over {} trials (d1_hat = {:.6}, d2_hat = {:.6}, fallbacks = [{}, {}])",
        report.p_e_hat,
        report.trials_run,
        report.d1_hat,
        report.d2_hat,
        report.encoder_fallbacks[0],
        report.encoder_fallbacks[1]
    );
    if let Some(prefix) = args.common.out.or(cfg.out_prefix) {
        let path = format!("{prefix}.sim.txt");
        std::fs::write(&path, output::sim_report_text(&report))?;
        println!("report written to {path}");
    }
    Ok(())
}

fn example_command(args: CommonArgs) -> Result<(), CliError> {
    let cfg = builtin_example();
    let text = write_config(&cfg);
    match args.out {
        Some(prefix) => {
            let path = format!("{prefix}.cfg");
            std::fs::write(&path, text)?;
            println!("example configuration written to {path}");
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn info_command(args: CommonArgs) -> Result<(), CliError> {
    let cfg = load(&args)?;
    let p = &cfg.problem;
    println!(
        "problem: |U1|={} |U2|={} |X1|={} |X2|={} |Y|={}, levels D = ({}, {})",
        p.u1().len(),
        p.u2().len(),
        p.x1().len(),
        p.x2().len(),
        p.y().len(),
        p.level(1),
        p.level(2)
    );
    let dep = p.covertext_dependence();
    println!("covertext dependence I(U1;U2) = {dep:.9} bits");
    println!("d_max = ({}, {})", p.d_max(1), p.d_max(2));
    let ceiling = embedcap::oracles::max_channel_information(p, 40);
    println!("channel ceiling max I(X1,X2;Y) = {ceiling:.6} bits (grid search, step 1/40)");
    let general = CardinalityCaps::inner_general(p);
    let indep = CardinalityCaps::inner_independent(p);
    println!(
        "auxiliary caps: general ({}, {}), independent ({}, {})",
        general.t1_size, general.t2_size, indep.t1_size, indep.t2_size
    );
    for (name, caps) in [("general", general), ("independent", indep)] {
        match exhaustive_inner_count(p, caps, cfg.search.step) {
            Ok(count) => println!(
                "exhaustive factored grid at step {} with {name} caps: {count} candidates",
                cfg.search.step
            ),
            Err(e) => println!("exhaustive grid at step {}: {e}", cfg.search.step),
        }
    }
    Ok(())
}
