//! Experiment runner for the steady-state EA toolkit.
//!
//! Subcommands: `run` (one experiment, repeated R times), `sweep` (grid over
//! tournament sizes, feature widths, population sizes), `treesim` (species
//! tree model), `hist` (end-of-run fitness histogram plus diversity trace),
//! and `schemes` (list the registered strategies).

use std::fs::File;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use steady_ea::diversity::fitness_histogram;
use steady_ea::engine::{EngineConfig, RunRecord, StoppingRule};
use steady_ea::experiment::{
    run_experiment, run_traced, ExperimentSpec, ExperimentSummary, Metric, TraceConfig,
};
use steady_ea::io::{
    parse_dimacs, parse_orlib_scp, parse_tsp_matrix, write_histogram_csv, write_run_csv,
    write_trace_csv,
};
use steady_ea::problems::{
    DeceptiveProblem, Problem, SatProblem, ScpProblem, TspInstance, TspProblem,
};
use steady_ea::schemes::SchemeRegistry;
use steady_ea::tree::{heuristic_times, simulate_hitting_record, TreeModel, TreeScheme};

#[derive(Parser)]
#[command(name = "ea-bench", version, about = "Steady-state EA benchmark runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment configuration, repeated --reps times.
    Run(RunArgs),
    /// Run a grid of experiments, one summary row per point.
    Sweep(SweepArgs),
    /// Species-tree model: empirical hitting times vs heuristic formulas.
    Treesim(TreesimArgs),
    /// One run emitting its end-of-run fitness histogram and trace.
    Hist(HistArgs),
    /// List the registered selection and deletion schemes.
    Schemes,
}

#[derive(Args, Clone)]
struct EngineArgs {
    /// Problem id: deceptive:<D>:<width> | tsp:<n> | tsp:<file> | scp:<file> | sat:<file>
    #[arg(long)]
    problem: String,
    /// Selection scheme id (see `ea-bench schemes`).
    #[arg(long)]
    select: String,
    /// Deletion scheme id (see `ea-bench schemes`).
    #[arg(long)]
    delete: String,
    /// Population capacity.
    #[arg(long, default_value_t = 1000)]
    pop: usize,
    /// Initial population size (defaults to the capacity).
    #[arg(long)]
    init_pop: Option<usize>,
    /// Crossover probability.
    #[arg(long, default_value_t = 0.5)]
    pc: f64,
    /// Mutation probability after a crossover.
    #[arg(long, default_value_t = 0.5)]
    pm: f64,
    /// Base seed; repetition r runs with seed+r.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Fitness bins for FUDS/SID and histograms (default: round(sqrt(pop))).
    #[arg(long)]
    bins: Option<usize>,
}

impl EngineArgs {
    fn config(&self) -> EngineConfig {
        let mut config = EngineConfig::new(&self.select, &self.delete, self.pop);
        config.initial_size = self.init_pop.unwrap_or(self.pop);
        config.crossover_probability = self.pc;
        config.mutation_probability = self.pm;
        config.seed = self.seed;
        config.nbins = self.bins;
        config
    }
}

#[derive(Args, Clone)]
struct StopArgs {
    /// Stop at the first individual reaching the problem target.
    #[arg(long)]
    target: bool,
    /// Stop after this many generations.
    #[arg(long)]
    gens: Option<f64>,
    /// Stop after this many generations without improvement.
    #[arg(long)]
    stall_gens: Option<f64>,
    /// Safety cap on cycles, always active.
    #[arg(long, default_value_t = 10_000_000)]
    max_cycles: u64,
}

impl StopArgs {
    fn rule(&self) -> StoppingRule {
        let mut rule = StoppingRule::max_cycles(self.max_cycles);
        rule.target_fitness = self.target;
        rule.fixed_generations = self.gens;
        // a bare invocation still terminates: default to the stall rule
        rule.stall_generations = if self.target || self.gens.is_some() {
            self.stall_gens
        } else {
            Some(self.stall_gens.unwrap_or(40.0))
        };
        rule
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    engine: EngineArgs,
    #[command(flatten)]
    stop: StopArgs,
    /// Repetitions.
    #[arg(long, default_value_t = 1)]
    reps: usize,
    /// Summary metric: t | raw | fitness | cycles (default t with --target).
    #[arg(long)]
    metric: Option<String>,
    /// Write per-repetition run records to this CSV file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Trace the first repetition and print the trace CSV to stdout.
    #[arg(long)]
    trace: bool,
    /// Trace the first repetition into this CSV file.
    #[arg(long)]
    trace_out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    engine: EngineArgs,
    #[command(flatten)]
    stop: StopArgs,
    #[arg(long, default_value_t = 30)]
    reps: usize,
    /// Tournament sizes, e.g. `2..12` or `2,4,6,12` (with --select tour).
    #[arg(long)]
    tour_sizes: Option<String>,
    /// Deceptive feature widths, e.g. `0.2,0.1,0.05,0.025`.
    #[arg(long)]
    deltas: Option<String>,
    /// Population sizes, e.g. `250,500,1000`.
    #[arg(long)]
    pops: Option<String>,
    #[arg(long)]
    metric: Option<String>,
    /// Write summary rows to this CSV file (also printed to stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TreesimArgs {
    /// Fitness levels |F|.
    #[arg(long)]
    levels: u32,
    /// Branching factor b.
    #[arg(long, default_value_t = 2)]
    branch: u32,
    /// Species per interior level s.
    #[arg(long, default_value_t = 4)]
    species: u32,
    /// Evolution probability p.
    #[arg(long, default_value_t = 0.05)]
    p: f64,
    /// Population capacity for the population schemes.
    #[arg(long, default_value_t = 50)]
    capacity: usize,
    /// Scheme: rw | fuss | elitist | tour:<k>.
    #[arg(long)]
    scheme: String,
    #[arg(long, default_value_t = 30)]
    reps: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 100_000_000)]
    max_cycles: u64,
    /// Write per-repetition run records to this CSV file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct HistArgs {
    #[command(flatten)]
    engine: EngineArgs,
    #[command(flatten)]
    stop: StopArgs,
    /// Write the end-of-run histogram to this CSV file (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the diversity trace to this CSV file.
    #[arg(long)]
    trace_out: Option<PathBuf>,
}

/// Problems are monomorphized per genome type; this wrapper dispatches the
/// parsed id to the right binding.
enum AnyProblem {
    Deceptive(DeceptiveProblem),
    Tsp(TspProblem),
    Scp(ScpProblem),
    Sat(SatProblem),
}

fn parse_problem(spec: &str, base_seed: u64) -> Result<AnyProblem> {
    let (kind, rest) = spec
        .split_once(':')
        .with_context(|| format!("problem id '{spec}' has no parameters"))?;
    match kind {
        "deceptive" => {
            let (d, width) = rest
                .split_once(':')
                .context("deceptive needs <dims>:<width>")?;
            let dims: usize = d.parse().context("bad dimension")?;
            let width: f64 = width.parse().context("bad feature width")?;
            Ok(AnyProblem::Deceptive(DeceptiveProblem::new(dims, width)?))
        }
        "tsp" => {
            if let Ok(n) = rest.parse::<usize>() {
                // the instance is a function of the base seed only, so every
                // scheme and repetition of an experiment sees the same cities
                let mut rng = ChaCha8Rng::seed_from_u64(base_seed ^ 0x7473_7020_u64);
                let instance = TspInstance::random(n, &mut rng);
                Ok(AnyProblem::Tsp(TspProblem::new(instance, format!("tsp:{n}"))))
            } else {
                let text = std::fs::read_to_string(rest)
                    .with_context(|| format!("reading TSP matrix '{rest}'"))?;
                let instance = parse_tsp_matrix(&text)?;
                Ok(AnyProblem::Tsp(TspProblem::new(
                    instance,
                    format!("tsp:{}", file_label(rest)),
                )))
            }
        }
        "scp" => {
            let text = std::fs::read_to_string(rest)
                .with_context(|| format!("reading SCP instance '{rest}'"))?;
            let instance = parse_orlib_scp(&text)?;
            Ok(AnyProblem::Scp(ScpProblem::new(
                instance,
                format!("scp:{}", file_label(rest)),
            )))
        }
        "sat" => {
            let text = std::fs::read_to_string(rest)
                .with_context(|| format!("reading CNF '{rest}'"))?;
            let formula = parse_dimacs(&text)?;
            Ok(AnyProblem::Sat(SatProblem::new(
                formula,
                format!("sat:{}", file_label(rest)),
            )))
        }
        other => bail!("unknown problem kind '{other}'"),
    }
}

fn file_label(path: &str) -> String {
    Path::new(path)
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.to_string())
}

fn parse_metric(arg: &Option<String>, target: bool) -> Result<Metric> {
    match arg.as_deref() {
        None => Ok(if target { Metric::TimeToTarget } else { Metric::BestRaw }),
        Some("t") => Ok(Metric::TimeToTarget),
        Some("raw") => Ok(Metric::BestRaw),
        Some("fitness") => Ok(Metric::BestFitness),
        Some("cycles") => Ok(Metric::Cycles),
        Some(other) => bail!("unknown metric '{other}' (want t|raw|fitness|cycles)"),
    }
}

/// Comma list or inclusive `a..b` range.
fn parse_usize_list(text: &str) -> Result<Vec<usize>> {
    if let Some((a, b)) = text.split_once("..") {
        let a: usize = a.parse().context("bad range start")?;
        let b: usize = b.parse().context("bad range end")?;
        if a > b {
            bail!("empty range {a}..{b}");
        }
        Ok((a..=b).collect())
    } else {
        text.split(',')
            .map(|t| t.trim().parse().map_err(|_| anyhow::anyhow!("bad number '{t}'")))
            .collect()
    }
}

fn parse_f64_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| t.trim().parse().map_err(|_| anyhow::anyhow!("bad number '{t}'")))
        .collect()
}

const SUMMARY_HEADER: &str =
    "problem,selection,deletion,tour_k,capacity,pc,pm,base_seed,reps,metric,mean,sstd,stderr,ci95_low,ci95_high";

fn summary_row(summary: &ExperimentSummary) -> String {
    use steady_ea::io::format_g6 as g6;
    let first = &summary.records[0];
    let metric = match summary.metric {
        Metric::TimeToTarget => "t",
        Metric::BestRaw => "raw",
        Metric::BestFitness => "fitness",
        Metric::Cycles => "cycles",
    };
    let s = &summary.stats;
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        first.problem,
        first.selection,
        first.deletion,
        first.tournament_k.map_or(String::new(), |k| k.to_string()),
        first.capacity,
        g6(first.crossover_probability),
        g6(first.mutation_probability),
        first.seed,
        s.n,
        metric,
        g6(s.mean),
        g6(s.sample_std),
        g6(s.std_error),
        g6(s.ci95.0),
        g6(s.ci95.1),
    )
}

fn write_records(records: &[RunRecord], path: &PathBuf) -> Result<()> {
    let mut file =
        File::create(path).with_context(|| format!("creating '{}'", path.display()))?;
    write_run_csv(records, &mut file)?;
    Ok(())
}

fn cmd_run(args: &RunArgs) -> Result<()> {
    let problem = parse_problem(&args.engine.problem, args.engine.seed)?;
    match &problem {
        AnyProblem::Deceptive(p) => run_on(p, args),
        AnyProblem::Tsp(p) => run_on(p, args),
        AnyProblem::Scp(p) => run_on(p, args),
        AnyProblem::Sat(p) => run_on(p, args),
    }
}

fn run_on<P: Problem>(problem: &P, args: &RunArgs) -> Result<()> {
    let metric = parse_metric(&args.metric, args.stop.target)?;
    let spec = ExperimentSpec {
        config: args.engine.config(),
        stopping: args.stop.rule(),
        repetitions: args.reps,
        metric,
    };
    if args.trace || args.trace_out.is_some() {
        let (engine, rows) = run_traced(
            problem,
            &spec.config,
            &spec.stopping,
            &TraceConfig::default(),
        )?;
        match &args.trace_out {
            Some(path) => {
                let mut file = File::create(path)
                    .with_context(|| format!("creating '{}'", path.display()))?;
                write_trace_csv(&rows, &mut file)?;
            }
            None => {
                let mut stdout = std::io::stdout();
                write_trace_csv(&rows, &mut stdout)?;
            }
        }
        eprintln!(
            "traced run: {} cycles, best fitness {}",
            engine.cycles(),
            engine.best_fitness()
        );
    }
    let summary = run_experiment(problem, &spec)?;
    if let Some(path) = &args.out {
        write_records(&summary.records, path)?;
    }
    println!("{SUMMARY_HEADER}");
    println!("{}", summary_row(&summary));
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    let metric = parse_metric(&args.metric, args.stop.target)?;
    let tour_sizes = args
        .tour_sizes
        .as_deref()
        .map(parse_usize_list)
        .transpose()?;
    let deltas = args.deltas.as_deref().map(parse_f64_list).transpose()?;
    let pops = args.pops.as_deref().map(parse_usize_list).transpose()?;

    if tour_sizes.is_some() && args.engine.select != "tour" {
        bail!("--tour-sizes needs --select tour");
    }
    if deltas.is_some() && !args.engine.problem.starts_with("deceptive:") {
        bail!("--deltas only applies to deceptive problems");
    }

    let mut rows = vec![SUMMARY_HEADER.to_string()];
    for delta in deltas.clone().unwrap_or_else(|| vec![f64::NAN]) {
        let problem_id = if delta.is_nan() {
            args.engine.problem.clone()
        } else {
            let dims = args
                .engine
                .problem
                .split(':')
                .nth(1)
                .context("deceptive needs <dims>")?;
            format!("deceptive:{dims}:{delta}")
        };
        let problem = parse_problem(&problem_id, args.engine.seed)?;
        for &pop in pops.as_deref().unwrap_or(&[args.engine.pop]) {
            for k in tour_sizes.clone().unwrap_or_else(|| vec![0]) {
                let mut engine = args.engine.clone();
                engine.problem = problem_id.clone();
                engine.pop = pop;
                if k > 0 {
                    engine.select = format!("tour:{k}");
                }
                let spec = ExperimentSpec {
                    config: engine.config(),
                    stopping: args.stop.rule(),
                    repetitions: args.reps,
                    metric,
                };
                let summary = match &problem {
                    AnyProblem::Deceptive(p) => run_experiment(p, &spec)?,
                    AnyProblem::Tsp(p) => run_experiment(p, &spec)?,
                    AnyProblem::Scp(p) => run_experiment(p, &spec)?,
                    AnyProblem::Sat(p) => run_experiment(p, &spec)?,
                };
                rows.push(summary_row(&summary));
            }
        }
    }
    let text = rows.join("\n") + "\n";
    print!("{text}");
    if let Some(path) = &args.out {
        std::fs::write(path, &text)
            .with_context(|| format!("writing '{}'", path.display()))?;
    }
    Ok(())
}

fn cmd_treesim(args: &TreesimArgs) -> Result<()> {
    let model = TreeModel::build(args.levels, args.branch, args.species, args.p)?;
    let scheme = TreeScheme::parse(&args.scheme)?;
    let mut records = Vec::new();
    let mut cycles = Vec::new();
    let mut censored = 0usize;
    for r in 0..args.reps {
        let (hit, record) =
            simulate_hitting_record(&model, scheme, args.capacity, args.seed + r, args.max_cycles)?;
        if hit.censored {
            censored += 1;
        } else {
            cycles.push(hit.cycles as f64);
        }
        records.push(record);
    }
    let h = heuristic_times(args.levels, args.branch, args.species, args.p, args.capacity);
    use steady_ea::io::format_g6 as g6;
    println!(
        "heuristic,levels={},b={},s={},p={},capacity={}",
        args.levels, args.branch, args.species, args.p, args.capacity
    );
    println!(
        "t_rw,{},t_fuss,{},t_fuds,{},t_std,{}",
        g6(h.random_walk),
        g6(h.fuss),
        g6(h.fuds),
        g6(h.standard)
    );
    if !cycles.is_empty() {
        let stats = steady_ea::stats::summarize_stats(&cycles)?;
        println!(
            "empirical,scheme={},reps={},censored={},mean,{},stderr,{}",
            scheme.id(),
            args.reps,
            censored,
            g6(stats.mean),
            g6(stats.std_error)
        );
    } else {
        println!(
            "empirical,scheme={},reps={},censored={}",
            scheme.id(),
            args.reps,
            censored
        );
    }
    if let Some(path) = &args.out {
        write_records(&records, path)?;
    }
    Ok(())
}

fn cmd_hist(args: &HistArgs) -> Result<()> {
    let problem = parse_problem(&args.engine.problem, args.engine.seed)?;
    match &problem {
        AnyProblem::Deceptive(p) => hist_on(p, args),
        AnyProblem::Tsp(p) => hist_on(p, args),
        AnyProblem::Scp(p) => hist_on(p, args),
        AnyProblem::Sat(p) => hist_on(p, args),
    }
}

fn hist_on<P: Problem>(problem: &P, args: &HistArgs) -> Result<()> {
    let config = args.engine.config();
    let (engine, rows) = run_traced(
        problem,
        &config,
        &args.stop.rule(),
        &TraceConfig::default(),
    )?;
    let record = engine.record();
    let hist = fitness_histogram(
        engine.population(),
        problem.fitness_bounds(),
        config.effective_nbins(),
    );
    match &args.out {
        Some(path) => {
            let mut file =
                File::create(path).with_context(|| format!("creating '{}'", path.display()))?;
            write_histogram_csv(&hist, &mut file)?;
        }
        None => {
            let mut stdout = std::io::stdout();
            write_histogram_csv(&hist, &mut stdout)?;
        }
    }
    if let Some(path) = &args.trace_out {
        let mut file =
            File::create(path).with_context(|| format!("creating '{}'", path.display()))?;
        write_trace_csv(&rows, &mut file)?;
    }
    eprintln!(
        "run finished after {} cycles ({} generations), best fitness {}",
        record.cycles,
        steady_ea::io::format_g6(record.generations),
        steady_ea::io::format_g6(record.best_fitness)
    );
    Ok(())
}

fn cmd_schemes() {
    let registry = SchemeRegistry::builtin();
    println!("selection schemes:");
    for (name, summary) in registry.selection_names() {
        println!("  {name:8} {summary}");
    }
    println!("deletion schemes:");
    for (name, summary) in registry.deletion_names() {
        println!("  {name:8} {summary}");
    }
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Treesim(args) => cmd_treesim(args),
        Command::Hist(args) => cmd_hist(args),
        Command::Schemes => {
            cmd_schemes();
            Ok(())
        }
    };
    if let Err(err) = result {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
