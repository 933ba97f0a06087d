//! Repetition harness: runs an engine configuration R times with seeds
//! `base, base+1, ...`, in parallel, and summarizes one designated metric.

use rayon::prelude::*;
use thiserror::Error;

use crate::diversity::{diversity_high_fitness, diversity_total};
use crate::engine::{Engine, EngineConfig, EngineError, RunRecord, StoppingRule};
use crate::problems::Problem;
use crate::stats::{summarize_stats, StatsError, SummaryStats};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("{count} of {total} runs never reached the target; raise max_cycles")]
    CensoredRuns { count: usize, total: usize },
}

/// Which per-run value the summary aggregates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// Created individuals until the first target hit (scaling studies).
    TimeToTarget,
    /// Final best in natural units: tour length, cover cost, clauses.
    BestRaw,
    BestFitness,
    Cycles,
}

impl Metric {
    fn extract(&self, record: &RunRecord) -> Option<f64> {
        match self {
            Metric::TimeToTarget => record.t_target.map(|t| t as f64),
            Metric::BestRaw => Some(record.best_raw),
            Metric::BestFitness => Some(record.best_fitness),
            Metric::Cycles => Some(record.cycles as f64),
        }
    }
}

/// One experiment: a problem, an engine configuration (its seed is the base
/// seed), a stopping rule, and a repetition count.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub config: EngineConfig,
    pub stopping: StoppingRule,
    pub repetitions: usize,
    pub metric: Metric,
}

#[derive(Debug, Clone)]
pub struct ExperimentSummary {
    pub records: Vec<RunRecord>,
    pub metric: Metric,
    pub stats: SummaryStats,
}

/// Runs the repetitions (in parallel; repetition r uses seed base + r) and
/// summarizes the metric. Time-to-target experiments fail loudly when any
/// run was censored by the cycle cap.
pub fn run_experiment<P: Problem>(
    problem: &P,
    spec: &ExperimentSpec,
) -> Result<ExperimentSummary, ExperimentError> {
    spec.config.validate()?;
    let records: Vec<RunRecord> = (0..spec.repetitions)
        .into_par_iter()
        .map(|r| {
            let mut config = spec.config.clone();
            config.seed = spec.config.seed.wrapping_add(r as u64);
            crate::engine::run(problem, &config, &spec.stopping).expect("config validated")
        })
        .collect();
    summarize_records(records, spec.metric)
}

pub fn summarize_records(
    records: Vec<RunRecord>,
    metric: Metric,
) -> Result<ExperimentSummary, ExperimentError> {
    let values: Vec<f64> = records.iter().filter_map(|r| metric.extract(r)).collect();
    if values.len() != records.len() {
        return Err(ExperimentError::CensoredRuns {
            count: records.len() - values.len(),
            total: records.len(),
        });
    }
    let stats = summarize_stats(&values)?;
    Ok(ExperimentSummary {
        records,
        metric,
        stats,
    })
}

/// One sampled point of a run trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub generation: f64,
    /// Best-so-far fitness, not the instantaneous population maximum.
    pub best_fitness: f64,
    pub total_diversity: Option<f64>,
    pub total_sampled: Option<bool>,
    pub highfit_diversity: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct TraceConfig {
    /// Cycles between samples; defaults to one generation (the capacity).
    pub cadence_cycles: Option<u64>,
    /// High-fitness window in fitness units.
    pub window: f64,
}

impl Default for TraceConfig {
    fn default() -> Self {
        TraceConfig {
            cadence_cycles: None,
            window: 20.0,
        }
    }
}

/// A single run that samples best-so-far fitness and population diversity
/// every trace interval. Diversity columns stay empty for genomes without
/// hamming support. The finished engine comes back so callers can inspect
/// the final population.
pub fn run_traced<'p, P: Problem>(
    problem: &'p P,
    config: &EngineConfig,
    stopping: &StoppingRule,
    trace: &TraceConfig,
) -> Result<(Engine<'p, P>, Vec<TraceRow>), ExperimentError> {
    let mut engine = Engine::new(problem, config)?;
    let cadence = trace.cadence_cycles.unwrap_or(config.capacity as u64).max(1);
    let mut rows = Vec::new();
    let mut sample_rng = rand::SeedableRng::seed_from_u64(config.seed ^ 0x9e3779b97f4a7c15);
    let sample = |engine: &Engine<P>, rows: &mut Vec<TraceRow>,
                  rng: &mut rand_chacha::ChaCha8Rng| {
        let total = diversity_total(problem, engine.population(), rng).ok();
        let high = diversity_high_fitness(problem, engine.population(), trace.window, rng)
            .ok()
            .flatten();
        rows.push(TraceRow {
            generation: crate::engine::generations_of(engine.cycles(), config.capacity),
            best_fitness: engine.best_fitness(),
            total_diversity: total.map(|d| d.value),
            total_sampled: total.map(|d| d.sampled),
            highfit_diversity: high.map(|d| d.value),
        });
    };
    sample(&engine, &mut rows, &mut sample_rng);
    while !engine.should_stop(stopping) {
        engine.step();
        if engine.cycles() % cadence == 0 {
            sample(&engine, &mut rows, &mut sample_rng);
        }
    }
    Ok((engine, rows))
}
