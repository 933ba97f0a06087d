//! The steady-state optimization loop.
//!
//! Each cycle selects one parent (two when crossover fires), creates exactly
//! one child, inserts it, and — once the population is at capacity — removes
//! one member chosen by the deletion scheme, restoring the size. Populations
//! seeded below capacity grow one member per cycle until they reach it.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::population::{BinConfig, MemberId, Population};
use crate::problems::Problem;
use crate::schemes::{DeletionScheme, SchemeError, SchemeRegistry, SelectionScheme, StepContext};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("crossover probability {0} outside [0, 1]")]
    BadCrossoverProbability(f64),
    #[error("mutation probability {0} outside [0, 1]")]
    BadMutationProbability(f64),
    #[error("capacity must be at least 1")]
    BadCapacity,
    #[error("initial size must be in 1..=capacity, got {initial} with capacity {capacity}")]
    BadInitialSize { initial: usize, capacity: usize },
    #[error(transparent)]
    Scheme(#[from] SchemeError),
}

/// Parameters of one steady-state run.
#[derive(Debug, Clone)]
pub struct EngineConfig {
    pub crossover_probability: f64,
    pub mutation_probability: f64,
    pub capacity: usize,
    pub initial_size: usize,
    /// Selection scheme id, resolved through the registry.
    pub selection: String,
    /// Deletion scheme id, resolved through the registry.
    pub deletion: String,
    /// Fitness bins maintained for FUDS/SID and histograms; defaults to
    /// `round(sqrt(capacity))`.
    pub nbins: Option<usize>,
    pub seed: u64,
}

impl EngineConfig {
    pub fn new(selection: &str, deletion: &str, capacity: usize) -> Self {
        EngineConfig {
            crossover_probability: 0.5,
            mutation_probability: 0.5,
            capacity,
            initial_size: capacity,
            selection: selection.to_string(),
            deletion: deletion.to_string(),
            nbins: None,
            seed: 0,
        }
    }

    pub fn effective_nbins(&self) -> usize {
        self.nbins
            .unwrap_or_else(|| (self.capacity as f64).sqrt().round() as usize)
            .max(1)
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if !(0.0..=1.0).contains(&self.crossover_probability) {
            return Err(EngineError::BadCrossoverProbability(
                self.crossover_probability,
            ));
        }
        if !(0.0..=1.0).contains(&self.mutation_probability) {
            return Err(EngineError::BadMutationProbability(
                self.mutation_probability,
            ));
        }
        if self.capacity < 1 {
            return Err(EngineError::BadCapacity);
        }
        if self.initial_size < 1 || self.initial_size > self.capacity {
            return Err(EngineError::BadInitialSize {
                initial: self.initial_size,
                capacity: self.capacity,
            });
        }
        Ok(())
    }
}

/// What happened in one cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub child_fitness: f64,
    pub used_crossover: bool,
    /// Present iff the population was at capacity before the insertion.
    pub deleted_fitness: Option<f64>,
    pub cycle_index: u64,
}

/// When to stop a run. Any satisfied clause stops it; the cycle cap is
/// mandatory so every rule set terminates.
#[derive(Debug, Clone, Copy)]
pub struct StoppingRule {
    pub fixed_generations: Option<f64>,
    pub stall_generations: Option<f64>,
    pub target_fitness: bool,
    pub max_cycles: u64,
}

impl StoppingRule {
    pub fn max_cycles(cap: u64) -> Self {
        StoppingRule {
            fixed_generations: None,
            stall_generations: None,
            target_fitness: false,
            max_cycles: cap,
        }
    }

    pub fn target(cap: u64) -> Self {
        StoppingRule {
            target_fitness: true,
            ..StoppingRule::max_cycles(cap)
        }
    }

    pub fn fixed_generations(generations: f64, cap: u64) -> Self {
        StoppingRule {
            fixed_generations: Some(generations),
            ..StoppingRule::max_cycles(cap)
        }
    }

    pub fn stall_generations(generations: f64, cap: u64) -> Self {
        StoppingRule {
            stall_generations: Some(generations),
            ..StoppingRule::max_cycles(cap)
        }
    }
}

/// Number of generations spanned by `cycles` steady-state cycles: one
/// generation is population-size many cycles.
pub fn generations_of(cycles: u64, pop_size: usize) -> f64 {
    assert!(pop_size >= 1, "population size must be positive");
    cycles as f64 / pop_size as f64
}

/// Outcome of one run, in the shape the CSV writers expect.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub problem: String,
    pub selection: String,
    pub deletion: String,
    pub tournament_k: Option<usize>,
    pub capacity: usize,
    pub crossover_probability: f64,
    pub mutation_probability: f64,
    pub seed: u64,
    pub cycles: u64,
    pub generations: f64,
    pub best_fitness: f64,
    pub best_raw: f64,
    /// Created individuals (fitness evaluations) until the first one that
    /// reached the target, counting the initial seeding.
    pub t_target: Option<u64>,
}

/// A run in progress. Owns its population and RNG; runs are independent and
/// may execute on separate threads.
pub struct Engine<'p, P: Problem> {
    problem: &'p P,
    population: Population<P::Genome>,
    selection: Box<dyn SelectionScheme>,
    deletion: Box<dyn DeletionScheme>,
    rng: ChaCha8Rng,
    crossover_probability: f64,
    mutation_probability: f64,
    capacity: usize,
    seed: u64,
    cycles: u64,
    created: u64,
    best_fitness: f64,
    best_cycle: u64,
    t_target: Option<u64>,
}

impl<'p, P: Problem> Engine<'p, P> {
    /// Builds the engine and seeds the population with
    /// `config.initial_size` random genomes.
    pub fn new(problem: &'p P, config: &EngineConfig) -> Result<Self, EngineError> {
        let registry = SchemeRegistry::builtin();
        let selection = registry.selection(&config.selection)?;
        let deletion = registry.deletion(&config.deletion)?;
        Engine::with_schemes(problem, config, selection, deletion)
    }

    /// Like [`Engine::new`] but with pre-built scheme objects, for schemes
    /// outside the registry.
    pub fn with_schemes(
        problem: &'p P,
        config: &EngineConfig,
        selection: Box<dyn SelectionScheme>,
        deletion: Box<dyn DeletionScheme>,
    ) -> Result<Self, EngineError> {
        config.validate()?;
        let bounds = problem.fitness_bounds();
        let bins = BinConfig::new(bounds, config.effective_nbins());
        let mut engine = Engine {
            problem,
            population: Population::new(Some(config.capacity), Some(bins)),
            selection,
            deletion,
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            crossover_probability: config.crossover_probability,
            mutation_probability: config.mutation_probability,
            capacity: config.capacity,
            seed: config.seed,
            cycles: 0,
            created: 0,
            best_fitness: f64::NEG_INFINITY,
            best_cycle: 0,
            t_target: None,
        };
        for _ in 0..config.initial_size {
            let genome = engine.problem.random_genome(&mut engine.rng);
            engine.admit(genome);
        }
        Ok(engine)
    }

    fn admit(&mut self, genome: P::Genome) -> (MemberId, f64) {
        let fitness = self.problem.fitness(&genome);
        self.created += 1;
        if fitness > self.best_fitness {
            self.best_fitness = fitness;
            self.best_cycle = self.cycles;
        }
        if self.t_target.is_none() && self.problem.target_reached(fitness) {
            self.t_target = Some(self.created);
        }
        (self.population.insert(genome, fitness), fitness)
    }

    /// One steady-state cycle: breed, insert, delete if at capacity.
    pub fn step(&mut self) -> StepReport {
        assert!(!self.population.is_empty(), "population is empty");
        let at_capacity = self.population.len() == self.capacity;
        let used_crossover = self.rng.gen::<f64>() < self.crossover_probability;
        let (parent, child_genome) = if used_crossover {
            let (a, b) = self
                .selection
                .select_parents(self.population.index(), &mut self.rng);
            let mut child =
                self.problem
                    .crossover(self.population.genome(a), self.population.genome(b), &mut self.rng);
            if self.rng.gen::<f64>() < self.mutation_probability {
                child = self.problem.mutate(&child, &mut self.rng);
            }
            (a, child)
        } else {
            // without crossover the child is always mutated, so a clone is
            // never inserted
            let a = self.selection.select(self.population.index(), &mut self.rng);
            let child = self.problem.mutate(self.population.genome(a), &mut self.rng);
            (a, child)
        };
        let (child, child_fitness) = self.admit(child_genome);
        let deleted_fitness = if at_capacity {
            let ctx = StepContext { child, parent };
            let victim = self
                .deletion
                .choose_victim(self.population.index(), &ctx, &mut self.rng);
            Some(self.population.remove(victim).fitness)
        } else {
            None
        };
        let report = StepReport {
            child_fitness,
            used_crossover,
            deleted_fitness,
            cycle_index: self.cycles,
        };
        self.cycles += 1;
        report
    }

    pub fn should_stop(&self, rule: &StoppingRule) -> bool {
        if self.cycles >= rule.max_cycles {
            return true;
        }
        if rule.target_fitness && self.t_target.is_some() {
            return true;
        }
        if let Some(g) = rule.fixed_generations {
            if self.cycles as f64 >= g * self.capacity as f64 {
                return true;
            }
        }
        if let Some(s) = rule.stall_generations {
            if (self.cycles - self.best_cycle) as f64 >= s * self.capacity as f64 {
                return true;
            }
        }
        false
    }

    /// Runs until the stopping rule fires.
    pub fn run(&mut self, rule: &StoppingRule) {
        while !self.should_stop(rule) {
            self.step();
        }
    }

    pub fn population(&self) -> &Population<P::Genome> {
        &self.population
    }

    pub fn cycles(&self) -> u64 {
        self.cycles
    }

    pub fn created(&self) -> u64 {
        self.created
    }

    pub fn best_fitness(&self) -> f64 {
        self.best_fitness
    }

    pub fn t_target(&self) -> Option<u64> {
        self.t_target
    }

    pub fn record(&self) -> RunRecord {
        let selection = self.selection.id();
        let tournament_k = selection
            .strip_prefix("tour:")
            .and_then(|k| k.parse().ok());
        RunRecord {
            problem: self.problem.id(),
            selection,
            deletion: self.deletion.id(),
            tournament_k,
            capacity: self.capacity,
            crossover_probability: self.crossover_probability,
            mutation_probability: self.mutation_probability,
            seed: self.seed,
            cycles: self.cycles,
            generations: generations_of(self.cycles, self.capacity),
            best_fitness: self.best_fitness,
            best_raw: self.problem.raw_metric(self.best_fitness),
            t_target: self.t_target,
        }
    }
}

/// Seeds, runs, and reports one complete run.
pub fn run<P: Problem>(
    problem: &P,
    config: &EngineConfig,
    rule: &StoppingRule,
) -> Result<RunRecord, EngineError> {
    let mut engine = Engine::new(problem, config)?;
    engine.run(rule);
    Ok(engine.record())
}
