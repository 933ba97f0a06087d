//! Problem bindings: everything the engine needs to know about one
//! optimization problem, bundled behind the [`Problem`] trait.

pub mod deceptive;
pub mod sat;
pub mod scp;
pub mod tsp;

use rand::RngCore;
use thiserror::Error;

pub use deceptive::DeceptiveProblem;
pub use sat::{Assignment, CnfFormula, SatProblem};
pub use scp::{ScpInstance, ScpProblem, ScpSelection};
pub use tsp::{TspInstance, TspProblem, TspTour};

#[derive(Debug, Error, PartialEq)]
pub enum ProblemError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("tour is not a permutation of the cities")]
    NotAPermutation,
    #[error("selection does not cover every row")]
    InfeasibleSelection,
    #[error("assignment length {got} does not match variable count {want}")]
    AssignmentLength { got: usize, want: usize },
    #[error("infeasible instance: {0}")]
    InfeasibleInstance(String),
}

/// One optimization problem: genome sampling, variation operators, fitness,
/// bounds, and the optional target predicate.
///
/// `fitness` must stay inside `fitness_bounds` for every genome the other
/// handles can produce, and operators must uphold the genome's structural
/// invariants (permutations stay permutations, cover selections stay
/// feasible).
pub trait Problem: Sync {
    type Genome: Clone + Send;

    /// Identifier used in run records, e.g. `deceptive:2:0.1`.
    fn id(&self) -> String;

    fn random_genome(&self, rng: &mut dyn RngCore) -> Self::Genome;

    fn mutate(&self, genome: &Self::Genome, rng: &mut dyn RngCore) -> Self::Genome;

    fn crossover(
        &self,
        a: &Self::Genome,
        b: &Self::Genome,
        rng: &mut dyn RngCore,
    ) -> Self::Genome;

    fn fitness(&self, genome: &Self::Genome) -> f64;

    fn fitness_bounds(&self) -> (f64, f64);

    /// Whether `fitness` solves the problem. Defaults to "never", for
    /// problems whose optimum is unknown.
    fn target_reached(&self, fitness: f64) -> bool {
        let _ = fitness;
        false
    }

    /// Maps fitness back to the natural reporting unit (tour length, cover
    /// cost, satisfied clauses). Identity unless the fitness is a transform.
    fn raw_metric(&self, fitness: f64) -> f64 {
        fitness
    }

    /// Hamming distance between genomes, for diversity statistics. `None`
    /// when the genome has no natural bitwise reading.
    fn hamming(&self, a: &Self::Genome, b: &Self::Genome) -> Option<u64> {
        let _ = (a, b);
        None
    }
}
