//! Maximum CNF satisfiability.
//!
//! Fitness is the number of satisfied clauses. Mutation flips one variable;
//! crossover picks each variable's state from a uniformly chosen parent.

use rand::Rng;
use rand::RngCore;

use super::{Problem, ProblemError};

/// CNF formula as signed 1-based literals, clauses of any width.
#[derive(Debug, Clone, PartialEq)]
pub struct CnfFormula {
    pub n_vars: usize,
    pub clauses: Vec<Vec<i32>>,
}

impl CnfFormula {
    pub fn new(n_vars: usize, clauses: Vec<Vec<i32>>) -> Result<Self, ProblemError> {
        for (i, clause) in clauses.iter().enumerate() {
            if clause.is_empty() {
                return Err(ProblemError::InvalidParameter(format!(
                    "clause {i} is empty"
                )));
            }
            for &lit in clause {
                let var = lit.unsigned_abs() as usize;
                if lit == 0 || var > n_vars {
                    return Err(ProblemError::InvalidParameter(format!(
                        "literal {lit} out of range in clause {i}"
                    )));
                }
            }
        }
        Ok(CnfFormula { n_vars, clauses })
    }

    pub fn clause_count(&self) -> usize {
        self.clauses.len()
    }
}

/// One boolean per variable.
pub type Assignment = Vec<bool>;

/// Count of clauses with at least one true literal.
pub fn sat_fitness(assignment: &Assignment, formula: &CnfFormula) -> Result<u32, ProblemError> {
    if assignment.len() != formula.n_vars {
        return Err(ProblemError::AssignmentLength {
            got: assignment.len(),
            want: formula.n_vars,
        });
    }
    let mut satisfied = 0;
    for clause in &formula.clauses {
        if clause.iter().any(|&lit| {
            let value = assignment[(lit.unsigned_abs() - 1) as usize];
            if lit > 0 {
                value
            } else {
                !value
            }
        }) {
            satisfied += 1;
        }
    }
    Ok(satisfied)
}

/// Negates one uniformly chosen variable.
pub fn sat_flip_mutate(assignment: &Assignment, rng: &mut dyn RngCore) -> Assignment {
    let mut child = assignment.clone();
    let i = rng.gen_range(0..child.len());
    child[i] = !child[i];
    child
}

/// Per-variable independent choice of which parent's state to take.
pub fn sat_uniform_crossover(
    a: &Assignment,
    b: &Assignment,
    rng: &mut dyn RngCore,
) -> Assignment {
    assert_eq!(a.len(), b.len(), "assignment lengths differ");
    a.iter()
        .zip(b)
        .map(|(&x, &y)| if rng.gen::<bool>() { x } else { y })
        .collect()
}

#[derive(Debug, Clone)]
pub struct SatProblem {
    formula: CnfFormula,
    label: String,
}

impl SatProblem {
    pub fn new(formula: CnfFormula, label: impl Into<String>) -> Self {
        SatProblem {
            formula,
            label: label.into(),
        }
    }

    pub fn formula(&self) -> &CnfFormula {
        &self.formula
    }
}

impl Problem for SatProblem {
    type Genome = Assignment;

    fn id(&self) -> String {
        self.label.clone()
    }

    fn random_genome(&self, rng: &mut dyn RngCore) -> Assignment {
        (0..self.formula.n_vars).map(|_| rng.gen::<bool>()).collect()
    }

    fn mutate(&self, genome: &Assignment, rng: &mut dyn RngCore) -> Assignment {
        sat_flip_mutate(genome, rng)
    }

    fn crossover(&self, a: &Assignment, b: &Assignment, rng: &mut dyn RngCore) -> Assignment {
        sat_uniform_crossover(a, b, rng)
    }

    fn fitness(&self, genome: &Assignment) -> f64 {
        sat_fitness(genome, &self.formula).expect("assignment length fixed by the problem") as f64
    }

    fn fitness_bounds(&self) -> (f64, f64) {
        (0.0, self.formula.clause_count() as f64)
    }

    fn target_reached(&self, fitness: f64) -> bool {
        fitness >= self.formula.clause_count() as f64
    }

    fn hamming(&self, a: &Assignment, b: &Assignment) -> Option<u64> {
        Some(a.iter().zip(b).filter(|(x, y)| x != y).count() as u64)
    }
}
