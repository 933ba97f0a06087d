//! Set covering problem with greedy repair.
//!
//! A genome is a column subset; infeasible subsets never leave the operators
//! because every mutation and crossover ends with a repair pass: greedy
//! completion by minimal cost per newly covered row, then redundancy removal
//! in decreasing-cost order. Fitness is the reciprocal cover cost.

use rand::Rng;
use rand::RngCore;

use super::{Problem, ProblemError};

#[derive(Debug, Clone, PartialEq)]
pub struct ScpInstance {
    rows: usize,
    cols: usize,
    costs: Vec<f64>,
    /// Columns covering each row.
    row_cover: Vec<Vec<u32>>,
    /// Rows covered by each column.
    col_rows: Vec<Vec<u32>>,
}

impl ScpInstance {
    pub fn new(
        rows: usize,
        cols: usize,
        costs: Vec<f64>,
        row_cover: Vec<Vec<u32>>,
    ) -> Result<Self, ProblemError> {
        if costs.len() != cols {
            return Err(ProblemError::InvalidParameter(format!(
                "{} costs for {} columns",
                costs.len(),
                cols
            )));
        }
        if row_cover.len() != rows {
            return Err(ProblemError::InvalidParameter(format!(
                "{} cover lists for {} rows",
                row_cover.len(),
                rows
            )));
        }
        if let Some(c) = costs.iter().find(|&&c| c <= 0.0) {
            return Err(ProblemError::InvalidParameter(format!(
                "all costs must be positive, found {c}"
            )));
        }
        let mut col_rows = vec![Vec::new(); cols];
        for (r, cover) in row_cover.iter().enumerate() {
            if cover.is_empty() {
                return Err(ProblemError::InfeasibleInstance(format!(
                    "row {r} has no covering column"
                )));
            }
            for &c in cover {
                if c as usize >= cols {
                    return Err(ProblemError::InvalidParameter(format!(
                        "row {r} lists column {c} out of range"
                    )));
                }
                col_rows[c as usize].push(r as u32);
            }
        }
        Ok(ScpInstance {
            rows,
            cols,
            costs,
            row_cover,
            col_rows,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn cost(&self, col: usize) -> f64 {
        self.costs[col]
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn row_cover(&self, row: usize) -> &[u32] {
        &self.row_cover[row]
    }

    pub fn col_rows(&self, col: usize) -> &[u32] {
        &self.col_rows[col]
    }
}

/// Column subset; `chosen[j]` is the x_j indicator.
#[derive(Debug, Clone, PartialEq)]
pub struct ScpSelection {
    pub chosen: Vec<bool>,
}

impl ScpSelection {
    pub fn empty(cols: usize) -> Self {
        ScpSelection {
            chosen: vec![false; cols],
        }
    }

    pub fn total_cost(&self, instance: &ScpInstance) -> f64 {
        self.chosen
            .iter()
            .enumerate()
            .filter(|(_, &on)| on)
            .map(|(j, _)| instance.cost(j))
            .sum()
    }

    pub fn is_feasible(&self, instance: &ScpInstance) -> bool {
        coverage(self, instance).iter().all(|&c| c > 0)
    }
}

fn coverage(sel: &ScpSelection, instance: &ScpInstance) -> Vec<u32> {
    let mut cover = vec![0u32; instance.rows()];
    for (j, &on) in sel.chosen.iter().enumerate() {
        if on {
            for &r in instance.col_rows(j) {
                cover[r as usize] += 1;
            }
        }
    }
    cover
}

/// Reciprocal cover cost; errors when the selection leaves a row uncovered.
pub fn scp_fitness(sel: &ScpSelection, instance: &ScpInstance) -> Result<f64, ProblemError> {
    if !sel.is_feasible(instance) {
        return Err(ProblemError::InfeasibleSelection);
    }
    Ok(1.0 / sel.total_cost(instance))
}

/// Greedy repair: add columns by minimal cost per newly covered row until
/// feasible, then drop redundant columns in decreasing-cost order. A column
/// is redundant when every row it covers is covered by another chosen column.
pub fn scp_repair(sel: &ScpSelection, instance: &ScpInstance) -> ScpSelection {
    let mut out = sel.clone();
    let mut cover = coverage(&out, instance);
    while let Some(uncovered) = cover.iter().position(|&c| c == 0) {
        let _ = uncovered;
        let mut best: Option<(f64, usize)> = None;
        for j in 0..instance.cols() {
            if out.chosen[j] {
                continue;
            }
            let newly = instance
                .col_rows(j)
                .iter()
                .filter(|&&r| cover[r as usize] == 0)
                .count();
            if newly == 0 {
                continue;
            }
            let ratio = instance.cost(j) / newly as f64;
            if best.map_or(true, |(b, _)| ratio < b) {
                best = Some((ratio, j));
            }
        }
        let (_, j) = best.expect("instance feasibility guarantees a covering column");
        out.chosen[j] = true;
        for &r in instance.col_rows(j) {
            cover[r as usize] += 1;
        }
    }
    // redundancy pass, most expensive first
    let mut chosen: Vec<usize> = (0..instance.cols()).filter(|&j| out.chosen[j]).collect();
    chosen.sort_by(|&a, &b| {
        instance
            .cost(b)
            .partial_cmp(&instance.cost(a))
            .unwrap()
            .then(a.cmp(&b))
    });
    for j in chosen {
        if instance
            .col_rows(j)
            .iter()
            .all(|&r| cover[r as usize] >= 2)
        {
            out.chosen[j] = false;
            for &r in instance.col_rows(j) {
                cover[r as usize] -= 1;
            }
        }
    }
    out
}

/// Flips one uniformly chosen column, then repairs.
pub fn scp_mutate(sel: &ScpSelection, instance: &ScpInstance, rng: &mut dyn RngCore) -> ScpSelection {
    let mut out = sel.clone();
    let j = rng.gen_range(0..instance.cols());
    out.chosen[j] = !out.chosen[j];
    scp_repair(&out, instance)
}

/// Fusion crossover: columns in both parents are kept, columns in one parent
/// are kept with probability one half, then repair.
pub fn scp_crossover(
    a: &ScpSelection,
    b: &ScpSelection,
    instance: &ScpInstance,
    rng: &mut dyn RngCore,
) -> ScpSelection {
    let mut out = ScpSelection::empty(instance.cols());
    for j in 0..instance.cols() {
        out.chosen[j] = match (a.chosen[j], b.chosen[j]) {
            (true, true) => true,
            (false, false) => false,
            _ => rng.gen::<bool>(),
        };
    }
    scp_repair(&out, instance)
}

#[derive(Debug, Clone)]
pub struct ScpProblem {
    instance: ScpInstance,
    label: String,
}

impl ScpProblem {
    pub fn new(instance: ScpInstance, label: impl Into<String>) -> Self {
        ScpProblem {
            instance,
            label: label.into(),
        }
    }

    pub fn instance(&self) -> &ScpInstance {
        &self.instance
    }
}

impl Problem for ScpProblem {
    type Genome = ScpSelection;

    fn id(&self) -> String {
        self.label.clone()
    }

    fn random_genome(&self, rng: &mut dyn RngCore) -> ScpSelection {
        let mut sel = ScpSelection::empty(self.instance.cols());
        for j in 0..self.instance.cols() {
            sel.chosen[j] = rng.gen::<bool>();
        }
        scp_repair(&sel, &self.instance)
    }

    fn mutate(&self, genome: &ScpSelection, rng: &mut dyn RngCore) -> ScpSelection {
        scp_mutate(genome, &self.instance, rng)
    }

    fn crossover(
        &self,
        a: &ScpSelection,
        b: &ScpSelection,
        rng: &mut dyn RngCore,
    ) -> ScpSelection {
        scp_crossover(a, b, &self.instance, rng)
    }

    fn fitness(&self, genome: &ScpSelection) -> f64 {
        scp_fitness(genome, &self.instance).expect("operators repair to feasibility")
    }

    fn fitness_bounds(&self) -> (f64, f64) {
        let all: f64 = self.instance.costs().iter().sum();
        let cheapest = self
            .instance
            .costs()
            .iter()
            .fold(f64::INFINITY, |a, &b| a.min(b));
        (1.0 / all, 1.0 / cheapest)
    }

    fn raw_metric(&self, fitness: f64) -> f64 {
        1.0 / fitness
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Two rows: c0 covers {r0} at cost 1, c1 covers {r1} at cost 1,
    /// c2 covers both at cost 3.
    fn toy() -> ScpInstance {
        ScpInstance::new(2, 3, vec![1.0, 1.0, 3.0], vec![vec![0, 2], vec![1, 2]]).unwrap()
    }

    #[test]
    fn repair_completes_greedily() {
        let inst = toy();
        let repaired = scp_repair(&ScpSelection::empty(3), &inst);
        // ratios 1, 1, 1.5: the two unit columns win
        assert_eq!(repaired.chosen, vec![true, true, false]);
        assert!((repaired.total_cost(&inst) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn repair_prunes_redundant_columns() {
        let inst = toy();
        let all = ScpSelection {
            chosen: vec![true, true, true],
        };
        let repaired = scp_repair(&all, &inst);
        assert_eq!(repaired.chosen, vec![true, true, false]);
    }

    #[test]
    fn repair_leaves_irredundant_selections_alone() {
        let inst = toy();
        let sel = ScpSelection {
            chosen: vec![false, false, true],
        };
        assert_eq!(scp_repair(&sel, &inst), sel);
    }

    #[test]
    fn fitness_is_reciprocal_cost() {
        let inst = ScpInstance::new(
            2,
            3,
            vec![3.0, 5.0, 4.0],
            vec![vec![0, 1], vec![1, 2]],
        )
        .unwrap();
        let sel = ScpSelection {
            chosen: vec![true, false, true],
        };
        assert!((scp_fitness(&sel, &inst).unwrap() - 1.0 / 7.0).abs() < 1e-12);
        let empty = ScpSelection::empty(3);
        assert_eq!(
            scp_fitness(&empty, &inst).unwrap_err(),
            ProblemError::InfeasibleSelection
        );
    }

    #[test]
    fn operators_always_land_feasible_and_irredundant() {
        let inst = toy();
        let problem = ScpProblem::new(inst, "scp:toy");
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut current = problem.random_genome(&mut rng);
        for i in 0..2_000 {
            let next = if i % 3 == 0 {
                let other = problem.random_genome(&mut rng);
                problem.crossover(&current, &other, &mut rng)
            } else {
                problem.mutate(&current, &mut rng)
            };
            assert!(next.is_feasible(problem.instance()));
            // irredundant: no chosen column removable
            for j in 0..3 {
                if next.chosen[j] {
                    let mut without = next.clone();
                    without.chosen[j] = false;
                    assert!(
                        !without.is_feasible(problem.instance()),
                        "column {j} is redundant in {:?}",
                        next.chosen
                    );
                }
            }
            current = next;
        }
    }

    #[test]
    fn rejects_uncoverable_rows() {
        assert!(matches!(
            ScpInstance::new(2, 2, vec![1.0, 1.0], vec![vec![0], vec![]]),
            Err(ProblemError::InfeasibleInstance(_))
        ));
    }
}
