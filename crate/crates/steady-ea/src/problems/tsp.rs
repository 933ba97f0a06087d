//! Random-distance traveling salesman problem.
//!
//! Distances between city pairs are independent uniform draws from `[0, 1]`,
//! which deliberately breaks the triangle inequality and makes the landscape
//! deceptive. Fitness is the reciprocal tour length. Mutation swaps two
//! cities; crossover is partially mapped crossover (PMX).

use rand::Rng;
use rand::RngCore;

use super::{Problem, ProblemError};

/// Symmetric distance matrix with zero diagonal, entries in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TspInstance {
    n: usize,
    dist: Vec<f64>,
}

impl TspInstance {
    /// One uniform draw per unordered pair, mirrored symmetrically.
    pub fn random(n: usize, rng: &mut dyn RngCore) -> Self {
        assert!(n >= 2, "need at least 2 cities");
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let d = rng.gen::<f64>();
                dist[i * n + j] = d;
                dist[j * n + i] = d;
            }
        }
        TspInstance { n, dist }
    }

    pub fn from_matrix(rows: Vec<Vec<f64>>) -> Result<Self, ProblemError> {
        let n = rows.len();
        if n < 2 {
            return Err(ProblemError::InvalidParameter(
                "need at least 2 cities".to_string(),
            ));
        }
        let mut dist = vec![0.0; n * n];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(ProblemError::InvalidParameter(format!(
                    "row {i} has {} entries, want {n}",
                    row.len()
                )));
            }
            for (j, &d) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&d) {
                    return Err(ProblemError::InvalidParameter(format!(
                        "distance [{i}][{j}] = {d} outside [0, 1]"
                    )));
                }
                dist[i * n + j] = d;
            }
        }
        for i in 0..n {
            if dist[i * n + i] != 0.0 {
                return Err(ProblemError::InvalidParameter(format!(
                    "diagonal [{i}][{i}] must be zero"
                )));
            }
            for j in 0..n {
                if dist[i * n + j] != dist[j * n + i] {
                    return Err(ProblemError::InvalidParameter(format!(
                        "matrix not symmetric at [{i}][{j}]"
                    )));
                }
            }
        }
        Ok(TspInstance { n, dist })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    /// Cycle length of a tour; errors when the order is not a permutation.
    pub fn tour_length(&self, tour: &TspTour) -> Result<f64, ProblemError> {
        if !tour.is_permutation(self.n) {
            return Err(ProblemError::NotAPermutation);
        }
        let order = &tour.order;
        let mut total = 0.0;
        for k in 0..self.n {
            total += self.distance(order[k] as usize, order[(k + 1) % self.n] as usize);
        }
        Ok(total)
    }
}

/// Hamiltonian cycle as a visiting order of cities `0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct TspTour {
    pub order: Vec<u32>,
}

impl TspTour {
    pub fn identity(n: usize) -> Self {
        TspTour {
            order: (0..n as u32).collect(),
        }
    }

    pub fn is_permutation(&self, n: usize) -> bool {
        if self.order.len() != n {
            return false;
        }
        let mut seen = vec![false; n];
        for &c in &self.order {
            let c = c as usize;
            if c >= n || seen[c] {
                return false;
            }
            seen[c] = true;
        }
        true
    }
}

/// Reciprocal tour length; errors when the tour is not a permutation.
pub fn tsp_fitness(tour: &TspTour, instance: &TspInstance) -> Result<f64, ProblemError> {
    Ok(1.0 / instance.tour_length(tour)?)
}

/// Swaps the contents of two distinct uniformly chosen positions.
pub fn tsp_swap_mutate(tour: &TspTour, rng: &mut dyn RngCore) -> TspTour {
    let n = tour.order.len();
    assert!(n >= 2);
    let mut child = tour.clone();
    let i = rng.gen_range(0..n);
    let mut j = rng.gen_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    child.order.swap(i, j);
    child
}

/// Partially mapped crossover: copies one parent's segment between two
/// distinct uniformly drawn cut points (half-open span) and fills the rest
/// from the other parent, resolving conflicts through the segment mapping.
pub fn tsp_pmx_crossover(p1: &TspTour, p2: &TspTour, rng: &mut dyn RngCore) -> TspTour {
    let n = p1.order.len();
    assert_eq!(n, p2.order.len(), "parents must have the same length");
    let a = rng.gen_range(0..n);
    let mut b = rng.gen_range(0..n - 1);
    if b >= a {
        b += 1;
    }
    let (start, end) = (a.min(b), a.max(b));
    pmx_with_cuts(p1, p2, start, end)
}

pub(crate) fn pmx_with_cuts(p1: &TspTour, p2: &TspTour, start: usize, end: usize) -> TspTour {
    let n = p1.order.len();
    // position of each value inside p1's segment, or n when outside
    let mut seg_pos = vec![n; n];
    for k in start..end {
        seg_pos[p1.order[k] as usize] = k;
    }
    let mut child = vec![0u32; n];
    child[start..end].copy_from_slice(&p1.order[start..end]);
    for k in (0..start).chain(end..n) {
        let mut v = p2.order[k];
        while seg_pos[v as usize] != n {
            v = p2.order[seg_pos[v as usize]];
        }
        child[k] = v;
    }
    TspTour { order: child }
}

/// A fixed instance bound to the engine interface.
#[derive(Debug, Clone)]
pub struct TspProblem {
    instance: TspInstance,
    label: String,
    bounds: (f64, f64),
}

impl TspProblem {
    pub fn new(instance: TspInstance, label: impl Into<String>) -> Self {
        let n = instance.n();
        // every cycle uses one outgoing edge per city, so the sum of each
        // city's cheapest edge bounds the length from below
        let lower_length: f64 = (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| j != i)
                    .map(|j| instance.distance(i, j))
                    .fold(f64::INFINITY, f64::min)
            })
            .sum();
        let hi = 1.0 / lower_length.max(1e-9);
        let lo = 1.0 / n as f64;
        TspProblem {
            instance,
            label: label.into(),
            bounds: (lo.min(hi / 2.0), hi),
        }
    }

    pub fn instance(&self) -> &TspInstance {
        &self.instance
    }
}

impl Problem for TspProblem {
    type Genome = TspTour;

    fn id(&self) -> String {
        self.label.clone()
    }

    fn random_genome(&self, rng: &mut dyn RngCore) -> TspTour {
        let n = self.instance.n();
        let mut order: Vec<u32> = (0..n as u32).collect();
        // Fisher-Yates
        for i in (1..n).rev() {
            let j = rng.gen_range(0..=i);
            order.swap(i, j);
        }
        TspTour { order }
    }

    fn mutate(&self, genome: &TspTour, rng: &mut dyn RngCore) -> TspTour {
        tsp_swap_mutate(genome, rng)
    }

    fn crossover(&self, a: &TspTour, b: &TspTour, rng: &mut dyn RngCore) -> TspTour {
        tsp_pmx_crossover(a, b, rng)
    }

    fn fitness(&self, genome: &TspTour) -> f64 {
        tsp_fitness(genome, &self.instance).expect("operators must produce permutations")
    }

    fn fitness_bounds(&self) -> (f64, f64) {
        self.bounds
    }

    fn raw_metric(&self, fitness: f64) -> f64 {
        1.0 / fitness
    }
}
