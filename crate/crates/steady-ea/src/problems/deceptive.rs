//! Deceptive feature-combination landscape on the unit box.
//!
//! An individual is a point in `[0,1]^D`. Feature `d` is the closed slab
//! `a_d <= x_d <= a_d + width`. Points outside every slab sit on a broad
//! plateau of fitness `D + 1`; possessing some but not all features is
//! penalized below the plateau; possessing all of them is the global optimum
//! `D + 2`, which occupies only `width^D` of the box. Escaping the plateau
//! therefore requires descending through the penalized slabs first.

use rand::Rng;
use rand::RngCore;

use super::{Problem, ProblemError};

#[derive(Debug, Clone)]
pub struct DeceptiveProblem {
    dims: usize,
    anchors: Vec<f64>,
    width: f64,
}

impl DeceptiveProblem {
    /// Default anchors `0.2, 0.3, 0.4, ...`, clamped so every slab stays
    /// inside the box. Translation of the slabs does not change the dynamics.
    pub fn new(dims: usize, width: f64) -> Result<Self, ProblemError> {
        let anchors = (0..dims)
            .map(|d| (0.2 + 0.1 * d as f64).min(1.0 - width).max(0.0))
            .collect();
        DeceptiveProblem::with_anchors(anchors, width)
    }

    pub fn with_anchors(anchors: Vec<f64>, width: f64) -> Result<Self, ProblemError> {
        if anchors.len() < 2 {
            return Err(ProblemError::InvalidParameter(
                "need at least 2 dimensions".to_string(),
            ));
        }
        if !(width > 0.0 && width < 1.0) {
            return Err(ProblemError::InvalidParameter(format!(
                "feature width must be in (0, 1), got {width}"
            )));
        }
        if anchors.iter().any(|&a| a < 0.0 || a + width > 1.0) {
            return Err(ProblemError::InvalidParameter(
                "every feature slab [a, a+width] must fit inside [0, 1]".to_string(),
            ));
        }
        Ok(DeceptiveProblem {
            dims: anchors.len(),
            anchors,
            width,
        })
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    fn has_feature(&self, point: &[f64], d: usize) -> bool {
        let a = self.anchors[d];
        point[d] >= a && point[d] <= a + self.width
    }

    /// Integer fitness of a point. 2D uses the explicit four-region table;
    /// higher dimensions use `(D+1) * prod(chi) - max_d(d * chi_d) + D + 1`
    /// with 1-based `d`. The two disagree on which single-feature region gets
    /// which penalty at D = 2, and the table is authoritative there.
    pub fn fitness_at(&self, point: &[f64]) -> u32 {
        assert_eq!(point.len(), self.dims, "point dimension mismatch");
        assert!(
            point.iter().all(|&x| (0.0..=1.0).contains(&x)),
            "point outside the unit box"
        );
        if self.dims == 2 {
            let f1 = self.has_feature(point, 0);
            let f2 = self.has_feature(point, 1);
            return match (f1, f2) {
                (true, true) => 4,
                (true, false) => 1,
                (false, true) => 2,
                (false, false) => 3,
            };
        }
        let d = self.dims as i64;
        let mut product = 1i64;
        let mut max_term = 0i64;
        for (i, _) in self.anchors.iter().enumerate() {
            let chi = self.has_feature(point, i) as i64;
            product *= chi;
            max_term = max_term.max((i as i64 + 1) * chi);
        }
        ((d + 1) * product - max_term + d + 1) as u32
    }

    /// The global-optimum fitness, `D + 2`.
    pub fn target_fitness(&self) -> u32 {
        self.dims as u32 + 2
    }
}

impl Problem for DeceptiveProblem {
    type Genome = Vec<f64>;

    fn id(&self) -> String {
        format!("deceptive:{}:{}", self.dims, self.width)
    }

    fn random_genome(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        (0..self.dims).map(|_| rng.gen::<f64>()).collect()
    }

    /// Replaces one uniformly chosen coordinate with a fresh uniform draw.
    fn mutate(&self, genome: &Vec<f64>, rng: &mut dyn RngCore) -> Vec<f64> {
        let mut child = genome.clone();
        let d = rng.gen_range(0..self.dims);
        child[d] = rng.gen::<f64>();
        child
    }

    /// 2D: x from the first parent, y from the second. Higher dimensions
    /// blend coordinate-wise with an independent fair coin per coordinate.
    fn crossover(&self, a: &Vec<f64>, b: &Vec<f64>, rng: &mut dyn RngCore) -> Vec<f64> {
        if self.dims == 2 {
            return vec![a[0], b[1]];
        }
        (0..self.dims)
            .map(|d| if rng.gen::<bool>() { a[d] } else { b[d] })
            .collect()
    }

    fn fitness(&self, genome: &Vec<f64>) -> f64 {
        self.fitness_at(genome) as f64
    }

    fn fitness_bounds(&self) -> (f64, f64) {
        (1.0, (self.dims + 2) as f64)
    }

    fn target_reached(&self, fitness: f64) -> bool {
        fitness >= self.target_fitness() as f64
    }
}
