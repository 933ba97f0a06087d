//! Scale-independent selection weight tables.
//!
//! The single-parent table assigns each fitness level a probability inversely
//! proportional to its distance from the best occupied level (plus one spacing
//! unit, which regularizes the top level). The pair table extends this to a
//! strongly correlated joint draw over level pairs whose marginals are exactly
//! uniform after a diagonal correction.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum WeightsError {
    #[error("level set spacing does not divide the range: ({lo}, {hi}) step {eps}")]
    DiscreteMismatch { lo: f64, hi: f64, eps: f64 },
    #[error("pair weights need at least 3 levels, got {0}; fall back to independent draws")]
    TooFewLevels(usize),
    #[error("invalid level set: {0}")]
    Invalid(String),
}

/// Description of the fitness levels in play: either a discrete equi-spaced
/// grid (spacing `epsilon`) or a continuous range discretized by the
/// population-derived effective spacing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitnessLevelSet {
    pub f_min: f64,
    pub f_max: f64,
    /// Problem-level spacing; 0.0 is the sentinel for continuous fitness.
    pub epsilon: f64,
    pub effective_epsilon: f64,
    pub level_count: usize,
}

impl FitnessLevelSet {
    /// Discrete grid `{f_min, f_min + eps, ..., f_max}`. The spacing must
    /// divide the range to within a small tolerance.
    pub fn discrete(f_min: f64, f_max: f64, epsilon: f64) -> Result<Self, WeightsError> {
        if !(f_min <= f_max) || epsilon <= 0.0 {
            return Err(WeightsError::Invalid(format!(
                "need f_min <= f_max and epsilon > 0, got ({f_min}, {f_max}, {epsilon})"
            )));
        }
        let steps = (f_max - f_min) / epsilon;
        let rounded = steps.round();
        if (steps - rounded).abs() > 1e-9 * (1.0 + steps.abs()) {
            return Err(WeightsError::DiscreteMismatch {
                lo: f_min,
                hi: f_max,
                eps: epsilon,
            });
        }
        Ok(FitnessLevelSet {
            f_min,
            f_max,
            epsilon,
            effective_epsilon: epsilon,
            level_count: rounded as usize + 1,
        })
    }

    /// Continuous range seen through a population of `population_size`
    /// members: the effective spacing is the mean gap of a fitness-uniform
    /// population and the grid has one level per member.
    pub fn continuous(f_min: f64, f_max: f64, population_size: usize) -> Self {
        if population_size >= 2 && f_max > f_min {
            FitnessLevelSet {
                f_min,
                f_max,
                epsilon: 0.0,
                effective_epsilon: (f_max - f_min) / (population_size as f64 - 1.0),
                level_count: population_size,
            }
        } else {
            // degenerate range: any positive spacing gives the same
            // (uniform) selection
            FitnessLevelSet {
                f_min,
                f_max,
                epsilon: 0.0,
                effective_epsilon: 1.0,
                level_count: 1,
            }
        }
    }

    pub fn level(&self, i: usize) -> f64 {
        debug_assert!(i < self.level_count);
        self.f_min + self.effective_epsilon * i as f64
    }

    pub fn levels(&self) -> Vec<f64> {
        (0..self.level_count).map(|i| self.level(i)).collect()
    }
}

/// Per-level selection probabilities of the scale-independent scheme.
#[derive(Debug, Clone)]
pub struct SelectionWeights {
    /// Ascending distinct fitness values.
    pub levels: Vec<f64>,
    /// Probability of each level; sums to 1.
    pub probs: Vec<f64>,
    /// Implied normalization constant `c` (the normalizer times ln L).
    pub normalizer_c: f64,
}

impl SelectionWeights {
    /// Weights over explicit level values with spacing `eps`:
    /// `p(f) ∝ 1 / ((f_max - f)/eps + 1)`.
    pub fn from_levels(levels: &[f64], eps: f64) -> Self {
        assert!(!levels.is_empty(), "need at least one level");
        assert!(eps > 0.0, "spacing must be positive");
        assert!(
            levels.windows(2).all(|w| w[0] < w[1]),
            "levels must be strictly ascending"
        );
        let f_max = *levels.last().unwrap();
        let raw: Vec<f64> = levels
            .iter()
            .map(|&f| 1.0 / ((f_max - f) / eps + 1.0))
            .collect();
        let sum: f64 = raw.iter().sum();
        let probs: Vec<f64> = raw.iter().map(|w| w / sum).collect();
        let l = levels.len() as f64;
        SelectionWeights {
            levels: levels.to_vec(),
            probs,
            normalizer_c: l.ln() / sum,
        }
    }

    /// Draws a level index.
    pub fn sample(&self, rng: &mut dyn rand::RngCore) -> usize {
        sample_categorical(&self.probs, rng)
    }
}

/// Weights over the grid of an occupied level range.
pub fn scale_independent_weights(level_set: &FitnessLevelSet) -> SelectionWeights {
    SelectionWeights::from_levels(&level_set.levels(), level_set.effective_epsilon)
}

/// Joint level-pair probabilities of scale-independent pair selection.
///
/// `joint_tilde` is the raw correlated table; `joint` adds the diagonal
/// correction that makes every marginal exactly `1/L`. Both are row-major
/// `L x L`.
#[derive(Debug, Clone)]
pub struct PairWeights {
    pub levels: Vec<f64>,
    pub joint_tilde: Vec<f64>,
    pub joint: Vec<f64>,
}

impl PairWeights {
    pub fn from_levels(levels: &[f64], eps: f64) -> Result<Self, WeightsError> {
        let l = levels.len();
        if l < 3 {
            return Err(WeightsError::TooFewLevels(l));
        }
        assert!(eps > 0.0, "spacing must be positive");
        assert!(
            levels.windows(2).all(|w| w[0] < w[1]),
            "levels must be strictly ascending"
        );
        let norm = 1.0 / (2.0 * l as f64 * (l as f64).ln());
        let mut joint_tilde = vec![0.0; l * l];
        for i in 0..l {
            for j in 0..l {
                joint_tilde[i * l + j] = norm / ((levels[i] - levels[j]).abs() / eps + 1.0);
            }
        }
        let mut joint = joint_tilde.clone();
        for i in 0..l {
            let marginal: f64 = joint_tilde[i * l..(i + 1) * l].iter().sum();
            joint[i * l + i] += 1.0 / l as f64 - marginal;
        }
        Ok(PairWeights {
            levels: levels.to_vec(),
            joint_tilde,
            joint,
        })
    }

    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    pub fn tilde(&self, i: usize, j: usize) -> f64 {
        self.joint_tilde[i * self.levels.len() + j]
    }

    pub fn prob(&self, i: usize, j: usize) -> f64 {
        self.joint[i * self.levels.len() + j]
    }

    pub fn marginal_tilde(&self, i: usize) -> f64 {
        let l = self.levels.len();
        self.joint_tilde[i * l..(i + 1) * l].iter().sum()
    }

    /// Draws a level-index pair from the corrected joint table.
    pub fn sample(&self, rng: &mut dyn rand::RngCore) -> (usize, usize) {
        let flat = sample_categorical(&self.joint, rng);
        let l = self.levels.len();
        (flat / l, flat % l)
    }
}

/// Pair weights over the grid of an occupied level range.
pub fn scale_independent_pair_weights(
    level_set: &FitnessLevelSet,
) -> Result<PairWeights, WeightsError> {
    PairWeights::from_levels(&level_set.levels(), level_set.effective_epsilon)
}

fn sample_categorical(probs: &[f64], rng: &mut dyn rand::RngCore) -> usize {
    use rand::Rng;
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}
