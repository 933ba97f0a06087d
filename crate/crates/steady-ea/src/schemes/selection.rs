//! Selection schemes.
//!
//! Every scheme is a pure function of the population's fitness index and the
//! run's RNG; none of them look at genomes.

use rand::Rng;
use rand::RngCore;

use super::weights::{PairWeights, SelectionWeights};
use super::SelectionScheme;
use crate::population::{FitnessIndex, MemberId};

/// Uniform draw over the members.
#[derive(Debug, Clone, Copy, Default)]
pub struct UniformSelection;

impl SelectionScheme for UniformSelection {
    fn id(&self) -> String {
        "uniform".to_string()
    }

    fn select(&self, idx: &FitnessIndex, rng: &mut dyn RngCore) -> MemberId {
        idx.uniform_member(rng)
    }
}

/// Tournament selection: `k` members drawn uniformly with replacement, the
/// fittest wins, ties broken uniformly over the drawn group.
#[derive(Debug, Clone, Copy)]
pub struct TournamentSelection {
    pub k: usize,
}

impl TournamentSelection {
    pub fn new(k: usize) -> Self {
        assert!(k >= 1, "tournament size must be at least 1");
        TournamentSelection { k }
    }
}

impl SelectionScheme for TournamentSelection {
    fn id(&self) -> String {
        format!("tour:{}", self.k)
    }

    fn select(&self, idx: &FitnessIndex, rng: &mut dyn RngCore) -> MemberId {
        assert!(!idx.is_empty(), "population is empty");
        let group: Vec<MemberId> = (0..self.k).map(|_| idx.uniform_member(rng)).collect();
        tournament_winner(idx, &group, rng)
    }
}

/// Fittest member of a drawn group, ties resolved uniformly over the group
/// (a member drawn twice counts twice). Exposed so exact-enumeration tests
/// can drive the same decision rule.
pub fn tournament_winner(idx: &FitnessIndex, group: &[MemberId], rng: &mut dyn RngCore) -> MemberId {
    assert!(!group.is_empty());
    let best = group
        .iter()
        .map(|&id| idx.fitness_of(id))
        .fold(f64::NEG_INFINITY, f64::max);
    let tied: Vec<MemberId> = group
        .iter()
        .copied()
        .filter(|&id| idx.fitness_of(id) == best)
        .collect();
    tied[rng.gen_range(0..tied.len())]
}

/// Fitness uniform selection: a fitness value is drawn uniformly from the
/// occupied range padded by half the effective spacing, then the member
/// nearest that value is selected (uniform among ties).
#[derive(Debug, Clone, Copy, Default)]
pub struct FussSelection;

impl FussSelection {
    pub fn draw(idx: &FitnessIndex, rng: &mut dyn RngCore) -> MemberId {
        assert!(!idx.is_empty(), "population is empty");
        let lo = idx.f_min().unwrap();
        let hi = idx.f_max().unwrap();
        if lo == hi {
            return idx.uniform_member(rng);
        }
        let half = idx.effective_epsilon() / 2.0;
        let u = rng.gen_range(lo - half..hi + half);
        idx.nearest_member(u, rng)
    }
}

impl SelectionScheme for FussSelection {
    fn id(&self) -> String {
        "fuss".to_string()
    }

    fn select(&self, idx: &FitnessIndex, rng: &mut dyn RngCore) -> MemberId {
        FussSelection::draw(idx, rng)
    }
}

/// Closed-form per-member probabilities of [`FussSelection`]: each distinct
/// fitness value owns the sub-interval of points nearest to it and members
/// sharing a value split that mass uniformly. Returned sorted by member id.
pub fn fuss_selection_probabilities(idx: &FitnessIndex) -> Vec<(MemberId, f64)> {
    assert!(!idx.is_empty(), "population is empty");
    let values: Vec<f64> = idx.distinct_values().collect();
    let mut out = Vec::with_capacity(idx.len());
    if values.len() == 1 {
        let share = 1.0 / idx.len() as f64;
        for &id in idx.members_at(values[0]) {
            out.push((id, share));
        }
    } else {
        let half = idx.effective_epsilon() / 2.0;
        let lo = values[0] - half;
        let hi = values[values.len() - 1] + half;
        let total = hi - lo;
        for (i, &v) in values.iter().enumerate() {
            let left = if i == 0 { lo } else { (values[i - 1] + v) / 2.0 };
            let right = if i == values.len() - 1 {
                hi
            } else {
                (v + values[i + 1]) / 2.0
            };
            let members = idx.members_at(v);
            let share = (right - left) / total / members.len() as f64;
            for &id in members {
                out.push((id, share));
            }
        }
    }
    out.sort_by_key(|(id, _)| *id);
    out
}

/// Scale-independent selection: levels are the distinct occupied fitness
/// values, weighted inversely to their distance from the best one (in units of
/// the effective spacing), then a uniform member of the drawn level.
#[derive(Debug, Clone, Copy, Default)]
pub struct ScaleIndependentSelection;

impl ScaleIndependentSelection {
    fn weights(idx: &FitnessIndex) -> Option<SelectionWeights> {
        if idx.distinct_value_count() < 2 {
            return None;
        }
        let values: Vec<f64> = idx.distinct_values().collect();
        Some(SelectionWeights::from_levels(
            &values,
            idx.effective_epsilon(),
        ))
    }
}

impl SelectionScheme for ScaleIndependentSelection {
    fn id(&self) -> String {
        "sis".to_string()
    }

    fn select(&self, idx: &FitnessIndex, rng: &mut dyn RngCore) -> MemberId {
        assert!(!idx.is_empty(), "population is empty");
        match Self::weights(idx) {
            None => idx.uniform_member(rng),
            Some(w) => {
                let level = w.levels[w.sample(rng)];
                let members = idx.members_at(level);
                members[rng.gen_range(0..members.len())]
            }
        }
    }
}

/// Scale-independent pair selection: a correlated joint draw over level
/// pairs, each resolved independently to a uniform member of its level.
/// Populations with fewer than 3 distinct values fall back to independent
/// FUSS draws.
#[derive(Debug, Clone, Copy, Default)]
pub struct ScaleIndependentPairSelection;

impl ScaleIndependentPairSelection {
    pub fn pair_weights(idx: &FitnessIndex) -> Option<PairWeights> {
        let values: Vec<f64> = idx.distinct_values().collect();
        PairWeights::from_levels(&values, idx.effective_epsilon()).ok()
    }
}

impl SelectionScheme for ScaleIndependentPairSelection {
    fn id(&self) -> String {
        "sisp".to_string()
    }

    fn select(&self, idx: &FitnessIndex, rng: &mut dyn RngCore) -> MemberId {
        self.select_parents(idx, rng).0
    }

    fn select_parents(&self, idx: &FitnessIndex, rng: &mut dyn RngCore) -> (MemberId, MemberId) {
        assert!(!idx.is_empty(), "population is empty");
        match Self::pair_weights(idx) {
            None => (FussSelection::draw(idx, rng), FussSelection::draw(idx, rng)),
            Some(w) => {
                let (i, j) = w.sample(rng);
                let pick = |level: f64, rng: &mut dyn RngCore| {
                    let members = idx.members_at(level);
                    members[rng.gen_range(0..members.len())]
                };
                (pick(w.levels[i], rng), pick(w.levels[j], rng))
            }
        }
    }

    fn is_pair_scheme(&self) -> bool {
        true
    }
}
