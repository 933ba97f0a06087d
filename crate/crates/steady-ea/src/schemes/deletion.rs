//! Deletion schemes.

use rand::Rng;
use rand::RngCore;

use super::weights::SelectionWeights;
use super::{DeletionScheme, StepContext};
use crate::population::{FitnessIndex, MemberId};

/// Neutral uniform removal.
#[derive(Debug, Clone, Copy, Default)]
pub struct RandomDeletion;

impl DeletionScheme for RandomDeletion {
    fn id(&self) -> String {
        "random".to_string()
    }

    fn choose_victim(
        &self,
        idx: &FitnessIndex,
        _ctx: &StepContext,
        rng: &mut dyn RngCore,
    ) -> MemberId {
        idx.uniform_member(rng)
    }
}

/// Fitness uniform deletion: a uniform member of the most populated fitness
/// bin, ties resolved to the lowest bin. Requires the population to maintain
/// its bin histogram.
#[derive(Debug, Clone, Copy, Default)]
pub struct FudsDeletion;

impl FudsDeletion {
    /// The bin a FUDS deletion will target given the current counts.
    pub fn target_bin(counts: &[usize]) -> usize {
        let max = *counts.iter().max().expect("no bins");
        counts.iter().position(|&c| c == max).unwrap()
    }
}

impl DeletionScheme for FudsDeletion {
    fn id(&self) -> String {
        "fuds".to_string()
    }

    fn choose_victim(
        &self,
        idx: &FitnessIndex,
        _ctx: &StepContext,
        rng: &mut dyn RngCore,
    ) -> MemberId {
        assert!(!idx.is_empty(), "population is empty");
        let counts = idx.bin_counts();
        let bin = Self::target_bin(&counts);
        let members = idx.bin_members(bin);
        members[rng.gen_range(0..members.len())]
    }
}

/// Deletes one of the two members with the most similar fitness: a globally
/// minimal adjacent gap of the sorted index, one tied pair chosen uniformly,
/// then one member of that pair uniformly.
#[derive(Debug, Clone, Copy, Default)]
pub struct ClosestPairDeletion;

impl DeletionScheme for ClosestPairDeletion {
    fn id(&self) -> String {
        "closest".to_string()
    }

    fn choose_victim(
        &self,
        idx: &FitnessIndex,
        _ctx: &StepContext,
        rng: &mut dyn RngCore,
    ) -> MemberId {
        assert!(idx.len() >= 2, "closest-pair deletion needs two members");
        let ordered: Vec<MemberId> = idx.sorted_members().collect();
        let mut min_gap = f64::INFINITY;
        let mut tied: Vec<usize> = Vec::new();
        for i in 0..ordered.len() - 1 {
            let gap = idx.fitness_of(ordered[i + 1]) - idx.fitness_of(ordered[i]);
            if gap < min_gap {
                min_gap = gap;
                tied.clear();
                tied.push(i);
            } else if gap == min_gap {
                tied.push(i);
            }
        }
        let pair = tied[rng.gen_range(0..tied.len())];
        ordered[pair + rng.gen_range(0..2usize)]
    }
}

/// Scale-independent deletion: the population is pushed toward the
/// convex curve peaked at the fittest occupied bin. Each bin in the occupied
/// range gets a target mass `|P| * p(bin)` from the scale-independent weights
/// (the top occupied bin playing f_max); deletion takes a uniform member of
/// the bin with the largest excess over its target, ties to the lowest bin.
#[derive(Debug, Clone, Copy, Default)]
pub struct ScaleIndependentDeletion;

impl ScaleIndependentDeletion {
    /// Excess over target per bin in the occupied range; `None` outside it.
    pub fn excesses(counts: &[usize], total: usize) -> Vec<Option<f64>> {
        let lo = counts.iter().position(|&c| c > 0).expect("empty histogram");
        let hi = counts.iter().rposition(|&c| c > 0).unwrap();
        let range: Vec<f64> = (lo..=hi).map(|b| b as f64).collect();
        let weights = SelectionWeights::from_levels(&range, 1.0);
        let mut out = vec![None; counts.len()];
        for (i, b) in (lo..=hi).enumerate() {
            let target = total as f64 * weights.probs[i];
            out[b] = Some(counts[b] as f64 - target);
        }
        out
    }

    pub fn target_bin(counts: &[usize], total: usize) -> usize {
        let excesses = Self::excesses(counts, total);
        // only occupied bins are deletable; empty ones have negative excess
        // anyway since their target mass is positive
        let max = excesses
            .iter()
            .enumerate()
            .filter(|(b, _)| counts[*b] > 0)
            .filter_map(|(_, e)| *e)
            .fold(f64::NEG_INFINITY, f64::max);
        // float ties: treat excesses within a hair of the max as tied and
        // take the lowest such bin
        let tol = 1e-9 * max.abs().max(1.0);
        excesses
            .iter()
            .enumerate()
            .position(|(b, e)| counts[b] > 0 && matches!(e, Some(x) if *x >= max - tol))
            .unwrap()
    }
}

impl DeletionScheme for ScaleIndependentDeletion {
    fn id(&self) -> String {
        "sid".to_string()
    }

    fn choose_victim(
        &self,
        idx: &FitnessIndex,
        _ctx: &StepContext,
        rng: &mut dyn RngCore,
    ) -> MemberId {
        assert!(!idx.is_empty(), "population is empty");
        let counts = idx.bin_counts();
        let bin = Self::target_bin(&counts, idx.len());
        let members = idx.bin_members(bin);
        members[rng.gen_range(0..members.len())]
    }
}

/// Removes the parent that was just bred from; with capacity 1 this turns the
/// engine into a mutation random walk. Not registered for general use.
#[derive(Debug, Clone, Copy, Default)]
pub struct ReplaceParentDeletion;

impl DeletionScheme for ReplaceParentDeletion {
    fn id(&self) -> String {
        "replace-parent".to_string()
    }

    fn choose_victim(
        &self,
        _idx: &FitnessIndex,
        ctx: &StepContext,
        _rng: &mut dyn RngCore,
    ) -> MemberId {
        ctx.parent
    }
}
