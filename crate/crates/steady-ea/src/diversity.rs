//! Population diversity metrics and fitness histograms.

use rand::Rng;
use rand::RngCore;
use thiserror::Error;

use crate::population::{fitness_level_index, MemberId, Population};
use crate::problems::Problem;

#[derive(Debug, Error, PartialEq)]
pub enum DiversityError {
    #[error("genome type does not support hamming distance")]
    NoHammingSupport,
    #[error("need at least 2 members, got {0}")]
    TooFewMembers(usize),
}

/// Pair counts up to this are averaged exactly; larger populations fall back
/// to sampling. 2e6 keeps the paper-scale |P| = 1000 runs exact.
pub const EXACT_PAIR_LIMIT: usize = 2_000_000;
/// Pairs drawn in sampled mode.
pub const SAMPLE_PAIRS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiversityMeasure {
    pub value: f64,
    /// True when the value is a sampled estimate rather than the exact mean.
    pub sampled: bool,
}

/// Mean hamming distance over unordered member pairs, exact when the pair
/// count fits the budget and sampled otherwise.
pub fn diversity_total<P: Problem>(
    problem: &P,
    population: &Population<P::Genome>,
    rng: &mut dyn RngCore,
) -> Result<DiversityMeasure, DiversityError> {
    let members: Vec<MemberId> = population.index().members().to_vec();
    diversity_of_members(problem, population, &members, EXACT_PAIR_LIMIT, SAMPLE_PAIRS, rng)
}

/// Diversity restricted to members whose fitness is within `window` of the
/// best; `None` when fewer than two members qualify.
pub fn diversity_high_fitness<P: Problem>(
    problem: &P,
    population: &Population<P::Genome>,
    window: f64,
    rng: &mut dyn RngCore,
) -> Result<Option<DiversityMeasure>, DiversityError> {
    let f_max = match population.index().f_max() {
        Some(f) => f,
        None => return Ok(None),
    };
    let members: Vec<MemberId> = population
        .index()
        .members()
        .iter()
        .copied()
        .filter(|&id| population.fitness(id) >= f_max - window)
        .collect();
    if members.len() < 2 {
        return Ok(None);
    }
    diversity_of_members(problem, population, &members, EXACT_PAIR_LIMIT, SAMPLE_PAIRS, rng)
        .map(Some)
}

pub fn diversity_of_members<P: Problem>(
    problem: &P,
    population: &Population<P::Genome>,
    members: &[MemberId],
    exact_limit: usize,
    sample_pairs: usize,
    rng: &mut dyn RngCore,
) -> Result<DiversityMeasure, DiversityError> {
    let n = members.len();
    if n < 2 {
        return Err(DiversityError::TooFewMembers(n));
    }
    let distance = |a: MemberId, b: MemberId| {
        problem
            .hamming(population.genome(a), population.genome(b))
            .ok_or(DiversityError::NoHammingSupport)
    };
    let pair_count = n * (n - 1) / 2;
    if pair_count <= exact_limit {
        let mut total = 0u64;
        for i in 0..n {
            for j in i + 1..n {
                total += distance(members[i], members[j])?;
            }
        }
        Ok(DiversityMeasure {
            value: total as f64 / pair_count as f64,
            sampled: false,
        })
    } else {
        let mut total = 0u64;
        for _ in 0..sample_pairs {
            let i = rng.gen_range(0..n);
            let mut j = rng.gen_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            total += distance(members[i], members[j])?;
        }
        Ok(DiversityMeasure {
            value: total as f64 / sample_pairs as f64,
            sampled: true,
        })
    }
}

/// One histogram bin: `[bin_low, bin_high)` except the last, which closes at
/// the upper bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramRecord {
    pub bin_low: f64,
    pub bin_high: f64,
    pub count: usize,
}

/// Population counts over `nbins` equal-width bins of `bounds`.
pub fn fitness_histogram<G>(
    population: &Population<G>,
    bounds: (f64, f64),
    nbins: usize,
) -> Vec<HistogramRecord> {
    let mut counts = vec![0usize; nbins];
    for &id in population.index().members() {
        counts[fitness_level_index(population.fitness(id), bounds, nbins)] += 1;
    }
    let width = (bounds.1 - bounds.0) / nbins as f64;
    counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| HistogramRecord {
            bin_low: bounds.0 + width * i as f64,
            bin_high: bounds.0 + width * (i + 1) as f64,
            count,
        })
        .collect()
}
