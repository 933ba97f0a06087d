//! Distributional checks of the selection and deletion schemes against
//! closed-form and Monte-Carlo oracles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

use steady_ea::population::{BinConfig, MemberId, Population};
use steady_ea::schemes::{
    fuss_selection_probabilities, tournament_winner, ClosestPairDeletion, DeletionScheme,
    FudsDeletion, FussSelection, ScaleIndependentDeletion, ScaleIndependentPairSelection,
    SchemeRegistry, SelectionScheme, StepContext, TournamentSelection, UniformSelection,
};

fn population_with(fitnesses: &[f64]) -> Population<usize> {
    let mut pop = Population::new(None, None);
    for (i, &f) in fitnesses.iter().enumerate() {
        pop.insert(i, f);
    }
    pop
}

fn binned_population(fitnesses: &[f64], bounds: (f64, f64), nbins: usize) -> Population<usize> {
    let mut pop = Population::new(None, Some(BinConfig::new(bounds, nbins)));
    for (i, &f) in fitnesses.iter().enumerate() {
        pop.insert(i, f);
    }
    pop
}

fn empirical_frequencies(
    scheme: &dyn SelectionScheme,
    pop: &Population<usize>,
    draws: usize,
    rng: &mut ChaCha8Rng,
) -> HashMap<MemberId, f64> {
    let mut counts: HashMap<MemberId, usize> = HashMap::new();
    for _ in 0..draws {
        *counts.entry(scheme.select(pop.index(), rng)).or_default() += 1;
    }
    counts
        .into_iter()
        .map(|(id, c)| (id, c as f64 / draws as f64))
        .collect()
}

fn assert_matches_probabilities(
    freqs: &HashMap<MemberId, f64>,
    expected: &[(MemberId, f64)],
    draws: usize,
) {
    for &(id, p) in expected {
        let f = freqs.get(&id).copied().unwrap_or(0.0);
        let sigma = (p * (1.0 - p) / draws as f64).sqrt();
        assert!(
            (f - p).abs() <= 4.0 * sigma.max(1e-9),
            "member {id:?}: freq {f}, expected {p} (sigma {sigma})"
        );
    }
}

#[test]
fn uniform_selection_is_uniform() {
    let pop = population_with(&[3.0, 1.0, 4.0, 1.0]);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let draws = 200_000;
    let freqs = empirical_frequencies(&UniformSelection, &pop, draws, &mut rng);
    let expected: Vec<(MemberId, f64)> =
        pop.index().members().iter().map(|&id| (id, 0.25)).collect();
    assert_matches_probabilities(&freqs, &expected, draws);
}

#[test]
fn single_member_schemes_return_it() {
    let pop = population_with(&[5.0]);
    let only = pop.index().members()[0];
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let registry = SchemeRegistry::builtin();
    for id in ["uniform", "tour:3", "fuss", "sis", "sisp"] {
        let scheme = registry.selection(id).unwrap();
        for _ in 0..20 {
            assert_eq!(scheme.select(pop.index(), &mut rng), only, "scheme {id}");
        }
    }
    let pair = ScaleIndependentPairSelection;
    assert_eq!(pair.select_parents(pop.index(), &mut rng), (only, only));
}

#[test]
fn tournament_of_two_on_two_members_favors_the_fitter() {
    // enumerate the 4 equally likely with-replacement draws through the
    // production winner rule: the fitter wins 3 of 4
    let pop = population_with(&[1.0, 2.0]);
    let ids = pop.index().members().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut wins = HashMap::new();
    for &a in &ids {
        for &b in &ids {
            let w = tournament_winner(pop.index(), &[a, b], &mut rng);
            *wins.entry(w).or_insert(0usize) += 1;
        }
    }
    let fitter = ids[1];
    assert_eq!(wins[&fitter], 3);
}

#[test]
fn tournament_two_equals_linear_ranking_exactly() {
    // on n distinct fitnesses, P(rank r) = (2r-1)/n^2 with rank 1 the worst
    let n = 10usize;
    let fitnesses: Vec<f64> = (0..n).map(|i| i as f64 * 2.5 + 1.0).collect();
    let pop = population_with(&fitnesses);
    let ids = pop.index().members().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut wins = vec![0usize; n];
    for &a in &ids {
        for &b in &ids {
            let w = tournament_winner(pop.index(), &[a, b], &mut rng);
            wins[w.0 as usize] += 1;
        }
    }
    for (i, &w) in wins.iter().enumerate() {
        let rank = i + 1; // insertion order is fitness order here
        let expected = (2 * rank - 1) as f64 / (n * n) as f64;
        assert!(
            (w as f64 / (n * n) as f64 - expected).abs() < 1e-12,
            "rank {rank}"
        );
    }
}

#[test]
fn tournament_one_is_uniform() {
    let pop = population_with(&[1.0, 5.0, 9.0]);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let draws = 120_000;
    let freqs = empirical_frequencies(&TournamentSelection::new(1), &pop, draws, &mut rng);
    let expected: Vec<(MemberId, f64)> = pop
        .index()
        .members()
        .iter()
        .map(|&id| (id, 1.0 / 3.0))
        .collect();
    assert_matches_probabilities(&freqs, &expected, draws);
}

#[test]
fn tournament_with_equal_fitness_is_uniform() {
    let pop = population_with(&[2.0, 2.0, 2.0, 2.0]);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let draws = 160_000;
    let freqs = empirical_frequencies(&TournamentSelection::new(4), &pop, draws, &mut rng);
    let expected: Vec<(MemberId, f64)> =
        pop.index().members().iter().map(|&id| (id, 0.25)).collect();
    assert_matches_probabilities(&freqs, &expected, draws);
}

#[test]
fn fuss_probabilities_match_hand_values() {
    let pop = population_with(&[1.0, 2.0, 2.0]);
    let probs = fuss_selection_probabilities(pop.index());
    let expected = [0.5, 0.25, 0.25];
    for ((_, p), e) in probs.iter().zip(expected) {
        assert!((p - e).abs() < 1e-12);
    }

    let gap = population_with(&[0.0, 10.0]);
    for (_, p) in fuss_selection_probabilities(gap.index()) {
        assert!((p - 0.5).abs() < 1e-12);
    }

    let single = population_with(&[5.0]);
    assert_eq!(fuss_selection_probabilities(single.index())[0].1, 1.0);
}

#[test]
fn fuss_sampler_matches_exact_probabilities() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    // a handful of irregular populations, including duplicates and gaps
    let cases: Vec<Vec<f64>> = vec![
        vec![1.0, 2.0, 2.0],
        vec![0.0, 10.0],
        vec![-3.0, -1.0, 4.0, 4.0, 4.5, 9.0],
        (0..25).map(|_| rng.gen_range(-5.0..5.0)).collect(),
    ];
    for fitnesses in cases {
        let pop = population_with(&fitnesses);
        let expected = fuss_selection_probabilities(pop.index());
        let total: f64 = expected.iter().map(|(_, p)| p).sum();
        assert!((total - 1.0).abs() < 1e-12);
        let draws = 1_000_000;
        let freqs = empirical_frequencies(&FussSelection, &pop, draws, &mut rng);
        assert_matches_probabilities(&freqs, &expected, draws);
    }
}

#[test]
fn fuss_probabilities_are_affine_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for case in 0..100 {
        let n = rng.gen_range(1..30);
        let fitnesses: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let a = loop {
            let a: f64 = rng.gen_range(-5.0..5.0);
            if a.abs() > 1e-3 {
                break a;
            }
        };
        let b = rng.gen_range(-100.0..100.0);
        let transformed: Vec<f64> = fitnesses.iter().map(|f| a * f + b).collect();
        let p0 = fuss_selection_probabilities(population_with(&fitnesses).index());
        let p1 = fuss_selection_probabilities(population_with(&transformed).index());
        for ((id0, q0), (id1, q1)) in p0.iter().zip(&p1) {
            assert_eq!(id0, id1);
            assert!(
                (q0 - q1).abs() < 1e-12,
                "case {case}: a={a} b={b}, {q0} vs {q1}"
            );
        }
    }
}

#[test]
fn pair_selection_tracks_its_joint_table() {
    // three equally occupied levels
    let fitnesses: Vec<f64> = (0..30).map(|i| (i % 3) as f64).collect();
    let pop = population_with(&fitnesses);
    let weights = ScaleIndependentPairSelection::pair_weights(pop.index()).unwrap();
    let scheme = ScaleIndependentPairSelection;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let draws = 1_000_000;
    let mut level_counts = vec![vec![0usize; 3]; 3];
    let mut member_counts: HashMap<MemberId, usize> = HashMap::new();
    for _ in 0..draws {
        let (a, b) = scheme.select_parents(pop.index(), &mut rng);
        let la = pop.fitness(a) as usize;
        let lb = pop.fitness(b) as usize;
        level_counts[la][lb] += 1;
        *member_counts.entry(a).or_default() += 1;
    }
    for i in 0..3 {
        for j in 0..3 {
            let p = weights.prob(i, j);
            let f = level_counts[i][j] as f64 / draws as f64;
            let sigma = (p * (1.0 - p) / draws as f64).sqrt();
            assert!((f - p).abs() < 4.0 * sigma, "joint ({i},{j}): {f} vs {p}");
        }
    }
    // member marginal: uniform level marginal (1/3) split over 10 members
    let per_member = 1.0 / 30.0;
    let sigma = (per_member * (1.0 - per_member) / draws as f64).sqrt();
    for &id in pop.index().members() {
        let f = member_counts.get(&id).copied().unwrap_or(0) as f64 / draws as f64;
        assert!((f - per_member).abs() < 4.0 * sigma, "member {id:?}");
    }
    // symmetric and dominating the raw table
    for i in 0..3 {
        for j in 0..3 {
            assert!((weights.prob(i, j) - weights.prob(j, i)).abs() < 1e-15);
            assert!(weights.prob(i, j) >= weights.tilde(i, j) - 1e-15);
        }
    }
}

#[test]
fn pair_selection_falls_back_below_three_levels() {
    let pop = population_with(&[1.0, 1.0, 2.0]);
    assert!(ScaleIndependentPairSelection::pair_weights(pop.index()).is_none());
    let scheme = ScaleIndependentPairSelection;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    // fallback draws must still cover both levels
    let mut seen = [false; 3];
    for _ in 0..500 {
        let (a, b) = scheme.select_parents(pop.index(), &mut rng);
        seen[a.0 as usize] = true;
        seen[b.0 as usize] = true;
    }
    assert!(seen.iter().all(|&s| s));
}

fn ctx(pop: &Population<usize>) -> StepContext {
    let id = pop.index().members()[0];
    StepContext {
        child: id,
        parent: id,
    }
}

#[test]
fn fuds_deletes_from_the_fullest_bin() {
    // bin counts [3, 5, 2] over 3 bins of [0, 3)
    let fitnesses = [
        0.1, 0.2, 0.3, // bin 0
        1.1, 1.2, 1.3, 1.4, 1.5, // bin 1
        2.1, 2.2, // bin 2
    ];
    let pop = binned_population(&fitnesses, (0.0, 3.0), 3);
    assert_eq!(pop.index().bin_counts(), vec![3, 5, 2]);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let victim = FudsDeletion.choose_victim(pop.index(), &ctx(&pop), &mut rng);
        let f = pop.fitness(victim);
        assert!((1.0..2.0).contains(&f), "victim fitness {f}");
    }
}

#[test]
fn fuds_breaks_ties_to_the_lowest_bin() {
    let fitnesses = [
        0.1, 0.2, 0.3, 0.4, 0.5, // bin 0
        1.1, 1.2, 1.3, 1.4, 1.5, // bin 1
        2.1, 2.2, // bin 2
    ];
    let pop = binned_population(&fitnesses, (0.0, 3.0), 3);
    assert_eq!(pop.index().bin_counts(), vec![5, 5, 2]);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..50 {
        let victim = FudsDeletion.choose_victim(pop.index(), &ctx(&pop), &mut rng);
        assert!(pop.fitness(victim) < 1.0);
    }
}

#[test]
fn fuds_single_bin_is_uniform_over_it() {
    let pop = binned_population(&[1.1, 1.2, 1.3], (0.0, 3.0), 3);
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut seen = std::collections::HashSet::new();
    for _ in 0..200 {
        seen.insert(FudsDeletion.choose_victim(pop.index(), &ctx(&pop), &mut rng));
    }
    assert_eq!(seen.len(), 3);
}

#[test]
fn closest_pair_deletes_one_of_the_tightest_gap() {
    let pop = population_with(&[1.0, 1.1, 5.0]);
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..100 {
        let victim = ClosestPairDeletion.choose_victim(pop.index(), &ctx(&pop), &mut rng);
        assert!(pop.fitness(victim) < 2.0);
    }
    // zero gaps dominate
    let dup = population_with(&[2.0, 2.0, 9.0]);
    for _ in 0..100 {
        let victim = ClosestPairDeletion.choose_victim(dup.index(), &ctx(&dup), &mut rng);
        assert_eq!(dup.fitness(victim), 2.0);
    }
    // with two members either may go
    let two = population_with(&[1.0, 4.0]);
    let mut seen = std::collections::HashSet::new();
    for _ in 0..100 {
        seen.insert(ClosestPairDeletion.choose_victim(two.index(), &ctx(&two), &mut rng));
    }
    assert_eq!(seen.len(), 2);
}

#[test]
fn scale_independent_deletion_attacks_the_largest_excess() {
    // counts [10, 10, 10]: targets 30 * (2/11, 3/11, 6/11), largest excess
    // at the lowest bin
    let fitnesses: Vec<f64> = (0..30).map(|i| (i % 3) as f64 + 0.5).collect();
    let pop = binned_population(&fitnesses, (0.0, 3.0), 3);
    assert_eq!(pop.index().bin_counts(), vec![10, 10, 10]);
    let excesses = ScaleIndependentDeletion::excesses(&[10, 10, 10], 30);
    let expect = [
        10.0 - 30.0 * 2.0 / 11.0,
        10.0 - 30.0 * 3.0 / 11.0,
        10.0 - 30.0 * 6.0 / 11.0,
    ];
    for (e, x) in excesses.iter().zip(expect) {
        assert!((e.unwrap() - x).abs() < 1e-12);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..50 {
        let victim =
            ScaleIndependentDeletion.choose_victim(pop.index(), &ctx(&pop), &mut rng);
        assert!(pop.fitness(victim) < 1.0);
    }
}

#[test]
fn scale_independent_deletion_tie_goes_to_the_lowest_bin() {
    // counts proportional to the targets: 11 members as 2/3/6
    let mut fitnesses = Vec::new();
    fitnesses.extend(std::iter::repeat(0.5).take(2));
    fitnesses.extend(std::iter::repeat(1.5).take(3));
    fitnesses.extend(std::iter::repeat(2.5).take(6));
    let pop = binned_population(&fitnesses, (0.0, 3.0), 3);
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for _ in 0..50 {
        let victim =
            ScaleIndependentDeletion.choose_victim(pop.index(), &ctx(&pop), &mut rng);
        assert!(pop.fitness(victim) < 1.0);
    }
    // single occupied bin deletes there
    let single = binned_population(&[1.5, 1.6], (0.0, 3.0), 3);
    let victim = ScaleIndependentDeletion.choose_victim(single.index(), &ctx(&single), &mut rng);
    assert!((1.0..2.0).contains(&single.fitness(victim)));
}

#[test]
fn random_deletion_is_uniform() {
    let pop = population_with(&[1.0, 2.0, 3.0, 4.0]);
    let registry = SchemeRegistry::builtin();
    let scheme = registry.deletion("random").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let draws = 160_000;
    let mut counts: HashMap<MemberId, usize> = HashMap::new();
    for _ in 0..draws {
        *counts
            .entry(scheme.choose_victim(pop.index(), &ctx(&pop), &mut rng))
            .or_default() += 1;
    }
    for (_, c) in counts {
        let f = c as f64 / draws as f64;
        let sigma = (0.25 * 0.75 / draws as f64).sqrt();
        assert!((f - 0.25).abs() < 4.0 * sigma);
    }
}
