//! Species-tree landscape model and its heuristic optimization-time
//! formulas.
//!
//! Fitness levels are partitioned into species connected by evolve edges with
//! a fixed branching factor. One promising chain of species leads from the
//! primordial species to the single global optimum. A mutation evolves the
//! individual to a child species with a small probability; every other
//! mutation devolves it to the primordial species (so the root itself stays
//! put), which is what makes a lone random walker spend most of its time at
//! the lowest fitness. Evolving picks one of the `b` child slots uniformly; a
//! slot with no species behind it (possible at the boundary levels) leaves
//! the individual where it was.

use rand::Rng;
use rand::RngCore;
use thiserror::Error;

use crate::engine::{self, EngineConfig, EngineError, StoppingRule};
use crate::population::{FitnessIndex, MemberId};
use crate::problems::Problem;
use crate::schemes::{
    DeletionScheme, FudsDeletion, FussSelection, RandomDeletion, ReplaceParentDeletion,
    SchemeRegistry, SelectionScheme, TournamentSelection,
};

#[derive(Debug, Error)]
pub enum TreeError {
    #[error("need at least 2 fitness levels, got {0}")]
    TooFewLevels(u32),
    #[error("branching factor must be at least 2, got {0}")]
    BadBranching(u32),
    #[error("species per level ({species}) must be at least the branching factor ({branching})")]
    TooFewSpecies { species: u32, branching: u32 },
    #[error("evolution probability {0} outside (0, 1)")]
    BadEvolutionProbability(f64),
    #[error("unknown tree scheme '{0}'")]
    UnknownScheme(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// One species: its fitness level and its index within the level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpeciesId {
    pub level: u32,
    pub index: u32,
}

/// The species tree. Level 0 holds the single primordial species, the top
/// level the single global optimum, and every interior level `s` species of
/// which the first `ceil(s/b)` are fertile. Children are assigned
/// contiguously, so the promising chain is species 0 of every level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeModel {
    levels: u32,
    branching: u32,
    species_per_level: u32,
    evolution_probability: f64,
}

impl TreeModel {
    pub fn build(
        levels: u32,
        branching: u32,
        species_per_level: u32,
        evolution_probability: f64,
    ) -> Result<Self, TreeError> {
        if levels < 2 {
            return Err(TreeError::TooFewLevels(levels));
        }
        if branching < 2 {
            return Err(TreeError::BadBranching(branching));
        }
        if species_per_level < branching {
            return Err(TreeError::TooFewSpecies {
                species: species_per_level,
                branching,
            });
        }
        if !(evolution_probability > 0.0 && evolution_probability < 1.0) {
            return Err(TreeError::BadEvolutionProbability(evolution_probability));
        }
        Ok(TreeModel {
            levels,
            branching,
            species_per_level,
            evolution_probability,
        })
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn branching(&self) -> u32 {
        self.branching
    }

    pub fn species_per_level(&self) -> u32 {
        self.species_per_level
    }

    pub fn evolution_probability(&self) -> f64 {
        self.evolution_probability
    }

    pub fn level_count(&self, level: u32) -> u32 {
        if level == 0 || level == self.levels - 1 {
            1
        } else {
            self.species_per_level
        }
    }

    /// Number of fertile species at a level (0 for the top level).
    pub fn fertile_count(&self, level: u32) -> u32 {
        if level >= self.levels - 1 {
            0
        } else {
            self.level_count(level).div_ceil(self.branching)
        }
    }

    pub fn is_fertile(&self, species: SpeciesId) -> bool {
        species.index < self.fertile_count(species.level)
    }

    pub fn is_promising(&self, species: SpeciesId) -> bool {
        species.index == 0
    }

    pub fn root() -> SpeciesId {
        SpeciesId { level: 0, index: 0 }
    }

    pub fn optimum(&self) -> SpeciesId {
        SpeciesId {
            level: self.levels - 1,
            index: 0,
        }
    }

    /// The species behind child slot `slot` of a fertile species, when one
    /// exists. Boundary levels have fewer species than slots.
    pub fn child(&self, species: SpeciesId, slot: u32) -> Option<SpeciesId> {
        debug_assert!(self.is_fertile(species) && slot < self.branching);
        let index = species.index * self.branching + slot;
        if index < self.level_count(species.level + 1) {
            Some(SpeciesId {
                level: species.level + 1,
                index,
            })
        } else {
            None
        }
    }

    pub fn children(&self, species: SpeciesId) -> Vec<SpeciesId> {
        if !self.is_fertile(species) {
            return Vec::new();
        }
        (0..self.branching)
            .filter_map(|slot| self.child(species, slot))
            .collect()
    }

    /// The species that evolved into `species`; the root has none.
    pub fn parent(&self, species: SpeciesId) -> Option<SpeciesId> {
        if species.level == 0 {
            return None;
        }
        let level = species.level - 1;
        let fertile = self.fertile_count(level).max(1);
        Some(SpeciesId {
            level,
            index: (species.index / self.branching).min(fertile - 1),
        })
    }

    /// One mutation. With the evolution probability, a fertile species moves
    /// to a uniformly chosen child slot (staying put when the slot is
    /// empty); every other outcome devolves to the primordial species, so
    /// the root stays in place.
    pub fn mutate(&self, species: SpeciesId, rng: &mut dyn RngCore) -> SpeciesId {
        if self.is_fertile(species) && rng.gen::<f64>() < self.evolution_probability {
            let slot = rng.gen_range(0..self.branching);
            return self.child(species, slot).unwrap_or(species);
        }
        TreeModel::root()
    }
}

/// The tree as an engine problem: genome is the species, fitness its level.
/// Crossover is undefined for this model; runs must disable it.
#[derive(Debug, Clone)]
pub struct TreeProblem {
    model: TreeModel,
}

impl TreeProblem {
    pub fn new(model: TreeModel) -> Self {
        TreeProblem { model }
    }

    pub fn model(&self) -> &TreeModel {
        &self.model
    }
}

impl Problem for TreeProblem {
    type Genome = SpeciesId;

    fn id(&self) -> String {
        let m = &self.model;
        format!(
            "tree:{}:{}:{}:{}",
            m.levels, m.branching, m.species_per_level, m.evolution_probability
        )
    }

    /// Random individuals have the lowest fitness: the primordial species.
    fn random_genome(&self, _rng: &mut dyn RngCore) -> SpeciesId {
        TreeModel::root()
    }

    fn mutate(&self, genome: &SpeciesId, rng: &mut dyn RngCore) -> SpeciesId {
        self.model.mutate(*genome, rng)
    }

    fn crossover(&self, a: &SpeciesId, _b: &SpeciesId, _rng: &mut dyn RngCore) -> SpeciesId {
        // the model only considers mutation; keep crossover inert
        *a
    }

    fn fitness(&self, genome: &SpeciesId) -> f64 {
        genome.level as f64
    }

    fn fitness_bounds(&self) -> (f64, f64) {
        (0.0, (self.model.levels - 1) as f64)
    }

    fn target_reached(&self, fitness: f64) -> bool {
        fitness >= (self.model.levels - 1) as f64
    }
}

/// Elitist selector used for the FUDS analysis: half the time a uniform
/// member of the highest occupied fitness level, half the time a uniform
/// member from below it.
#[derive(Debug, Clone, Copy, Default)]
pub struct ElitistHalfSelection;

impl SelectionScheme for ElitistHalfSelection {
    fn id(&self) -> String {
        "elitist-half".to_string()
    }

    fn select(&self, idx: &FitnessIndex, rng: &mut dyn RngCore) -> MemberId {
        assert!(!idx.is_empty(), "population is empty");
        let top = idx.f_max().unwrap();
        let top_members = idx.members_at(top);
        let below = idx.len() - top_members.len();
        if below == 0 || rng.gen::<bool>() {
            top_members[rng.gen_range(0..top_members.len())]
        } else {
            // uniform over the members below the top level
            let pick = rng.gen_range(0..below);
            let mut seen = 0;
            for value in idx.distinct_values() {
                if value == top {
                    continue;
                }
                let members = idx.members_at(value);
                if pick < seen + members.len() {
                    return members[pick - seen];
                }
                seen += members.len();
            }
            unreachable!("below-count covers all non-top members")
        }
    }
}

/// Scheme configurations compared on the tree model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeScheme {
    /// Capacity-1 mutation walk: uniform selection, replace-parent deletion.
    RandomWalk,
    /// Fitness uniform selection with random deletion.
    Fuss,
    /// Elitist-half selection with fitness uniform deletion.
    ElitistFuds,
    /// Tournament of the given size with random deletion.
    Tournament(u32),
}

impl TreeScheme {
    pub fn parse(id: &str) -> Result<Self, TreeError> {
        match id {
            "rw" => Ok(TreeScheme::RandomWalk),
            "fuss" => Ok(TreeScheme::Fuss),
            "elitist" => Ok(TreeScheme::ElitistFuds),
            other => match other.strip_prefix("tour:").and_then(|k| k.parse().ok()) {
                Some(k) if k >= 1 => Ok(TreeScheme::Tournament(k)),
                _ => Err(TreeError::UnknownScheme(id.to_string())),
            },
        }
    }

    pub fn id(&self) -> String {
        match self {
            TreeScheme::RandomWalk => "rw".to_string(),
            TreeScheme::Fuss => "fuss".to_string(),
            TreeScheme::ElitistFuds => "elitist".to_string(),
            TreeScheme::Tournament(k) => format!("tour:{k}"),
        }
    }

    fn build(
        &self,
        capacity: usize,
    ) -> (usize, Box<dyn SelectionScheme>, Box<dyn DeletionScheme>) {
        match self {
            TreeScheme::RandomWalk => (
                1,
                Box::new(crate::schemes::UniformSelection),
                Box::new(ReplaceParentDeletion),
            ),
            TreeScheme::Fuss => (capacity, Box::new(FussSelection), Box::new(RandomDeletion)),
            TreeScheme::ElitistFuds => (
                capacity,
                Box::new(ElitistHalfSelection),
                Box::new(FudsDeletion),
            ),
            TreeScheme::Tournament(k) => (
                capacity,
                Box::new(TournamentSelection::new(*k as usize)),
                Box::new(RandomDeletion),
            ),
        }
    }
}

/// Created individuals until the first top-level one, or the censoring cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HittingTime {
    pub cycles: u64,
    pub censored: bool,
}

/// Runs the steady-state engine on the tree problem (mutation only) until a
/// top-level individual is created, reporting the cycle count. Hitting the
/// safety cap flags the result as censored.
pub fn simulate_hitting_time(
    model: &TreeModel,
    scheme: TreeScheme,
    capacity: usize,
    seed: u64,
    max_cycles: u64,
) -> Result<HittingTime, TreeError> {
    simulate_hitting_record(model, scheme, capacity, seed, max_cycles).map(|(hit, _)| hit)
}

/// Like [`simulate_hitting_time`] but also returns the full run record.
pub fn simulate_hitting_record(
    model: &TreeModel,
    scheme: TreeScheme,
    capacity: usize,
    seed: u64,
    max_cycles: u64,
) -> Result<(HittingTime, crate::engine::RunRecord), TreeError> {
    let problem = TreeProblem::new(*model);
    let (capacity, selection, deletion) = scheme.build(capacity);
    let mut config = EngineConfig::new("uniform", "random", capacity);
    config.crossover_probability = 0.0;
    config.mutation_probability = 1.0;
    config.seed = seed;
    let mut engine = engine::Engine::with_schemes(&problem, &config, selection, deletion)?;
    engine.run(&StoppingRule::target(max_cycles));
    let hit = HittingTime {
        cycles: engine.cycles(),
        censored: engine.t_target().is_none(),
    };
    Ok((hit, engine.record()))
}

/// Heuristic expected optimization times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeuristicTimes {
    pub random_walk: f64,
    pub fuss: f64,
    pub fuds: f64,
    pub standard: f64,
}

/// Rule-of-thumb times: random walk `(b/p)^F`, FUSS `F^2 s b / (2p)`,
/// FUDS `2 F s b / p`, standard selection at least `F |P| b / p`.
pub fn heuristic_times(
    levels: u32,
    branching: u32,
    species_per_level: u32,
    evolution_probability: f64,
    capacity: usize,
) -> HeuristicTimes {
    let f = levels as f64;
    let b_over_p = branching as f64 / evolution_probability;
    let s = species_per_level as f64;
    HeuristicTimes {
        random_walk: b_over_p.powf(f),
        fuss: 0.5 * f * f * s * b_over_p,
        fuds: 2.0 * f * s * b_over_p,
        standard: f * capacity as f64 * b_over_p,
    }
}

/// Convenience wrapper keeping the ad-hoc schemes available through the
/// registry-based engine configuration.
pub fn registry_with_tree_schemes() -> SchemeRegistry {
    let mut registry = SchemeRegistry::builtin();
    registry.register_selection(
        "elitist-half",
        "half top level, half uniform below",
        |name, arg| {
            if let Some(a) = arg {
                return Err(crate::schemes::SchemeError::UnexpectedArgument {
                    name: name.to_string(),
                    arg: a.to_string(),
                });
            }
            Ok(Box::new(ElitistHalfSelection))
        },
    );
    registry
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_level_tree_is_a_degenerate_chain() {
        let m = TreeModel::build(2, 2, 2, 0.5).unwrap();
        assert_eq!(m.level_count(0), 1);
        assert_eq!(m.level_count(1), 1);
        assert_eq!(m.children(TreeModel::root()), vec![m.optimum()]);
        assert_eq!(m.parent(m.optimum()), Some(TreeModel::root()));
    }

    #[test]
    fn four_level_tree_has_two_fertile_per_interior_level() {
        let m = TreeModel::build(4, 2, 4, 0.05).unwrap();
        for level in [1, 2] {
            assert_eq!(m.level_count(level), 4);
            assert_eq!(m.fertile_count(level), 2);
        }
        // exactly one top species, reached via the promising chain
        let mut sp = TreeModel::root();
        for _ in 0..3 {
            assert!(m.is_promising(sp));
            assert!(m.is_fertile(sp));
            sp = m.child(sp, 0).unwrap();
        }
        assert_eq!(sp, m.optimum());
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(matches!(
            TreeModel::build(1, 2, 2, 0.5),
            Err(TreeError::TooFewLevels(1))
        ));
        assert!(matches!(
            TreeModel::build(3, 2, 1, 0.5),
            Err(TreeError::TooFewSpecies { .. })
        ));
        assert!(matches!(
            TreeModel::build(3, 2, 4, 1.5),
            Err(TreeError::BadEvolutionProbability(_))
        ));
    }

    #[test]
    fn mutate_branches_match_the_model() {
        let m = TreeModel::build(4, 2, 4, 0.05).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        // local optima devolve on every draw
        let local_opt = SpeciesId { level: 1, index: 3 };
        assert!(!m.is_fertile(local_opt));
        for _ in 0..20 {
            assert_eq!(m.mutate(local_opt, &mut rng), TreeModel::root());
        }
        // interior fertile species either evolve to a child or fall to root
        let mid = SpeciesId { level: 1, index: 1 };
        for _ in 0..200 {
            let next = m.mutate(mid, &mut rng);
            assert!(next == TreeModel::root() || next.level == 2);
        }
        // fertile species whose slots are all empty can only stay or fall
        let childless = SpeciesId { level: 2, index: 1 };
        assert!(m.is_fertile(childless) && m.children(childless).is_empty());
        for _ in 0..200 {
            let next = m.mutate(childless, &mut rng);
            assert!(next == TreeModel::root() || next == childless);
        }
        // the root never leaves level 0 except by evolving
        for _ in 0..200 {
            let next = m.mutate(TreeModel::root(), &mut rng);
            assert!(next.level <= 1);
            if next.level == 0 {
                assert_eq!(next, TreeModel::root());
            }
        }
    }

    #[test]
    fn fertile_evolution_is_uniform_over_children() {
        let m = TreeModel::build(4, 2, 4, 0.999).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sp = SpeciesId { level: 1, index: 0 };
        let n = 100_000;
        let mut counts = [0usize; 2];
        let mut devolved = 0usize;
        for _ in 0..n {
            let next = m.mutate(sp, &mut rng);
            if next.level == 2 {
                counts[next.index as usize] += 1;
            } else {
                devolved += 1;
            }
        }
        // p = 0.999 so almost every draw evolves; each child gets half
        let evolved = (n - devolved) as f64;
        let sigma = (evolved * 0.25).sqrt();
        assert!((counts[0] as f64 - evolved / 2.0).abs() < 4.0 * sigma);
    }

    #[test]
    fn two_level_walk_hits_in_b_over_p_steps() {
        let m = TreeModel::build(2, 2, 2, 0.5).unwrap();
        let mut total = 0u64;
        let reps = 1_000;
        for r in 0..reps {
            let h = simulate_hitting_time(&m, TreeScheme::RandomWalk, 1, 1000 + r, 100_000)
                .unwrap();
            assert!(!h.censored);
            total += h.cycles;
        }
        let mean = total as f64 / reps as f64;
        // geometric with success 1/4: mean 4, sd 2*sqrt(3); 4 sigma band
        let sigma = (4.0f64 * 3.0).sqrt() / (reps as f64).sqrt();
        assert!(
            (mean - 4.0).abs() < 4.0 * sigma.max(0.1),
            "mean was {mean}"
        );
    }

    #[test]
    fn heuristic_times_match_formula_evaluation() {
        let t = heuristic_times(5, 2, 4, 0.01, 100);
        assert!((t.random_walk - 3.2e11).abs() / 3.2e11 < 1e-12);
        assert!((t.fuss - 10_000.0).abs() < 1e-9);
        assert!((t.fuds - 8_000.0).abs() < 1e-9);
        assert!((t.standard - 100_000.0).abs() < 1e-9);
    }

    #[test]
    fn fuss_on_two_levels_is_no_slower_than_the_walk() {
        let m = TreeModel::build(2, 2, 2, 0.5).unwrap();
        let reps = 400;
        let mut fuss = 0u64;
        let mut walk = 0u64;
        for r in 0..reps {
            fuss += simulate_hitting_time(&m, TreeScheme::Fuss, 10, 77 + r, 100_000)
                .unwrap()
                .cycles;
            walk += simulate_hitting_time(&m, TreeScheme::RandomWalk, 1, 977 + r, 100_000)
                .unwrap()
                .cycles;
        }
        // both are geometric(1/4) in cycles; allow generous slack
        assert!((fuss as f64) < walk as f64 * 1.3);
    }

    #[test]
    fn hitting_time_grows_with_levels() {
        let reps = 150u64;
        let mut means = Vec::new();
        for levels in [3u32, 4, 5] {
            let m = TreeModel::build(levels, 2, 4, 0.2).unwrap();
            let mut total = 0u64;
            for r in 0..reps {
                total += simulate_hitting_time(&m, TreeScheme::Fuss, 20, 31 * r + 7, 10_000_000)
                    .unwrap()
                    .cycles;
            }
            means.push(total as f64 / reps as f64);
        }
        assert!(means[0] < means[1] && means[1] < means[2], "{means:?}");
    }

    #[test]
    fn scheme_ids_round_trip() {
        for id in ["rw", "fuss", "elitist", "tour:4"] {
            assert_eq!(TreeScheme::parse(id).unwrap().id(), id);
        }
        assert!(TreeScheme::parse("anneal").is_err());
    }
}
