//! Scratch harness comparing tree-model devolution variants.

use rand::RngCore;
use rayon::prelude::*;
use steady_ea::engine::{self, EngineConfig, StoppingRule};
use steady_ea::problems::Problem;
use steady_ea::schemes::{
    DeletionScheme, FudsDeletion, FussSelection, RandomDeletion, ReplaceParentDeletion,
    SelectionScheme, TournamentSelection, UniformSelection,
};
use steady_ea::tree::{ElitistHalfSelection, SpeciesId, TreeModel, TreeProblem};

/// Variant: devolution drops straight to the primordial species.
#[derive(Clone)]
struct RootDevolveTree {
    model: TreeModel,
}

impl Problem for RootDevolveTree {
    type Genome = SpeciesId;
    fn id(&self) -> String {
        "tree-rootdev".to_string()
    }
    fn random_genome(&self, _rng: &mut dyn RngCore) -> SpeciesId {
        TreeModel::root()
    }
    fn mutate(&self, genome: &SpeciesId, rng: &mut dyn RngCore) -> SpeciesId {
        use rand::Rng;
        let m = &self.model;
        if m.is_fertile(*genome) && rng.gen::<f64>() < m.evolution_probability() {
            let slot = rng.gen_range(0..m.branching());
            return m.child(*genome, slot).unwrap_or(*genome);
        }
        TreeModel::root()
    }
    fn crossover(&self, a: &SpeciesId, _b: &SpeciesId, _rng: &mut dyn RngCore) -> SpeciesId {
        *a
    }
    fn fitness(&self, genome: &SpeciesId) -> f64 {
        genome.level as f64
    }
    fn fitness_bounds(&self) -> (f64, f64) {
        (0.0, (self.model.levels() - 1) as f64)
    }
    fn target_reached(&self, fitness: f64) -> bool {
        fitness >= (self.model.levels() - 1) as f64
    }
}

fn schemes_for(
    name: &str,
    capacity: usize,
) -> (usize, Box<dyn SelectionScheme>, Box<dyn DeletionScheme>) {
    match name {
        "rw" => (
            1,
            Box::new(UniformSelection),
            Box::new(ReplaceParentDeletion),
        ),
        "fuss" => (capacity, Box::new(FussSelection), Box::new(RandomDeletion)),
        "elitist" => (
            capacity,
            Box::new(ElitistHalfSelection),
            Box::new(FudsDeletion),
        ),
        _ => {
            let k: usize = name.strip_prefix("tour:").unwrap().parse().unwrap();
            (
                capacity,
                Box::new(TournamentSelection::new(k)),
                Box::new(RandomDeletion),
            )
        }
    }
}

fn mean_time<P: Problem>(
    problem: &P,
    scheme: &str,
    capacity: usize,
    reps: u64,
    cap: u64,
    seed0: u64,
) -> (f64, u64, u64) {
    let results: Vec<(u64, bool)> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let (cap_pop, sel, del) = schemes_for(scheme, capacity);
            let mut config = EngineConfig::new("uniform", "random", cap_pop);
            config.crossover_probability = 0.0;
            config.mutation_probability = 1.0;
            config.seed = seed0 + r;
            let mut e = engine::Engine::with_schemes(problem, &config, sel, del).unwrap();
            e.run(&StoppingRule::target(cap));
            (e.cycles(), e.t_target().is_none())
        })
        .collect();
    let censored = results.iter().filter(|(_, c)| *c).count() as u64;
    let max = results.iter().map(|(t, _)| *t).max().unwrap();
    let mean = results.iter().map(|(t, _)| *t as f64).sum::<f64>() / reps as f64;
    (mean, censored, max)
}

fn main() {
    let reps = 200u64;
    let cap = 100_000_000u64;
    let model = TreeModel::build(5, 2, 4, 0.05).unwrap();
    let parent = TreeProblem::new(model);
    let root = RootDevolveTree { model };

    println!("== F=5 b=2 s=4 p=0.05 P=50, reps={reps} ==");
    for scheme in ["rw", "fuss", "elitist", "tour:2", "tour:4", "tour:12"] {
        let (mp, cp, xp) = mean_time(&parent, scheme, 50, reps, cap, 1000);
        let (mr, cr, xr) = mean_time(&root, scheme, 50, reps, cap, 1000);
        println!(
            "{scheme:8} parent: mean {mp:12.1} cens {cp} max {xp:10}  | root: mean {mr:12.1} cens {cr} max {xr:10}"
        );
    }

    println!("\n== |F| slope data (fuss vs elitist, 200 reps each) ==");
    for variant in ["parent", "root"] {
        for scheme in ["fuss", "elitist"] {
            let mut means = Vec::new();
            for levels in 3..=7u32 {
                let m = TreeModel::build(levels, 2, 4, 0.05).unwrap();
                let mean = if variant == "parent" {
                    mean_time(&TreeProblem::new(m), scheme, 50, reps, cap, 2000).0
                } else {
                    mean_time(&RootDevolveTree { model: m }, scheme, 50, reps, cap, 2000).0
                };
                means.push(mean);
            }
            let xs: Vec<f64> = (3..=7).map(|l| (l as f64).ln()).collect();
            let ys: Vec<f64> = means.iter().map(|m| m.ln()).collect();
            let mx = xs.iter().sum::<f64>() / 5.0;
            let my = ys.iter().sum::<f64>() / 5.0;
            let slope = xs
                .iter()
                .zip(&ys)
                .map(|(x, y)| (x - mx) * (y - my))
                .sum::<f64>()
                / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
            println!("{variant:6} {scheme:8} means {means:.0?} slope {slope:.3}");
        }
    }
}
