//! Selection and deletion strategies behind common traits, registered by
//! name so runs can pick them from config or the command line.
//!
//! Selection ids: `uniform | tour:<k> | fuss | sis | sisp`.
//! Deletion ids: `random | fuds | closest | sid`.

pub mod deletion;
pub mod selection;
pub mod weights;

use rand::RngCore;
use thiserror::Error;

use crate::population::{FitnessIndex, MemberId};

pub use deletion::{
    ClosestPairDeletion, FudsDeletion, RandomDeletion, ReplaceParentDeletion,
    ScaleIndependentDeletion,
};
pub use selection::{
    fuss_selection_probabilities, tournament_winner, FussSelection, ScaleIndependentPairSelection,
    ScaleIndependentSelection, TournamentSelection, UniformSelection,
};
pub use weights::{
    scale_independent_pair_weights, scale_independent_weights, FitnessLevelSet, PairWeights,
    SelectionWeights, WeightsError,
};

#[derive(Debug, Error)]
pub enum SchemeError {
    #[error("unknown selection scheme '{0}'")]
    UnknownSelection(String),
    #[error("unknown deletion scheme '{0}'")]
    UnknownDeletion(String),
    #[error("scheme '{name}' does not take an argument '{arg}'")]
    UnexpectedArgument { name: String, arg: String },
    #[error("scheme '{name}' has a bad argument: {reason}")]
    BadArgument { name: String, reason: String },
}

/// Chooses parents from the population. Implementations must be pure
/// functions of the fitness index and the RNG.
pub trait SelectionScheme: Send + Sync {
    /// The runtime identifier, e.g. `tour:4`.
    fn id(&self) -> String;

    fn select(&self, idx: &FitnessIndex, rng: &mut dyn RngCore) -> MemberId;

    /// Two parents for crossover. The default draws them independently
    /// through `select` (self-mating permitted); pair schemes override this
    /// with a joint draw.
    fn select_parents(&self, idx: &FitnessIndex, rng: &mut dyn RngCore) -> (MemberId, MemberId) {
        (self.select(idx, rng), self.select(idx, rng))
    }

    fn is_pair_scheme(&self) -> bool {
        false
    }
}

/// What a deletion scheme gets to see about the cycle it is deleting for.
#[derive(Debug, Clone, Copy)]
pub struct StepContext {
    /// The freshly inserted child (deletable like everyone else).
    pub child: MemberId,
    /// The first parent the child was bred from.
    pub parent: MemberId,
}

/// Picks the member to remove once the population runs over capacity.
pub trait DeletionScheme: Send + Sync {
    fn id(&self) -> String;

    fn choose_victim(
        &self,
        idx: &FitnessIndex,
        ctx: &StepContext,
        rng: &mut dyn RngCore,
    ) -> MemberId;
}

type SelectionFactory = fn(&str, Option<&str>) -> Result<Box<dyn SelectionScheme>, SchemeError>;
type DeletionFactory = fn(&str, Option<&str>) -> Result<Box<dyn DeletionScheme>, SchemeError>;

struct SelectionEntry {
    name: &'static str,
    summary: &'static str,
    build: SelectionFactory,
}

struct DeletionEntry {
    name: &'static str,
    summary: &'static str,
    build: DeletionFactory,
}

/// Name-indexed strategy registry. `builtin()` carries every scheme the
/// toolkit ships; custom schemes can be added by embedders.
pub struct SchemeRegistry {
    selections: Vec<SelectionEntry>,
    deletions: Vec<DeletionEntry>,
}

fn no_arg(name: &str, arg: Option<&str>) -> Result<(), SchemeError> {
    match arg {
        None => Ok(()),
        Some(a) => Err(SchemeError::UnexpectedArgument {
            name: name.to_string(),
            arg: a.to_string(),
        }),
    }
}

impl SchemeRegistry {
    pub fn builtin() -> Self {
        let mut reg = SchemeRegistry {
            selections: Vec::new(),
            deletions: Vec::new(),
        };
        reg.register_selection("uniform", "uniform draw over members", |name, arg| {
            no_arg(name, arg)?;
            Ok(Box::new(UniformSelection))
        });
        reg.register_selection("tour", "tournament of k members, fittest wins", |name, arg| {
            let k: usize = arg
                .ok_or_else(|| SchemeError::BadArgument {
                    name: name.to_string(),
                    reason: "missing tournament size, use tour:<k>".to_string(),
                })?
                .parse()
                .map_err(|_| SchemeError::BadArgument {
                    name: name.to_string(),
                    reason: "tournament size must be an integer".to_string(),
                })?;
            if k < 1 {
                return Err(SchemeError::BadArgument {
                    name: name.to_string(),
                    reason: "tournament size must be at least 1".to_string(),
                });
            }
            Ok(Box::new(TournamentSelection::new(k)))
        });
        reg.register_selection("fuss", "fitness uniform selection", |name, arg| {
            no_arg(name, arg)?;
            Ok(Box::new(FussSelection))
        });
        reg.register_selection("sis", "scale-independent selection", |name, arg| {
            no_arg(name, arg)?;
            Ok(Box::new(ScaleIndependentSelection))
        });
        reg.register_selection("sisp", "scale-independent pair selection", |name, arg| {
            no_arg(name, arg)?;
            Ok(Box::new(ScaleIndependentPairSelection))
        });
        reg.register_deletion("random", "uniform removal", |name, arg| {
            no_arg(name, arg)?;
            Ok(Box::new(RandomDeletion))
        });
        reg.register_deletion("fuds", "fitness uniform deletion", |name, arg| {
            no_arg(name, arg)?;
            Ok(Box::new(FudsDeletion))
        });
        reg.register_deletion("closest", "delete one of the closest fitness pair", |name, arg| {
            no_arg(name, arg)?;
            Ok(Box::new(ClosestPairDeletion))
        });
        reg.register_deletion("sid", "scale-independent deletion", |name, arg| {
            no_arg(name, arg)?;
            Ok(Box::new(ScaleIndependentDeletion))
        });
        reg
    }

    pub fn register_selection(
        &mut self,
        name: &'static str,
        summary: &'static str,
        build: SelectionFactory,
    ) {
        self.selections.push(SelectionEntry {
            name,
            summary,
            build,
        });
    }

    pub fn register_deletion(
        &mut self,
        name: &'static str,
        summary: &'static str,
        build: DeletionFactory,
    ) {
        self.deletions.push(DeletionEntry {
            name,
            summary,
            build,
        });
    }

    /// Builds a selection scheme from an id like `fuss` or `tour:4`.
    pub fn selection(&self, id: &str) -> Result<Box<dyn SelectionScheme>, SchemeError> {
        let (name, arg) = split_id(id);
        let entry = self
            .selections
            .iter()
            .find(|e| e.name == name)
            .ok_or_else(|| SchemeError::UnknownSelection(id.to_string()))?;
        (entry.build)(name, arg)
    }

    /// Builds a deletion scheme from an id like `random` or `fuds`.
    pub fn deletion(&self, id: &str) -> Result<Box<dyn DeletionScheme>, SchemeError> {
        let (name, arg) = split_id(id);
        let entry = self
            .deletions
            .iter()
            .find(|e| e.name == name)
            .ok_or_else(|| SchemeError::UnknownDeletion(id.to_string()))?;
        (entry.build)(name, arg)
    }

    pub fn selection_names(&self) -> Vec<(&'static str, &'static str)> {
        self.selections
            .iter()
            .map(|e| (e.name, e.summary))
            .collect()
    }

    pub fn deletion_names(&self) -> Vec<(&'static str, &'static str)> {
        self.deletions.iter().map(|e| (e.name, e.summary)).collect()
    }
}

fn split_id(id: &str) -> (&str, Option<&str>) {
    match id.split_once(':') {
        Some((name, arg)) => (name, Some(arg)),
        None => (id, None),
    }
}
