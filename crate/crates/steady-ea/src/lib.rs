//! Steady-state evolutionary optimization toolkit.
//!
//! The engine adds and removes one individual per cycle, with the selection
//! and deletion behavior supplied as named strategies: fitness uniform
//! selection (`fuss`), tournament (`tour:<k>`), uniform and scale-independent
//! selection (`sis`, `sisp`), and on the deletion side uniform removal,
//! fitness uniform deletion (`fuds`), closest-pair, and scale-independent
//! deletion (`sid`). Benchmark bindings cover a deceptive feature-combination
//! landscape, random-distance TSP, set covering, and MAX-SAT, plus a species
//! tree model for comparing schemes against their heuristic optimization
//! times.

pub mod diversity;
pub mod engine;
pub mod experiment;
pub mod io;
pub mod population;
pub mod problems;
pub mod schemes;
pub mod stats;
pub mod tree;

pub use engine::{generations_of, Engine, EngineConfig, RunRecord, StepReport, StoppingRule};
pub use population::{fitness_level_index, BinConfig, FitnessIndex, MemberId, Population};
pub use problems::Problem;
pub use schemes::{DeletionScheme, SchemeRegistry, SelectionScheme};
