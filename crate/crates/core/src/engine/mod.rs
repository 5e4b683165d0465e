//! The genetic algorithm: selection, variation, learning modes and the
//! ranked gate set.

pub mod config;
pub mod eigs;
pub mod operators;
pub mod run;
pub mod selection;

pub use config::{GAConfig, GaMode, MutationKind};
pub use eigs::{Eigs, EigsEntry};
pub use operators::{mutate, two_point_crossover, wgs_mutate, GateSource};
pub use run::{render_circuit, run, Engine, Individual, RunReport};
pub use selection::{sus_select, sus_with_offset};
