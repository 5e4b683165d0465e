//! Evolutionary synthesis of quantum circuits over qubits and qutrits.

pub mod bench;
pub mod circuit;
pub mod engine;
pub mod error;
pub mod eval;
pub mod gates;
pub mod genome;
pub mod minimize;
pub mod tensor;

pub use circuit::{Block, Circuit, Placed};
pub use error::{Error, Result};
pub use eval::{evaluate, Evaluation, FitnessMode, FitnessParams, TargetSpec};
pub use gates::{Catalog, CostModel, GateDef, GateOrigin, WireRestriction};
pub use genome::{decode, encode, random_genome, validate_restrictions, GateLexicon, GatePool, Genome};
pub use minimize::{minimize, LearningMode, MergeEvent, Minimized};
pub use tensor::{ComplexMatrix, Tolerance, C64};
