//! Benchmark targets, multi-run campaigns and hand-built reference circuits.

pub mod benchmarks;
pub mod campaign;
pub mod constructions;

pub use benchmarks::{load_benchmark, Benchmark, BENCHMARKS};
pub use campaign::{comparison_table, run_campaign, Aggregate, CampaignResult, RunRecord, DEFAULT_RUNS};
pub use constructions::{render_checks, verify_constructions, ConstructionCheck};
