//! Scenario files in, deterministic JSON and CSV reports out.

pub mod emit;
pub mod expr;
pub mod runner;
pub mod scenario;

pub use emit::{emit, Format};
pub use runner::{run, RunOptions, RunReport};
pub use scenario::{load_scenario, Scenario, ScenarioError};
