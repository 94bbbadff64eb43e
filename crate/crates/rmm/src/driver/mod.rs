//! Problem setup, rezoning, configuration, output and the time loop.

pub mod config;
pub mod output;
pub mod problems;
pub mod rezone;
pub mod rng;
pub mod run;

pub use config::RunConfig;
pub use problems::{exact_advected_averages, Problem, ProblemKind, Quadratic};
pub use rezone::{lagrangian_smooth_rezone, lipschitz_estimate, random_rezone, RezonerSpec};
pub use run::{error_norms, run_config, Settings, Simulation, StepDiagnostics};
