//! Scenario files, trajectory export and the command implementations behind
//! the `hierflow` binary.

pub mod output;
pub mod scenario;

pub use output::{run_scenario, trajectory_csv, RunOutput};
pub use scenario::{parse_scenario, serialize_scenario, Diagnostic, ParseError, Scenario};
