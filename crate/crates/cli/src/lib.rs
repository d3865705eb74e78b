//! Scenario files and command execution for the `tipping` binary.

pub mod run;
pub mod scenario;
