//! Configuration loading and execution for the `sensilab` binary.

pub mod config;
pub mod run;

pub use config::{load_config, ConfigError, ConfigSources, RunConfig, Subcommand};
pub use run::{run, RunError, RunReport};

/// Exit status for a run that completed with every built-in check passing.
pub const EXIT_OK: u8 = 0;
/// Failures that are neither validation nor numerical (I/O).
pub const EXIT_IO: u8 = 1;
/// Invalid configuration or unknown subcommand.
pub const EXIT_CONFIG: u8 = 2;
/// A computation failed its own tolerance or a built-in check failed.
pub const EXIT_NUMERICAL: u8 = 3;

/// Maps an error from [`load_config`] or [`run`] to its exit status.
pub fn exit_code_for(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<ConfigError>().is_some() {
        EXIT_CONFIG
    } else if let Some(RunError::Numerical(_)) = err.downcast_ref::<RunError>() {
        EXIT_NUMERICAL
    } else {
        EXIT_IO
    }
}
