//! Parsing, orchestration and report emission for the `capax` binary.

pub mod config;
pub mod expr;
pub mod run;

pub use config::{parse_config, Artifact, ConfigError, ConfigFile, JobConfig};
pub use expr::{format_map, parse_map, ParseError};
pub use run::{check, repro, run, RunOutput, EXIT_NOT_GOOD, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE};

/// Sizes the global worker pool from `CAPAX_THREADS` (0 or unset = one
/// worker per core).
pub fn configure_threads() {
    let Ok(value) = std::env::var("CAPAX_THREADS") else {
        return;
    };
    match value.trim().parse::<usize>() {
        Ok(0) => {}
        Ok(n) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                log::warn!("could not size the thread pool: {e}");
            }
        }
        Err(_) => log::warn!("ignoring CAPAX_THREADS={value:?}"),
    }
}
