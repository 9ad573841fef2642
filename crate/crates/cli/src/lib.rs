//! Command-line front end for `npspectra`.
//!
//! Every command computes a result [`document::Document`], writes its CSV,
//! JSON and SVG renderings under names of the form `{stem}_{hash}.{ext}`, and
//! prints a summary derived from the document. `report` re-reads a JSON
//! document and prints the same summary.

pub mod config;
pub mod document;
pub mod error;
pub mod run;
pub mod svg;

pub use config::{parse_config, CommandName, RunConfig};
pub use error::CliError;
pub use run::{execute, RunOutcome};

/// Sizes the global worker pool from `NPSPECTRA_THREADS` when it is set.
pub fn configure_threads(value: Option<&str>) -> Result<(), CliError> {
    let Some(v) = value else { return Ok(()) };
    let n: usize = v.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| {
        CliError::Usage(format!(
            "NPSPECTRA_THREADS must be a positive integer, got `{v}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot size the worker pool: {e}")))
}
