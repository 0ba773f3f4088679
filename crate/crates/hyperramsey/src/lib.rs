//! File formats, reports and the command line front end for `hyperramsey-core`.

pub mod cli;
pub mod format;
pub mod report;

pub use cli::run_cli;
