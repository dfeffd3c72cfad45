//! Command line, parallel rendering, file formats and verification suites
//! on top of `quadmod-core`.

pub mod cli;
pub mod error;
pub mod json;
pub mod render;
pub mod suites;
pub mod threads;
pub mod twist_table;

pub use error::CliError;
