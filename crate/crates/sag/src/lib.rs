//! File formats, configuration, experiment harness and command-line driver
//! for the `sag_core` solvers.

pub mod cli;
pub mod config;
pub mod error;
pub mod experiment;
pub mod io;

pub use config::Config;
pub use error::Failure;
