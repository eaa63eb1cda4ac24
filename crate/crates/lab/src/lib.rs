//! Parallel drivers, modulus-family scans, CSV/JSON formats and the
//! `lehmer-lab` command line, built on [`lehmer_core`].

pub mod checks;
pub mod cli;
mod error;
pub mod output;
pub mod par;
pub mod scan;

pub use error::{Error, Result};
