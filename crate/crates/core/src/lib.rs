//! Exact counting and exponential-sum evaluation for the generalized Lehmer
//! problem: how often the residues of `n^{k_1}, ..., n^{k_s}` modulo `q`
//! (negative exponents meaning powers of the modular inverse) fall into
//! prescribed arithmetic progressions `a_j (mod m_j)`, for `n` ranging over
//! the reduced residue system modulo `q`.
//!
//! The crate is `no_std` and only needs `alloc`. Parallel drivers, file
//! formats and the command-line front end live in the `lehmer-lab` crate.
#![no_std]

extern crate alloc;

pub mod analysis;
pub mod counting;
mod error;
pub mod expsum;
pub mod ntcore;
mod rational;

pub use error::{Error, Result};
pub use rational::Rational;
