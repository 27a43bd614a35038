//! Exact construction, evaluation, simulation and brute-force verification
//! of one-dependent determinantal point processes: carries in base-b
//! addition, descents of random permutations and sequences, carries of
//! central group extensions, and the connectivity set of a permutation.

pub mod error;
pub mod catalog;
pub mod cli;
pub mod connectivity;
pub mod exact;
pub mod groupcarries;
pub mod onedep;
pub mod oracle;
pub mod stats;
pub mod symfunc;

pub use error::{Error, Result};
