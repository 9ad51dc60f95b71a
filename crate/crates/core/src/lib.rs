//! Exact constructions and verifiers for anonymity-revealing probability
//! arrays (ARPAs) and their Boolean counterparts (CPAs).
//!
//! The pipeline runs: solve the small LP over regular CPAs exactly, build the
//! optimal regular CPA, encode it as a signed weight vector, lift that to an
//! ARPA and verify the result.

pub mod designs;
pub mod error;
pub mod exactmath;
pub mod fixtures;
pub mod io;
pub mod lift;
pub mod lp;
pub mod regular;
pub mod suites;

pub use error::{Error, Result};
