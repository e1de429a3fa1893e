//! Monte Carlo and analytic tools for genetic hitchhiking when the selected
//! allele can arise by recurrent mutation.
//!
//! The crate simulates the beneficial allele's frequency path
//! ([`path`]), traces a neutral sample back along it through the structured
//! coalescent ([`coalescent`]), approximates the same genealogy with a marked
//! Yule forest ([`yule`]) and evaluates the closed-form results
//! ([`analytics`]). [`harness`] ties them into reproducible experiments.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod coalescent;
pub mod error;
pub mod harness;
pub mod params;
pub mod partition;
pub mod path;
pub mod rng;
pub mod stats;
pub mod yule;

pub use error::{Error, Result};
pub use params::SweepParams;
pub use partition::Partition;
