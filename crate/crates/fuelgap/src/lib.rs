//! Bivariate copula modeling of within-garage fuel-economy gaps.
//!
//! The library covers the full workflow: ingest paired vehicle records,
//! rank-transform to pseudo-observations, fit 21 copula families by exact
//! maximum likelihood, rank them by information criteria with Vuong/Clarke
//! checks, diagnose fit through lambda-functions, and simulate gap pairs for
//! prediction reports and cross-tabulations.
//!
//! Start with the runnable programs under `examples/`; the `fuelgap` binary
//! wires the same calls into a pipeline CLI.

pub mod cli;
pub mod copula;
pub mod data;
pub mod error;
pub mod estimate;
pub mod fixtures;
pub mod num;
pub mod select;
pub mod simulate;

pub use copula::{
    validate_params, CopulaFamily, CopulaParams, FamilyKind, Rotation, TailDependence, UnitPair,
};
pub use error::{Error, Result};
