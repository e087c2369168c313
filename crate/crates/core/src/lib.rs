//! Exact verification workbench for special Dirichlet L-values, axiomatic summation
//! of divergent series, twisted Virasoro operators on a truncated Fock space and
//! the q-series identities that describe their characters.

#![allow(clippy::needless_range_loop, clippy::should_implement_trait)]

pub mod characters;
pub mod cocycle;
pub mod error;
pub mod exactnum;
pub mod fock;
pub mod lvalues;
pub mod qseries;
pub mod report;
pub mod summation;

pub use error::{Error, Result};
