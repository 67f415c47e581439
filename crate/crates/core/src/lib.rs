//! Positioning-error compensation for user-centric ultra-dense networks.
//!
//! The crate is organised as a pipeline:
//!
//! * [`netsim`] simulates network snapshots and produces ASE/EE KPIs.
//! * [`datagen`] sweeps the COP grid into paired ideal/erroneous databases.
//! * [`surrogate`] fits tree-ensemble regressors (Model-E, Model-R).
//! * [`optimizer`] maximizes the weighted KPI objective with SA and GA.
//! * [`pipeline`] wires everything into reproducible experiments and reports.

pub mod datagen;
pub mod error;
pub mod netsim;
pub mod optimizer;
pub mod pipeline;
pub mod rng;
pub mod surrogate;

pub use error::{Error, Result};
