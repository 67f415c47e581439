//! Weighted ASE/EE objective and the SA / GA maximizers over the COP box.

mod ga;
mod objective;
mod sa;

pub use ga::{ga_optimize, GaParams};
pub use objective::{make_fitness, objective_value, ModelSet, ObjectiveSpec, Scheme, SurrogateFitness};
pub use sa::{cool, sa_optimize, sa_temp_update, CoolingSchedule, SaParams, SIGMA_WINDOW};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::netsim::{CopBounds, CopPoint};

/// Best-so-far gains below this count as no progress.
pub const CONVERGENCE_TOL: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptResult {
    pub best_cop: CopPoint,
    pub best_value: f64,
    /// Best-so-far value per iteration (SA) or generation (GA); entry 0 is
    /// the starting point or initial population.
    pub trace: Vec<f64>,
    pub iterations_to_converge: usize,
    /// SA temperatures aligned with `trace`; empty for GA.
    pub temperatures: Vec<f64>,
    pub n_evals: usize,
}

/// First iteration `i` after which the best-so-far trace gains less than
/// `tol` over the next `patience` iterations (or up to the end of the trace,
/// if it stops sooner).
pub fn convergence_iteration(trace: &[f64], tol: f64, patience: usize) -> usize {
    let last = trace.len().saturating_sub(1);
    (0..trace.len())
        .find(|&i| trace[(i + patience).min(last)] - trace[i] < tol)
        .unwrap_or(last)
}

pub(crate) fn patience_exhausted(trace: &[f64], patience: usize) -> bool {
    let n = trace.len();
    n > patience && trace[n - 1] - trace[n - 1 - patience] < CONVERGENCE_TOL
}

pub(crate) fn uniform_point<R: Rng + ?Sized>(bounds: &CopBounds, rng: &mut R) -> CopPoint {
    let r = bounds.ranges();
    CopPoint::from_array([0, 1, 2].map(|j| r[j].min + rng.random::<f64>() * r[j].width()))
}
