use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{convergence_iteration, patience_exhausted, uniform_point, OptResult, CONVERGENCE_TOL};
use crate::error::{Error, Result};
use crate::netsim::{CopBounds, CopPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoolingSchedule {
    /// `T / (1 + ln(1+δ)·3σ·T)`
    Literal,
    /// `T / (1 + T·ln(1+δ)/(3σ))`
    Aarts,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SaParams {
    pub t0: f64,
    pub delta: f64,
    pub sigma: f64,
    pub max_iters: usize,
    pub patience: usize,
    pub step_frac: f64,
    pub schedule: CoolingSchedule,
    /// Replace `sigma` by the standard deviation of the last 50 objective
    /// values seen (falls back to `sigma` while that is zero).
    pub sigma_adaptive: bool,
}

impl Default for SaParams {
    fn default() -> Self {
        Self {
            t0: 250.0,
            delta: 1e-4,
            sigma: 0.01,
            max_iters: 2000,
            patience: 50,
            step_frac: 0.1,
            schedule: CoolingSchedule::Literal,
            sigma_adaptive: false,
        }
    }
}

pub const SIGMA_WINDOW: usize = 50;

impl SaParams {
    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64| v > 0.0 && v.is_finite();
        if !pos(self.t0) || !pos(self.delta) || !pos(self.sigma) {
            return Err(Error::invalid("t0, delta and sigma must be positive"));
        }
        if !(self.step_frac > 0.0 && self.step_frac <= 1.0) {
            return Err(Error::invalid(format!("step_frac must be in (0, 1], got {}", self.step_frac)));
        }
        if self.max_iters == 0 || self.patience == 0 {
            return Err(Error::invalid("max_iters and patience must be positive"));
        }
        Ok(())
    }
}

pub fn cool(t: f64, delta: f64, sigma: f64, schedule: CoolingSchedule) -> f64 {
    let l = delta.ln_1p();
    match schedule {
        CoolingSchedule::Literal => t / (1.0 + l * 3.0 * sigma * t),
        CoolingSchedule::Aarts => t / (1.0 + t * l / (3.0 * sigma)),
    }
}

pub fn sa_temp_update(t: f64, p: &SaParams) -> f64 {
    cool(t, p.delta, p.sigma, p.schedule)
}

fn std_dev(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n).sqrt()
}

/// Maximize `fitness` over `bounds` by simulated annealing.
pub fn sa_optimize<F, R>(fitness: F, bounds: &CopBounds, p: &SaParams, rng: &mut R) -> Result<OptResult>
where
    F: Fn(&CopPoint) -> f64,
    R: Rng + ?Sized,
{
    p.validate()?;
    bounds.validate()?;
    let ranges = bounds.ranges();
    let mut x = uniform_point(bounds, rng);
    let mut fx = fitness(&x);
    let (mut best, mut best_f) = (x, fx);
    let mut t = p.t0;
    let mut trace = vec![best_f];
    let mut temps = vec![t];
    let mut window: Vec<f64> = vec![fx];
    let mut n_evals = 1;

    for _ in 0..p.max_iters {
        let mut v = x.to_array();
        for (j, r) in ranges.iter().enumerate() {
            let z: f64 = StandardNormal.sample(rng);
            v[j] = r.clamp(v[j] + z * p.step_frac * r.width());
        }
        let cand = CopPoint::from_array(v);
        let fc = fitness(&cand);
        n_evals += 1;
        let d = fc - fx;
        if d >= 0.0 || rng.random::<f64>() < (d / t).exp() {
            x = cand;
            fx = fc;
        }
        if fc > best_f {
            best = cand;
            best_f = fc;
        }
        trace.push(best_f);

        let sigma = if p.sigma_adaptive {
            if window.len() == SIGMA_WINDOW {
                window.remove(0);
            }
            window.push(fc);
            let s = std_dev(&window);
            if s > 0.0 {
                s
            } else {
                p.sigma
            }
        } else {
            p.sigma
        };
        t = cool(t, p.delta, sigma, p.schedule);
        temps.push(t);

        if patience_exhausted(&trace, p.patience) {
            break;
        }
    }

    Ok(OptResult {
        best_cop: best,
        best_value: best_f,
        iterations_to_converge: convergence_iteration(&trace, CONVERGENCE_TOL, p.patience),
        trace,
        temperatures: temps,
        n_evals,
    })
}
