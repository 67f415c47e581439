use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{convergence_iteration, patience_exhausted, uniform_point, OptResult, CONVERGENCE_TOL};
use crate::error::{Error, Result};
use crate::netsim::{CopBounds, CopPoint};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GaParams {
    pub pop_size: usize,
    pub generations: usize,
    pub tournament: usize,
    /// BLX-α blend extent.
    pub blend_alpha: f64,
    pub mutation_prob: f64,
    /// Mutation standard deviation as a fraction of each range.
    pub mutation_scale: f64,
    pub elite: usize,
    pub patience: usize,
}

impl Default for GaParams {
    fn default() -> Self {
        Self {
            pop_size: 24,
            generations: 200,
            tournament: 2,
            blend_alpha: 0.5,
            mutation_prob: 0.1,
            mutation_scale: 0.1,
            elite: 1,
            patience: 10,
        }
    }
}

impl GaParams {
    pub fn validate(&self) -> Result<()> {
        if self.pop_size < 2 {
            return Err(Error::invalid(format!("pop_size must be at least 2, got {}", self.pop_size)));
        }
        if self.elite >= self.pop_size {
            return Err(Error::invalid("elite count must be below pop_size"));
        }
        if self.tournament == 0 || self.generations == 0 || self.patience == 0 {
            return Err(Error::invalid("tournament, generations and patience must be positive"));
        }
        if !(self.blend_alpha >= 0.0) || !(0.0..=1.0).contains(&self.mutation_prob) || !(self.mutation_scale >= 0.0) {
            return Err(Error::invalid("blend_alpha, mutation_prob or mutation_scale out of range"));
        }
        Ok(())
    }
}

/// Index of the tournament winner; ties go to the earlier draw.
fn tournament<R: Rng + ?Sized>(fit: &[f64], size: usize, rng: &mut R) -> usize {
    let mut best = rng.random_range(0..fit.len());
    for _ in 1..size {
        let c = rng.random_range(0..fit.len());
        if fit[c] > fit[best] {
            best = c;
        }
    }
    best
}

/// Maximize `fitness` over `bounds` with a real-coded genetic algorithm.
/// The trace holds the best fitness of each generation, starting with the
/// initial population.
pub fn ga_optimize<F, R>(fitness: F, bounds: &CopBounds, p: &GaParams, rng: &mut R) -> Result<OptResult>
where
    F: Fn(&CopPoint) -> f64 + Sync,
    R: Rng + ?Sized,
{
    p.validate()?;
    bounds.validate()?;
    let ranges = bounds.ranges();
    let mut pop: Vec<CopPoint> = (0..p.pop_size).map(|_| uniform_point(bounds, rng)).collect();
    let mut fit: Vec<f64> = pop.par_iter().map(&fitness).collect();
    let mut n_evals = pop.len();

    let best_of = |fit: &[f64]| -> usize {
        let mut b = 0;
        for (i, &f) in fit.iter().enumerate() {
            if f > fit[b] {
                b = i;
            }
        }
        b
    };
    let b = best_of(&fit);
    let (mut best, mut best_f) = (pop[b], fit[b]);
    let mut trace = vec![best_f];

    for _gen in 1..=p.generations {
        let mut order: Vec<usize> = (0..pop.len()).collect();
        order.sort_by(|&a, &b| fit[b].total_cmp(&fit[a]).then(a.cmp(&b)));
        let mut next: Vec<CopPoint> = order[..p.elite].iter().map(|&i| pop[i]).collect();
        let mut next_fit: Vec<f64> = order[..p.elite].iter().map(|&i| fit[i]).collect();

        let mut children = Vec::with_capacity(p.pop_size - p.elite);
        while next.len() + children.len() < p.pop_size {
            let a = pop[tournament(&fit, p.tournament, rng)].to_array();
            let b = pop[tournament(&fit, p.tournament, rng)].to_array();
            let mut c = [0.0; 3];
            for (j, r) in ranges.iter().enumerate() {
                let (lo, hi) = (a[j].min(b[j]), a[j].max(b[j]));
                let ext = p.blend_alpha * (hi - lo);
                let mut v = lo - ext + rng.random::<f64>() * (hi - lo + 2.0 * ext);
                if rng.random::<f64>() < p.mutation_prob {
                    let z: f64 = StandardNormal.sample(rng);
                    v += z * p.mutation_scale * r.width();
                }
                c[j] = r.clamp(v);
            }
            children.push(CopPoint::from_array(c));
        }
        let child_fit: Vec<f64> = children.par_iter().map(&fitness).collect();
        n_evals += children.len();
        next.extend(children);
        next_fit.extend(child_fit);
        pop = next;
        fit = next_fit;
        debug_assert_eq!(pop.len(), p.pop_size);

        let b = best_of(&fit);
        if fit[b] > best_f {
            best = pop[b];
            best_f = fit[b];
        }
        trace.push(fit[b]);
        if patience_exhausted(&trace, p.patience) {
            break;
        }
    }

    Ok(OptResult {
        best_cop: best,
        best_value: best_f,
        iterations_to_converge: convergence_iteration(&trace, CONVERGENCE_TOL, p.patience),
        trace,
        temperatures: Vec::new(),
        n_evals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tournament_uses_comparisons_only() {
        let fit = [0.1, 0.5, 0.3, 0.9, 0.2];
        let warped: Vec<f64> = fit.iter().map(|f: &f64| (5.0 * f).exp() - 3.0).collect();
        for seed in 0..50 {
            let mut r1 = crate::rng::SeedTree::root(seed).rng();
            let mut r2 = crate::rng::SeedTree::root(seed).rng();
            assert_eq!(tournament(&fit, 3, &mut r1), tournament(&warped, 3, &mut r2));
        }
    }

    #[test]
    fn rejects_bad_params() {
        assert!(GaParams { pop_size: 1, ..Default::default() }.validate().is_err());
        assert!(GaParams { elite: 24, ..Default::default() }.validate().is_err());
        assert!(GaParams { mutation_prob: 2.0, ..Default::default() }.validate().is_err());
    }
}
