//! Szone scheduling and DBS association on perceived positions.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::geometry::SpatialGrid;
use super::Deployment;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScheduleResult {
    /// `(ue_index, dbs_index)` in scheduling order.
    pub served: Vec<(usize, usize)>,
    /// Scheduled UEs with no DBS inside their Szone.
    pub unserved_scheduled: usize,
    /// UEs pushed to a later interval by the separation rule.
    pub deferred: usize,
}

impl ScheduleResult {
    pub fn scheduled(&self) -> usize {
        self.served.len() + self.unserved_scheduled
    }
}

/// Greedy Szone scheduling in a uniformly random priority order.
pub fn schedule_and_associate<R: Rng + ?Sized>(dep: &Deployment, r_sz: f64, rng: &mut R) -> Result<ScheduleResult> {
    schedule_and_associate_with(dep, r_sz, 1.0, rng)
}

/// As [`schedule_and_associate`], optionally letting UEs without an in-zone
/// DBS reach an idle DBS within `expansion · r_sz` (`expansion = 1` disables).
pub fn schedule_and_associate_with<R: Rng + ?Sized>(
    dep: &Deployment,
    r_sz: f64,
    expansion: f64,
    rng: &mut R,
) -> Result<ScheduleResult> {
    if !(r_sz > 0.0) || !r_sz.is_finite() {
        return Err(Error::invalid(format!("Szone radius must be > 0, got {r_sz}")));
    }
    if !(expansion >= 1.0) || !expansion.is_finite() {
        return Err(Error::invalid(format!("Szone expansion factor must be >= 1, got {expansion}")));
    }
    let mut order: Vec<usize> = (0..dep.ues.len()).collect();
    order.shuffle(rng);
    Ok(schedule_in_order(dep, r_sz, expansion, &order))
}

/// Deterministic core of the scheduler for a given priority order.
pub fn schedule_in_order(dep: &Deployment, r_sz: f64, expansion: f64, order: &[usize]) -> ScheduleResult {
    let mut out = ScheduleResult::default();
    if dep.ues.is_empty() {
        return out;
    }
    let sep = 2.0 * r_sz;
    let sep2 = sep * sep;
    let ue_pos: Vec<_> = dep.ues.iter().map(|n| n.perceived).collect();
    let mut sched_grid = SpatialGrid::covering(&ue_pos, sep);
    let mut scheduled = Vec::new();
    for &u in order {
        let p = ue_pos[u];
        let mut clear = true;
        sched_grid.for_each_candidate(&p, sep, |s| {
            if clear && ue_pos[s].dist2(&p) <= sep2 {
                clear = false;
            }
        });
        if clear {
            sched_grid.insert(u, &p);
            scheduled.push(u);
        } else {
            out.deferred += 1;
        }
    }

    let dbs_pos: Vec<_> = dep.dbs.iter().map(|n| n.perceived).collect();
    let reach = r_sz * expansion;
    let mut dbs_grid = SpatialGrid::covering(&dbs_pos, reach);
    for (i, p) in dbs_pos.iter().enumerate() {
        dbs_grid.insert(i, p);
    }
    let mut active = vec![false; dep.dbs.len()];
    let mut waiting = Vec::new();
    for &u in &scheduled {
        match nearest_within(&dbs_grid, &dbs_pos, &ue_pos[u], r_sz, &active) {
            Some(b) => {
                active[b] = true;
                out.served.push((u, b));
            }
            None => waiting.push(u),
        }
    }
    if expansion > 1.0 {
        waiting.retain(|&u| match nearest_within(&dbs_grid, &dbs_pos, &ue_pos[u], reach, &active) {
            Some(b) => {
                active[b] = true;
                out.served.push((u, b));
                false
            }
            None => true,
        });
    }
    out.unserved_scheduled = waiting.len();
    out
}

fn nearest_within(
    grid: &SpatialGrid,
    pos: &[super::Point2D],
    p: &super::Point2D,
    radius: f64,
    taken: &[bool],
) -> Option<usize> {
    let r2 = radius * radius;
    let mut best: Option<(f64, usize)> = None;
    grid.for_each_candidate(p, radius, |i| {
        if taken[i] {
            return;
        }
        let d2 = pos[i].dist2(p);
        if d2 <= r2 {
            let better = match best {
                None => true,
                Some((bd, bi)) => d2 < bd || (d2 == bd && i < bi),
            };
            if better {
                best = Some((d2, i));
            }
        }
    });
    best.map(|(_, i)| i)
}
