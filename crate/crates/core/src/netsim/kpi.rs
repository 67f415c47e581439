use serde::{Deserialize, Serialize};

use super::channel::LinkBudget;
use super::geometry::{inject_position_error, sample_ppp};
use super::schedule::schedule_and_associate_with;
use super::{CopPoint, Node, PowerModelParams, RadioParams, ScheduleResult};
use crate::error::{Error, Result};
use crate::rng::SeedTree;

/// Whether reported positions are exact (`Ideal`) or displaced (`Erroneous`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Ideal,
    Erroneous,
}

/// Everything about a network scenario that is not a COP.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    pub area_m2: f64,
    pub lambda_ue: f64,
    /// Szone expansion factor for UEs with no in-zone DBS; 1 disables it.
    pub rsz_expansion: f64,
    pub radio: RadioParams,
    pub power: PowerModelParams,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            area_m2: 1.0e6,
            lambda_ue: 0.0005,
            rsz_expansion: 1.0,
            radio: RadioParams::default(),
            power: PowerModelParams::default(),
        }
    }
}

impl SimParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.area_m2 > 0.0) || !self.area_m2.is_finite() {
            return Err(Error::Config {
                key: "area_m2".into(),
                msg: "must be > 0".into(),
            });
        }
        if !(self.lambda_ue >= 0.0) || !self.lambda_ue.is_finite() {
            return Err(Error::Config {
                key: "lambda_ue".into(),
                msg: "must be >= 0".into(),
            });
        }
        if !(self.rsz_expansion >= 1.0) || !self.rsz_expansion.is_finite() {
            return Err(Error::Config {
                key: "rsz_expansion".into(),
                msg: "must be >= 1".into(),
            });
        }
        self.radio.validate()?;
        self.power.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deployment {
    pub dbs: Vec<Node>,
    pub ues: Vec<Node>,
    pub area_m2: f64,
}

impl Deployment {
    /// Draw one deployment. The DBS and UE layouts come from the `dbs` and
    /// `ue` children of `streams`; error offsets from `err_dbs` / `err_ue`
    /// and only for [`Flavor::Erroneous`], so both flavors share layouts.
    pub fn sample(cop: &CopPoint, sim: &SimParams, flavor: Flavor, streams: &SeedTree) -> Result<Self> {
        let dbs = sample_ppp(cop.lambda_dbs, sim.area_m2, &mut streams.child("dbs", 0).rng())?;
        let ues = sample_ppp(sim.lambda_ue, sim.area_m2, &mut streams.child("ue", 0).rng())?;
        let r_er = match flavor {
            Flavor::Ideal => 0.0,
            Flavor::Erroneous => sim.radio.error_radius_m,
        };
        Ok(Self {
            dbs: inject_position_error(&dbs, r_er, &mut streams.child("err_dbs", 0).rng())?,
            ues: inject_position_error(&ues, r_er, &mut streams.child("err_ue", 0).rng())?,
            area_m2: sim.area_m2,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KpiSample {
    /// Area spectral efficiency, bit/s/Hz/m².
    pub ase: f64,
    /// Energy efficiency, bit/s/Hz/W.
    pub ee: f64,
    pub total_power_w: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotReport {
    pub kpi: KpiSample,
    pub schedule: ScheduleResult,
    /// Linear SINR per served UE, aligned with `schedule.served`.
    pub sinr: Vec<f64>,
}

/// KPIs of one snapshot. Scheduling order comes from the `sched` child of
/// `streams`; link shadowing is addressed by `(ue, dbs)` under `shadow`.
pub fn snapshot_kpis(dep: &Deployment, cop: &CopPoint, sim: &SimParams, streams: &SeedTree) -> Result<KpiSample> {
    snapshot_report(dep, cop, sim, streams).map(|r| r.kpi)
}

pub fn snapshot_report(dep: &Deployment, cop: &CopPoint, sim: &SimParams, streams: &SeedTree) -> Result<SnapshotReport> {
    let schedule = schedule_and_associate_with(dep, cop.r_sz, sim.rsz_expansion, &mut streams.child("sched", 0).rng())?;
    let rp: &RadioParams = &sim.radio;
    let budget = LinkBudget::new(rp, cop.p_tx_dbm);
    let shadow = streams.child("shadow", 0);
    let sigma = rp.shadow_sigma_db;
    let shadow_db = |u: usize, b: usize| {
        if sigma == 0.0 {
            0.0
        } else {
            sigma * shadow.keyed_normal(u as u64, b as u64)
        }
    };

    let mut sinr = Vec::with_capacity(schedule.served.len());
    let mut rate_sum = 0.0;
    for &(u, b) in &schedule.served {
        let ue = dep.ues[u].actual;
        let signal = budget.rx_mw_d2(ue.dist2(&dep.dbs[b].actual), shadow_db(u, b));
        let mut interference = 0.0;
        for &(_, j) in &schedule.served {
            if j != b {
                interference += budget.rx_mw_d2(ue.dist2(&dep.dbs[j].actual), shadow_db(u, j));
            }
        }
        let g = signal / (budget.noise_mw + interference);
        rate_sum += (1.0 + g).log2();
        sinr.push(g);
    }

    let total_power_w = sim
        .power
        .total_power_w(schedule.served.len(), dep.dbs.len(), cop.p_tx_dbm);
    let ase = rate_sum / dep.area_m2;
    let ee = if total_power_w > 0.0 { dep.area_m2 * ase / total_power_w } else { 0.0 };
    Ok(SnapshotReport {
        kpi: KpiSample { ase, ee, total_power_w },
        schedule,
        sinr,
    })
}

/// Mean KPIs over `n_cycles` independent snapshots.
///
/// Cycle `c` uses the stream `root(seed).child("cycle", c)`, so the ideal and
/// erroneous flavors see identical deployments, scheduling orders and
/// shadowing and differ only in the error offsets. The averaged `ee` is the
/// mean of per-snapshot ratios.
pub fn average_kpis(cop: &CopPoint, sim: &SimParams, n_cycles: usize, flavor: Flavor, seed: u64) -> Result<KpiSample> {
    if n_cycles == 0 {
        return Err(Error::invalid("n_cycles must be >= 1"));
    }
    let root = SeedTree::root(seed);
    let mut acc = KpiSample {
        ase: 0.0,
        ee: 0.0,
        total_power_w: 0.0,
    };
    for c in 0..n_cycles {
        let streams = root.child("cycle", c as u64);
        let dep = Deployment::sample(cop, sim, flavor, &streams)?;
        let k = snapshot_kpis(&dep, cop, sim, &streams)?;
        acc.ase += k.ase;
        acc.ee += k.ee;
        acc.total_power_w += k.total_power_w;
    }
    if n_cycles == 1 {
        return Ok(acc);
    }
    let n = n_cycles as f64;
    Ok(KpiSample {
        ase: acc.ase / n,
        ee: acc.ee / n,
        total_power_w: acc.total_power_w / n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netsim::{path_loss_db, Point2D};

    fn node(x: f64, y: f64) -> Node {
        Node::exact(Point2D::new(x, y))
    }

    #[test]
    fn no_served_ue_gives_zero_kpis() {
        let sim = SimParams::default();
        let dep = Deployment {
            dbs: vec![node(500.0, 500.0), node(900.0, 900.0)],
            ues: vec![node(100.0, 100.0)],
            area_m2: sim.area_m2,
        };
        let cop = CopPoint::new(1e-3, 10.0, 20.0);
        let k = snapshot_kpis(&dep, &cop, &sim, &SeedTree::root(0)).unwrap();
        assert_eq!(k.ase, 0.0);
        assert_eq!(k.ee, 0.0);
        assert_eq!(k.total_power_w, 130.0 + 2.0 * 4.3);
    }

    #[test]
    fn single_link_closed_form() {
        let mut sim = SimParams::default();
        sim.radio.shadow_sigma_db = 0.0;
        let dep = Deployment {
            dbs: vec![Node {
                perceived: Point2D::new(103.0, 100.0),
                actual: Point2D::new(106.0, 104.0),
            }],
            ues: vec![node(100.0, 100.0)],
            area_m2: sim.area_m2,
        };
        let cop = CopPoint::new(1e-3, 10.0, 23.0);
        let rep = snapshot_report(&dep, &cop, &sim, &SeedTree::root(0)).unwrap();
        let d_a = (36.0f64 + 16.0).sqrt();
        let prx_dbm = 23.0 + 0.0 + path_loss_db(d_a, &sim.radio).unwrap();
        let expect = 10f64.powf((prx_dbm - sim.radio.noise_dbm) / 10.0);
        assert_eq!(rep.sinr.len(), 1);
        assert!((rep.sinr[0] / expect - 1.0).abs() < 1e-12);
        assert!((rep.kpi.ase - (1.0 + expect).log2() / 1e6).abs() < 1e-18);
    }

    #[test]
    fn interferer_lowers_sinr() {
        let mut sim = SimParams::default();
        sim.radio.shadow_sigma_db = 0.0;
        let cop = CopPoint::new(1e-3, 10.0, 23.0);
        let lone = Deployment {
            dbs: vec![node(105.0, 100.0)],
            ues: vec![node(100.0, 100.0)],
            area_m2: 1e6,
        };
        let pair = Deployment {
            dbs: vec![node(105.0, 100.0), node(135.0, 100.0)],
            ues: vec![node(100.0, 100.0), node(140.0, 100.0)],
            area_m2: 1e6,
        };
        let a = snapshot_report(&lone, &cop, &sim, &SeedTree::root(1)).unwrap();
        let b = snapshot_report(&pair, &cop, &sim, &SeedTree::root(1)).unwrap();
        let idx = b.schedule.served.iter().position(|&(u, _)| u == 0).unwrap();
        assert!(b.sinr[idx] < a.sinr[0]);
        assert!(a.sinr[0] > 0.0);
    }

    #[test]
    fn case_h_perceived_association_picks_farther_dbs() {
        // DBS A is physically 3 m from the UE but reported 9 m away; DBS B is
        // reported 4 m away but physically 18 m away.
        let mut sim = SimParams::default();
        sim.radio.shadow_sigma_db = 0.0;
        let dep = Deployment {
            dbs: vec![
                Node {
                    perceived: Point2D::new(109.0, 100.0),
                    actual: Point2D::new(103.0, 100.0),
                },
                Node {
                    perceived: Point2D::new(96.0, 100.0),
                    actual: Point2D::new(82.0, 100.0),
                },
            ],
            ues: vec![node(100.0, 100.0)],
            area_m2: 1e6,
        };
        let cop = CopPoint::new(1e-3, 10.0, 20.0);
        let rep = snapshot_report(&dep, &cop, &sim, &SeedTree::root(0)).unwrap();
        assert_eq!(rep.schedule.served, vec![(0, 1)]);
        let ideal = Deployment {
            dbs: dep.dbs.iter().map(|n| Node::exact(n.actual)).collect(),
            ..dep.clone()
        };
        let rep_ideal = snapshot_report(&ideal, &cop, &sim, &SeedTree::root(0)).unwrap();
        assert_eq!(rep_ideal.schedule.served, vec![(0, 0)]);
        assert!(rep.sinr[0] < rep_ideal.sinr[0]);
    }

    #[test]
    fn ee_identity_on_random_snapshots() {
        let sim = SimParams::default();
        for i in 0..20 {
            let cop = CopPoint::new(5e-4 + 6e-4 * i as f64, 10.0 + 2.0 * i as f64, 15.0 + 0.7 * i as f64);
            let streams = SeedTree::root(i);
            let dep = Deployment::sample(&cop, &sim, Flavor::Erroneous, &streams).unwrap();
            let k = snapshot_kpis(&dep, &cop, &sim, &streams).unwrap();
            assert!(k.ase >= 0.0 && k.ee >= 0.0);
            let lhs = k.ee * k.total_power_w;
            let rhs = sim.area_m2 * k.ase;
            assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(f64::MIN_POSITIVE));
        }
    }

    #[test]
    fn zero_error_radius_flavors_identical() {
        let mut sim = SimParams::default();
        sim.radio.error_radius_m = 0.0;
        let cop = CopPoint::new(2e-3, 20.0, 22.0);
        for seed in 0..3 {
            let a = average_kpis(&cop, &sim, 3, Flavor::Ideal, seed).unwrap();
            let b = average_kpis(&cop, &sim, 3, Flavor::Erroneous, seed).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn single_cycle_average_is_snapshot() {
        let sim = SimParams::default();
        let cop = CopPoint::new(2e-3, 20.0, 22.0);
        let avg = average_kpis(&cop, &sim, 1, Flavor::Erroneous, 5).unwrap();
        let streams = SeedTree::root(5).child("cycle", 0);
        let dep = Deployment::sample(&cop, &sim, Flavor::Erroneous, &streams).unwrap();
        assert_eq!(avg, snapshot_kpis(&dep, &cop, &sim, &streams).unwrap());
    }

    #[test]
    fn average_deterministic_and_rejects_zero_cycles() {
        let sim = SimParams::default();
        let cop = CopPoint::new(1e-3, 15.0, 20.0);
        let a = average_kpis(&cop, &sim, 4, Flavor::Erroneous, 9).unwrap();
        let b = average_kpis(&cop, &sim, 4, Flavor::Erroneous, 9).unwrap();
        assert_eq!(a, b);
        assert!(average_kpis(&cop, &sim, 0, Flavor::Ideal, 9).is_err());
    }

    #[test]
    fn flavors_share_deployment_layout() {
        let sim = SimParams::default();
        let cop = CopPoint::new(1e-3, 15.0, 20.0);
        let s = SeedTree::root(3);
        let a = Deployment::sample(&cop, &sim, Flavor::Ideal, &s).unwrap();
        let b = Deployment::sample(&cop, &sim, Flavor::Erroneous, &s).unwrap();
        assert_eq!(a.dbs.len(), b.dbs.len());
        assert!(a.ues.iter().zip(&b.ues).all(|(x, y)| x.perceived == y.perceived));
        assert!(b.ues.iter().any(|n| n.actual != n.perceived));
    }
}
