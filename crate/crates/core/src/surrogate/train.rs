use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cv::{cross_validate, fold_assignment, CvReport};
use super::model::{Candidate, ForestParams, GbtModel, GbtParams, ModelRole, Target};
use crate::datagen::{Database, DbFlavor};
use crate::error::{Error, Result};
use crate::netsim::CopPoint;

pub const DEFAULT_K: usize = 5;
pub const DEFAULT_SHUFFLE_SEED: u64 = 0x00C0_FFEE;
pub const MIN_SAMPLES_LEAF: usize = 3;

/// Three boosting presets plus a random-forest control.
pub fn default_menu(forest_seed: u64) -> Vec<Candidate> {
    let gbt = |n_trees, learning_rate, max_depth| {
        Candidate::Gbt(GbtParams { n_trees, learning_rate, max_depth, min_samples_leaf: MIN_SAMPLES_LEAF })
    };
    vec![
        gbt(200, 0.1, 3),
        gbt(400, 0.05, 3),
        gbt(200, 0.1, 4),
        Candidate::Forest(ForestParams {
            n_trees: 200,
            max_depth: 6,
            min_samples_leaf: MIN_SAMPLES_LEAF,
            max_features: None,
            seed: forest_seed,
        }),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub k: usize,
    pub shuffle_seed: u64,
    pub menu: Vec<Candidate>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            k: DEFAULT_K,
            shuffle_seed: DEFAULT_SHUFFLE_SEED,
            menu: default_menu(DEFAULT_SHUFFLE_SEED),
        }
    }
}

/// One model per KPI.
#[derive(Debug, Clone, PartialEq)]
pub struct KpiPair {
    pub ase: GbtModel,
    pub ee: GbtModel,
}

impl KpiPair {
    pub fn predict(&self, cop: &CopPoint) -> (f64, f64) {
        (self.ase.predict(cop), self.ee.predict(cop))
    }

    pub fn role(&self) -> ModelRole {
        self.ase.role
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModels {
    pub model_e: KpiPair,
    pub model_r: KpiPair,
    pub reports: Vec<CvReport>,
}

pub fn cop_features(cops: &[CopPoint]) -> Vec<Vec<f64>> {
    cops.iter().map(|c| c.to_array().to_vec()).collect()
}

fn kpi_column(db: &Database, target: Target) -> Vec<f64> {
    match target {
        Target::Ase => db.ase(),
        Target::Ee => db.ee(),
    }
}

/// Cross-validate the menu, then refit the winner on all rows.
pub fn fit_selected(
    x: &[Vec<f64>],
    y: &[f64],
    role: ModelRole,
    target: Target,
    cfg: &TrainConfig,
) -> Result<(GbtModel, CvReport)> {
    let label = format!("{}/{}", role.as_str(), target.as_str());
    let report = cross_validate(&label, x, y, cfg.k, &cfg.menu, cfg.shuffle_seed)?;
    let model = cfg.menu[report.chosen].fit(x, y)?.with_tags(role, target);
    Ok((model, report))
}

fn expect_flavor(db: &Database, want: DbFlavor) -> Result<()> {
    if db.flavor() != want {
        return Err(Error::DatabaseMismatch(format!("expected a {want} database, got {}", db.flavor())));
    }
    Ok(())
}

fn train_pair(db: &Database, role: ModelRole, cfg: &TrainConfig) -> Result<(KpiPair, Vec<CvReport>)> {
    let x = cop_features(&db.cops());
    let fitted = [Target::Ase, Target::Ee]
        .par_iter()
        .map(|&t| fit_selected(&x, &kpi_column(db, t), role, t, cfg))
        .collect::<Result<Vec<_>>>()?;
    let mut it = fitted.into_iter();
    let (ase, ra) = it.next().expect("two targets");
    let (ee, re) = it.next().expect("two targets");
    Ok((KpiPair { ase, ee }, vec![ra, re]))
}

/// Model-E on the erroneous database and Model-R on the residual database,
/// one model per KPI.
pub fn train_kpi_models(erroneous: &Database, residual: &Database, cfg: &TrainConfig) -> Result<TrainedModels> {
    expect_flavor(erroneous, DbFlavor::Erroneous)?;
    expect_flavor(residual, DbFlavor::Residual)?;
    if !erroneous.same_grid(residual) {
        return Err(Error::DatabaseMismatch("erroneous and residual databases cover different COP grids".into()));
    }
    let (model_e, mut reports) = train_pair(erroneous, ModelRole::ModelE, cfg)?;
    let (model_r, rr) = train_pair(residual, ModelRole::ModelR, cfg)?;
    reports.extend(rr);
    Ok(TrainedModels { model_e, model_r, reports })
}

/// Reference models fitted on the ideal database.
pub fn train_oracle_models(ideal: &Database, cfg: &TrainConfig) -> Result<(KpiPair, Vec<CvReport>)> {
    expect_flavor(ideal, DbFlavor::Ideal)?;
    train_pair(ideal, ModelRole::Oracle, cfg)
}

/// Held-out RMSE against ideal KPIs of Model-E alone and of Model-E plus
/// Model-R, per KPI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompensationReport {
    pub ase_rmse_e: f64,
    pub ase_rmse_compensated: f64,
    pub ee_rmse_e: f64,
    pub ee_rmse_compensated: f64,
}

/// K-fold evaluation of the compensation: each fold trains Model-E and
/// Model-R with `candidate` on the remaining rows and scores the held-out
/// rows against the ideal database.
pub fn compensation_holdout(
    ideal: &Database,
    erroneous: &Database,
    residual: &Database,
    k: usize,
    shuffle_seed: u64,
    candidate: &Candidate,
) -> Result<CompensationReport> {
    if !ideal.same_grid(erroneous) || !ideal.same_grid(residual) {
        return Err(Error::DatabaseMismatch("databases cover different COP grids".into()));
    }
    let x = cop_features(&ideal.cops());
    let folds = fold_assignment(x.len(), k, shuffle_seed)?;
    let mut sse = [0.0f64; 4];
    for (f, held) in folds.iter().enumerate() {
        let train: Vec<usize> = folds
            .iter()
            .enumerate()
            .filter(|&(g, _)| g != f)
            .flat_map(|(_, r)| r.iter().copied())
            .collect();
        let xt: Vec<Vec<f64>> = train.iter().map(|&i| x[i].clone()).collect();
        let sub = |db: &Database, t: Target| -> Vec<f64> {
            let col = kpi_column(db, t);
            train.iter().map(|&i| col[i]).collect()
        };
        for (ti, t) in [Target::Ase, Target::Ee].into_iter().enumerate() {
            let me = candidate.fit(&xt, &sub(erroneous, t))?;
            let mr = candidate.fit(&xt, &sub(residual, t))?;
            let truth = kpi_column(ideal, t);
            for &i in held {
                let e = me.predict_row(&x[i]);
                let r = mr.predict_row(&x[i]);
                sse[2 * ti] += (e - truth[i]).powi(2);
                sse[2 * ti + 1] += (e + r - truth[i]).powi(2);
            }
        }
    }
    let n = x.len() as f64;
    let r = |s: f64| (s / n).sqrt();
    Ok(CompensationReport {
        ase_rmse_e: r(sse[0]),
        ase_rmse_compensated: r(sse[1]),
        ee_rmse_e: r(sse[2]),
        ee_rmse_compensated: r(sse[3]),
    })
}
