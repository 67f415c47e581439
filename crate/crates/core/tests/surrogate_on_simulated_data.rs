//! Surrogate behaviour on a small simulated database (bins = 6).

use std::sync::OnceLock;

use ddoec::datagen::Database;
use ddoec::pipeline::{generate_databases, Databases, ExperimentConfig};
use ddoec::surrogate::{
    compensation_holdout, cop_features, fit_gbt, fold_assignment, kfold_rmse, save_model, train_kpi_models, Candidate,
    GbtParams, TrainConfig,
};

fn dbs() -> &'static Databases {
    static DBS: OnceLock<Databases> = OnceLock::new();
    DBS.get_or_init(|| {
        let cfg = ExperimentConfig {
            bins: 6,
            n_cycles: 8,
            master_seed: 31,
            ..Default::default()
        };
        generate_databases(&cfg).unwrap()
    })
}

fn variance(v: &[f64]) -> f64 {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64
}

fn cfg() -> TrainConfig {
    TrainConfig {
        k: 5,
        shuffle_seed: 8,
        menu: vec![
            Candidate::Gbt(GbtParams { n_trees: 100, learning_rate: 0.1, max_depth: 3, min_samples_leaf: 3 }),
            Candidate::Gbt(GbtParams { n_trees: 100, learning_rate: 0.1, max_depth: 4, min_samples_leaf: 3 }),
        ],
    }
}

fn full_scale() -> &'static Databases {
    static DBS: OnceLock<Databases> = OnceLock::new();
    DBS.get_or_init(|| generate_databases(&ExperimentConfig::default()).unwrap())
}

#[test]
fn ee_residual_varies_less_than_erroneous_ee() {
    let d = full_scale();
    let ratio = variance(&d.residual.ee()) / variance(&d.erroneous.ee());
    assert!(ratio < 1.0, "variance ratio {ratio}");
}

#[test]
fn ase_residual_varies_less_than_erroneous_ase() {
    let d = full_scale();
    let ratio = variance(&d.residual.ase()) / variance(&d.erroneous.ase());
    assert!(ratio < 1.0, "variance ratio {ratio}");
}

#[test]
fn compensation_reduces_error_against_ideal() {
    let d = dbs();
    let c = cfg().menu[0];
    let r = compensation_holdout(&d.ideal, &d.erroneous, &d.residual, 5, 3, &c).unwrap();
    assert!(r.ase_rmse_compensated < r.ase_rmse_e, "{r:?}");
    assert!(r.ee_rmse_compensated < r.ee_rmse_e, "{r:?}");
}

#[test]
fn boosting_beats_single_tree() {
    let d = dbs();
    let x = cop_features(&d.erroneous.cops());
    let single = Candidate::Gbt(GbtParams { n_trees: 1, learning_rate: 1.0, max_depth: 6, min_samples_leaf: 3 });
    let boosted = cfg().menu[0];
    for db in [&d.erroneous, &d.residual] {
        for y in [db.ase(), db.ee()] {
            let s = kfold_rmse(&x, &y, 5, &single, 1).unwrap();
            let b = kfold_rmse(&x, &y, 5, &boosted, 1).unwrap();
            assert!(b.mean_rmse < s.mean_rmse, "{} vs {}", b.mean_rmse, s.mean_rmse);
        }
    }
}

#[test]
fn held_out_predictions_mostly_within_cv_band() {
    // 90% of held-out points inside two CV RMSEs of the simulator mean
    let d = dbs();
    let x = cop_features(&d.erroneous.cops());
    let c = cfg().menu[0];
    for y in [d.erroneous.ase(), d.erroneous.ee()] {
        let span = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - y.iter().cloned().fold(f64::INFINITY, f64::min);
        let band = 2.0 * kfold_rmse(&x, &y, 5, &c, 2).unwrap().mean_rmse * span;
        let folds = fold_assignment(x.len(), 5, 77).unwrap();
        let mut inside = 0;
        for (f, held) in folds.iter().enumerate() {
            let train: Vec<usize> = folds.iter().enumerate().filter(|&(g, _)| g != f).flat_map(|(_, r)| r.clone()).collect();
            let xt: Vec<Vec<f64>> = train.iter().map(|&i| x[i].clone()).collect();
            let yt: Vec<f64> = train.iter().map(|&i| y[i]).collect();
            let m = c.fit(&xt, &yt).unwrap();
            inside += held.iter().filter(|&&i| (m.predict_row(&x[i]) - y[i]).abs() <= band).count();
        }
        assert!(inside as f64 >= 0.9 * x.len() as f64, "{inside} of {}", x.len());
    }
}

#[test]
fn selection_and_tags() {
    let d = dbs();
    let t = train_kpi_models(&d.erroneous, &d.residual, &cfg()).unwrap();
    assert_eq!(t.reports.len(), 4);
    for r in &t.reports {
        let min = r.entries.iter().map(|e| e.mean_rmse).fold(f64::INFINITY, f64::min);
        assert_eq!(r.chosen_entry().mean_rmse, min);
    }
    assert_eq!(t.model_e.ase.role.as_str(), "model_e");
    assert_eq!(t.model_r.ee.target.as_str(), "ee");
}

#[test]
fn misaligned_databases_rejected() {
    let d = dbs();
    let mut short: Database = d.residual.clone();
    short.rows.truncate(10);
    assert_eq!(train_kpi_models(&d.erroneous, &short, &cfg()).unwrap_err().kind(), "database_mismatch");
    assert!(train_kpi_models(&d.ideal, &d.residual, &cfg()).is_err());
}

#[test]
fn identical_inputs_give_identical_model_bytes() {
    let d = dbs();
    let x = cop_features(&d.erroneous.cops());
    let p = GbtParams { n_trees: 50, learning_rate: 0.1, max_depth: 3, min_samples_leaf: 3 };
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    save_model(&fit_gbt(&x, &d.erroneous.ase(), &p).unwrap(), &a).unwrap();
    save_model(&fit_gbt(&x, &d.erroneous.ase(), &p).unwrap(), &b).unwrap();
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}
