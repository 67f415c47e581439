use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::scaler::{MinMaxScaler, TargetScaler};
use super::tree::{RegressionTree, TreeParams};
use crate::error::{Error, Result};
use crate::netsim::CopPoint;
use crate::rng::SeedTree;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Ase,
    Ee,
}

impl Target {
    pub fn as_str(&self) -> &'static str {
        match self {
            Target::Ase => "ase",
            Target::Ee => "ee",
        }
    }
}

/// What data a model was trained on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelRole {
    /// Erroneous KPIs.
    ModelE,
    /// Ideal-minus-erroneous residuals.
    ModelR,
    /// Ideal KPIs; used only as a validation reference.
    Oracle,
}

impl ModelRole {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelRole::ModelE => "model_e",
            ModelRole::ModelR => "model_r",
            ModelRole::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleKind {
    GradientBoosting,
    RandomForest,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GbtParams {
    pub n_trees: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
    pub min_samples_leaf: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_samples_leaf: usize,
    pub max_features: Option<usize>,
    pub seed: u64,
}

/// A model-menu entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Candidate {
    Gbt(GbtParams),
    Forest(ForestParams),
}

impl Candidate {
    pub fn id(&self) -> String {
        match self {
            Candidate::Gbt(p) => format!("gbt_t{}_lr{}_d{}", p.n_trees, p.learning_rate, p.max_depth),
            Candidate::Forest(p) => format!("rf_t{}_d{}", p.n_trees, p.max_depth),
        }
    }

    pub fn fit(&self, x: &[Vec<f64>], y: &[f64]) -> Result<GbtModel> {
        match self {
            Candidate::Gbt(p) => fit_gbt(x, y, p),
            Candidate::Forest(p) => fit_forest(x, y, p),
        }
    }
}

/// Tree-ensemble regressor over scaled features and a min-max normalized
/// target: `denormalize(base + learning_rate · Σ tree(scale(x)))`.
///
/// Random forests use the same representation with `base = 0` and
/// `learning_rate = 1 / n_trees`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbtModel {
    pub kind: EnsembleKind,
    pub role: ModelRole,
    pub target: Target,
    pub candidate: Candidate,
    pub base_prediction: f64,
    pub learning_rate: f64,
    pub scaler: MinMaxScaler,
    pub target_scaler: TargetScaler,
    pub trees: Vec<RegressionTree>,
}

impl GbtModel {
    pub fn with_tags(mut self, role: ModelRole, target: Target) -> Self {
        self.role = role;
        self.target = target;
        self
    }

    /// Prediction in normalized target units, using the first `n_trees` trees.
    fn raw_prefix(&self, scaled: &[f64], n_trees: usize) -> f64 {
        let s: f64 = self.trees[..n_trees].iter().map(|t| t.predict(scaled)).sum();
        self.base_prediction + self.learning_rate * s
    }

    pub fn predict_row(&self, x: &[f64]) -> f64 {
        let mut buf = [0.0; 8];
        let scaled: &mut [f64] = if x.len() <= 8 {
            &mut buf[..x.len()]
        } else {
            return self.target_scaler.denormalize(self.raw_prefix(&self.scaler.transform(x), self.trees.len()));
        };
        self.scaler.transform_into(x, scaled);
        self.target_scaler.denormalize(self.raw_prefix(scaled, self.trees.len()))
    }

    pub fn predict(&self, cop: &CopPoint) -> f64 {
        self.predict_row(&cop.to_array())
    }

    /// Prediction using only the first `n_trees` trees (boosting stages).
    pub fn predict_staged(&self, x: &[f64], n_trees: usize) -> f64 {
        let scaled = self.scaler.transform(x);
        self.target_scaler
            .denormalize(self.raw_prefix(&scaled, n_trees.min(self.trees.len())))
    }
}

fn check_training_data(x: &[Vec<f64>], y: &[f64], min_leaf: usize) -> Result<()> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::invalid("empty training data"));
    }
    if x.len() != y.len() {
        return Err(Error::invalid(format!("{} feature rows but {} targets", x.len(), y.len())));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("non-finite target value"));
    }
    let nf = x[0].len();
    if x.iter().any(|r| r.len() != nf || r.iter().any(|v| !v.is_finite())) {
        return Err(Error::invalid("ragged or non-finite feature rows"));
    }
    if x.len() < 2 * min_leaf.max(1) {
        return Err(Error::invalid(format!(
            "need at least {} rows for min_samples_leaf = {min_leaf}, got {}",
            2 * min_leaf.max(1),
            x.len()
        )));
    }
    Ok(())
}

fn prepare(x: &[Vec<f64>], y: &[f64]) -> (MinMaxScaler, TargetScaler, Vec<Vec<f64>>, Vec<f64>) {
    let scaler = MinMaxScaler::fit(x);
    let target_scaler = TargetScaler::fit(y);
    let nf = scaler.n_features();
    let mut cols = vec![Vec::with_capacity(x.len()); nf];
    let mut tmp = vec![0.0; nf];
    for row in x {
        scaler.transform_into(row, &mut tmp);
        for (c, v) in cols.iter_mut().zip(&tmp) {
            c.push(*v);
        }
    }
    let yn = y.iter().map(|&v| target_scaler.normalize(v)).collect();
    (scaler, target_scaler, cols, yn)
}

/// Least-squares gradient boosting.
pub fn fit_gbt(x: &[Vec<f64>], y: &[f64], p: &GbtParams) -> Result<GbtModel> {
    check_training_data(x, y, p.min_samples_leaf)?;
    if !(p.learning_rate > 0.0 && p.learning_rate <= 1.0) {
        return Err(Error::invalid(format!("learning rate must be in (0, 1], got {}", p.learning_rate)));
    }
    let (scaler, target_scaler, cols, yn) = prepare(x, y);
    let n = yn.len();
    let base = yn.iter().sum::<f64>() / n as f64;
    let mut fitted = vec![base; n];
    let mut resid = vec![0.0; n];
    let idx: Vec<usize> = (0..n).collect();
    let tp = TreeParams {
        max_depth: p.max_depth,
        min_samples_leaf: p.min_samples_leaf,
        max_features: None,
    };
    let mut trees = Vec::with_capacity(p.n_trees);
    let mut row = vec![0.0; cols.len()];
    for _ in 0..p.n_trees {
        for i in 0..n {
            resid[i] = yn[i] - fitted[i];
        }
        let tree = RegressionTree::fit::<ChaCha8Rng>(&cols, &resid, &idx, &tp, None);
        for i in 0..n {
            for (j, c) in cols.iter().enumerate() {
                row[j] = c[i];
            }
            fitted[i] += p.learning_rate * tree.predict(&row);
        }
        trees.push(tree);
    }
    Ok(GbtModel {
        kind: EnsembleKind::GradientBoosting,
        role: ModelRole::ModelE,
        target: Target::Ase,
        candidate: Candidate::Gbt(*p),
        base_prediction: base,
        learning_rate: p.learning_rate,
        scaler,
        target_scaler,
        trees,
    })
}

/// Bootstrap-aggregated regression trees. Tree `t` draws its bootstrap
/// sample and split features from `root(seed).child("forest_tree", t)`.
pub fn fit_forest(x: &[Vec<f64>], y: &[f64], p: &ForestParams) -> Result<GbtModel> {
    check_training_data(x, y, p.min_samples_leaf)?;
    if p.n_trees == 0 {
        return Err(Error::invalid("forest needs at least one tree"));
    }
    let (scaler, target_scaler, cols, yn) = prepare(x, y);
    let n = yn.len();
    let tp = TreeParams {
        max_depth: p.max_depth,
        min_samples_leaf: p.min_samples_leaf,
        max_features: p.max_features,
    };
    let root = SeedTree::root(p.seed);
    let trees = (0..p.n_trees)
        .map(|t| {
            let mut rng = root.child("forest_tree", t as u64).rng();
            let boot: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            RegressionTree::fit(&cols, &yn, &boot, &tp, Some(&mut rng))
        })
        .collect();
    Ok(GbtModel {
        kind: EnsembleKind::RandomForest,
        role: ModelRole::ModelE,
        target: Target::Ase,
        candidate: Candidate::Forest(*p),
        base_prediction: 0.0,
        learning_rate: 1.0 / p.n_trees as f64,
        scaler,
        target_scaler,
        trees,
    })
}
