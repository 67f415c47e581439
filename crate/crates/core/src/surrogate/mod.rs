//! Tree-ensemble surrogates mapping a COP triple to a KPI or a KPI residual.

mod cv;
mod io;
mod model;
mod scaler;
mod train;
mod tree;

pub use cv::{cross_validate, fold_assignment, kfold_rmse, CvEntry, CvReport};
pub use io::{load_model, load_model_as, model_file_name, save_model, MODEL_SCHEMA_VERSION};
pub use model::{fit_forest, fit_gbt, Candidate, EnsembleKind, ForestParams, GbtModel, GbtParams, ModelRole, Target};
pub use scaler::{MinMaxScaler, TargetScaler};
pub use train::{
    compensation_holdout, cop_features, default_menu, fit_selected, train_kpi_models, train_oracle_models,
    CompensationReport, KpiPair, TrainConfig, TrainedModels, DEFAULT_K, DEFAULT_SHUFFLE_SEED, MIN_SAMPLES_LEAF,
};
pub use tree::{RegressionTree, TreeNode, TreeParams};

/// Convenience: predict with a model at a COP.
pub fn predict(model: &GbtModel, cop: &crate::netsim::CopPoint) -> f64 {
    model.predict(cop)
}
