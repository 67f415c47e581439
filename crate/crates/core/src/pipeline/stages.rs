//! The stage functions behind the CLI subcommands. Each stage reads its
//! inputs from, and writes its outputs plus a `manifest.json` to, a fixed
//! place under the output root:
//!
//! ```text
//! data/        ideal.csv erroneous.csv residual.csv (+ .meta)   gen-data
//! models/      model_{e,r}_{ase,ee}.json oracle_{ase,ee}.json
//!              normalizers.json cv_report.csv                   train
//! runs/        optimized.json timing.csv                        optimize
//! validation/  validated.json timing.csv                        validate
//! ./           summary.csv iterations.csv traces/ plots/        report
//! ```

use std::fmt::Write;
use std::fs;
use std::path::{Path, PathBuf};

use super::config::{Algorithm, ExperimentConfig};
use super::experiment::{
    generate_databases, optimize_trials, train_models, trial_keys, validate_trials, Artifacts, Databases,
    Normalizers, TrialSet,
};
use super::manifest::{digest_file, unix_now, RunManifest};
use super::report::emit_report;
use crate::datagen::{load_database, meta_path, persist_database, write_file, DbFlavor};
use crate::error::{Error, Result};
use crate::optimizer::{ModelSet, Scheme};
use crate::surrogate::{load_model_as, model_file_name, save_model, CvReport, KpiPair, ModelRole, Target};

#[derive(Debug, Clone)]
pub struct Layout {
    pub root: PathBuf,
}

impl Layout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn db_rel(flavor: DbFlavor) -> PathBuf {
        Path::new("data").join(format!("{flavor}.csv"))
    }

    pub fn model_rel(role: ModelRole, target: Target) -> PathBuf {
        Path::new("models").join(model_file_name(role, target))
    }

    pub fn abs(&self, rel: impl AsRef<Path>) -> PathBuf {
        self.root.join(rel)
    }
}

const NORMALIZERS: &str = "models/normalizers.json";
const CV_REPORT: &str = "models/cv_report.csv";
const OPTIMIZED: &str = "runs/optimized.json";
const VALIDATED: &str = "validation/validated.json";

fn mkdir(p: &Path) -> Result<()> {
    fs::create_dir_all(p).map_err(|e| Error::io(p, e))
}

fn finish(mut m: RunManifest, layout: &Layout, dir: &str, inputs: &[PathBuf], outputs: &[PathBuf]) -> Result<RunManifest> {
    m.inputs = inputs.iter().map(|p| digest_file(&layout.root, p)).collect::<Result<_>>()?;
    m.outputs = outputs.iter().map(|p| digest_file(&layout.root, p)).collect::<Result<_>>()?;
    m.write(&layout.abs(dir))?;
    Ok(m)
}

fn require(layout: &Layout, rel: &Path, hint: &str) -> Result<()> {
    if layout.abs(rel).is_file() {
        Ok(())
    } else {
        Err(Error::MissingArtifact(format!("{} not found; run `{hint}` first", layout.abs(rel).display())))
    }
}

fn db_files() -> Vec<PathBuf> {
    [DbFlavor::Ideal, DbFlavor::Erroneous, DbFlavor::Residual]
        .into_iter()
        .flat_map(|f| {
            let p = Layout::db_rel(f);
            [meta_path(&p), p]
        })
        .collect()
}

pub fn stage_gen_data(cfg: &ExperimentConfig, layout: &Layout) -> Result<RunManifest> {
    let started = unix_now();
    cfg.validate()?;
    mkdir(&layout.abs("data"))?;
    let dbs = generate_databases(cfg)?;
    for db in [&dbs.ideal, &dbs.erroneous, &dbs.residual] {
        persist_database(db, &layout.abs(Layout::db_rel(db.flavor())))?;
    }
    finish(RunManifest::new("gen-data", cfg, started), layout, "data", &[], &db_files())
}

pub fn load_databases(layout: &Layout) -> Result<Databases> {
    let load = |f: DbFlavor| -> Result<_> {
        let rel = Layout::db_rel(f);
        require(layout, &rel, "gen-data")?;
        let db = load_database(&layout.abs(&rel))?;
        if db.flavor() != f {
            return Err(Error::DatabaseMismatch(format!("{} holds a {} database", rel.display(), db.flavor())));
        }
        Ok(db)
    };
    Ok(Databases {
        ideal: load(DbFlavor::Ideal)?,
        erroneous: load(DbFlavor::Erroneous)?,
        residual: load(DbFlavor::Residual)?,
    })
}

const PAIRS: [ModelRole; 3] = [ModelRole::ModelE, ModelRole::ModelR, ModelRole::Oracle];

fn pair_of(models: &ModelSet, role: ModelRole) -> Option<&KpiPair> {
    match role {
        ModelRole::ModelE => models.model_e.as_ref(),
        ModelRole::ModelR => models.model_r.as_ref(),
        ModelRole::Oracle => models.oracle.as_ref(),
    }
}

pub fn cv_report_csv(reports: &[CvReport]) -> String {
    let mut out = String::from("model,candidate,chosen,k,mean_rmse,std_rmse,mean_rmse_raw\n");
    for r in reports {
        for (i, e) in r.entries.iter().enumerate() {
            let raw = if r.target_span > 0.0 { e.mean_rmse * r.target_span } else { e.mean_rmse };
            let _ = writeln!(out, "{},{},{},{},{},{},{}", r.label, e.id, i == r.chosen, r.k, e.mean_rmse, e.std_rmse, raw);
        }
    }
    out
}

/// Write trained artifacts under `models/`; returns the written files.
pub fn save_artifacts(art: &Artifacts, layout: &Layout) -> Result<Vec<PathBuf>> {
    mkdir(&layout.abs("models"))?;
    let mut outputs = Vec::new();
    for role in PAIRS {
        if let Some(pair) = pair_of(&art.models, role) {
            for (m, t) in [(&pair.ase, Target::Ase), (&pair.ee, Target::Ee)] {
                let rel = Layout::model_rel(role, t);
                save_model(m, &layout.abs(&rel))?;
                outputs.push(rel);
            }
        }
    }
    let norm = serde_json::to_string_pretty(&art.normalizers).expect("normalizers serialize");
    write_file(&layout.abs(NORMALIZERS), norm.as_bytes())?;
    write_file(&layout.abs(CV_REPORT), cv_report_csv(&art.cv_reports).as_bytes())?;
    outputs.push(NORMALIZERS.into());
    outputs.push(CV_REPORT.into());
    Ok(outputs)
}

pub fn stage_train(cfg: &ExperimentConfig, layout: &Layout) -> Result<RunManifest> {
    let started = unix_now();
    cfg.validate()?;
    let dbs = load_databases(layout)?;
    let art = train_models(cfg, &dbs)?;
    let outputs = save_artifacts(&art, layout)?;
    finish(RunManifest::new("train", cfg, started), layout, "models", &db_files(), &outputs)
}

/// Load whichever model pairs exist plus the normalizers. Missing pairs are
/// left empty; fitness construction reports them.
pub fn load_artifacts(layout: &Layout) -> Result<(Artifacts, Vec<PathBuf>)> {
    require(layout, Path::new(NORMALIZERS), "train")?;
    let p = layout.abs(NORMALIZERS);
    let text = fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?;
    let normalizers: Normalizers = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: p.clone(),
        msg: e.to_string(),
    })?;
    let mut models = ModelSet::default();
    let mut inputs = vec![PathBuf::from(NORMALIZERS)];
    for role in PAIRS {
        let (ra, re) = (Layout::model_rel(role, Target::Ase), Layout::model_rel(role, Target::Ee));
        if !layout.abs(&ra).is_file() || !layout.abs(&re).is_file() {
            continue;
        }
        let pair = KpiPair {
            ase: load_model_as(&layout.abs(&ra), role, Target::Ase)?,
            ee: load_model_as(&layout.abs(&re), role, Target::Ee)?,
        };
        inputs.push(ra);
        inputs.push(re);
        match role {
            ModelRole::ModelE => models.model_e = Some(pair),
            ModelRole::ModelR => models.model_r = Some(pair),
            ModelRole::Oracle => models.oracle = Some(pair),
        }
    }
    Ok((Artifacts { models, normalizers, cv_reports: Vec::new() }, inputs))
}

/// Restricts which trials `optimize` runs.
#[derive(Debug, Clone, Copy, Default)]
pub struct TrialFilter {
    pub algorithm: Option<Algorithm>,
    pub scheme: Option<Scheme>,
    pub alpha_se: Option<f64>,
}

fn timing_csv(set: &TrialSet) -> String {
    let mut out = String::from("algorithm,scheme,alpha_se,trial,wall_time_s\n");
    for r in &set.records {
        let _ = writeln!(out, "{},{},{},{},{:.6}", r.algorithm, r.scheme, r.alpha_se, r.trial, r.wall_time_s);
    }
    out
}

fn write_set(set: &TrialSet, layout: &Layout, rel: &str) -> Result<()> {
    let text = serde_json::to_string(set).expect("records serialize");
    write_file(&layout.abs(rel), text.as_bytes())
}

fn read_set(layout: &Layout, rel: &str, hint: &str) -> Result<TrialSet> {
    require(layout, Path::new(rel), hint)?;
    let p = layout.abs(rel);
    let text = fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse { path: p, msg: e.to_string() })
}

pub fn stage_optimize(cfg: &ExperimentConfig, layout: &Layout, filter: &TrialFilter) -> Result<RunManifest> {
    let started = unix_now();
    cfg.validate()?;
    let (art, inputs) = load_artifacts(layout)?;
    let keys: Vec<_> = trial_keys(cfg)
        .into_iter()
        .filter(|k| filter.algorithm.is_none_or(|a| a == k.algorithm))
        .filter(|k| filter.scheme.is_none_or(|s| s == k.scheme))
        .filter(|k| filter.alpha_se.is_none_or(|a| a.to_bits() == k.alpha_se.to_bits()))
        .collect();
    if keys.is_empty() {
        return Err(Error::invalid("the trial filter matches no configured trial"));
    }
    // fail fast on missing models instead of recording one failure per trial
    for scheme in [Scheme::Baseline, Scheme::Ddoec] {
        if keys.iter().any(|k| k.scheme == scheme) {
            crate::optimizer::make_fitness(scheme, &art.models, art.normalizers.spec(cfg.alpha_se[0])?)?;
        }
    }
    let set = optimize_trials(cfg, &art, &keys);
    mkdir(&layout.abs("runs"))?;
    write_set(&set, layout, OPTIMIZED)?;
    write_file(&layout.abs("runs/timing.csv"), timing_csv(&set).as_bytes())?;
    let outputs = vec![PathBuf::from(OPTIMIZED)];
    finish(RunManifest::new("optimize", cfg, started), layout, "runs", &inputs, &outputs)
}

pub fn stage_validate(cfg: &ExperimentConfig, layout: &Layout) -> Result<RunManifest> {
    let started = unix_now();
    cfg.validate()?;
    let set = read_set(layout, OPTIMIZED, "optimize")?;
    require(layout, Path::new(NORMALIZERS), "train")?;
    let (art, _) = load_artifacts(layout)?;
    let set = validate_trials(cfg, &art.normalizers, set);
    mkdir(&layout.abs("validation"))?;
    write_set(&set, layout, VALIDATED)?;
    write_file(&layout.abs("validation/timing.csv"), timing_csv(&set).as_bytes())?;
    let inputs = vec![PathBuf::from(OPTIMIZED), PathBuf::from(NORMALIZERS)];
    finish(RunManifest::new("validate", cfg, started), layout, "validation", &inputs, &[PathBuf::from(VALIDATED)])
}

/// Load validated records, as written by `validate`.
pub fn load_validated(layout: &Layout) -> Result<TrialSet> {
    read_set(layout, VALIDATED, "validate")
}

pub fn stage_report(cfg: &ExperimentConfig, layout: &Layout) -> Result<RunManifest> {
    let started = unix_now();
    let set = load_validated(layout)?;
    mkdir(&layout.root)?;
    let outputs = emit_report(&set, &layout.root)?;
    finish(RunManifest::new("report", cfg, started), layout, ".", &[PathBuf::from(VALIDATED)], &outputs)
}

/// `gen-data → train → optimize → validate → report`.
pub fn stage_experiment(cfg: &ExperimentConfig, layout: &Layout) -> Result<Vec<RunManifest>> {
    Ok(vec![
        stage_gen_data(cfg, layout)?,
        stage_train(cfg, layout)?,
        stage_optimize(cfg, layout, &TrialFilter::default())?,
        stage_validate(cfg, layout)?,
        stage_report(cfg, layout)?,
    ])
}
