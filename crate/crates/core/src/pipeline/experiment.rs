use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{Algorithm, ExperimentConfig};
use super::stats::{mean, median, quantile, sign_test, SignTest};
use crate::datagen::{cop_grid, generate_paired_databases, residualize, Database};
use crate::error::{Error, Result};
use crate::netsim::{average_kpis, CopPoint, Flavor};
use crate::optimizer::{ga_optimize, make_fitness, sa_optimize, ModelSet, ObjectiveSpec, OptResult, Scheme};
use crate::rng::SeedTree;
use crate::surrogate::{default_menu, train_kpi_models, train_oracle_models, CvReport, TrainConfig};

/// Seed derivation. Every stream is a [`SeedTree`] node below
/// `root(master_seed)`:
///
/// * databases: `child("datagen", 0)`
/// * training (CV shuffle, forest bootstrap): `child("train", 0)`
/// * optimizer run: `child("opt", alpha.to_bits()).child(algo, trial)`
/// * simulator validation: `child("validate", alpha.to_bits()).child(algo, trial)`
///
/// Baseline and DD-OEC runs of the same trial share both the optimizer and
/// the validation seed.
pub mod seeds {
    use super::*;

    pub fn datagen(master: u64) -> u64 {
        SeedTree::root(master).child("datagen", 0).as_u64()
    }

    pub fn train(master: u64) -> u64 {
        SeedTree::root(master).child("train", 0).as_u64()
    }

    pub fn optimizer(master: u64, algo: Algorithm, alpha: f64, trial: usize) -> u64 {
        SeedTree::root(master)
            .child("opt", alpha.to_bits())
            .child(algo.as_str(), trial as u64)
            .as_u64()
    }

    pub fn validation(master: u64, algo: Algorithm, alpha: f64, trial: usize) -> u64 {
        SeedTree::root(master)
            .child("validate", alpha.to_bits())
            .child(algo.as_str(), trial as u64)
            .as_u64()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Databases {
    pub ideal: Database,
    pub erroneous: Database,
    pub residual: Database,
}

pub fn generate_databases(cfg: &ExperimentConfig) -> Result<Databases> {
    cfg.validate()?;
    let bounds = cfg.bounds();
    let grid = cop_grid(&bounds, cfg.bins)?;
    let (ideal, erroneous) = generate_paired_databases(
        &grid,
        &bounds,
        cfg.bins,
        &cfg.sim(),
        cfg.n_cycles,
        seeds::datagen(cfg.master_seed),
    )?;
    let residual = residualize(&ideal, &erroneous)?;
    Ok(Databases { ideal, erroneous, residual })
}

/// KPI normalizers: the maxima of the ideal database.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalizers {
    pub theta_max: f64,
    pub eta_max: f64,
}

impl Normalizers {
    pub fn from_ideal(ideal: &Database) -> Result<Self> {
        let (theta_max, eta_max) = ideal.kpi_maxima();
        if !(theta_max > 0.0) || !(eta_max > 0.0) {
            return Err(Error::DatabaseMismatch(
                "ideal database has no positive ASE/EE values to normalize by".into(),
            ));
        }
        Ok(Self { theta_max, eta_max })
    }

    pub fn spec(&self, alpha_se: f64) -> Result<ObjectiveSpec> {
        ObjectiveSpec::new(alpha_se, self.theta_max, self.eta_max)
    }
}

#[derive(Debug, Clone)]
pub struct Artifacts {
    pub models: ModelSet,
    pub normalizers: Normalizers,
    pub cv_reports: Vec<CvReport>,
}

pub fn train_config(cfg: &ExperimentConfig) -> TrainConfig {
    let seed = seeds::train(cfg.master_seed);
    TrainConfig {
        k: cfg.cv_folds,
        shuffle_seed: seed,
        menu: default_menu(seed),
    }
}

/// Model-E, Model-R and the ideal-database oracle pair.
pub fn train_models(cfg: &ExperimentConfig, dbs: &Databases) -> Result<Artifacts> {
    let tc = train_config(cfg);
    let trained = train_kpi_models(&dbs.erroneous, &dbs.residual, &tc)?;
    let (oracle, oracle_reports) = train_oracle_models(&dbs.ideal, &tc)?;
    let mut cv_reports = trained.reports;
    cv_reports.extend(oracle_reports);
    Ok(Artifacts {
        models: ModelSet {
            model_e: Some(trained.model_e),
            model_r: Some(trained.model_r),
            oracle: Some(oracle),
        },
        normalizers: Normalizers::from_ideal(&dbs.ideal)?,
        cv_reports,
    })
}

/// Simulator check of an optimized COP under ideal positions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Validation {
    pub objective: f64,
    /// Weighted normalized ASE term `α·ase/θ_max`.
    pub ase_norm: f64,
    /// Weighted normalized EE term `(1−α)·ee/η_max`.
    pub ee_norm: f64,
    pub ase: f64,
    pub ee: f64,
}

pub fn validate_on_simulator(cop: &CopPoint, cfg: &ExperimentConfig, spec: &ObjectiveSpec, seed: u64) -> Result<Validation> {
    if !cfg.bounds().contains(cop) {
        return Err(Error::invalid(format!("COP {cop} lies outside the configured bounds")));
    }
    let k = average_kpis(cop, &cfg.sim(), cfg.validation_cycles, Flavor::Ideal, seed)?;
    let (ase_norm, ee_norm) = spec.components(k.ase, k.ee);
    Ok(Validation {
        objective: ase_norm + ee_norm,
        ase_norm,
        ee_norm,
        ase: k.ase,
        ee: k.ee,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub algorithm: Algorithm,
    pub scheme: Scheme,
    pub alpha_se: f64,
    pub trial: usize,
    pub opt_seed: u64,
    pub validation_seed: u64,
    pub opt: OptResult,
    /// Surrogate objective at the optimum.
    pub reported_objective: f64,
    pub reported_ase_norm: f64,
    pub reported_ee_norm: f64,
    /// Ideal-trained surrogate evaluated at the optimum, when available.
    pub oracle_objective: Option<f64>,
    pub validation: Option<Validation>,
    /// Not serialized, so that record files are reproducible byte for byte.
    #[serde(skip)]
    pub wall_time_s: f64,
}

impl TrialRecord {
    pub fn validated_objective(&self) -> Option<f64> {
        self.validation.map(|v| v.objective)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub algorithm: Algorithm,
    pub scheme: Scheme,
    pub alpha_se: f64,
    pub trial: usize,
    pub error: String,
}

/// Run the optimizer for one trial; `validation` is left empty.
pub fn optimize_trial(
    cfg: &ExperimentConfig,
    art: &Artifacts,
    algorithm: Algorithm,
    scheme: Scheme,
    alpha_se: f64,
    trial: usize,
) -> Result<TrialRecord> {
    let start = Instant::now();
    let spec = art.normalizers.spec(alpha_se)?;
    let fit = make_fitness(scheme, &art.models, spec)?;
    let opt_seed = seeds::optimizer(cfg.master_seed, algorithm, alpha_se, trial);
    let mut rng: rand_chacha::ChaCha8Rng = SeedTree::root(opt_seed).rng();
    let f = |c: &CopPoint| fit.value(c);
    let bounds = cfg.bounds();
    let opt = match algorithm {
        Algorithm::Sa => sa_optimize(f, &bounds, &cfg.sa, &mut rng)?,
        Algorithm::Ga => ga_optimize(f, &bounds, &cfg.ga, &mut rng)?,
    };
    let (reported_ase_norm, reported_ee_norm) = fit.components(&opt.best_cop);
    let oracle_objective = match &art.models.oracle {
        Some(_) => Some(make_fitness(Scheme::Oracle, &art.models, spec)?.value(&opt.best_cop)),
        None => None,
    };
    Ok(TrialRecord {
        algorithm,
        scheme,
        alpha_se,
        trial,
        opt_seed,
        validation_seed: seeds::validation(cfg.master_seed, algorithm, alpha_se, trial),
        reported_objective: opt.best_value,
        reported_ase_norm,
        reported_ee_norm,
        oracle_objective,
        opt,
        validation: None,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

pub fn validate_record(rec: &mut TrialRecord, cfg: &ExperimentConfig, norm: &Normalizers) -> Result<()> {
    let start = Instant::now();
    let spec = norm.spec(rec.alpha_se)?;
    rec.validation = Some(validate_on_simulator(&rec.opt.best_cop, cfg, &spec, rec.validation_seed)?);
    rec.wall_time_s += start.elapsed().as_secs_f64();
    Ok(())
}

/// Optimize and validate one trial.
pub fn run_trial(
    cfg: &ExperimentConfig,
    art: &Artifacts,
    algorithm: Algorithm,
    scheme: Scheme,
    alpha_se: f64,
    trial: usize,
) -> Result<TrialRecord> {
    let mut rec = optimize_trial(cfg, art, algorithm, scheme, alpha_se, trial)?;
    validate_record(&mut rec, cfg, &art.normalizers)?;
    Ok(rec)
}

/// One trial slot of the experiment cross product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialKey {
    pub algorithm: Algorithm,
    pub scheme: Scheme,
    pub alpha_se: f64,
    pub trial: usize,
}

/// `{algorithms × weights × (baseline, ddoec) × trials}` in report order.
pub fn trial_keys(cfg: &ExperimentConfig) -> Vec<TrialKey> {
    let mut out = Vec::new();
    for &algorithm in &cfg.algorithms {
        for &alpha_se in &cfg.alpha_se {
            for scheme in [Scheme::Baseline, Scheme::Ddoec] {
                for trial in 0..cfg.trials {
                    out.push(TrialKey { algorithm, scheme, alpha_se, trial });
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrialSet {
    pub records: Vec<TrialRecord>,
    pub failures: Vec<TrialFailure>,
}

fn run_keys<F>(keys: &[TrialKey], f: F) -> TrialSet
where
    F: Fn(&TrialKey) -> Result<TrialRecord> + Sync,
{
    let results: Vec<_> = keys.par_iter().map(|k| (k, f(k))).collect();
    let mut set = TrialSet::default();
    for (k, r) in results {
        match r {
            Ok(rec) => set.records.push(rec),
            Err(e) => set.failures.push(TrialFailure {
                algorithm: k.algorithm,
                scheme: k.scheme,
                alpha_se: k.alpha_se,
                trial: k.trial,
                error: e.to_string(),
            }),
        }
    }
    set
}

/// Optimize every key (no validation).
pub fn optimize_trials(cfg: &ExperimentConfig, art: &Artifacts, keys: &[TrialKey]) -> TrialSet {
    run_keys(keys, |k| optimize_trial(cfg, art, k.algorithm, k.scheme, k.alpha_se, k.trial))
}

/// Validate every record of `set` on the simulator. Records that fail move
/// to the failure list.
pub fn validate_trials(cfg: &ExperimentConfig, norm: &Normalizers, set: TrialSet) -> TrialSet {
    let results: Vec<_> = set
        .records
        .into_par_iter()
        .map(|mut r| {
            let res = validate_record(&mut r, cfg, norm);
            (r, res)
        })
        .collect();
    let mut out = TrialSet {
        records: Vec::new(),
        failures: set.failures,
    };
    for (r, res) in results {
        match res {
            Ok(()) => out.records.push(r),
            Err(e) => out.failures.push(TrialFailure {
                algorithm: r.algorithm,
                scheme: r.scheme,
                alpha_se: r.alpha_se,
                trial: r.trial,
                error: e.to_string(),
            }),
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub scheme: Scheme,
    pub n_trials: usize,
    pub n_failed: usize,
    pub mean_reported: f64,
    pub mean_validated: f64,
    pub mean_validated_ase_norm: f64,
    pub mean_validated_ee_norm: f64,
    /// Optimum of the trial with the highest validated objective.
    pub best_cop: Option<CopPoint>,
    pub best_validated: f64,
    pub median_iterations: f64,
    pub q1_iterations: f64,
    pub q3_iterations: f64,
}

/// Baseline and DD-OEC side by side for one `(algorithm, α)` pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairSummary {
    pub algorithm: Algorithm,
    pub alpha_se: f64,
    pub baseline: CellSummary,
    pub ddoec: CellSummary,
    /// `(mean ddoec − mean baseline) / mean baseline`, validated objectives.
    pub relative_gain: f64,
    /// Median over trials of the paired relative gain.
    pub median_paired_gain: f64,
    pub sign_test: SignTest,
    pub complete: bool,
}

fn summarize_cell(scheme: Scheme, recs: &[&TrialRecord], n_failed: usize) -> CellSummary {
    let validated: Vec<&TrialRecord> = recs.iter().copied().filter(|r| r.validation.is_some()).collect();
    let vals = |f: fn(&Validation) -> f64| -> Vec<f64> { validated.iter().map(|r| f(r.validation.as_ref().unwrap())).collect() };
    let best = validated
        .iter()
        .copied()
        .fold(None::<&TrialRecord>, |b, r| match b {
            Some(b) if b.validated_objective() >= r.validated_objective() => Some(b),
            _ => Some(r),
        });
    let iters: Vec<f64> = recs.iter().map(|r| r.opt.iterations_to_converge as f64).collect();
    CellSummary {
        scheme,
        n_trials: recs.len(),
        n_failed,
        mean_reported: mean(&recs.iter().map(|r| r.reported_objective).collect::<Vec<_>>()),
        mean_validated: mean(&vals(|v| v.objective)),
        mean_validated_ase_norm: mean(&vals(|v| v.ase_norm)),
        mean_validated_ee_norm: mean(&vals(|v| v.ee_norm)),
        best_cop: best.map(|r| r.opt.best_cop),
        best_validated: best.and_then(|r| r.validated_objective()).unwrap_or(f64::NAN),
        median_iterations: median(&iters),
        q1_iterations: quantile(&iters, 0.25),
        q3_iterations: quantile(&iters, 0.75),
    }
}

/// Aggregate records per `(algorithm, α)`, pairing trials by index.
pub fn summarize(set: &TrialSet) -> Vec<PairSummary> {
    let mut pairs: Vec<(Algorithm, f64)> = Vec::new();
    for (a, al) in set
        .records
        .iter()
        .map(|r| (r.algorithm, r.alpha_se))
        .chain(set.failures.iter().map(|f| (f.algorithm, f.alpha_se)))
    {
        if !pairs.iter().any(|&(b, bl)| b == a && bl.to_bits() == al.to_bits()) {
            pairs.push((a, al));
        }
    }
    pairs
        .into_iter()
        .map(|(algorithm, alpha_se)| {
            let of = |s: Scheme| -> Vec<&TrialRecord> {
                let mut v: Vec<&TrialRecord> = set
                    .records
                    .iter()
                    .filter(|r| r.algorithm == algorithm && r.alpha_se.to_bits() == alpha_se.to_bits() && r.scheme == s)
                    .collect();
                v.sort_by_key(|r| r.trial);
                v
            };
            let failed = |s: Scheme| {
                set.failures
                    .iter()
                    .filter(|f| f.algorithm == algorithm && f.alpha_se.to_bits() == alpha_se.to_bits() && f.scheme == s)
                    .count()
            };
            let (b, d) = (of(Scheme::Baseline), of(Scheme::Ddoec));
            let baseline = summarize_cell(Scheme::Baseline, &b, failed(Scheme::Baseline));
            let ddoec = summarize_cell(Scheme::Ddoec, &d, failed(Scheme::Ddoec));
            let mut diffs = Vec::new();
            let mut gains = Vec::new();
            for rb in &b {
                if let Some(rd) = d.iter().find(|r| r.trial == rb.trial) {
                    if let (Some(vb), Some(vd)) = (rb.validated_objective(), rd.validated_objective()) {
                        diffs.push(vd - vb);
                        gains.push((vd - vb) / vb);
                    }
                }
            }
            let complete = baseline.n_failed == 0
                && ddoec.n_failed == 0
                && b.iter().chain(&d).all(|r| r.validation.is_some())
                && b.len() == d.len();
            PairSummary {
                algorithm,
                alpha_se,
                relative_gain: (ddoec.mean_validated - baseline.mean_validated) / baseline.mean_validated,
                median_paired_gain: median(&gains),
                sign_test: sign_test(&diffs),
                complete,
                baseline,
                ddoec,
            }
        })
        .collect()
}

/// Result of a full experiment run.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub trials: TrialSet,
    pub summary: Vec<PairSummary>,
}

pub fn run_experiment_with(cfg: &ExperimentConfig, art: &Artifacts) -> Result<Experiment> {
    cfg.validate()?;
    let set = optimize_trials(cfg, art, &trial_keys(cfg));
    let set = validate_trials(cfg, &art.normalizers, set);
    let summary = summarize(&set);
    Ok(Experiment { trials: set, summary })
}

/// Generate databases, train, and run every trial.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<(Databases, Artifacts, Experiment)> {
    let dbs = generate_databases(cfg)?;
    let art = train_models(cfg, &dbs)?;
    let exp = run_experiment_with(cfg, &art)?;
    Ok((dbs, art, exp))
}

