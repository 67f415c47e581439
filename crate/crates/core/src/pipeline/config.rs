use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netsim::{CopBounds, PowerModelParams, RadioParams, Range, SimParams};
use crate::optimizer::{GaParams, SaParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Sa,
    Ga,
}

impl Algorithm {
    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::Sa => "sa",
            Algorithm::Ga => "ga",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "sa" => Some(Algorithm::Sa),
            "ga" => Some(Algorithm::Ga),
            _ => None,
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Experiment configuration. The on-disk form is TOML with these field
/// names as top-level keys and `[radio]`, `[power]`, `[sa]`, `[ga]` tables;
/// every key is optional and unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// DBS density range, DBS/m².
    pub lambda_dbs: [f64; 2],
    /// Szone radius range, m.
    pub r_sz: [f64; 2],
    /// Transmit power range, dBm.
    pub p_tx_dbm: [f64; 2],
    /// Grid points per COP dimension.
    pub bins: usize,
    /// Monte Carlo snapshots per COP in the databases.
    pub n_cycles: usize,
    /// Snapshots per simulator validation of an optimized COP.
    pub validation_cycles: usize,
    /// Positioning-error radius, m.
    pub r_er: f64,
    pub lambda_ue: f64,
    pub area_m2: f64,
    pub rsz_expansion: f64,
    pub alpha_se: Vec<f64>,
    pub algorithms: Vec<Algorithm>,
    pub trials: usize,
    pub master_seed: u64,
    pub cv_folds: usize,
    pub out_dir: PathBuf,
    pub radio: RadioParams,
    pub power: PowerModelParams,
    pub sa: SaParams,
    pub ga: GaParams,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let b = CopBounds::default();
        Self {
            lambda_dbs: [b.lambda_dbs.min, b.lambda_dbs.max],
            r_sz: [b.r_sz.min, b.r_sz.max],
            p_tx_dbm: [b.p_tx_dbm.min, b.p_tx_dbm.max],
            bins: 10,
            n_cycles: 20,
            validation_cycles: 20,
            r_er: 15.0,
            lambda_ue: 0.0005,
            area_m2: 1.0e6,
            rsz_expansion: 1.0,
            alpha_se: vec![0.25, 0.5, 0.75],
            algorithms: vec![Algorithm::Sa, Algorithm::Ga],
            trials: 20,
            master_seed: 2024,
            cv_folds: 5,
            out_dir: PathBuf::from("ddoec-out"),
            radio: RadioParams::default(),
            power: PowerModelParams::default(),
            sa: SaParams::default(),
            ga: GaParams::default(),
        }
    }
}

fn cfg_err(key: &str, msg: impl Into<String>) -> Error {
    Error::Config {
        key: key.into(),
        msg: msg.into(),
    }
}

impl ExperimentConfig {
    pub fn bounds(&self) -> CopBounds {
        CopBounds {
            lambda_dbs: Range::new(self.lambda_dbs[0], self.lambda_dbs[1]),
            r_sz: Range::new(self.r_sz[0], self.r_sz[1]),
            p_tx_dbm: Range::new(self.p_tx_dbm[0], self.p_tx_dbm[1]),
        }
    }

    /// Simulator parameters, with `r_er` as the error radius.
    pub fn sim(&self) -> SimParams {
        SimParams {
            area_m2: self.area_m2,
            lambda_ue: self.lambda_ue,
            rsz_expansion: self.rsz_expansion,
            radio: RadioParams {
                error_radius_m: self.r_er,
                ..self.radio
            },
            power: self.power,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.bounds().validate()?;
        if self.bins < 2 {
            return Err(cfg_err("bins", format!("must be >= 2, got {}", self.bins)));
        }
        for (key, v) in [("n_cycles", self.n_cycles), ("validation_cycles", self.validation_cycles), ("trials", self.trials)] {
            if v == 0 {
                return Err(cfg_err(key, "must be >= 1"));
            }
        }
        if !(self.r_er >= 0.0 && self.r_er.is_finite()) {
            return Err(cfg_err("r_er", format!("must be finite and >= 0, got {}", self.r_er)));
        }
        if self.alpha_se.is_empty() {
            return Err(cfg_err("alpha_se", "needs at least one weight"));
        }
        if let Some(a) = self.alpha_se.iter().find(|a| !(0.0..=1.0).contains(*a)) {
            return Err(cfg_err("alpha_se", format!("weight {a} outside [0, 1]")));
        }
        if self.algorithms.is_empty() {
            return Err(cfg_err("algorithms", "needs at least one of \"sa\", \"ga\""));
        }
        let n_rows = self.bins.pow(3);
        if self.cv_folds < 2 || self.cv_folds > n_rows {
            return Err(cfg_err("cv_folds", format!("must be in [2, {n_rows}], got {}", self.cv_folds)));
        }
        self.sim().validate()?;
        self.sa.validate().map_err(|e| cfg_err("sa", e.to_string()))?;
        self.ga.validate().map_err(|e| cfg_err("ga", e.to_string()))?;
        Ok(())
    }

    /// Render as TOML, loadable by [`parse_config`].
    pub fn to_toml(&self) -> String {
        let mut t = toml::Table::try_from(self).expect("config serializes to TOML");
        if let Some(r) = t.get_mut("radio").and_then(|r| r.as_table_mut()) {
            r.remove("error_radius_m");
        }
        toml::to_string(&t).expect("config serializes to TOML")
    }
}

/// Parse TOML config text; omitted keys take the defaults.
pub fn parse_config(text: &str, origin: &Path) -> Result<ExperimentConfig> {
    let table: toml::Table = toml::from_str(text).map_err(|e| Error::Parse {
        path: origin.to_path_buf(),
        msg: one_line(&e.to_string()),
    })?;
    if table
        .get("radio")
        .and_then(|r| r.as_table())
        .is_some_and(|r| r.contains_key("error_radius_m"))
    {
        return Err(cfg_err("radio.error_radius_m", "set the top-level `r_er` instead"));
    }
    let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Parse {
        path: origin.to_path_buf(),
        msg: one_line(&e.to_string()),
    })?;
    cfg.validate()?;
    Ok(cfg)
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Load a TOML config, or the config snapshot stored in a run manifest
/// (`*.json`).
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    if path.extension().is_some_and(|e| e == "json") {
        let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            msg: e.to_string(),
        })?;
        let snapshot = v.get("config").cloned().ok_or_else(|| Error::Parse {
            path: path.to_path_buf(),
            msg: "manifest has no `config` entry".into(),
        })?;
        let cfg: ExperimentConfig = serde_json::from_value(snapshot).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            msg: e.to_string(),
        })?;
        cfg.validate()?;
        return Ok(cfg);
    }
    parse_config(&text, path)
}
