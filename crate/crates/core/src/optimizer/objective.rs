use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netsim::CopPoint;
use crate::surrogate::{KpiPair, ModelRole, Target};

/// Weighted sum of normalized ASE and EE.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveSpec {
    pub alpha_se: f64,
    pub theta_max: f64,
    pub eta_max: f64,
}

impl ObjectiveSpec {
    pub fn new(alpha_se: f64, theta_max: f64, eta_max: f64) -> Result<Self> {
        let s = Self { alpha_se, theta_max, eta_max };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha_se) {
            return Err(Error::invalid(format!("alpha_se must be in [0, 1], got {}", self.alpha_se)));
        }
        if !(self.theta_max > 0.0 && self.theta_max.is_finite()) || !(self.eta_max > 0.0 && self.eta_max.is_finite()) {
            return Err(Error::invalid(format!(
                "normalizers must be positive and finite, got theta_max = {}, eta_max = {}",
                self.theta_max, self.eta_max
            )));
        }
        Ok(())
    }

    /// The two weighted terms `(α·ase/θ_max, (1−α)·ee/η_max)`, with negative
    /// KPI values clamped to 0.
    pub fn components(&self, ase: f64, ee: f64) -> (f64, f64) {
        (
            self.alpha_se * ase.max(0.0) / self.theta_max,
            (1.0 - self.alpha_se) * ee.max(0.0) / self.eta_max,
        )
    }
}

pub fn objective_value(ase: f64, ee: f64, spec: &ObjectiveSpec) -> f64 {
    let (a, e) = spec.components(ase, ee);
    a + e
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Baseline,
    Ddoec,
    Oracle,
}

impl Scheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::Baseline => "baseline",
            Scheme::Ddoec => "ddoec",
            Scheme::Oracle => "oracle",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "baseline" => Some(Scheme::Baseline),
            "ddoec" => Some(Scheme::Ddoec),
            "oracle" => Some(Scheme::Oracle),
            _ => None,
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Surrogate models available to the fitness builders.
#[derive(Debug, Clone, Default)]
pub struct ModelSet {
    pub model_e: Option<KpiPair>,
    pub model_r: Option<KpiPair>,
    pub oracle: Option<KpiPair>,
}

/// Surrogate objective over the COP box.
#[derive(Debug, Clone)]
pub struct SurrogateFitness {
    scheme: Scheme,
    primary: KpiPair,
    correction: Option<KpiPair>,
    spec: ObjectiveSpec,
}

impl SurrogateFitness {
    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn spec(&self) -> &ObjectiveSpec {
        &self.spec
    }

    /// Predicted `(ase, ee)`; DD-OEC adds the residual correction.
    pub fn predict_kpis(&self, cop: &CopPoint) -> (f64, f64) {
        let (mut ase, mut ee) = self.primary.predict(cop);
        if let Some(r) = &self.correction {
            let (ra, re) = r.predict(cop);
            ase += ra;
            ee += re;
        }
        (ase, ee)
    }

    pub fn components(&self, cop: &CopPoint) -> (f64, f64) {
        let (a, e) = self.predict_kpis(cop);
        self.spec.components(a, e)
    }

    pub fn value(&self, cop: &CopPoint) -> f64 {
        let (a, e) = self.predict_kpis(cop);
        objective_value(a, e, &self.spec)
    }
}

fn check_pair(pair: Option<&KpiPair>, role: ModelRole, scheme: Scheme) -> Result<KpiPair> {
    let pair = pair.ok_or_else(|| {
        Error::MissingArtifact(format!(
            "the {scheme} fitness needs {} models; run `train` first",
            role.as_str()
        ))
    })?;
    for (m, t) in [(&pair.ase, Target::Ase), (&pair.ee, Target::Ee)] {
        if m.role != role || m.target != t {
            return Err(Error::ModelMismatch(format!(
                "expected a {}/{} model, got {}/{}",
                role.as_str(),
                t.as_str(),
                m.role.as_str(),
                m.target.as_str()
            )));
        }
    }
    Ok(pair.clone())
}

pub fn make_fitness(scheme: Scheme, models: &ModelSet, spec: ObjectiveSpec) -> Result<SurrogateFitness> {
    spec.validate()?;
    let (primary, correction) = match scheme {
        Scheme::Baseline => (check_pair(models.model_e.as_ref(), ModelRole::ModelE, scheme)?, None),
        Scheme::Ddoec => (
            check_pair(models.model_e.as_ref(), ModelRole::ModelE, scheme)?,
            Some(check_pair(models.model_r.as_ref(), ModelRole::ModelR, scheme)?),
        ),
        Scheme::Oracle => (check_pair(models.oracle.as_ref(), ModelRole::Oracle, scheme)?, None),
    };
    Ok(SurrogateFitness { scheme, primary, correction, spec })
}
