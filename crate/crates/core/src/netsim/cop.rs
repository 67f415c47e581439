//! Configuration-and-optimization parameter triples and their box.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One network configuration: DBS density, Szone radius and transmit power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CopPoint {
    /// DBSs per square metre.
    pub lambda_dbs: f64,
    /// Szone radius in metres.
    pub r_sz: f64,
    /// Per-DBS transmit power in dBm.
    pub p_tx_dbm: f64,
}

impl CopPoint {
    pub const fn new(lambda_dbs: f64, r_sz: f64, p_tx_dbm: f64) -> Self {
        Self {
            lambda_dbs,
            r_sz,
            p_tx_dbm,
        }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.lambda_dbs, self.r_sz, self.p_tx_dbm]
    }

    pub fn from_array(v: [f64; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }
}

impl std::fmt::Display for CopPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{:.4e}, {:.3}, {:.3}]", self.lambda_dbs, self.r_sz, self.p_tx_dbm)
    }
}

/// Inclusive `(min, max)` range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub min: f64,
    pub max: f64,
}

impl Range {
    pub const fn new(min: f64, max: f64) -> Self {
        Self { min, max }
    }

    pub fn width(&self) -> f64 {
        self.max - self.min
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.min && v <= self.max
    }

    pub fn clamp(&self, v: f64) -> f64 {
        v.clamp(self.min, self.max)
    }
}

/// Feasible box for the three COP dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CopBounds {
    pub lambda_dbs: Range,
    pub r_sz: Range,
    pub p_tx_dbm: Range,
}

impl Default for CopBounds {
    fn default() -> Self {
        Self {
            lambda_dbs: Range::new(0.0005, 0.0125),
            r_sz: Range::new(10.0, 50.0),
            p_tx_dbm: Range::new(15.0, 30.0),
        }
    }
}

impl CopBounds {
    pub fn ranges(&self) -> [Range; 3] {
        [self.lambda_dbs, self.r_sz, self.p_tx_dbm]
    }

    pub fn validate(&self) -> Result<()> {
        let named = [("lambda_dbs", self.lambda_dbs), ("r_sz", self.r_sz), ("p_tx_dbm", self.p_tx_dbm)];
        for (key, r) in named {
            if !r.min.is_finite() || !r.max.is_finite() || !(r.min < r.max) {
                return Err(Error::Config {
                    key: key.into(),
                    msg: format!("range ({}, {}) must satisfy min < max", r.min, r.max),
                });
            }
        }
        if self.lambda_dbs.min < 0.0 || self.r_sz.min <= 0.0 {
            return Err(Error::Config {
                key: if self.lambda_dbs.min < 0.0 { "lambda_dbs" } else { "r_sz" }.into(),
                msg: "lower bound must be positive".into(),
            });
        }
        Ok(())
    }

    pub fn contains(&self, c: &CopPoint) -> bool {
        self.lambda_dbs.contains(c.lambda_dbs) && self.r_sz.contains(c.r_sz) && self.p_tx_dbm.contains(c.p_tx_dbm)
    }

    pub fn clamp(&self, c: CopPoint) -> CopPoint {
        CopPoint::new(
            self.lambda_dbs.clamp(c.lambda_dbs),
            self.r_sz.clamp(c.r_sz),
            self.p_tx_dbm.clamp(c.p_tx_dbm),
        )
    }

    pub fn center(&self) -> CopPoint {
        let r = self.ranges();
        CopPoint::from_array([0, 1, 2].map(|i| 0.5 * (r[i].min + r[i].max)))
    }
}
