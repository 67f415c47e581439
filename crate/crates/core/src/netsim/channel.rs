//! Close-in two-slope path loss, shadowing and the affine power model.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RadioParams {
    pub carrier_hz: f64,
    /// Path-loss exponent below the breakpoint.
    pub pl_exp_near: f64,
    /// Additional exponent applied beyond the breakpoint.
    pub pl_exp_far: f64,
    pub breakpoint_m: f64,
    pub shadow_sigma_db: f64,
    /// Thermal noise over the system bandwidth.
    pub noise_dbm: f64,
    pub tx_gain_dbi: f64,
    pub error_radius_m: f64,
    /// Link distances are floored here before path loss is evaluated.
    pub min_distance_m: f64,
}

impl Default for RadioParams {
    fn default() -> Self {
        Self {
            carrier_hz: 3.5e9,
            pl_exp_near: 2.1,
            pl_exp_far: 4.0,
            breakpoint_m: 10.0,
            shadow_sigma_db: 4.0,
            noise_dbm: -104.0,
            tx_gain_dbi: 0.0,
            error_radius_m: 15.0,
            min_distance_m: 1.0,
        }
    }
}

impl RadioParams {
    pub fn validate(&self) -> Result<()> {
        let checks: [(&str, bool); 8] = [
            ("carrier_hz", self.carrier_hz.is_finite() && self.carrier_hz > 0.0),
            ("breakpoint_m", self.breakpoint_m.is_finite() && self.breakpoint_m > 0.0),
            ("pl_exp_near", self.pl_exp_near.is_finite() && self.pl_exp_near >= 0.0),
            ("pl_exp_far", self.pl_exp_far.is_finite() && self.pl_exp_far >= 0.0),
            ("shadow_sigma_db", self.shadow_sigma_db.is_finite() && self.shadow_sigma_db >= 0.0),
            ("error_radius_m", self.error_radius_m.is_finite() && self.error_radius_m >= 0.0),
            ("min_distance_m", self.min_distance_m.is_finite() && self.min_distance_m > 0.0),
            ("noise_dbm", self.noise_dbm.is_finite() && self.tx_gain_dbi.is_finite()),
        ];
        for (key, ok) in checks {
            if !ok {
                return Err(Error::Config {
                    key: format!("radio.{key}"),
                    msg: "out of range".into(),
                });
            }
        }
        Ok(())
    }

    /// Free-space loss at 1 m, `20·log10(4πf/c)`.
    pub fn fspl_1m_db(&self) -> f64 {
        20.0 * (4.0 * std::f64::consts::PI * self.carrier_hz / SPEED_OF_LIGHT).log10()
    }
}

/// Path gain in dB (a negative number for any realistic distance).
pub fn path_loss_db(d: f64, rp: &RadioParams) -> Result<f64> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::invalid(format!("path loss distance must be > 0, got {d}")));
    }
    Ok(path_gain_db_unchecked(d, rp.fspl_1m_db(), rp))
}

#[inline]
fn path_gain_db_unchecked(d: f64, fspl_1m: f64, rp: &RadioParams) -> f64 {
    let mut pl = -fspl_1m - 10.0 * rp.pl_exp_near * d.log10();
    if d > rp.breakpoint_m {
        pl -= 10.0 * rp.pl_exp_far * (d / rp.breakpoint_m).log10();
    }
    pl
}

/// Precomputed link-budget constants for the per-snapshot hot loop.
///
/// Received power is evaluated in natural-log form from squared distances:
/// `eirp · exp(−ln10/10 · F − (l1/2)·ln d² − (l2/2)·ln(d²/d_t²)·[d > d_t] + ln10/10 · χ_dB)`,
/// which equals `eirp · 10^((PL(d) + χ_dB)/10)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LinkBudget {
    ln_eirp_fspl: f64,
    half_near: f64,
    half_far: f64,
    ln_bp2: f64,
    bp2: f64,
    min_d2: f64,
    pub noise_mw: f64,
}

const DB_TO_LN: f64 = std::f64::consts::LN_10 / 10.0;

impl LinkBudget {
    pub fn new(rp: &RadioParams, p_tx_dbm: f64) -> Self {
        let bp2 = rp.breakpoint_m * rp.breakpoint_m;
        Self {
            ln_eirp_fspl: DB_TO_LN * (p_tx_dbm + rp.tx_gain_dbi - rp.fspl_1m_db()),
            half_near: 0.5 * rp.pl_exp_near,
            half_far: 0.5 * rp.pl_exp_far,
            ln_bp2: bp2.ln(),
            bp2,
            min_d2: rp.min_distance_m * rp.min_distance_m,
            noise_mw: dbm_to_mw(rp.noise_dbm),
        }
    }

    /// Received power in mW over a link of squared length `d2` with
    /// shadowing `shadow_db`.
    #[inline]
    pub fn rx_mw_d2(&self, d2: f64, shadow_db: f64) -> f64 {
        let d2 = d2.max(self.min_d2);
        let ln_d2 = d2.ln();
        let mut e = self.ln_eirp_fspl - self.half_near * ln_d2 + DB_TO_LN * shadow_db;
        if d2 > self.bp2 {
            e -= self.half_far * (ln_d2 - self.ln_bp2);
        }
        e.exp()
    }
}

#[inline]
pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

#[inline]
pub fn dbm_to_w(dbm: f64) -> f64 {
    dbm_to_mw(dbm) / 1000.0
}

/// Affine active/sleep power model for DBSs plus the fixed controller draw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PowerModelParams {
    pub dbs_p0_w: f64,
    pub dbs_slope: f64,
    pub dbs_sleep_w: f64,
    pub cbs_fixed_w: f64,
}

impl Default for PowerModelParams {
    fn default() -> Self {
        Self {
            dbs_p0_w: 6.8,
            dbs_slope: 4.0,
            dbs_sleep_w: 4.3,
            cbs_fixed_w: 130.0,
        }
    }
}

impl PowerModelParams {
    pub fn validate(&self) -> Result<()> {
        let all = [self.dbs_p0_w, self.dbs_slope, self.dbs_sleep_w, self.cbs_fixed_w];
        if all.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Config {
                key: "power".into(),
                msg: "all power model values must be finite and >= 0".into(),
            });
        }
        if self.dbs_p0_w < self.dbs_sleep_w {
            return Err(Error::Config {
                key: "power.dbs_sleep_w".into(),
                msg: "sleep power exceeds active static power".into(),
            });
        }
        Ok(())
    }

    /// Total network draw for `active` of `total` DBSs transmitting at `p_tx_dbm`.
    pub fn total_power_w(&self, active: usize, total: usize, p_tx_dbm: f64) -> f64 {
        let per_active = self.dbs_p0_w + self.dbs_slope * dbm_to_w(p_tx_dbm);
        self.cbs_fixed_w + active as f64 * per_active + (total - active) as f64 * self.dbs_sleep_w
    }
}
