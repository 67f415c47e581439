//! COP grid sweeps and the ideal / erroneous / residual KPI databases.

mod generate;
mod io;

pub use generate::{cop_grid, generate_paired_databases, linspace, residualize};
pub(crate) use io::write_file;
pub use io::{load_database, meta_path, persist_database, CSV_HEADER, SCHEMA_VERSION};

use serde::{Deserialize, Serialize};

use crate::netsim::{CopBounds, CopPoint, SimParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DbFlavor {
    Ideal,
    Erroneous,
    Residual,
}

impl DbFlavor {
    pub fn as_str(&self) -> &'static str {
        match self {
            DbFlavor::Ideal => "ideal",
            DbFlavor::Erroneous => "erroneous",
            DbFlavor::Residual => "residual",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "ideal" => Some(DbFlavor::Ideal),
            "erroneous" => Some(DbFlavor::Erroneous),
            "residual" => Some(DbFlavor::Residual),
            _ => None,
        }
    }
}

impl std::fmt::Display for DbFlavor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatasetRow {
    pub cop: CopPoint,
    pub ase: f64,
    pub ee: f64,
    pub flavor: DbFlavor,
    pub n_cycles: usize,
    pub seed: u64,
}

/// Generation parameters stored in the `.meta` sidecar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatabaseMeta {
    pub schema_version: u32,
    pub flavor: DbFlavor,
    pub bins: usize,
    pub n_cycles: usize,
    pub master_seed: u64,
    pub bounds: CopBounds,
    pub sim: SimParams,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Database {
    pub rows: Vec<DatasetRow>,
    pub meta: DatabaseMeta,
}

impl Database {
    pub fn flavor(&self) -> DbFlavor {
        self.meta.flavor
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn cops(&self) -> Vec<CopPoint> {
        self.rows.iter().map(|r| r.cop).collect()
    }

    pub fn ase(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.ase).collect()
    }

    pub fn ee(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.ee).collect()
    }

    /// Largest ASE and EE in the database.
    pub fn kpi_maxima(&self) -> (f64, f64) {
        self.rows
            .iter()
            .fold((f64::NEG_INFINITY, f64::NEG_INFINITY), |(a, e), r| (a.max(r.ase), e.max(r.ee)))
    }

    /// True when both databases list the same COPs in the same order.
    pub fn same_grid(&self, other: &Database) -> bool {
        self.rows.len() == other.rows.len() && self.rows.iter().zip(&other.rows).all(|(a, b)| a.cop == b.cop)
    }
}
