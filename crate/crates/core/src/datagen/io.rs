//! CSV persistence for databases.
//!
//! Rows go to a CSV file with the header [`CSV_HEADER`]; floats are written
//! with 17 significant digits (`{:.16e}`) so they parse back bit-exactly.
//! Generation parameters go to a JSON sidecar next to it with the `.meta`
//! extension (`ideal.csv` → `ideal.meta`).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::{Database, DatabaseMeta, DatasetRow, DbFlavor};
use crate::error::{Error, Result};
use crate::netsim::CopPoint;

pub const SCHEMA_VERSION: u32 = 1;
pub const CSV_HEADER: [&str; 8] = ["lambda_dbs", "r_sz_m", "p_tx_dbm", "ase", "ee", "flavor", "n_cycles", "seed"];

pub fn meta_path(path: &Path) -> PathBuf {
    path.with_extension("meta")
}

pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn persist_database(db: &Database, path: &Path) -> Result<()> {
    let mut out = String::with_capacity(64 * (db.rows.len() + 1));
    out.push_str(&CSV_HEADER.join(","));
    out.push('\n');
    for r in &db.rows {
        let fields = [
            fmt_f64(r.cop.lambda_dbs),
            fmt_f64(r.cop.r_sz),
            fmt_f64(r.cop.p_tx_dbm),
            fmt_f64(r.ase),
            fmt_f64(r.ee),
            r.flavor.as_str().to_string(),
            r.n_cycles.to_string(),
            r.seed.to_string(),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    let meta = serde_json::to_string_pretty(&db.meta).expect("meta serializes");
    write_file(path, out.as_bytes())?;
    write_file(&meta_path(path), meta.as_bytes())
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(bytes).map_err(|e| Error::io(path, e))
}

pub fn load_database(path: &Path) -> Result<Database> {
    let mpath = meta_path(path);
    let meta_text = fs::read_to_string(&mpath).map_err(|e| Error::io(&mpath, e))?;
    let raw: serde_json::Value = serde_json::from_str(&meta_text).map_err(|e| Error::Parse {
        path: mpath.clone(),
        msg: e.to_string(),
    })?;
    match raw.get("schema_version").and_then(|v| v.as_u64()) {
        Some(v) if v == SCHEMA_VERSION as u64 => {}
        Some(v) => {
            return Err(Error::Schema {
                path: mpath,
                msg: format!("schema version {v}, expected {SCHEMA_VERSION}"),
            })
        }
        None => {
            return Err(Error::Schema {
                path: mpath,
                msg: "missing schema_version".into(),
            })
        }
    }
    let meta: DatabaseMeta = serde_json::from_value(raw).map_err(|e| Error::Parse {
        path: mpath.clone(),
        msg: e.to_string(),
    })?;

    let parse_err = |msg: String| Error::Parse {
        path: path.to_path_buf(),
        msg,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| parse_err(e.to_string()))?;
    let headers = reader.headers().map_err(|e| parse_err(e.to_string()))?.clone();
    let mut col = [0usize; 8];
    for (slot, name) in col.iter_mut().zip(CSV_HEADER) {
        *slot = headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| parse_err(format!("missing column `{name}`")))?;
    }

    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| parse_err(e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        let field = |i: usize| -> Result<&str> {
            rec.get(col[i])
                .map(str::trim)
                .ok_or_else(|| parse_err(format!("line {line}, column {} (`{}`): missing value", col[i] + 1, CSV_HEADER[i])))
        };
        let num = |i: usize| -> Result<f64> {
            let s = field(i)?;
            s.parse::<f64>()
                .map_err(|e| parse_err(format!("line {line}, column {} (`{}`): {e}: {s:?}", col[i] + 1, CSV_HEADER[i])))
        };
        let int = |i: usize| -> Result<u64> {
            let s = field(i)?;
            s.parse::<u64>()
                .map_err(|e| parse_err(format!("line {line}, column {} (`{}`): {e}: {s:?}", col[i] + 1, CSV_HEADER[i])))
        };
        let flavor_s = field(5)?;
        let flavor = DbFlavor::parse(flavor_s)
            .ok_or_else(|| parse_err(format!("line {line}, column {} (`flavor`): unknown flavor {flavor_s:?}", col[5] + 1)))?;
        rows.push(DatasetRow {
            cop: CopPoint::new(num(0)?, num(1)?, num(2)?),
            ase: num(3)?,
            ee: num(4)?,
            flavor,
            n_cycles: int(6)? as usize,
            seed: int(7)?,
        });
    }
    Ok(Database { rows, meta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::cop_grid;
    use crate::netsim::{CopBounds, SimParams};

    fn sample_db() -> Database {
        let rows = cop_grid(&CopBounds::default(), 2)
            .unwrap()
            .into_iter()
            .enumerate()
            .map(|(i, cop)| DatasetRow {
                cop,
                ase: 1.0 / (3.0 + i as f64),
                ee: -0.1f64.powi(i as i32) * std::f64::consts::PI,
                flavor: DbFlavor::Residual,
                n_cycles: 20,
                seed: u64::MAX - i as u64,
            })
            .collect();
        Database {
            rows,
            meta: DatabaseMeta {
                schema_version: SCHEMA_VERSION,
                flavor: DbFlavor::Residual,
                bins: 2,
                n_cycles: 20,
                master_seed: u64::MAX,
                bounds: CopBounds::default(),
                sim: SimParams::default(),
            },
        }
    }

    #[test]
    fn round_trip_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("db.csv");
        let db = sample_db();
        persist_database(&db, &p).unwrap();
        assert!(meta_path(&p).exists());
        assert_eq!(load_database(&p).unwrap(), db);
    }

    #[test]
    fn empty_rows_keep_meta() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("empty.csv");
        let mut db = sample_db();
        db.rows.clear();
        persist_database(&db, &p).unwrap();
        let back = load_database(&p).unwrap();
        assert!(back.rows.is_empty());
        assert_eq!(back.meta, db.meta);
    }

    #[test]
    fn missing_column_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("db.csv");
        persist_database(&sample_db(), &p).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        let stripped: String = text
            .lines()
            .map(|l| l.rsplit_once(',').unwrap().0.to_string() + "\n")
            .collect();
        fs::write(&p, stripped).unwrap();
        let err = load_database(&p).unwrap_err().to_string();
        assert!(err.contains("`seed`"), "{err}");
    }

    #[test]
    fn malformed_value_reports_line_and_column() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("db.csv");
        persist_database(&sample_db(), &p).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        let mut f: Vec<&str> = lines[3].split(',').collect();
        f[3] = "abc";
        lines[3] = f.join(",");
        fs::write(&p, lines.join("\n")).unwrap();
        let err = load_database(&p).unwrap_err().to_string();
        assert!(err.contains("line 4") && err.contains("column 4") && err.contains("`ase`"), "{err}");
    }

    #[test]
    fn schema_version_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("db.csv");
        let mut db = sample_db();
        db.meta.schema_version = 2;
        persist_database(&db, &p).unwrap();
        assert!(matches!(load_database(&p), Err(Error::Schema { .. })));
    }
}
