use rayon::prelude::*;

use super::{Database, DatabaseMeta, DatasetRow, DbFlavor};
use crate::error::{Error, Result};
use crate::netsim::{average_kpis, CopBounds, CopPoint, Flavor, SimParams};
use crate::rng::SeedTree;

/// `bins` evenly spaced values from `min` to `max`, both endpoints exact.
pub fn linspace(min: f64, max: f64, bins: usize) -> Vec<f64> {
    match bins {
        0 => Vec::new(),
        1 => vec![min],
        _ => (0..bins)
            .map(|i| {
                if i == bins - 1 {
                    max
                } else {
                    min + (max - min) * i as f64 / (bins - 1) as f64
                }
            })
            .collect(),
    }
}

/// Cartesian grid over the COP box, `lambda_dbs` outermost and `p_tx` innermost.
pub fn cop_grid(bounds: &CopBounds, bins: usize) -> Result<Vec<CopPoint>> {
    if bins < 2 {
        return Err(Error::invalid(format!("grid needs at least 2 bins per dimension, got {bins}")));
    }
    bounds.validate()?;
    let l = linspace(bounds.lambda_dbs.min, bounds.lambda_dbs.max, bins);
    let r = linspace(bounds.r_sz.min, bounds.r_sz.max, bins);
    let p = linspace(bounds.p_tx_dbm.min, bounds.p_tx_dbm.max, bins);
    let mut out = Vec::with_capacity(bins * bins * bins);
    for &lambda in &l {
        for &rsz in &r {
            for &ptx in &p {
                out.push(CopPoint::new(lambda, rsz, ptx));
            }
        }
    }
    Ok(out)
}

/// Simulate every grid COP under both flavors with common random numbers.
///
/// Grid point `i` uses seed `root(master_seed).child("cop", i).as_u64()` for
/// both flavors. Work is spread over the current rayon pool; rows come back
/// in grid order.
pub fn generate_paired_databases(
    grid: &[CopPoint],
    bounds: &CopBounds,
    bins: usize,
    sim: &SimParams,
    n_cycles: usize,
    master_seed: u64,
) -> Result<(Database, Database)> {
    if grid.is_empty() {
        return Err(Error::invalid("empty COP grid"));
    }
    sim.validate()?;
    let root = SeedTree::root(master_seed);
    let pairs: Vec<(DatasetRow, DatasetRow)> = grid
        .par_iter()
        .enumerate()
        .map(|(i, cop)| {
            let seed = root.child("cop", i as u64).as_u64();
            let run = |flavor: Flavor, tag: DbFlavor| {
                average_kpis(cop, sim, n_cycles, flavor, seed).map(|k| DatasetRow {
                    cop: *cop,
                    ase: k.ase,
                    ee: k.ee,
                    flavor: tag,
                    n_cycles,
                    seed,
                })
            };
            let ideal = run(Flavor::Ideal, DbFlavor::Ideal);
            let err = run(Flavor::Erroneous, DbFlavor::Erroneous);
            ideal.and_then(|a| err.map(|b| (a, b))).map_err(|e| Error::AtCop {
                cop: cop.to_string(),
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;
    let meta = |flavor| DatabaseMeta {
        schema_version: super::SCHEMA_VERSION,
        flavor,
        bins,
        n_cycles,
        master_seed,
        bounds: *bounds,
        sim: *sim,
    };
    let (ideal, erroneous): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
    Ok((
        Database {
            rows: ideal,
            meta: meta(DbFlavor::Ideal),
        },
        Database {
            rows: erroneous,
            meta: meta(DbFlavor::Erroneous),
        },
    ))
}

/// Signed per-row `ideal − erroneous` KPI difference.
pub fn residualize(ideal: &Database, erroneous: &Database) -> Result<Database> {
    if !ideal.same_grid(erroneous) {
        return Err(Error::DatabaseMismatch(format!(
            "cannot residualize: COP grids differ ({} vs {} rows or different order)",
            ideal.len(),
            erroneous.len()
        )));
    }
    let rows = ideal
        .rows
        .iter()
        .zip(&erroneous.rows)
        .map(|(a, b)| DatasetRow {
            cop: a.cop,
            ase: a.ase - b.ase,
            ee: a.ee - b.ee,
            flavor: DbFlavor::Residual,
            n_cycles: a.n_cycles,
            seed: a.seed,
        })
        .collect();
    let mut meta = ideal.meta.clone();
    meta.flavor = DbFlavor::Residual;
    Ok(Database { rows, meta })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_bounds_ten_bins() {
        let g = cop_grid(&CopBounds::default(), 10).unwrap();
        assert_eq!(g.len(), 1000);
        assert!(g.contains(&CopPoint::new(0.0005, 10.0, 15.0)));
        assert!(g.contains(&CopPoint::new(0.0125, 50.0, 30.0)));
        assert_eq!(g[0], CopPoint::new(0.0005, 10.0, 15.0));
        assert_eq!(g[999], CopPoint::new(0.0125, 50.0, 30.0));
        // p_tx varies fastest
        assert_eq!(g[1].lambda_dbs, g[0].lambda_dbs);
        assert_eq!(g[1].r_sz, g[0].r_sz);
        assert!(g[1].p_tx_dbm > g[0].p_tx_dbm);
        assert!(g[100].lambda_dbs > g[99].lambda_dbs);
    }

    #[test]
    fn two_bins_are_corners() {
        let b = CopBounds::default();
        let g = cop_grid(&b, 2).unwrap();
        assert_eq!(g.len(), 8);
        for c in &g {
            assert!(c.lambda_dbs == b.lambda_dbs.min || c.lambda_dbs == b.lambda_dbs.max);
            assert!(c.r_sz == b.r_sz.min || c.r_sz == b.r_sz.max);
            assert!(c.p_tx_dbm == b.p_tx_dbm.min || c.p_tx_dbm == b.p_tx_dbm.max);
        }
    }

    #[test]
    fn rejects_single_bin() {
        assert!(cop_grid(&CopBounds::default(), 1).is_err());
    }

    #[test]
    fn grid_is_bijection_with_index_triples() {
        let bins = 4;
        let g = cop_grid(&CopBounds::default(), bins).unwrap();
        let b = CopBounds::default();
        let axes = [
            linspace(b.lambda_dbs.min, b.lambda_dbs.max, bins),
            linspace(b.r_sz.min, b.r_sz.max, bins),
            linspace(b.p_tx_dbm.min, b.p_tx_dbm.max, bins),
        ];
        for i in 0..bins {
            for j in 0..bins {
                for k in 0..bins {
                    let c = g[(i * bins + j) * bins + k];
                    assert_eq!(c, CopPoint::new(axes[0][i], axes[1][j], axes[2][k]));
                }
            }
        }
    }

    fn tiny_db(flavor: DbFlavor, ase: &[f64]) -> Database {
        let grid = cop_grid(&CopBounds::default(), 2).unwrap();
        Database {
            rows: grid
                .iter()
                .zip(ase.iter().cycle())
                .map(|(c, &a)| DatasetRow {
                    cop: *c,
                    ase: a,
                    ee: a * 10.0,
                    flavor,
                    n_cycles: 1,
                    seed: 0,
                })
                .collect(),
            meta: DatabaseMeta {
                schema_version: 1,
                flavor,
                bins: 2,
                n_cycles: 1,
                master_seed: 0,
                bounds: CopBounds::default(),
                sim: SimParams::default(),
            },
        }
    }

    #[test]
    fn residual_definition() {
        let ideal = tiny_db(DbFlavor::Ideal, &[0.003]);
        let err = tiny_db(DbFlavor::Erroneous, &[0.002]);
        let r = residualize(&ideal, &err).unwrap();
        assert_eq!(r.flavor(), DbFlavor::Residual);
        assert!(r.rows.iter().all(|row| (row.ase - 0.001).abs() < 1e-15));
        let zero = residualize(&ideal, &ideal).unwrap();
        assert!(zero.rows.iter().all(|row| row.ase == 0.0 && row.ee == 0.0));
    }

    #[test]
    fn residual_antisymmetric() {
        let a = tiny_db(DbFlavor::Ideal, &[0.003, 0.001, 0.0042]);
        let b = tiny_db(DbFlavor::Erroneous, &[0.002, 0.0017]);
        let ab = residualize(&a, &b).unwrap();
        let ba = residualize(&b, &a).unwrap();
        for (x, y) in ab.rows.iter().zip(&ba.rows) {
            assert_eq!(x.ase, -y.ase);
            assert_eq!(x.ee, -y.ee);
        }
    }

    #[test]
    fn residual_rejects_grid_mismatch() {
        let a = tiny_db(DbFlavor::Ideal, &[0.003]);
        let mut b = tiny_db(DbFlavor::Erroneous, &[0.002]);
        b.rows.swap(0, 1);
        assert!(matches!(residualize(&a, &b), Err(Error::DatabaseMismatch(_))));
        b.rows.pop();
        assert!(residualize(&a, &b).is_err());
    }

    #[test]
    fn paired_generation_zero_error_identical() {
        let mut sim = SimParams::default();
        sim.radio.error_radius_m = 0.0;
        let b = CopBounds::default();
        let g = cop_grid(&b, 2).unwrap();
        let (i, e) = generate_paired_databases(&g, &b, 2, &sim, 1, 77).unwrap();
        assert_eq!(i.rows.len(), 8);
        for (x, y) in i.rows.iter().zip(&e.rows) {
            assert_eq!((x.ase, x.ee), (y.ase, y.ee));
        }
        assert!(generate_paired_databases(&[], &b, 2, &sim, 1, 77).is_err());
    }
}
