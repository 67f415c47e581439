use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::model::Candidate;
use crate::error::{Error, Result};
use crate::rng::SeedTree;

/// Cross-validation outcome for one menu entry. RMSE values are in units of
/// the full target range (`raw RMSE / (max y - min y)`), or raw units when
/// the target is constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvEntry {
    pub id: String,
    pub fold_rmse: Vec<f64>,
    pub mean_rmse: f64,
    pub std_rmse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    /// Free-form label, e.g. `model_e/ase`.
    pub label: String,
    pub k: usize,
    pub target_span: f64,
    pub entries: Vec<CvEntry>,
    pub chosen: usize,
}

impl CvReport {
    pub fn chosen_entry(&self) -> &CvEntry {
        &self.entries[self.chosen]
    }

    pub fn chosen_id(&self) -> &str {
        &self.chosen_entry().id
    }

    /// Chosen candidate's mean CV RMSE in raw target units.
    pub fn chosen_rmse_raw(&self) -> f64 {
        let m = self.chosen_entry().mean_rmse;
        if self.target_span > 0.0 {
            m * self.target_span
        } else {
            m
        }
    }
}

/// Row permutation used for fold assignment: a seeded shuffle, then
/// contiguous blocks. Fold `f` holds positions `[f*n/k, (f+1)*n/k)`.
pub fn fold_assignment(n: usize, k: usize, shuffle_seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::invalid(format!("k must be at least 2, got {k}")));
    }
    if k > n {
        return Err(Error::invalid(format!("k = {k} exceeds the {n} available rows")));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut SeedTree::root(shuffle_seed).child("cv_shuffle", n as u64).rng());
    Ok((0..k).map(|f| perm[f * n / k..(f + 1) * n / k].to_vec()).collect())
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn target_span(y: &[f64]) -> f64 {
    let (lo, hi) = y
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    hi - lo
}

/// K-fold RMSE of one candidate.
pub fn kfold_rmse(x: &[Vec<f64>], y: &[f64], k: usize, candidate: &Candidate, shuffle_seed: u64) -> Result<CvEntry> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!("{} feature rows but {} targets", x.len(), y.len())));
    }
    let folds = fold_assignment(x.len(), k, shuffle_seed)?;
    let span = target_span(y);
    let scale = if span > 0.0 { span } else { 1.0 };
    let fold_rmse = folds
        .par_iter()
        .enumerate()
        .map(|(f, held)| {
            let train: Vec<usize> = folds
                .iter()
                .enumerate()
                .filter(|&(g, _)| g != f)
                .flat_map(|(_, rows)| rows.iter().copied())
                .collect();
            let xt: Vec<Vec<f64>> = train.iter().map(|&i| x[i].clone()).collect();
            let yt: Vec<f64> = train.iter().map(|&i| y[i]).collect();
            let model = candidate.fit(&xt, &yt)?;
            let sse: f64 = held.iter().map(|&i| (model.predict_row(&x[i]) - y[i]).powi(2)).sum();
            Ok((sse / held.len() as f64).sqrt() / scale)
        })
        .collect::<Result<Vec<f64>>>()?;
    let (mean_rmse, std_rmse) = mean_std(&fold_rmse);
    Ok(CvEntry {
        id: candidate.id(),
        fold_rmse,
        mean_rmse,
        std_rmse,
    })
}

/// Evaluate every menu entry and pick the lowest mean RMSE (first wins ties).
pub fn cross_validate(
    label: &str,
    x: &[Vec<f64>],
    y: &[f64],
    k: usize,
    menu: &[Candidate],
    shuffle_seed: u64,
) -> Result<CvReport> {
    if menu.is_empty() {
        return Err(Error::invalid("empty model menu"));
    }
    let entries = menu
        .par_iter()
        .map(|c| kfold_rmse(x, y, k, c, shuffle_seed))
        .collect::<Result<Vec<_>>>()?;
    let mut chosen = 0;
    for (i, e) in entries.iter().enumerate() {
        if e.mean_rmse < entries[chosen].mean_rmse {
            chosen = i;
        }
    }
    Ok(CvReport {
        label: label.to_string(),
        k,
        target_span: target_span(y),
        entries,
        chosen,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surrogate::model::GbtParams;
    use rand::Rng;

    fn rows(n: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = SeedTree::root(seed).rng();
        (0..n)
            .map(|_| vec![rng.random::<f64>(), rng.random::<f64>(), rng.random::<f64>()])
            .collect()
    }

    fn gbt(n_trees: usize) -> Candidate {
        Candidate::Gbt(GbtParams { n_trees, learning_rate: 0.1, max_depth: 3, min_samples_leaf: 3 })
    }

    #[test]
    fn folds_partition_rows() {
        let folds = fold_assignment(103, 5, 9).unwrap();
        let mut all: Vec<usize> = folds.concat();
        all.sort_unstable();
        assert_eq!(all, (0..103).collect::<Vec<_>>());
        assert!(folds.iter().all(|f| f.len() == 20 || f.len() == 21));
        assert_eq!(folds, fold_assignment(103, 5, 9).unwrap());
    }

    #[test]
    fn bad_k_rejected() {
        assert!(fold_assignment(10, 1, 0).is_err());
        assert!(fold_assignment(4, 5, 0).is_err());
        assert!(kfold_rmse(&rows(4, 0), &[0.0; 4], 5, &gbt(2), 0).is_err());
    }

    #[test]
    fn constant_target_zero_rmse() {
        let x = rows(60, 1);
        let e = kfold_rmse(&x, &vec![3.5; 60], 5, &gbt(20), 0).unwrap();
        assert!(e.fold_rmse.iter().all(|&r| r == 0.0));
    }

    #[test]
    fn pure_noise_rmse_near_std() {
        let x = rows(600, 2);
        let mut rng = SeedTree::root(77).rng();
        let y: Vec<f64> = (0..600).map(|_| rng.random::<f64>()).collect();
        let (_, s) = mean_std(&y);
        // weakly fit model: out-of-fold error is the noise level
        let e = kfold_rmse(&x, &y, 5, &gbt(5), 4).unwrap();
        let raw = e.mean_rmse * target_span(&y);
        assert!((raw / s - 1.0).abs() < 0.2, "cv rmse {raw} vs std {s}");
    }

    #[test]
    fn selection_picks_minimum() {
        let x = rows(200, 3);
        let y: Vec<f64> = x.iter().map(|r| (4.0 * r[0]).sin() + r[1] * r[2]).collect();
        let menu = [gbt(1), gbt(100), gbt(10)];
        let rep = cross_validate("t", &x, &y, 5, &menu, 0).unwrap();
        let min = rep.entries.iter().map(|e| e.mean_rmse).fold(f64::INFINITY, f64::min);
        assert_eq!(rep.chosen_entry().mean_rmse, min);
        assert_eq!(rep.chosen_id(), "gbt_t100_lr0.1_d3");
    }
}
