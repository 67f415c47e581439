use std::fmt::Write;
use std::fs;
use std::path::{Path, PathBuf};

use super::config::Algorithm;
use super::experiment::{summarize, PairSummary, TrialRecord, TrialSet};
use super::svg::{box_plot, line_plot, Series};
use crate::datagen::write_file;
use crate::error::{Error, Result};
use crate::optimizer::Scheme;

pub const SUMMARY_HEADER: &str = "algorithm,alpha_se,complete,\
baseline_reported,baseline_validated,baseline_validated_ase_norm,baseline_validated_ee_norm,\
baseline_lambda_dbs,baseline_r_sz_m,baseline_p_tx_dbm,baseline_median_iterations,baseline_trials,baseline_failed,\
ddoec_reported,ddoec_validated,ddoec_validated_ase_norm,ddoec_validated_ee_norm,\
ddoec_lambda_dbs,ddoec_r_sz_m,ddoec_p_tx_dbm,ddoec_median_iterations,ddoec_trials,ddoec_failed,\
relative_gain,median_paired_gain,sign_pos,sign_neg,sign_p_greater";

fn opt_cop_fields(s: &super::experiment::CellSummary) -> String {
    match s.best_cop {
        Some(c) => format!("{},{},{}", c.lambda_dbs, c.r_sz, c.p_tx_dbm),
        None => "NaN,NaN,NaN".into(),
    }
}

pub fn summary_csv(summary: &[PairSummary]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for p in summary {
        let mut line = format!("{},{},{}", p.algorithm, p.alpha_se, p.complete);
        for c in [&p.baseline, &p.ddoec] {
            let _ = write!(
                line,
                ",{},{},{},{},{},{},{},{}",
                c.mean_reported,
                c.mean_validated,
                c.mean_validated_ase_norm,
                c.mean_validated_ee_norm,
                opt_cop_fields(c),
                c.median_iterations,
                c.n_trials,
                c.n_failed
            );
        }
        let _ = write!(
            line,
            ",{},{},{},{},{}",
            p.relative_gain, p.median_paired_gain, p.sign_test.n_pos, p.sign_test.n_neg, p.sign_test.p_greater
        );
        out.push_str(&line);
        out.push('\n');
    }
    out
}

pub fn trace_file_name(algorithm: Algorithm, scheme: Scheme, alpha_se: f64) -> String {
    format!("{}_{}_{}.csv", algorithm, scheme, alpha_se)
}

fn cell_records<'a>(set: &'a TrialSet, a: Algorithm, s: Scheme, alpha: f64) -> Vec<&'a TrialRecord> {
    let mut v: Vec<&TrialRecord> = set
        .records
        .iter()
        .filter(|r| r.algorithm == a && r.scheme == s && r.alpha_se.to_bits() == alpha.to_bits())
        .collect();
    v.sort_by_key(|r| r.trial);
    v
}

/// Per-iteration best-so-far values, one column per trial. Traces that
/// stopped early are held at their final value; `mean` averages across
/// trials. Row `i` is iteration `i`, row 0 being the starting point.
pub fn trace_csv(recs: &[&TrialRecord]) -> (String, Vec<f64>) {
    let rows = recs.iter().map(|r| r.opt.trace.len()).max().unwrap_or(0);
    let mut out = String::from("iteration,mean");
    for r in recs {
        let _ = write!(out, ",trial_{}", r.trial);
    }
    out.push('\n');
    let mut means = Vec::with_capacity(rows);
    for i in 0..rows {
        let vals: Vec<f64> = recs
            .iter()
            .map(|r| *r.opt.trace.get(i).or(r.opt.trace.last()).unwrap_or(&f64::NAN))
            .collect();
        let m = super::stats::mean(&vals);
        means.push(m);
        let _ = write!(out, "{i},{m}");
        for v in vals {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    (out, means)
}

pub fn iterations_csv(set: &TrialSet) -> String {
    let mut out = String::from("algorithm,scheme,alpha_se,trial,iterations_to_converge,n_evals\n");
    for r in &set.records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.algorithm, r.scheme, r.alpha_se, r.trial, r.opt.iterations_to_converge, r.opt.n_evals
        );
    }
    out
}

/// Render every report file in memory: `(relative path, contents)`.
pub fn render_report(set: &TrialSet) -> Result<Vec<(PathBuf, String)>> {
    if set.records.is_empty() {
        return Err(Error::invalid("no trial records to report"));
    }
    let summary = summarize(set);
    let mut files = vec![
        (PathBuf::from("summary.csv"), summary_csv(&summary)),
        (PathBuf::from("iterations.csv"), iterations_csv(set)),
    ];
    let mut box_groups: Vec<(String, Vec<f64>)> = Vec::new();
    for p in &summary {
        let mut series_data = Vec::new();
        for scheme in [Scheme::Baseline, Scheme::Ddoec] {
            let recs = cell_records(set, p.algorithm, scheme, p.alpha_se);
            let (csv, means) = trace_csv(&recs);
            files.push((
                Path::new("traces").join(trace_file_name(p.algorithm, scheme, p.alpha_se)),
                csv,
            ));
            series_data.push((scheme, means));
        }
        let series: Vec<Series> = series_data
            .iter()
            .map(|(s, m)| Series {
                name: s.as_str(),
                color: if *s == Scheme::Baseline { "#1f77b4" } else { "#2ca02c" },
                values: m,
            })
            .collect();
        files.push((
            Path::new("plots").join(format!("convergence_{}_{}.svg", p.algorithm, p.alpha_se)),
            line_plot(
                &format!("{} convergence, alpha_se = {}", p.algorithm.as_str().to_uppercase(), p.alpha_se),
                "iteration",
                "mean best objective (surrogate)",
                &series,
            ),
        ));
    }
    let mut algos: Vec<Algorithm> = summary.iter().map(|p| p.algorithm).collect();
    algos.dedup();
    for a in algos {
        for s in [Scheme::Baseline, Scheme::Ddoec] {
            let v: Vec<f64> = set
                .records
                .iter()
                .filter(|r| r.algorithm == a && r.scheme == s)
                .map(|r| r.opt.iterations_to_converge as f64)
                .collect();
            box_groups.push((format!("{a} {s}"), v));
        }
    }
    files.push((
        PathBuf::from("plots/iterations.svg"),
        box_plot("Iterations to converge", "iterations", &box_groups),
    ));
    Ok(files)
}

/// Write `summary.csv`, `iterations.csv`, `traces/*.csv` and `plots/*.svg`
/// under `out_dir`. Returns the written paths relative to `out_dir`.
pub fn emit_report(set: &TrialSet, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let files = render_report(set)?;
    for sub in ["traces", "plots"] {
        let d = out_dir.join(sub);
        fs::create_dir_all(&d).map_err(|e| Error::io(&d, e))?;
    }
    let probe = out_dir.join(".write-probe");
    fs::write(&probe, b"").map_err(|e| Error::io(&probe, e))?;
    let _ = fs::remove_file(&probe);
    for (rel, text) in &files {
        write_file(&out_dir.join(rel), text.as_bytes())?;
    }
    Ok(files.into_iter().map(|f| f.0).collect())
}
