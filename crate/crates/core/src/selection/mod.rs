//! Model selection over evaluation traces: early stopping (ES), random
//! seed selection (RSS), and the hyper-parameter search (HPS) protocols.
//!
//! Ties are broken toward the smaller epoch, then the smaller run id, then
//! the lexicographically smaller architecture id. The final epoch of a curve
//! is the largest epoch it reports.

mod traces;

use std::collections::BTreeMap;

use serde::Serialize;

pub use traces::{CurveKey, EvalRecord, EvalTraceSet, Split, TrainedOn};

use crate::error::{Error, Result};
use crate::rank_analysis::spearman;
use crate::seed::{derive_seed, rng_from_seed};

/// Which epoch of each run a run-level choice looks at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum At {
    LastEpoch,
    BestEpoch,
}

impl std::str::FromStr for At {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "last" | "last_epoch" => Ok(At::LastEpoch),
            "best" | "best_epoch" => Ok(At::BestEpoch),
            other => Err(format!("expected `last` or `best`, found `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionOutcome {
    pub arch_id: String,
    pub run_id: u64,
    pub epoch: u64,
    pub trained_on: TrainedOn,
    pub selected_split: Split,
    pub selected_error: f64,
    pub report_errors: BTreeMap<Split, f64>,
}

impl SelectionOutcome {
    fn at(
        traces: &EvalTraceSet,
        arch_id: &str,
        trained_on: TrainedOn,
        run_id: u64,
        epoch: usize,
        split: Split,
    ) -> Self {
        let report_errors = traces.errors_at(arch_id, trained_on, run_id, epoch);
        SelectionOutcome {
            arch_id: arch_id.to_owned(),
            run_id,
            epoch: epoch as u64,
            trained_on,
            selected_split: split,
            selected_error: report_errors[&split],
            report_errors,
        }
    }

    fn error_on(&self, split: Split) -> Result<f64> {
        self.report_errors.get(&split).copied().ok_or_else(|| {
            Error::NotFound(format!(
                "no {split} error for arch {}, run {}, epoch {}",
                self.arch_id, self.run_id, self.epoch
            ))
        })
    }
}

/// First index of the minimum.
fn argmin(values: &[f64]) -> Option<(usize, f64)> {
    values.iter().copied().enumerate().fold(None, |best, (i, v)| match best {
        Some((_, b)) if v >= b => best,
        _ => Some((i, v)),
    })
}

fn last(values: &[f64]) -> f64 {
    values[values.len() - 1]
}

fn mean(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |acc, v| acc + v) / values.len() as f64
}

fn population_std(values: &[f64]) -> f64 {
    let m = mean(values);
    (values.iter().fold(0.0, |acc, v| acc + (v - m) * (v - m)) / values.len() as f64).sqrt()
}

fn not_found_curve(arch_id: &str, trained_on: TrainedOn, run_id: u64, split: Split) -> Error {
    Error::NotFound(format!(
        "no {split} errors for arch {arch_id}, run {run_id}, trained_on {trained_on}"
    ))
}

/// Early stopping: the epoch of one run with the lowest error on `split`.
pub fn select_es(
    traces: &EvalTraceSet,
    arch_id: &str,
    trained_on: TrainedOn,
    run_id: u64,
    split: Split,
) -> Result<SelectionOutcome> {
    let curve = traces
        .curve(arch_id, trained_on, run_id, split)
        .ok_or_else(|| not_found_curve(arch_id, trained_on, run_id, split))?;
    let (epoch, _) = argmin(curve).expect("curves are non-empty");
    Ok(SelectionOutcome::at(traces, arch_id, trained_on, run_id, epoch, split))
}

/// Random seed selection among the runs of one architecture.
///
/// With [`At::LastEpoch`] runs are compared by their final-epoch error; with
/// [`At::BestEpoch`] the best (run, epoch) pair overall is taken, which is
/// RSS combined with ES.
pub fn select_rss(
    traces: &EvalTraceSet,
    arch_id: &str,
    trained_on: TrainedOn,
    split: Split,
    at: At,
) -> Result<SelectionOutcome> {
    let mut best: Option<(u64, usize, f64)> = None;
    for run in traces.runs(arch_id, trained_on, split) {
        let curve = traces.curve(arch_id, trained_on, run, split).expect("listed run");
        let (epoch, err) = match at {
            At::LastEpoch => (curve.len() - 1, last(curve)),
            At::BestEpoch => argmin(curve).expect("curves are non-empty"),
        };
        if best.is_none_or(|(_, _, b)| err < b) {
            best = Some((run, epoch, err));
        }
    }
    let (run, epoch, _) = best.ok_or_else(|| {
        Error::NotFound(format!(
            "no runs with {split} errors for arch {arch_id}, trained_on {trained_on}"
        ))
    })?;
    Ok(SelectionOutcome::at(traces, arch_id, trained_on, run, epoch, split))
}

/// Synthetic protocol: the (arch, run, epoch) among fully-trained models with
/// the lowest synthetic error.
pub fn select_hps_synthetic(traces: &EvalTraceSet) -> Result<SelectionOutcome> {
    let mut best: Option<(&CurveKey, usize, f64)> = None;
    for (key, curve) in traces.curves() {
        if key.trained_on != TrainedOn::Full || key.split != Split::Synthetic {
            continue;
        }
        let (epoch, err) = argmin(curve).expect("curves are non-empty");
        if best.is_none_or(|(_, _, b)| err < b) {
            best = Some((key, epoch, err));
        }
    }
    let (key, epoch, _) =
        best.ok_or_else(|| Error::NotFound("no synthetic errors for fully-trained models".into()))?;
    Ok(SelectionOutcome::at(
        traces,
        &key.arch_id,
        TrainedOn::Full,
        key.run_id,
        epoch,
        Split::Synthetic,
    ))
}

/// How the standard protocol's chosen architecture is scored on test data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum StandardScoring {
    /// Mean final-epoch test error over the architecture's full-data runs.
    Mean,
    /// Final-epoch test error of one full-data run drawn with this seed.
    RandomRun { seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StandardOutcome {
    pub arch_id: String,
    /// Mean final-epoch validation error of the subset-trained runs.
    pub val_mean: f64,
    pub expected_error: f64,
    pub scoring: StandardScoring,
}

fn final_errors(traces: &EvalTraceSet, arch_id: &str, trained_on: TrainedOn, split: Split) -> Vec<(u64, f64)> {
    traces
        .runs(arch_id, trained_on, split)
        .into_iter()
        .map(|run| (run, last(traces.curve(arch_id, trained_on, run, split).expect("listed run"))))
        .collect()
}

/// Standard protocol: pick the architecture with the lowest mean validation
/// error among subset-trained runs, then score it on its full-data runs.
pub fn select_hps_standard(traces: &EvalTraceSet, scoring: StandardScoring) -> Result<StandardOutcome> {
    let mut best: Option<(&str, f64)> = None;
    for arch in traces.archs() {
        let vals: Vec<f64> = final_errors(traces, arch, TrainedOn::Subset, Split::Val)
            .into_iter()
            .map(|(_, e)| e)
            .collect();
        if vals.is_empty() {
            continue;
        }
        let m = mean(&vals);
        if best.is_none_or(|(_, b)| m < b) {
            best = Some((arch, m));
        }
    }
    let (arch, val_mean) =
        best.ok_or_else(|| Error::NotFound("no validation errors for subset-trained models".into()))?;
    let tests = final_errors(traces, arch, TrainedOn::Full, Split::Test);
    if tests.is_empty() {
        return Err(Error::NotFound(format!(
            "no test errors for fully-trained runs of arch {arch}"
        )));
    }
    let expected_error = match scoring {
        StandardScoring::Mean => mean(&tests.iter().map(|(_, e)| *e).collect::<Vec<_>>()),
        StandardScoring::RandomRun { seed } => {
            use rand::Rng as _;
            let mut rng = rng_from_seed(derive_seed(seed, &[0]));
            tests[rng.random_range(0..tests.len())].1
        }
    };
    Ok(StandardOutcome {
        arch_id: arch.to_owned(),
        val_mean,
        expected_error,
        scoring,
    })
}

/// Test error of the three HPS alternatives side by side.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolComparison {
    pub synthetic: SelectionOutcome,
    pub synthetic_test_error: f64,
    pub standard: StandardOutcome,
    pub standard_test_error: f64,
    /// Mean final-epoch test error over every fully-trained model.
    pub random_mean: f64,
    pub random_std: f64,
    pub models: usize,
    /// Spearman correlation between per-architecture mean validation error
    /// (subset runs) and per-architecture mean test error (full runs).
    pub val_rank_spearman: Option<f64>,
    /// Same, ranking by per-architecture mean synthetic error.
    pub synthetic_rank_spearman: Option<f64>,
}

pub fn compare_protocols(
    traces: &EvalTraceSet,
    scoring: StandardScoring,
) -> Result<ProtocolComparison> {
    let synthetic = select_hps_synthetic(traces)?;
    let synthetic_test_error = synthetic.error_on(Split::Test)?;
    let standard = select_hps_standard(traces, scoring)?;

    let mut all_tests = Vec::new();
    for arch in traces.archs() {
        all_tests.extend(
            final_errors(traces, arch, TrainedOn::Full, Split::Test)
                .into_iter()
                .map(|(_, e)| e),
        );
    }
    let standard_test_error = standard.expected_error;
    Ok(ProtocolComparison {
        synthetic,
        synthetic_test_error,
        standard,
        standard_test_error,
        random_mean: mean(&all_tests),
        random_std: population_std(&all_tests),
        models: all_tests.len(),
        val_rank_spearman: arch_rank_spearman(traces, (TrainedOn::Subset, Split::Val)),
        synthetic_rank_spearman: arch_rank_spearman(traces, (TrainedOn::Full, Split::Synthetic)),
    })
}

fn arch_rank_spearman(traces: &EvalTraceSet, by: (TrainedOn, Split)) -> Option<f64> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for arch in traces.archs() {
        let score = final_errors(traces, arch, by.0, by.1);
        let test = final_errors(traces, arch, TrainedOn::Full, Split::Test);
        if score.is_empty() || test.is_empty() {
            continue;
        }
        xs.push(mean(&score.iter().map(|(_, e)| *e).collect::<Vec<_>>()));
        ys.push(mean(&test.iter().map(|(_, e)| *e).collect::<Vec<_>>()));
    }
    spearman(&xs, &ys).ok()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArchSummary {
    pub arch_id: String,
    pub runs: usize,
    pub baseline: f64,
    pub es: f64,
    pub rss: f64,
    pub es_rss: f64,
}

/// Mean test errors without selection and with ES, RSS, and ES+RSS
/// selection on the synthetic split.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EsRssSummary {
    pub baseline: f64,
    pub es: f64,
    pub rss: f64,
    pub es_rss: f64,
    pub archs: usize,
    pub runs: usize,
    pub per_arch: Vec<ArchSummary>,
}

pub fn es_rss_summary(traces: &EvalTraceSet) -> Result<EsRssSummary> {
    let mut baseline_all = Vec::new();
    let mut es_all = Vec::new();
    let mut per_arch = Vec::new();
    for arch in traces.archs() {
        let mut runs = Vec::new();
        for run in traces.runs(arch, TrainedOn::Full, Split::Synthetic) {
            let Some(test) = traces.curve(arch, TrainedOn::Full, run, Split::Test) else {
                continue;
            };
            let synth = traces
                .curve(arch, TrainedOn::Full, run, Split::Synthetic)
                .expect("listed run");
            runs.push((run, synth, test));
        }
        if runs.is_empty() {
            continue;
        }
        let mut baseline = Vec::with_capacity(runs.len());
        let mut es = Vec::with_capacity(runs.len());
        let mut rss_pick: Option<(f64, f64)> = None;
        let mut es_rss_pick: Option<(f64, f64)> = None;
        for &(run, synth, test) in &runs {
            let (best_epoch, best_synth) = argmin(synth).expect("curves are non-empty");
            let es_test = *test.get(best_epoch).ok_or_else(|| {
                Error::NotFound(format!(
                    "no test error at epoch {best_epoch} for arch {arch}, run {run}"
                ))
            })?;
            baseline.push(last(test));
            es.push(es_test);
            if rss_pick.is_none_or(|(s, _)| last(synth) < s) {
                rss_pick = Some((last(synth), last(test)));
            }
            if es_rss_pick.is_none_or(|(s, _)| best_synth < s) {
                es_rss_pick = Some((best_synth, es_test));
            }
        }
        per_arch.push(ArchSummary {
            arch_id: arch.to_owned(),
            runs: runs.len(),
            baseline: mean(&baseline),
            es: mean(&es),
            rss: rss_pick.expect("non-empty").1,
            es_rss: es_rss_pick.expect("non-empty").1,
        });
        baseline_all.extend(baseline);
        es_all.extend(es);
    }
    if per_arch.is_empty() {
        return Err(Error::NotFound(
            "no fully-trained runs with both synthetic and test errors".into(),
        ));
    }
    let rss: Vec<f64> = per_arch.iter().map(|a| a.rss).collect();
    let es_rss: Vec<f64> = per_arch.iter().map(|a| a.es_rss).collect();
    Ok(EsRssSummary {
        baseline: mean(&baseline_all),
        es: mean(&es_all),
        rss: mean(&rss),
        es_rss: mean(&es_rss),
        archs: per_arch.len(),
        runs: baseline_all.len(),
        per_arch,
    })
}

/// Paired errors of two splits, one pair per model instance (or per
/// architecture when `per_arch`), for rank correlation and scatter plots.
pub fn paired_errors(
    traces: &EvalTraceSet,
    split_a: Split,
    split_b: Split,
    at: At,
    per_arch: bool,
) -> Result<Vec<(f64, f64)>> {
    let mut pairs = Vec::new();
    if per_arch {
        let pick = |c: &[f64]| match at {
            At::LastEpoch => last(c),
            At::BestEpoch => argmin(c).expect("curves are non-empty").1,
        };
        for arch in traces.archs() {
            let collect = |split: Split| -> Vec<f64> {
                [TrainedOn::Full, TrainedOn::Subset]
                    .into_iter()
                    .flat_map(|t| {
                        traces
                            .runs(arch, t, split)
                            .into_iter()
                            .map(move |r| (t, r))
                    })
                    .map(|(t, r)| pick(traces.curve(arch, t, r, split).expect("listed run")))
                    .collect()
            };
            let (a, b) = (collect(split_a), collect(split_b));
            if !a.is_empty() && !b.is_empty() {
                pairs.push((mean(&a), mean(&b)));
            }
        }
    } else {
        for (key, a) in traces.curves() {
            if key.split != split_a {
                continue;
            }
            let Some(b) = traces.curve(&key.arch_id, key.trained_on, key.run_id, split_b) else {
                continue;
            };
            let epoch = match at {
                At::LastEpoch => a.len() - 1,
                At::BestEpoch => argmin(a).expect("curves are non-empty").0,
            };
            let Some(&eb) = b.get(epoch) else {
                return Err(Error::NotFound(format!(
                    "no {split_b} error at epoch {epoch} for arch {}, run {}",
                    key.arch_id, key.run_id
                )));
            };
            pairs.push((a[epoch], eb));
        }
    }
    if pairs.is_empty() {
        return Err(Error::NotFound(format!(
            "no model reports both {split_a} and {split_b} errors"
        )));
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(arch: &str, run: u64, epoch: u64, split: Split, trained_on: TrainedOn, err: f64) -> EvalRecord {
        EvalRecord {
            arch_id: arch.into(),
            run_id: run,
            epoch,
            split,
            trained_on,
            error: err,
        }
    }

    fn curve(arch: &str, run: u64, split: Split, errs: &[f64]) -> Vec<EvalRecord> {
        curve_on(arch, run, split, TrainedOn::Full, errs)
    }

    fn curve_on(arch: &str, run: u64, split: Split, t: TrainedOn, errs: &[f64]) -> Vec<EvalRecord> {
        errs.iter()
            .enumerate()
            .map(|(e, &v)| rec(arch, run, e as u64, split, t, v))
            .collect()
    }

    fn set(parts: Vec<Vec<EvalRecord>>) -> EvalTraceSet {
        EvalTraceSet::new(parts.concat(), BTreeMap::new()).unwrap()
    }

    #[test]
    fn es_examples() {
        let dec: Vec<f64> = (0..10).map(|e| 0.5 - 0.01 * e as f64).collect();
        let t = set(vec![curve("a", 0, Split::Synthetic, &dec)]);
        assert_eq!(select_es(&t, "a", TrainedOn::Full, 0, Split::Synthetic).unwrap().epoch, 9);

        let t = set(vec![
            curve("a", 0, Split::Synthetic, &[0.5, 0.2, 0.3]),
            curve("a", 0, Split::Test, &[0.4, 0.25, 0.1]),
        ]);
        let o = select_es(&t, "a", TrainedOn::Full, 0, Split::Synthetic).unwrap();
        assert_eq!(o.epoch, 1);
        assert_eq!(o.report_errors[&Split::Test], 0.25);

        let t = set(vec![curve("a", 0, Split::Synthetic, &[0.3, 0.2, 0.2])]);
        assert_eq!(select_es(&t, "a", TrainedOn::Full, 0, Split::Synthetic).unwrap().epoch, 1);
    }

    #[test]
    fn es_missing_is_not_found() {
        let t = set(vec![curve("a", 0, Split::Test, &[0.3])]);
        assert!(matches!(
            select_es(&t, "a", TrainedOn::Full, 0, Split::Synthetic),
            Err(Error::NotFound(_))
        ));
        assert!(matches!(
            select_es(&t, "b", TrainedOn::Full, 0, Split::Test),
            Err(Error::NotFound(_))
        ));
    }

    #[test]
    fn rss_examples() {
        let t = set(vec![curve("a", 3, Split::Synthetic, &[0.3, 0.2])]);
        let o = select_rss(&t, "a", TrainedOn::Full, Split::Synthetic, At::LastEpoch).unwrap();
        assert_eq!((o.run_id, o.epoch), (3, 1));

        let t = set(vec![
            curve("a", 0, Split::Synthetic, &[0.2, 0.10]),
            curve("a", 1, Split::Synthetic, &[0.05, 0.08]),
            curve("a", 2, Split::Synthetic, &[0.3, 0.12]),
        ]);
        let o = select_rss(&t, "a", TrainedOn::Full, Split::Synthetic, At::LastEpoch).unwrap();
        assert_eq!((o.run_id, o.epoch), (1, 1));
        let o = select_rss(&t, "a", TrainedOn::Full, Split::Synthetic, At::BestEpoch).unwrap();
        assert_eq!((o.run_id, o.epoch), (1, 0));
    }

    #[test]
    fn rss_ties_prefer_smaller_run() {
        let t = set(vec![
            curve("a", 0, Split::Synthetic, &[0.1, 0.2]),
            curve("a", 1, Split::Synthetic, &[0.1, 0.2]),
        ]);
        let o = select_rss(&t, "a", TrainedOn::Full, Split::Synthetic, At::LastEpoch).unwrap();
        assert_eq!(o.run_id, 0);
    }

    #[test]
    fn hps_synthetic_dominance_and_degenerate_pool() {
        let t = set(vec![
            curve("a", 0, Split::Synthetic, &[0.3, 0.2, 0.25]),
            curve("a", 0, Split::Test, &[0.3, 0.2, 0.25]),
        ]);
        let es = select_es(&t, "a", TrainedOn::Full, 0, Split::Synthetic).unwrap();
        assert_eq!(select_hps_synthetic(&t).unwrap(), es);

        let t = set(vec![
            curve("A", 0, Split::Synthetic, &[0.1, 0.05]),
            curve("A", 1, Split::Synthetic, &[0.12, 0.06]),
            curve("B", 0, Split::Synthetic, &[0.2, 0.15]),
            curve("B", 1, Split::Synthetic, &[0.3, 0.16]),
        ]);
        assert_eq!(select_hps_synthetic(&t).unwrap().arch_id, "A");
    }

    #[test]
    fn hps_synthetic_ignores_subset_runs() {
        let t = set(vec![
            curve("a", 0, Split::Synthetic, &[0.3]),
            curve_on("b", 0, Split::Synthetic, TrainedOn::Subset, &[0.1]),
        ]);
        assert_eq!(select_hps_synthetic(&t).unwrap().arch_id, "a");
        let t = set(vec![curve("a", 0, Split::Test, &[0.3])]);
        assert!(matches!(select_hps_synthetic(&t), Err(Error::NotFound(_))));
    }

    #[test]
    fn standard_picks_validation_winner() {
        // Arch a0 wins on validation, a1 wins on full-data test.
        let t = set(vec![
            curve_on("a0", 0, Split::Val, TrainedOn::Subset, &[0.3, 0.20]),
            curve_on("a1", 0, Split::Val, TrainedOn::Subset, &[0.3, 0.25]),
            curve("a0", 0, Split::Test, &[0.3, 0.18]),
            curve("a0", 1, Split::Test, &[0.3, 0.16]),
            curve("a1", 0, Split::Test, &[0.3, 0.10]),
        ]);
        let o = select_hps_standard(&t, StandardScoring::Mean).unwrap();
        assert_eq!(o.arch_id, "a0");
        assert!((o.val_mean - 0.20).abs() < 1e-15);
        assert!((o.expected_error - 0.17).abs() < 1e-15);
        let r = select_hps_standard(&t, StandardScoring::RandomRun { seed: 5 }).unwrap();
        assert!(r.expected_error == 0.18 || r.expected_error == 0.16);
    }

    #[test]
    fn standard_single_arch_and_missing_data() {
        let t = set(vec![
            curve_on("z", 0, Split::Val, TrainedOn::Subset, &[0.4]),
            curve("z", 0, Split::Test, &[0.3]),
        ]);
        assert_eq!(select_hps_standard(&t, StandardScoring::Mean).unwrap().arch_id, "z");
        let t = set(vec![curve_on("z", 0, Split::Val, TrainedOn::Subset, &[0.4])]);
        assert!(matches!(
            select_hps_standard(&t, StandardScoring::Mean),
            Err(Error::NotFound(_))
        ));
        let t = set(vec![curve("z", 0, Split::Test, &[0.3])]);
        assert!(matches!(
            select_hps_standard(&t, StandardScoring::Mean),
            Err(Error::NotFound(_))
        ));
    }

    #[test]
    fn identical_models_give_equal_columns() {
        let mut parts = Vec::new();
        for arch in ["a", "b"] {
            for run in 0..3 {
                parts.push(curve(arch, run, Split::Synthetic, &[0.2, 0.2]));
                parts.push(curve(arch, run, Split::Test, &[0.2, 0.2]));
                parts.push(curve_on(arch, run, Split::Val, TrainedOn::Subset, &[0.2, 0.2]));
            }
        }
        let c = compare_protocols(&set(parts), StandardScoring::Mean).unwrap();
        assert_eq!(c.synthetic_test_error, 0.2);
        assert!((c.standard_test_error - 0.2).abs() < 1e-15);
        assert!((c.random_mean - 0.2).abs() < 1e-15);
        assert!(c.random_std < 1e-15);
        assert_eq!(c.models, 6);
    }

    #[test]
    fn summary_degenerate_cases() {
        // One run per arch: RSS equals the baseline.
        let t = set(vec![
            curve("a", 0, Split::Synthetic, &[0.3, 0.2]),
            curve("a", 0, Split::Test, &[0.31, 0.21]),
            curve("b", 0, Split::Synthetic, &[0.4, 0.1]),
            curve("b", 0, Split::Test, &[0.41, 0.11]),
        ]);
        let s = es_rss_summary(&t).unwrap();
        assert_eq!(s.rss, s.baseline);

        // Flat curves: ES equals the baseline.
        let t = set(vec![
            curve("a", 0, Split::Synthetic, &[0.3, 0.3, 0.3]),
            curve("a", 0, Split::Test, &[0.2, 0.2, 0.2]),
            curve("a", 1, Split::Synthetic, &[0.1, 0.1, 0.1]),
            curve("a", 1, Split::Test, &[0.25, 0.25, 0.25]),
        ]);
        let s = es_rss_summary(&t).unwrap();
        assert_eq!(s.es, s.baseline);
        assert_eq!(s.rss, 0.25);
    }

    #[test]
    fn summary_oracle_rss_not_worse_than_baseline() {
        let mut parts = Vec::new();
        for (run, v) in [0.3, 0.2, 0.25].into_iter().enumerate() {
            parts.push(curve("a", run as u64, Split::Synthetic, &[0.5, v]));
            parts.push(curve("a", run as u64, Split::Test, &[0.5, v]));
        }
        let s = es_rss_summary(&set(parts)).unwrap();
        assert!(s.rss <= s.baseline);
        assert_eq!(s.rss, 0.2);
        assert_eq!(s.per_arch[0].es_rss, 0.2);
    }

    #[test]
    fn paired_errors_by_instance_and_arch() {
        let t = set(vec![
            curve("a", 0, Split::Synthetic, &[0.5, 0.3, 0.4]),
            curve("a", 0, Split::Test, &[0.45, 0.35, 0.3]),
            curve("a", 1, Split::Synthetic, &[0.5, 0.2]),
            curve("a", 1, Split::Test, &[0.5, 0.1]),
        ]);
        let p = paired_errors(&t, Split::Synthetic, Split::Test, At::LastEpoch, false).unwrap();
        assert_eq!(p, vec![(0.4, 0.3), (0.2, 0.1)]);
        let p = paired_errors(&t, Split::Synthetic, Split::Test, At::BestEpoch, false).unwrap();
        assert_eq!(p, vec![(0.3, 0.35), (0.2, 0.1)]);
        let p = paired_errors(&t, Split::Synthetic, Split::Test, At::LastEpoch, true).unwrap();
        assert_eq!(p.len(), 1);
        assert!((p[0].0 - 0.3).abs() < 1e-15 && (p[0].1 - 0.2).abs() < 1e-15);
        assert!(paired_errors(&t, Split::Val, Split::Test, At::LastEpoch, false).is_err());
    }
}
