//! Report rendering: JSON for machines, aligned text tables for people, and
//! CSV for plotting.

use std::io::Write;

use serde::Serialize;

use crate::divergence::DivergenceReport;
use crate::error::{Error, Result};
use crate::rank_analysis::{FalsifyReport, PreservationStats, RankReport, TheoremVerdict, VerificationReport};
use crate::selection::{EsRssSummary, ProtocolComparison, SelectionOutcome, StandardOutcome};

pub const DIGITS_ENV: &str = "RANKGUARD_REPORT_DIGITS";
pub const DEFAULT_TABLE_DIGITS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Table,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "table" => Ok(ReportFormat::Table),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(format!("expected json|table|csv, found `{other}`")),
        }
    }
}

/// Significant digits for table output, from `RANKGUARD_REPORT_DIGITS`.
pub fn report_digits() -> Result<usize> {
    match std::env::var(DIGITS_ENV) {
        Err(_) => Ok(DEFAULT_TABLE_DIGITS),
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|d| (1..=17).contains(d))
            .ok_or_else(|| Error::InvalidConfig(format!("{DIGITS_ENV} must be an integer in 1..=17, got `{v}`"))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Int(u64),
    Num(f64),
    /// Mean and standard deviation.
    PlusMinus(f64, f64),
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as u64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Text("n/a".into()), Cell::Num)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub title: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(title: &str, headers: &[&str]) -> Self {
        Table {
            title: title.to_owned(),
            headers: headers.iter().map(|h| (*h).to_owned()).collect(),
            rows: Vec::new(),
        }
    }

    fn key_values(title: &str) -> Self {
        Table::new(title, &["metric", "value"])
    }

    pub fn row(mut self, cells: Vec<Cell>) -> Self {
        self.rows.push(cells);
        self
    }

    fn kv(self, key: &str, value: impl Into<Cell>) -> Self {
        self.row(vec![key.into(), value.into()])
    }
}

/// Formats `x` with `digits` significant digits.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".to_owned();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..=15).contains(&exp) {
        return format!("{:.*e}", digits.saturating_sub(1), x);
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

fn render_cell(c: &Cell, digits: usize) -> String {
    match c {
        Cell::Text(s) => s.clone(),
        Cell::Int(i) => i.to_string(),
        Cell::Num(x) => fmt_sig(*x, digits),
        Cell::PlusMinus(m, s) => format!("{} ± {}", fmt_sig(*m, digits), fmt_sig(*s, digits)),
    }
}

pub fn render_table(t: &Table, digits: usize) -> String {
    let cells: Vec<Vec<String>> = t
        .rows
        .iter()
        .map(|r| r.iter().map(|c| render_cell(c, digits)).collect())
        .collect();
    let mut widths: Vec<usize> = t.headers.iter().map(|h| h.chars().count()).collect();
    for r in &cells {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |items: &[String]| -> String {
        items
            .iter()
            .zip(&widths)
            .map(|(s, &w)| format!("{s:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_owned()
    };
    let mut out = String::new();
    if !t.title.is_empty() {
        out.push_str(&t.title);
        out.push('\n');
    }
    out.push_str(&line(&t.headers));
    out.push('\n');
    let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
    out.push_str(&line(&rule));
    out.push('\n');
    for r in &cells {
        out.push_str(&line(r));
        out.push('\n');
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

/// CSV rendering at full precision; a mean ± std cell becomes two columns.
pub fn render_csv(t: &Table) -> String {
    let mut headers = Vec::new();
    for (i, h) in t.headers.iter().enumerate() {
        let key = h.to_lowercase().replace([' ', '+'], "_");
        headers.push(key.clone());
        if t.rows.iter().any(|r| matches!(r.get(i), Some(Cell::PlusMinus(..)))) {
            headers.push(format!("{key}_std"));
        }
    }
    let mut out = headers.join(",");
    out.push('\n');
    for r in &t.rows {
        let fields: Vec<String> = r
            .iter()
            .flat_map(|c| match c {
                Cell::Text(s) => vec![csv_field(s)],
                Cell::Int(i) => vec![i.to_string()],
                Cell::Num(x) => vec![x.to_string()],
                Cell::PlusMinus(m, s) => vec![m.to_string(), s.to_string()],
            })
            .collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub trait Report: Serialize {
    fn table(&self) -> Table;
}

pub fn write_report<R: Report + ?Sized>(report: &R, format: ReportFormat, digits: usize) -> Vec<u8> {
    match format {
        ReportFormat::Json => {
            let mut v = serde_json::to_vec_pretty(report).expect("reports serialize");
            v.push(b'\n');
            v
        }
        ReportFormat::Table => render_table(&report.table(), digits).into_bytes(),
        ReportFormat::Csv => render_csv(&report.table()).into_bytes(),
    }
}

/// Plot-ready scatter of synthetic-split error against real-split error.
pub fn write_scatter_csv(pairs: &[(f64, f64)], mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "err_synthetic,err_real")?;
    for (a, b) in pairs {
        writeln!(out, "{a},{b}")?;
    }
    Ok(())
}

impl Report for EsRssSummary {
    fn table(&self) -> Table {
        Table::new(
            &format!("Average test error ({} archs, {} runs)", self.archs, self.runs),
            &["Baseline", "ES", "RSS", "ES+RSS"],
        )
        .row(vec![self.baseline.into(), self.es.into(), self.rss.into(), self.es_rss.into()])
    }
}

impl Report for ProtocolComparison {
    fn table(&self) -> Table {
        Table::new(
            &format!("Average error on held out test set ({} models)", self.models),
            &["Synthetic", "Standard", "Average of all"],
        )
        .row(vec![
            self.synthetic_test_error.into(),
            self.standard_test_error.into(),
            Cell::PlusMinus(self.random_mean, self.random_std),
        ])
    }
}

impl Report for VerificationReport {
    fn table(&self) -> Table {
        Table::key_values(if self.passed() { "Verification: PASS" } else { "Verification: FAIL" })
            .kv("instances", self.instances)
            .kv("pairs_checked", self.pairs_checked)
            .kv("condition_triggered", self.condition_triggered)
            .kv("trigger_fraction", self.trigger_fraction)
            .kv("inconclusive", self.inconclusive)
            .kv("violations", self.violations)
            .kv("proof_chain_violations", self.proof_chain_violations)
            .kv("corollary1_triggered", self.corollary1_triggered)
            .kv("corollary2_violations", self.corollary2_violations)
            .kv("lemma_residual_violations", self.lemma_residual_violations)
            .kv("lemma_max_residual", self.lemma_max_residual)
            .kv("slack_min", self.slack_min)
            .kv("slack_median", self.slack_median)
            .kv("corollary2_slack_min", self.corollary2_slack_min)
            .kv("counterexamples", self.counterexamples.len())
    }
}

impl Report for FalsifyReport {
    fn table(&self) -> Table {
        let mut t = Table::key_values("Rank flips without the preservation condition")
            .kv("instances", self.instances)
            .kv("pairs_checked", self.pairs_checked)
            .kv("flip_pairs", self.flip_pairs)
            .kv("instances_with_flip", self.count);
        if let Some(w) = &self.first_flip {
            t = t
                .kv("first_flip_instance", w.instance_index)
                .kv("first_flip_pair", format!("({}, {})", w.pair.0, w.pair.1))
                .kv("first_flip_delta_synthetic", w.verdict.delta_synthetic)
                .kv("first_flip_delta_real", w.verdict.delta_real)
                .kv("first_flip_restricted_l1", w.verdict.restricted_l1);
        }
        t
    }
}

impl Report for DivergenceReport {
    fn table(&self) -> Table {
        Table::key_values("L1 divergence (un-halved)")
            .kv("full_l1", self.full_l1)
            .kv("restricted_l1", self.restricted_l1)
            .kv("halved_tv", self.halved_tv())
    }
}

impl Report for TheoremVerdict {
    fn table(&self) -> Table {
        Table::key_values("Pair verdict")
            .kv("delta_synthetic", self.delta_synthetic)
            .kv("delta_real", self.delta_real)
            .kv("restricted_l1", self.restricted_l1)
            .kv("full_l1", self.full_l1)
            .kv("condition_held", self.condition_held)
            .kv("conclusion_held", self.conclusion_held)
            .kv("slack", self.slack)
            .kv("corollary1_condition", self.corollary1_condition)
            .kv("corollary2_slack", self.corollary2_slack)
    }
}

impl Report for SelectionOutcome {
    fn table(&self) -> Table {
        let mut t = Table::key_values("Selected model")
            .kv("arch_id", self.arch_id.clone())
            .kv("run_id", self.run_id)
            .kv("epoch", self.epoch)
            .kv("trained_on", self.trained_on.as_str())
            .kv(&format!("selected_error ({})", self.selected_split), self.selected_error);
        for (split, err) in &self.report_errors {
            t = t.kv(&format!("error_{split}"), *err);
        }
        t
    }
}

impl Report for StandardOutcome {
    fn table(&self) -> Table {
        Table::key_values("Standard protocol")
            .kv("arch_id", self.arch_id.clone())
            .kv("val_mean", self.val_mean)
            .kv("expected_test_error", self.expected_error)
    }
}

impl Report for RankReport {
    fn table(&self) -> Table {
        Table::key_values("Rank correlation")
            .kv("spearman", self.spearman)
            .kv("n", self.n)
    }
}

impl Report for PreservationStats {
    fn table(&self) -> Table {
        Table::key_values("Pairwise rank preservation")
            .kv("pairs", self.pairs)
            .kv("triggered", self.triggered)
            .kv("triggered_fraction", self.triggered_fraction)
            .kv("vacuous", self.vacuous)
            .kv("untriggered", self.untriggered)
            .kv("untriggered_fraction", self.untriggered_fraction)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::selection::ArchSummary;

    fn summary() -> EsRssSummary {
        EsRssSummary {
            baseline: 0.123456789,
            es: 0.12,
            rss: 0.11,
            es_rss: 0.105,
            archs: 1,
            runs: 2,
            per_arch: vec![ArchSummary {
                arch_id: "a".into(),
                runs: 2,
                baseline: 0.123456789,
                es: 0.12,
                rss: 0.11,
                es_rss: 0.105,
            }],
        }
    }

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(0.123456789, 6), "0.123457");
        assert_eq!(fmt_sig(12.5, 3), "12.5");
        assert_eq!(fmt_sig(0.0, 6), "0");
        assert_eq!(fmt_sig(1e-9, 3), "1.00e-9");
    }

    #[test]
    fn table_one_layout() {
        let text = String::from_utf8(write_report(&summary(), ReportFormat::Table, 6)).unwrap();
        let header = text.lines().nth(1).unwrap();
        let cols: Vec<&str> = header.split_whitespace().collect();
        assert_eq!(cols, ["Baseline", "ES", "RSS", "ES+RSS"]);
        assert!(text.contains("0.123457"));
        let csv = String::from_utf8(write_report(&summary(), ReportFormat::Csv, 6)).unwrap();
        assert!(csv.starts_with("baseline,es,rss,es_rss\n0.123456789,"));
    }

    #[test]
    fn reports_are_deterministic() {
        for f in [ReportFormat::Json, ReportFormat::Table, ReportFormat::Csv] {
            assert_eq!(write_report(&summary(), f, 6), write_report(&summary(), f, 6));
        }
        let json = String::from_utf8(write_report(&summary(), ReportFormat::Json, 6)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["baseline"].as_f64(), Some(0.123456789));
    }

    #[test]
    fn scatter_header() {
        let mut out = Vec::new();
        write_scatter_csv(&[(0.1, 0.2)], &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "err_synthetic,err_real\n0.1,0.2\n");
    }
}
