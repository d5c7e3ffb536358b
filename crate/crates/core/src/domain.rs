//! Finite sample domains, probability mass functions, labelings, and the
//! exact and empirical risks computed over them.
//!
//! Every integral over the sample domain becomes an exact finite sum here,
//! which is what lets the rank-preservation statements be checked
//! mechanically rather than estimated.

use std::collections::BTreeSet;

use crate::error::{Error, Result, SchemaError};

/// Absolute tolerance on `Σ masses − 1` accepted by [`Pmf::new`].
pub const PMF_SUM_TOLERANCE: f64 = 1e-9;

/// A set of sample-point indices.
pub type PointSet = BTreeSet<usize>;

/// Sample domain `{0, …, size − 1}` with `num_classes` labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FiniteDomain {
    size: usize,
    num_classes: u32,
}

impl FiniteDomain {
    pub fn new(size: usize, num_classes: u32) -> std::result::Result<Self, SchemaError> {
        if size == 0 {
            return Err(SchemaError::new("domain", "n", "expected n >= 1, found 0"));
        }
        if num_classes < 2 {
            return Err(SchemaError::new(
                "domain",
                "c",
                format!("expected c >= 2, found {num_classes}"),
            ));
        }
        Ok(FiniteDomain { size, num_classes })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn num_classes(&self) -> u32 {
        self.num_classes
    }
}

/// Probability mass function over a finite domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    masses: Vec<f64>,
}

impl Pmf {
    /// Validates and normalizes `masses`.
    ///
    /// Masses must be finite and non-negative, and their sum must be within
    /// [`PMF_SUM_TOLERANCE`] of one. Accepted inputs are divided by their sum
    /// unless it already equals one up to summation rounding.
    pub fn new(masses: Vec<f64>) -> std::result::Result<Self, SchemaError> {
        if masses.is_empty() {
            return Err(SchemaError::new("pmf", "masses", "expected at least one mass, found none"));
        }
        for (i, &m) in masses.iter().enumerate() {
            if !m.is_finite() || m < 0.0 {
                return Err(SchemaError::new(
                    format!("[{i}]"),
                    "masses",
                    format!("expected a finite non-negative mass, found {m}"),
                ));
            }
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > PMF_SUM_TOLERANCE {
            return Err(SchemaError::new(
                "pmf",
                "masses",
                format!("expected masses summing to 1 (tolerance {PMF_SUM_TOLERANCE:e}), found sum {total}"),
            ));
        }
        // A sum within rounding noise of one is left alone, so constructing
        // from an already normalized pmf reproduces it bit for bit.
        let noise = 4.0 * masses.len() as f64 * f64::EPSILON;
        let masses = if (total - 1.0).abs() <= noise {
            masses
        } else {
            masses.into_iter().map(|m| m / total).collect()
        };
        Ok(Pmf { masses })
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform pmf over an empty domain");
        Pmf {
            masses: vec![1.0 / n as f64; n],
        }
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    /// Total mass of a point set. Indices must be in range.
    pub fn mass_of(&self, points: &PointSet) -> f64 {
        points.iter().fold(0.0, |acc, &x| acc + self.masses[x])
    }
}

/// A labeling function or hypothesis `Ω → {0, …, c − 1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabelMap {
    labels: Vec<u32>,
}

impl LabelMap {
    pub fn new(labels: Vec<u32>, num_classes: u32) -> std::result::Result<Self, SchemaError> {
        if let Some((i, &l)) = labels.iter().enumerate().find(|(_, &l)| l >= num_classes) {
            return Err(SchemaError::new(
                format!("[{i}]"),
                "labels",
                format!("expected a class index < {num_classes}, found {l}"),
            ));
        }
        Ok(LabelMap { labels })
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn max_label(&self) -> Option<u32> {
        self.labels.iter().copied().max()
    }
}

impl From<Vec<u32>> for LabelMap {
    /// Unchecked construction; the class bound is enforced where the map is
    /// attached to a domain.
    fn from(labels: Vec<u32>) -> Self {
        LabelMap { labels }
    }
}

/// Real and synthetic distributions over one domain, a shared labeling
/// function, and the hypotheses to rank.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteInstance {
    domain: FiniteDomain,
    mu_r: Pmf,
    mu_s: Pmf,
    f: LabelMap,
    hypotheses: Vec<LabelMap>,
}

impl FiniteInstance {
    pub fn new(
        domain: FiniteDomain,
        mu_r: Pmf,
        mu_s: Pmf,
        f: LabelMap,
        hypotheses: Vec<LabelMap>,
    ) -> std::result::Result<Self, SchemaError> {
        let n = domain.size();
        let c = domain.num_classes();
        for (name, len) in [("mu_r", mu_r.len()), ("mu_s", mu_s.len()), ("f", f.len())] {
            if len != n {
                return Err(SchemaError::new(
                    name,
                    name,
                    format!("expected {n} entries, found {len}"),
                ));
            }
        }
        check_labels("f", &f, c)?;
        if hypotheses.is_empty() {
            return Err(SchemaError::new(
                "hypotheses",
                "hypotheses",
                "expected at least one hypothesis, found none",
            ));
        }
        for (k, h) in hypotheses.iter().enumerate() {
            let path = format!("hypotheses[{k}]");
            if h.len() != n {
                return Err(SchemaError::new(
                    path,
                    "hypotheses",
                    format!("expected {n} entries, found {}", h.len()),
                ));
            }
            check_labels(&path, h, c)?;
        }
        Ok(FiniteInstance {
            domain,
            mu_r,
            mu_s,
            f,
            hypotheses,
        })
    }

    pub fn domain(&self) -> FiniteDomain {
        self.domain
    }

    pub fn mu_r(&self) -> &Pmf {
        &self.mu_r
    }

    pub fn mu_s(&self) -> &Pmf {
        &self.mu_s
    }

    pub fn f(&self) -> &LabelMap {
        &self.f
    }

    pub fn hypotheses(&self) -> &[LabelMap] {
        &self.hypotheses
    }

    pub fn hypothesis(&self, i: usize) -> Result<&LabelMap> {
        self.hypotheses.get(i).ok_or_else(|| {
            Error::schema(
                format!("hypotheses[{i}]"),
                "hypotheses",
                format!("index {i} out of range for {} hypotheses", self.hypotheses.len()),
            )
        })
    }
}

fn check_labels(path: &str, map: &LabelMap, c: u32) -> std::result::Result<(), SchemaError> {
    match map.labels().iter().position(|&l| l >= c) {
        Some(i) => Err(SchemaError::new(
            format!("{path}[{i}]"),
            path.split('[').next().unwrap_or(path),
            format!("expected a class index < {c}, found {}", map.labels()[i]),
        )),
        None => Ok(()),
    }
}

/// Predictions of one hypothesis on a finite labeled sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplePredictions {
    predicted: Vec<u32>,
    actual: Vec<u32>,
}

impl SamplePredictions {
    pub fn new(predicted: Vec<u32>, actual: Vec<u32>) -> Result<Self> {
        if predicted.is_empty() && actual.is_empty() {
            return Err(Error::EmptyInput("no predictions".into()));
        }
        if predicted.len() != actual.len() {
            return Err(Error::schema(
                "predictions",
                "actual",
                format!(
                    "expected {} labels to match predictions, found {}",
                    predicted.len(),
                    actual.len()
                ),
            ));
        }
        Ok(SamplePredictions { predicted, actual })
    }

    pub fn len(&self) -> usize {
        self.predicted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predicted.is_empty()
    }
}

fn check_len(field: &str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::schema(
            field,
            field,
            format!("expected length {expected}, found {found}"),
        ));
    }
    Ok(())
}

/// Mass of the points where `h` disagrees with `f`.
pub fn exact_risk(pmf: &Pmf, h: &LabelMap, f: &LabelMap) -> Result<f64> {
    check_len("h", pmf.len(), h.len())?;
    check_len("f", pmf.len(), f.len())?;
    Ok(pmf
        .masses()
        .iter()
        .zip(h.labels().iter().zip(f.labels()))
        .filter(|(_, (a, b))| a != b)
        .fold(0.0, |acc, (m, _)| acc + m))
}

/// Fraction of misclassified samples.
pub fn empirical_risk(preds: &SamplePredictions) -> Result<f64> {
    if preds.is_empty() {
        return Err(Error::EmptyInput("no predictions".into()));
    }
    let wrong = preds
        .predicted
        .iter()
        .zip(&preds.actual)
        .filter(|(p, a)| p != a)
        .count();
    Ok(wrong as f64 / preds.len() as f64)
}

/// `ε(h2) − ε(h1)`: positive when `h1` is the better hypothesis.
pub fn risk_difference(pmf: &Pmf, h1: &LabelMap, h2: &LabelMap, f: &LabelMap) -> Result<f64> {
    Ok(exact_risk(pmf, h2, f)? - exact_risk(pmf, h1, f)?)
}

/// Points where the hypotheses disagree with each other, split by which one
/// is wrong: `omega1` where `h1` is wrong, `omega2` where `h2` is wrong.
///
/// The two sets overlap exactly where both are wrong with different labels.
pub fn disagreement_regions(
    h1: &LabelMap,
    h2: &LabelMap,
    f: &LabelMap,
) -> Result<(PointSet, PointSet)> {
    check_len("h2", h1.len(), h2.len())?;
    check_len("f", h1.len(), f.len())?;
    let mut omega1 = PointSet::new();
    let mut omega2 = PointSet::new();
    for (x, ((&a, &b), &y)) in h1.labels().iter().zip(h2.labels()).zip(f.labels()).enumerate() {
        if a == b {
            continue;
        }
        if a != y {
            omega1.insert(x);
        }
        if b != y {
            omega2.insert(x);
        }
    }
    Ok((omega1, omega2))
}

/// The region decomposition of a risk difference, with its reconstruction
/// residual against the direct computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaCheck {
    pub mass_omega2: f64,
    pub mass_omega1: f64,
    pub delta: f64,
    pub residual: f64,
}

pub fn lemma1_check(pmf: &Pmf, h1: &LabelMap, h2: &LabelMap, f: &LabelMap) -> Result<LemmaCheck> {
    check_len("h1", pmf.len(), h1.len())?;
    let (omega1, omega2) = disagreement_regions(h1, h2, f)?;
    let mass_omega1 = pmf.mass_of(&omega1);
    let mass_omega2 = pmf.mass_of(&omega2);
    let delta = risk_difference(pmf, h1, h2, f)?;
    Ok(LemmaCheck {
        mass_omega2,
        mass_omega1,
        delta,
        residual: ((mass_omega2 - mass_omega1) - delta).abs(),
    })
}
