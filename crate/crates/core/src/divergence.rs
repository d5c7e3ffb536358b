//! L1 divergence between the real and synthetic distributions: exact,
//! restricted to a region, and estimated from samples.
//!
//! All values use the un-halved convention `Σ |μ_r − μ_s|`, which ranges
//! over `[0, 2]`. The conventional total variation is half of that and is
//! only exposed through [`DivergenceReport::halved_tv`].

use rayon::prelude::*;
use serde::Serialize;

use crate::domain::{Pmf, PointSet};
use crate::error::{Error, Result};
use crate::kmeans::{self, kmeans};
use crate::seed::derive_seed;

pub const DEFAULT_CLUSTERS: usize = 20;
pub const DEFAULT_RESTARTS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    Unhalved,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceReport {
    pub full_l1: f64,
    pub restricted_l1: Option<f64>,
    pub convention: Convention,
}

impl DivergenceReport {
    pub fn new(full_l1: f64, restricted_l1: Option<f64>) -> Self {
        DivergenceReport {
            full_l1,
            restricted_l1,
            convention: Convention::Unhalved,
        }
    }

    /// Conventional total variation, `full_l1 / 2`. Reporting only.
    pub fn halved_tv(&self) -> f64 {
        self.full_l1 / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Real,
    Synthetic,
}

impl Source {
    pub fn as_str(&self) -> &'static str {
        match self {
            Source::Real => "real",
            Source::Synthetic => "synthetic",
        }
    }
}

impl std::str::FromStr for Source {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "real" => Ok(Source::Real),
            "synthetic" => Ok(Source::Synthetic),
            other => Err(format!("expected `real` or `synthetic`, found `{other}`")),
        }
    }
}

/// Feature vectors drawn from one source.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSampleSet {
    points: Vec<Vec<f64>>,
    source: Source,
}

impl FeatureSampleSet {
    pub fn new(points: Vec<Vec<f64>>, source: Source) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::EmptyInput(format!("no {} samples", source.as_str())));
        };
        let dim = first.len();
        if dim == 0 {
            return Err(Error::schema("sample 0", "dim0", "expected at least one coordinate"));
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::schema(
                    format!("sample {i}"),
                    "dim",
                    format!("expected {dim} coordinates, found {}", p.len()),
                ));
            }
            if let Some(d) = p.iter().position(|x| !x.is_finite()) {
                return Err(Error::schema(
                    format!("sample {i}"),
                    format!("dim{d}"),
                    format!("expected a finite coordinate, found {}", p[d]),
                ));
            }
        }
        Ok(FeatureSampleSet { points, source })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn source(&self) -> Source {
        self.source
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub fn exact_l1(mu_r: &Pmf, mu_s: &Pmf) -> Result<f64> {
    if mu_r.len() != mu_s.len() {
        return Err(Error::schema(
            "mu_s",
            "mu_s",
            format!("expected {} masses, found {}", mu_r.len(), mu_s.len()),
        ));
    }
    Ok(mu_r
        .masses()
        .iter()
        .zip(mu_s.masses())
        .fold(0.0, |acc, (a, b)| acc + (a - b).abs()))
}

pub fn restricted_l1(mu_r: &Pmf, mu_s: &Pmf, region: &PointSet) -> Result<f64> {
    if mu_r.len() != mu_s.len() {
        return Err(Error::schema(
            "mu_s",
            "mu_s",
            format!("expected {} masses, found {}", mu_r.len(), mu_s.len()),
        ));
    }
    if let Some(&x) = region.iter().next_back().filter(|&&x| x >= mu_r.len()) {
        return Err(Error::schema(
            "region",
            "region",
            format!("point {x} out of range for a domain of {} points", mu_r.len()),
        ));
    }
    let (r, s) = (mu_r.masses(), mu_s.masses());
    Ok(region.iter().fold(0.0, |acc, &x| acc + (r[x] - s[x]).abs()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConfig {
    pub clusters: usize,
    pub restarts: usize,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            clusters: DEFAULT_CLUSTERS,
            restarts: DEFAULT_RESTARTS,
            max_iter: kmeans::DEFAULT_MAX_ITER,
            tol: kmeans::DEFAULT_TOL,
        }
    }
}

/// Cluster-histogram estimate of the un-halved L1 divergence between the
/// distributions that produced two sample sets.
///
/// Both sets are pooled and clustered; each source then gets a normalized
/// histogram over the clusters and the estimate is `Σ |P_i − Q_i|`. The
/// result is averaged over `restarts` clusterings whose seeds are derived
/// from `seed` and the restart index.
pub fn estimate_l1(
    real: &FeatureSampleSet,
    synthetic: &FeatureSampleSet,
    config: &EstimatorConfig,
    seed: u64,
) -> Result<f64> {
    if real.dim() != synthetic.dim() {
        return Err(Error::schema(
            "synthetic samples",
            "dim",
            format!(
                "expected dimension {} to match the real samples, found {}",
                real.dim(),
                synthetic.dim()
            ),
        ));
    }
    if config.restarts == 0 {
        return Err(Error::InvalidConfig("restarts must be at least 1".into()));
    }
    let pooled: Vec<Vec<f64>> = real
        .points()
        .iter()
        .chain(synthetic.points())
        .cloned()
        .collect();
    let n_real = real.len();
    let k = config.clusters;

    let per_restart: Vec<f64> = (0..config.restarts)
        .into_par_iter()
        .map(|r| {
            let clustering = kmeans(
                &pooled,
                k,
                derive_seed(seed, &[r as u64]),
                config.max_iter,
                config.tol,
            )?;
            let mut hist_r = vec![0usize; k];
            let mut hist_s = vec![0usize; k];
            for (i, &a) in clustering.assignments.iter().enumerate() {
                if i < n_real {
                    hist_r[a] += 1;
                } else {
                    hist_s[a] += 1;
                }
            }
            let nr = n_real as f64;
            let ns = synthetic.len() as f64;
            Ok(hist_r
                .iter()
                .zip(&hist_s)
                .map(|(&a, &b)| (a as f64 / nr - b as f64 / ns).abs())
                .sum::<f64>())
        })
        .collect::<Result<_>>()?;

    // Summed in restart order, independent of worker scheduling.
    let total = per_restart.iter().fold(0.0, |acc, v| acc + v);
    Ok(total / config.restarts as f64)
}
