use serde::Serialize;

use crate::divergence::restricted_l1;
use crate::domain::{disagreement_regions, exact_risk, FiniteInstance};
use crate::error::{Error, Result};

/// Divergence threshold applied to a pair `(i, j)`.
#[derive(Debug, Clone, PartialEq)]
pub enum PairThreshold {
    Scalar(f64),
    /// `matrix[i][j]` is the threshold for the ordered pair `(i, j)`.
    Matrix(Vec<Vec<f64>>),
}

impl PairThreshold {
    fn get(&self, i: usize, j: usize) -> f64 {
        match self {
            PairThreshold::Scalar(d) => *d,
            PairThreshold::Matrix(m) => m[i][j],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreservationStats {
    pub pairs: usize,
    pub triggered: usize,
    pub triggered_preserved: usize,
    /// Preserved share of triggered pairs; 1 by convention when none triggered.
    pub triggered_fraction: f64,
    /// Set when no pair met the condition.
    pub vacuous: bool,
    pub untriggered: usize,
    pub untriggered_preserved: usize,
    pub untriggered_fraction: Option<f64>,
}

/// Over ordered pairs `(i, j)`, `i ≠ j`: among those with
/// `errs_s[j] − errs_s[i] ≥ threshold(i, j)`, the share whose real-domain
/// difference `errs_r[j] − errs_r[i]` is non-negative.
pub fn pairwise_rank_preservation(
    errs_s: &[f64],
    errs_r: &[f64],
    threshold: &PairThreshold,
) -> Result<PreservationStats> {
    let n = errs_s.len();
    if errs_r.len() != n {
        return Err(Error::schema(
            "errs_r",
            "errs_r",
            format!("expected {n} errors to match errs_s, found {}", errs_r.len()),
        ));
    }
    if n < 2 {
        return Err(Error::EmptyInput(format!("need at least 2 models, found {n}")));
    }
    if let PairThreshold::Matrix(m) = threshold {
        if m.len() != n || m.iter().any(|row| row.len() != n) {
            return Err(Error::schema(
                "threshold",
                "threshold",
                format!("expected a {n}x{n} matrix"),
            ));
        }
    }
    let (mut triggered, mut triggered_preserved) = (0, 0);
    let (mut untriggered, mut untriggered_preserved) = (0, 0);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let preserved = errs_r[j] - errs_r[i] >= 0.0;
            if errs_s[j] - errs_s[i] >= threshold.get(i, j) {
                triggered += 1;
                triggered_preserved += preserved as usize;
            } else {
                untriggered += 1;
                untriggered_preserved += preserved as usize;
            }
        }
    }
    Ok(PreservationStats {
        pairs: n * (n - 1),
        triggered,
        triggered_preserved,
        triggered_fraction: if triggered == 0 {
            1.0
        } else {
            triggered_preserved as f64 / triggered as f64
        },
        vacuous: triggered == 0,
        untriggered,
        untriggered_preserved,
        untriggered_fraction: (untriggered > 0)
            .then(|| untriggered_preserved as f64 / untriggered as f64),
    })
}

/// Exact synthetic and real risks of every hypothesis, and the restricted
/// divergence over each pair's disagreement region.
pub fn instance_rank_inputs(inst: &FiniteInstance) -> Result<(Vec<f64>, Vec<f64>, PairThreshold)> {
    let hs = inst.hypotheses();
    let errs_s = hs
        .iter()
        .map(|h| exact_risk(inst.mu_s(), h, inst.f()))
        .collect::<Result<Vec<_>>>()?;
    let errs_r = hs
        .iter()
        .map(|h| exact_risk(inst.mu_r(), h, inst.f()))
        .collect::<Result<Vec<_>>>()?;
    let mut matrix = vec![vec![0.0; hs.len()]; hs.len()];
    for i in 0..hs.len() {
        for j in 0..hs.len() {
            if i != j {
                let (o1, o2) = disagreement_regions(&hs[i], &hs[j], inst.f())?;
                let region = o1.union(&o2).copied().collect();
                matrix[i][j] = restricted_l1(inst.mu_r(), inst.mu_s(), &region)?;
            }
        }
    }
    Ok((errs_s, errs_r, PairThreshold::Matrix(matrix)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_errors_are_preserved() {
        let e = [0.3, 0.1, 0.2, 0.1];
        let s = pairwise_rank_preservation(&e, &e, &PairThreshold::Scalar(0.0)).unwrap();
        assert_eq!(s.triggered_fraction, 1.0);
        assert!(!s.vacuous);
        assert_eq!(s.pairs, 12);
    }

    #[test]
    fn vacuous_condition_is_flagged() {
        let s = pairwise_rank_preservation(&[0.1, 0.5], &[0.5, 0.1], &PairThreshold::Scalar(1.0))
            .unwrap();
        assert_eq!(s.triggered, 0);
        assert!(s.vacuous);
        assert_eq!(s.triggered_fraction, 1.0);
        assert_eq!(s.untriggered, 2);
        assert_eq!(s.untriggered_fraction, Some(0.5));
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(pairwise_rank_preservation(&[0.1, 0.2], &[0.1], &PairThreshold::Scalar(0.0)).is_err());
        assert!(pairwise_rank_preservation(
            &[0.1, 0.2],
            &[0.1, 0.2],
            &PairThreshold::Matrix(vec![vec![0.0]])
        )
        .is_err());
    }
}
