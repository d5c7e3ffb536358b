use serde::Serialize;

use crate::error::{Error, Result};

/// Fractional ranks (1-based); tied values share the mean of their ranks.
pub fn fractional_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // Positions i..j hold ranks i+1..=j.
        let rank = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = rank;
        }
        i = j;
    }
    ranks
}

fn check_inputs(xs: &[f64], ys: &[f64]) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(Error::schema(
            "ys",
            "ys",
            format!("expected {} values to match xs, found {}", xs.len(), ys.len()),
        ));
    }
    if xs.len() < 2 {
        return Err(Error::EmptyInput(format!(
            "rank correlation needs at least 2 pairs, found {}",
            xs.len()
        )));
    }
    for (name, v) in [("xs", xs), ("ys", ys)] {
        if let Some(i) = v.iter().position(|x| !x.is_finite()) {
            return Err(Error::schema(
                format!("{name}[{i}]"),
                name,
                format!("expected a finite value, found {}", v[i]),
            ));
        }
    }
    Ok(())
}

/// Spearman's rank correlation: Pearson correlation of fractional ranks.
///
/// Inputs whose ranks have zero variance (all values equal) are rejected
/// with [`Error::Degenerate`].
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64> {
    check_inputs(xs, ys)?;
    let rx = fractional_ranks(xs);
    let ry = fractional_ranks(ys);
    let n = rx.len() as f64;
    // Mean rank is (n + 1) / 2 regardless of ties.
    let mean = (n + 1.0) / 2.0;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        let (da, db) = (a - mean, b - mean);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Degenerate(
            "all values are equal on at least one side; rank correlation is undefined".into(),
        ));
    }
    // sqrt(fl(s·s)) == s, so perfectly monotone inputs give exactly ±1.
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman coefficient together with the pairs it was computed from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankReport {
    pub spearman: f64,
    pub n: usize,
    #[serde(skip)]
    pub scatter: Vec<(f64, f64)>,
}

impl RankReport {
    pub fn from_pairs(scatter: Vec<(f64, f64)>) -> Result<Self> {
        let (xs, ys): (Vec<f64>, Vec<f64>) = scatter.iter().copied().unzip();
        Ok(RankReport {
            spearman: spearman(&xs, &ys)?,
            n: scatter.len(),
            scatter,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks_average_ties() {
        assert_eq!(fractional_ranks(&[10.0, 20.0, 10.0, 30.0]), vec![1.5, 3.0, 1.5, 4.0]);
        assert_eq!(fractional_ranks(&[5.0, 5.0, 5.0]), vec![2.0, 2.0, 2.0]);
    }

    #[test]
    fn identity_and_reversal() {
        let xs = [0.3, 0.1, 0.7, 0.2, 0.9];
        assert_eq!(spearman(&xs, &xs).unwrap(), 1.0);
        let ys: Vec<f64> = xs.iter().map(|x| -x).collect();
        assert_eq!(spearman(&xs, &ys).unwrap(), -1.0);
    }

    #[test]
    fn three_point_example() {
        let r = spearman(&[1.0, 2.0, 3.0], &[3.0, 1.0, 2.0]).unwrap();
        assert!((r + 0.5).abs() < 1e-12, "{r}");
    }

    #[test]
    fn tied_example_matches_hand_computation() {
        // Ranks x = (1, 2.5, 2.5, 4), y = (1, 2, 3, 4); Pearson on ranks.
        let r = spearman(&[1.0, 2.0, 2.0, 3.0], &[1.0, 2.0, 3.0, 4.0]).unwrap();
        let expected = 4.5 / (4.5f64.sqrt() * 5.0f64.sqrt());
        assert!((r - expected).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        assert!(matches!(spearman(&[1.0], &[1.0]), Err(Error::EmptyInput(_))));
        assert!(matches!(spearman(&[1.0, 2.0], &[1.0]), Err(Error::Schema(_))));
        assert!(matches!(
            spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(Error::Degenerate(_))
        ));
        assert!(matches!(spearman(&[1.0, f64::NAN], &[1.0, 2.0]), Err(Error::Schema(_))));
    }
}
