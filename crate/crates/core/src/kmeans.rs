//! Seeded Lloyd's k-means with k-means++ initialization.

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::seed::rng_from_seed;

pub const DEFAULT_MAX_ITER: usize = 100;
pub const DEFAULT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub centroids: Vec<Vec<f64>>,
    pub assignments: Vec<usize>,
    pub iterations: usize,
}

impl Clustering {
    /// Sum of squared distances from each point to its centroid.
    pub fn inertia(&self, points: &[Vec<f64>]) -> f64 {
        points
            .iter()
            .zip(&self.assignments)
            .map(|(p, &c)| sq_dist(p, &self.centroids[c]))
            .sum()
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Index of the nearest centroid; ties go to the lower index.
fn nearest(p: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, c) in centroids.iter().enumerate() {
        let d = sq_dist(p, c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

/// Clusters `points` into `k` groups.
///
/// Iteration stops once no centroid moves by `tol` or more (Euclidean), or
/// after `max_iter` rounds. Assignments always refer to the returned
/// centroids. Clusters left empty by an update are re-seeded with the point
/// farthest from its current centroid.
pub fn kmeans(
    points: &[Vec<f64>],
    k: usize,
    seed: u64,
    max_iter: usize,
    tol: f64,
) -> Result<Clustering> {
    let n = points.len();
    if n == 0 {
        return Err(Error::EmptyInput("k-means needs at least one point".into()));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidConfig(format!(
            "k must be in 1..={n} for {n} points, got {k}"
        )));
    }
    let dim = points[0].len();
    if let Some(i) = points.iter().position(|p| p.len() != dim) {
        return Err(Error::schema(
            format!("point {i}"),
            "dim",
            format!("expected {dim} coordinates, found {}", points[i].len()),
        ));
    }

    let mut centroids = init_plus_plus(points, k, seed);
    let mut assignments = vec![0usize; n];
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        for (a, p) in assignments.iter_mut().zip(points) {
            *a = nearest(p, &centroids).0;
        }
        let updated = update_centroids(points, &assignments, &centroids);
        let shift = centroids
            .iter()
            .zip(&updated)
            .map(|(a, b)| sq_dist(a, b).sqrt())
            .fold(0.0, f64::max);
        centroids = updated;
        if shift < tol {
            break;
        }
    }
    for (a, p) in assignments.iter_mut().zip(points) {
        *a = nearest(p, &centroids).0;
    }
    Ok(Clustering {
        centroids,
        assignments,
        iterations,
    })
}

fn init_plus_plus(points: &[Vec<f64>], k: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = rng_from_seed(seed);
    let n = points.len();
    let mut centroids = Vec::with_capacity(k);
    centroids.push(points[rng.random_range(0..n)].clone());
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = None;
            for (i, &w) in d2.iter().enumerate() {
                acc += w;
                if w > 0.0 && acc > target {
                    chosen = Some(i);
                    break;
                }
            }
            // Rounding can leave `acc` just short of `target`.
            chosen.unwrap_or_else(|| d2.iter().rposition(|&w| w > 0.0).unwrap_or(0))
        } else {
            rng.random_range(0..n)
        };
        let c = points[pick].clone();
        for (w, p) in d2.iter_mut().zip(points) {
            *w = w.min(sq_dist(p, &c));
        }
        centroids.push(c);
    }
    centroids
}

fn update_centroids(points: &[Vec<f64>], assignments: &[usize], old: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let k = old.len();
    let dim = points[0].len();
    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (p, &a) in points.iter().zip(assignments) {
        counts[a] += 1;
        for (s, x) in sums[a].iter_mut().zip(p) {
            *s += x;
        }
    }
    let mut centroids: Vec<Vec<f64>> = sums
        .into_iter()
        .zip(&counts)
        .zip(old)
        .map(|((s, &c), o)| {
            if c == 0 {
                o.clone()
            } else {
                s.into_iter().map(|v| v / c as f64).collect()
            }
        })
        .collect();

    let empty: Vec<usize> = (0..k).filter(|&j| counts[j] == 0).collect();
    if !empty.is_empty() {
        // Distance of every point to the centroid it was assigned to.
        let mut far: Vec<(f64, usize)> = points
            .iter()
            .zip(assignments)
            .enumerate()
            .map(|(i, (p, &a))| (sq_dist(p, &centroids[a]), i))
            .collect();
        far.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        for (j, (_, i)) in empty.into_iter().zip(far) {
            centroids[j] = points[i].clone();
        }
    }
    centroids
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_d(xs: &[f64]) -> Vec<Vec<f64>> {
        xs.iter().map(|&x| vec![x]).collect()
    }

    #[test]
    fn single_cluster_is_the_mean() {
        let pts = vec![vec![1.0, 2.0], vec![3.0, -2.0], vec![5.0, 6.0]];
        let c = kmeans(&pts, 1, 3, 100, 1e-6).unwrap();
        assert!((c.centroids[0][0] - 3.0).abs() < 1e-12);
        assert!((c.centroids[0][1] - 2.0).abs() < 1e-12);
        assert!(c.assignments.iter().all(|&a| a == 0));
    }

    #[test]
    fn separated_clusters_recover_means() {
        let mut xs: Vec<f64> = (0..50).map(|i| (i as f64) * 0.01).collect();
        xs.extend((0..70).map(|i| 100.0 + (i as f64) * 0.02));
        let left = (0..50).map(|i| i as f64 * 0.01).sum::<f64>() / 50.0;
        let right = (0..70).map(|i| 100.0 + i as f64 * 0.02).sum::<f64>() / 70.0;
        for seed in 0..10 {
            let c = kmeans(&one_d(&xs), 2, seed, 100, 1e-6).unwrap();
            let mut cs: Vec<f64> = c.centroids.iter().map(|v| v[0]).collect();
            cs.sort_by(f64::total_cmp);
            assert!((cs[0] - left).abs() < 1e-9, "seed {seed}: {cs:?}");
            assert!((cs[1] - right).abs() < 1e-9, "seed {seed}: {cs:?}");
        }
    }

    #[test]
    fn one_point_per_cluster_has_zero_inertia() {
        let pts = one_d(&[0.0, 1.0, 4.0, 9.0, 16.0]);
        let c = kmeans(&pts, 5, 11, 100, 1e-6).unwrap();
        assert_eq!(c.inertia(&pts), 0.0);
    }

    #[test]
    fn duplicate_points_still_cover() {
        let pts = one_d(&[2.0, 2.0, 2.0, 5.0]);
        let c = kmeans(&pts, 4, 0, 100, 1e-6).unwrap();
        assert_eq!(c.inertia(&pts), 0.0);
        assert_eq!(c.centroids.len(), 4);
    }

    #[test]
    fn deterministic_per_seed() {
        let pts: Vec<Vec<f64>> = (0..200).map(|i| vec![(i * 37 % 101) as f64, (i % 7) as f64]).collect();
        let a = kmeans(&pts, 6, 42, 100, 1e-6).unwrap();
        let b = kmeans(&pts, 6, 42, 100, 1e-6).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_k_and_empty_input() {
        let pts = one_d(&[1.0, 2.0]);
        assert!(matches!(kmeans(&pts, 3, 0, 10, 1e-6), Err(Error::InvalidConfig(_))));
        assert!(matches!(kmeans(&pts, 0, 0, 10, 1e-6), Err(Error::InvalidConfig(_))));
        assert!(matches!(kmeans(&[], 1, 0, 10, 1e-6), Err(Error::EmptyInput(_))));
        let ragged = vec![vec![1.0], vec![1.0, 2.0]];
        assert!(matches!(kmeans(&ragged, 1, 0, 10, 1e-6), Err(Error::Schema(_))));
    }
}
