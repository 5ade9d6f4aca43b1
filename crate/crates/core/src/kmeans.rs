//! Lloyd's k-means with k-means++ seeding and a Hartigan transfer pass.

use alloc::vec;
use alloc::vec::Vec;

use crate::rng::{self, SeededRng};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KMeansConfig {
    pub k: usize,
    pub max_iter: usize,
    /// Independent k-means++ initializations; the lowest-inertia run wins.
    pub n_init: usize,
}

impl KMeansConfig {
    pub fn new(k: usize) -> Self {
        KMeansConfig { k, max_iter: 100, n_init: 10 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeans {
    pub centers: Vec<Vec<f64>>,
    pub assignment: Vec<usize>,
    pub inertia: f64,
    /// Inertia after each center update of the winning run.
    pub inertia_trace: Vec<f64>,
    /// Set when fewer distinct points than `k` were available.
    pub requested_k: usize,
}

impl KMeans {
    pub fn k(&self) -> usize {
        self.centers.len()
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k()];
        for &a in &self.assignment {
            sizes[a] += 1;
        }
        sizes
    }
}

/// Clusters `points` into `k` groups with the default configuration.
pub fn kmeans<P: AsRef<[f64]>>(points: &[P], k: usize, seed: u64) -> Result<KMeans> {
    kmeans_with(points, KMeansConfig::new(k), seed)
}

pub fn kmeans_with<P: AsRef<[f64]>>(points: &[P], cfg: KMeansConfig, seed: u64) -> Result<KMeans> {
    if points.is_empty() {
        return Err(Error::invalid("k-means needs at least one point"));
    }
    if cfg.k == 0 {
        return Err(Error::invalid("k must be positive"));
    }
    let dim = points[0].as_ref().len();
    if points.iter().any(|p| p.as_ref().len() != dim) {
        return Err(Error::DimensionMismatch("points have differing dimensions".into()));
    }
    if points.iter().any(|p| p.as_ref().iter().any(|x| !x.is_finite())) {
        return Err(Error::invalid("points must be finite"));
    }
    let k = cfg.k.min(count_distinct(points, cfg.k));

    let mut best: Option<KMeans> = None;
    for run in 0..cfg.n_init.max(1) {
        let mut rng = rng::seeded(rng::derive_seed(seed, run as u64));
        let init = plus_plus_init(points, k, &mut rng);
        let result = lloyd(points, init, cfg.max_iter, cfg.k);
        if best.as_ref().is_none_or(|b| result.inertia < b.inertia) {
            best = Some(result);
        }
    }
    Ok(best.expect("n_init >= 1"))
}

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Number of distinct points, counting no further than `cap`.
fn count_distinct<P: AsRef<[f64]>>(points: &[P], cap: usize) -> usize {
    let mut seen: Vec<&[f64]> = Vec::new();
    for p in points {
        let p = p.as_ref();
        if !seen.contains(&p) {
            seen.push(p);
            if seen.len() >= cap {
                break;
            }
        }
    }
    seen.len()
}

fn plus_plus_init<P: AsRef<[f64]>>(points: &[P], k: usize, rng: &mut SeededRng) -> Vec<Vec<f64>> {
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(k);
    centers.push(points[rng::index(rng, points.len())].as_ref().to_vec());
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p.as_ref(), &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let next = rng::categorical(rng, &d2, total);
        let c = points[next].as_ref().to_vec();
        for (d, p) in d2.iter_mut().zip(points) {
            *d = d.min(sq_dist(p.as_ref(), &c));
        }
        centers.push(c);
    }
    centers
}

fn nearest(p: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, c) in centers.iter().enumerate() {
        let d = sq_dist(p, c);
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

fn lloyd<P: AsRef<[f64]>>(points: &[P], mut centers: Vec<Vec<f64>>, max_iter: usize, requested_k: usize) -> KMeans {
    let k = centers.len();
    let dim = centers[0].len();
    let mut assignment = vec![usize::MAX; points.len()];
    let mut trace = Vec::new();

    for _ in 0..max_iter.max(1) {
        let mut changed = false;
        for (a, p) in assignment.iter_mut().zip(points) {
            let (idx, _) = nearest(p.as_ref(), &centers);
            if *a != idx {
                *a = idx;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (&a, p) in assignment.iter().zip(points) {
            counts[a] += 1;
            for (s, x) in sums[a].iter_mut().zip(p.as_ref()) {
                *s += x;
            }
        }
        for ((c, s), &n) in centers.iter_mut().zip(sums).zip(&counts) {
            // empty clusters keep their previous center
            if n > 0 {
                for (ci, si) in c.iter_mut().zip(s) {
                    *ci = si / n as f64;
                }
            }
        }
        trace.push(inertia_of(points, &centers, &assignment));
    }

    hartigan_refine(points, &mut centers, &mut assignment, &mut trace, max_iter);
    let inertia = inertia_of(points, &centers, &assignment);
    KMeans { centers, assignment, inertia, inertia_trace: trace, requested_k }
}

/// Single-point transfers that strictly lower inertia, applied after Lloyd has settled.
///
/// Moving `x` from cluster `a` (size `n_a`) to `b` changes the inertia by
/// `n_b/(n_b+1)·|x-c_b|² - n_a/(n_a-1)·|x-c_a|²`; each sweep applies every negative move.
fn hartigan_refine<P: AsRef<[f64]>>(
    points: &[P],
    centers: &mut [Vec<f64>],
    assignment: &mut [usize],
    trace: &mut Vec<f64>,
    max_sweeps: usize,
) {
    let k = centers.len();
    if k < 2 {
        return;
    }
    let mut counts = vec![0usize; k];
    for &a in assignment.iter() {
        counts[a] += 1;
    }
    for _ in 0..max_sweeps.max(1) {
        let mut moved = false;
        for (i, p) in points.iter().enumerate() {
            let x = p.as_ref();
            let a = assignment[i];
            let na = counts[a] as f64;
            if counts[a] < 2 {
                continue;
            }
            let removal = na / (na - 1.0) * sq_dist(x, &centers[a]);
            let mut best = (a, 0.0);
            for b in (0..k).filter(|&b| b != a) {
                let nb = counts[b] as f64;
                let delta = nb / (nb + 1.0) * sq_dist(x, &centers[b]) - removal;
                if delta < best.1 - 1e-12 * removal.max(1.0) {
                    best = (b, delta);
                }
            }
            let b = best.0;
            if b == a {
                continue;
            }
            let nb = counts[b] as f64;
            for (c, xi) in centers[a].iter_mut().zip(x) {
                *c = (*c * na - xi) / (na - 1.0);
            }
            for (c, xi) in centers[b].iter_mut().zip(x) {
                *c = (*c * nb + xi) / (nb + 1.0);
            }
            counts[a] -= 1;
            counts[b] += 1;
            assignment[i] = b;
            moved = true;
        }
        if !moved {
            break;
        }
        recompute_centers(points, centers, assignment, &counts);
        trace.push(inertia_of(points, centers, assignment));
    }
}

/// Exact means from the assignment, removing drift from incremental updates.
fn recompute_centers<P: AsRef<[f64]>>(points: &[P], centers: &mut [Vec<f64>], assignment: &[usize], counts: &[usize]) {
    for c in centers.iter_mut() {
        c.iter_mut().for_each(|v| *v = 0.0);
    }
    for (&a, p) in assignment.iter().zip(points) {
        for (c, x) in centers[a].iter_mut().zip(p.as_ref()) {
            *c += x;
        }
    }
    for (c, &n) in centers.iter_mut().zip(counts) {
        if n > 0 {
            c.iter_mut().for_each(|v| *v /= n as f64);
        }
    }
}

fn inertia_of<P: AsRef<[f64]>>(points: &[P], centers: &[Vec<f64>], assignment: &[usize]) -> f64 {
    points
        .iter()
        .zip(assignment)
        .map(|(p, &a)| sq_dist(p.as_ref(), &centers[a]))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separable_one_dimensional() {
        let pts = [[0.0], [0.0], [10.0], [10.0]];
        let km = kmeans(&pts, 2, 1).unwrap();
        let mut centers: Vec<f64> = km.centers.iter().map(|c| c[0]).collect();
        centers.sort_by(f64::total_cmp);
        assert_eq!(centers, vec![0.0, 10.0]);
        assert_eq!(km.inertia, 0.0);
        assert_eq!(km.assignment[0], km.assignment[1]);
        assert_ne!(km.assignment[0], km.assignment[2]);
    }

    #[test]
    fn single_cluster_is_the_mean() {
        let pts = [[1.0, 2.0], [3.0, 6.0], [5.0, 1.0]];
        let km = kmeans(&pts, 1, 9).unwrap();
        assert!((km.centers[0][0] - 3.0).abs() < 1e-12);
        assert!((km.centers[0][1] - 3.0).abs() < 1e-12);
        assert!(km.assignment.iter().all(|&a| a == 0));
    }

    #[test]
    fn k_reduced_to_distinct_points() {
        let pts = [[1.0], [1.0], [2.0]];
        let km = kmeans(&pts, 5, 0).unwrap();
        assert_eq!(km.k(), 2);
        assert_eq!(km.requested_k, 5);
        assert_eq!(km.inertia, 0.0);
    }

    #[test]
    fn rejects_empty_and_zero_k() {
        let empty: [[f64; 1]; 0] = [];
        assert!(kmeans(&empty, 2, 0).is_err());
        assert!(kmeans(&[[1.0]], 0, 0).is_err());
        assert!(kmeans(&[vec![1.0], vec![1.0, 2.0]], 1, 0).is_err());
    }

    #[test]
    fn deterministic_for_seed() {
        let pts: Vec<[f64; 2]> = (0..50).map(|i| [(i * 7 % 13) as f64, (i * 3 % 11) as f64]).collect();
        let a = kmeans(&pts, 3, 5).unwrap();
        let b = kmeans(&pts, 3, 5).unwrap();
        assert_eq!(a, b);
    }
}
