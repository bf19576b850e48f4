use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{sq_dist, Points};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KMeansConfig {
    pub restarts: usize,
    pub max_iter: usize,
    /// Lloyd stops once no centroid moves farther than this.
    pub tol: f64,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        KMeansConfig { restarts: 10, max_iter: 300, tol: 1e-8 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Clustering {
    pub k: usize,
    pub labels: Vec<usize>,
    /// `k x dim`, row-major.
    pub centroids: Vec<f64>,
    pub inertia: f64,
}

impl Clustering {
    pub fn centroid(&self, c: usize) -> &[f64] {
        let dim = self.centroids.len() / self.k;
        &self.centroids[c * dim..(c + 1) * dim]
    }
}

pub fn kmeans(x: Points<'_>, k: usize, seed: u64) -> Result<Clustering> {
    kmeans_with(x, k, seed, &KMeansConfig::default())
}

/// Best of `cfg.restarts` Lloyd runs from k-means++ seeding. Restart `r`
/// draws from stream `r` of a ChaCha8 generator keyed by `seed`.
pub fn kmeans_with(x: Points<'_>, k: usize, seed: u64, cfg: &KMeansConfig) -> Result<Clustering> {
    if k == 0 {
        return Err(Error::InvalidParams("k must be at least 1"));
    }
    if k > x.rows() {
        return Err(Error::TooManyClusters { k, rows: x.rows() });
    }
    if cfg.restarts == 0 {
        return Err(Error::InvalidParams("restarts must be at least 1"));
    }
    let mut best: Option<Clustering> = None;
    for r in 0..cfg.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(r as u64);
        let c = lloyd(x, seed_centroids(x, k, &mut rng), cfg);
        if best.as_ref().map_or(true, |b| c.inertia < b.inertia) {
            best = Some(c);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn seed_centroids(x: Points<'_>, k: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = x.rows();
    let mut chosen = Vec::with_capacity(k);
    chosen.push(rng.gen_range(0..n));
    let mut d2: Vec<f64> = (0..n).map(|i| sq_dist(x.row(i), x.row(chosen[0]))).collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut u = rng.gen::<f64>() * total;
            let mut pick = n - 1;
            for (i, &d) in d2.iter().enumerate() {
                if d > 0.0 && u < d {
                    pick = i;
                    break;
                }
                u -= d;
            }
            // guard against rounding leaving u past the last positive weight
            if d2[pick] == 0.0 {
                pick = d2.iter().rposition(|&d| d > 0.0).unwrap_or(pick);
            }
            pick
        } else {
            // fewer distinct points than k: fall back to unused indices
            let unused: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
            unused[rng.gen_range(0..unused.len())]
        };
        chosen.push(next);
        for (i, d) in d2.iter_mut().enumerate() {
            *d = d.min(sq_dist(x.row(i), x.row(next)));
        }
    }
    chosen.iter().flat_map(|&i| x.row(i).iter().copied()).collect()
}

/// Assigns every row to its nearest centroid (ties to the lower index) and
/// returns the inertia.
fn assign(x: Points<'_>, centroids: &[f64], labels: &mut [usize]) -> f64 {
    let dim = x.dim();
    let k = centroids.len() / dim;
    let mut inertia = 0.0;
    for (i, label) in labels.iter_mut().enumerate() {
        let row = x.row(i);
        let mut best = (f64::INFINITY, 0);
        for c in 0..k {
            let d = sq_dist(row, &centroids[c * dim..(c + 1) * dim]);
            if d < best.0 {
                best = (d, c);
            }
        }
        *label = best.1;
        inertia += best.0;
    }
    inertia
}

fn lloyd(x: Points<'_>, mut centroids: Vec<f64>, cfg: &KMeansConfig) -> Clustering {
    let dim = x.dim();
    let k = centroids.len() / dim;
    let mut labels = vec![0; x.rows()];
    let mut inertia = assign(x, &centroids, &mut labels);
    let mut sums = vec![0.0; k * dim];
    let mut counts = vec![0usize; k];
    for _ in 0..cfg.max_iter {
        sums.iter_mut().for_each(|s| *s = 0.0);
        counts.iter_mut().for_each(|c| *c = 0);
        for (i, &l) in labels.iter().enumerate() {
            counts[l] += 1;
            for (s, v) in sums[l * dim..(l + 1) * dim].iter_mut().zip(x.row(i)) {
                *s += v;
            }
        }
        let mut shift = 0.0f64;
        for c in 0..k {
            // an empty cluster keeps its centroid
            if counts[c] == 0 {
                continue;
            }
            let inv = 1.0 / counts[c] as f64;
            let old = &mut centroids[c * dim..(c + 1) * dim];
            let mut moved = 0.0;
            for (o, s) in old.iter_mut().zip(&sums[c * dim..(c + 1) * dim]) {
                let new = s * inv;
                moved += (new - *o) * (new - *o);
                *o = new;
            }
            shift = shift.max(moved);
        }
        let next = assign(x, &centroids, &mut labels);
        assert!(
            next <= inertia + 1e-9 * inertia.max(1.0),
            "k-means inertia increased from {inertia} to {next}"
        );
        inertia = next;
        if libm::sqrt(shift) < cfg.tol {
            break;
        }
    }
    Clustering { k, labels, centroids, inertia }
}

/// `(k, inertia)` for `k = 1..=k_max`, each the best of the configured
/// restarts with the same seed. A value that comes out above its predecessor
/// is replaced by the predecessor, so the curve never increases.
pub fn elbow_curve(x: Points<'_>, k_max: usize, seed: u64) -> Result<Vec<(usize, f64)>> {
    if k_max == 0 {
        return Err(Error::InvalidParams("k_max must be at least 1"));
    }
    let mut curve: Vec<(usize, f64)> = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let inertia = kmeans(x, k, seed)?.inertia;
        let capped = curve.last().map_or(inertia, |&(_, prev)| inertia.min(prev));
        curve.push((k, capped));
    }
    Ok(curve)
}

/// The `k` with the largest second difference `I(k-1) - 2 I(k) + I(k+1)`;
/// needs at least three points. Ties go to the smaller `k`.
pub fn elbow_point(curve: &[(usize, f64)]) -> Option<usize> {
    curve
        .windows(3)
        .map(|w| (w[1].0, w[0].1 - 2.0 * w[1].1 + w[2].1))
        .fold(None, |best: Option<(usize, f64)>, (k, d)| match best {
            Some((_, bd)) if bd >= d => best,
            _ => Some((k, d)),
        })
        .map(|(k, _)| k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(values: &[f64]) -> Points<'_> {
        Points::new(values, 1).unwrap()
    }

    #[test]
    fn two_separated_pairs() {
        let x = [0.0, 0.0, 10.0, 10.0];
        let c = kmeans(line(&x), 2, 7).unwrap();
        assert_eq!(c.inertia, 0.0);
        let mut cs = c.centroids.clone();
        cs.sort_by(f64::total_cmp);
        assert_eq!(cs, [0.0, 10.0]);
        assert_eq!(c.labels[0], c.labels[1]);
        assert_ne!(c.labels[0], c.labels[2]);

        let one = kmeans(line(&x), 1, 7).unwrap();
        assert_eq!(one.centroids, [5.0]);
        assert_eq!(one.inertia, 100.0);
    }

    #[test]
    fn one_cluster_per_row() {
        let x = [0.0, 0.0, 10.0, 10.0];
        assert_eq!(kmeans(line(&x), 4, 1).unwrap().inertia, 0.0);
        let y = [1.0, 2.5, -3.0, 8.0, 0.5];
        assert_eq!(kmeans(line(&y), 5, 1).unwrap().inertia, 0.0);
    }

    #[test]
    fn elbow_on_pairs() {
        let x = [0.0, 0.0, 10.0, 10.0];
        let curve = elbow_curve(line(&x), 4, 3).unwrap();
        assert_eq!(curve, [(1, 100.0), (2, 0.0), (3, 0.0), (4, 0.0)]);
        assert_eq!(elbow_point(&curve), Some(2));
        assert_eq!(elbow_curve(line(&x), 1, 3).unwrap().len(), 1);
    }

    #[test]
    fn errors() {
        let x = [0.0, 1.0];
        assert_eq!(kmeans(line(&x), 3, 0), Err(Error::TooManyClusters { k: 3, rows: 2 }));
        assert!(kmeans(line(&x), 0, 0).is_err());
        assert_eq!(Points::new(&[], 1).unwrap_err(), Error::Empty);
    }

    #[test]
    fn inertia_matches_labels() {
        let x: Vec<f64> = (0..40).map(|i| libm::sin(i as f64 * 1.7) * 5.0).collect();
        let p = Points::new(&x, 2).unwrap();
        let c = kmeans(p, 3, 11).unwrap();
        let recomputed: f64 = (0..p.rows()).map(|i| sq_dist(p.row(i), c.centroid(c.labels[i]))).sum();
        assert!((recomputed - c.inertia).abs() <= 1e-9);
        assert!(c.labels.iter().all(|&l| l < 3));
        assert_eq!(c, kmeans(p, 3, 11).unwrap());
    }
}
