use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use super::Points;
use crate::error::{Error, Result};

/// Principal components of a column-centred point cloud.
///
/// Each component is oriented so that its largest-magnitude entry is
/// positive (the first such entry on ties).
#[derive(Clone, Debug, PartialEq)]
pub struct Pca {
    pub n_components: usize,
    pub dim: usize,
    /// Column means removed before the decomposition.
    pub mean: Vec<f64>,
    /// `n_components x dim`, row-major.
    pub components: Vec<f64>,
    /// `rows x n_components`, row-major.
    pub projections: Vec<f64>,
    pub explained_variance_ratio: Vec<f64>,
    /// Set when the centred data is identically zero; all ratios are then 0.
    pub zero_variance: bool,
}

impl Pca {
    pub fn component(&self, c: usize) -> &[f64] {
        &self.components[c * self.dim..(c + 1) * self.dim]
    }

    pub fn projection(&self, row: usize) -> &[f64] {
        &self.projections[row * self.n_components..(row + 1) * self.n_components]
    }

    /// Maps the projections back to feature space.
    pub fn reconstruct(&self) -> Vec<f64> {
        let rows = self.projections.len() / self.n_components.max(1);
        let mut out = Vec::with_capacity(rows * self.dim);
        for r in 0..rows {
            let z = self.projection(r);
            for j in 0..self.dim {
                let v: f64 = (0..self.n_components).map(|c| z[c] * self.component(c)[j]).sum();
                out.push(self.mean[j] + v);
            }
        }
        out
    }
}

pub fn pca(x: Points<'_>, n_components: usize) -> Result<Pca> {
    let (rows, dim) = (x.rows(), x.dim());
    if n_components == 0 || n_components > rows.min(dim) {
        return Err(Error::InvalidParams("n_components must lie in 1..=min(rows, cols)"));
    }
    let mut mean = vec![0.0; dim];
    for r in 0..rows {
        for (m, v) in mean.iter_mut().zip(x.row(r)) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= rows as f64);
    let centred = DMatrix::from_fn(rows, dim, |r, c| x.row(r)[c] - mean[c]);

    let svd = centred.clone().svd(false, true);
    let v_t = svd.v_t.as_ref().expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));

    let total: f64 = svd.singular_values.iter().map(|s| s * s).sum();
    let zero_variance = !(total > 0.0);

    let mut components = Vec::with_capacity(n_components * dim);
    let mut explained_variance_ratio = Vec::with_capacity(n_components);
    for &i in order.iter().take(n_components) {
        let row: Vec<f64> = v_t.row(i).iter().copied().collect();
        let pivot = row
            .iter()
            .enumerate()
            .fold((0, 0.0f64), |best, (j, v)| if v.abs() > best.1 { (j, v.abs()) } else { best })
            .0;
        let sign = if row[pivot] < 0.0 { -1.0 } else { 1.0 };
        components.extend(row.iter().map(|v| sign * v));
        let s = svd.singular_values[i];
        explained_variance_ratio.push(if zero_variance { 0.0 } else { s * s / total });
    }

    let mut projections = Vec::with_capacity(rows * n_components);
    for r in 0..rows {
        for c in 0..n_components {
            let comp = &components[c * dim..(c + 1) * dim];
            projections.push((0..dim).map(|j| centred[(r, j)] * comp[j]).sum());
        }
    }
    Ok(Pca { n_components, dim, mean, components, projections, explained_variance_ratio, zero_variance })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collinear_points_have_one_component() {
        let x: Vec<f64> = (0..10).flat_map(|i| [i as f64, 2.0 * i as f64 + 1.0]).collect();
        let p = pca(Points::new(&x, 2).unwrap(), 2).unwrap();
        assert!((p.explained_variance_ratio[0] - 1.0).abs() < 1e-10);
        assert!(p.explained_variance_ratio[1].abs() < 1e-10);
        let c = p.component(0);
        assert!(c[1] > 0.0 && c[1] > c[0].abs());
        assert!((c[1] / c[0] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn full_rank_reconstructs() {
        let x = [1.0, 2.0, 0.5, -1.0, 3.0, 4.0, 0.0, 1.0, -2.0, 2.0, 2.0, 2.0];
        let p = pca(Points::new(&x, 3).unwrap(), 3).unwrap();
        let sum: f64 = p.explained_variance_ratio.iter().sum();
        assert!((sum - 1.0).abs() < 1e-10);
        assert!(p.explained_variance_ratio.windows(2).all(|w| w[0] >= w[1]));
        for (a, b) in p.reconstruct().iter().zip(&x) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn more_columns_than_rows() {
        let x = [1.0, 0.0, 2.0, 5.0, 0.0, 1.0, -1.0, 4.0];
        let p = pca(Points::new(&x, 4).unwrap(), 2).unwrap();
        assert!((p.explained_variance_ratio[0] - 1.0).abs() < 1e-10);
        for (a, b) in p.reconstruct().iter().zip(&x) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn constant_data_is_flagged() {
        let x = [3.0, 1.0, 3.0, 1.0, 3.0, 1.0];
        let p = pca(Points::new(&x, 2).unwrap(), 2).unwrap();
        assert!(p.zero_variance);
        assert_eq!(p.explained_variance_ratio, [0.0, 0.0]);
    }

    #[test]
    fn rejects_too_many_components() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert!(pca(Points::new(&x, 2).unwrap(), 3).is_err());
        assert!(pca(Points::new(&x, 2).unwrap(), 0).is_err());
    }
}
