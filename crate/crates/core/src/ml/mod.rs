//! Unsupervised analysis of feature matrices.

mod kmeans;
mod pca;
mod persistence;

pub use kmeans::{elbow_curve, elbow_point, kmeans, kmeans_with, Clustering, KMeansConfig};
pub use pca::{pca, Pca};
pub use persistence::{h0_persistence, PersistenceDiagram, PersistencePair};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

/// Borrowed row-major point cloud.
#[derive(Clone, Copy, Debug)]
pub struct Points<'a> {
    values: &'a [f64],
    dim: usize,
}

impl<'a> Points<'a> {
    pub fn new(values: &'a [f64], dim: usize) -> Result<Self> {
        if values.is_empty() || dim == 0 {
            return Err(Error::Empty);
        }
        if values.len() % dim != 0 {
            return Err(Error::DimensionMismatch { expected: dim, found: values.len() % dim });
        }
        Ok(Points { values, dim })
    }

    pub fn rows(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &'a [f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn values(&self) -> &'a [f64] {
        self.values
    }
}

impl FeatureMatrix {
    pub fn points(&self) -> Result<Points<'_>> {
        Points::new(&self.values, self.cols())
    }
}

#[inline]
pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
