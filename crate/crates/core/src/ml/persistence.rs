use alloc::vec::Vec;

use super::{sq_dist, Points};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PersistencePair {
    pub birth: f64,
    pub death: f64,
}

impl PersistencePair {
    pub fn is_essential(&self) -> bool {
        self.death == f64::INFINITY
    }
}

/// Degree-0 Vietoris-Rips diagram: finite pairs in merge order, then the
/// essential class.
#[derive(Clone, Debug, PartialEq)]
pub struct PersistenceDiagram {
    pub pairs: Vec<PersistencePair>,
}

impl PersistenceDiagram {
    pub fn finite_deaths(&self) -> impl Iterator<Item = f64> + '_ {
        self.pairs.iter().filter(|p| !p.is_essential()).map(|p| p.death)
    }
}

struct DisjointSets {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets { parent: (0..n).collect(), rank: alloc::vec![0; n] }
    }

    fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            core::cmp::Ordering::Less => self.parent[ra] = rb,
            core::cmp::Ordering::Greater => self.parent[rb] = ra,
            core::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// H0 persistence under the Euclidean metric, from Kruskal's minimum
/// spanning tree: every component is born at 0 and dies at the length of the
/// edge that merges it.
pub fn h0_persistence(x: Points<'_>) -> Result<PersistenceDiagram> {
    let n = x.rows();
    if n == 0 {
        return Err(Error::Empty);
    }
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            edges.push((sq_dist(x.row(i), x.row(j)), i, j));
        }
    }
    edges.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut sets = DisjointSets::new(n);
    let mut pairs = Vec::with_capacity(n);
    for (d2, i, j) in edges {
        if sets.union(i, j) {
            pairs.push(PersistencePair { birth: 0.0, death: libm::sqrt(d2) });
            if pairs.len() == n - 1 {
                break;
            }
        }
    }
    pairs.push(PersistencePair { birth: 0.0, death: f64::INFINITY });
    Ok(PersistenceDiagram { pairs })
}
