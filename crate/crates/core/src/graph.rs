//! Undirected topologies and the per-edge tables laid over them.

use std::collections::VecDeque;
use std::sync::Arc;

use crate::error::{Error, Result};

const NO_EDGE: u32 = u32::MAX;

/// Undirected simple graph on `n` nodes. Edges are stored once as `(i, j)` with
/// `i < j`, sorted; edge ids index every per-edge table built on top.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Topology {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<(usize, usize)>>,
    index: Vec<u32>,
}

impl Topology {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut list: Vec<(usize, usize)> = Vec::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::input(format!("edge ({a}, {b}) out of range for n = {n}")));
            }
            if a == b {
                return Err(Error::input(format!("self-loop at node {a}")));
            }
            list.push((a.min(b), a.max(b)));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::input(format!("duplicate edge ({}, {})", w[0].0, w[0].1)));
        }
        Ok(Self::from_sorted(n, list))
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        Self::from_sorted(n, edges)
    }

    fn from_sorted(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        let mut index = vec![NO_EDGE; n * n];
        for (e, &(i, j)) in edges.iter().enumerate() {
            adj[i].push((j, e));
            adj[j].push((i, e));
            index[i * n + j] = e as u32;
            index[j * n + i] = e as u32;
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Topology {
            n,
            edges,
            adj,
            index,
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    #[inline]
    pub fn edge(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    /// Neighbors of `i` with the connecting edge id, sorted by neighbor.
    #[inline]
    pub fn neighbors(&self, i: usize) -> &[(usize, usize)] {
        &self.adj[i]
    }

    #[inline]
    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    #[inline]
    pub fn edge_id(&self, i: usize, j: usize) -> Option<usize> {
        if i >= self.n || j >= self.n {
            return None;
        }
        let e = self.index[i * self.n + j];
        (e != NO_EDGE).then_some(e as usize)
    }

    pub fn is_connected(&self) -> bool {
        self.is_connected_where(|_| true)
    }

    /// Connectivity of the spanning subgraph keeping edges where `keep(e)`.
    pub fn is_connected_where(&self, keep: impl Fn(usize) -> bool) -> bool {
        if self.n == 0 {
            return false;
        }
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &(v, e) in &self.adj[u] {
                if !seen[v] && keep(e) {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == self.n
    }

    /// Common neighbors of the endpoints of edge `e` as `(k, edge(i,k), edge(k,j))`.
    pub fn common_neighbors(&self, e: usize) -> Vec<(usize, usize, usize)> {
        let (i, j) = self.edges[e];
        let (a, b) = (&self.adj[i], &self.adj[j]);
        let (mut x, mut y) = (0, 0);
        let mut out = Vec::new();
        while x < a.len() && y < b.len() {
            match a[x].0.cmp(&b[y].0) {
                std::cmp::Ordering::Less => x += 1,
                std::cmp::Ordering::Greater => y += 1,
                std::cmp::Ordering::Equal => {
                    out.push((a[x].0, a[x].1, b[y].1));
                    x += 1;
                    y += 1;
                }
            }
        }
        out
    }
}

/// Nonnegative edge weights over a topology.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedGraph {
    topo: Arc<Topology>,
    weights: Vec<f64>,
}

impl WeightedGraph {
    pub fn new(topo: Arc<Topology>, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != topo.num_edges() {
            return Err(Error::SizeMismatch {
                expected: topo.num_edges(),
                got: weights.len(),
            });
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::input(format!("edge weight {w} is not a finite nonnegative value")));
        }
        Ok(WeightedGraph { topo, weights })
    }

    /// Unit weights on every edge.
    pub fn adjacency(topo: Arc<Topology>) -> Self {
        let weights = vec![1.0; topo.num_edges()];
        WeightedGraph { topo, weights }
    }

    pub fn from_fn(topo: Arc<Topology>, f: impl Fn(usize) -> f64) -> Result<Self> {
        let weights = (0..topo.num_edges()).map(f).collect();
        Self::new(topo, weights)
    }

    #[inline]
    pub fn topology(&self) -> &Arc<Topology> {
        &self.topo
    }

    #[inline]
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    #[inline]
    pub fn weight(&self, e: usize) -> f64 {
        self.weights[e]
    }

    /// `d_i = Σ_j w_ij`.
    pub fn degrees(&self) -> Vec<f64> {
        (0..self.topo.n())
            .map(|i| {
                self.topo
                    .neighbors(i)
                    .iter()
                    .map(|&(_, e)| self.weights[e])
                    .sum()
            })
            .collect()
    }

    /// Dense symmetric `n × n` weight matrix, row-major.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.topo.n();
        let mut out = vec![0.0; n * n];
        for (e, &(i, j)) in self.topo.edges().iter().enumerate() {
            out[i * n + j] = self.weights[e];
            out[j * n + i] = self.weights[e];
        }
        out
    }
}

/// Per-edge real values with no range constraint (e.g. blockwise inner products).
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeValues {
    topo: Arc<Topology>,
    values: Vec<f64>,
}

impl EdgeValues {
    pub fn new(topo: Arc<Topology>, values: Vec<f64>) -> Result<Self> {
        if values.len() != topo.num_edges() {
            return Err(Error::SizeMismatch {
                expected: topo.num_edges(),
                got: values.len(),
            });
        }
        Ok(EdgeValues { topo, values })
    }

    #[inline]
    pub fn topology(&self) -> &Arc<Topology> {
        &self.topo
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.topo.edge_id(i, j).map(|e| self.values[e])
    }
}

/// Symmetric per-edge affinity in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffinityMatrix {
    topo: Arc<Topology>,
    values: Vec<f64>,
}

impl AffinityMatrix {
    pub fn new(topo: Arc<Topology>, values: Vec<f64>) -> Result<Self> {
        if values.len() != topo.num_edges() {
            return Err(Error::SizeMismatch {
                expected: topo.num_edges(),
                got: values.len(),
            });
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::input(format!("affinity {v} outside [0, 1]")));
        }
        Ok(AffinityMatrix { topo, values })
    }

    /// Clamps tiny floating excursions outside `[0, 1]` produced by ratios.
    pub(crate) fn from_clamped(topo: Arc<Topology>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), topo.num_edges());
        let values = values.into_iter().map(|v| v.clamp(0.0, 1.0)).collect();
        AffinityMatrix { topo, values }
    }

    #[inline]
    pub fn topology(&self) -> &Arc<Topology> {
        &self.topo
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn value(&self, e: usize) -> f64 {
        self.values[e]
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.topo.edge_id(i, j).map(|e| self.values[e])
    }

    /// `max_e |self(e) − other(e)|` over the shared edge set.
    pub fn max_abs_diff(&self, other: &AffinityMatrix) -> Result<f64> {
        if self.values.len() != other.values.len() {
            return Err(Error::Shape("affinities over different edge sets".into()));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs())))
    }

    /// Weights `F(A) = A` (the identity reweighting).
    pub fn to_weights(&self) -> WeightedGraph {
        WeightedGraph {
            topo: self.topo.clone(),
            weights: self.values.clone(),
        }
    }

    /// Weights `exp(scale · A)` entrywise on edges.
    pub fn exp_weights(&self, scale: f64) -> WeightedGraph {
        WeightedGraph {
            topo: self.topo.clone(),
            weights: self.values.iter().map(|a| (scale * a).exp()).collect(),
        }
    }

    /// FNV-1a over the bit patterns of the values.
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for v in &self.values {
            for byte in v.to_bits().to_le_bytes() {
                h ^= byte as u64;
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        }
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn topology_validation() {
        assert!(Topology::new(3, [(0, 0)]).is_err());
        assert!(Topology::new(3, [(0, 1), (1, 0)]).is_err());
        assert!(Topology::new(3, [(0, 3)]).is_err());
        let t = Topology::new(4, [(2, 1), (0, 3), (1, 0)]).unwrap();
        assert_eq!(t.edges(), &[(0, 1), (0, 3), (1, 2)]);
        assert_eq!(t.edge_id(3, 0), Some(1));
        assert_eq!(t.edge_id(2, 3), None);
        assert!(t.is_connected());
        assert!(!Topology::new(4, [(0, 1), (2, 3)]).unwrap().is_connected());
    }

    #[test]
    fn complete_common_neighbors() {
        let t = Topology::complete(6);
        assert_eq!(t.num_edges(), 15);
        for e in 0..t.num_edges() {
            assert_eq!(t.common_neighbors(e).len(), 4);
        }
    }

    #[test]
    fn weights_reject_negative() {
        let t = Arc::new(Topology::complete(3));
        assert!(WeightedGraph::new(t.clone(), vec![1.0, -0.5, 1.0]).is_err());
        assert!(WeightedGraph::new(t.clone(), vec![1.0, f64::NAN, 1.0]).is_err());
        assert!(WeightedGraph::new(t, vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn affinity_range() {
        let t = Arc::new(Topology::complete(3));
        assert!(AffinityMatrix::new(t.clone(), vec![0.0, 1.0, 1.5]).is_err());
        let a = AffinityMatrix::new(t, vec![0.0, 0.5, 1.0]).unwrap();
        assert_eq!(a.get(2, 1), Some(1.0));
        let w = a.exp_weights(2.0);
        assert!(w.weight(0) < w.weight(1) && w.weight(1) < w.weight(2));
    }
}
