//! Block measurements over a topology and the weighted block operator built
//! from them, including walk-averaged block ratios.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::{AffinityMatrix, EdgeValues, Topology, WeightedGraph};
use crate::perm::{Permutation, SquareBlock};

/// Denominators at or below this are treated as "no walk".
pub const RATIO_EPS: f64 = 1e-12;

/// Relative permutations on the edges of a topology. The block for `(i, j)`
/// with `i < j` is stored; `(j, i)` is its transpose.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockMeasurement {
    topo: Arc<Topology>,
    m: usize,
    fwd: Vec<Permutation>,
    inv: Vec<Permutation>,
}

impl BlockMeasurement {
    /// `blocks[e]` is the measurement for `edge(e) = (i, j)`, `i < j`.
    pub fn new(topo: Arc<Topology>, m: usize, blocks: Vec<Permutation>) -> Result<Self> {
        if m == 0 {
            return Err(Error::input("block size must be positive"));
        }
        if blocks.len() != topo.num_edges() {
            return Err(Error::SizeMismatch {
                expected: topo.num_edges(),
                got: blocks.len(),
            });
        }
        if let Some(b) = blocks.iter().find(|b| b.size() != m) {
            return Err(Error::SizeMismatch {
                expected: m,
                got: b.size(),
            });
        }
        let inv = blocks.iter().map(Permutation::transpose).collect();
        Ok(BlockMeasurement {
            topo,
            m,
            fwd: blocks,
            inv,
        })
    }

    /// Noiseless measurement `P_i P_jᵀ` on every edge.
    pub fn from_absolute(topo: Arc<Topology>, truth: &[Permutation]) -> Result<Self> {
        if truth.len() != topo.n() {
            return Err(Error::SizeMismatch {
                expected: topo.n(),
                got: truth.len(),
            });
        }
        let m = truth.first().map_or(0, Permutation::size);
        if truth.iter().any(|p| p.size() != m) {
            return Err(Error::input("absolute permutations differ in size"));
        }
        let blocks = topo
            .edges()
            .iter()
            .map(|&(i, j)| truth[i].compose_transpose(&truth[j]))
            .collect();
        Self::new(topo, m, blocks)
    }

    #[inline]
    pub fn topology(&self) -> &Arc<Topology> {
        &self.topo
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.topo.n()
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    /// Block for the stored orientation of edge `e`.
    #[inline]
    pub fn edge_block(&self, e: usize) -> &Permutation {
        &self.fwd[e]
    }

    #[inline]
    pub fn edge_blocks(&self) -> &[Permutation] {
        &self.fwd
    }

    /// Block `(i, j)` in either orientation.
    pub fn block(&self, i: usize, j: usize) -> Option<&Permutation> {
        let e = self.topo.edge_id(i, j)?;
        Some(if i < j { &self.fwd[e] } else { &self.inv[e] })
    }

    /// Block `(from, to)` where `e` is known to join them.
    #[inline]
    pub(crate) fn oriented(&self, e: usize, from: usize) -> &Permutation {
        if self.topo.edge(e).0 == from {
            &self.fwd[e]
        } else {
            &self.inv[e]
        }
    }

    /// `⟨X̃_ij, P_i P_jᵀ⟩` per edge as integer agreement counts.
    pub fn agreement_with(&self, estimate: &[Permutation]) -> Result<Vec<usize>> {
        self.check_estimate(estimate)?;
        Ok(self
            .topo
            .edges()
            .iter()
            .enumerate()
            .map(|(e, &(i, j))| {
                let pi = estimate[i].map();
                let pj_inv = estimate[j].transpose();
                let x = self.fwd[e].map();
                (0..self.m).filter(|&r| pj_inv.image(pi[r]) == x[r]).count()
            })
            .collect())
    }

    /// First-order affinity `⟨P_i P_jᵀ, X̃_ij⟩ / m`.
    pub fn residual_affinity(&self, estimate: &[Permutation]) -> Result<AffinityMatrix> {
        let m = self.m as f64;
        let values = self
            .agreement_with(estimate)?
            .into_iter()
            .map(|a| a as f64 / m)
            .collect();
        Ok(AffinityMatrix::from_clamped(self.topo.clone(), values))
    }

    /// Residual norms `‖P_i P_jᵀ − X̃_ij‖_F` per edge.
    pub fn residuals(&self, estimate: &[Permutation]) -> Result<Vec<f64>> {
        let m = self.m;
        Ok(self
            .agreement_with(estimate)?
            .into_iter()
            .map(|a| ((2 * (m - a)) as f64).sqrt())
            .collect())
    }

    pub(crate) fn check_estimate(&self, estimate: &[Permutation]) -> Result<()> {
        if estimate.len() != self.n() {
            return Err(Error::SizeMismatch {
                expected: self.n(),
                got: estimate.len(),
            });
        }
        if let Some(p) = estimate.iter().find(|p| p.size() != self.m) {
            return Err(Error::SizeMismatch {
                expected: self.m,
                got: p.size(),
            });
        }
        Ok(())
    }
}

/// The weighted block operator with block `w_ij · X̃_ij` on each edge.
#[derive(Clone, Debug)]
pub struct GcwOperator<'a> {
    weights: &'a WeightedGraph,
    meas: &'a BlockMeasurement,
}

/// Pairs edge weights with measurements. Both must live on the same topology.
pub fn build_gcw<'a>(
    weights: &'a WeightedGraph,
    meas: &'a BlockMeasurement,
) -> Result<GcwOperator<'a>> {
    let (a, b) = (weights.topology(), meas.topology());
    if !Arc::ptr_eq(a, b) && a != b {
        return Err(Error::Shape(
            "weights and measurements are on different edge sets".into(),
        ));
    }
    Ok(GcwOperator { weights, meas })
}

impl<'a> GcwOperator<'a> {
    #[inline]
    pub fn weights(&self) -> &'a WeightedGraph {
        self.weights
    }

    #[inline]
    pub fn measurement(&self) -> &'a BlockMeasurement {
        self.meas
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.meas.n() * self.meas.m()
    }

    /// Dense `nm × nm` assembly.
    pub fn densify(&self) -> DMatrix<f64> {
        let m = self.meas.m();
        let mut s = DMatrix::zeros(self.dim(), self.dim());
        for (e, &(i, j)) in self.meas.topology().edges().iter().enumerate() {
            let w = self.weights.weight(e);
            for (r, &c) in self.meas.edge_block(e).map().iter().enumerate() {
                s[(i * m + r, j * m + c)] = w;
                s[(j * m + c, i * m + r)] = w;
            }
        }
        s
    }

    /// `Y = diag(scale) · S · diag(scale) · X` with node-level scaling, where
    /// `X` and `Y` are `nm × b` column-major.
    pub(crate) fn apply_scaled(&self, scale: &[f64], x: &DMatrix<f64>, y: &mut DMatrix<f64>) {
        let m = self.meas.m();
        let b = x.ncols();
        y.fill(0.0);
        for (e, &(i, j)) in self.meas.topology().edges().iter().enumerate() {
            let c = self.weights.weight(e) * scale[i] * scale[j];
            if c == 0.0 {
                continue;
            }
            let map = self.meas.edge_block(e).map();
            for col in 0..b {
                for (r, &t) in map.iter().enumerate() {
                    y[(i * m + r, col)] += c * x[(j * m + t, col)];
                    y[(j * m + t, col)] += c * x[(i * m + r, col)];
                }
            }
        }
    }
}

/// Per-edge `m × m` blocks over a topology.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockTable {
    topo: Arc<Topology>,
    blocks: Vec<SquareBlock>,
}

impl BlockTable {
    pub fn new(topo: Arc<Topology>, blocks: Vec<SquareBlock>) -> Result<Self> {
        if blocks.len() != topo.num_edges() {
            return Err(Error::SizeMismatch {
                expected: topo.num_edges(),
                got: blocks.len(),
            });
        }
        Ok(BlockTable { topo, blocks })
    }

    #[inline]
    pub fn topology(&self) -> &Arc<Topology> {
        &self.topo
    }

    #[inline]
    pub fn blocks(&self) -> &[SquareBlock] {
        &self.blocks
    }

    #[inline]
    pub fn block(&self, e: usize) -> &SquareBlock {
        &self.blocks[e]
    }
}

/// Blockwise Frobenius inner product `⟨A[i,j], X̃[i,j]⟩` on every edge.
pub fn block_inner(table: &BlockTable, meas: &BlockMeasurement) -> Result<EdgeValues> {
    if table.topology().as_ref() != meas.topology().as_ref() {
        return Err(Error::Shape("block table and measurement edge sets differ".into()));
    }
    if let Some(b) = table.blocks().iter().find(|b| b.size() != meas.m()) {
        return Err(Error::SizeMismatch {
            expected: meas.m(),
            got: b.size(),
        });
    }
    let values = table
        .blocks()
        .iter()
        .zip(meas.edge_blocks())
        .map(|(b, p)| b.inner_permutation(p))
        .collect();
    EdgeValues::new(table.topology().clone(), values)
}

/// Blockwise inner product of the operator's own blocks with a measurement.
pub fn gcw_block_inner(op: &GcwOperator<'_>, other: &BlockMeasurement) -> Result<EdgeValues> {
    let meas = op.measurement();
    if meas.topology().as_ref() != other.topology().as_ref() || meas.m() != other.m() {
        return Err(Error::Shape("operator and measurement shapes differ".into()));
    }
    let values = (0..meas.topology().num_edges())
        .map(|e| {
            op.weights().weight(e) * meas.edge_block(e).agreement_unchecked(other.edge_block(e)) as f64
        })
        .collect();
    EdgeValues::new(meas.topology().clone(), values)
}

/// `S^l[i,j] / W^l(i,j)` on every edge, where the denominator was positive.
#[derive(Clone, Debug)]
pub struct GcwRatio {
    topo: Arc<Topology>,
    blocks: Vec<Option<SquareBlock>>,
    path_weight: Vec<f64>,
}

impl GcwRatio {
    #[inline]
    pub fn block(&self, e: usize) -> Option<&SquareBlock> {
        self.blocks[e].as_ref()
    }

    /// `W^l(i,j)` per edge.
    #[inline]
    pub fn path_weights(&self) -> &[f64] {
        &self.path_weight
    }

    /// Fills edges without a walk from `fallback`.
    pub fn with_fallback(self, fallback: impl Fn(usize) -> SquareBlock) -> BlockTable {
        let blocks = self
            .blocks
            .into_iter()
            .enumerate()
            .map(|(e, b)| b.unwrap_or_else(|| fallback(e)))
            .collect();
        BlockTable {
            topo: self.topo,
            blocks,
        }
    }

    /// `⟨ratio block, X̃_ij⟩ / m`, or `fallback(e)` where there is no walk.
    pub fn affinity(
        &self,
        meas: &BlockMeasurement,
        fallback: impl Fn(usize) -> f64,
    ) -> AffinityMatrix {
        let m = meas.m() as f64;
        let values = self
            .blocks
            .iter()
            .enumerate()
            .map(|(e, b)| match b {
                Some(b) => b.inner_permutation(meas.edge_block(e)) / m,
                None => fallback(e),
            })
            .collect();
        AffinityMatrix::from_clamped(self.topo.clone(), values)
    }
}

/// Walk-weighted average of length-`l` path products for every edge:
/// `Σ_walks Π w · X̃_{i k₁} ⋯ X̃_{k_{l−1} j} / Σ_walks Π w`.
///
/// Walks are extended one level at a time from each source node; walks may
/// revisit nodes. Edges with `W^l(i,j) ≤ RATIO_EPS` get `None`.
pub fn squared_gcw_ratio(op: &GcwOperator<'_>, l: usize) -> Result<GcwRatio> {
    if l < 2 {
        return Err(Error::input(format!("walk length must be at least 2, got {l}")));
    }
    let meas = op.measurement();
    let topo = meas.topology();
    let (n, m) = (topo.n(), meas.m());
    let w = op.weights();
    let mut blocks: Vec<Option<SquareBlock>> = vec![None; topo.num_edges()];
    let mut path_weight = vec![0.0; topo.num_edges()];

    let mut cur = vec![0.0; n * m * m];
    let mut next = vec![0.0; n * m * m];
    let mut cur_w = vec![0.0; n];
    let mut next_w = vec![0.0; n];

    for src in 0..n {
        if topo.neighbors(src).iter().all(|&(j, _)| j < src) {
            continue;
        }
        cur.fill(0.0);
        cur_w.fill(0.0);
        for &(u, e) in topo.neighbors(src) {
            let we = w.weight(e);
            cur_w[u] = we;
            let map = meas.oriented(e, src).map();
            let bu = &mut cur[u * m * m..(u + 1) * m * m];
            for (r, &c) in map.iter().enumerate() {
                bu[r * m + c] = we;
            }
        }
        for _ in 1..l {
            next.fill(0.0);
            next_w.fill(0.0);
            for u in 0..n {
                if cur_w[u] == 0.0 {
                    continue;
                }
                let bu = &cur[u * m * m..(u + 1) * m * m];
                for &(v, e) in topo.neighbors(u) {
                    let we = w.weight(e);
                    if we == 0.0 {
                        continue;
                    }
                    next_w[v] += cur_w[u] * we;
                    let map = meas.oriented(e, u).map();
                    let bv = &mut next[v * m * m..(v + 1) * m * m];
                    for r in 0..m {
                        let row = &bu[r * m..(r + 1) * m];
                        let out = &mut bv[r * m..(r + 1) * m];
                        for (k, &c) in map.iter().enumerate() {
                            out[c] += we * row[k];
                        }
                    }
                }
            }
            std::mem::swap(&mut cur, &mut next);
            std::mem::swap(&mut cur_w, &mut next_w);
        }
        for &(j, e) in topo.neighbors(src) {
            if j < src {
                continue;
            }
            path_weight[e] = cur_w[j];
            if cur_w[j] > RATIO_EPS {
                let data: Vec<f64> = cur[j * m * m..(j + 1) * m * m]
                    .iter()
                    .map(|v| v / cur_w[j])
                    .collect();
                blocks[e] = Some(SquareBlock(DMatrix::from_row_slice(m, m, &data)));
            }
        }
    }
    Ok(GcwRatio {
        topo: topo.clone(),
        blocks,
        path_weight,
    })
}

#[derive(Clone, Copy, Debug)]
struct Triangle {
    ik: u32,
    kj: u32,
    agree: u32,
}

/// Precomputed triangles through each edge with the agreement between the
/// two-step path product and the direct measurement. Affinities for walk
/// length 2 then cost `O(Σ |N(ij)|)` per reweighting.
#[derive(Clone, Debug)]
pub struct TriangleTable {
    topo: Arc<Topology>,
    m: usize,
    offsets: Vec<usize>,
    tris: Vec<Triangle>,
}

impl TriangleTable {
    pub fn new(meas: &BlockMeasurement) -> Self {
        let topo = meas.topology();
        let m = meas.m();
        let mut offsets = Vec::with_capacity(topo.num_edges() + 1);
        let mut tris = Vec::new();
        offsets.push(0);
        let mut scratch = vec![0usize; m];
        for e in 0..topo.num_edges() {
            let (i, _) = topo.edge(e);
            let x = meas.edge_block(e).map();
            for (k, ik, kj) in topo.common_neighbors(e) {
                let a = meas.oriented(ik, i).map();
                let b = meas.oriented(kj, k).map();
                for (r, s) in scratch.iter_mut().enumerate() {
                    *s = b[a[r]];
                }
                let agree = scratch.iter().zip(x).filter(|(p, q)| p == q).count();
                tris.push(Triangle {
                    ik: ik as u32,
                    kj: kj as u32,
                    agree: agree as u32,
                });
            }
            offsets.push(tris.len());
        }
        TriangleTable {
            topo: topo.clone(),
            m,
            offsets,
            tris,
        }
    }

    /// Number of triangles through edge `e`.
    #[inline]
    pub fn count(&self, e: usize) -> usize {
        self.offsets[e + 1] - self.offsets[e]
    }

    /// Walk-length-2 ratio affinity under `weights`; `fallback(e)` where
    /// `W²(i,j) ≤ RATIO_EPS`.
    pub fn affinity(&self, weights: &WeightedGraph, fallback: impl Fn(usize) -> f64) -> AffinityMatrix {
        let w = weights.weights();
        let m = self.m as f64;
        let values = (0..self.topo.num_edges())
            .map(|e| {
                let (mut num, mut den) = (0.0, 0.0);
                for t in &self.tris[self.offsets[e]..self.offsets[e + 1]] {
                    let pw = w[t.ik as usize] * w[t.kj as usize];
                    num += pw * t.agree as f64;
                    den += pw;
                }
                if den > RATIO_EPS {
                    num / (m * den)
                } else {
                    fallback(e)
                }
            })
            .collect();
        AffinityMatrix::from_clamped(self.topo.clone(), values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(v: &[usize]) -> Permutation {
        Permutation::from_map(v.to_vec()).unwrap()
    }

    fn truth4() -> Vec<Permutation> {
        vec![perm(&[0, 1, 2]), perm(&[2, 0, 1]), perm(&[1, 0, 2]), perm(&[1, 2, 0])]
    }

    fn dense_block(p: &Permutation) -> DMatrix<f64> {
        SquareBlock::from_permutation(p).0
    }

    #[test]
    fn transpose_symmetry() {
        let topo = Arc::new(Topology::complete(4));
        let meas = BlockMeasurement::from_absolute(topo, &truth4()).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert_eq!(meas.block(j, i).unwrap(), &meas.block(i, j).unwrap().transpose());
                }
            }
        }
        assert!(meas.block(1, 1).is_none());
    }

    #[test]
    fn gcw_unit_and_zero_weights() {
        let topo = Arc::new(Topology::complete(3));
        let meas = BlockMeasurement::from_absolute(topo.clone(), &truth4()[..3]).unwrap();
        let ones = WeightedGraph::adjacency(topo.clone());
        let s = build_gcw(&ones, &meas).unwrap().densify();
        for i in 0..3 {
            for j in 0..3 {
                let blk = s.view((i * 3, j * 3), (3, 3)).into_owned();
                let want = meas
                    .block(i, j)
                    .map_or(DMatrix::zeros(3, 3), dense_block);
                assert_eq!(blk, want);
            }
        }
        let zeros = WeightedGraph::new(topo, vec![0.0; 3]).unwrap();
        assert!(build_gcw(&zeros, &meas).unwrap().densify().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn gcw_path_weights_match_kronecker_assembly() {
        let topo = Arc::new(Topology::new(3, [(0, 1), (1, 2)]).unwrap());
        let meas = BlockMeasurement::new(
            topo.clone(),
            3,
            vec![perm(&[1, 2, 0]), perm(&[0, 2, 1])],
        )
        .unwrap();
        let w = WeightedGraph::new(topo, vec![2.0, 0.5]).unwrap();
        let s = build_gcw(&w, &meas).unwrap().densify();
        // (W ⊗ 1_m) ⊙ X̃ assembled entry by entry.
        let wd = w.to_dense();
        let mut want = DMatrix::zeros(9, 9);
        for i in 0..3 {
            for j in 0..3 {
                if let Some(p) = meas.block(i, j) {
                    let b = dense_block(p);
                    for r in 0..3 {
                        for c in 0..3 {
                            want[(i * 3 + r, j * 3 + c)] = wd[i * 3 + j] * b[(r, c)];
                        }
                    }
                }
            }
        }
        assert_eq!(s, want);
    }

    #[test]
    fn apply_matches_dense() {
        let topo = Arc::new(Topology::complete(4));
        let mut blocks = BlockMeasurement::from_absolute(topo.clone(), &truth4())
            .unwrap()
            .edge_blocks()
            .to_vec();
        blocks[2] = perm(&[2, 1, 0]);
        let meas = BlockMeasurement::new(topo.clone(), 3, blocks).unwrap();
        let w = WeightedGraph::from_fn(topo, |e| 0.25 + e as f64).unwrap();
        let op = build_gcw(&w, &meas).unwrap();
        let x = DMatrix::from_fn(12, 2, |r, c| ((r * 7 + c * 3) % 5) as f64 - 2.0);
        let scale = [1.0, 0.5, 2.0, 1.5];
        let mut y = DMatrix::zeros(12, 2);
        op.apply_scaled(&scale, &x, &mut y);
        let d = DMatrix::from_fn(12, 12, |r, c| if r == c { scale[r / 3] } else { 0.0 });
        let want = &d * op.densify() * &d * &x;
        assert!((y - want).amax() < 1e-12);
    }

    #[test]
    fn block_inner_examples() {
        let topo = Arc::new(Topology::complete(4));
        let meas = BlockMeasurement::from_absolute(topo.clone(), &truth4()).unwrap();
        let table = BlockTable::new(
            topo.clone(),
            meas.edge_blocks().iter().map(SquareBlock::from_permutation).collect(),
        )
        .unwrap();
        assert!(block_inner(&table, &meas).unwrap().values().iter().all(|v| *v == 3.0));

        // Blocks supported off the measurement pattern.
        let off = BlockTable::new(
            topo.clone(),
            meas.edge_blocks()
                .iter()
                .map(|p| {
                    let mut b = SquareBlock::constant(3, 1.0);
                    b.add_permutation(p, -1.0);
                    b
                })
                .collect(),
        )
        .unwrap();
        assert!(block_inner(&off, &meas).unwrap().values().iter().all(|v| *v == 0.0));

        let w = WeightedGraph::from_fn(topo, |e| 1.0 + e as f64).unwrap();
        let op = build_gcw(&w, &meas).unwrap();
        let dense = op.densify();
        let got = gcw_block_inner(&op, &meas).unwrap();
        for (e, &(i, j)) in meas.topology().edges().iter().enumerate() {
            let blk = dense.view((i * 3, j * 3), (3, 3)).into_owned();
            let want = blk.component_mul(&dense_block(meas.edge_block(e))).sum();
            assert_eq!(got.values()[e], want);
        }
    }

    #[test]
    fn ratio_noiseless_triangle_is_exact() {
        let topo = Arc::new(Topology::complete(3));
        let meas = BlockMeasurement::from_absolute(topo.clone(), &truth4()[..3]).unwrap();
        let w = WeightedGraph::adjacency(topo);
        let r = squared_gcw_ratio(&build_gcw(&w, &meas).unwrap(), 2).unwrap();
        for e in 0..3 {
            assert_eq!(r.block(e).unwrap(), &SquareBlock::from_permutation(meas.edge_block(e)));
        }
    }

    #[test]
    fn ratio_matches_dense_powers() {
        let topo = Arc::new(Topology::new(5, [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (3, 4), (2, 4)]).unwrap());
        let truth = vec![
            perm(&[0, 1, 2]),
            perm(&[2, 0, 1]),
            perm(&[1, 0, 2]),
            perm(&[1, 2, 0]),
            perm(&[0, 2, 1]),
        ];
        let mut blocks = BlockMeasurement::from_absolute(topo.clone(), &truth)
            .unwrap()
            .edge_blocks()
            .to_vec();
        blocks[3] = perm(&[2, 1, 0]);
        let meas = BlockMeasurement::new(topo.clone(), 3, blocks).unwrap();
        let w = WeightedGraph::from_fn(topo.clone(), |e| 0.5 + 0.3 * e as f64).unwrap();
        let op = build_gcw(&w, &meas).unwrap();
        let s = op.densify();
        let wd = DMatrix::from_row_slice(5, 5, &w.to_dense());
        for l in 2..=4 {
            let sl = (1..l).fold(s.clone(), |acc, _| &acc * &s);
            let wl = (1..l).fold(wd.clone(), |acc, _| &acc * &wd);
            let r = squared_gcw_ratio(&op, l).unwrap();
            for (e, &(i, j)) in topo.edges().iter().enumerate() {
                let want = sl.view((i * 3, j * 3), (3, 3)) / wl[(i, j)];
                match r.block(e) {
                    Some(b) => assert!((&b.0 - want).amax() < 1e-12),
                    None => assert!(wl[(i, j)] <= RATIO_EPS),
                }
            }
        }
        // Edge (3,4) has no 2-walk besides via node 2.
        let r2 = squared_gcw_ratio(&op, 2).unwrap();
        assert!(r2.block(topo.edge_id(3, 4).unwrap()).is_some());
        assert!(squared_gcw_ratio(&op, 1).is_err());
    }

    #[test]
    fn triangle_table_matches_general_route() {
        let topo = Arc::new(Topology::complete(6));
        let truth: Vec<Permutation> = (0..6)
            .map(|k| perm(&[(k) % 4, (k + 1) % 4, (k + 2) % 4, (k + 3) % 4]))
            .collect();
        let mut blocks = BlockMeasurement::from_absolute(topo.clone(), &truth)
            .unwrap()
            .edge_blocks()
            .to_vec();
        blocks[1] = perm(&[3, 2, 1, 0]);
        blocks[7] = perm(&[1, 0, 3, 2]);
        let meas = BlockMeasurement::new(topo.clone(), 4, blocks).unwrap();
        let w = WeightedGraph::from_fn(topo, |e| ((e * 37) % 11) as f64 / 10.0).unwrap();
        let tri = TriangleTable::new(&meas).affinity(&w, |_| 0.5);
        let gen = squared_gcw_ratio(&build_gcw(&w, &meas).unwrap(), 2)
            .unwrap()
            .affinity(&meas, |_| 0.5);
        assert!(tri.max_abs_diff(&gen).unwrap() < 1e-12);
    }

    #[test]
    fn residuals_are_quantized() {
        let topo = Arc::new(Topology::complete(4));
        let meas = BlockMeasurement::from_absolute(topo, &truth4()).unwrap();
        let est = vec![perm(&[0, 1, 2]); 4];
        for r in meas.residuals(&est).unwrap() {
            let k = r * r / 2.0;
            assert!((k - k.round()).abs() < 1e-12 && k.round() != 1.0);
        }
        let a1 = meas.residual_affinity(&truth4()).unwrap();
        assert!(a1.values().iter().all(|v| *v == 1.0));
    }
}
