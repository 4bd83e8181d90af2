//! Synthetic synchronization problems.
//!
//! Every generator draws, in order: the absolute permutations, the graph
//! (resampled until connected), the corrupted edge set, and the corrupted
//! blocks. Given a seeded generator the output is fully deterministic.

mod filter;
pub mod io;

pub use filter::{well_posedness_filter, FilteredInstance};

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::seq::{index, SliceRandom};
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Topology, WeightedGraph};
use crate::measurement::BlockMeasurement;
use crate::perm::Permutation;
use crate::rng::SeededRng;

const CONNECT_ATTEMPTS: usize = 1000;

/// Distribution of corrupted blocks on the superspreader's edges. Blocks are
/// described for the orientation `(i₀, j)`.
#[derive(Clone, Debug, PartialEq)]
pub enum DxSampler {
    Haar,
    /// `Q · P*_jᵀ` with `Q` a random 3-cycle.
    Lac,
    /// `P*_{i₀} · Q · P*_jᵀ`: exactly three rows disagree with the truth.
    LacRelative,
    /// `P_crpt · P*_jᵀ` with probability `prob`, otherwise Haar.
    Mixture { prob: f64, crpt: Permutation },
}

impl DxSampler {
    /// Draws a corrupted block for the orientation `(i₀, j)`.
    pub fn sample(
        &self,
        rng: &mut SeededRng,
        m: usize,
        truth_i0: &Permutation,
        truth_j: &Permutation,
    ) -> Result<Permutation> {
        Ok(match self {
            DxSampler::Haar => sample_haar_permutation(rng, m)?,
            DxSampler::Lac => sample_three_cycle(rng, m)?.compose_transpose(truth_j),
            DxSampler::LacRelative => truth_i0
                .compose_unchecked(&sample_three_cycle(rng, m)?)
                .compose_transpose(truth_j),
            DxSampler::Mixture { prob, crpt } => {
                if rng.gen_bool(*prob) {
                    crpt.compose_transpose(truth_j)
                } else {
                    sample_haar_permutation(rng, m)?
                }
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Corruption {
    Uniform { q: f64 },
    Superspreader { eps: f64, node: usize, dx: DxSampler },
    Lbc { nc: usize, mc: usize },
    Lac { nc: usize, mc: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    Uniform,
    Superspreader,
    Lbc,
    Lac,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [
        ModelKind::Uniform,
        ModelKind::Superspreader,
        ModelKind::Lbc,
        ModelKind::Lac,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Uniform => "uniform",
            ModelKind::Superspreader => "superspreader",
            ModelKind::Lbc => "lbc",
            ModelKind::Lac => "lac",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::input(format!("unknown model `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelConfig {
    pub n: usize,
    pub m: usize,
    /// Edge probability of the underlying Erdős–Rényi graph.
    pub p: f64,
    pub corruption: Corruption,
}

impl ModelConfig {
    pub fn uniform(n: usize, m: usize, p: f64, q: f64) -> Self {
        ModelConfig {
            n,
            m,
            p,
            corruption: Corruption::Uniform { q },
        }
    }

    pub fn superspreader(n: usize, m: usize, p: f64, eps: f64, dx: DxSampler) -> Self {
        ModelConfig {
            n,
            m,
            p,
            corruption: Corruption::Superspreader { eps, node: 0, dx },
        }
    }

    pub fn lbc(n: usize, m: usize, p: f64, nc: usize, mc: usize) -> Self {
        ModelConfig {
            n,
            m,
            p,
            corruption: Corruption::Lbc { nc, mc },
        }
    }

    pub fn lac(n: usize, m: usize, p: f64, nc: usize, mc: usize) -> Self {
        ModelConfig {
            n,
            m,
            p,
            corruption: Corruption::Lac { nc, mc },
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self.corruption {
            Corruption::Uniform { .. } => ModelKind::Uniform,
            Corruption::Superspreader { .. } => ModelKind::Superspreader,
            Corruption::Lbc { .. } => ModelKind::Lbc,
            Corruption::Lac { .. } => ModelKind::Lac,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64, allow_zero: bool| {
            let ok = v <= 1.0 && if allow_zero { v >= 0.0 } else { v > 0.0 };
            if ok {
                Ok(())
            } else {
                Err(Error::input(format!("{name} = {v} outside its range")))
            }
        };
        if self.n < 2 {
            return Err(Error::input("need at least two nodes"));
        }
        if self.m == 0 {
            return Err(Error::input("block size must be positive"));
        }
        unit("p", self.p, false)?;
        match &self.corruption {
            Corruption::Uniform { q } => unit("q", *q, true),
            Corruption::Superspreader { eps, node, dx } => {
                unit("eps", *eps, false)?;
                if *node >= self.n {
                    return Err(Error::input(format!("superspreader node {node} out of range")));
                }
                match dx {
                    DxSampler::Lac | DxSampler::LacRelative if self.m < 3 => {
                        Err(Error::input("three-cycle corruption needs m >= 3"))
                    }
                    DxSampler::Mixture { prob, crpt } => {
                        unit("mixture probability", *prob, true)?;
                        if crpt.size() != self.m {
                            return Err(Error::SizeMismatch {
                                expected: self.m,
                                got: crpt.size(),
                            });
                        }
                        Ok(())
                    }
                    _ => Ok(()),
                }
            }
            Corruption::Lbc { nc, mc } | Corruption::Lac { nc, mc } => {
                if *nc > self.n {
                    return Err(Error::input(format!("nc = {nc} exceeds n = {}", self.n)));
                }
                if *mc > self.n - 1 {
                    return Err(Error::input(format!("mc = {mc} exceeds n - 1")));
                }
                if self.kind() == ModelKind::Lac && self.m < 3 {
                    return Err(Error::input("lac needs m >= 3"));
                }
                Ok(())
            }
        }
    }
}

/// A measurement with optional ground truth and optional bad-edge flags.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemInstance {
    meas: BlockMeasurement,
    truth: Option<Vec<Permutation>>,
    bad: Option<Vec<bool>>,
}

impl ProblemInstance {
    pub fn new(
        meas: BlockMeasurement,
        truth: Option<Vec<Permutation>>,
        bad: Option<Vec<bool>>,
    ) -> Result<Self> {
        if let Some(t) = &truth {
            meas.check_estimate(t)?;
        }
        if let Some(b) = &bad {
            if b.len() != meas.topology().num_edges() {
                return Err(Error::SizeMismatch {
                    expected: meas.topology().num_edges(),
                    got: b.len(),
                });
            }
        }
        if let (Some(t), Some(b)) = (&truth, &bad) {
            for (e, &(i, j)) in meas.topology().edges().iter().enumerate() {
                if !b[e] && *meas.edge_block(e) != t[i].compose_transpose(&t[j]) {
                    return Err(Error::input(format!(
                        "edge ({i}, {j}) is marked good but disagrees with the truth"
                    )));
                }
            }
        }
        Ok(ProblemInstance { meas, truth, bad })
    }

    #[inline]
    pub fn measurement(&self) -> &BlockMeasurement {
        &self.meas
    }

    #[inline]
    pub fn topology(&self) -> &Arc<Topology> {
        self.meas.topology()
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.meas.n()
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.meas.m()
    }

    /// Unit weights on the measured edges.
    pub fn graph(&self) -> WeightedGraph {
        WeightedGraph::adjacency(self.topology().clone())
    }

    pub fn truth(&self) -> Option<&[Permutation]> {
        self.truth.as_deref()
    }

    /// Per-edge corruption flags, if known.
    pub fn bad_edges(&self) -> Option<&[bool]> {
        self.bad.as_deref()
    }

    pub fn num_bad(&self) -> Option<usize> {
        self.bad.as_ref().map(|b| b.iter().filter(|x| **x).count())
    }

    /// `X*_ij = P*_i P*_jᵀ` on edge `e`.
    pub fn true_block(&self, e: usize) -> Result<Permutation> {
        let t = self.truth.as_ref().ok_or(Error::TruthAbsent)?;
        let (i, j) = self.topology().edge(e);
        Ok(t[i].compose_transpose(&t[j]))
    }

    /// Noiseless instance on a topology.
    pub fn noiseless(topo: Arc<Topology>, truth: Vec<Permutation>) -> Result<Self> {
        let meas = BlockMeasurement::from_absolute(topo.clone(), &truth)?;
        let bad = vec![false; topo.num_edges()];
        Self::new(meas, Some(truth), Some(bad))
    }
}

/// Uniform draw over all `m!` permutations (Fisher–Yates).
pub fn sample_haar_permutation(rng: &mut SeededRng, m: usize) -> Result<Permutation> {
    if m == 0 {
        return Err(Error::input("permutation size must be positive"));
    }
    let mut map: Vec<usize> = (0..m).collect();
    map.shuffle(rng);
    Ok(Permutation::from_map_unchecked(map))
}

/// Random 3-cycle on three distinct uniformly chosen positions.
pub fn sample_three_cycle(rng: &mut SeededRng, m: usize) -> Result<Permutation> {
    if m < 3 {
        return Err(Error::input("a 3-cycle needs m >= 3"));
    }
    let cols = index::sample(rng, m, 3).into_vec();
    let (a, b, c) = (cols[0], cols[1], cols[2]);
    let mut map: Vec<usize> = (0..m).collect();
    if rng.gen_bool(0.5) {
        map[a] = b;
        map[b] = c;
        map[c] = a;
    } else {
        map[a] = c;
        map[c] = b;
        map[b] = a;
    }
    Ok(Permutation::from_map_unchecked(map))
}

/// `G(n, p)` with unit weights.
pub fn generate_er_graph(
    rng: &mut SeededRng,
    n: usize,
    p: f64,
    require_connected: bool,
) -> Result<WeightedGraph> {
    if n < 2 {
        return Err(Error::input("need at least two nodes"));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::input(format!("edge probability {p} outside (0, 1]")));
    }
    if p == 1.0 {
        return Ok(WeightedGraph::adjacency(Arc::new(Topology::complete(n))));
    }
    for _ in 0..CONNECT_ATTEMPTS {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen_bool(p) {
                    edges.push((i, j));
                }
            }
        }
        let topo = Topology::new(n, edges)?;
        if !require_connected || topo.is_connected() {
            return Ok(WeightedGraph::adjacency(Arc::new(topo)));
        }
    }
    Err(Error::Generation(format!(
        "no connected G({n}, {p}) in {CONNECT_ATTEMPTS} attempts"
    )))
}

fn draw_truth(rng: &mut SeededRng, n: usize, m: usize) -> Result<Vec<Permutation>> {
    (0..n).map(|_| sample_haar_permutation(rng, m)).collect()
}

/// Block stored for edge `e` given the block oriented out of `from`.
fn store(topo: &Topology, e: usize, from: usize, block: Permutation) -> Permutation {
    if topo.edge(e).0 == from {
        block
    } else {
        block.transpose()
    }
}

/// Flags exactly the edges whose block differs from the truth, so a corrupted
/// draw that happens to equal `X*_ij` counts as a good edge.
fn flag_corrupted(meas: BlockMeasurement, truth: Vec<Permutation>) -> Result<ProblemInstance> {
    let bad = meas
        .topology()
        .edges()
        .iter()
        .zip(meas.edge_blocks())
        .map(|(&(i, j), x)| *x != truth[i].compose_transpose(&truth[j]))
        .collect();
    ProblemInstance::new(meas, Some(truth), Some(bad))
}

pub fn generate(cfg: &ModelConfig, rng: &mut SeededRng) -> Result<ProblemInstance> {
    match cfg.kind() {
        ModelKind::Uniform => generate_uniform(cfg, rng),
        ModelKind::Superspreader => generate_superspreader(cfg, rng),
        ModelKind::Lbc => generate_lbc(cfg, rng),
        ModelKind::Lac => generate_lac(cfg, rng),
    }
}

fn expect_kind(cfg: &ModelConfig, kind: ModelKind) -> Result<()> {
    cfg.validate()?;
    if cfg.kind() != kind {
        return Err(Error::input(format!("expected a {kind} config, got {}", cfg.kind())));
    }
    Ok(())
}

/// Each edge is corrupted independently with probability `q` by a Haar block.
pub fn generate_uniform(cfg: &ModelConfig, rng: &mut SeededRng) -> Result<ProblemInstance> {
    expect_kind(cfg, ModelKind::Uniform)?;
    let Corruption::Uniform { q } = cfg.corruption else {
        unreachable!()
    };
    let truth = draw_truth(rng, cfg.n, cfg.m)?;
    let topo = generate_er_graph(rng, cfg.n, cfg.p, true)?.topology().clone();
    let mut blocks = Vec::with_capacity(topo.num_edges());
    for &(i, j) in topo.edges() {
        if rng.gen_bool(q) {
            blocks.push(sample_haar_permutation(rng, cfg.m)?);
        } else {
            blocks.push(truth[i].compose_transpose(&truth[j]));
        }
    }
    flag_corrupted(BlockMeasurement::new(topo, cfg.m, blocks)?, truth)
}

/// Edges at the superspreader node are corrupted independently with
/// probability `1 − ε`; all other edges are exact.
pub fn generate_superspreader(cfg: &ModelConfig, rng: &mut SeededRng) -> Result<ProblemInstance> {
    expect_kind(cfg, ModelKind::Superspreader)?;
    let Corruption::Superspreader { eps, node, ref dx } = cfg.corruption else {
        unreachable!()
    };
    let truth = draw_truth(rng, cfg.n, cfg.m)?;
    let topo = generate_er_graph(rng, cfg.n, cfg.p, true)?.topology().clone();
    if topo.degree(node) == 0 {
        return Err(Error::Generation(format!("superspreader node {node} is isolated")));
    }
    let mut blocks: Vec<Permutation> = topo
        .edges()
        .iter()
        .map(|&(i, j)| truth[i].compose_transpose(&truth[j]))
        .collect();
    for &(j, e) in topo.neighbors(node) {
        if !rng.gen_bool(1.0 - eps) {
            continue;
        }
        let block = dx.sample(rng, cfg.m, &truth[node], &truth[j])?;
        blocks[e] = store(&topo, e, node, block);
    }
    flag_corrupted(BlockMeasurement::new(topo, cfg.m, blocks)?, truth)
}

/// Picks `nc` nodes without replacement and `mc` incident edges of each.
/// Returns, per corrupted edge, the node that selected it first.
fn select_local_edges(
    topo: &Topology,
    nc: usize,
    mc: usize,
    rng: &mut SeededRng,
) -> Result<Vec<Option<usize>>> {
    let mut owner = vec![None; topo.num_edges()];
    for c in index::sample(rng, topo.n(), nc).into_iter() {
        let nbrs = topo.neighbors(c);
        if mc > nbrs.len() {
            return Err(Error::Generation(format!(
                "node {c} has degree {} < mc = {mc}",
                nbrs.len()
            )));
        }
        for k in index::sample(rng, nbrs.len(), mc).into_iter() {
            let e = nbrs[k].1;
            owner[e].get_or_insert(c);
        }
    }
    Ok(owner)
}

/// Locally biased corruption: corrupted blocks follow a second, self-consistent
/// set of permutations wherever that disagrees almost everywhere with the truth.
pub fn generate_lbc(cfg: &ModelConfig, rng: &mut SeededRng) -> Result<ProblemInstance> {
    expect_kind(cfg, ModelKind::Lbc)?;
    let Corruption::Lbc { nc, mc } = cfg.corruption else {
        unreachable!()
    };
    let truth = draw_truth(rng, cfg.n, cfg.m)?;
    let topo = generate_er_graph(rng, cfg.n, cfg.p, true)?.topology().clone();
    let owner = select_local_edges(&topo, nc, mc, rng)?;
    let fake = draw_truth(rng, cfg.n, cfg.m)?;
    let mut blocks = Vec::with_capacity(topo.num_edges());
    for (e, &(i, j)) in topo.edges().iter().enumerate() {
        let star = truth[i].compose_transpose(&truth[j]);
        if owner[e].is_none() {
            blocks.push(star);
            continue;
        }
        let cand = fake[i].compose_transpose(&fake[j]);
        if cand.agreement_unchecked(&star) <= 1 {
            blocks.push(cand);
        } else {
            blocks.push(sample_haar_permutation(rng, cfg.m)?);
        }
    }
    flag_corrupted(BlockMeasurement::new(topo, cfg.m, blocks)?, truth)
}

/// Locally adversarial corruption: the block out of the corrupted node `c`
/// towards `j` is `Q · P*_jᵀ` for a random 3-cycle `Q`.
pub fn generate_lac(cfg: &ModelConfig, rng: &mut SeededRng) -> Result<ProblemInstance> {
    expect_kind(cfg, ModelKind::Lac)?;
    let Corruption::Lac { nc, mc } = cfg.corruption else {
        unreachable!()
    };
    let truth = draw_truth(rng, cfg.n, cfg.m)?;
    let topo = generate_er_graph(rng, cfg.n, cfg.p, true)?.topology().clone();
    let owner = select_local_edges(&topo, nc, mc, rng)?;
    let mut blocks = Vec::with_capacity(topo.num_edges());
    for (e, &(i, j)) in topo.edges().iter().enumerate() {
        match owner[e] {
            None => blocks.push(truth[i].compose_transpose(&truth[j])),
            Some(c) => {
                let other = if c == i { j } else { i };
                let block = sample_three_cycle(rng, cfg.m)?.compose_transpose(&truth[other]);
                blocks.push(store(&topo, e, c, block));
            }
        }
    }
    flag_corrupted(BlockMeasurement::new(topo, cfg.m, blocks)?, truth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded_rng;

    fn binomial_within_3sigma(count: usize, trials: usize, p: f64) -> bool {
        let mean = trials as f64 * p;
        let sd = (trials as f64 * p * (1.0 - p)).sqrt();
        (count as f64 - mean).abs() <= 3.0 * sd
    }

    #[test]
    fn haar_m1_and_frequencies() {
        let mut rng = seeded_rng(1, 0);
        assert!(sample_haar_permutation(&mut rng, 1).unwrap().is_identity());
        assert!(sample_haar_permutation(&mut rng, 0).is_err());
        let mut counts = std::collections::BTreeMap::new();
        let draws = 60_000;
        for _ in 0..draws {
            *counts.entry(sample_haar_permutation(&mut rng, 3).unwrap()).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 6);
        for c in counts.values() {
            assert!((*c as f64 / draws as f64 - 1.0 / 6.0).abs() < 0.01);
        }
    }

    #[test]
    fn haar_mean_affinity_is_one_over_m() {
        let mut rng = seeded_rng(2, 0);
        let fixed = Permutation::from_map(vec![3, 1, 4, 0, 2]).unwrap();
        let draws = 40_000;
        let total: usize = (0..draws)
            .map(|_| sample_haar_permutation(&mut rng, 5).unwrap().agreement(&fixed).unwrap())
            .sum();
        // Fixed points of a uniform permutation have mean 1 and variance 1.
        let mean = total as f64 / draws as f64;
        assert!((mean - 1.0).abs() < 4.0 / (draws as f64).sqrt());
    }

    #[test]
    fn er_graph_statistics() {
        let mut rng = seeded_rng(3, 0);
        let g = generate_er_graph(&mut rng, 10, 1.0, true).unwrap();
        assert_eq!(g.topology().num_edges(), 45);
        let g = generate_er_graph(&mut rng, 2, 1.0, true).unwrap();
        assert_eq!(g.topology().edges(), &[(0, 1)]);
        for _ in 0..5 {
            let g = generate_er_graph(&mut rng, 100, 0.5, false).unwrap();
            assert!(binomial_within_3sigma(g.topology().num_edges(), 4950, 0.5));
        }
        assert!(generate_er_graph(&mut rng, 50, 0.001, true).is_err());
    }

    #[test]
    fn uniform_extremes_and_rate() {
        let mut rng = seeded_rng(4, 0);
        let inst = generate_uniform(&ModelConfig::uniform(10, 4, 1.0, 0.0), &mut rng).unwrap();
        assert_eq!(inst.num_bad(), Some(0));
        for e in 0..inst.topology().num_edges() {
            assert_eq!(inst.measurement().edge_block(e), &inst.true_block(e).unwrap());
        }
        let inst = generate_uniform(&ModelConfig::uniform(10, 4, 1.0, 1.0), &mut rng).unwrap();
        // A Haar redraw equals the truth with probability 1/4!, and such edges count as good.
        let redraw_differs = 23.0 / 24.0;
        assert!(binomial_within_3sigma(inst.num_bad().unwrap(), 45, redraw_differs));
        let inst = generate_uniform(&ModelConfig::uniform(20, 4, 1.0, 0.5), &mut rng).unwrap();
        assert!(binomial_within_3sigma(inst.num_bad().unwrap(), 190, 0.5 * redraw_differs));
    }

    #[test]
    fn superspreader_corrupts_only_its_edges() {
        let mut rng = seeded_rng(5, 0);
        let cfg = ModelConfig::superspreader(30, 5, 0.6, 0.4, DxSampler::Haar);
        let inst = generate_superspreader(&cfg, &mut rng).unwrap();
        for (e, &(i, _)) in inst.topology().edges().iter().enumerate() {
            if inst.bad_edges().unwrap()[e] {
                assert_eq!(i, 0);
            }
        }
        let clean = ModelConfig::superspreader(30, 5, 0.6, 1.0, DxSampler::Haar);
        assert_eq!(generate(&clean, &mut rng).unwrap().num_bad(), Some(0));

        let cfg = ModelConfig::superspreader(200, 10, 1.0, 0.3, DxSampler::Lac);
        let inst = generate(&cfg, &mut rng).unwrap();
        let good = 199 - inst.num_bad().unwrap();
        assert!((good as f64) >= 0.5 * 199.0 * 0.3 && (good as f64) <= 2.0 * 199.0 * 0.3);
    }

    #[test]
    fn superspreader_three_cycle_samplers() {
        let mut rng = seeded_rng(6, 0);
        for dx in [DxSampler::Lac, DxSampler::LacRelative] {
            let cfg = ModelConfig::superspreader(40, 10, 1.0, 0.3, dx.clone());
            let inst = generate(&cfg, &mut rng).unwrap();
            let truth = inst.truth().unwrap();
            for (e, &(i, j)) in inst.topology().edges().iter().enumerate() {
                if !inst.bad_edges().unwrap()[e] {
                    continue;
                }
                let x = inst.measurement().block(i, j).unwrap();
                let moved = x.compose(&truth[j]).unwrap();
                match dx {
                    DxSampler::Lac => assert_eq!(moved.fixed_points(), 7),
                    _ => assert_eq!(x.agreement(&inst.true_block(e).unwrap()).unwrap(), 7),
                }
            }
        }
    }

    #[test]
    fn lbc_examples() {
        let mut rng = seeded_rng(7, 0);
        let inst = generate(&ModelConfig::lbc(20, 6, 1.0, 0, 5), &mut rng).unwrap();
        assert_eq!(inst.num_bad(), Some(0));
        let inst = generate(&ModelConfig::lbc(100, 10, 1.0, 1, 90), &mut rng).unwrap();
        assert_eq!(inst.num_bad(), Some(90));
        let inst = generate(&ModelConfig::lbc(60, 10, 1.0, 4, 40), &mut rng).unwrap();
        assert!(inst.num_bad().unwrap() <= 160);
        assert!(generate(&ModelConfig::lbc(30, 6, 0.2, 3, 25), &mut rng).is_err());
    }

    #[test]
    fn lac_blocks_move_three_columns() {
        let mut rng = seeded_rng(8, 0);
        let inst = generate(&ModelConfig::lac(50, 10, 1.0, 4, 30), &mut rng).unwrap();
        let truth = inst.truth().unwrap();
        let mut diag = 0usize;
        let mut count = 0usize;
        for (e, &(i, j)) in inst.topology().edges().iter().enumerate() {
            if !inst.bad_edges().unwrap()[e] {
                continue;
            }
            // One endpoint selected the edge; the block out of it is a 3-cycle times P*ᵀ.
            let out_i = inst.measurement().block(i, j).unwrap().compose(&truth[j]).unwrap();
            let out_j = inst.measurement().block(j, i).unwrap().compose(&truth[i]).unwrap();
            assert!(out_i.fixed_points() == 7 || out_j.fixed_points() == 7);
            diag += out_i.fixed_points().max(out_j.fixed_points());
            count += 1;
        }
        assert!(count > 0);
        assert_eq!(diag, 7 * count);
        assert!(ModelConfig::lac(10, 2, 1.0, 1, 3).validate().is_err());
    }

    #[test]
    fn three_cycle_moment_statistics() {
        // E[Q](r,r) = (m−3)/m and off-diagonal 3/(m(m−1)).
        let mut rng = seeded_rng(9, 0);
        let m = 10;
        let draws = 50_000;
        let mut diag = 0usize;
        let mut off01 = 0usize;
        for _ in 0..draws {
            let q = sample_three_cycle(&mut rng, m).unwrap();
            diag += q.fixed_points();
            off01 += (q.image(0) == 1) as usize;
        }
        let diag_mean = diag as f64 / (draws * m) as f64;
        assert!((diag_mean - 0.7).abs() < 0.005);
        let p_off = 3.0 / (m * (m - 1)) as f64;
        assert!(binomial_within_3sigma(off01, draws, p_off));
    }

    #[test]
    fn generation_is_deterministic() {
        let cfg = ModelConfig::lac(40, 6, 0.5, 3, 8);
        let a = generate(&cfg, &mut seeded_rng(11, 4)).unwrap();
        let b = generate(&cfg, &mut seeded_rng(11, 4)).unwrap();
        assert_eq!(a, b);
    }
}
