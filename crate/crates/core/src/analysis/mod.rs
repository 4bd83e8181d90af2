//! Error metrics, ground-truth affinities and empirical checks of the
//! recovery guarantees.

mod checks;
mod oracle;
pub mod suites;

pub use checks::{
    theorem_bound, verify_ppm_failure, verify_prop31, verify_theorem52, PpmFailureCheck,
    PpmFailureParams, PpmTrial, Prop31Check, TheoremCheck, TheoremParams,
};
pub use oracle::{cemp_message_passing_oracle, DEFAULT_CYCLE_CAP};

use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{AffinityMatrix, Topology};
use crate::models::ProblemInstance;
use crate::perm::Permutation;

/// Pairs over which the relative error is averaged.
#[derive(Clone, Copy, Debug)]
pub enum EdgeSet<'a> {
    /// Every unordered pair `i < j`, measured or not.
    AllPairs,
    /// Measured edges flagged `true`.
    BadEdges(&'a [bool]),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeSetTag {
    AllPairs,
    BadEdges,
}

impl fmt::Display for EdgeSetTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeSetTag::AllPairs => "all_pairs",
            EdgeSetTag::BadEdges => "bad_edges",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorReport {
    /// `Σ ‖X̂_ij − X*_ij‖² / Σ ‖X*_ij‖²` over the chosen pairs.
    pub error: f64,
    pub set: EdgeSetTag,
    pub pairs: usize,
    /// `histogram[k]`: pairs whose estimate disagrees with the truth in `k` rows.
    pub histogram: Vec<usize>,
}

/// Relative error of `X̂_ij = P̂_i P̂_jᵀ` against `X*_ij = P*_i P*_jᵀ`.
pub fn relative_error(
    estimate: &[Permutation],
    truth: &[Permutation],
    topo: &Topology,
    set: EdgeSet<'_>,
) -> Result<ErrorReport> {
    if estimate.len() != truth.len() || truth.len() != topo.n() {
        return Err(Error::SizeMismatch {
            expected: topo.n(),
            got: estimate.len().min(truth.len()),
        });
    }
    let m = truth.first().map_or(0, Permutation::size);
    if estimate.iter().chain(truth).any(|p| p.size() != m) {
        return Err(Error::input("permutations differ in size"));
    }
    let est_inv: Vec<Permutation> = estimate.iter().map(Permutation::transpose).collect();
    let tru_inv: Vec<Permutation> = truth.iter().map(Permutation::transpose).collect();
    let disagreement = |i: usize, j: usize| -> usize {
        let (pi, qi) = (estimate[i].map(), truth[i].map());
        (0..m)
            .filter(|&r| est_inv[j].image(pi[r]) != tru_inv[j].image(qi[r]))
            .count()
    };

    let (tag, pairs): (EdgeSetTag, Vec<(usize, usize)>) = match set {
        EdgeSet::AllPairs => {
            let n = topo.n();
            (
                EdgeSetTag::AllPairs,
                (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect(),
            )
        }
        EdgeSet::BadEdges(flags) => {
            if flags.len() != topo.num_edges() {
                return Err(Error::SizeMismatch {
                    expected: topo.num_edges(),
                    got: flags.len(),
                });
            }
            (
                EdgeSetTag::BadEdges,
                topo.edges()
                    .iter()
                    .zip(flags)
                    .filter(|(_, b)| **b)
                    .map(|(e, _)| *e)
                    .collect(),
            )
        }
    };
    if pairs.is_empty() {
        return Err(Error::EmptyEdgeSet);
    }
    let mut histogram = vec![0usize; m + 1];
    let mut total = 0usize;
    for &(i, j) in &pairs {
        let k = disagreement(i, j);
        histogram[k] += 1;
        total += 2 * k;
    }
    Ok(ErrorReport {
        error: total as f64 / (m * pairs.len()) as f64,
        set: tag,
        pairs: pairs.len(),
        histogram,
    })
}

/// Error over the corrupted edges when there are any, otherwise over all pairs.
pub fn instance_error(inst: &ProblemInstance, estimate: &[Permutation], set: EdgeSetTag) -> Result<ErrorReport> {
    let truth = inst.truth().ok_or(Error::TruthAbsent)?;
    let set = match set {
        EdgeSetTag::AllPairs => EdgeSet::AllPairs,
        EdgeSetTag::BadEdges => match inst.bad_edges() {
            Some(b) if b.iter().any(|x| *x) => EdgeSet::BadEdges(b),
            _ => EdgeSet::AllPairs,
        },
    };
    relative_error(estimate, truth, inst.topology(), set)
}

/// `A*(i,j) = ⟨X̃_ij, X*_ij⟩ / m` on every edge.
pub fn ground_truth_affinity(inst: &ProblemInstance) -> Result<AffinityMatrix> {
    let m = inst.m() as f64;
    let values = (0..inst.topology().num_edges())
        .map(|e| {
            let star = inst.true_block(e)?;
            Ok(inst.measurement().edge_block(e).agreement_unchecked(&star) as f64 / m)
        })
        .collect::<Result<Vec<f64>>>()?;
    AffinityMatrix::new(inst.topology().clone(), values)
}

/// Triangle counts through an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CycleCounts {
    pub total: usize,
    /// Triangles whose two other edges are both uncorrupted.
    pub good: usize,
    pub bad: usize,
}

pub fn cycle_stats(inst: &ProblemInstance) -> Result<Vec<CycleCounts>> {
    let flags = inst.bad_edges().ok_or(Error::TruthAbsent)?;
    let topo = inst.topology();
    Ok((0..topo.num_edges())
        .map(|e| {
            let common = topo.common_neighbors(e);
            let good = common
                .iter()
                .filter(|&&(_, ik, kj)| !flags[ik] && !flags[kj])
                .count();
            CycleCounts {
                total: common.len(),
                good,
                bad: common.len() - good,
            }
        })
        .collect())
}
