use nalgebra::DMatrix;

use super::{fix_gauge, SolverReport, Tracker};
use crate::eigen::{top_eigenpairs, EigenConfig, NormalizedGcw};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::measurement::BlockMeasurement;
use crate::models::ProblemInstance;
use crate::perm::{project_to_permutation, Permutation, SquareBlock};

/// Spectral relaxation with weights `w`: top `m` eigenvectors of
/// `D^{-1/2} S D^{-1/2}`, rescaled by `D^{-1/2}` and rounded blockwise against
/// the node of largest weighted degree.
pub fn wls_spectral_step(
    meas: &BlockMeasurement,
    w: &WeightedGraph,
    eig: &EigenConfig,
) -> Result<Vec<Permutation>> {
    let op = NormalizedGcw::new(w, meas)?;
    let m = meas.m();
    let pairs = top_eigenpairs(&op, m, eig)?;
    let degrees = w.degrees();
    let anchor = degrees
        .iter()
        .enumerate()
        .fold(0, |best, (i, d)| if *d > degrees[best] { i } else { best });

    let scale = op.scale();
    let v = &pairs.vectors;
    let node_block = |i: usize| -> DMatrix<f64> { v.rows(i * m, m) * scale[i] };
    let vr = node_block(anchor);
    let mut estimate = Vec::with_capacity(meas.n());
    for i in 0..meas.n() {
        let score = node_block(i) * vr.transpose();
        estimate.push(project_to_permutation(&SquareBlock(score))?);
    }
    fix_gauge(&mut estimate);
    Ok(estimate)
}

/// `P_i ← Proj(Σ_j w_ij X̃_ij P_j)`; nodes whose incident weights are all zero
/// keep their current estimate.
pub fn wls_power_step(
    meas: &BlockMeasurement,
    w: &WeightedGraph,
    current: &[Permutation],
) -> Result<Vec<Permutation>> {
    power_update(meas, w, current, 0.0)
}

/// Shared by the weighted power step and the projected power method, which adds
/// `self_weight · P_i` to every node's sum.
pub(super) fn power_update(
    meas: &BlockMeasurement,
    w: &WeightedGraph,
    current: &[Permutation],
    self_weight: f64,
) -> Result<Vec<Permutation>> {
    meas.check_estimate(current)?;
    if w.topology().as_ref() != meas.topology().as_ref() {
        return Err(Error::Shape("weights and measurements are on different edge sets".into()));
    }
    let topo = meas.topology();
    let m = meas.m();
    let mut next = Vec::with_capacity(meas.n());
    for i in 0..meas.n() {
        let mut score = SquareBlock::zeros(m);
        let mut total = 0.0;
        for &(j, e) in topo.neighbors(i) {
            let we = w.weight(e);
            if we == 0.0 {
                continue;
            }
            total += we;
            let x = meas.oriented(e, i).map();
            let pj = current[j].map();
            for r in 0..m {
                score.0[(r, pj[x[r]])] += we;
            }
        }
        if self_weight != 0.0 {
            score.add_permutation(&current[i], self_weight);
            total += self_weight;
        }
        if total == 0.0 {
            next.push(current[i].clone());
        } else {
            next.push(project_to_permutation(&score)?);
        }
    }
    fix_gauge(&mut next);
    Ok(next)
}

/// Spectral method on the adjacency, or on `weights` if given.
pub fn spectral_solve(
    inst: &ProblemInstance,
    weights: Option<&WeightedGraph>,
    eig: &EigenConfig,
) -> Result<SolverReport> {
    let tracker = Tracker::start();
    let adjacency;
    let w = match weights {
        Some(w) => w,
        None => {
            adjacency = inst.graph();
            &adjacency
        }
    };
    let estimate = wls_spectral_step(inst.measurement(), w, eig)?;
    Ok(tracker.finish(estimate, 1, true))
}
