use std::sync::Arc;

use super::ProblemInstance;
use crate::error::{Error, Result};
use crate::graph::Topology;
use crate::measurement::BlockMeasurement;

/// A subproblem together with the original index of every kept node.
#[derive(Clone, Debug)]
pub struct FilteredInstance {
    pub instance: ProblemInstance,
    /// `kept[new] = old`.
    pub kept: Vec<usize>,
}

/// Drops every node whose incident edges are all flagged bad and returns the
/// induced subproblem. `bad` overrides the instance's own flags when given.
pub fn well_posedness_filter(
    inst: &ProblemInstance,
    bad: Option<&[bool]>,
) -> Result<FilteredInstance> {
    let topo = inst.topology();
    let flags = match bad.or(inst.bad_edges()) {
        Some(f) if f.len() == topo.num_edges() => f,
        Some(f) => {
            return Err(Error::SizeMismatch {
                expected: topo.num_edges(),
                got: f.len(),
            })
        }
        None => return Err(Error::input("bad-edge flags are required to filter")),
    };
    let kept: Vec<usize> = (0..topo.n())
        .filter(|&i| topo.neighbors(i).iter().any(|&(_, e)| !flags[e]))
        .collect();
    if kept.is_empty() {
        return Err(Error::EmptyEdgeSet);
    }
    let mut new_index = vec![usize::MAX; topo.n()];
    for (k, &i) in kept.iter().enumerate() {
        new_index[i] = k;
    }

    let mut old_edges = Vec::new();
    let mut new_edges = Vec::new();
    for (e, &(i, j)) in topo.edges().iter().enumerate() {
        if new_index[i] != usize::MAX && new_index[j] != usize::MAX {
            old_edges.push(e);
            new_edges.push((new_index[i], new_index[j]));
        }
    }
    let sub = Arc::new(Topology::new(kept.len(), new_edges)?);
    if !sub.is_connected() {
        return Err(Error::Disconnected);
    }
    // Relabeling preserves the order of endpoints, so edge ids line up.
    let blocks = old_edges
        .iter()
        .map(|&e| inst.measurement().edge_block(e).clone())
        .collect();
    let meas = BlockMeasurement::new(sub, inst.m(), blocks)?;
    let truth = inst
        .truth()
        .map(|t| kept.iter().map(|&i| t[i].clone()).collect());
    let sub_bad = Some(old_edges.iter().map(|&e| flags[e]).collect());
    let instance = ProblemInstance::new(meas, truth, sub_bad)?;
    Ok(FilteredInstance { instance, kept })
}
