use super::Schedule;
use crate::error::{Error, Result};
use crate::graph::{AffinityMatrix, WeightedGraph};
use crate::measurement::{build_gcw, squared_gcw_ratio, BlockMeasurement, TriangleTable};

/// How walk-averaged affinities are evaluated.
pub enum AffinityRoute {
    /// Length-2 walks through precomputed triangles.
    Triangles(TriangleTable),
    /// Level-by-level walk extension for any length.
    Walks(usize),
}

impl AffinityRoute {
    pub fn new(meas: &BlockMeasurement, l: usize) -> Result<Self> {
        match l {
            0 | 1 => Err(Error::input(format!("walk length must be at least 2, got {l}"))),
            2 => Ok(AffinityRoute::Triangles(TriangleTable::new(meas))),
            l => Ok(AffinityRoute::Walks(l)),
        }
    }

    /// `⟨S^l[i,j] / W^l(i,j), X̃_ij⟩ / m` with `fallback(e)` where no walk exists.
    pub fn affinity(
        &self,
        meas: &BlockMeasurement,
        w: &WeightedGraph,
        fallback: impl Fn(usize) -> f64,
    ) -> Result<AffinityMatrix> {
        match self {
            AffinityRoute::Triangles(t) => Ok(t.affinity(w, fallback)),
            AffinityRoute::Walks(l) => {
                let op = build_gcw(w, meas)?;
                Ok(squared_gcw_ratio(&op, *l)?.affinity(meas, fallback))
            }
        }
    }
}

/// Affinities `A_0, …, A_{t₀}` of the reweighted cycle-consistency iteration:
/// `W ← 1_E`, then repeatedly `A_t = affinity(W)`, `W ← exp(β_t A_t)`.
pub fn cemp_trace(
    meas: &BlockMeasurement,
    schedule: &Schedule,
    l: usize,
    fallback: f64,
) -> Result<Vec<AffinityMatrix>> {
    let route = AffinityRoute::new(meas, l)?;
    cemp_trace_with(&route, meas, schedule, fallback)
}

pub(crate) fn cemp_trace_with(
    route: &AffinityRoute,
    meas: &BlockMeasurement,
    schedule: &Schedule,
    fallback: f64,
) -> Result<Vec<AffinityMatrix>> {
    if !(0.0..=1.0).contains(&fallback) {
        return Err(Error::input(format!("fallback affinity {fallback} outside [0, 1]")));
    }
    let mut w = WeightedGraph::adjacency(meas.topology().clone());
    let mut out = Vec::with_capacity(schedule.t0 + 1);
    for t in 0..=schedule.t0 {
        let a = route.affinity(meas, &w, |_| fallback)?;
        w = a.exp_weights(schedule.beta.at(t));
        out.push(a);
    }
    Ok(out)
}

/// Final affinity `A_{t₀}` of [`cemp_trace`].
pub fn cemp_init(
    meas: &BlockMeasurement,
    schedule: &Schedule,
    l: usize,
    fallback: f64,
) -> Result<AffinityMatrix> {
    Ok(cemp_trace(meas, schedule, l, fallback)?
        .pop()
        .expect("trace holds t0 + 1 entries"))
}
