use super::cemp::{cemp_trace_with, AffinityRoute};
use super::{wls_power_step, wls_spectral_step, SolverConfig, SolverReport, Tracker};
use crate::error::Result;
use crate::graph::AffinityMatrix;
use crate::measurement::TriangleTable;
use crate::models::ProblemInstance;
use crate::perm::Permutation;

/// Inner least-squares solver: spectral relaxation (`S`) or weighted power step (`P`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    S,
    P,
}

const CEMP_FALLBACK: f64 = 0.5;

fn initial_estimate(inst: &ProblemInstance, cfg: &SolverConfig) -> Result<(Vec<Permutation>, u64)> {
    let meas = inst.measurement();
    let route = AffinityRoute::new(meas, cfg.cycle_len)?;
    let a0 = cemp_trace_with(&route, meas, &cfg.schedule, CEMP_FALLBACK)?
        .pop()
        .expect("trace holds t0 + 1 entries");
    let w0 = cfg.schedule.reweight.apply(&a0);
    Ok((wls_spectral_step(meas, &w0, &cfg.eigen)?, a0.fingerprint()))
}

/// The estimate `P_(1)`: cycle-consistency affinities followed by one weighted
/// spectral solve.
pub fn irgcl_init_solve(inst: &ProblemInstance, cfg: &SolverConfig) -> Result<SolverReport> {
    let mut tracker = Tracker::start();
    let (p1, hash) = initial_estimate(inst, cfg)?;
    tracker.record(&p1, &p1, Some(hash));
    Ok(tracker.finish(p1, 1, true))
}

/// Iteratively reweighted graph-connection-Laplacian solver.
///
/// Starting from [`irgcl_init_solve`], each iteration mixes the first-order
/// affinity `A₁ = ⟨P_i P_jᵀ, X̃_ij⟩/m` with the triangle-averaged affinity `A₂`
/// computed under weights `exp(α_t A₁)`, as `(1 − λ_t) A₁ + λ_t A₂`, and solves
/// the weighted least-squares problem it defines. Stops when the estimate no
/// longer changes.
pub fn irgcl_solve(inst: &ProblemInstance, variant: Variant, cfg: &SolverConfig) -> Result<SolverReport> {
    let mut tracker = Tracker::start();
    let meas = inst.measurement();
    let s = &cfg.schedule;
    let (mut cur, _) = initial_estimate(inst, cfg)?;
    let triangles = TriangleTable::new(meas);
    for t in 1..=s.t_max {
        let a1 = meas.residual_affinity(&cur)?;
        let w1 = a1.exp_weights(s.alpha.at(t));
        let a2 = triangles.affinity(&w1, |e| a1.value(e));
        let lambda = s.lambda.at(t);
        let mixed: Vec<f64> = a1
            .values()
            .iter()
            .zip(a2.values())
            .map(|(x, y)| (1.0 - lambda) * x + lambda * y)
            .collect();
        let a = AffinityMatrix::from_clamped(inst.topology().clone(), mixed);
        let w = s.reweight.apply(&a);
        let next = match variant {
            Variant::S => wls_spectral_step(meas, &w, &cfg.eigen)?,
            Variant::P => wls_power_step(meas, &w, &cur)?,
        };
        tracker.record(&cur, &next, Some(a.fingerprint()));
        if next == cur {
            return Ok(tracker.finish(next, t, true));
        }
        cur = next;
    }
    Ok(tracker.finish(cur, s.t_max, false))
}
