use super::spectral::power_update;
use super::{SolverConfig, SolverReport, Tracker};
use crate::error::{Error, Result};
use crate::measurement::BlockMeasurement;
use crate::models::ProblemInstance;
use crate::perm::{project_to_permutation, Permutation, SquareBlock};

/// Projected power method: `P_i ← Proj(P_i + Σ_j X̃_ij P_j)` with synchronous
/// updates, from `init` or from the spectral estimate.
pub fn ppm_solve(
    inst: &ProblemInstance,
    init: Option<&[Permutation]>,
    cfg: &SolverConfig,
) -> Result<SolverReport> {
    let mut tracker = Tracker::start();
    let meas = inst.measurement();
    let w = inst.graph();
    let mut cur = match init {
        Some(p) => {
            meas.check_estimate(p)?;
            p.to_vec()
        }
        None => super::wls_spectral_step(meas, &w, &cfg.eigen)?,
    };
    let t_max = cfg.schedule.t_max;
    for t in 1..=t_max {
        let next = power_update(meas, &w, &cur, 1.0)?;
        tracker.record(&cur, &next, None);
        if next == cur {
            return Ok(tracker.finish(next, t, true));
        }
        cur = next;
    }
    Ok(tracker.finish(cur, t_max, false))
}

/// One projected power update at node `i` alone, self term included, without
/// gauge fixing.
pub fn ppm_node_update(
    meas: &BlockMeasurement,
    i: usize,
    current: &[Permutation],
) -> Result<Permutation> {
    meas.check_estimate(current)?;
    if i >= meas.n() {
        return Err(Error::input(format!("node {i} out of range")));
    }
    let m = meas.m();
    let mut score = SquareBlock::from_permutation(&current[i]);
    for &(j, e) in meas.topology().neighbors(i) {
        let x = meas.oriented(e, i).map();
        let pj = current[j].map();
        for r in 0..m {
            score.0[(r, pj[x[r]])] += 1.0;
        }
    }
    project_to_permutation(&score)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{generate, ModelConfig};
    use crate::rng::seeded_rng;

    #[test]
    fn truth_is_a_fixed_point() {
        let inst = generate(&ModelConfig::uniform(15, 5, 0.8, 0.0), &mut seeded_rng(1, 0)).unwrap();
        let mut truth = inst.truth().unwrap().to_vec();
        super::super::fix_gauge(&mut truth);
        let rep = ppm_solve(&inst, Some(&truth), &SolverConfig::default()).unwrap();
        assert!(rep.converged);
        assert_eq!(rep.iterations, 1);
        assert_eq!(rep.estimate, truth);
    }

    #[test]
    fn node_update_matches_full_update() {
        let inst = generate(&ModelConfig::uniform(12, 4, 1.0, 0.4), &mut seeded_rng(2, 0)).unwrap();
        let truth = inst.truth().unwrap();
        let w = inst.graph();
        let full = power_update(inst.measurement(), &w, truth, 1.0).unwrap();
        for i in 0..12 {
            let single = ppm_node_update(inst.measurement(), i, truth).unwrap();
            // The full update is gauge-fixed by node 0's new value.
            let g = ppm_node_update(inst.measurement(), 0, truth).unwrap();
            assert_eq!(single.compose(&g.transpose()).unwrap(), full[i]);
        }
    }
}
