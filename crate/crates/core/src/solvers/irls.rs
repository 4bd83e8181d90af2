use super::irgcl::Variant;
use super::{wls_power_step, wls_spectral_step, SolverConfig, SolverReport, Tracker};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::models::ProblemInstance;

/// Scale `c` in the Cauchy weight `1 / (1 + (r/c)²)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CauchyScale {
    /// Median of the nonzero residuals at each iteration.
    MedianResidual,
    Fixed(f64),
}

/// Iteratively reweighted least squares with weights `1 / max(r_ij, δ)` and a
/// spectral solve per iteration.
pub fn irls_l1_solve(inst: &ProblemInstance, delta: f64, cfg: &SolverConfig) -> Result<SolverReport> {
    if !(delta > 0.0) {
        return Err(Error::input(format!("delta must be positive, got {delta}")));
    }
    irls(inst, cfg, Variant::S, |r| {
        Ok(r.iter().map(|r| 1.0 / r.max(delta)).collect())
    })
}

/// Iteratively reweighted least squares with Cauchy weights; the inner solve is
/// a spectral step (`S`) or a weighted power step (`P`).
pub fn irls_cauchy_solve(
    inst: &ProblemInstance,
    variant: Variant,
    scale: CauchyScale,
    cfg: &SolverConfig,
) -> Result<SolverReport> {
    irls(inst, cfg, variant, |r| {
        let c = match scale {
            CauchyScale::Fixed(c) if c > 0.0 => c,
            CauchyScale::Fixed(c) => return Err(Error::input(format!("Cauchy scale must be positive, got {c}"))),
            CauchyScale::MedianResidual => match median_nonzero(r) {
                Some(c) => c,
                None => return Ok(vec![1.0; r.len()]),
            },
        };
        Ok(r.iter().map(|r| 1.0 / (1.0 + (r / c).powi(2))).collect())
    })
}

fn median_nonzero(values: &[f64]) -> Option<f64> {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| *x > 0.0).collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let k = v.len();
    Some(if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    })
}

fn irls(
    inst: &ProblemInstance,
    cfg: &SolverConfig,
    variant: Variant,
    weigh: impl Fn(&[f64]) -> Result<Vec<f64>>,
) -> Result<SolverReport> {
    let mut tracker = Tracker::start();
    let meas = inst.measurement();
    let mut cur = wls_spectral_step(meas, &inst.graph(), &cfg.eigen)?;
    let t_max = cfg.schedule.t_max;
    for t in 1..=t_max {
        let residuals = meas.residuals(&cur)?;
        let w = WeightedGraph::new(inst.topology().clone(), weigh(&residuals)?)?;
        let next = match variant {
            Variant::S => wls_spectral_step(meas, &w, &cfg.eigen)?,
            Variant::P => wls_power_step(meas, &w, &cur)?,
        };
        tracker.record(&cur, &next, None);
        if next == cur {
            return Ok(tracker.finish(next, t, true));
        }
        cur = next;
    }
    Ok(tracker.finish(cur, t_max, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{relative_error, EdgeSet};
    use crate::models::{generate, ModelConfig};
    use crate::rng::seeded_rng;

    #[test]
    fn median_of_nonzero_values() {
        assert_eq!(median_nonzero(&[0.0, 2.0, 4.0, 0.0, 3.0]), Some(3.0));
        assert_eq!(median_nonzero(&[2.0, 4.0]), Some(3.0));
        assert_eq!(median_nonzero(&[0.0, 0.0]), None);
    }

    #[test]
    fn noiseless_converges_to_truth() {
        let inst = generate(&ModelConfig::uniform(20, 5, 0.7, 0.0), &mut seeded_rng(1, 0)).unwrap();
        let cfg = SolverConfig::default();
        for rep in [
            irls_l1_solve(&inst, 1e-8, &cfg).unwrap(),
            irls_cauchy_solve(&inst, Variant::S, CauchyScale::MedianResidual, &cfg).unwrap(),
            irls_cauchy_solve(&inst, Variant::P, CauchyScale::MedianResidual, &cfg).unwrap(),
        ] {
            assert!(rep.converged);
            let err = relative_error(&rep.estimate, inst.truth().unwrap(), inst.topology(), EdgeSet::AllPairs)
                .unwrap();
            assert_eq!(err.error, 0.0);
        }
        assert!(irls_l1_solve(&inst, 0.0, &cfg).is_err());
    }
}
