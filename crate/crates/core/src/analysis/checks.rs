use rayon::prelude::*;

use super::ground_truth_affinity;
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::measurement::{build_gcw, squared_gcw_ratio};
use crate::models::{generate, sample_haar_permutation, DxSampler, ModelConfig, ProblemInstance};
use crate::perm::{Permutation, SquareBlock};
use crate::rng::{mix, seeded_rng};
use crate::solvers::{cemp_trace, ppm_node_update, Schedule, Sequence};

/// Walk-ratio exactness under good-edge indicator weights.
#[derive(Clone, Debug, PartialEq)]
pub struct Prop31Check {
    /// Edges with at least one all-good walk, compared against the truth.
    pub checked: usize,
    /// Edges without such a walk.
    pub skipped: usize,
    pub max_deviation: f64,
    pub pass: bool,
}

impl Prop31Check {
    /// No edge carries an all-good walk, so nothing was checked.
    pub fn vacuous(&self) -> bool {
        self.checked == 0
    }
}

/// With `W = 1_{E_g}`, checks `S^l[i,j] / W^l(i,j) = X*_ij` on every edge that
/// has an all-good walk of length `l`.
pub fn verify_prop31(inst: &ProblemInstance, l: usize, tol: f64) -> Result<Prop31Check> {
    let flags = inst.bad_edges().ok_or(Error::TruthAbsent)?;
    inst.truth().ok_or(Error::TruthAbsent)?;
    let w = WeightedGraph::from_fn(inst.topology().clone(), |e| if flags[e] { 0.0 } else { 1.0 })?;
    let ratio = squared_gcw_ratio(&build_gcw(&w, inst.measurement())?, l)?;
    let (mut checked, mut skipped, mut worst) = (0, 0, 0.0f64);
    for e in 0..inst.topology().num_edges() {
        match ratio.block(e) {
            Some(b) => {
                let star = SquareBlock::from_permutation(&inst.true_block(e)?);
                worst = worst.max((&b.0 - &star.0).amax());
                checked += 1;
            }
            None => skipped += 1,
        }
    }
    Ok(Prop31Check {
        checked,
        skipped,
        max_deviation: worst,
        pass: checked > 0 && worst <= tol,
    })
}

/// Upper bound `(2 − ε) / (2 − ε + ε·exp(β₀ μ ε / 2))` on the affinity error
/// after one reweighted iteration under the superspreader model.
pub fn theorem_bound(eps: f64, mu: f64, beta0: f64) -> f64 {
    (2.0 - eps) / (2.0 - eps + eps * (beta0 * mu * eps / 2.0).exp())
}

#[derive(Clone, Debug)]
pub struct TheoremParams {
    pub n: usize,
    pub m: usize,
    pub p: f64,
    pub eps: f64,
    pub dx: DxSampler,
    pub beta0: f64,
    pub trials: usize,
    /// Trials that must satisfy the bound for the check to pass.
    pub required: usize,
    pub mc_samples: usize,
    pub seed: u64,
}

impl Default for TheoremParams {
    fn default() -> Self {
        TheoremParams {
            n: 200,
            m: 10,
            p: 1.0,
            eps: 0.3,
            dx: DxSampler::LacRelative,
            beta0: 40.0,
            trials: 20,
            required: 18,
            mc_samples: 100_000,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TheoremCheck {
    /// `E‖X̃_{i₀j} − X*_{i₀j}‖² / (2m)` over corrupted `j`.
    pub mu: f64,
    pub mu_bb: f64,
    pub mu_bg: f64,
    pub mu_gb: f64,
    /// Monte Carlo means and standard errors of both sides of the condition
    /// `E‖X̃_{i₀j} − X*_{i₀j}‖² ≤ E‖X̃_{ki₀}X̃_{i₀j} − X*_{kj}‖²`.
    pub lhs: (f64, f64),
    pub rhs: (f64, f64),
    /// `(rhs − lhs)` in units of its Monte Carlo standard error.
    pub separation: f64,
    pub condition_holds: bool,
    pub bound: f64,
    /// `max_e |A_(1)(e) − A*(e)|` per trial.
    pub achieved: Vec<f64>,
    pub within: usize,
    pub pass: bool,
}

impl TheoremCheck {
    pub fn vacuous(&self) -> bool {
        !self.condition_holds
    }
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}

/// Estimates the corruption statistics of `dx` by sampling, checks the
/// hypothesis, then measures the one-iteration affinity error on generated
/// superspreader instances.
pub fn verify_theorem52(params: &TheoremParams) -> Result<TheoremCheck> {
    let m = params.m;
    let mf = m as f64;
    let mut rng = seeded_rng(params.seed, 0);
    let k = params.mc_samples.max(2);
    let (mut lhs, mut rhs) = (Vec::with_capacity(k), Vec::with_capacity(k));
    let (mut bb, mut bg, mut gb) = (0.0, 0.0, 0.0);
    for _ in 0..k {
        let p0 = sample_haar_permutation(&mut rng, m)?;
        let pj = sample_haar_permutation(&mut rng, m)?;
        let pk = sample_haar_permutation(&mut rng, m)?;
        let x0j = params.dx.sample(&mut rng, m, &p0, &pj)?;
        let x0k = params.dx.sample(&mut rng, m, &p0, &pk)?;
        let star0j = p0.compose_transpose(&pj);
        let star0k = p0.compose_transpose(&pk);
        let starkj = pk.compose_transpose(&pj);
        lhs.push(2.0 * (mf - x0j.agreement_unchecked(&star0j) as f64));
        let cyc = x0k.transpose().compose_unchecked(&x0j);
        rhs.push(2.0 * (mf - cyc.agreement_unchecked(&starkj) as f64));
        bb += x0j.agreement_unchecked(&x0k.compose_unchecked(&starkj)) as f64 / mf;
        bg += x0j.agreement_unchecked(&star0j) as f64 / mf;
        gb += x0k.agreement_unchecked(&star0k) as f64 / mf;
    }
    let lhs = mean_se(&lhs);
    let rhs = mean_se(&rhs);
    let mu = lhs.0 / (2.0 * mf);
    let bound = theorem_bound(params.eps, mu, params.beta0);
    let spread = (lhs.1 * lhs.1 + rhs.1 * rhs.1).sqrt();
    let separation = if spread > 0.0 { (rhs.0 - lhs.0) / spread } else { f64::INFINITY.copysign(rhs.0 - lhs.0) };
    let condition_holds = lhs.0 <= rhs.0;

    let mut achieved = Vec::new();
    if condition_holds {
        let cfg = ModelConfig::superspreader(params.n, m, params.p, params.eps, params.dx.clone());
        let schedule = Schedule {
            t0: 1,
            beta: Sequence::Constant(params.beta0),
            ..Schedule::default()
        };
        achieved = (0..params.trials)
            .into_par_iter()
            .map(|t| {
                let inst = generate(&cfg, &mut seeded_rng(mix(params.seed, 1, t as u64), 0))?;
                let star = ground_truth_affinity(&inst)?;
                let trace = cemp_trace(inst.measurement(), &schedule, 2, 0.5)?;
                trace[1].max_abs_diff(&star)
            })
            .collect::<Result<Vec<f64>>>()?;
    }
    let within = achieved.iter().filter(|a| **a <= bound).count();
    let kf = k as f64;
    Ok(TheoremCheck {
        mu,
        mu_bb: bb / kf,
        mu_bg: bg / kf,
        mu_gb: gb / kf,
        lhs,
        rhs,
        separation,
        condition_holds,
        bound,
        achieved,
        within,
        pass: condition_holds && within >= params.required,
    })
}

#[derive(Clone, Debug)]
pub struct PpmFailureParams {
    pub n: usize,
    pub m: usize,
    pub p: f64,
    pub eps: f64,
    pub mix_prob: f64,
    pub eps0: f64,
    pub trials: usize,
    pub seed: u64,
}

impl Default for PpmFailureParams {
    fn default() -> Self {
        PpmFailureParams {
            n: 500,
            m: 10,
            p: 1.0,
            eps: 0.05,
            mix_prob: 0.95,
            eps0: 0.5,
            trials: 20,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PpmTrial {
    /// `‖Q − P_crpt‖_F` with `Q` the mean of `X̃_{i₀j} P*_j` over corrupted `j`.
    pub q_distance: f64,
    pub hypothesis: bool,
    pub returned_crpt: bool,
    pub returned_truth: bool,
}

#[derive(Clone, Debug)]
pub struct PpmFailureCheck {
    /// `2ε√(2m) + (1 − 2ε)ε₀`, required to be below 1.
    pub inequality: f64,
    pub trials: Vec<PpmTrial>,
    pub qualifying: usize,
    pub reproduced: usize,
    pub pass: bool,
}

impl PpmFailureCheck {
    pub fn vacuous(&self) -> bool {
        self.qualifying == 0
    }
}

/// Superspreader instances whose corrupted blocks concentrate on a wrong
/// permutation `P_crpt`: with every other node at its true value, one projected
/// power update at the superspreader returns `P_crpt`.
pub fn verify_ppm_failure(params: &PpmFailureParams) -> Result<PpmFailureCheck> {
    let m = params.m;
    let inequality = 2.0 * params.eps * (2.0 * m as f64).sqrt() + (1.0 - 2.0 * params.eps) * params.eps0;
    let trials = (0..params.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = seeded_rng(mix(params.seed, 2, t as u64), 0);
            let crpt = sample_haar_permutation(&mut rng, m)?;
            let dx = DxSampler::Mixture {
                prob: params.mix_prob,
                crpt: crpt.clone(),
            };
            let cfg = ModelConfig::superspreader(params.n, m, params.p, params.eps, dx);
            let inst = generate(&cfg, &mut rng)?;
            let truth = inst.truth().expect("generated with truth");
            let flags = inst.bad_edges().expect("generated with flags");
            let meas = inst.measurement();

            let mut q = SquareBlock::zeros(m);
            let mut count = 0usize;
            for &(j, e) in inst.topology().neighbors(0) {
                if flags[e] {
                    q.add_permutation(&meas.block(0, j).expect("edge").compose_unchecked(&truth[j]), 1.0);
                    count += 1;
                }
            }
            let q_distance = if count == 0 {
                f64::INFINITY
            } else {
                (q.0 / count as f64 - SquareBlock::from_permutation(&crpt).0).norm()
            };
            let hypothesis = q_distance < params.eps0 && inequality < 1.0 && crpt != truth[0];
            let out: Permutation = ppm_node_update(meas, 0, truth)?;
            Ok(PpmTrial {
                q_distance,
                hypothesis,
                returned_crpt: out == crpt,
                returned_truth: out == truth[0],
            })
        })
        .collect::<Result<Vec<PpmTrial>>>()?;
    let qualifying = trials.iter().filter(|t| t.hypothesis).count();
    let reproduced = trials.iter().filter(|t| t.hypothesis && t.returned_crpt).count();
    Ok(PpmFailureCheck {
        inequality,
        qualifying,
        reproduced,
        pass: qualifying > 0 && reproduced == qualifying,
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::ModelConfig;

    #[test]
    fn bound_examples() {
        // 1.7 / (1.7 + 0.3·e³)
        let b = theorem_bound(0.3, 0.5, 40.0);
        assert!((b - 1.7 / (1.7 + 0.3 * 3.0f64.exp())).abs() < 1e-15);
        assert!((b - 0.2201).abs() < 1e-4);
        let mut prev = 1.0;
        for beta in [0.0, 1.0, 5.0, 20.0, 40.0] {
            let v = theorem_bound(0.3, 0.3, beta);
            assert!(v > 0.0 && v < 1.0 && v < prev);
            prev = v;
        }
    }

    #[test]
    fn prop31_on_small_instances() {
        let inst = generate(&ModelConfig::uniform(5, 4, 1.0, 0.0), &mut seeded_rng(1, 0)).unwrap();
        let c = verify_prop31(&inst, 2, 1e-12).unwrap();
        assert!(c.pass && c.checked == 10 && c.skipped == 0);
        let inst = generate(&ModelConfig::uniform(20, 5, 1.0, 0.3), &mut seeded_rng(2, 0)).unwrap();
        for l in [2, 3] {
            let c = verify_prop31(&inst, l, 1e-12).unwrap();
            assert!(c.pass && c.checked > 0);
        }
    }

    #[test]
    fn no_corruption_gives_zero_error() {
        let params = TheoremParams {
            n: 30,
            eps: 1.0,
            dx: DxSampler::Haar,
            trials: 3,
            required: 3,
            mc_samples: 2000,
            ..TheoremParams::default()
        };
        let c = verify_theorem52(&params).unwrap();
        assert_eq!(c.achieved.len(), 3);
        assert!(c.achieved.iter().all(|a| *a < 1e-12));
    }

    #[test]
    fn three_cycle_sampler_has_mu_point_three() {
        let params = TheoremParams {
            n: 20,
            trials: 0,
            required: 0,
            mc_samples: 5000,
            ..TheoremParams::default()
        };
        let c = verify_theorem52(&params).unwrap();
        assert_eq!(c.mu, 0.3);
        assert_eq!(c.lhs.1, 0.0);
        assert!(c.condition_holds);
        assert!((c.mu_bg - 0.7).abs() < 1e-12 && (c.mu_gb - 0.7).abs() < 1e-12);
        assert!(c.mu_bb <= c.mu_gb);
    }

    #[test]
    fn deterministic_corruption_fools_ppm() {
        let params = PpmFailureParams {
            n: 60,
            mix_prob: 1.0,
            trials: 3,
            ..PpmFailureParams::default()
        };
        let c = verify_ppm_failure(&params).unwrap();
        assert!(c.trials.iter().all(|t| t.returned_crpt));
        let clean = PpmFailureParams {
            n: 40,
            eps: 1.0,
            trials: 2,
            ..PpmFailureParams::default()
        };
        let c = verify_ppm_failure(&clean).unwrap();
        assert!(c.trials.iter().all(|t| t.returned_truth && !t.hypothesis));
    }
}
