//! Named verification suites with fixed default parameters, as run by
//! `permsync verify`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;

use super::checks::{
    theorem_bound, verify_ppm_failure, verify_prop31, verify_theorem52, PpmFailureParams, TheoremParams,
};
use super::oracle::{cemp_message_passing_oracle, DEFAULT_CYCLE_CAP};
use super::{ground_truth_affinity, relative_error, EdgeSet};
use crate::error::{Error, Result};
use crate::models::io::{parse_problem_str, problem_to_string};
use crate::models::{generate, sample_haar_permutation, DxSampler, ModelConfig, ProblemInstance};
use crate::perm::hungarian_max;
use crate::rng::{mix, seeded_rng};
use crate::solvers::{cemp_trace, Schedule};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuiteOutcome {
    Pass,
    Fail,
    /// The hypothesis of the checked statement did not hold.
    Vacuous,
}

impl SuiteOutcome {
    pub fn exit_code(self) -> i32 {
        match self {
            SuiteOutcome::Pass => 0,
            SuiteOutcome::Fail => 1,
            SuiteOutcome::Vacuous => 2,
        }
    }

    fn from_flags(pass: bool, vacuous: bool) -> Self {
        if vacuous {
            SuiteOutcome::Vacuous
        } else if pass {
            SuiteOutcome::Pass
        } else {
            SuiteOutcome::Fail
        }
    }
}

impl fmt::Display for SuiteOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SuiteOutcome::Pass => "pass",
            SuiteOutcome::Fail => "fail",
            SuiteOutcome::Vacuous => "vacuous",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Hungarian,
    Prop31,
    Prop42,
    Thm52,
    PpmFailure,
    Invariants,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Hungarian,
        Suite::Prop31,
        Suite::Prop42,
        Suite::Thm52,
        Suite::PpmFailure,
        Suite::Invariants,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Hungarian => "hungarian",
            Suite::Prop31 => "prop31",
            Suite::Prop42 => "prop42",
            Suite::Thm52 => "thm52",
            Suite::PpmFailure => "ppm-failure",
            Suite::Invariants => "invariants",
        }
    }

    pub fn run(self, seed: u64) -> Result<SuiteReport> {
        match self {
            Suite::Hungarian => hungarian_suite(seed, 1000),
            Suite::Prop31 => prop31_suite(seed, 50),
            Suite::Prop42 => prop42_suite(seed, 50),
            Suite::Thm52 => thm52_suite(&TheoremParams {
                seed,
                ..TheoremParams::default()
            }),
            Suite::PpmFailure => ppm_failure_suite(&PpmFailureParams {
                seed,
                ..PpmFailureParams::default()
            }),
            Suite::Invariants => invariants_suite(seed),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::input(format!("unknown suite `{s}`")))
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: Suite,
    pub outcome: SuiteOutcome,
    /// Human-readable findings, one per line.
    pub lines: Vec<String>,
}

fn brute_force_max(score: &DMatrix<f64>) -> f64 {
    fn rec(score: &DMatrix<f64>, row: usize, used: &mut [bool], acc: f64, best: &mut f64) {
        let m = used.len();
        if row == m {
            *best = best.max(acc);
            return;
        }
        for c in 0..m {
            if !used[c] {
                used[c] = true;
                rec(score, row + 1, used, acc + score[(row, c)], best);
                used[c] = false;
            }
        }
    }
    let mut best = f64::NEG_INFINITY;
    rec(score, 0, &mut vec![false; score.nrows()], 0.0, &mut best);
    best
}

/// Assignment optimality against exhaustive search over all `m!` maps, for
/// `m = 1..=6` and `per_size` score matrices each. Half of the matrices have
/// small integer entries so that ties are common.
pub fn hungarian_suite(seed: u64, per_size: usize) -> Result<SuiteReport> {
    let mut lines = Vec::new();
    let mut mismatches = 0usize;
    for m in 1..=6usize {
        let mut rng = seeded_rng(seed, m as u64);
        let mut bad = 0usize;
        for k in 0..per_size {
            let score = if k % 2 == 0 {
                DMatrix::from_fn(m, m, |_, _| rng.gen_range(-1.0..1.0))
            } else {
                DMatrix::from_fn(m, m, |_, _| rng.gen_range(0..3) as f64)
            };
            let map = hungarian_max(&score);
            let got: f64 = (0..m).map(|r| score[(r, map[r])]).sum();
            let mut seen = vec![false; m];
            let bijective = map.iter().all(|&c| c < m && !std::mem::replace(&mut seen[c], true));
            // Both sums accumulate row by row, so an optimal map reproduces the maximum bit for bit.
            if !bijective || got != brute_force_max(&score) {
                bad += 1;
            }
        }
        lines.push(format!("m={m}: {per_size} matrices, {bad} mismatches"));
        mismatches += bad;
    }
    Ok(SuiteReport {
        suite: Suite::Hungarian,
        outcome: SuiteOutcome::from_flags(mismatches == 0, false),
        lines,
    })
}

/// Small instances cycling through the corruption models, for suites that
/// need explicit cycle enumeration.
pub fn small_instance(seed: u64, k: usize) -> Result<ProblemInstance> {
    let n = 6 + k % 7;
    let m = 3 + k % 3;
    let p = [1.0, 0.8, 0.6][k % 3];
    let cfg = match k % 4 {
        0 => ModelConfig::uniform(n, m, p, 0.1 + 0.1 * (k % 5) as f64),
        1 => ModelConfig::superspreader(n, m, p, 0.3, DxSampler::Haar),
        2 => ModelConfig::lbc(n, m, 1.0, 1, 3),
        _ => ModelConfig::lac(n, m, 1.0, 2, 3),
    };
    generate(&cfg, &mut seeded_rng(mix(seed, 3, k as u64), 0))
}

/// Walk-ratio exactness under good-edge indicator weights, `l ∈ {2, 3}`.
pub fn prop31_suite(seed: u64, instances: usize) -> Result<SuiteReport> {
    let results = (0..instances)
        .into_par_iter()
        .map(|k| {
            let inst = small_instance(seed, k)?;
            Ok([verify_prop31(&inst, 2, 1e-12)?, verify_prop31(&inst, 3, 1e-12)?])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut lines = Vec::new();
    let (mut checked, mut skipped, mut worst, mut failed) = (0, 0, 0.0f64, 0);
    for (l, idx) in [(2, 0), (3, 1)] {
        let (c, s, w, f) = results.iter().fold((0, 0, 0.0f64, 0), |acc, r| {
            let r = &r[idx];
            (acc.0 + r.checked, acc.1 + r.skipped, acc.2.max(r.max_deviation), acc.3 + usize::from(!r.pass && !r.vacuous()))
        });
        lines.push(format!(
            "l={l}: {instances} instances, {c} edges checked, {s} without an all-good walk, max deviation {w:.3e}"
        ));
        checked += c;
        skipped += s;
        worst = worst.max(w);
        failed += f;
    }
    lines.push(format!("{checked} edges checked, {skipped} skipped, tolerance 1e-12"));
    Ok(SuiteReport {
        suite: Suite::Prop31,
        outcome: SuiteOutcome::from_flags(failed == 0 && worst <= 1e-12, checked == 0),
        lines,
    })
}

/// Walk-power affinities against explicit cycle message passing for
/// `l ∈ {2, 3}` and `t ≤ 3`, tolerance `1e-10`.
pub fn prop42_suite(seed: u64, instances: usize) -> Result<SuiteReport> {
    let schedule = Schedule {
        t0: 3,
        ..Schedule::default()
    };
    let devs = (0..instances)
        .into_par_iter()
        .map(|k| {
            let inst = small_instance(seed, k)?;
            let mut out = [0.0f64; 2];
            for (slot, l) in [2usize, 3].into_iter().enumerate() {
                let fast = cemp_trace(inst.measurement(), &schedule, l, 0.5)?;
                let slow = cemp_message_passing_oracle(inst.measurement(), &schedule, l, 0.5, DEFAULT_CYCLE_CAP)?;
                for (a, b) in fast.iter().zip(&slow) {
                    out[slot] = out[slot].max(a.max_abs_diff(b)?);
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    let worst2 = devs.iter().map(|d| d[0]).fold(0.0, f64::max);
    let worst3 = devs.iter().map(|d| d[1]).fold(0.0, f64::max);
    let lines = vec![
        format!("l=2: {instances} instances, t=0..3, max deviation {worst2:.3e}"),
        format!("l=3: {instances} instances, t=0..3, max deviation {worst3:.3e}"),
        "tolerance 1e-10".to_string(),
    ];
    Ok(SuiteReport {
        suite: Suite::Prop42,
        outcome: SuiteOutcome::from_flags(worst2.max(worst3) <= 1e-10, false),
        lines,
    })
}

pub fn thm52_suite(params: &TheoremParams) -> Result<SuiteReport> {
    let c = verify_theorem52(params)?;
    let mut lines = vec![
        format!(
            "mu={:.6} mu_bb={:.6} mu_bg={:.6} mu_gb={:.6} ({} samples)",
            c.mu, c.mu_bb, c.mu_bg, c.mu_gb, params.mc_samples
        ),
        format!(
            "condition: lhs={:.4}±{:.4} rhs={:.4}±{:.4} separation={:.1} sigma holds={}",
            c.lhs.0, c.lhs.1, c.rhs.0, c.rhs.1, c.separation, c.condition_holds
        ),
        format!("bound={:.6} (eps={}, beta0={})", c.bound, params.eps, params.beta0),
    ];
    for (t, a) in c.achieved.iter().enumerate() {
        lines.push(format!("trial {t}: achieved={a:.6} within={}", *a <= c.bound));
    }
    lines.push(format!("{}/{} trials within bound, {} required", c.within, c.achieved.len(), params.required));
    Ok(SuiteReport {
        suite: Suite::Thm52,
        outcome: SuiteOutcome::from_flags(c.pass, c.vacuous()),
        lines,
    })
}

pub fn ppm_failure_suite(params: &PpmFailureParams) -> Result<SuiteReport> {
    let c = verify_ppm_failure(params)?;
    let mut lines = vec![format!(
        "2 eps sqrt(2m) + (1 - 2 eps) eps0 = {:.4} (must be < 1)",
        c.inequality
    )];
    for (t, tr) in c.trials.iter().enumerate() {
        lines.push(format!(
            "trial {t}: |Q - P_crpt|={:.4} hypothesis={} returned_crpt={} returned_truth={}",
            tr.q_distance, tr.hypothesis, tr.returned_crpt, tr.returned_truth
        ));
    }
    lines.push(format!("{}/{} qualifying trials reproduce the failure", c.reproduced, c.qualifying));
    Ok(SuiteReport {
        suite: Suite::PpmFailure,
        outcome: SuiteOutcome::from_flags(c.pass, c.vacuous()),
        lines,
    })
}

/// Gauge invariance of the error, unit ground-truth affinity on good edges,
/// exact `μ = 0.3` under three-cycle corruption, monotone bound and lossless
/// problem files.
pub fn invariants_suite(seed: u64) -> Result<SuiteReport> {
    let mut lines = Vec::new();
    let mut ok = true;
    let mut check = |name: &str, pass: bool| {
        lines.push(format!("{name}: {}", if pass { "pass" } else { "fail" }));
        ok &= pass;
    };

    let mut gauge = true;
    let mut unit = true;
    let mut roundtrip = true;
    for k in 0..20u64 {
        let mut rng = seeded_rng(mix(seed, 4, k), 0);
        let cfg = match k % 4 {
            0 => ModelConfig::uniform(15, 5, 0.7, 0.4),
            1 => ModelConfig::superspreader(15, 5, 1.0, 0.3, DxSampler::Lac),
            2 => ModelConfig::lbc(15, 5, 1.0, 2, 6),
            _ => ModelConfig::lac(15, 5, 1.0, 2, 6),
        };
        let inst = generate(&cfg, &mut rng)?;
        let truth = inst.truth().expect("generated with truth");
        let est: Vec<_> = (0..inst.n())
            .map(|_| sample_haar_permutation(&mut rng, inst.m()))
            .collect::<Result<_>>()?;
        let g = sample_haar_permutation(&mut rng, inst.m())?;
        let moved: Vec<_> = est.iter().map(|p| p.compose_unchecked(&g)).collect();
        gauge &= relative_error(&est, truth, inst.topology(), EdgeSet::AllPairs)?
            == relative_error(&moved, truth, inst.topology(), EdgeSet::AllPairs)?;

        let a = ground_truth_affinity(&inst)?;
        let flags = inst.bad_edges().expect("generated with flags");
        unit &= flags.iter().enumerate().all(|(e, &b)| (a.value(e) == 1.0) != b);

        let text = problem_to_string(&inst);
        roundtrip &= problem_to_string(&parse_problem_str(&text)?) == text;
    }
    check("relative error invariant under a global gauge (20 instances)", gauge);
    check("ground-truth affinity is 1 exactly on uncorrupted edges (20 instances)", unit);
    check("problem files round-trip byte for byte (20 instances)", roundtrip);

    let c = verify_theorem52(&TheoremParams {
        trials: 0,
        required: 0,
        mc_samples: 10_000,
        seed,
        ..TheoremParams::default()
    })?;
    check("three-cycle corruption gives mu = 0.3 exactly for m = 10", c.mu == 0.3 && c.lhs.1 == 0.0);

    let betas = [0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 40.0];
    let monotone = betas
        .windows(2)
        .all(|w| theorem_bound(0.3, 0.3, w[1]) < theorem_bound(0.3, 0.3, w[0]));
    check("bound strictly decreasing in beta0", monotone);

    Ok(SuiteReport {
        suite: Suite::Invariants,
        outcome: SuiteOutcome::from_flags(ok, false),
        lines,
    })
}
