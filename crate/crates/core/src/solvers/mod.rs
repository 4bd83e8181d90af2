//! Synchronization solvers.
//!
//! All solvers consume a [`ProblemInstance`] and return a [`SolverReport`] of
//! absolute permutations. Outputs are gauge-fixed so that node 0 carries the
//! identity.

mod cemp;
mod irgcl;
mod irls;
mod ppm;
mod spectral;

pub use cemp::{cemp_init, cemp_trace, AffinityRoute};
pub use irgcl::{irgcl_init_solve, irgcl_solve, Variant};
pub use irls::{irls_cauchy_solve, irls_l1_solve, CauchyScale};
pub use ppm::{ppm_node_update, ppm_solve};
pub use spectral::{spectral_solve, wls_power_step, wls_spectral_step};

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::eigen::EigenConfig;
use crate::error::{Error, Result};
use crate::graph::{AffinityMatrix, WeightedGraph};
use crate::models::ProblemInstance;
use crate::perm::Permutation;

/// A real sequence indexed by iteration `t`.
#[derive(Clone, Debug, PartialEq)]
pub enum Sequence {
    Constant(f64),
    /// `min(base^(t + offset), cap)`.
    CappedPower { base: f64, offset: i32, cap: f64 },
    /// `t / (t + 1)`.
    Ratio,
    /// Listed values; the last one repeats.
    Explicit(Vec<f64>),
}

impl Sequence {
    pub fn at(&self, t: usize) -> f64 {
        match self {
            Sequence::Constant(v) => *v,
            Sequence::CappedPower { base, offset, cap } => {
                base.powi(t as i32 + offset).min(*cap)
            }
            Sequence::Ratio => t as f64 / (t as f64 + 1.0),
            Sequence::Explicit(v) => *v.get(t).or(v.last()).unwrap_or(&0.0),
        }
    }
}

/// Map from affinities to least-squares weights.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Reweight {
    #[default]
    Identity,
}

impl Reweight {
    pub fn apply(self, a: &AffinityMatrix) -> WeightedGraph {
        match self {
            Reweight::Identity => a.to_weights(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    pub t0: usize,
    pub t_max: usize,
    pub beta: Sequence,
    pub alpha: Sequence,
    pub lambda: Sequence,
    pub reweight: Reweight,
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule {
            t0: 5,
            t_max: 100,
            beta: Sequence::CappedPower {
                base: 2.0,
                offset: 0,
                cap: 40.0,
            },
            alpha: Sequence::CappedPower {
                base: 1.2,
                offset: -1,
                cap: 40.0,
            },
            lambda: Sequence::Ratio,
            reweight: Reweight::Identity,
        }
    }
}

impl Schedule {
    pub fn validate(&self) -> Result<()> {
        let horizon = self.t0.max(self.t_max) + 1;
        for (name, seq) in [("beta", &self.beta), ("alpha", &self.alpha)] {
            for t in 0..horizon {
                let (a, b) = (seq.at(t), seq.at(t + 1));
                if !(a.is_finite() && b.is_finite() && a >= 0.0) {
                    return Err(Error::input(format!("{name}_{t} = {a} is not a finite nonnegative value")));
                }
                if b < a {
                    return Err(Error::input(format!("{name} decreases at t = {t}")));
                }
            }
        }
        for t in 0..horizon {
            let l = self.lambda.at(t);
            if !(0.0..=1.0).contains(&l) {
                return Err(Error::input(format!("lambda_{t} = {l} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

/// Tuning shared by all solvers.
#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub schedule: Schedule,
    /// Walk length used by the affinity initialization.
    pub cycle_len: usize,
    pub irls_delta: f64,
    pub cauchy_scale: CauchyScale,
    pub eigen: EigenConfig,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            schedule: Schedule::default(),
            cycle_len: 2,
            irls_delta: 1e-8,
            cauchy_scale: CauchyScale::MedianResidual,
            eigen: EigenConfig::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IterationTrace {
    /// Fingerprint of the affinity used for this update, for solvers that keep one.
    pub affinity_hash: Option<u64>,
    /// Nodes whose estimate changed in this update.
    pub changed: usize,
}

#[derive(Clone, Debug)]
pub struct SolverReport {
    pub estimate: Vec<Permutation>,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<IterationTrace>,
    pub wall_time: Duration,
}

impl SolverReport {
    /// Equality of everything except wall time.
    pub fn same_result(&self, other: &SolverReport) -> bool {
        self.estimate == other.estimate
            && self.iterations == other.iterations
            && self.converged == other.converged
            && self.trace == other.trace
    }
}

/// Iteration bookkeeping shared by the loops.
pub(crate) struct Tracker {
    start: Instant,
    trace: Vec<IterationTrace>,
}

impl Tracker {
    pub(crate) fn start() -> Self {
        Tracker {
            start: Instant::now(),
            trace: Vec::new(),
        }
    }

    pub(crate) fn record(&mut self, prev: &[Permutation], next: &[Permutation], hash: Option<u64>) {
        let changed = prev.iter().zip(next).filter(|(a, b)| a != b).count();
        self.trace.push(IterationTrace {
            affinity_hash: hash,
            changed,
        });
    }

    pub(crate) fn finish(self, estimate: Vec<Permutation>, iterations: usize, converged: bool) -> SolverReport {
        SolverReport {
            estimate,
            iterations,
            converged,
            trace: self.trace,
            wall_time: self.start.elapsed(),
        }
    }
}

/// Right-multiplies every estimate by `P_0ᵀ` so that node 0 is the identity.
pub(crate) fn fix_gauge(estimate: &mut [Permutation]) {
    if let Some(first) = estimate.first() {
        let g = first.clone();
        for p in estimate.iter_mut() {
            *p = p.compose_transpose(&g);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Spectral,
    Ppm,
    IrlsL1,
    IrlsCauchyS,
    IrlsCauchyP,
    CempInit,
    IrgclInit,
    IrgclS,
    IrgclP,
}

impl Algorithm {
    pub const ALL: [Algorithm; 9] = [
        Algorithm::Spectral,
        Algorithm::Ppm,
        Algorithm::IrlsL1,
        Algorithm::IrlsCauchyS,
        Algorithm::IrlsCauchyP,
        Algorithm::CempInit,
        Algorithm::IrgclInit,
        Algorithm::IrgclS,
        Algorithm::IrgclP,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Algorithm::Spectral => "spectral",
            Algorithm::Ppm => "ppm",
            Algorithm::IrlsL1 => "irls-l1",
            Algorithm::IrlsCauchyS => "irls-cauchy-s",
            Algorithm::IrlsCauchyP => "irls-cauchy-p",
            Algorithm::CempInit => "cemp-init",
            Algorithm::IrgclInit => "irgcl-init",
            Algorithm::IrgclS => "irgcl-s",
            Algorithm::IrgclP => "irgcl-p",
        }
    }

    /// Whether the algorithm produces absolute permutations.
    pub fn yields_permutations(self) -> bool {
        self != Algorithm::CempInit
    }

    pub fn run(self, inst: &ProblemInstance, cfg: &SolverConfig) -> Result<SolverReport> {
        match self {
            Algorithm::Spectral => spectral_solve(inst, None, &cfg.eigen),
            Algorithm::Ppm => ppm_solve(inst, None, cfg),
            Algorithm::IrlsL1 => irls_l1_solve(inst, cfg.irls_delta, cfg),
            Algorithm::IrlsCauchyS => irls_cauchy_solve(inst, Variant::S, cfg.cauchy_scale, cfg),
            Algorithm::IrlsCauchyP => irls_cauchy_solve(inst, Variant::P, cfg.cauchy_scale, cfg),
            Algorithm::CempInit => Err(Error::input(
                "cemp-init produces edge affinities, not permutations",
            )),
            Algorithm::IrgclInit => irgcl_init_solve(inst, cfg),
            Algorithm::IrgclS => irgcl_solve(inst, Variant::S, cfg),
            Algorithm::IrgclP => irgcl_solve(inst, Variant::P, cfg),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.tag() == s)
            .ok_or_else(|| Error::input(format!("unknown algorithm `{s}`")))
    }
}
