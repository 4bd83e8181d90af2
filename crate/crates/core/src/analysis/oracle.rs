use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::AffinityMatrix;
use crate::measurement::BlockMeasurement;
use crate::solvers::Schedule;

pub const DEFAULT_CYCLE_CAP: usize = 1_000_000;

struct Cycle {
    /// Edge ids along the path `i → k₁ → ⋯ → j` (the closing edge excluded).
    path: Vec<usize>,
    /// `‖X̃_{ik₁}⋯X̃_{k_{l−1}j} X̃_ji − I‖² / (2m)`.
    inconsistency: f64,
}

fn dense_block(meas: &BlockMeasurement, from: usize, to: usize) -> DMatrix<f64> {
    let m = meas.m();
    let p = meas.block(from, to).expect("edge exists");
    DMatrix::from_row_slice(m, m, &p.to_dense())
}

/// Corruption levels by explicit message passing over the closed walks
/// `i k₁ ⋯ k_{l−1} j i` through each edge:
/// `s₀(ij)` is the plain mean of the cycle inconsistencies `d_L`, and
/// `s_{t+1}(ij) = Σ_L e^{−β_t Σ_{ab∈L∖ij} s_t(ab)} d_L / Σ_L e^{−β_t Σ_{ab∈L∖ij} s_t(ab)}`.
///
/// Returns the affinities `1 − s_t` for `t = 0..=t₀`. Edges with no cycle get
/// `fallback`. Cycle products are formed with dense matrix arithmetic.
pub fn cemp_message_passing_oracle(
    meas: &BlockMeasurement,
    schedule: &Schedule,
    l: usize,
    fallback: f64,
    cap: usize,
) -> Result<Vec<AffinityMatrix>> {
    if l < 2 {
        return Err(Error::input(format!("cycle must have at least 3 edges, got walk length {l}")));
    }
    let topo = meas.topology();
    let m = meas.m();
    let mut cycles: Vec<Vec<Cycle>> = Vec::with_capacity(topo.num_edges());
    let mut total = 0usize;

    for &(i, j) in topo.edges() {
        let closing = dense_block(meas, j, i);
        let mut found = Vec::new();
        // Depth-first over walks of exactly l edges from i ending at j.
        let mut stack: Vec<(usize, Vec<usize>, DMatrix<f64>)> = vec![(i, Vec::new(), DMatrix::identity(m, m))];
        while let Some((u, path, prod)) = stack.pop() {
            if path.len() == l {
                continue;
            }
            for &(v, e) in topo.neighbors(u) {
                let last = path.len() + 1 == l;
                if last && v != j {
                    continue;
                }
                let next = &prod * dense_block(meas, u, v);
                let mut p = path.clone();
                p.push(e);
                if last {
                    let cyc = &next * &closing - DMatrix::<f64>::identity(m, m);
                    found.push(Cycle {
                        path: p,
                        inconsistency: cyc.norm_squared() / (2.0 * m as f64),
                    });
                    total += 1;
                    if total > cap {
                        return Err(Error::CycleCap(cap));
                    }
                } else {
                    stack.push((v, p, next));
                }
            }
        }
        cycles.push(found);
    }

    let mut s: Vec<f64> = cycles
        .iter()
        .map(|cs| {
            if cs.is_empty() {
                1.0 - fallback
            } else {
                cs.iter().map(|c| c.inconsistency).sum::<f64>() / cs.len() as f64
            }
        })
        .collect();
    let to_affinity = |s: &[f64]| {
        AffinityMatrix::new(topo.clone(), s.iter().map(|x| (1.0 - x).clamp(0.0, 1.0)).collect())
    };
    let mut out = vec![to_affinity(&s)?];
    for t in 0..schedule.t0 {
        let beta = schedule.beta.at(t);
        let next: Vec<f64> = cycles
            .iter()
            .map(|cs| {
                if cs.is_empty() {
                    return 1.0 - fallback;
                }
                let exps: Vec<f64> = cs
                    .iter()
                    .map(|c| -beta * c.path.iter().map(|&e| s[e]).sum::<f64>())
                    .collect();
                let top = exps.iter().fold(f64::NEG_INFINITY, |a, b| a.max(*b));
                let (mut num, mut den) = (0.0, 0.0);
                for (c, x) in cs.iter().zip(&exps) {
                    let w = (x - top).exp();
                    num += w * c.inconsistency;
                    den += w;
                }
                num / den
            })
            .collect();
        s = next;
        out.push(to_affinity(&s)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Topology;
    use crate::perm::Permutation;
    use std::sync::Arc;

    #[test]
    fn noiseless_is_one() {
        let truth: Vec<Permutation> = (0..5)
            .map(|k| Permutation::from_map((0..4).map(|r| (r + k) % 4).collect()).unwrap())
            .collect();
        let meas = BlockMeasurement::from_absolute(Arc::new(Topology::complete(5)), &truth).unwrap();
        for l in [2, 3] {
            for a in cemp_message_passing_oracle(&meas, &Schedule::default(), l, 0.5, DEFAULT_CYCLE_CAP).unwrap() {
                assert!(a.values().iter().all(|v| (v - 1.0).abs() < 1e-12));
            }
        }
    }

    #[test]
    fn triangle_shares_one_inconsistency() {
        let topo = Arc::new(Topology::complete(3));
        let id = Permutation::identity(4);
        let bad = Permutation::from_map(vec![1, 2, 0, 3]).unwrap();
        let meas = BlockMeasurement::new(topo, 4, vec![id.clone(), bad, id]).unwrap();
        let s = Schedule {
            t0: 0,
            ..Schedule::default()
        };
        let a = &cemp_message_passing_oracle(&meas, &s, 2, 0.5, DEFAULT_CYCLE_CAP).unwrap()[0];
        assert!(a.values().iter().all(|v| (v - 0.25).abs() < 1e-12));
    }

    #[test]
    fn cap_is_enforced() {
        let meas = BlockMeasurement::from_absolute(
            Arc::new(Topology::complete(8)),
            &vec![Permutation::identity(2); 8],
        )
        .unwrap();
        assert!(matches!(
            cemp_message_passing_oracle(&meas, &Schedule::default(), 3, 0.5, 100),
            Err(Error::CycleCap(100))
        ));
    }
}
