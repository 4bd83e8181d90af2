//! Top eigenpairs of symmetric operators.
//!
//! Small problems go straight to a dense symmetric eigendecomposition. Larger
//! ones use a restarted block Krylov iteration with full reorthogonalization and
//! fall back to the dense route if it fails to converge.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::measurement::{build_gcw, BlockMeasurement, GcwOperator};
use crate::rng::seeded_rng;

pub trait SymmetricOperator {
    fn dim(&self) -> usize;
    /// `y ← A x` for a block of column vectors.
    fn apply(&self, x: &DMatrix<f64>, y: &mut DMatrix<f64>);
    fn to_dense(&self) -> DMatrix<f64>;
}

impl SymmetricOperator for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &DMatrix<f64>, y: &mut DMatrix<f64>) {
        self.mul_to(x, y);
    }

    fn to_dense(&self) -> DMatrix<f64> {
        self.clone()
    }
}

/// `D^{-1/2} S D^{-1/2}` for the weighted block operator `S`.
pub struct NormalizedGcw<'a> {
    op: GcwOperator<'a>,
    scale: Vec<f64>,
}

impl<'a> NormalizedGcw<'a> {
    pub fn new(weights: &'a WeightedGraph, meas: &'a BlockMeasurement) -> Result<Self> {
        let op = build_gcw(weights, meas)?;
        let degrees = weights.degrees();
        if let Some(i) = degrees.iter().position(|d| !(*d > 0.0)) {
            return Err(Error::ZeroDegree(i));
        }
        let scale = degrees.iter().map(|d| 1.0 / d.sqrt()).collect();
        Ok(NormalizedGcw { op, scale })
    }

    /// `d_i^{-1/2}` per node.
    pub fn scale(&self) -> &[f64] {
        &self.scale
    }
}

impl SymmetricOperator for NormalizedGcw<'_> {
    fn dim(&self) -> usize {
        self.op.dim()
    }

    fn apply(&self, x: &DMatrix<f64>, y: &mut DMatrix<f64>) {
        self.op.apply_scaled(&self.scale, x, y);
    }

    fn to_dense(&self) -> DMatrix<f64> {
        let m = self.op.measurement().m();
        let mut s = self.op.densify();
        for r in 0..s.nrows() {
            for c in 0..s.ncols() {
                s[(r, c)] *= self.scale[r / m] * self.scale[c / m];
            }
        }
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EigenBackend {
    /// Block Krylov for large operators, dense below a size cutoff or on failure.
    Auto,
    Dense,
}

#[derive(Clone, Copy, Debug)]
pub struct EigenConfig {
    pub backend: EigenBackend,
    pub tol: f64,
    pub max_restarts: usize,
    pub steps: usize,
    pub dense_cutoff: usize,
}

impl Default for EigenConfig {
    fn default() -> Self {
        EigenConfig {
            backend: EigenBackend::Auto,
            tol: 1e-8,
            max_restarts: 60,
            steps: 8,
            dense_cutoff: 240,
        }
    }
}

/// Eigenvalues in descending order with matching unit eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

pub fn top_eigenpairs(
    op: &dyn SymmetricOperator,
    k: usize,
    cfg: &EigenConfig,
) -> Result<EigenPairs> {
    let dim = op.dim();
    if k == 0 || k > dim {
        return Err(Error::Eigen(format!("cannot take {k} eigenpairs of a {dim}-dimensional operator")));
    }
    let block = (k + 4).min(dim);
    let mut pairs = if cfg.backend == EigenBackend::Dense
        || dim <= cfg.dense_cutoff
        || cfg.steps * block >= dim
    {
        dense_top(op, k)?
    } else {
        match krylov_top(op, k, block, cfg) {
            Some(p) => p,
            None => dense_top(op, k)?,
        }
    };
    fix_signs(&mut pairs.vectors);
    Ok(pairs)
}

fn dense_top(op: &dyn SymmetricOperator, k: usize) -> Result<EigenPairs> {
    let a = op.to_dense();
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::Eigen("operator has non-finite entries".into()));
    }
    let eig = SymmetricEigen::new(a);
    let order = descending(eig.eigenvalues.as_slice());
    let values = order[..k].iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(op.dim(), k, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(EigenPairs { values, vectors })
}

fn descending(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    idx
}

fn krylov_top(
    op: &dyn SymmetricOperator,
    k: usize,
    b: usize,
    cfg: &EigenConfig,
) -> Option<EigenPairs> {
    let dim = op.dim();
    let cols = cfg.steps * b;
    let mut rng = seeded_rng(0x6b72_796c_6f76, 0);
    let mut x = DMatrix::from_fn(dim, b, |_, _| rng.gen_range(-1.0..1.0));
    orthonormalize_block(&mut x, None, &mut rng);

    let mut q = DMatrix::zeros(dim, cols);
    let mut aq = DMatrix::zeros(dim, cols);
    let mut y = DMatrix::zeros(dim, b);
    for _ in 0..cfg.max_restarts {
        q.columns_mut(0, b).copy_from(&x);
        for s in 0..cfg.steps {
            let blk = q.columns(s * b, b).into_owned();
            op.apply(&blk, &mut y);
            aq.columns_mut(s * b, b).copy_from(&y);
            if s + 1 < cfg.steps {
                let mut z = y.clone();
                let basis = q.columns(0, (s + 1) * b).into_owned();
                orthonormalize_block(&mut z, Some(&basis), &mut rng);
                q.columns_mut((s + 1) * b, b).copy_from(&z);
            }
        }
        let h = q.tr_mul(&aq);
        let h = (&h + h.transpose()) * 0.5;
        let eig = SymmetricEigen::new(h);
        let order = descending(eig.eigenvalues.as_slice());
        let coeffs = DMatrix::from_fn(cols, b, |r, c| eig.eigenvectors[(r, order[c])]);
        let u = &q * &coeffs;
        let au = &aq * &coeffs;
        let values: Vec<f64> = order[..b].iter().map(|&i| eig.eigenvalues[i]).collect();
        let scale = values.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        let worst = (0..k)
            .map(|c| (au.column(c) - u.column(c) * values[c]).norm())
            .fold(0.0f64, f64::max);
        if !worst.is_finite() {
            return None;
        }
        if worst <= cfg.tol * scale {
            return Some(EigenPairs {
                values: values[..k].to_vec(),
                vectors: u.columns(0, k).into_owned(),
            });
        }
        x = u;
        orthonormalize_block(&mut x, None, &mut rng);
    }
    None
}

/// Orthonormalizes the columns of `z` against `basis` (two Gram–Schmidt passes)
/// and each other. Columns that collapse are replaced by fresh random vectors.
fn orthonormalize_block(
    z: &mut DMatrix<f64>,
    basis: Option<&DMatrix<f64>>,
    rng: &mut crate::rng::SeededRng,
) {
    let dim = z.nrows();
    for c in 0..z.ncols() {
        let mut attempts = 0;
        loop {
            let before = z.column(c).norm();
            for _ in 0..2 {
                if let Some(qb) = basis {
                    let coef = qb.tr_mul(&z.column(c));
                    let proj = qb * coef;
                    z.column_mut(c).axpy(-1.0, &proj, 1.0);
                }
                for p in 0..c {
                    let d = z.column(p).dot(&z.column(c));
                    let prev = z.column(p).into_owned();
                    z.column_mut(c).axpy(-d, &prev, 1.0);
                }
            }
            let after = z.column(c).norm();
            if after > 1e-8 * before.max(1e-300) && after > 1e-300 {
                z.column_mut(c).scale_mut(1.0 / after);
                break;
            }
            attempts += 1;
            assert!(attempts < 100, "cannot extend an orthonormal basis of dimension {dim}");
            for r in 0..dim {
                z[(r, c)] = rng.gen_range(-1.0..1.0);
            }
        }
    }
}

/// Flips each column so that its first coordinate with magnitude above 1e-12 is positive.
pub fn fix_signs(v: &mut DMatrix<f64>) {
    for mut col in v.column_iter_mut() {
        if let Some(x) = col.iter().find(|x| x.abs() > 1e-12) {
            if *x < 0.0 {
                col.neg_mut();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_symmetric(dim: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = seeded_rng(seed, 0);
        let a = DMatrix::from_fn(dim, dim, |_, _| rng.gen_range(-1.0..1.0));
        (&a + a.transpose()) * 0.5
    }

    #[test]
    fn dense_orders_descending() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 3.0, -2.0, 2.0]));
        let p = top_eigenpairs(&a, 2, &EigenConfig::default()).unwrap();
        assert_eq!(p.values, vec![3.0, 2.0]);
        assert_eq!(p.vectors[(1, 0)], 1.0);
        assert_eq!(p.vectors[(3, 1)], 1.0);
    }

    #[test]
    fn krylov_agrees_with_dense() {
        // Spiked matrix: a clear gap after the top 5 eigenvalues.
        let dim = 400;
        let mut a = random_symmetric(dim, 3) * 0.05;
        for i in 0..5 {
            a[(i * 7, i * 7)] += 10.0 + i as f64;
        }
        let cfg = EigenConfig {
            dense_cutoff: 0,
            ..EigenConfig::default()
        };
        let kr = krylov_top(&a, 5, 9, &cfg).expect("converges");
        let de = dense_top(&a, 5).unwrap();
        for c in 0..5 {
            assert!((kr.values[c] - de.values[c]).abs() < 1e-9);
            let overlap = kr.vectors.column(c).dot(&de.vectors.column(c)).abs();
            assert!((overlap - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn krylov_handles_low_rank() {
        // Rank-3 operator: the Krylov space saturates after one block.
        let dim = 300;
        let mut rng = seeded_rng(9, 0);
        let u = DMatrix::from_fn(dim, 3, |_, _| rng.gen_range(-1.0..1.0));
        let a = &u * u.transpose();
        let cfg = EigenConfig {
            dense_cutoff: 0,
            ..EigenConfig::default()
        };
        let p = top_eigenpairs(&a, 3, &cfg).unwrap();
        let de = dense_top(&a, 3).unwrap();
        for c in 0..3 {
            assert!((p.values[c] - de.values[c]).abs() < 1e-8 * de.values[0]);
        }
    }

    #[test]
    fn signs_are_canonical() {
        let mut v = DMatrix::from_column_slice(3, 2, &[0.0, -0.6, 0.8, 1e-14, 0.6, -0.8]);
        fix_signs(&mut v);
        assert_eq!(v.column(0).as_slice(), &[0.0, 0.6, -0.8]);
        assert_eq!(v.column(1).as_slice(), &[1e-14, 0.6, -0.8]);
    }
}
