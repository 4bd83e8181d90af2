//! Permutations as the atomic group elements, and the projection of arbitrary
//! square score blocks onto them.
//!
//! A permutation of size `m` is stored as its row-image map: `map[r] = c` means
//! the matrix representation has a one at row `r`, column `c`. Matrix products
//! and transposes are then index compositions and inverses.

mod assignment;

pub use assignment::{hungarian_max, project_to_permutation, SquareBlock};

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn identity(m: usize) -> Self {
        Permutation {
            map: (0..m).collect(),
        }
    }

    /// Builds a permutation from its row-image map, checking bijectivity.
    pub fn from_map(map: Vec<usize>) -> Result<Self> {
        if map.is_empty() {
            return Err(Error::input("permutation size must be positive"));
        }
        let m = map.len();
        let mut seen = vec![false; m];
        for &c in &map {
            if c >= m {
                return Err(Error::input(format!("image {c} out of range for size {m}")));
            }
            if seen[c] {
                return Err(Error::input(format!("image {c} repeated; not a bijection")));
            }
            seen[c] = true;
        }
        Ok(Permutation { map })
    }

    #[inline]
    pub(crate) fn from_map_unchecked(map: Vec<usize>) -> Self {
        debug_assert!(Self::from_map(map.clone()).is_ok());
        Permutation { map }
    }

    /// Swaps two positions of the identity.
    pub fn transposition(m: usize, a: usize, b: usize) -> Self {
        let mut p = Self::identity(m);
        p.map.swap(a, b);
        p
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.map.len()
    }

    #[inline]
    pub fn map(&self) -> &[usize] {
        &self.map
    }

    #[inline]
    pub fn image(&self, r: usize) -> usize {
        self.map[r]
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(r, &c)| r == c)
    }

    /// Matrix transpose, which is also the group inverse.
    pub fn transpose(&self) -> Self {
        let mut inv = vec![0; self.map.len()];
        for (r, &c) in self.map.iter().enumerate() {
            inv[c] = r;
        }
        Permutation { map: inv }
    }

    /// Matrix product `self · other`.
    pub fn compose(&self, other: &Permutation) -> Result<Self> {
        if self.size() != other.size() {
            return Err(Error::SizeMismatch {
                expected: self.size(),
                got: other.size(),
            });
        }
        Ok(self.compose_unchecked(other))
    }

    #[inline]
    pub(crate) fn compose_unchecked(&self, other: &Permutation) -> Self {
        Permutation {
            map: self.map.iter().map(|&s| other.map[s]).collect(),
        }
    }

    /// `self · otherᵀ` without materializing the transpose.
    pub(crate) fn compose_transpose(&self, other: &Permutation) -> Self {
        let inv = other.transpose();
        self.compose_unchecked(&inv)
    }

    /// Frobenius inner product `⟨self, other⟩`: the number of rows with equal images.
    pub fn agreement(&self, other: &Permutation) -> Result<usize> {
        if self.size() != other.size() {
            return Err(Error::SizeMismatch {
                expected: self.size(),
                got: other.size(),
            });
        }
        Ok(self.agreement_unchecked(other))
    }

    #[inline]
    pub(crate) fn agreement_unchecked(&self, other: &Permutation) -> usize {
        self.map
            .iter()
            .zip(&other.map)
            .filter(|(a, b)| a == b)
            .count()
    }

    /// Number of fixed points, i.e. `⟨self, I⟩`.
    pub fn fixed_points(&self) -> usize {
        self.map.iter().enumerate().filter(|(r, &c)| *r == c).count()
    }

    /// Squared Frobenius distance `‖self − other‖²`, always `2(m − agreement)`.
    pub fn frobenius_sq_distance(&self, other: &Permutation) -> Result<usize> {
        Ok(2 * (self.size() - self.agreement(other)?))
    }

    /// Dense row-major 0/1 matrix.
    pub fn to_dense(&self) -> Vec<f64> {
        let m = self.size();
        let mut out = vec![0.0; m * m];
        for (r, &c) in self.map.iter().enumerate() {
            out[r * m + c] = 1.0;
        }
        out
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", self.map)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for c in &self.map {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{c}")?;
            first = false;
        }
        Ok(())
    }
}

/// `⟨P, Q⟩ / m`, the fraction of agreeing row images.
pub fn correlation_affinity(p: &Permutation, q: &Permutation) -> Result<f64> {
    Ok(p.agreement(q)? as f64 / p.size() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_matmul(a: &[f64], b: &[f64], m: usize) -> Vec<f64> {
        let mut out = vec![0.0; m * m];
        for i in 0..m {
            for k in 0..m {
                for j in 0..m {
                    out[i * m + j] += a[i * m + k] * b[k * m + j];
                }
            }
        }
        out
    }

    #[test]
    fn from_map_rejects_non_bijection() {
        assert!(Permutation::from_map(vec![0, 0, 1]).is_err());
        assert!(Permutation::from_map(vec![0, 3, 1]).is_err());
        assert!(Permutation::from_map(vec![]).is_err());
        assert!(Permutation::from_map(vec![2, 0, 1]).is_ok());
    }

    #[test]
    fn compose_with_identity_and_transpose() {
        let p = Permutation::from_map(vec![3, 1, 0, 2]).unwrap();
        let id = Permutation::identity(4);
        assert_eq!(p.compose(&id).unwrap(), p);
        assert_eq!(id.compose(&p).unwrap(), p);
        assert!(p.compose(&p.transpose()).unwrap().is_identity());
        assert!(p.transpose().compose(&p).unwrap().is_identity());
    }

    #[test]
    fn compose_matches_dense_matmul() {
        let p = Permutation::from_map(vec![2, 0, 3, 1]).unwrap();
        let q = Permutation::from_map(vec![1, 3, 0, 2]).unwrap();
        let pq = p.compose(&q).unwrap();
        assert_eq!(pq.to_dense(), dense_matmul(&p.to_dense(), &q.to_dense(), 4));
        let qp = q.compose(&p).unwrap();
        assert_eq!(qp.to_dense(), dense_matmul(&q.to_dense(), &p.to_dense(), 4));
    }

    #[test]
    fn compose_size_mismatch() {
        let p = Permutation::identity(3);
        let q = Permutation::identity(4);
        assert!(matches!(p.compose(&q), Err(Error::SizeMismatch { .. })));
        assert!(correlation_affinity(&p, &q).is_err());
    }

    #[test]
    fn affinity_examples() {
        let p = Permutation::from_map(vec![4, 2, 0, 1, 3]).unwrap();
        assert_eq!(correlation_affinity(&p, &p).unwrap(), 1.0);
        let id2 = Permutation::identity(2);
        let swap = Permutation::transposition(2, 0, 1);
        assert_eq!(correlation_affinity(&id2, &swap).unwrap(), 0.0);
        let mut cyc: Vec<usize> = (0..10).collect();
        cyc[0] = 1;
        cyc[1] = 2;
        cyc[2] = 0;
        let cyc = Permutation::from_map(cyc).unwrap();
        assert_eq!(correlation_affinity(&Permutation::identity(10), &cyc).unwrap(), 0.7);
    }

    #[test]
    fn frobenius_identity() {
        let a = Permutation::from_map(vec![1, 0, 2, 4, 3]).unwrap();
        let b = Permutation::identity(5);
        let dense: f64 = a
            .to_dense()
            .iter()
            .zip(b.to_dense())
            .map(|(x, y)| (x - y) * (x - y))
            .sum();
        assert_eq!(a.frobenius_sq_distance(&b).unwrap() as f64, dense);
        let aff = correlation_affinity(&a, &b).unwrap();
        assert!((1.0 - dense / (2.0 * 5.0) - aff).abs() < 1e-15);
    }
}
