//! Small dense linear algebra kernels.
//!
//! The simulator only ever touches symmetric positive-definite d×d matrices
//! with d in the tens to low hundreds, so a row-major `Vec` and a hand-rolled
//! Cholesky are all we need. No BLAS, no panics on user input: factorization
//! failures surface as errors.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dot product of two equal-length slices.
#[inline]
pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = S::zero();
    for (x, y) in a.iter().zip(b.iter()) {
        acc += *x * *y;
    }
    acc
}

/// Euclidean norm.
#[inline]
pub fn norm2<S: Scalar>(a: &[S]) -> S {
    dot(a, a).sqrt()
}

/// `y += alpha * x`.
#[inline]
pub fn axpy<S: Scalar>(y: &mut [S], alpha: S, x: &[S]) {
    debug_assert_eq!(y.len(), x.len());
    for (yi, xi) in y.iter_mut().zip(x.iter()) {
        *yi += alpha * *xi;
    }
}

/// `x *= alpha`.
#[inline]
pub fn scale<S: Scalar>(x: &mut [S], alpha: S) {
    for xi in x.iter_mut() {
        *xi *= alpha;
    }
}

/// Returns true if every entry is finite.
pub fn all_finite<S: Scalar>(x: &[S]) -> bool {
    x.iter().all(|v| v.is_finite())
}

/// Dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix<S> {
    dim: usize,
    data: Vec<S>,
}

impl<S: Scalar> SquareMatrix<S> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![S::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = S::one();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> S {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.dim + j] = v;
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    /// `self * x`.
    pub fn matvec(&self, x: &[S]) -> Vec<S> {
        debug_assert_eq!(x.len(), self.dim);
        let mut out = vec![S::zero(); self.dim];
        for (i, o) in out.iter_mut().enumerate() {
            *o = dot(self.row(i), x);
        }
        out
    }

    /// Quadratic form `x^T self x`.
    pub fn quad_form(&self, x: &[S]) -> S {
        dot(x, &self.matvec(x))
    }

    /// `self += w * x x^T`.
    pub fn add_outer(&mut self, x: &[S], w: S) {
        debug_assert_eq!(x.len(), self.dim);
        for i in 0..self.dim {
            let wi = w * x[i];
            let row = &mut self.data[i * self.dim..(i + 1) * self.dim];
            for (cell, xj) in row.iter_mut().zip(x.iter()) {
                *cell += wi * *xj;
            }
        }
    }

    pub fn trace(&self) -> S {
        let mut t = S::zero();
        for i in 0..self.dim {
            t += self.get(i, i);
        }
        t
    }

    /// Max-absolute-entry norm of `self * other - I`.
    pub fn identity_deviation(&self, other: &SquareMatrix<S>) -> S {
        debug_assert_eq!(self.dim, other.dim);
        let mut worst = S::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                let mut acc = S::zero();
                for k in 0..self.dim {
                    acc += self.get(i, k) * other.get(k, j);
                }
                let target = if i == j { S::one() } else { S::zero() };
                let dev = (acc - target).abs();
                if dev > worst {
                    worst = dev;
                }
            }
        }
        worst
    }

    /// Cholesky factorization `self = L L^T` for symmetric positive-definite
    /// input. Fails with [`Error::NotPositiveDefinite`] when a pivot is not
    /// strictly positive.
    pub fn cholesky(&self) -> Result<Cholesky<S>> {
        let n = self.dim;
        let mut l = vec![S::zero(); n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut acc = self.get(i, j);
                for k in 0..j {
                    acc -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if acc <= S::zero() || !acc.is_finite() {
                        return Err(Error::NotPositiveDefinite);
                    }
                    l[i * n + j] = acc.sqrt();
                } else {
                    l[i * n + j] = acc / l[j * n + j];
                }
            }
        }
        Ok(Cholesky { dim: n, l })
    }
}

/// Lower-triangular Cholesky factor of an SPD matrix.
#[derive(Debug, Clone)]
pub struct Cholesky<S> {
    dim: usize,
    l: Vec<S>,
}

impl<S: Scalar> Cholesky<S> {
    /// Solves `A x = b` where `A = L L^T`.
    pub fn solve(&self, b: &[S]) -> Vec<S> {
        let n = self.dim;
        debug_assert_eq!(b.len(), n);
        // Forward: L y = b.
        let mut y = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                let step = self.l[i * n + k] * y[k];
                y[i] -= step;
            }
            y[i] /= self.l[i * n + i];
        }
        // Backward: L^T x = y.
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                let step = self.l[k * n + i] * y[k];
                y[i] -= step;
            }
            y[i] /= self.l[i * n + i];
        }
        y
    }

    /// Inverse of the factored matrix, computed column by column.
    pub fn inverse(&self) -> SquareMatrix<S> {
        let n = self.dim;
        let mut inv = SquareMatrix::zeros(n);
        let mut e = vec![S::zero(); n];
        for j in 0..n {
            e[j] = S::one();
            let col = self.solve(&e);
            for (i, v) in col.iter().enumerate() {
                inv.set(i, j, *v);
            }
            e[j] = S::zero();
        }
        // Symmetrize to wash out the last bits of asymmetry.
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = (inv.get(i, j) + inv.get(j, i)) * S::cast(0.5);
                inv.set(i, j, avg);
                inv.set(j, i, avg);
            }
        }
        inv
    }

    /// `ln det A = 2 * sum ln L_ii`.
    pub fn log_det(&self) -> S {
        let n = self.dim;
        let mut acc = S::zero();
        for i in 0..n {
            acc += self.l[i * n + i].ln();
        }
        acc + acc
    }
}
