//! Small dense linear algebra: row-major matrices, Cholesky, and the
//! orthonormal basis of the mean-zero subspace.

use std::ops::{Index, IndexMut};

use crate::error::{EamError, Result};
use crate::scalar::Scalar;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        Self::from_fn(diag.len(), diag.len(), |i, j| if i == j { diag[i] } else { T::zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
    }

    /// Largest `|a_ij - a_ji|`.
    pub fn asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols, "matrix-vector dimension mismatch");
        (0..self.rows).map(|i| self.row(i).iter().zip(x).fold(T::zero(), |acc, (&a, &b)| acc + a * b)).collect()
    }

    /// `x^T A x`.
    pub fn quadratic_form(&self, x: &[T]) -> T {
        dot(x, &self.mul_vec(x))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scaled(&self, s: T) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| x * s).collect() }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

/// Lower Cholesky factor of a symmetric positive definite matrix.
pub fn cholesky<T: Scalar>(a: &Matrix<T>) -> Result<Matrix<T>> {
    let n = a.rows();
    let scale = a.max_abs();
    let floor = scale * T::epsilon() * T::from_count(n.max(1));
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > floor) {
            return Err(EamError::NotPositiveDefinite);
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(l)
}

/// Solves `L x = b` for lower-triangular `L`.
pub fn solve_lower<T: Scalar>(l: &Matrix<T>, b: &[T]) -> Vec<T> {
    let n = l.rows();
    let mut x = b.to_vec();
    for i in 0..n {
        let mut s = x[i];
        for k in 0..i {
            s -= l[(i, k)] * x[k];
        }
        x[i] = s / l[(i, i)];
    }
    x
}

/// Solves `L^T x = b` for lower-triangular `L`.
pub fn solve_lower_transpose<T: Scalar>(l: &Matrix<T>, b: &[T]) -> Vec<T> {
    let n = l.rows();
    let mut x = b.to_vec();
    for i in (0..n).rev() {
        let mut s = x[i];
        for k in (i + 1)..n {
            s -= l[(k, i)] * x[k];
        }
        x[i] = s / l[(i, i)];
    }
    x
}

/// Orthonormal basis of `{x : sum(x) = 0}` in `R^n`, realised implicitly as
/// columns `1..n` of the Householder reflector that maps `e_0` to `1/sqrt(n)`.
#[derive(Debug, Clone)]
pub struct MeanZeroBasis<T> {
    v: Vec<T>,
    beta: T,
}

impl<T: Scalar> MeanZeroBasis<T> {
    /// Requires `n >= 2`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 2, "mean-zero subspace needs dimension >= 2");
        let w = T::one() / T::from_count(n).sqrt();
        let mut v = vec![w; n];
        v[0] -= T::one();
        let vtv = dot(&v, &v);
        Self { v, beta: T::lit(2.0) / vtv }
    }

    pub fn ambient_dim(&self) -> usize {
        self.v.len()
    }

    pub fn dim(&self) -> usize {
        self.v.len() - 1
    }

    fn reflect(&self, x: &mut [T]) {
        let c = self.beta * dot(&self.v, x);
        for (xi, &vi) in x.iter_mut().zip(&self.v) {
            *xi -= c * vi;
        }
    }

    /// Coordinates of `x` in the basis (drops any component along the ones vector).
    pub fn restrict(&self, x: &[T]) -> Vec<T> {
        let mut y = x.to_vec();
        self.reflect(&mut y);
        y.split_off(1)
    }

    /// Ambient vector with the given basis coordinates.
    pub fn extend(&self, coords: &[T]) -> Vec<T> {
        assert_eq!(coords.len(), self.dim());
        let mut y = Vec::with_capacity(self.ambient_dim());
        y.push(T::zero());
        y.extend_from_slice(coords);
        self.reflect(&mut y);
        y
    }

    /// `Q^T A Q` for symmetric `A`, computed as a rank-2 update in O(n^2).
    pub fn congruence(&self, a: &Matrix<T>) -> Matrix<T> {
        let n = self.ambient_dim();
        assert!(a.is_square() && a.rows() == n);
        let p = a.mul_vec(&self.v);
        let vp = dot(&self.v, &p);
        let half = T::lit(0.5);
        let z: Vec<T> =
            p.iter().zip(&self.v).map(|(&pi, &vi)| self.beta * pi - half * self.beta * self.beta * vp * vi).collect();
        Matrix::from_fn(n - 1, n - 1, |i, j| {
            let (i, j) = (i + 1, j + 1);
            a[(i, j)] - self.v[i] * z[j] - z[i] * self.v[j]
        })
    }
}
