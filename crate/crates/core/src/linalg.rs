//! Dense complex linear algebra shared by the oracle and compiled paths.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Eigenpairs of a Hermitian matrix, ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn new(matrix: &CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::invalid("eigendecomposition of a non-square matrix"));
        }
        let n = matrix.nrows();
        if n == 0 {
            return Ok(HermitianEigen {
                values: Vec::new(),
                vectors: CMatrix::zeros(0, 0),
            });
        }
        let eig = matrix.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
        Ok(HermitianEigen { values, vectors })
    }

    /// `V diag(f(λ)) V†`.
    pub fn map(&self, f: impl Fn(f64) -> Complex64) -> CMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            scaled.column_mut(j).iter_mut().for_each(|z| *z *= w);
        }
        let mut out = CMatrix::zeros(n, n);
        out.gemm(ONE, &scaled, &self.vectors.adjoint(), ZERO);
        out
    }

    /// `exp(-i H τ)`.
    pub fn propagator(&self, tau: f64) -> CMatrix {
        self.map(|lambda| Complex64::from_polar(1.0, -lambda * tau))
    }
}

/// `max |U†U - I|` over all entries.
pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    let n = u.nrows();
    let gram = u.adjoint() * u;
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((gram[(i, j)] - target).norm());
        }
    }
    worst
}

/// `max |M - M†|` over all entries.
pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..=i {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn matmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(a.nrows(), b.ncols());
    out.gemm(ONE, a, b, ZERO);
    out
}

/// `base^exponent` by binary exponentiation.
pub fn matrix_power(base: &CMatrix, mut exponent: u64) -> CMatrix {
    let n = base.nrows();
    let mut result = CMatrix::identity(n, n);
    let mut square = base.clone();
    let mut first = true;
    while exponent > 0 {
        if exponent & 1 == 1 {
            result = if first {
                square.clone()
            } else {
                matmul(&result, &square)
            };
            first = false;
        }
        exponent >>= 1;
        if exponent > 0 {
            square = matmul(&square, &square);
        }
    }
    result
}
