//! Dense linear algebra for the estimators: restricted sample covariances,
//! the leading eigenvector of a symmetric operator and a truncated power
//! method for k-sparse principal components.

mod covariance;
mod lanczos;
mod tpower;
mod tridiagonal;

pub use covariance::{
    column_means, column_variances, restricted_covariance, restricted_covariance_with, CenteredCovariance,
    CovarianceForm, RestrictedCovariance, IMPLICIT_THRESHOLD,
};
pub use lanczos::leading_eigenvector;
pub use tpower::{truncated_power_method, SparseEigen};
pub use tridiagonal::tridiagonal_eigen;

/// A real symmetric linear operator on `ℝ^dim`.
pub trait SymmetricOperator: Sync {
    fn dim(&self) -> usize;

    /// `out = A x`.
    fn apply(&self, x: &[f64], out: &mut [f64]);

    fn diagonal(&self) -> Vec<f64>;

    /// The principal submatrix `A[idx, idx]`, materialized.
    fn principal_submatrix(&self, idx: &[usize]) -> SymMatrix;
}

/// A dense symmetric matrix in full row-major storage.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        SymMatrix {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Builds from row-major data, symmetrizing as `(A + Aᵀ)/2`.
    pub fn from_row_major(dim: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), dim * dim);
        let mut m = SymMatrix { dim, data };
        for i in 0..dim {
            for j in i + 1..dim {
                let avg = 0.5 * (m.get(i, j) + m.get(j, i));
                m.set(i, j, avg);
            }
        }
        m
    }

    /// `scale · uuᵀ + shift · I`.
    pub fn spiked(u: &[f64], scale: f64, shift: f64) -> Self {
        let dim = u.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.data[i * dim + j] = scale * u[i] * u[j] + if i == j { shift } else { 0.0 };
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
        self.data[j * self.dim + i] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }
}

impl SymmetricOperator for SymMatrix {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    fn principal_submatrix(&self, idx: &[usize]) -> SymMatrix {
        let m = idx.len();
        let mut data = vec![0.0; m * m];
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                data[a * m + b] = self.get(i, j);
            }
        }
        SymMatrix { dim: m, data }
    }
}

/// Solver controls shared by [`leading_eigenvector`] and
/// [`truncated_power_method`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenOptions {
    /// Relative residual target `‖Av − ρv‖ ≤ tol · ‖A‖`.
    pub tol: f64,
    /// Budget of operator applications.
    pub max_iter: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            tol: 1e-9,
            max_iter: 1000,
        }
    }
}

/// A unit eigenvector estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenPair {
    pub vector: Vec<f64>,
    /// Rayleigh quotient of `vector`.
    pub value: f64,
    pub residual: f64,
    /// Operator applications used.
    pub iterations: usize,
    /// Rayleigh quotient after each restart; non-decreasing.
    pub trace: Vec<f64>,
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Scales `v` to unit norm and flips it so that its largest-magnitude
/// coordinate (lowest index on ties) is nonnegative. Zero vectors are left
/// untouched.
pub fn canonicalize(v: &mut [f64]) {
    let n = norm(v);
    if n == 0.0 || !n.is_finite() {
        return;
    }
    let mut lead = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[lead].abs() {
            lead = i;
        }
    }
    let s = if v[lead] < 0.0 { -1.0 / n } else { 1.0 / n };
    for x in v.iter_mut() {
        *x *= s;
    }
}
