//! Sample covariance of data rows restricted to a coordinate subset,
//!
//! ```text
//! Σ̂|_T = (1/n) Σᵢ (xᵢ − x̄)|_T (xᵢ − x̄)|_Tᵀ,
//! ```
//!
//! either materialized as an `m × m` matrix or applied implicitly through
//! the centered rows.

use super::{SymMatrix, SymmetricOperator};
use crate::error::{Error, Result};
use crate::matrix::Rows;
use crate::par::{Execution, ROW_CHUNK};

/// Restricted dimension above which [`CovarianceForm::Auto`] stays implicit.
pub const IMPLICIT_THRESHOLD: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CovarianceForm {
    #[default]
    Auto,
    Explicit,
    Implicit,
}

/// Column means over `rows`, restricted to `cols` (all columns if `None`).
pub fn column_means(rows: Rows<'_>, cols: Option<&[usize]>, exec: Execution) -> Vec<f64> {
    let n = rows.len();
    let dim = cols.map_or(rows.cols(), <[usize]>::len);
    let mut sums = exec.sum_vectors(n, ROW_CHUNK, dim, |range, acc| {
        for i in range {
            let row = rows.row(i);
            match cols {
                Some(c) => row.add_scaled_at(c, 1.0, acc),
                None => row.add_scaled_to(1.0, acc),
            }
        }
    });
    if n > 0 {
        sums.iter_mut().for_each(|s| *s /= n as f64);
    }
    sums
}

fn centered_sq_sums(rows: Rows<'_>, cols: Option<&[usize]>, mean: &[f64], exec: Execution) -> Vec<f64> {
    exec.sum_vectors(rows.len(), ROW_CHUNK, mean.len(), |range, acc| {
        for i in range {
            let row = rows.row(i);
            for (t, a) in acc.iter_mut().enumerate() {
                let j = cols.map_or(t, |c| c[t]);
                let d = row.get(j) - mean[t];
                *a += d * d;
            }
        }
    })
}

/// Empirical variance (1/n normalization) of every column.
pub fn column_variances(rows: Rows<'_>, exec: Execution) -> Vec<f64> {
    let mean = column_means(rows, None, exec);
    let n = rows.len().max(1) as f64;
    centered_sq_sums(rows, None, &mean, exec)
        .into_iter()
        .map(|s| s / n)
        .collect()
}

/// Materialized covariance of the columns `cols`.
fn explicit_covariance(rows: Rows<'_>, cols: &[usize], exec: Execution) -> SymMatrix {
    let n = rows.len();
    let m = cols.len();
    let mean = column_means(rows, Some(cols), exec);

    let mut gathered = vec![0.0; n * m];
    exec.for_each_block_mut(&mut gathered, m * ROW_CHUNK, |start, block| {
        let first = start / m;
        for (r, out) in block.chunks_mut(m).enumerate() {
            let row = rows.row(first + r);
            for ((o, &j), mu) in out.iter_mut().zip(cols).zip(&mean) {
                *o = row.get(j) - mu;
            }
        }
    });
    // Column-major copy so that every entry is a contiguous dot product.
    let mut columns = vec![0.0; n * m];
    for i in 0..n {
        for a in 0..m {
            columns[a * n + i] = gathered[i * m + a];
        }
    }
    drop(gathered);

    let upper = exec.map(m, |a| {
        let za = &columns[a * n..(a + 1) * n];
        (a..m)
            .map(|b| {
                let zb = &columns[b * n..(b + 1) * n];
                za.iter().zip(zb).map(|(x, y)| x * y).sum::<f64>() / n as f64
            })
            .collect::<Vec<f64>>()
    });
    let mut out = SymMatrix::zeros(m);
    for (a, row) in upper.into_iter().enumerate() {
        for (off, v) in row.into_iter().enumerate() {
            out.set(a, a + off, v);
        }
    }
    out
}

/// Covariance operator applied through the centered rows:
/// `Σ̂x = (1/n) Σᵢ zᵢ ⟨zᵢ, x⟩` with `zᵢ = (xᵢ − x̄)|_T`. Holds a read-only
/// view of the data.
#[derive(Clone, Debug)]
pub struct CenteredCovariance<'a> {
    rows: Rows<'a>,
    cols: Option<Vec<usize>>,
    mean: Vec<f64>,
    diag: Vec<f64>,
    exec: Execution,
}

impl<'a> CenteredCovariance<'a> {
    /// `cols = None` uses every column.
    pub fn new(rows: Rows<'a>, cols: Option<Vec<usize>>, exec: Execution) -> Self {
        let cols = cols.filter(|c| !(c.len() == rows.cols() && c.iter().enumerate().all(|(i, &j)| i == j)));
        let mean = column_means(rows, cols.as_deref(), exec);
        let n = rows.len().max(1) as f64;
        let diag = centered_sq_sums(rows, cols.as_deref(), &mean, exec)
            .into_iter()
            .map(|s| s / n)
            .collect();
        CenteredCovariance {
            rows,
            cols,
            mean,
            diag,
            exec,
        }
    }

    fn global(&self, t: usize) -> usize {
        self.cols.as_ref().map_or(t, |c| c[t])
    }
}

impl SymmetricOperator for CenteredCovariance<'_> {
    fn dim(&self) -> usize {
        self.mean.len()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let m = self.dim();
        let mean_x: f64 = self.mean.iter().zip(x).map(|(a, b)| a * b).sum();
        let cols = self.cols.as_deref();
        let rows = self.rows;
        // Slot m accumulates Σᵢ tᵢ for the mean correction.
        let acc = self.exec.sum_vectors(rows.len(), ROW_CHUNK, m + 1, |range, acc| {
            let (vec_part, sum_part) = acc.split_at_mut(m);
            for i in range {
                let row = rows.row(i);
                let t = match cols {
                    Some(c) => row.dot_at(c, x),
                    None => row.dot(x),
                } - mean_x;
                match cols {
                    Some(c) => row.add_scaled_at(c, t, vec_part),
                    None => row.add_scaled_to(t, vec_part),
                }
                sum_part[0] += t;
            }
        });
        let n = rows.len().max(1) as f64;
        let t_sum = acc[m];
        for ((o, a), mu) in out.iter_mut().zip(&acc[..m]).zip(&self.mean) {
            *o = (a - t_sum * mu) / n;
        }
    }

    fn diagonal(&self) -> Vec<f64> {
        self.diag.clone()
    }

    fn principal_submatrix(&self, idx: &[usize]) -> SymMatrix {
        let cols: Vec<usize> = idx.iter().map(|&t| self.global(t)).collect();
        explicit_covariance(self.rows, &cols, self.exec)
    }
}

#[derive(Clone, Debug)]
enum Repr<'a> {
    Explicit(SymMatrix),
    Implicit(CenteredCovariance<'a>),
}

/// `Σ̂|_T` for an index set `T`, explicit or implicit.
#[derive(Clone, Debug)]
pub struct RestrictedCovariance<'a> {
    indices: Vec<usize>,
    repr: Repr<'a>,
}

impl<'a> RestrictedCovariance<'a> {
    /// The index set `T`, in the order used for the operator's coordinates.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn is_implicit(&self) -> bool {
        matches!(self.repr, Repr::Implicit(_))
    }

    pub fn to_matrix(&self) -> SymMatrix {
        match &self.repr {
            Repr::Explicit(m) => m.clone(),
            Repr::Implicit(op) => op.principal_submatrix(&(0..op.dim()).collect::<Vec<_>>()),
        }
    }
}

impl SymmetricOperator for RestrictedCovariance<'_> {
    fn dim(&self) -> usize {
        self.indices.len()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        match &self.repr {
            Repr::Explicit(m) => m.apply(x, out),
            Repr::Implicit(op) => op.apply(x, out),
        }
    }

    fn diagonal(&self) -> Vec<f64> {
        match &self.repr {
            Repr::Explicit(m) => m.diagonal(),
            Repr::Implicit(op) => op.diagonal(),
        }
    }

    fn principal_submatrix(&self, idx: &[usize]) -> SymMatrix {
        match &self.repr {
            Repr::Explicit(m) => m.principal_submatrix(idx),
            Repr::Implicit(op) => op.principal_submatrix(idx),
        }
    }
}

pub fn restricted_covariance<'a>(rows: Rows<'a>, indices: &[usize]) -> Result<RestrictedCovariance<'a>> {
    restricted_covariance_with(rows, indices, CovarianceForm::Auto, Execution::default())
}

pub fn restricted_covariance_with<'a>(
    rows: Rows<'a>,
    indices: &[usize],
    form: CovarianceForm,
    exec: Execution,
) -> Result<RestrictedCovariance<'a>> {
    if rows.len() < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            got: rows.len(),
        });
    }
    let p = rows.cols();
    if indices.is_empty() {
        return Err(Error::InvalidSupport("empty index set".into()));
    }
    let mut seen = vec![false; p];
    for &j in indices {
        if j >= p {
            return Err(Error::InvalidSupport(format!("index {j} out of range 0..{p}")));
        }
        if std::mem::replace(&mut seen[j], true) {
            return Err(Error::InvalidSupport(format!("duplicate index {j}")));
        }
    }
    let implicit = match form {
        CovarianceForm::Auto => indices.len() > IMPLICIT_THRESHOLD,
        CovarianceForm::Explicit => false,
        CovarianceForm::Implicit => true,
    };
    let repr = if implicit {
        Repr::Implicit(CenteredCovariance::new(rows, Some(indices.to_vec()), exec))
    } else {
        Repr::Explicit(explicit_covariance(rows, indices, exec))
    };
    Ok(RestrictedCovariance {
        indices: indices.to_vec(),
        repr,
    })
}
