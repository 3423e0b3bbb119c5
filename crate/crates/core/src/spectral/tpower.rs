//! Truncated power method for k-sparse leading eigenvectors.

use super::{canonicalize, dot, leading_eigenvector, norm, EigenOptions, SymmetricOperator};
use crate::error::{Error, Result};
use crate::select::{top_k_by_magnitude, top_k_by_value};

#[derive(Clone, Debug, PartialEq)]
pub struct SparseEigen {
    /// Unit vector with at most `k` nonzeros.
    pub vector: Vec<f64>,
    pub value: f64,
    /// Sorted support (exactly `k` indices; some entries may be zero).
    pub support: Vec<usize>,
    pub iterations: usize,
    /// Rayleigh quotient per iteration, ending with the refined value.
    pub trace: Vec<f64>,
}

/// Alternates `v ← A v`, hard-thresholding to the `k` largest magnitudes and
/// renormalization, starting from the indicator of the `k` largest diagonal
/// entries. Once the support is stable and the Rayleigh quotient has
/// settled, the vector is refined to the exact leading eigenvector of `A`
/// restricted to that support.
pub fn truncated_power_method<A: SymmetricOperator + ?Sized>(
    op: &A,
    k: usize,
    opts: &EigenOptions,
) -> Result<SparseEigen> {
    let m = op.dim();
    if k == 0 || k > m {
        return Err(Error::InvalidParams(format!("need 1 ≤ k ≤ {m}, got k = {k}")));
    }
    if k == m {
        let e = leading_eigenvector(op, opts)?;
        return Ok(SparseEigen {
            vector: e.vector,
            value: e.value,
            support: (0..m).collect(),
            iterations: e.iterations,
            trace: e.trace,
        });
    }

    let mut support = top_k_by_value(&op.diagonal(), k);
    let mut v = vec![0.0; m];
    let w0 = 1.0 / (k as f64).sqrt();
    for &j in &support {
        v[j] = w0;
    }

    let mut av = vec![0.0; m];
    let mut trace: Vec<f64> = Vec::new();
    let mut previous_support: Option<Vec<usize>> = None;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        op.apply(&v, &mut av);
        iterations += 1;
        let rho = dot(&v, &av);
        if let (Some(prev), Some(&last)) = (&previous_support, trace.last()) {
            if *prev == support && (rho - last).abs() <= opts.tol * rho.abs().max(f64::MIN_POSITIVE) {
                trace.push(rho);
                converged = true;
                break;
            }
        }
        trace.push(rho);

        let next_support = top_k_by_magnitude(&av, k);
        let mut next = vec![0.0; m];
        for &j in &next_support {
            next[j] = av[j];
        }
        let n = norm(&next);
        if n == 0.0 {
            converged = true;
            break;
        }
        next.iter_mut().for_each(|x| *x /= n);
        v = next;
        previous_support = Some(std::mem::replace(&mut support, next_support));
    }
    if !converged {
        canonicalize(&mut v);
        let residual = trace.last().copied().unwrap_or(f64::NAN);
        return Err(Error::Convergence {
            iterations,
            residual,
            last: Box::new(v),
        });
    }

    let sub = op.principal_submatrix(&support);
    let refined = leading_eigenvector(&sub, opts)?;
    let mut vector = vec![0.0; m];
    for (&j, &x) in support.iter().zip(&refined.vector) {
        vector[j] = x;
    }
    canonicalize(&mut vector);
    trace.push(refined.value);
    Ok(SparseEigen {
        vector,
        value: refined.value,
        support,
        iterations: iterations + refined.iterations,
        trace,
    })
}
