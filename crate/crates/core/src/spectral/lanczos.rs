//! Leading eigenvector by explicitly restarted Lanczos.
//!
//! Each cycle builds a Krylov basis (full reorthogonalization) from the
//! current iterate and restarts from the top Ritz vector. The Ritz value
//! therefore never decreases across cycles, like the Rayleigh quotient of
//! plain power iteration, but converges at the Krylov rate.

use super::{canonicalize, dot, norm, tridiagonal_eigen, EigenOptions, EigenPair, SymmetricOperator};
use crate::error::{Error, Result};
use crate::select::argmax;

/// Maximum Krylov dimension per restart cycle.
const KRYLOV_DIM: usize = 96;

/// Relative size of an off-diagonal below which the Krylov space is treated
/// as invariant.
const BREAKDOWN: f64 = 1e-13;

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for q in basis {
            let c = dot(w, q);
            axpy(-c, q, w);
        }
    }
}

/// First of `1/√m`, `e₀`, `e₁`, … with a usable component orthogonal to
/// `basis`.
fn fresh_direction(basis: &[Vec<f64>], m: usize) -> Option<Vec<f64>> {
    let ones = vec![1.0 / (m as f64).sqrt(); m];
    let candidates = std::iter::once(ones).chain((0..m).map(|j| {
        let mut e = vec![0.0; m];
        e[j] = 1.0;
        e
    }));
    for mut c in candidates {
        orthogonalize(&mut c, basis);
        let n = norm(&c);
        if n > 1e-8 {
            c.iter_mut().for_each(|x| *x /= n);
            return Some(c);
        }
    }
    None
}

/// Unit eigenvector for the largest eigenvalue of `op`.
///
/// The iteration starts from the standard basis vector of the largest
/// diagonal entry (lowest index on ties). If the Krylov space becomes
/// invariant before the residual target is met, it is extended once with
/// the all-ones direction. The zero operator yields `e₀`.
///
/// Succeeds once `‖Av − ρv‖ ≤ tol · ‖A‖_est`, where `‖A‖_est` is the largest
/// magnitude seen among Ritz values, tridiagonal entries and the diagonal.
pub fn leading_eigenvector<A: SymmetricOperator + ?Sized>(op: &A, opts: &EigenOptions) -> Result<EigenPair> {
    let m = op.dim();
    if m == 0 {
        return Err(Error::InvalidParams("operator has dimension 0".into()));
    }
    let diag = op.diagonal();
    let mut scale = diag.iter().fold(0.0f64, |a, d| a.max(d.abs()));
    let mut start = vec![0.0; m];
    start[argmax(&diag).unwrap_or(0)] = 1.0;

    let cap = m.min(KRYLOV_DIM);
    let mut extended = false;
    let mut used = 0;
    let mut trace = Vec::new();
    let mut w = vec![0.0; m];
    let mut ay = vec![0.0; m];

    loop {
        let remaining = opts.max_iter.saturating_sub(used).max(2);
        let steps = cap.min(remaining - 1);
        let mut basis = vec![start];
        let mut alphas = Vec::with_capacity(steps);
        let mut betas = Vec::with_capacity(steps);
        loop {
            let j = basis.len() - 1;
            op.apply(&basis[j], &mut w);
            used += 1;
            let alpha = dot(&w, &basis[j]);
            alphas.push(alpha);
            scale = scale.max(alpha.abs());
            if basis.len() >= steps {
                break;
            }
            orthogonalize(&mut w, &basis);
            let beta = norm(&w);
            if beta <= BREAKDOWN * scale.max(f64::MIN_POSITIVE) {
                if extended || basis.len() == m {
                    break;
                }
                extended = true;
                match fresh_direction(&basis, m) {
                    Some(q) => {
                        betas.push(0.0);
                        basis.push(q);
                        continue;
                    }
                    None => break,
                }
            }
            scale = scale.max(beta);
            betas.push(beta);
            basis.push(w.iter().map(|x| x / beta).collect());
        }

        let (vals, vecs) = tridiagonal_eigen(&alphas, &betas);
        let r = vals.len();
        let top_val = vals[r - 1];
        let top = (0..r).find(|&j| vals[j] >= top_val).unwrap_or(r - 1);
        scale = scale.max(top_val.abs()).max(vals[0].abs());

        let mut y = vec![0.0; m];
        for (i, q) in basis.iter().enumerate() {
            axpy(vecs[i * r + top], q, &mut y);
        }
        let ny = norm(&y);
        y.iter_mut().for_each(|x| *x /= ny);

        op.apply(&y, &mut ay);
        used += 1;
        let rho = dot(&y, &ay);
        let residual = ay.iter().zip(&y).map(|(a, v)| (a - rho * v).powi(2)).sum::<f64>().sqrt();
        trace.push(rho);

        if residual <= opts.tol * scale || scale == 0.0 {
            canonicalize(&mut y);
            return Ok(EigenPair {
                vector: y,
                value: rho,
                residual,
                iterations: used,
                trace,
            });
        }
        if used >= opts.max_iter {
            canonicalize(&mut y);
            return Err(Error::Convergence {
                iterations: used,
                residual,
                last: Box::new(y),
            });
        }
        start = y;
    }
}
