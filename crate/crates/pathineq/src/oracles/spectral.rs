//! Spectral gap and asymptotic variance by dense symmetric eigensolving.
//!
//! The generator L f(x) = sum_y q(x, y)(f(y) - f(x)) is self-adjoint in
//! L2(mu) for reversible models. Conjugating by sqrt(mu) symmetrizes it:
//!
//! ```text
//!     S(x, y) = (-L)(x, y) sqrt(mu(x) / mu(y))
//!             = { sum_z q(x, z)          x == y
//!               { -Q(x, y)/sqrt(mu(x) mu(y))   x ~ y
//! ```
//!
//! S is positive semidefinite with kernel spanned by sqrt(mu); on connected
//! graphs the zero eigenvalue is simple. The optimal Poincare constant is
//! the reciprocal of the second-smallest eigenvalue, and the minimizer
//! transforms back to an eigenfunction of -L.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::model::ReversibleModel;

/// Off-diagonal Frobenius norm at which the Jacobi sweep stops.
const JACOBI_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigenvalue threshold separating the (simple) zero eigenvalue from the
/// spectral gap.
const GAP_FLOOR: f64 = 1e-10;

/// Pivot threshold (relative to the matrix scale) below which Gaussian
/// elimination reports a singular system.
const PIVOT_REL_TOL: f64 = 1e-12;

/// Cyclic Jacobi eigensolver for symmetric matrices. Returns eigenvalues in
/// ascending order and the matching eigenvectors as columns.
pub(crate) fn jacobi_eigh(a: &Array2<f64>) -> Result<(Vec<f64>, Array2<f64>)> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "jacobi_eigh needs a square matrix");
    let mut m = a.clone();
    let mut v: Array2<f64> = Array2::eye(n);
    let scale = a.iter().fold(0.0f64, |acc, &x| acc.max(x.abs())).max(1.0);

    let off = |m: &Array2<f64>| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[[i, j]] * m[[i, j]];
                }
            }
        }
        s.sqrt()
    };

    let mut converged = n < 2;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off(&m) <= JACOBI_TOL * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[[p, q]];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (m[[q, q]] - m[[p, p]]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[[k, p]];
                    let akq = m[[k, q]];
                    m[[k, p]] = c * akp - s * akq;
                    m[[k, q]] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[[p, k]];
                    let aqk = m[[q, k]];
                    m[[p, k]] = c * apk - s * aqk;
                    m[[q, k]] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged && off(&m) > JACOBI_TOL * scale {
        return Err(Error::NonConvergence(format!(
            "jacobi sweep limit {JACOBI_MAX_SWEEPS} reached with off-norm {:e}",
            off(&m)
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[[i, i]].partial_cmp(&m[[j, j]]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| m[[i, i]]).collect();
    let mut vectors = Array2::zeros((n, n));
    for (col, &i) in order.iter().enumerate() {
        for r in 0..n {
            vectors[[r, col]] = v[[r, i]];
        }
    }
    Ok((values, vectors))
}

/// The spectral gap, its reciprocal (the optimal Poincare constant), and a
/// gap eigenfunction normalized to mu(f^2) = 1.
#[derive(Debug, Clone)]
pub struct SpectralGap {
    /// Optimal Poincare constant 1 / lambda_1.
    pub c_p: f64,
    /// Smallest nonzero eigenvalue of -L.
    pub lambda_1: f64,
    /// Eigenfunction of -L for lambda_1 (mean zero, mu(f^2) = 1).
    pub eigenfunction: Vec<f64>,
}

/// Builds the symmetrized generator matrix S.
fn symmetrized_generator(model: &ReversibleModel) -> Array2<f64> {
    let g = model.graph();
    let n = g.vertex_count();
    let mu = model.mu();
    let mut s = Array2::zeros((n, n));
    for x in 0..n {
        s[[x, x]] = g.out_edges(x).iter().map(|&e| g.edge(e).rate).sum::<f64>();
    }
    for (eid, e) in g.edges().iter().enumerate() {
        s[[e.from, e.to]] = -model.conductance(eid) / (mu[e.from] * mu[e.to]).sqrt();
    }
    s
}

/// Exact optimal Poincare constant via the symmetrized spectrum. The zero
/// eigenvalue must be simple (guaranteed by connectivity); a second
/// eigenvalue at or below the floor is reported as degenerate.
pub fn spectral_cp(model: &ReversibleModel) -> Result<SpectralGap> {
    let n = model.vertex_count();
    if n < 2 {
        return Err(Error::BadParams(
            "spectral gap needs at least two vertices".into(),
        ));
    }
    let s = symmetrized_generator(model);
    let (values, vectors) = jacobi_eigh(&s)?;
    if values[0].abs() > GAP_FLOOR {
        return Err(Error::DegenerateSpectrum);
    }
    let lambda_1 = values[1];
    if lambda_1 <= GAP_FLOOR {
        return Err(Error::DegenerateSpectrum);
    }
    let mu = model.mu();
    let mut f: Vec<f64> = (0..n).map(|x| vectors[[x, 1]] / mu[x].sqrt()).collect();
    let norm: f64 = (0..n).map(|x| f[x] * f[x] * mu[x]).sum::<f64>().sqrt();
    for fx in &mut f {
        *fx /= norm;
    }
    Ok(SpectralGap {
        c_p: 1.0 / lambda_1,
        lambda_1,
        eigenfunction: f,
    })
}

/// Asymptotic variance of the time average of h:
///
/// ```text
///     sigma^2(h) = 2 <(-L)^{-1} hbar, hbar>_mu,     hbar = h - mu(h),
/// ```
///
/// by a direct linear solve restricted to the mean-zero subspace. The
/// rank-one update B = (-L) + 1 mu^T is nonsingular on connected graphs and
/// its solution of B u = hbar is exactly the mean-zero solution of
/// -L u = hbar.
pub fn asymptotic_variance(model: &ReversibleModel, h: &[f64]) -> Result<f64> {
    let g = model.graph();
    let n = g.vertex_count();
    if h.len() != n {
        return Err(Error::BadParams(format!(
            "observable has {} entries, expected {n}",
            h.len()
        )));
    }
    let mu = model.mu();
    let mean: f64 = (0..n).map(|x| h[x] * mu[x]).sum();
    let hbar: Vec<f64> = h.iter().map(|&v| v - mean).collect();

    let mut a = Array2::zeros((n, n));
    for x in 0..n {
        let total: f64 = g.out_edges(x).iter().map(|&e| g.edge(e).rate).sum();
        for y in 0..n {
            a[[x, y]] = mu[y];
        }
        a[[x, x]] += total;
    }
    for e in g.edges() {
        a[[e.from, e.to]] -= e.rate;
    }

    let u = solve_dense(a, hbar.clone())?;
    Ok(2.0 * (0..n).map(|x| u[x] * hbar[x] * mu[x]).sum::<f64>())
}

/// Gaussian elimination with partial pivoting.
fn solve_dense(mut a: Array2<f64>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    let scale = a.iter().fold(0.0f64, |acc, &x| acc.max(x.abs())).max(1.0);
    for col in 0..n {
        let mut pivot = col;
        for r in (col + 1)..n {
            if a[[r, col]].abs() > a[[pivot, col]].abs() {
                pivot = r;
            }
        }
        if a[[pivot, col]].abs() <= PIVOT_REL_TOL * scale {
            return Err(Error::SingularSystem);
        }
        if pivot != col {
            for c in 0..n {
                let tmp = a[[col, c]];
                a[[col, c]] = a[[pivot, c]];
                a[[pivot, c]] = tmp;
            }
            b.swap(col, pivot);
        }
        for r in (col + 1)..n {
            let factor = a[[r, col]] / a[[col, col]];
            if factor == 0.0 {
                continue;
            }
            for c in col..n {
                a[[r, c]] -= factor * a[[col, c]];
            }
            b[r] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for c in (row + 1)..n {
            acc -= a[[row, c]] * x[c];
        }
        x[row] = acc / a[[row, row]];
    }
    Ok(x)
}
