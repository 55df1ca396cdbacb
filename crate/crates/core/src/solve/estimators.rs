use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::lp::{lp_solve, LinearProgram, LpOutcome};
use crate::design::Design;
use crate::error::{domain, Error, Result};
use crate::vecops::{norm1, norm_inf, sub};

/// `sign(a) * max(|a| - t, 0)`
pub fn soft_threshold(a: f64, t: f64) -> f64 {
    if a > t {
        a - t
    } else if a < -t {
        a + t
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LassoOptions {
    pub tol: f64,
    /// Maximum number of full coordinate sweeps.
    pub max_iter: usize,
}

impl Default for LassoOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LassoSolution {
    pub beta: Vec<f64>,
    pub kkt_residual: f64,
    pub iterations: usize,
    /// `||y - X beta||_2^2 + lambda ||beta||_1`
    pub objective: f64,
    pub converged: bool,
}

/// Lasso with objective `||y - X beta||_2^2 + lambda ||beta||_1`.
///
/// There is no 1/2 or 1/n in front of the square loss, so each coordinate is
/// soft-thresholded at `lambda / 2` and `beta = 0` is optimal as soon as
/// `lambda >= 2 ||X^T y||_inf`.
pub fn lasso<D: Design + ?Sized>(x: &D, y: &[f64], lambda: f64) -> Result<LassoSolution> {
    lasso_with(x, y, lambda, LassoOptions::default())
}

/// Cyclic coordinate descent (coordinates `0..p` in order). Stops when the
/// KKT residual `max_j r_j` falls to `opts.tol`, where
/// `r_j = |2 X_j^T (y - X beta) - lambda sign(beta_j)|` for `beta_j != 0` and
/// `max(0, |2 X_j^T (y - X beta)| - lambda)` otherwise.
pub fn lasso_with<D: Design + ?Sized>(x: &D, y: &[f64], lambda: f64, opts: LassoOptions) -> Result<LassoSolution> {
    if !(lambda >= 0.0) {
        return domain("lambda must be nonnegative");
    }
    if y.len() != x.nrows() {
        return domain(format!("y has length {}, expected {}", y.len(), x.nrows()));
    }
    let p = x.ncols();
    let norms: Vec<f64> = (0..p).map(|j| x.col_norm_sq(j)).collect();
    let mut beta = vec![0.0; p];
    let mut resid = y.to_vec();
    let half = lambda / 2.0;

    let kkt = |beta: &[f64], resid: &[f64]| -> f64 {
        (0..p)
            .map(|j| {
                let g = 2.0 * x.col_dot(j, resid);
                if beta[j] != 0.0 {
                    (g - lambda * beta[j].signum()).abs()
                } else {
                    (g.abs() - lambda).max(0.0)
                }
            })
            .fold(0.0, f64::max)
    };

    let mut residual = kkt(&beta, &resid);
    let mut iterations = 0;
    while residual > opts.tol && iterations < opts.max_iter {
        for j in 0..p {
            if norms[j] == 0.0 {
                continue;
            }
            let rho = x.col_dot(j, &resid) + norms[j] * beta[j];
            let updated = soft_threshold(rho, half) / norms[j];
            let delta = updated - beta[j];
            if delta != 0.0 {
                x.col_axpy(j, -delta, &mut resid);
                beta[j] = updated;
            }
        }
        iterations += 1;
        residual = kkt(&beta, &resid);
    }
    let objective = resid.iter().map(|r| r * r).sum::<f64>() + lambda * norm1(&beta);
    Ok(LassoSolution {
        beta,
        kkt_residual: residual,
        iterations,
        objective,
        converged: residual <= opts.tol,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DantzigSolution {
    pub beta: Vec<f64>,
    /// `||X^T (y - X beta)||_inf`
    pub slack: f64,
    /// `||beta||_1`
    pub objective: f64,
    pub status: String,
}

fn xt_residual<D: Design + ?Sized>(x: &D, y: &[f64], beta: &[f64]) -> Result<Vec<f64>> {
    let fit = x.matvec(beta)?;
    x.transpose_matvec(&sub(y, &fit))
}

/// Dantzig selector `min ||beta||_1  s.t.  ||X^T (y - X beta)||_inf <= lambda`.
///
/// Posed as an LP in `beta = u - v` with one slack per inequality:
/// `G(u - v) + s_a = X^T y + lambda`, `-G(u - v) + s_b = lambda - X^T y`,
/// where `G = X^T X`.
pub fn dantzig<D: Design + ?Sized>(x: &D, y: &[f64], lambda: f64) -> Result<DantzigSolution> {
    if !(lambda >= 0.0) {
        return domain("lambda must be nonnegative");
    }
    if y.len() != x.nrows() {
        return domain(format!("y has length {}, expected {}", y.len(), x.nrows()));
    }
    let p = x.ncols();
    let dense = x.to_dense();
    let gram = dense.transpose() * &dense;
    let xty = x.transpose_matvec(y)?;
    let mut a = DMatrix::zeros(2 * p, 4 * p);
    let mut b = vec![0.0; 2 * p];
    for i in 0..p {
        for j in 0..p {
            let g = gram[(i, j)];
            a[(i, j)] = g;
            a[(i, p + j)] = -g;
            a[(p + i, j)] = -g;
            a[(p + i, p + j)] = g;
        }
        a[(i, 2 * p + i)] = 1.0;
        a[(p + i, 3 * p + i)] = 1.0;
        b[i] = xty[i] + lambda;
        b[p + i] = lambda - xty[i];
    }
    let mut cost = vec![1.0; 2 * p];
    cost.resize(4 * p, 0.0);
    let sol = match lp_solve(&LinearProgram::new(cost, a, b)?)? {
        LpOutcome::Optimal(s) => s,
        LpOutcome::Infeasible => return Err(Error::Infeasible),
        LpOutcome::Unbounded => {
            debug_assert!(false, "Dantzig LP cannot be unbounded");
            return Err(Error::Unbounded);
        }
    };
    let beta: Vec<f64> = (0..p).map(|j| sol.x[j] - sol.x[p + j]).collect();
    let slack = norm_inf(&xt_residual(x, y, &beta)?);
    Ok(DantzigSolution {
        objective: norm1(&beta),
        beta,
        slack,
        status: "optimal".into(),
    })
}

/// Minimum-l1 solution of `X beta = y` (`beta = u - v`, `u, v >= 0`).
/// Rows of `X` that are identically zero are dropped after checking `y` is
/// zero there.
pub fn basis_pursuit<D: Design + ?Sized>(x: &D, y: &[f64]) -> Result<Vec<f64>> {
    if y.len() != x.nrows() {
        return domain(format!("y has length {}, expected {}", y.len(), x.nrows()));
    }
    let dense = x.to_dense();
    let p = dense.ncols();
    let scale = y.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut rows = Vec::new();
    for r in 0..dense.nrows() {
        if dense.row(r).iter().all(|v| *v == 0.0) {
            if y[r].abs() > 1e-12 * scale {
                return Err(Error::Infeasible);
            }
        } else {
            rows.push(r);
        }
    }
    let mut a = DMatrix::zeros(rows.len(), 2 * p);
    let mut b = vec![0.0; rows.len()];
    for (k, &r) in rows.iter().enumerate() {
        for j in 0..p {
            a[(k, j)] = dense[(r, j)];
            a[(k, p + j)] = -dense[(r, j)];
        }
        b[k] = y[r];
    }
    let sol = lp_solve(&LinearProgram::new(vec![1.0; 2 * p], a, b)?)?.into_result()?;
    Ok((0..p).map(|j| sol.x[j] - sol.x[p + j]).collect())
}

/// Least squares restricted to the columns in `support`, zeros elsewhere.
/// Uses an SVD, so a rank-deficient column block yields the minimum-norm fit.
pub fn ols_on_support<D: Design + ?Sized>(x: &D, y: &[f64], support: &[usize]) -> Result<Vec<f64>> {
    let p = x.ncols();
    if y.len() != x.nrows() {
        return domain(format!("y has length {}, expected {}", y.len(), x.nrows()));
    }
    if let Some(&bad) = support.iter().find(|&&i| i >= p) {
        return domain(format!("support index {bad} out of range"));
    }
    let mut beta = vec![0.0; p];
    if support.is_empty() {
        return Ok(beta);
    }
    let n = x.nrows();
    let mut sub_x = DMatrix::zeros(n, support.len());
    for (k, &j) in support.iter().enumerate() {
        let mut col = vec![0.0; n];
        x.col_axpy(j, 1.0, &mut col);
        sub_x.set_column(k, &DVector::from_vec(col));
    }
    let svd = sub_x.svd(true, true);
    let smax = svd.singular_values.max();
    let eps = 1e-12 * smax.max(f64::MIN_POSITIVE) * n.max(support.len()) as f64;
    let coef = svd
        .solve(&DVector::from_column_slice(y), eps)
        .map_err(|e| Error::Domain(e.to_string()))?;
    for (k, &j) in support.iter().enumerate() {
        beta[j] = coef[k];
    }
    Ok(beta)
}
