//! Exact recovery, the OLS oracle comparison and the optimality factors.

use serde::{Deserialize, Serialize};

use crate::design::{Design, DesignMatrix};
use crate::error::{domain, Error, Result};
use crate::graph::BipartiteGraph;
use crate::noise::NoiseSampler;
use crate::rng::Rng;
use crate::solve::{basis_pursuit, dantzig, lasso, ols_on_support};
use crate::vecops::{add, norm1, norm2, sub};
use crate::verify::ExpansionCertificate;

use super::config::{make_target, Estimator, RecoveryInstance, TargetKind, TargetSpec};
use crate::noise::thresholds;

/// Relative l1 error accepted as exact recovery.
pub const RECOVERY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryReport {
    pub s: usize,
    pub trials: u64,
    pub recovered: u64,
    /// Trials whose LP failed.
    pub failures: u64,
    pub max_relative_error: f64,
    pub pass: bool,
    pub certificate: Option<ExpansionCertificate>,
}

/// Basis pursuit on `y = X beta*` for random `s`-sparse targets (trial `k`
/// draws its target from `Rng::for_trial(seed, k)`).
///
/// Requires a certificate that `graph` is a `(2s, eps)` expander with
/// `eps <= 1/8`; without one the run is refused.
pub fn run_recovery_experiment(
    graph: &BipartiteGraph,
    certificate: &ExpansionCertificate,
    s: usize,
    trials: u64,
    seed: u64,
) -> Result<RecoveryReport> {
    if !certificate.covers(graph) {
        return Err(Error::Precondition("certificate was issued for another graph".into()));
    }
    if certificate.s < 2 * s || certificate.eps > 0.125 || !certificate.report.ok {
        return Err(Error::Precondition(format!(
            "recovery of {s}-sparse targets needs a ({}, 1/8) certificate, have ({}, {})",
            2 * s,
            certificate.s,
            certificate.eps
        )));
    }
    let mut report = recovery_trials(&DesignMatrix::from_graph(graph), s, trials, seed)?;
    report.certificate = Some(certificate.clone());
    Ok(report)
}

/// The recovery loop without the certificate guard, for arbitrary designs.
pub fn recovery_trials<D: Design + ?Sized>(x: &D, s: usize, trials: u64, seed: u64) -> Result<RecoveryReport> {
    let p = x.ncols();
    if s > p {
        return domain(format!("s = {s} exceeds p = {p}"));
    }
    let spec = TargetSpec {
        kind: TargetKind::ExactSparse,
        s,
    };
    let mut recovered = 0;
    let mut failures = 0;
    let mut worst = 0.0f64;
    for k in 0..trials {
        let target = make_target(spec, p, &mut Rng::for_trial(seed, k))?;
        match recovery_error(x, &target.beta) {
            Ok(err) => {
                worst = worst.max(err);
                recovered += (err <= RECOVERY_TOL) as u64;
            }
            Err(_) => {
                failures += 1;
                worst = f64::INFINITY;
            }
        }
    }
    Ok(RecoveryReport {
        s,
        trials,
        recovered,
        failures,
        max_relative_error: worst,
        pass: recovered == trials,
        certificate: None,
    })
}

/// `||beta_bp - beta*||_1 / ||beta*||_1` (absolute error when `beta* = 0`).
pub fn recovery_error<D: Design + ?Sized>(x: &D, beta: &[f64]) -> Result<f64> {
    let y = x.matvec(beta)?;
    let hat = basis_pursuit(x, &y)?;
    let err = norm1(&sub(&hat, beta));
    let scale = norm1(beta);
    Ok(if scale > 0.0 { err / scale } else { err })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleFactors {
    pub rho: f64,
    pub tau: f64,
}

/// `rho(s, p)` and `tau(s, p)` with `L = theta ln p ln s`:
/// `rho = ((1 + a) ln s + (2 + 2/a) ln L) s^a L^(2 + 2/a)`,
/// `tau = s^a L^(3 + 3/a) ln(s^(1 + a) L^(2 + 2/a)) / ln p`.
pub fn oracle_factors(s: usize, p: usize, alpha: f64, theta: f64) -> Result<OracleFactors> {
    if s < 2 || p <= s {
        return domain(format!("need p > s >= 2, got s = {s}, p = {p}"));
    }
    if !(alpha > 0.0 && theta > 0.0) {
        return domain("alpha and theta must be positive");
    }
    let (sf, pf, a) = (s as f64, p as f64, alpha);
    let inner = theta * pf.ln() * sf.ln();
    let rho = ((1.0 + a) * sf.ln() + (2.0 + 2.0 / a) * inner.ln()) * sf.powf(a) * inner.powf(2.0 + 2.0 / a);
    let log_arg = (1.0 + a) * sf.ln() + (2.0 + 2.0 / a) * inner.ln();
    let tau = sf.powf(a) * inner.powf(3.0 + 3.0 / a) * log_arg / pf.ln();
    Ok(OracleFactors { rho, tau })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OlsReport {
    pub trials: u64,
    pub n: usize,
    pub p: usize,
    pub s: usize,
    pub sigma: f64,
    /// Mean of `||X beta_ols - X beta*||_2^2 / n`.
    pub mean_ols_error: f64,
    /// `sigma^2 s / n`
    pub expected: f64,
    pub relative_deviation: f64,
    pub within_tolerance: bool,
    pub estimator: Estimator,
    pub lambda: f64,
    pub estimator_failures: u64,
    /// Mean of `||X beta_hat - X beta*||_2^2 / n` over successful solves.
    pub mean_estimator_error: f64,
    /// `mean_estimator_error / mean_ols_error`, reported raw.
    pub estimator_ratio: f64,
    /// Informational lines `rho sigma^2 s / n` and
    /// `tau sigma^2 ||X_1||_2^2 s ln p / n` (theta = theta0 / eps = 8).
    pub rho_line: Option<f64>,
    pub tau_line: Option<f64>,
}

/// Tolerance on `|mean / expected - 1|` for the OLS oracle.
pub const OLS_TOLERANCE: f64 = 0.10;

/// Compares the oracle least squares on the true support with the
/// instance's estimator, on the same noise draws.
pub fn ols_oracle_comparison(inst: &RecoveryInstance, trials: u64) -> Result<OlsReport> {
    if trials == 0 {
        return domain("trials must be >= 1");
    }
    let x = &inst.design;
    let (n, p, s) = (x.nrows(), x.ncols(), inst.target.s);
    let sigma = inst.noise.sigma;
    let sampler = NoiseSampler::new(&inst.noise)?;
    let x_beta = x.matvec(&inst.target.beta)?;
    let lambda = inst.lambda.multiple * thresholds(sigma, n, 1.0)?.lambda;
    let err = |beta: &[f64]| -> Result<f64> {
        let r = norm2(&sub(&x.matvec(beta)?, &x_beta));
        Ok(r * r / n as f64)
    };
    let (mut ols_sum, mut est_sum, mut est_ok, mut failures) = (0.0, 0.0, 0u64, 0u64);
    for k in 0..trials {
        let z = sampler.sample_with(&mut Rng::for_trial(inst.seed, k));
        let y = add(&x_beta, &z);
        ols_sum += err(&ols_on_support(x, &y, &inst.target.support)?)?;
        let est = match inst.lambda.estimator {
            Estimator::Lasso => lasso(x, &y, lambda).ok().filter(|s| s.converged).map(|s| s.beta),
            Estimator::Dantzig => dantzig(x, &y, lambda).ok().map(|s| s.beta),
        };
        match est {
            Some(beta) => {
                est_sum += err(&beta)?;
                est_ok += 1;
            }
            None => failures += 1,
        }
    }
    let mean = ols_sum / trials as f64;
    let expected = sigma * sigma * s as f64 / n as f64;
    let relative_deviation = if expected > 0.0 {
        (mean / expected - 1.0).abs()
    } else {
        mean
    };
    let mean_est = if est_ok > 0 { est_sum / est_ok as f64 } else { f64::NAN };
    let factors = oracle_factors(s, p, 1.0, 8.0).ok();
    let col_sq = x.col_norm_sq(0);
    Ok(OlsReport {
        trials,
        n,
        p,
        s,
        sigma,
        mean_ols_error: mean,
        expected,
        relative_deviation,
        within_tolerance: relative_deviation <= OLS_TOLERANCE,
        estimator: inst.lambda.estimator,
        lambda,
        estimator_failures: failures,
        mean_estimator_error: mean_est,
        estimator_ratio: if mean > 0.0 { mean_est / mean } else { f64::NAN },
        rho_line: factors.map(|f| f.rho * expected),
        tau_line: factors.map(|f| f.tau * sigma * sigma * col_sq * s as f64 * (p as f64).ln() / n as f64),
    })
}
