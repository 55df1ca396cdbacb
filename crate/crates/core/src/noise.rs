//! Gaussian noise models, noise thresholds and their Monte Carlo validation.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::design::Design;
use crate::error::{domain, Result};
use crate::rng::Rng;
use crate::vecops::norm_inf;

/// Negative eigenvalues down to `-PSD_TOL` are clipped to zero.
pub const PSD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Correlation {
    Iid,
    /// Stationary AR(1), correlation `rho^|i-j|`.
    Ar1(f64),
    /// Correlation matrix with unit diagonal.
    Explicit(Vec<Vec<f64>>),
}

/// `z ~ N(0, sigma^2 C)` with `diag(C) = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub n: usize,
    pub sigma: f64,
    pub correlation: Correlation,
}

impl NoiseModel {
    pub fn iid(n: usize, sigma: f64) -> Self {
        Self {
            n,
            sigma,
            correlation: Correlation::Iid,
        }
    }

    pub fn ar1(n: usize, sigma: f64, rho: f64) -> Self {
        Self {
            n,
            sigma,
            correlation: Correlation::Ar1(rho),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return domain(format!("sigma must be finite and >= 0, got {}", self.sigma));
        }
        match &self.correlation {
            Correlation::Iid => {}
            Correlation::Ar1(rho) => {
                if !(rho.abs() < 1.0) {
                    return domain(format!("ar1 coefficient must lie in (-1, 1), got {rho}"));
                }
            }
            Correlation::Explicit(c) => {
                if c.len() != self.n || c.iter().any(|row| row.len() != self.n) {
                    return domain(format!("correlation matrix must be {0} x {0}", self.n));
                }
                for i in 0..self.n {
                    if (c[i][i] - 1.0).abs() > 1e-12 {
                        return domain(format!("correlation diagonal entry {i} is {}", c[i][i]));
                    }
                    for j in 0..i {
                        if (c[i][j] - c[j][i]).abs() > 1e-12 {
                            return domain(format!("correlation matrix not symmetric at ({i}, {j})"));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Prepared sampler; holds the square root of an explicit correlation matrix.
#[derive(Debug, Clone)]
pub struct NoiseSampler {
    model: NoiseModel,
    root: Option<DMatrix<f64>>,
}

impl NoiseSampler {
    pub fn new(model: &NoiseModel) -> Result<Self> {
        model.validate()?;
        let root = match &model.correlation {
            Correlation::Explicit(c) => Some(psd_sqrt(c)?),
            _ => None,
        };
        Ok(Self {
            model: model.clone(),
            root,
        })
    }

    pub fn model(&self) -> &NoiseModel {
        &self.model
    }

    /// One draw from the stream seeded by `seed`.
    pub fn sample(&self, seed: u64) -> Vec<f64> {
        let mut rng = Rng::new(seed);
        self.sample_with(&mut rng)
    }

    pub fn sample_with(&self, rng: &mut Rng) -> Vec<f64> {
        let n = self.model.n;
        let sigma = self.model.sigma;
        let g = rng.normal_vec(n);
        if sigma == 0.0 {
            return vec![0.0; n];
        }
        match &self.model.correlation {
            Correlation::Iid => g.into_iter().map(|v| sigma * v).collect(),
            Correlation::Ar1(rho) => {
                let innovation = (1.0 - rho * rho).sqrt();
                let mut z = Vec::with_capacity(n);
                let mut prev = 0.0;
                for (i, gi) in g.into_iter().enumerate() {
                    prev = if i == 0 { gi } else { rho * prev + innovation * gi };
                    z.push(sigma * prev);
                }
                z
            }
            Correlation::Explicit(_) => {
                let root = self.root.as_ref().expect("root prepared");
                (root * DVector::from_vec(g)).iter().map(|v| sigma * v).collect()
            }
        }
    }
}

/// Symmetric square root `V sqrt(max(L, 0)) V^T`.
fn psd_sqrt(c: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = c.len();
    let m = DMatrix::from_fn(n, n, |i, j| c[i][j]);
    let eig = SymmetricEigen::new(m);
    let mut roots = DVector::zeros(n);
    for (k, &l) in eig.eigenvalues.iter().enumerate() {
        if l < -PSD_TOL {
            return domain(format!("correlation matrix is not PSD (eigenvalue {l:e})"));
        }
        roots[k] = l.max(0.0).sqrt();
    }
    let v = &eig.eigenvectors;
    Ok(v * DMatrix::from_diagonal(&roots) * v.transpose())
}

pub fn sample_noise(model: &NoiseModel, seed: u64) -> Result<Vec<f64>> {
    Ok(NoiseSampler::new(model)?.sample(seed))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub sigma: f64,
    pub n: usize,
    pub t: f64,
    /// `2 sigma sqrt(ln n)`
    pub lambda: f64,
    /// `(1 + t) sigma sqrt(ln n)`
    pub lambda_t: f64,
    /// `1 / (sqrt(2 pi) n sqrt(ln n))`
    pub eta: f64,
    /// Lower bound on `P(||X^T z||_inf <= lambda_t)`.
    pub probability: f64,
}

pub fn thresholds(sigma: f64, n: usize, t: f64) -> Result<Thresholds> {
    if n < 2 {
        return domain(format!("n must be >= 2, got {n}"));
    }
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return domain(format!("sigma must be finite and >= 0, got {sigma}"));
    }
    if !(t >= 1.0 && t.is_finite()) {
        return domain(format!("t must be >= 1, got {t}"));
    }
    let nf = n as f64;
    let ln = nf.ln();
    let exponent = (1.0 + t).powi(2) / 2.0 - 1.0;
    Ok(Thresholds {
        sigma,
        n,
        t,
        lambda: 2.0 * sigma * ln.sqrt(),
        lambda_t: (1.0 + t) * sigma * ln.sqrt(),
        eta: 1.0 / ((2.0 * PI).sqrt() * nf * ln.sqrt()),
        probability: 1.0 - 2f64.sqrt() / ((1.0 + t) * (PI * ln).sqrt() * nf.powf(exponent)),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseBoundReport {
    /// Fraction of draws with `||X^T z||_inf <= lambda_t`.
    pub frequency: f64,
    /// Theoretical lower bound on that probability.
    pub bound: f64,
    pub pass: bool,
    pub trials: u64,
    pub threshold: f64,
    pub standard_error: f64,
    /// Draws where `||X^T z||_inf > ||z||_inf`.
    pub non_amplification_violations: u64,
}

/// Monte Carlo frequency of `||X^T z||_inf <= lambda_t`; passes iff the
/// frequency is at least `bound - 3 SE`, with the binomial standard error
/// taken at the bound. Draw `k` uses `Rng::for_trial(seed, k)`.
pub fn empirical_noise_bound<D: Design + ?Sized>(
    x: &D,
    model: &NoiseModel,
    t: f64,
    trials: u64,
    seed: u64,
) -> Result<NoiseBoundReport> {
    if trials == 0 {
        return domain("trials must be >= 1");
    }
    if x.nrows() != model.n {
        return domain(format!(
            "design has {} rows but noise has length {}",
            x.nrows(),
            model.n
        ));
    }
    let th = thresholds(model.sigma, model.n, t)?;
    let sampler = NoiseSampler::new(model)?;
    let mut hits = 0u64;
    let mut amplified = 0u64;
    for k in 0..trials {
        let z = sampler.sample_with(&mut Rng::for_trial(seed, k));
        let corr = norm_inf(&x.transpose_matvec(&z)?);
        if corr <= th.lambda_t {
            hits += 1;
        }
        if corr > norm_inf(&z) {
            amplified += 1;
        }
    }
    let frequency = hits as f64 / trials as f64;
    let bound = th.probability;
    let se = (bound.clamp(0.0, 1.0) * (1.0 - bound.clamp(0.0, 1.0)) / trials as f64).sqrt();
    Ok(NoiseBoundReport {
        frequency,
        bound,
        pass: frequency >= bound - 3.0 * se,
        trials,
        threshold: th.lambda_t,
        standard_error: se,
        non_amplification_violations: amplified,
    })
}
