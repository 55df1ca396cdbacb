//! Experiment configuration and recovery instances.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::design::DesignMatrix;
use crate::error::{domain, Result};
use crate::field::FieldSpec;
use crate::graph::{pv_expander, random_left_regular, BipartiteGraph};
use crate::noise::{Correlation, NoiseModel};
use crate::rng::Rng;
use crate::vecops::top_s;

/// How to obtain the design graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DesignSource {
    /// Graph JSON file; relative paths resolve against the config file.
    Path(PathBuf),
    Construct(Construction),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Construction {
    Pv { q: u32, l: u32, m: u32, h: u64 },
    Random { p: usize, d: usize, n: usize, seed: u64 },
}

impl Construction {
    pub fn build(&self) -> Result<BipartiteGraph> {
        match *self {
            Construction::Pv { q, l, m, h } => pv_expander(&FieldSpec::from_order(q)?, l, m, h),
            Construction::Random { p, d, n, seed } => random_left_regular(p, d, n, seed),
        }
    }
}

impl DesignSource {
    pub fn load(&self, base: Option<&Path>) -> Result<BipartiteGraph> {
        match self {
            DesignSource::Path(path) => {
                let full = match base {
                    Some(dir) if path.is_relative() => dir.join(path),
                    _ => path.clone(),
                };
                BipartiteGraph::from_json(&std::fs::read_to_string(full)?)
            }
            DesignSource::Construct(c) => c.build(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetKind {
    /// `s` nonzeros, magnitudes uniform in `[1, 2]`, random signs and support.
    ExactSparse,
    /// `beta_i = ±(i + 1)^-2`, random signs.
    Compressible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetSpec {
    pub kind: TargetKind,
    pub s: usize,
}

/// Noise fields of a config; the length comes from the design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub sigma: f64,
    #[serde(default = "iid")]
    pub correlation: Correlation,
}

fn iid() -> Correlation {
    Correlation::Iid
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub design: DesignSource,
    pub target: TargetSpec,
    pub noise: NoiseSpec,
    pub lambda_multiple: f64,
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    /// Estimator compared against the OLS oracle (lasso when absent).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimator: Option<Estimator>,
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Reads a config file; a relative design path is resolved next to it.
    pub fn load(path: &Path) -> Result<(Self, BipartiteGraph)> {
        let cfg = Self::from_json(&std::fs::read_to_string(path)?)?;
        let graph = cfg.design.load(path.parent())?;
        Ok((cfg, graph))
    }

    pub fn instance(&self, graph: BipartiteGraph, estimator: Estimator) -> Result<RecoveryInstance> {
        let noise = NoiseModel {
            n: graph.n(),
            sigma: self.noise.sigma,
            correlation: self.noise.correlation.clone(),
        };
        RecoveryInstance::new(
            graph,
            self.target,
            noise,
            LambdaPolicy {
                estimator,
                multiple: self.lambda_multiple,
            },
            self.seed,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    Lasso,
    Dantzig,
}

/// `lambda = multiple * Lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaPolicy {
    pub estimator: Estimator,
    pub multiple: f64,
}

impl LambdaPolicy {
    pub fn min_multiple(estimator: Estimator) -> f64 {
        match estimator {
            Estimator::Lasso => 6.0,
            Estimator::Dantzig => 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let min = Self::min_multiple(self.estimator);
        if !(self.multiple >= min && self.multiple.is_finite()) {
            return domain(format!(
                "{:?} needs lambda >= {min} Lambda, got multiple {}",
                self.estimator, self.multiple
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub kind: TargetKind,
    pub s: usize,
    pub beta: Vec<f64>,
    /// Indices of the `s` largest `|beta_i|`, ascending.
    pub support: Vec<usize>,
}

/// Draws a target of length `p`.
pub fn make_target(spec: TargetSpec, p: usize, rng: &mut Rng) -> Result<Target> {
    if spec.s > p {
        return domain(format!("s = {} exceeds p = {p}", spec.s));
    }
    let beta = match spec.kind {
        TargetKind::ExactSparse => {
            let mut beta = vec![0.0; p];
            for i in rng.sample_indices(p, spec.s) {
                beta[i] = rng.sign() * rng.uniform_range(1.0, 2.0);
            }
            beta
        }
        TargetKind::Compressible => (0..p).map(|i| rng.sign() / ((i + 1) as f64).powi(2)).collect(),
    };
    Ok(Target {
        kind: spec.kind,
        s: spec.s,
        support: top_s(&beta, spec.s),
        beta,
    })
}

/// Everything needed to run one Monte Carlo experiment.
#[derive(Debug, Clone)]
pub struct RecoveryInstance {
    pub graph: BipartiteGraph,
    pub design: DesignMatrix,
    pub target: Target,
    pub noise: NoiseModel,
    pub lambda: LambdaPolicy,
    /// Target from `Rng::for_trial(seed, u64::MAX)`, noise of trial `k`
    /// from `Rng::for_trial(seed, k)`.
    pub seed: u64,
}

impl RecoveryInstance {
    pub fn new(
        graph: BipartiteGraph,
        target: TargetSpec,
        noise: NoiseModel,
        lambda: LambdaPolicy,
        seed: u64,
    ) -> Result<Self> {
        let target = make_target(target, graph.p(), &mut Rng::for_trial(seed, u64::MAX))?;
        Self::with_target(graph, target, noise, lambda, seed)
    }

    pub fn with_target(
        graph: BipartiteGraph,
        target: Target,
        noise: NoiseModel,
        lambda: LambdaPolicy,
        seed: u64,
    ) -> Result<Self> {
        lambda.validate()?;
        noise.validate()?;
        if noise.n != graph.n() {
            return domain(format!("noise length {} != n = {}", noise.n, graph.n()));
        }
        if target.beta.len() != graph.p() || target.support.len() != target.s {
            return domain("target does not match the design");
        }
        Ok(Self {
            design: DesignMatrix::from_graph(&graph),
            graph,
            target,
            noise,
            lambda,
            seed,
        })
    }
}
