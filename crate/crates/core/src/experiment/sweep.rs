//! Mean variable selection error sweep over growing `p`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::graph::random_left_regular;
use crate::noise::NoiseModel;
use crate::rng::derive_seed;
use crate::verify::{check_expansion_exhaustive_with_budget, check_expansion_sampled, subset_count};

use super::config::{Estimator, LambdaPolicy, RecoveryInstance, TargetKind, TargetSpec};
use super::runs::run_lasso_experiment;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MvseConfig {
    pub p_values: Vec<usize>,
    /// `s = round(p^s_exponent)`.
    pub s_exponent: f64,
    pub alpha: f64,
    pub sigma: f64,
    /// Left degree `d = ceil(d_factor ln(p / s))`.
    pub d_factor: f64,
    /// Right size `n = ceil(n_factor s d)`.
    pub n_factor: f64,
    pub eps: f64,
    pub trials: u64,
    pub seed: u64,
    /// Exhaustive certification when the subset count is within this budget,
    /// otherwise `sampled_checks` random subsets.
    pub subset_budget: u64,
    pub sampled_checks: u64,
}

impl Default for MvseConfig {
    fn default() -> Self {
        Self {
            p_values: vec![64, 256, 1024],
            s_exponent: 0.4,
            alpha: 1.0,
            sigma: 1.0,
            d_factor: 2.0,
            n_factor: 64.0,
            eps: 0.125,
            trials: 50,
            seed: 0,
            subset_budget: 2_000_000,
            sampled_checks: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MvseRow {
    pub p: usize,
    pub s: usize,
    pub d: usize,
    pub n: usize,
    /// `exhaustive`, `sampled`, or `failed`.
    pub certification: String,
    pub skipped: bool,
    pub event_trials: u64,
    pub solver_failures: u64,
    /// Max over event trials of `||beta_hat_{S^c}||_1 / (p - s)`.
    pub proxy: Option<f64>,
    /// `392 sqrt(2) sigma n sqrt(ln n) / (p - s)`
    pub bound: f64,
    pub within_bound: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MvseTable {
    pub rows: Vec<MvseRow>,
    /// Last computed proxy strictly below the first.
    pub decreasing: Option<bool>,
    /// Last computed proxy at most the first.
    pub non_increasing: Option<bool>,
}

impl MvseTable {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for r in &self.rows {
            out.serialize(r)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// For each `p`: random design from the configured rule, `(2s, eps)`
/// certification, then the lasso at `7 Lambda` on exactly `s`-sparse
/// targets. Rows whose certification finds a violation are skipped.
/// Row `i` uses seed `derive_seed(seed, i)` for graph, target and noise.
pub fn mvse_sweep(cfg: &MvseConfig) -> Result<MvseTable> {
    if !(cfg.alpha > 0.0) {
        return domain("alpha must be positive");
    }
    if !(cfg.s_exponent > 0.0 && cfg.s_exponent < 1.0 / (1.0 + cfg.alpha)) {
        return domain(format!(
            "s exponent {} must lie in (0, 1/(1 + alpha)) = (0, {})",
            cfg.s_exponent,
            1.0 / (1.0 + cfg.alpha)
        ));
    }
    let mut rows = Vec::new();
    for (i, &p) in cfg.p_values.iter().enumerate() {
        let seed = derive_seed(cfg.seed, i as u64);
        let s = ((p as f64).powf(cfg.s_exponent).round() as usize).max(1);
        if 2 * s > p {
            return domain(format!("p = {p} too small for s = {s}"));
        }
        let d = ((cfg.d_factor * (p as f64 / s as f64).ln()).ceil() as usize).max(1);
        let n = ((cfg.n_factor * (s * d) as f64).ceil() as usize).max(d).max(2);
        let graph = random_left_regular(p, d, n, seed)?;
        let sub = subset_count(p, 2 * s);
        let (mode, ok) = if sub <= cfg.subset_budget as u128 {
            let r = check_expansion_exhaustive_with_budget(&graph, 2 * s, cfg.eps, cfg.subset_budget)?;
            ("exhaustive", r.ok)
        } else {
            let r = check_expansion_sampled(&graph, 2 * s, cfg.eps, cfg.sampled_checks, seed)?;
            ("sampled", r.ok)
        };
        let bound = 392.0 * 2f64.sqrt() * cfg.sigma * n as f64 * (n as f64).ln().sqrt() / (p - s) as f64;
        let mut row = MvseRow {
            p,
            s,
            d,
            n,
            certification: if ok { mode.into() } else { "failed".into() },
            skipped: !ok,
            event_trials: 0,
            solver_failures: 0,
            proxy: None,
            bound,
            within_bound: None,
        };
        if ok {
            let inst = RecoveryInstance::new(
                graph,
                TargetSpec {
                    kind: TargetKind::ExactSparse,
                    s,
                },
                NoiseModel::iid(n, cfg.sigma),
                LambdaPolicy {
                    estimator: Estimator::Lasso,
                    multiple: 7.0,
                },
                seed,
            )?;
            let report = run_lasso_experiment(&inst, cfg.trials)?;
            let masses: Vec<f64> = report
                .records
                .iter()
                .filter(|r| r.event && r.solver_ok)
                .filter_map(|r| r.checks.iter().find(|c| c.name == "lasso_selection"))
                .map(|c| c.lhs / (p - s) as f64)
                .collect();
            row.event_trials = masses.len() as u64;
            row.solver_failures = report.solver_failures;
            row.proxy = masses.iter().copied().reduce(f64::max);
            row.within_bound = row.proxy.map(|v| v <= bound);
        }
        rows.push(row);
    }
    let proxies: Vec<f64> = rows.iter().filter_map(|r| r.proxy).collect();
    let ends = (proxies.len() >= 2).then(|| (proxies[0], proxies[proxies.len() - 1]));
    Ok(MvseTable {
        rows,
        decreasing: ends.map(|(first, last)| last < first),
        non_increasing: ends.map(|(first, last)| last <= first),
    })
}
