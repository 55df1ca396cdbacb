//! Monte Carlo harness for the oracle inequalities, exact recovery, the OLS
//! oracle comparison and the selection-error sweep.
//!
//! Trial `k` of a run seeded with `seed` draws its noise (or target) from
//! `Rng::for_trial(seed, k)`, so reports do not depend on evaluation order.

mod config;
mod oracle;
mod report;
mod runs;
mod sweep;

use serde::{Deserialize, Serialize};

pub use config::{
    make_target, Construction, DesignSource, Estimator, ExperimentConfig, LambdaPolicy, NoiseSpec, RecoveryInstance,
    Target, TargetKind, TargetSpec,
};
pub use oracle::{
    ols_oracle_comparison, oracle_factors, recovery_error, recovery_trials, run_recovery_experiment, OlsReport,
    OracleFactors, RecoveryReport, OLS_TOLERANCE, RECOVERY_TOL,
};
pub use report::{CheckSummary, ExperimentReport, InequalityCheck, TrialRecord, INEQUALITY_SLACK};
pub use runs::{run_dantzig_experiment, run_lasso_experiment};
pub use sweep::{mvse_sweep, MvseConfig, MvseRow, MvseTable};

/// Library version recorded in manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Everything needed to rerun a command: its name, all parameters and the
/// seed. Written next to every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub library: String,
    pub version: String,
    pub seed: u64,
    pub parameters: serde_json::Value,
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn new(command: &str, seed: u64, parameters: serde_json::Value) -> Self {
        Self {
            command: command.into(),
            library: env!("CARGO_PKG_NAME").into(),
            version: VERSION.into(),
            seed,
            parameters,
            outputs: Vec::new(),
        }
    }

    pub fn to_json(&self) -> crate::Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
