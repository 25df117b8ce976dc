//! Run configuration shared by the library entry points and the CLI.

use serde::{Deserialize, Serialize};

/// Fixed default seed for stochastic operations, so runs are reproducible
/// when no seed is given.
pub const DEFAULT_SEED: u64 = 7919;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    /// Tolerance for algebraic identities.
    pub tol_algebraic: f64,
    /// Tolerance for incidence decisions.
    pub tol_incidence: f64,
    /// Limit-detection tolerance.
    pub tol_convergence: f64,
    /// Limit-detection window.
    pub conv_window: usize,
    pub seed: u64,
    /// Scan bound for recurrence schedules.
    pub nmax: u64,
    /// Target defect for recurrence schedules.
    pub schedule_eps: f64,
    pub format: OutputFormat,
    /// Run data-parallel where supported.
    pub parallel: bool,
    /// Optional output directory for witness and trace files.
    pub output_dir: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            tol_algebraic: 1e-10,
            tol_incidence: 1e-9,
            tol_convergence: 1e-3,
            conv_window: 5,
            seed: DEFAULT_SEED,
            nmax: 1_000_000,
            schedule_eps: 1e-3,
            format: OutputFormat::Json,
            parallel: false,
            output_dir: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), String> {
        for (name, v) in [
            ("tol_algebraic", self.tol_algebraic),
            ("tol_incidence", self.tol_incidence),
            ("tol_convergence", self.tol_convergence),
            ("schedule_eps", self.schedule_eps),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(format!("{name} must be positive, got {v}"));
            }
        }
        if self.conv_window == 0 {
            return Err("conv_window must be at least 1".into());
        }
        Ok(())
    }
}
