use serde::{Deserialize, Serialize};

/// Logarithm base for reported divergences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum LogBase {
    #[default]
    E,
    Two,
}

impl LogBase {
    /// Factor converting a value in nats to this base.
    pub fn from_nats(self) -> f64 {
        match self {
            LogBase::E => 1.0,
            LogBase::Two => 1.0 / std::f64::consts::LN_2,
        }
    }
}

/// Numerical tolerances shared by all modules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub hermiticity_tol: f64,
    pub psd_tol: f64,
    pub trace_tol: f64,
    /// Zero-eigenvalue band is `eta_scale * dim * eps` times the operator scale.
    pub eta_scale: f64,
    pub quad_abs_tol: f64,
    pub quad_rel_tol: f64,
    pub max_panels: usize,
    pub dim_cap: usize,
    pub seed: u64,
    pub log_base: LogBase,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            hermiticity_tol: 1e-10,
            psd_tol: 1e-10,
            trace_tol: 1e-8,
            eta_scale: 64.0,
            quad_abs_tol: 1e-9,
            quad_rel_tol: 1e-8,
            max_panels: 4096,
            dim_cap: 256,
            seed: 0,
            log_base: LogBase::E,
        }
    }
}

impl Config {
    /// Zero band for an operator of dimension `dim` and spectral norm `norm`.
    pub fn eta(&self, dim: usize, norm: f64) -> f64 {
        self.eta_scale * dim as f64 * f64::EPSILON * norm.max(f64::MIN_POSITIVE)
    }
}
