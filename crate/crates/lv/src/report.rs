//! JSON report shapes with fixed key names and order.

use lv_core::{DeterministicRegime, MonteCarloReport, RegimeReport};
use serde::Serialize;

/// Monte Carlo report on the wire. Key order is part of the contract:
/// `n_paths, p_hat, q_hat, neither, ci_p, ci_q, mean_slope_x, mean_slope_y,
/// floor, horizon, seed`, followed by the bookkeeping counters.
#[derive(Debug, Serialize)]
pub struct McReportJson {
    /// Requested paths.
    pub n_paths: u64,
    /// X-extinction frequency.
    pub p_hat: f64,
    /// Y-extinction frequency.
    pub q_hat: f64,
    /// 1 − p_hat − q_hat.
    pub neither: f64,
    /// 95% Wilson interval for p_hat.
    pub ci_p: [f64; 2],
    /// 95% Wilson interval for q_hat.
    pub ci_q: [f64; 2],
    /// Mean tail slope of ln X over X-extinct paths.
    pub mean_slope_x: Option<f64>,
    /// Mean tail slope of ln Y over Y-extinct paths.
    pub mean_slope_y: Option<f64>,
    /// Extinction floor.
    pub floor: f64,
    /// Horizon.
    pub horizon: f64,
    /// Base seed.
    pub seed: u64,
    /// Completed paths.
    pub completed: u64,
    /// Failed paths (simulator errors), reported separately.
    pub failed: u64,
    /// X-extinct count.
    pub x_extinct_count: u64,
    /// Y-extinct count.
    pub y_extinct_count: u64,
    /// Neither count.
    pub neither_count: u64,
}

impl From<&MonteCarloReport> for McReportJson {
    fn from(r: &MonteCarloReport) -> Self {
        McReportJson {
            n_paths: r.n_paths,
            p_hat: r.p_hat,
            q_hat: r.q_hat,
            neither: r.neither,
            ci_p: [r.ci_p.0, r.ci_p.1],
            ci_q: [r.ci_q.0, r.ci_q.1],
            mean_slope_x: r.mean_slope_x,
            mean_slope_y: r.mean_slope_y,
            floor: r.floor,
            horizon: r.horizon,
            seed: r.seed,
            completed: r.completed,
            failed: r.failed,
            x_extinct_count: r.x_extinct_count,
            y_extinct_count: r.y_extinct_count,
            neither_count: r.neither_count,
        }
    }
}

/// Deterministic classification on the wire.
#[derive(Debug, Serialize)]
pub struct DeterministicJson {
    /// λ₁ = a₂ − c₂a₁/b₁.
    pub lambda1: f64,
    /// λ₂ = a₁ − c₁a₂/b₂.
    pub lambda2: f64,
    /// Case label.
    pub case: String,
    /// Interior equilibrium for the coexistence case.
    pub equilibrium: Option<[f64; 2]>,
}

impl From<&DeterministicRegime> for DeterministicJson {
    fn from(r: &DeterministicRegime) -> Self {
        DeterministicJson {
            lambda1: r.lambda1_det,
            lambda2: r.lambda2_det,
            case: r.case.to_string(),
            equilibrium: r.equilibrium,
        }
    }
}

/// Stochastic classification on the wire.
#[derive(Debug, Serialize)]
pub struct StochasticJson {
    /// λ₁ (null when species 1's boundary measure does not exist).
    pub lambda1: Option<f64>,
    /// Quadrature error bound on λ₁.
    pub lambda1_err: Option<f64>,
    /// λ₂.
    pub lambda2: Option<f64>,
    /// Quadrature error bound on λ₂.
    pub lambda2_err: Option<f64>,
    /// Boundary survival indicators aᵢ − γᵢ²/2 (linear/general modes).
    pub survival: Option<[f64; 2]>,
    /// Regime label.
    pub regime: String,
    /// Justifying theorem, null for the unclassified critical case.
    pub theorem: Option<String>,
}

impl From<&RegimeReport> for StochasticJson {
    fn from(r: &RegimeReport) -> Self {
        StochasticJson {
            lambda1: r.lambda1.map(|l| l.value),
            lambda1_err: r.lambda1.map(|l| l.error_bound),
            lambda2: r.lambda2.map(|l| l.value),
            lambda2_err: r.lambda2.map(|l| l.error_bound),
            survival: r.survival,
            regime: r.regime.to_string(),
            theorem: r.theorem.map(|t| t.to_string()),
        }
    }
}
