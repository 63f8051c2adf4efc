//! Seeded path simulation of the boundary and full diffusions.
//!
//! The integrator is Euler-Maruyama in log coordinates. Working on ln X
//! keeps every state strictly positive by construction and reuses the exact
//! Itô log-drift of the model. The quadratic Itô correction −α²X²/2 is also
//! the stabilizer: past X ≈ 2/(α√h) it dominates the noise scale αX√h ever
//! more strongly, so the scheme self-limits and must NOT be capped there —
//! capping the drift while the noise keeps growing turns the log state into
//! an exploding random walk (a cap of 1/h demonstrably collapses the α = 1
//! boundary runs). An optional taming cap remains available for experiments
//! but is off by default. The log drifts are
//!
//! ```text
//! d ln X: a₁ − b₁X − c₁Y − (α₁X + γ₁)²/2 − β₁²Y²/2,  noise (α₁X + γ₁)dB₁ + β₁Y dB₂
//! d ln Y: a₂ − b₂Y − c₂X − (α₂Y + γ₂)²/2 − β₂²X²/2,  noise (α₂Y + γ₂)dB₃ + β₂X dB₂
//! ```
//!
//! with B₂ shared between the components, drawn from three named streams so
//! the coupling is exact. The integrator never clamps a state: numerical
//! extinction is a path-analysis concept (first crossing of a reported
//! floor), and overflow surfaces as [`SimError::NonFiniteState`].

use crate::density::BoundarySpec;
use crate::params::ModelParams;
use crate::rng::gaussian_stream;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use thiserror::Error;

/// Integrator configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// Time step.
    pub h: f64,
    /// Horizon T; the path runs for round(T/h) steps.
    pub horizon: f64,
    /// Base seed for the noise streams.
    pub seed: u64,
    /// Record every this many steps (≥ 1).
    pub record_stride: u32,
    /// Optional drift magnitude cap; `None` (the default) leaves the drift
    /// untamed, which is the stable choice for the quadratic-noise model.
    pub taming_cap: Option<f64>,
}

impl SimConfig {
    /// A config with step `h`, horizon `T`, and the given seed; stride 1 and
    /// the default taming cap.
    pub fn new(h: f64, horizon: f64, seed: u64) -> SimConfig {
        SimConfig {
            h,
            horizon,
            seed,
            record_stride: 1,
            taming_cap: None,
        }
    }

    /// Effective drift cap (infinite when taming is off).
    pub fn cap(&self) -> f64 {
        self.taming_cap.unwrap_or(f64::INFINITY)
    }

    /// Checks the step, horizon, stride, and cap.
    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.h > 0.0) || !self.h.is_finite() {
            return Err(SimError::InvalidConfig {
                reason: "step h must be positive and finite",
            });
        }
        if !(self.horizon >= self.h) || !self.horizon.is_finite() {
            return Err(SimError::InvalidConfig {
                reason: "horizon must be finite and at least one step",
            });
        }
        if self.record_stride < 1 {
            return Err(SimError::InvalidConfig {
                reason: "record_stride must be at least 1",
            });
        }
        if let Some(c) = self.taming_cap {
            if !(c > 0.0) {
                return Err(SimError::InvalidConfig {
                    reason: "taming_cap must be positive",
                });
            }
        }
        Ok(())
    }

    pub(crate) fn n_steps(&self) -> usize {
        libm::round(self.horizon / self.h) as usize
    }
}

/// Simulation failures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    /// Bad configuration.
    #[error("invalid simulation config: {reason}")]
    InvalidConfig {
        /// What was wrong.
        reason: &'static str,
    },
    /// A state overflowed despite taming.
    #[error("state became non-finite at step {step}")]
    NonFiniteState {
        /// Index of the failing step.
        step: usize,
    },
    /// Invalid model or boundary coefficients.
    #[error("invalid coefficients: {reason}")]
    InvalidCoefficients {
        /// What was wrong.
        reason: String,
    },
}

/// A recorded trajectory with `N` components per sample.
///
/// `log_states` carry the integrated ln values exactly; `states` are their
/// exponentials. Recording times are uniformly spaced by h·record_stride.
#[derive(Debug, Clone, PartialEq)]
pub struct Path<const N: usize> {
    /// Recording times, starting at 0.
    pub times: Vec<f64>,
    /// States at the recording times, strictly positive.
    pub states: Vec<[f64; N]>,
    /// The ln states as integrated.
    pub log_states: Vec<[f64; N]>,
    /// Seed the path was generated from.
    pub seed: u64,
    /// Scheme tag for auditability.
    pub scheme: String,
}

impl<const N: usize> Path<N> {
    /// Number of recorded samples.
    pub fn len(&self) -> usize {
        self.times.len()
    }

    /// True when nothing was recorded.
    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Final recorded state.
    pub fn last_state(&self) -> [f64; N] {
        self.states[self.states.len() - 1]
    }
}

fn tame(drift: f64, cap: f64) -> f64 {
    drift.clamp(-cap, cap)
}

fn scheme_tag(h: f64, cap: f64) -> String {
    if cap.is_finite() {
        format!("log-euler-maruyama h={h} tamed cap={cap}")
    } else {
        format!("log-euler-maruyama h={h} untamed")
    }
}

/// Simulates one boundary diffusion dφ = φ(a − bφ)dt + (γφ + αφ²)dB from x0.
///
/// Uses noise stream 1 (the B₁ slot), so with matched seeds the path
/// reproduces the X marginal of [`simulate_full`] whenever the full system
/// leaves X decoupled.
pub fn simulate_boundary(
    spec: &BoundarySpec,
    x0: f64,
    cfg: &SimConfig,
) -> Result<Path<1>, SimError> {
    cfg.validate()?;
    spec.validate_sim().map_err(|e| SimError::InvalidCoefficients {
        reason: format!("{e}"),
    })?;
    if !(x0 > 0.0) || !x0.is_finite() {
        return Err(SimError::InvalidConfig {
            reason: "x0 must be strictly positive",
        });
    }
    let n = cfg.n_steps();
    let stride = cfg.record_stride as usize;
    let (h, cap) = (cfg.h, cfg.cap());
    let sqrt_h = libm::sqrt(h);
    let mut b1 = gaussian_stream(cfg.seed, 1);
    let mut lx = libm::log(x0);
    let mut path = Path {
        times: Vec::with_capacity(n / stride + 1),
        states: Vec::with_capacity(n / stride + 1),
        log_states: Vec::with_capacity(n / stride + 1),
        seed: cfg.seed,
        scheme: scheme_tag(h, cap),
    };
    let record = |path: &mut Path<1>, step: usize, lx: f64| {
        path.times.push(step as f64 * h);
        path.states.push([libm::exp(lx)]);
        path.log_states.push([lx]);
    };
    record(&mut path, 0, lx);
    for step in 1..=n {
        let x = libm::exp(lx);
        let diff = spec.gamma + spec.alpha * x;
        let drift = spec.a - spec.b * x - 0.5 * diff * diff;
        lx += tame(drift, cap) * h + diff * sqrt_h * b1.next_normal();
        if !lx.is_finite() {
            return Err(SimError::NonFiniteState { step });
        }
        if step % stride == 0 {
            record(&mut path, step, lx);
        }
    }
    Ok(path)
}

/// Simulates the full two-species system from z0, coupling the components
/// through the shared B₂ stream.
pub fn simulate_full(
    p: &ModelParams,
    z0: [f64; 2],
    cfg: &SimConfig,
) -> Result<Path<2>, SimError> {
    cfg.validate()?;
    p.validate_deterministic()
        .map_err(|e| SimError::InvalidCoefficients {
            reason: format!("{e}"),
        })?;
    if !(z0[0] > 0.0 && z0[1] > 0.0) || !z0[0].is_finite() || !z0[1].is_finite() {
        return Err(SimError::InvalidConfig {
            reason: "z0 must be strictly positive componentwise",
        });
    }
    let n = cfg.n_steps();
    let stride = cfg.record_stride as usize;
    let (h, cap) = (cfg.h, cfg.cap());
    let sqrt_h = libm::sqrt(h);
    let mut b1 = gaussian_stream(cfg.seed, 1);
    let mut b2 = gaussian_stream(cfg.seed, 2);
    let mut b3 = gaussian_stream(cfg.seed, 3);
    let (mut lx, mut ly) = (libm::log(z0[0]), libm::log(z0[1]));
    let mut path = Path {
        times: Vec::with_capacity(n / stride + 1),
        states: Vec::with_capacity(n / stride + 1),
        log_states: Vec::with_capacity(n / stride + 1),
        seed: cfg.seed,
        scheme: scheme_tag(h, cap),
    };
    let record = |path: &mut Path<2>, step: usize, lx: f64, ly: f64| {
        path.times.push(step as f64 * h);
        path.states.push([libm::exp(lx), libm::exp(ly)]);
        path.log_states.push([lx, ly]);
    };
    record(&mut path, 0, lx, ly);
    for step in 1..=n {
        let (x, y) = (libm::exp(lx), libm::exp(ly));
        let dx1 = p.alpha[0] * x + p.gamma[0];
        let dy3 = p.alpha[1] * y + p.gamma[1];
        let drift_x =
            p.a[0] - p.b[0] * x - p.c[0] * y - 0.5 * dx1 * dx1 - 0.5 * p.beta[0] * p.beta[0] * y * y;
        let drift_y =
            p.a[1] - p.b[1] * y - p.c[1] * x - 0.5 * dy3 * dy3 - 0.5 * p.beta[1] * p.beta[1] * x * x;
        let (n1, n2, n3) = (b1.next_normal(), b2.next_normal(), b3.next_normal());
        lx += tame(drift_x, cap) * h + (dx1 * n1 + p.beta[0] * y * n2) * sqrt_h;
        ly += tame(drift_y, cap) * h + (dy3 * n3 + p.beta[1] * x * n2) * sqrt_h;
        if !lx.is_finite() || !ly.is_finite() {
            return Err(SimError::NonFiniteState { step });
        }
        if step % stride == 0 {
            record(&mut path, step, lx, ly);
        }
    }
    Ok(path)
}
