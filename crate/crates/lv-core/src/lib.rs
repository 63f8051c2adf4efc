//! Numerical core for two-species stochastic competitive Lotka-Volterra systems.
//!
//! The crate computes the invasion thresholds λ₁, λ₂ of the system
//!
//! ```text
//! dX = X(a₁ − b₁X − c₁Y) dt + (α₁X² + γ₁X) dB₁ + β₁XY dB₂
//! dY = Y(a₂ − b₂Y − c₂X) dt + (α₂Y² + γ₂Y) dB₃ + β₂XY dB₂
//! ```
//!
//! from the closed-form invariant densities of the one-dimensional boundary
//! diffusions, classifies the long-run regime (coexistence, single exclusion,
//! bistable exclusion), and verifies the classification by seeded path
//! simulation: tamed log-space Euler-Maruyama for the diffusions and exact-jump
//! Runge-Kutta for the telegraph-switched (piecewise-deterministic) variant.
//!
//! The crate is `no_std` (with `alloc`); all float math goes through `libm`.
//! IO, file formats, and the command-line front end live in the companion
//! `lv` crate.

#![no_std]
#![warn(missing_docs)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod density;
pub mod params;
pub mod pathstats;
pub mod pdmp;
pub mod quad;
pub mod rng;
pub mod sde;
#[cfg(test)]
pub(crate) mod testutil;
pub mod thresholds;

pub use density::{stationary_density, BoundarySpec, DensityError, StationaryDensity};
pub use params::{
    classify_deterministic, DeterministicCase, DeterministicRegime, ModelParams, NoiseMode,
    Species, ValidateError,
};
pub use pathstats::{
    ergodic_average, extinction_probabilities, ks_critical_5pct, ks_statistic, lyapunov_exponent,
    wilson_interval, LyapunovEstimate, MonteCarloReport, PathError, PathVerdict,
};
pub use pdmp::{
    pdmp_boundary_lambdas, pdmp_exclusion_mc, simulate_pdmp, LambdaBar, PdmpSpec, RegimeCoeffs,
    SwitchedPath,
};
pub use rng::{gaussian_stream, GaussianStream};
pub use sde::{simulate_boundary, simulate_full, Path, SimConfig, SimError};
pub use thresholds::{
    classify_stochastic, lambda1, lambda2, lambda_linear, moment, ClassifyError, Lambda,
    MomentEstimate, Regime, RegimeReport, Theorem, ThresholdError,
};
