//! Shared test fixtures: the three reference parameter sets and threshold
//! values frozen from an independent 30-digit quadrature of the closed-form
//! boundary densities.

use crate::params::ModelParams;

pub(crate) fn example1() -> ModelParams {
    ModelParams {
        a: [4.0, 3.0],
        b: [1.5, 1.0],
        c: [1.0, 0.5],
        alpha: [0.25, 0.5],
        beta: [0.5, 0.25],
        gamma: [0.0, 0.0],
    }
}

pub(crate) fn example2() -> ModelParams {
    ModelParams {
        a: [4.0, 2.0],
        b: [1.5, 1.0],
        c: [2.0, 1.0],
        alpha: [1.0, 0.5],
        beta: [0.5, 1.0],
        gamma: [0.0, 0.0],
    }
}

pub(crate) fn example3() -> ModelParams {
    ModelParams {
        a: [2.0, 2.0],
        b: [1.0, 1.0],
        c: [2.0, 2.0],
        alpha: [1.0, 1.0],
        beta: [1.0, 1.0],
        gamma: [0.0, 0.0],
    }
}

/// (λ₁, λ₂) of the coexistence example. λ₂ = a₁ − a₂ exactly because c₁ = b₂
/// and β₁ = α₂ collapse the integrand through b·Q₁ + (α²/2)Q₂ = a.
pub(crate) const EX1_LAMBDA: (f64, f64) = (1.526_317_332_443_868_5, 1.0);

/// (λ₁, λ₂) of the single-exclusion example.
pub(crate) const EX2_LAMBDA: (f64, f64) = (-1.220_653_315_84, 0.391_351_467_153);

/// λ₁ = λ₂ of the symmetric bistable example.
pub(crate) const EX3_LAMBDA: f64 = -1.125_721_268_837_533_5;
