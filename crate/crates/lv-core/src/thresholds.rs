//! Moments of boundary densities, the invasion thresholds λ₁/λ₂, and the
//! stochastic regime classification.
//!
//! The thresholds average one species' per-capita growth against the other
//! species' boundary invariant density:
//!
//! ```text
//! λ₁ = ∫ (a₂ − c₂φ − (β₂²/2)φ²) f*₁(φ) dφ = a₂ − c₂Q₁ − (β₂²/2)Q₂
//! λ₂ = ∫ (a₁ − c₁φ − (β₁²/2)φ²) f*₂(φ) dφ
//! ```
//!
//! The sign pair decides the regime: (+,+) coexistence, mixed signs single
//! exclusion with the negative λ as the Lyapunov exponent of the dying
//! species, (−,−) bistable exclusion. For γ = 0 the moments are computed
//! against the closed-form density in u = 1/φ coordinates, where the
//! integrand is u^(2−p)·exp(2b/α²·u − a/α²·u²); otherwise they go through the
//! generic speed-density machinery. Each λ carries an error bound obtained by
//! pushing the quadrature residuals of Q₁ and Q₂ linearly through the affine
//! formula.

use crate::density::{raw_moment, stationary_density, BoundarySpec, DensityError, StationaryDensity};
use crate::params::{ModelParams, NoiseMode, Species, ValidateError};
use crate::quad;
use thiserror::Error;

/// A moment Q_p with its quadrature residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentEstimate {
    /// The computed moment.
    pub value: f64,
    /// Error bound from the quadrature refinement residuals.
    pub residual: f64,
}

/// A threshold value with an interlocked quadrature error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lambda {
    /// The threshold.
    pub value: f64,
    /// c·ΔQ₁ + (β²/2)·ΔQ₂ propagated from the moment residuals.
    pub error_bound: f64,
}

/// Errors of moment and threshold computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ThresholdError {
    /// Model validation failed.
    #[error(transparent)]
    Validate(#[from] ValidateError),
    /// Boundary density construction or quadrature failed.
    #[error(transparent)]
    Density(#[from] DensityError),
    /// The requested moment lies outside the density's integrability window.
    #[error("moment p={p} diverges; integrable range is ({min}, {max})")]
    MomentDiverges {
        /// Requested exponent.
        p: f64,
        /// Lower integrability bound (exclusive).
        min: f64,
        /// Upper integrability bound (exclusive).
        max: f64,
    },
    /// The linear-noise boundary of a species is itself extinct
    /// (a − γ²/2 ≤ 0), so its invariant density and λ̃ do not exist.
    #[error("boundary of species {species} is extinct: a - gamma^2/2 = {survival} <= 0")]
    BoundaryExtinct {
        /// The extinct species.
        species: Species,
        /// Its survival indicator.
        survival: f64,
    },
    /// The operation requires a different noise mode.
    #[error("operation requires {required} noise mode")]
    WrongMode {
        /// Human-readable mode requirement.
        required: &'static str,
    },
}

/// Integrability window (exclusive bounds) for Q_p of a boundary density:
/// the left tail exponent demands p > 1 − 2a/γ² when γ ≠ 0, the φ⁻⁴ right
/// tail demands p < 3 when α ≠ 0.
pub fn moment_window(spec: &BoundarySpec) -> (f64, f64) {
    let min = if spec.gamma != 0.0 {
        1.0 - 2.0 * spec.a / (spec.gamma * spec.gamma)
    } else {
        f64::NEG_INFINITY
    };
    let max = if spec.alpha != 0.0 {
        3.0
    } else {
        f64::INFINITY
    };
    (min, max)
}

/// Q_p = ∫ φ^p f*(φ) dφ against a constructed stationary density.
pub fn moment(d: &StationaryDensity, p: f64) -> Result<MomentEstimate, ThresholdError> {
    let (min, max) = moment_window(&d.spec);
    if p <= min || p >= max {
        return Err(ThresholdError::MomentDiverges { p, min, max });
    }
    let raw = raw_moment(&d.spec, p, d.tol)?;
    let value = libm::exp(libm::log(raw.value) + raw.log_offset - d.log_norm);
    let residual = value * (raw.residual / raw.value + d.norm_rel_residual);
    Ok(MomentEstimate { value, residual })
}

/// Q_p for a γ = 0 boundary via the closed-form u = 1/φ integrand
/// u^(2−p)·exp(Bu − Au²), A = a/α², B = 2b/α². The normalizing constant
/// cancels in the ratio J(2−p)/J(2).
pub(crate) fn quadratic_moment(
    spec: &BoundarySpec,
    p: f64,
    rel_tol: f64,
) -> Result<MomentEstimate, ThresholdError> {
    if p >= 3.0 {
        return Err(ThresholdError::MomentDiverges {
            p,
            min: f64::NEG_INFINITY,
            max: 3.0,
        });
    }
    let a2 = spec.alpha * spec.alpha;
    let (big_a, big_b) = (spec.a / a2, 2.0 * spec.b / a2);
    let guess = spec.b / spec.a;
    let j = |k: f64| {
        let log_f = move |u: f64| k * libm::log(u) + big_b * u - big_a * u * u;
        quad::integrate_log(&log_f, k, guess, None, rel_tol)
    };
    let num = j(2.0 - p).map_err(DensityError::from)?;
    let den = j(2.0).map_err(DensityError::from)?;
    // The peak magnitudes cancel in the ratio; combine them in log space so
    // vanishing-noise specs (peaks of thousands of nats) stay finite.
    let value = num.value / den.value * libm::exp(num.log_offset - den.log_offset);
    let residual = value * (num.residual / num.value + den.residual / den.value);
    Ok(MomentEstimate { value, residual })
}

/// (Q₁, Q₂) of a boundary spec, dispatching on the noise family.
fn boundary_q12(
    spec: &BoundarySpec,
    rel_tol: f64,
) -> Result<(MomentEstimate, MomentEstimate), ThresholdError> {
    spec.validate_density()?;
    if spec.gamma == 0.0 {
        Ok((
            quadratic_moment(spec, 1.0, rel_tol)?,
            quadratic_moment(spec, 2.0, rel_tol)?,
        ))
    } else {
        let d = stationary_density(spec, rel_tol)?;
        Ok((moment(&d, 1.0)?, moment(&d, 2.0)?))
    }
}

/// λ₁ = a₂ − c₂Q₁ − (β₂²/2)Q₂ with Q_p against species 1's boundary density.
pub fn lambda1(p: &ModelParams, rel_tol: f64) -> Result<Lambda, ThresholdError> {
    p.validate()?;
    let spec = BoundarySpec::for_species(p, Species::One);
    let (q1, q2) = boundary_q12(&spec, rel_tol)?;
    let half_beta2 = 0.5 * p.beta[1] * p.beta[1];
    Ok(Lambda {
        value: p.a[1] - p.c[1] * q1.value - half_beta2 * q2.value,
        error_bound: p.c[1] * q1.residual + half_beta2 * q2.residual,
    })
}

/// λ₂ = a₁ − c₁Q₁ − (β₁²/2)Q₂ with Q_p against species 2's boundary density.
pub fn lambda2(p: &ModelParams, rel_tol: f64) -> Result<Lambda, ThresholdError> {
    p.validate()?;
    let spec = BoundarySpec::for_species(p, Species::Two);
    let (q1, q2) = boundary_q12(&spec, rel_tol)?;
    let half_beta1 = 0.5 * p.beta[0] * p.beta[0];
    Ok(Lambda {
        value: p.a[0] - p.c[0] * q1.value - half_beta1 * q2.value,
        error_bound: p.c[0] * q1.residual + half_beta1 * q2.residual,
    })
}

/// Closed-form thresholds of the linear-noise model:
/// λ̃₁ = a₂ − (c₂/b₁)(a₁ − γ₁²/2), λ̃₂ = a₁ − (c₁/b₂)(a₂ − γ₂²/2).
///
/// Exact arithmetic, no quadrature. Requires α ≡ β ≡ 0 (γ = 0 is allowed and
/// reproduces the deterministic thresholds). Fails with
/// [`ThresholdError::BoundaryExtinct`] when a boundary survival indicator is
/// not positive, in which case the extinction happens at rate aᵢ − γᵢ²/2
/// regardless of the other species.
pub fn lambda_linear(p: &ModelParams) -> Result<(f64, f64), ThresholdError> {
    p.validate_deterministic()?;
    if p.alpha != [0.0, 0.0] || p.beta != [0.0, 0.0] {
        return Err(ThresholdError::WrongMode {
            required: "linear (alpha = beta = 0)",
        });
    }
    let s1 = p.a[0] - 0.5 * p.gamma[0] * p.gamma[0];
    let s2 = p.a[1] - 0.5 * p.gamma[1] * p.gamma[1];
    if s1 <= 0.0 {
        return Err(ThresholdError::BoundaryExtinct {
            species: Species::One,
            survival: s1,
        });
    }
    if s2 <= 0.0 {
        return Err(ThresholdError::BoundaryExtinct {
            species: Species::Two,
            survival: s2,
        });
    }
    Ok((
        p.a[1] - p.c[1] / p.b[0] * s1,
        p.a[0] - p.c[0] / p.b[1] * s2,
    ))
}

/// Long-run regime of the stochastic system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Both thresholds positive: stochastic coexistence, unique interior
    /// invariant measure.
    Coexist,
    /// λ₁ < 0 < λ₂: Y dies at rate λ₁, X converges to its boundary measure.
    YDiesXPersists,
    /// λ₂ < 0 < λ₁: X dies at rate λ₂, Y converges to its boundary measure.
    XDiesYPersists,
    /// Both negative: each species dies with positive probability and the
    /// two events partition the sample space.
    BistableExclusion,
    /// Linear mode with both boundary survival indicators negative: both
    /// species die almost surely.
    BothExtinct,
    /// A threshold sits within tolerance of zero; the critical case is not
    /// classified.
    Unclassified,
}

impl core::fmt::Display for Regime {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let s = match self {
            Regime::Coexist => "Coexist",
            Regime::YDiesXPersists => "YDiesXPersists",
            Regime::XDiesYPersists => "XDiesYPersists",
            Regime::BistableExclusion => "BistableExclusion",
            Regime::BothExtinct => "BothExtinct",
            Regime::Unclassified => "Unclassified",
        };
        f.write_str(s)
    }
}

/// Which theorem justifies a classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theorem {
    /// Coexistence with a unique interior invariant measure.
    T21,
    /// Single exclusion with an almost-sure Lyapunov exponent.
    T22,
    /// Bistable exclusion, p + q = 1.
    T23,
    /// Linear-noise classification, numbered case.
    T61Case(u8),
    /// Linear-noise model with both boundaries extinct (cases 1 and 2 apply
    /// together).
    T61Cases12,
}

impl core::fmt::Display for Theorem {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Theorem::T21 => f.write_str("2.1"),
            Theorem::T22 => f.write_str("2.2"),
            Theorem::T23 => f.write_str("2.3"),
            Theorem::T61Case(n) => write!(f, "6.1 case {n}"),
            Theorem::T61Cases12 => f.write_str("6.1 cases 1+2"),
        }
    }
}

/// Result of the stochastic classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeReport {
    /// λ₁ (or λ̃₁), absent when species 1's boundary measure does not exist.
    pub lambda1: Option<Lambda>,
    /// λ₂ (or λ̃₂), absent when species 2's boundary measure does not exist.
    pub lambda2: Option<Lambda>,
    /// Boundary survival indicators aᵢ − γᵢ²/2, reported in linear and
    /// general modes only.
    pub survival: Option<[f64; 2]>,
    /// The classified regime.
    pub regime: Regime,
    /// Justifying theorem, absent for [`Regime::Unclassified`].
    pub theorem: Option<Theorem>,
}

/// Classification failures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    /// Model validation failed.
    #[error(transparent)]
    Validate(#[from] ValidateError),
    /// Threshold computation failed.
    #[error(transparent)]
    Threshold(#[from] ThresholdError),
}

fn exact(value: f64) -> Lambda {
    Lambda {
        value,
        error_bound: 0.0,
    }
}

/// Classifies the stochastic system by the signs of (λ₁, λ₂).
///
/// In linear mode the boundary survival indicators aᵢ − γᵢ²/2 are checked
/// first and decide extinction before any threshold is computed; the λ̃
/// closed forms are used when both boundaries survive. A threshold within
/// `tol` (or within its own quadrature error bound) of zero yields
/// [`Regime::Unclassified`].
pub fn classify_stochastic(p: &ModelParams, tol: f64) -> Result<RegimeReport, ClassifyError> {
    let mode = p.validate()?;
    let survival = [
        p.a[0] - 0.5 * p.gamma[0] * p.gamma[0],
        p.a[1] - 0.5 * p.gamma[1] * p.gamma[1],
    ];
    let report_survival = match mode {
        NoiseMode::PureQuadratic => None,
        _ => Some(survival),
    };
    // Boundary extinction (linear/general modes only): a species whose own
    // linear-noise boundary dies drags itself to zero no matter what the
    // other does.
    if mode != NoiseMode::PureQuadratic {
        let crit1 = p.gamma[0] != 0.0 && survival[0].abs() < tol;
        let crit2 = p.gamma[1] != 0.0 && survival[1].abs() < tol;
        if crit1 || crit2 {
            return Ok(RegimeReport {
                lambda1: None,
                lambda2: None,
                survival: report_survival,
                regime: Regime::Unclassified,
                theorem: None,
            });
        }
        let dead1 = p.gamma[0] != 0.0 && survival[0] < 0.0;
        let dead2 = p.gamma[1] != 0.0 && survival[1] < 0.0;
        match (dead1, dead2) {
            (true, true) => {
                return Ok(RegimeReport {
                    lambda1: None,
                    lambda2: None,
                    survival: report_survival,
                    regime: Regime::BothExtinct,
                    theorem: Some(Theorem::T61Cases12),
                })
            }
            (true, false) => {
                return Ok(RegimeReport {
                    lambda1: None,
                    lambda2: None,
                    survival: report_survival,
                    regime: Regime::XDiesYPersists,
                    theorem: Some(Theorem::T61Case(1)),
                })
            }
            (false, true) => {
                return Ok(RegimeReport {
                    lambda1: None,
                    lambda2: None,
                    survival: report_survival,
                    regime: Regime::YDiesXPersists,
                    theorem: Some(Theorem::T61Case(2)),
                })
            }
            (false, false) => {}
        }
    }
    let (l1, l2) = match mode {
        NoiseMode::Linear => {
            let (t1, t2) = lambda_linear(p)?;
            (exact(t1), exact(t2))
        }
        _ => (lambda1(p, tol)?, lambda2(p, tol)?),
    };
    let uncertain = |l: &Lambda| l.value.abs() < tol || l.value.abs() <= l.error_bound;
    if uncertain(&l1) || uncertain(&l2) {
        return Ok(RegimeReport {
            lambda1: Some(l1),
            lambda2: Some(l2),
            survival: report_survival,
            regime: Regime::Unclassified,
            theorem: None,
        });
    }
    let (regime, theorem) = match (l1.value > 0.0, l2.value > 0.0) {
        (true, true) => (Regime::Coexist, Theorem::T21),
        (false, true) => (Regime::YDiesXPersists, Theorem::T22),
        (true, false) => (Regime::XDiesYPersists, Theorem::T22),
        (false, false) => (Regime::BistableExclusion, Theorem::T23),
    };
    let theorem = if mode == NoiseMode::Linear {
        Some(match regime {
            Regime::XDiesYPersists => Theorem::T61Case(3),
            Regime::YDiesXPersists => Theorem::T61Case(4),
            Regime::Coexist => Theorem::T61Case(5),
            _ => Theorem::T61Case(6),
        })
    } else {
        Some(theorem)
    };
    Ok(RegimeReport {
        lambda1: Some(l1),
        lambda2: Some(l2),
        survival: report_survival,
        regime,
        theorem,
    })
}

/// Convenience: thresholds used by the deterministic classifier, for the
/// vanishing-noise comparisons.
pub fn deterministic_lambdas(p: &ModelParams) -> (f64, f64) {
    (
        p.a[1] - p.c[1] * p.a[0] / p.b[0],
        p.a[0] - p.c[0] * p.a[1] / p.b[1],
    )
}
