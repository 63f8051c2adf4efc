//! Model parameter records, validation, and the deterministic classification.
//!
//! The deterministic system
//!
//! ```text
//! dx = x(a₁ − b₁x − c₁y) dt
//! dy = y(a₂ − b₂y − c₂x) dt
//! ```
//!
//! is classified by the signs of λ₁ = a₂ − c₂a₁/b₁ and λ₂ = a₁ − c₁a₂/b₂:
//! both positive gives convergence to the unique interior equilibrium, mixed
//! signs give dominance of one species, both negative gives a separatrix with
//! initial-condition-dependent exclusion.

use thiserror::Error;

/// Absolute tolerance below which a threshold counts as the unclassified
/// critical case λ = 0.
pub const CRITICAL_TOL: f64 = 1e-12;

/// Species index. Coefficient arrays are ordered `[species 1, species 2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Species {
    /// The x component.
    One,
    /// The y component.
    Two,
}

impl Species {
    /// Zero-based index into the coefficient arrays.
    pub fn index(self) -> usize {
        match self {
            Species::One => 0,
            Species::Two => 1,
        }
    }

    /// The other species.
    pub fn other(self) -> Species {
        match self {
            Species::One => Species::Two,
            Species::Two => Species::One,
        }
    }
}

impl core::fmt::Display for Species {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}", self.index() + 1)
    }
}

/// The twelve coefficients of the two-species model, species-major:
/// `a = [a₁, a₂]` and so on.
///
/// `alpha` are the quadratic noise intensities (x²dB terms), `beta` the
/// cross-term intensities (xy dB, shared Brownian motion), `gamma` the linear
/// intensities (x dB). `gamma = [0, 0]` recovers the pure-quadratic model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Intrinsic growth rates, 1/time.
    pub a: [f64; 2],
    /// Intra-specific competition, 1/(density·time).
    pub b: [f64; 2],
    /// Inter-specific competition, 1/(density·time).
    pub c: [f64; 2],
    /// Quadratic noise intensities.
    pub alpha: [f64; 2],
    /// Cross-term noise intensities (shared driving noise).
    pub beta: [f64; 2],
    /// Linear noise intensities.
    pub gamma: [f64; 2],
}

/// Which noise structure a validated parameter set has.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseMode {
    /// γ ≡ 0, both α nonzero: the pure-quadratic model.
    PureQuadratic,
    /// α ≡ β ≡ 0, both γ nonzero: the linear-noise model.
    Linear,
    /// Any other supported combination (per species either α or γ drives the
    /// boundary, never both).
    General,
}

/// Validation failures for [`ModelParams`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValidateError {
    /// A growth or competition coefficient is zero, negative, or non-finite.
    #[error("coefficient {field} must be strictly positive, got {value}")]
    NonPositiveCoefficient {
        /// Name of the offending field, e.g. `"b1"`.
        field: &'static str,
        /// The rejected value.
        value: f64,
    },
    /// A noise intensity is NaN or infinite.
    #[error("coefficient {field} must be finite, got {value}")]
    NonFiniteCoefficient {
        /// Name of the offending field.
        field: &'static str,
        /// The rejected value.
        value: f64,
    },
    /// All noise intensities of one species vanish; the stochastic
    /// classification is undefined (use the deterministic classifier).
    #[error("all noise intensities of species {species} are zero")]
    DegenerateNoise {
        /// The species with no driving noise.
        species: Species,
    },
    /// A species carries both quadratic and linear noise; the 2-D mixed model
    /// is unsupported.
    #[error("species {species} has both alpha and gamma nonzero; mixed noise is unsupported")]
    MixedModeUnsupported {
        /// The species with mixed noise terms.
        species: Species,
    },
}

const FIELD_NAMES: [[&str; 2]; 6] = [
    ["a1", "a2"],
    ["b1", "b2"],
    ["c1", "c2"],
    ["alpha1", "alpha2"],
    ["beta1", "beta2"],
    ["gamma1", "gamma2"],
];

impl ModelParams {
    /// Checks every invariant and identifies the noise mode.
    ///
    /// Returns the input's [`NoiseMode`] on success. Noise fields may carry
    /// either sign (only their squares enter the analysis), but per species at
    /// most one of α, γ may be nonzero, and at least one of α, β, γ must be.
    pub fn validate(&self) -> Result<NoiseMode, ValidateError> {
        self.validate_deterministic()?;
        let noise = [self.alpha, self.beta, self.gamma];
        for (group, names) in noise.iter().zip(&FIELD_NAMES[3..]) {
            for s in 0..2 {
                if !group[s].is_finite() {
                    return Err(ValidateError::NonFiniteCoefficient {
                        field: names[s],
                        value: group[s],
                    });
                }
            }
        }
        for s in [Species::One, Species::Two] {
            let i = s.index();
            if self.alpha[i] != 0.0 && self.gamma[i] != 0.0 {
                return Err(ValidateError::MixedModeUnsupported { species: s });
            }
            if self.alpha[i] == 0.0 && self.beta[i] == 0.0 && self.gamma[i] == 0.0 {
                return Err(ValidateError::DegenerateNoise { species: s });
            }
        }
        let quadratic = self.gamma == [0.0, 0.0] && self.alpha[0] != 0.0 && self.alpha[1] != 0.0;
        let linear = self.alpha == [0.0, 0.0]
            && self.beta == [0.0, 0.0]
            && self.gamma[0] != 0.0
            && self.gamma[1] != 0.0;
        Ok(if quadratic {
            NoiseMode::PureQuadratic
        } else if linear {
            NoiseMode::Linear
        } else {
            NoiseMode::General
        })
    }

    /// Validates only the drift coefficients a, b, c (noise ignored), the
    /// precondition of the deterministic classifier and of the simulators.
    pub fn validate_deterministic(&self) -> Result<(), ValidateError> {
        let drift = [self.a, self.b, self.c];
        for (group, names) in drift.iter().zip(&FIELD_NAMES[..3]) {
            for s in 0..2 {
                if !(group[s] > 0.0) || !group[s].is_finite() {
                    return Err(ValidateError::NonPositiveCoefficient {
                        field: names[s],
                        value: group[s],
                    });
                }
            }
        }
        Ok(())
    }

    /// The same model with the species indices exchanged.
    pub fn swap_species(&self) -> ModelParams {
        let sw = |v: [f64; 2]| [v[1], v[0]];
        ModelParams {
            a: sw(self.a),
            b: sw(self.b),
            c: sw(self.c),
            alpha: sw(self.alpha),
            beta: sw(self.beta),
            gamma: sw(self.gamma),
        }
    }
}

/// Outcome of the deterministic four-case classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeterministicCase {
    /// λ₁ > 0, λ₂ > 0: all interior solutions converge to the positive
    /// equilibrium.
    Coexist,
    /// λ₁ > 0, λ₂ < 0: solutions converge to (0, a₂/b₂).
    YWins,
    /// λ₁ < 0, λ₂ > 0: solutions converge to (a₁/b₁, 0).
    XWins,
    /// λ₁ < 0, λ₂ < 0: a separatrix splits the quadrant; the initially
    /// advantaged species wins.
    Bistable,
}

impl core::fmt::Display for DeterministicCase {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let s = match self {
            DeterministicCase::Coexist => "Coexist",
            DeterministicCase::YWins => "YWins",
            DeterministicCase::XWins => "XWins",
            DeterministicCase::Bistable => "Bistable",
        };
        f.write_str(s)
    }
}

/// Deterministic thresholds, case, and (for coexistence) the equilibrium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeterministicRegime {
    /// λ₁ = a₂ − c₂a₁/b₁.
    pub lambda1_det: f64,
    /// λ₂ = a₁ − c₁a₂/b₂.
    pub lambda2_det: f64,
    /// The classified case.
    pub case: DeterministicCase,
    /// Interior equilibrium (x*, y*), present only for [`DeterministicCase::Coexist`].
    pub equilibrium: Option<[f64; 2]>,
}

/// Errors from [`classify_deterministic`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyDetError {
    /// Invalid drift coefficients.
    #[error(transparent)]
    Validate(#[from] ValidateError),
    /// A threshold is zero within [`CRITICAL_TOL`]; the critical case is not
    /// classified.
    #[error("critical case: lambda1={lambda1}, lambda2={lambda2} (|lambda| < {CRITICAL_TOL})")]
    CriticalCase {
        /// Computed λ₁.
        lambda1: f64,
        /// Computed λ₂.
        lambda2: f64,
    },
}

/// Classifies the noiseless system by the signs of (λ₁, λ₂).
///
/// Noise fields are ignored. Refuses to classify when either threshold lies
/// within [`CRITICAL_TOL`] of zero.
pub fn classify_deterministic(p: &ModelParams) -> Result<DeterministicRegime, ClassifyDetError> {
    p.validate_deterministic()?;
    let lambda1 = p.a[1] - p.c[1] * p.a[0] / p.b[0];
    let lambda2 = p.a[0] - p.c[0] * p.a[1] / p.b[1];
    if lambda1.abs() < CRITICAL_TOL || lambda2.abs() < CRITICAL_TOL {
        return Err(ClassifyDetError::CriticalCase { lambda1, lambda2 });
    }
    let (case, equilibrium) = match (lambda1 > 0.0, lambda2 > 0.0) {
        (true, true) => {
            // Intersection of the nullclines b₁x + c₁y = a₁, c₂x + b₂y = a₂;
            // both thresholds positive make the denominator and both
            // numerators positive.
            let den = p.b[0] * p.b[1] - p.c[0] * p.c[1];
            let eq = [
                (p.a[0] * p.b[1] - p.a[1] * p.c[0]) / den,
                (p.a[1] * p.b[0] - p.a[0] * p.c[1]) / den,
            ];
            (DeterministicCase::Coexist, Some(eq))
        }
        (true, false) => (DeterministicCase::YWins, None),
        (false, true) => (DeterministicCase::XWins, None),
        (false, false) => (DeterministicCase::Bistable, None),
    };
    Ok(DeterministicRegime {
        lambda1_det: lambda1,
        lambda2_det: lambda2,
        case,
        equilibrium,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{example1, example3};
    use approx::assert_relative_eq;

    #[test]
    fn example1_is_pure_quadratic() {
        assert_eq!(example1().validate(), Ok(NoiseMode::PureQuadratic));
    }

    #[test]
    fn zero_b1_names_the_field() {
        let mut p = example1();
        p.b[0] = 0.0;
        match p.validate() {
            Err(ValidateError::NonPositiveCoefficient { field, .. }) => assert_eq!(field, "b1"),
            other => panic!("expected NonPositiveCoefficient, got {other:?}"),
        }
    }

    #[test]
    fn linear_mode_accepted() {
        let p = ModelParams {
            alpha: [0.0, 0.0],
            beta: [0.0, 0.0],
            gamma: [0.5, 0.5],
            ..example1()
        };
        assert_eq!(p.validate(), Ok(NoiseMode::Linear));
    }

    #[test]
    fn mixed_noise_rejected() {
        let p = ModelParams {
            gamma: [0.3, 0.0],
            ..example1()
        };
        assert_eq!(
            p.validate(),
            Err(ValidateError::MixedModeUnsupported {
                species: Species::One
            })
        );
    }

    #[test]
    fn dead_noise_rejected() {
        let p = ModelParams {
            alpha: [0.25, 0.0],
            beta: [0.5, 0.0],
            ..example1()
        };
        assert_eq!(
            p.validate(),
            Err(ValidateError::DegenerateNoise {
                species: Species::Two
            })
        );
    }

    #[test]
    fn per_species_forms_may_differ() {
        let p = ModelParams {
            alpha: [0.25, 0.0],
            beta: [0.0, 0.0],
            gamma: [0.0, 0.4],
            ..example1()
        };
        assert_eq!(p.validate(), Ok(NoiseMode::General));
    }

    #[test]
    fn example1_classification() {
        let r = classify_deterministic(&example1()).unwrap();
        assert_relative_eq!(r.lambda1_det, 5.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(r.lambda2_det, 1.0, max_relative = 1e-14);
        assert_eq!(r.case, DeterministicCase::Coexist);
        let eq = r.equilibrium.unwrap();
        assert_relative_eq!(eq[0], 1.0, max_relative = 1e-14);
        assert_relative_eq!(eq[1], 2.5, max_relative = 1e-14);
    }

    #[test]
    fn example3_is_bistable() {
        let r = classify_deterministic(&example3()).unwrap();
        assert_relative_eq!(r.lambda1_det, -2.0, max_relative = 1e-14);
        assert_relative_eq!(r.lambda2_det, -2.0, max_relative = 1e-14);
        assert_eq!(r.case, DeterministicCase::Bistable);
        assert!(r.equilibrium.is_none());
    }

    #[test]
    fn vanishing_inter_specific_competition_coexists() {
        let p = ModelParams {
            c: [1e-9, 1e-9],
            ..example1()
        };
        let r = classify_deterministic(&p).unwrap();
        assert_eq!(r.case, DeterministicCase::Coexist);
    }

    #[test]
    fn equilibrium_is_a_drift_root() {
        let p = example1();
        let eq = classify_deterministic(&p).unwrap().equilibrium.unwrap();
        let fx = eq[0] * (p.a[0] - p.b[0] * eq[0] - p.c[0] * eq[1]);
        let fy = eq[1] * (p.a[1] - p.b[1] * eq[1] - p.c[1] * eq[0]);
        assert!(fx.abs() < 1e-12 && fy.abs() < 1e-12, "fx={fx} fy={fy}");
    }

    #[test]
    fn critical_case_refused() {
        // a2 = c2 a1 / b1 makes lambda1 exactly zero.
        let p = ModelParams {
            a: [4.0, 2.0],
            b: [1.0, 1.0],
            c: [1.0, 0.5],
            ..example1()
        };
        assert!(matches!(
            classify_deterministic(&p),
            Err(ClassifyDetError::CriticalCase { .. })
        ));
    }

    #[test]
    fn swap_equivariance() {
        let p = ModelParams {
            a: [3.1, 2.2],
            b: [1.2, 0.8],
            c: [0.9, 1.7],
            alpha: [0.3, 0.4],
            beta: [0.1, 0.2],
            gamma: [0.0, 0.0],
        };
        let r = classify_deterministic(&p).unwrap();
        let rs = classify_deterministic(&p.swap_species()).unwrap();
        assert_relative_eq!(r.lambda1_det, rs.lambda2_det, max_relative = 1e-14);
        assert_relative_eq!(r.lambda2_det, rs.lambda1_det, max_relative = 1e-14);
        let swapped_case = match rs.case {
            DeterministicCase::YWins => DeterministicCase::XWins,
            DeterministicCase::XWins => DeterministicCase::YWins,
            other => other,
        };
        assert_eq!(r.case, swapped_case);
    }
}
