//! Boundary diffusions and their stationary densities.
//!
//! On its own axis each species follows the scalar diffusion
//!
//! ```text
//! dφ = φ(a − bφ) dt + (γφ + αφ²) dB
//! ```
//!
//! whose stationary density is the normalized speed density
//! m(φ) ∝ σ(φ)⁻² exp(∫ 2μ/σ²). For γ = 0 this is the closed form
//! (c*/φ⁴)·exp(2b/(α²φ) − a/(α²φ²)); for α = 0 it is a Gamma density. The
//! evaluation rule here always computes the exponent by quadrature — the
//! closed forms serve as independent cross-checks in the tests — and the
//! normalizing constant is always computed, never taken from a formula.
//!
//! Integration strategy by noise family: for α ≠ 0, γ = 0 the substitution
//! u = 1/φ turns moments into Gaussian-type integrals with peak near u = b/a;
//! for α = 0 the density is integrated in φ directly (exponential right
//! tail); in the mixed case the φ⁻⁴ power tail is compactified by splitting at
//! φ_s and mapping the tail through t = φ_s/φ.

use crate::params::{ModelParams, Species};
use crate::quad::{self, QuadError};
use core::cell::Cell;
use thiserror::Error;

/// One species' boundary diffusion coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySpec {
    /// Growth rate, must be positive.
    pub a: f64,
    /// Self-competition rate, must be positive.
    pub b: f64,
    /// Quadratic noise intensity (φ² dB).
    pub alpha: f64,
    /// Linear noise intensity (φ dB).
    pub gamma: f64,
}

/// Failures of boundary-density construction and evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DensityError {
    /// A drift coefficient is not strictly positive and finite.
    #[error("boundary coefficient {field} must be strictly positive, got {value}")]
    InvalidCoefficient {
        /// Offending field name.
        field: &'static str,
        /// Offending value.
        value: f64,
    },
    /// Both noise intensities vanish: no diffusion, no stationary density.
    #[error("boundary diffusion is degenerate: alpha and gamma are both zero")]
    DegenerateNoise,
    /// α and γ of opposite signs make σ(φ) vanish at an interior point.
    #[error("alpha and gamma must not have opposite signs (sigma vanishes at phi = -gamma/alpha)")]
    OppositeNoiseSigns,
    /// With linear noise present, a − γ²/2 ≤ 0 sends the boundary process to
    /// zero almost surely; no stationary density exists.
    #[error("no stationary density: a - gamma^2/2 = {survival} <= 0")]
    NoStationaryDensity {
        /// The survival indicator a − γ²/2.
        survival: f64,
    },
    /// The normalization or moment quadrature failed.
    #[error("quadrature failure: {0}")]
    Quadrature(#[from] QuadError),
}

impl BoundarySpec {
    /// Extracts the boundary diffusion of `s` from the full model.
    pub fn for_species(p: &ModelParams, s: Species) -> BoundarySpec {
        let i = s.index();
        BoundarySpec {
            a: p.a[i],
            b: p.b[i],
            alpha: p.alpha[i],
            gamma: p.gamma[i],
        }
    }

    /// The survival indicator a − γ²/2 of the linear-noise boundary.
    pub fn survival(&self) -> f64 {
        self.a - 0.5 * self.gamma * self.gamma
    }

    /// Drift μ(φ) = φ(a − bφ).
    pub fn drift(&self, phi: f64) -> f64 {
        phi * (self.a - self.b * phi)
    }

    /// Diffusion coefficient σ(φ) = γφ + αφ².
    pub fn sigma(&self, phi: f64) -> f64 {
        self.gamma * phi + self.alpha * phi * phi
    }

    /// Checks the coefficients needed to *simulate* the diffusion. Zero noise
    /// is allowed here (the deterministic logistic limit).
    pub fn validate_sim(&self) -> Result<(), DensityError> {
        for (field, value) in [("a", self.a), ("b", self.b)] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(DensityError::InvalidCoefficient { field, value });
            }
        }
        for (field, value) in [("alpha", self.alpha), ("gamma", self.gamma)] {
            if !value.is_finite() {
                return Err(DensityError::InvalidCoefficient { field, value });
            }
        }
        Ok(())
    }

    /// Checks existence of a stationary density on (0, ∞).
    pub fn validate_density(&self) -> Result<(), DensityError> {
        self.validate_sim()?;
        if self.alpha == 0.0 && self.gamma == 0.0 {
            return Err(DensityError::DegenerateNoise);
        }
        if self.alpha * self.gamma < 0.0 {
            return Err(DensityError::OppositeNoiseSigns);
        }
        if self.gamma != 0.0 && self.survival() <= 0.0 {
            return Err(DensityError::NoStationaryDensity {
                survival: self.survival(),
            });
        }
        Ok(())
    }

    /// The speed-density exponent E(φ) = ∫ 2μ/σ² from the reference point
    /// a/b, computed by quadrature in the log abscissa where the integrand
    /// 2(a − bs)/(γ + αs)² is tame.
    pub fn exponent(&self, phi: f64, rel_tol: f64) -> Result<f64, DensityError> {
        let reference = self.a / self.b;
        if phi == reference {
            return Ok(0.0);
        }
        let (al, ga) = (self.alpha.abs(), self.gamma.abs());
        let integrand = |v: f64| {
            let s = libm::exp(v);
            let d = ga + al * s;
            2.0 * (self.a - self.b * s) / (d * d)
        };
        let (v_lo, v_hi) = if phi < reference {
            (libm::log(phi), libm::log(reference))
        } else {
            (libm::log(reference), libm::log(phi))
        };
        // For γ = 0 the integrand grows like e^(-v) toward φ → 0; once the
        // magnitude passes any representable exponent the density has
        // underflowed to zero anyway.
        if phi < reference && integrand(v_lo).abs() > 1e100 {
            return Ok(f64::NEG_INFINITY);
        }
        let out = quad::refine(&integrand, v_lo, v_hi, rel_tol, 1e-13)?;
        Ok(if phi >= reference {
            out.value
        } else {
            -out.value
        })
    }

    /// Log of the unnormalized speed density, −2 ln σ(φ) + E(φ).
    pub fn log_speed_unnorm(&self, phi: f64, rel_tol: f64) -> Result<f64, DensityError> {
        if phi <= 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        let (al, ga) = (self.alpha.abs(), self.gamma.abs());
        let sigma = ga * phi + al * phi * phi;
        let e = self.exponent(phi, rel_tol)?;
        Ok(e - 2.0 * libm::log(sigma))
    }
}

/// Noise family of a boundary spec, deciding the integration strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Family {
    /// α ≠ 0, γ = 0: integrate in u = 1/φ.
    Quadratic,
    /// α = 0, γ ≠ 0: integrate in φ.
    LinearNoise,
    /// Both nonzero: integrate in φ with the tail mapped through t = φ_s/φ.
    Mixed,
}

fn family(spec: &BoundarySpec) -> Family {
    match (spec.alpha != 0.0, spec.gamma != 0.0) {
        (true, false) => Family::Quadratic,
        (false, true) => Family::LinearNoise,
        (true, true) => Family::Mixed,
        (false, false) => unreachable!("validated spec has some noise"),
    }
}

pub(crate) struct RawMoment {
    /// Scaled integral; the true value is `value · exp(log_offset)`.
    pub value: f64,
    pub residual: f64,
    pub log_offset: f64,
    /// Integration window mapped back to φ, for support reporting.
    pub phi_window: (f64, f64),
}

/// Unnormalized ∫ φ^p e^(ℓ(φ)) dφ with ℓ the numeric log speed density.
/// Integrability (p inside the tail-exponent window) is the caller's job.
pub(crate) fn raw_moment(
    spec: &BoundarySpec,
    p: f64,
    rel_tol: f64,
) -> Result<RawMoment, DensityError> {
    let failed: Cell<Option<DensityError>> = Cell::new(None);
    let log_speed = |phi: f64| match spec.log_speed_unnorm(phi, rel_tol) {
        Ok(l) => l,
        Err(e) => {
            failed.set(Some(e));
            f64::NEG_INFINITY
        }
    };
    let check = |r: Result<quad::QuadOutcome, QuadError>| -> Result<quad::QuadOutcome, DensityError> {
        if let Some(e) = failed.take() {
            return Err(e);
        }
        r.map_err(DensityError::from)
    };
    let out = match family(spec) {
        Family::Quadratic => {
            // φ = 1/u: ∫ φ^p e^ℓ dφ = ∫ exp(ℓ(1/u) − (p+2) ln u) du,
            // which carries u^(2−p) at u → 0 and a Gaussian factor beyond the
            // peak near u = b/a.
            let log_f = |u: f64| log_speed(1.0 / u) - (p + 2.0) * libm::log(u);
            let guess = spec.b / spec.a;
            let o = check(quad::integrate_log(&log_f, 2.0 - p, guess, None, rel_tol))?;
            RawMoment {
                value: o.value,
                residual: o.residual,
                log_offset: o.log_offset,
                phi_window: (
                    1.0 / o.window.1,
                    if o.window.0 > 0.0 {
                        1.0 / o.window.0
                    } else {
                        f64::INFINITY
                    },
                ),
            }
        }
        Family::LinearNoise => {
            let sigma0 = p - 2.0 + 2.0 * spec.a / (spec.gamma * spec.gamma);
            let log_f = |phi: f64| log_speed(phi) + p * libm::log(phi);
            let o = check(quad::integrate_log(
                &log_f,
                sigma0,
                spec.a / spec.b,
                None,
                rel_tol,
            ))?;
            RawMoment {
                value: o.value,
                residual: o.residual,
                log_offset: o.log_offset,
                phi_window: o.window,
            }
        }
        Family::Mixed => {
            let sigma0 = p - 2.0 + 2.0 * spec.a / (spec.gamma * spec.gamma);
            let log_f = |phi: f64| log_speed(phi) + p * libm::log(phi);
            let phi_split = 4.0 * spec.a / spec.b;
            let head = check(quad::integrate_log(
                &log_f,
                sigma0,
                spec.a / spec.b,
                Some(phi_split),
                rel_tol,
            ))?;
            // Tail through t = φ_s/φ: ∫_{φ_s}^∞ f dφ = ∫₀^1 f(φ_s/t) φ_s/t² dt,
            // which behaves like t^(2−p) near 0 because f ~ φ^(p−4).
            let ln_split = libm::log(phi_split);
            let log_tail = |t: f64| {
                let phi = phi_split / t;
                log_f(phi) + ln_split - 2.0 * libm::log(t)
            };
            let tail = check(quad::integrate_log(
                &log_tail,
                2.0 - p,
                0.5,
                Some(1.0),
                rel_tol,
            ))?;
            // Bring the two pieces onto the larger offset before adding.
            let off = head.log_offset.max(tail.log_offset);
            let hv = head.value * libm::exp(head.log_offset - off);
            let tv = tail.value * libm::exp(tail.log_offset - off);
            let hr = head.residual * libm::exp(head.log_offset - off);
            let tr = tail.residual * libm::exp(tail.log_offset - off);
            RawMoment {
                value: hv + tv,
                residual: hr + tr,
                log_offset: off,
                phi_window: (head.window.0, f64::INFINITY),
            }
        }
    };
    Ok(out)
}

/// A normalized boundary stationary density with its evaluation rule.
#[derive(Debug, Clone)]
pub struct StationaryDensity {
    /// The boundary diffusion this density belongs to.
    pub spec: BoundarySpec,
    /// Relative tolerance used for all quadrature against this density.
    pub tol: f64,
    /// ln of the computed normalizing constant Z = ∫ e^ℓ (the density is
    /// e^(ℓ − log_norm)). Kept in logs: Z itself can overflow f64 for small
    /// noise intensities.
    pub log_norm: f64,
    /// Relative quadrature residual of the normalization.
    pub norm_rel_residual: f64,
    /// Truncation bounds in φ used by the normalization quadrature.
    pub support: (f64, f64),
    family: Family,
}

/// Builds the stationary density of `spec`, self-normalized by quadrature.
pub fn stationary_density(
    spec: &BoundarySpec,
    rel_tol: f64,
) -> Result<StationaryDensity, DensityError> {
    spec.validate_density()?;
    let z = raw_moment(spec, 0.0, rel_tol)?;
    if !(z.value > 0.0) || !z.value.is_finite() {
        return Err(DensityError::Quadrature(QuadError::DidNotConverge {
            value: z.value,
            residual: z.residual,
        }));
    }
    Ok(StationaryDensity {
        spec: *spec,
        tol: rel_tol,
        log_norm: libm::log(z.value) + z.log_offset,
        norm_rel_residual: z.residual / z.value,
        support: z.phi_window,
        family: family(spec),
    })
}

impl StationaryDensity {
    /// Density value at φ. Zero for φ ≤ 0 and wherever the unnormalized log
    /// density has underflowed.
    pub fn pdf(&self, phi: f64) -> f64 {
        if phi <= 0.0 {
            return 0.0;
        }
        match self.spec.log_speed_unnorm(phi, self.tol) {
            Ok(l) => libm::exp(l - self.log_norm),
            Err(_) => 0.0,
        }
    }

    /// Distribution function F(x) = ∫₀ˣ pdf, by quadrature.
    pub fn cdf(&self, x: f64) -> Result<f64, DensityError> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        let failed: Cell<Option<DensityError>> = Cell::new(None);
        let log_speed = |phi: f64| match self.spec.log_speed_unnorm(phi, self.tol) {
            Ok(l) => l,
            Err(e) => {
                failed.set(Some(e));
                f64::NEG_INFINITY
            }
        };
        let spec = &self.spec;
        let log_norm = self.log_norm;
        // Every branch integrates the already-normalized density, so the
        // resulting mass lives in [0, 1] and never overflows.
        let normalized_mass = |out: quad::QuadOutcome| {
            if out.value <= 0.0 {
                0.0
            } else {
                out.value * libm::exp(out.log_offset - log_norm)
            }
        };
        let mass = match self.family {
            Family::Quadratic => {
                // In u = 1/φ, F(x) is the mass of [1/x, u_hi]; the window
                // [u_lo, u_hi] comes from the normalization run.
                let (u_lo, u_hi) = (1.0 / self.support.1, 1.0 / self.support.0);
                let lo = (1.0 / x).max(u_lo);
                if lo >= u_hi {
                    0.0
                } else {
                    let f = |u: f64| {
                        let l = log_speed(1.0 / u) - 2.0 * libm::log(u) - log_norm;
                        if l == f64::NEG_INFINITY {
                            0.0
                        } else {
                            libm::exp(l)
                        }
                    };
                    quad::refine(&f, lo, u_hi, self.tol, self.tol)?.value
                }
            }
            Family::LinearNoise => {
                let sigma0 = 2.0 * spec.a / (spec.gamma * spec.gamma) - 2.0;
                let log_f = |phi: f64| log_speed(phi);
                normalized_mass(quad::integrate_log(
                    &log_f,
                    sigma0,
                    spec.a / spec.b,
                    Some(x),
                    self.tol,
                )?)
            }
            Family::Mixed => {
                let sigma0 = 2.0 * spec.a / (spec.gamma * spec.gamma) - 2.0;
                let log_f = |phi: f64| log_speed(phi);
                let phi_split = 4.0 * spec.a / spec.b;
                if x <= phi_split {
                    normalized_mass(quad::integrate_log(
                        &log_f,
                        sigma0,
                        spec.a / spec.b,
                        Some(x),
                        self.tol,
                    )?)
                } else {
                    let head = normalized_mass(quad::integrate_log(
                        &log_f,
                        sigma0,
                        spec.a / spec.b,
                        Some(phi_split),
                        self.tol,
                    )?);
                    let ln_split = libm::log(phi_split);
                    let g = |t: f64| {
                        let l = log_f(phi_split / t) + ln_split - 2.0 * libm::log(t) - log_norm;
                        if l == f64::NEG_INFINITY {
                            0.0
                        } else {
                            libm::exp(l)
                        }
                    };
                    let tail = quad::refine(&g, phi_split / x, 1.0, self.tol, self.tol)?.value;
                    head + tail
                }
            }
        };
        if let Some(e) = failed.take() {
            return Err(e);
        }
        Ok(mass.clamp(0.0, 1.0))
    }
}
