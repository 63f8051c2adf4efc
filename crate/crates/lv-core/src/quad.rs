//! Composite Gauss-Legendre quadrature with dyadic refinement.
//!
//! Integrals of stationary densities are stiff near φ = 0 and heavy-tailed, so
//! callers describe the integrand by its *log* together with the algebraic
//! power σ it carries at the left endpoint. [`integrate_log`] then
//!
//! 1. substitutes x = wᵐ with m = ⌈4/(1+σ)⌉ so the transformed integrand has a
//!    smooth (at least C³) left corner,
//! 2. locates the peak of the log-integrand by a factor-2 scan plus
//!    golden-section refinement,
//! 3. truncates where the log-integrand has fallen [`NAT_DROP`] nats below the
//!    peak, and
//! 4. applies 16-point Gauss-Legendre panels, doubling the panel count until
//!    two successive estimates agree to the requested tolerance.
//!
//! The difference between the last two estimates is reported as the
//! quadrature residual and propagated by callers into threshold error bounds.

use thiserror::Error;

/// Truncation depth: the integrand is cut where its log falls this many nats
/// below the peak (a relative mass of ~4e-18, far below the tolerances used).
pub const NAT_DROP: f64 = 40.0;

const LN_2: f64 = core::f64::consts::LN_2;

/// Positive abscissas of the 16-point Gauss-Legendre rule on [-1, 1].
const GL_X: [f64; 8] = [
    0.095_012_509_837_637_440_185,
    0.281_603_550_779_258_913_230,
    0.458_016_777_657_227_386_342,
    0.617_876_244_402_643_748_447,
    0.755_404_408_355_003_033_895,
    0.865_631_202_387_831_743_880,
    0.944_575_023_073_232_576_078,
    0.989_400_934_991_649_932_596,
];

/// Weights paired with [`GL_X`].
const GL_W: [f64; 8] = [
    0.189_450_610_455_068_496_285,
    0.182_603_415_044_923_588_867,
    0.169_156_519_395_002_538_189,
    0.149_595_988_816_576_732_081,
    0.124_628_971_255_533_872_052,
    0.095_158_511_682_492_784_810,
    0.062_253_523_938_647_892_863,
    0.027_152_459_411_754_094_852,
];

/// A converged quadrature value together with its refinement residual.
///
/// The integral equals `value · exp(log_offset)`; [`integrate_log`] keeps the
/// peak magnitude in `log_offset` so that sharply peaked integrands (whose
/// raw value overflows f64) stay representable. Plain [`refine`] always
/// reports `log_offset = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOutcome {
    /// The integral estimate, scaled by exp(−log_offset).
    pub value: f64,
    /// |last estimate − previous estimate| at convergence, same scaling.
    pub residual: f64,
    /// Log of the factor taken out of the integrand.
    pub log_offset: f64,
    /// Dyadic level at convergence (2^level panels).
    pub level: u32,
    /// Integration window in the caller's abscissa (after truncation).
    pub window: (f64, f64),
}

/// Quadrature failures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    /// Dyadic refinement did not reach the tolerance within the panel budget.
    #[error("quadrature did not converge: value={value}, residual={residual}")]
    DidNotConverge {
        /// Last estimate.
        value: f64,
        /// Last refinement difference.
        residual: f64,
    },
    /// The integrand is non-finite inside the integration window.
    #[error("integrand is not finite near x={at}")]
    NonFiniteIntegrand {
        /// Abscissa of the offending evaluation.
        at: f64,
    },
    /// No point with a finite log-integrand was found.
    #[error("could not locate the integrand peak near guess {guess}")]
    NoPeak {
        /// The caller's peak guess.
        guess: f64,
    },
}

fn gl16<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for i in 0..8 {
        let d = half * GL_X[i];
        acc += GL_W[i] * (f(mid - d) + f(mid + d));
    }
    acc * half
}

const MAX_LEVEL: u32 = 18;
const MIN_LEVEL: u32 = 2;

/// Integrates `f` over `[lo, hi]` with 2^k GL-16 panels, doubling k until two
/// successive estimates differ by at most `max(rel_tol·|I|, abs_tol)`.
pub fn refine<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<QuadOutcome, QuadError> {
    if hi <= lo {
        return Ok(QuadOutcome {
            value: 0.0,
            residual: 0.0,
            log_offset: 0.0,
            level: 0,
            window: (lo, hi),
        });
    }
    let mut prev = f64::NAN;
    let mut last_diff = f64::NAN;
    for level in 0..=MAX_LEVEL {
        let n = 1usize << level;
        let step = (hi - lo) / n as f64;
        let mut total = 0.0;
        for k in 0..n {
            let a = lo + k as f64 * step;
            total += gl16(f, a, a + step);
        }
        if !total.is_finite() {
            return Err(QuadError::NonFiniteIntegrand { at: lo });
        }
        if level >= MIN_LEVEL {
            last_diff = (total - prev).abs();
            if last_diff <= rel_tol * total.abs() || last_diff <= abs_tol {
                return Ok(QuadOutcome {
                    value: total,
                    residual: last_diff,
                    log_offset: 0.0,
                    level,
                    window: (lo, hi),
                });
            }
        }
        prev = total;
    }
    Err(QuadError::DidNotConverge {
        value: prev,
        residual: last_diff,
    })
}

/// Scans v ↦ g(eᵛ) on a factor-2 grid around `ln guess`, then golden-section
/// refines, returning (v_peak, g_peak). `v_cap` bounds the search above.
fn peak_in_log_abscissa<G: Fn(f64) -> f64>(
    g: &G,
    guess: f64,
    v_cap: Option<f64>,
) -> Result<(f64, f64), QuadError> {
    let vg = libm::log(guess);
    let clamp = |v: f64| match v_cap {
        Some(c) => v.min(c),
        None => v,
    };
    let eval = |v: f64| {
        let y = g(libm::exp(v));
        if y.is_nan() {
            f64::NEG_INFINITY
        } else {
            y
        }
    };
    let mut best_v = clamp(vg);
    let mut best = eval(best_v);
    for k in -100i32..=100 {
        let v = clamp(vg + k as f64 * LN_2);
        let y = eval(v);
        if y > best {
            best = y;
            best_v = v;
        }
    }
    if best == f64::NEG_INFINITY {
        return Err(QuadError::NoPeak { guess });
    }
    // Golden-section on the bracketing factor-2 cell.
    let inv_phi = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (best_v - LN_2, clamp(best_v + LN_2));
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (eval(c), eval(d));
    for _ in 0..120 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(d);
        }
    }
    let v_peak = 0.5 * (a + b);
    let g_peak = eval(v_peak).max(best);
    Ok((v_peak, g_peak))
}

/// Walks outward from the peak until the log-integrand drops below
/// `g_peak − drop`, then bisects the crossing. Positive `dir` walks up.
fn crossing<G: Fn(f64) -> f64>(
    g: &G,
    v_peak: f64,
    g_peak: f64,
    drop: f64,
    dir: f64,
    v_limit: Option<f64>,
) -> Option<f64> {
    let target = g_peak - drop;
    let eval = |v: f64| {
        let y = g(libm::exp(v));
        if y.is_nan() {
            f64::NEG_INFINITY
        } else {
            y
        }
    };
    let mut d = 1e-6;
    loop {
        let v = v_peak + dir * d;
        if let Some(lim) = v_limit {
            if (dir > 0.0 && v >= lim) || (dir < 0.0 && v <= lim) {
                if eval(lim) > target {
                    return Some(lim);
                }
                // Crossing lies between the last inside point and the limit.
                break;
            }
        }
        if d > 800.0 {
            return None;
        }
        if eval(v) <= target {
            break;
        }
        d *= 2.0;
    }
    let (mut inner, mut outer) = (v_peak + dir * (d / 2.0), v_peak + dir * d);
    if let Some(lim) = v_limit {
        if (dir > 0.0 && outer > lim) || (dir < 0.0 && outer < lim) {
            outer = lim;
        }
    }
    for _ in 0..80 {
        let mid = 0.5 * (inner + outer);
        if eval(mid) > target {
            inner = mid;
        } else {
            outer = mid;
        }
    }
    Some(0.5 * (inner + outer))
}

/// Integrates exp(log_f) over (0, cap∧∞) where the integrand behaves like
/// x^sigma near 0 (sigma > −1) and decays past an interior peak near `guess`.
///
/// The x = wᵐ substitution smooths the left corner; the window is then cut at
/// [`NAT_DROP`] nats below the peak and refined dyadically. The returned
/// window is reported in the caller's x abscissa.
pub fn integrate_log<G: Fn(f64) -> f64>(
    log_f: &G,
    sigma: f64,
    guess: f64,
    cap: Option<f64>,
    rel_tol: f64,
) -> Result<QuadOutcome, QuadError> {
    debug_assert!(sigma > -1.0);
    let m = if sigma >= 3.0 {
        1.0
    } else {
        libm::ceil(4.0 / (1.0 + sigma))
    };
    let ln_m = libm::log(m);
    // log of the substituted integrand m·w^(m-1)·f(w^m)
    let sub_log = |w: f64| {
        if w <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let lw = libm::log(w);
        let x = libm::exp(m * lw);
        if !x.is_normal() {
            return f64::NEG_INFINITY;
        }
        ln_m + (m - 1.0) * lw + log_f(x)
    };
    let w_guess = libm::pow(guess, 1.0 / m);
    let w_cap = cap.map(|c| libm::pow(c, 1.0 / m));
    let v_cap = w_cap.map(libm::log);
    let (v_peak, g_peak) = peak_in_log_abscissa(&sub_log, w_guess, v_cap)?;
    let v_hi = crossing(&sub_log, v_peak, g_peak, NAT_DROP, 1.0, v_cap).ok_or(
        QuadError::DidNotConverge {
            value: f64::NAN,
            residual: f64::NAN,
        },
    )?;
    // Left edge: clamp to 0 once the crossing is negligibly far below the peak
    // scale; the substitution made the corner there smooth.
    let w_lo = match crossing(&sub_log, v_peak, g_peak, NAT_DROP, -1.0, Some(v_peak - 80.0)) {
        Some(v) if v > v_peak - 79.0 => libm::exp(v),
        _ => 0.0,
    };
    let w_hi = libm::exp(v_hi);
    let scaled = |w: f64| {
        let l = sub_log(w);
        if l == f64::NEG_INFINITY {
            0.0
        } else {
            libm::exp(l - g_peak)
        }
    };
    let out = refine(&scaled, w_lo, w_hi, rel_tol, 0.0)?;
    Ok(QuadOutcome {
        value: out.value,
        residual: out.residual,
        log_offset: g_peak,
        level: out.level,
        window: (libm::pow(w_lo, m), libm::pow(w_hi, m)),
    })
}
