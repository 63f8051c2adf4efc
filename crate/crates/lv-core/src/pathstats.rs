//! Asymptotics extracted from simulated paths: Lyapunov exponents, ergodic
//! averages, extinction Monte Carlo, and weak-convergence diagnostics.
//!
//! Extinction here is an operational proxy for the almost-sure t → ∞ events:
//! a path scores extinct for the component that first crosses a finite floor
//! within the horizon. Floor and horizon are always carried in the report so
//! the proxy stays auditable.

use crate::density::{DensityError, StationaryDensity};
use crate::quad;
use crate::sde::{simulate_full, Path, SimConfig, SimError};
use crate::params::ModelParams;
use alloc::vec::Vec;
use thiserror::Error;

/// Errors of path statistics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PathError {
    /// Not enough samples for the requested statistic.
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples {
        /// Required sample count.
        needed: usize,
        /// Available sample count.
        got: usize,
    },
    /// A state in the regression window has underflowed to zero.
    #[error("component {component} underflowed inside the regression window")]
    ComponentExtinct {
        /// Component index.
        component: usize,
    },
    /// Invalid argument.
    #[error("invalid argument: {reason}")]
    InvalidArgument {
        /// What was wrong.
        reason: &'static str,
    },
    /// CDF quadrature failed during the KS sweep.
    #[error(transparent)]
    Density(#[from] DensityError),
    /// The batch configuration or model was invalid.
    #[error(transparent)]
    Sim(#[from] SimError),
    /// Model validation failed.
    #[error(transparent)]
    Model(#[from] crate::params::ValidateError),
}

/// A tail-window least-squares slope of ln(component) against time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovEstimate {
    /// The fitted slope, 1/time.
    pub slope: f64,
    /// Regression standard error of the slope.
    pub stderr: f64,
    /// Fraction of the path (from the tail) the fit used.
    pub window: f64,
}

/// Least-squares slope of ln(component) over the trailing `window` fraction
/// of the path. The regression runs on the exactly-integrated log states, so
/// rescaling the state only shifts the intercept.
pub fn lyapunov_exponent<const N: usize>(
    path: &Path<N>,
    component: usize,
    window: f64,
) -> Result<LyapunovEstimate, PathError> {
    if !(window > 0.0 && window <= 1.0) {
        return Err(PathError::InvalidArgument {
            reason: "window must lie in (0, 1]",
        });
    }
    if component >= N {
        return Err(PathError::InvalidArgument {
            reason: "component out of range",
        });
    }
    let n = path.times.len();
    let t_end = path.times[n - 1];
    let t_start = t_end * (1.0 - window);
    let first = path.times.partition_point(|&t| t < t_start);
    let m = n - first;
    if m < 100 {
        return Err(PathError::TooFewSamples {
            needed: 100,
            got: m,
        });
    }
    for i in first..n {
        if !path.states[i][component].is_normal() {
            return Err(PathError::ComponentExtinct { component });
        }
    }
    let mf = m as f64;
    let (mut st, mut sl) = (0.0, 0.0);
    for i in first..n {
        st += path.times[i];
        sl += path.log_states[i][component];
    }
    let (tbar, lbar) = (st / mf, sl / mf);
    let (mut stt, mut stl) = (0.0, 0.0);
    for i in first..n {
        let dt = path.times[i] - tbar;
        stt += dt * dt;
        stl += dt * (path.log_states[i][component] - lbar);
    }
    let slope = stl / stt;
    let mut ssr = 0.0;
    for i in first..n {
        let fit = lbar + slope * (path.times[i] - tbar);
        let r = path.log_states[i][component] - fit;
        ssr += r * r;
    }
    let stderr = libm::sqrt(ssr / ((mf - 2.0) * stt));
    Ok(LyapunovEstimate {
        slope,
        stderr,
        window,
    })
}

/// Trapezoidal time average of `observable` along the whole path.
pub fn ergodic_average<const N: usize, F: Fn(&[f64; N]) -> f64>(
    path: &Path<N>,
    observable: F,
) -> Result<f64, PathError> {
    let n = path.times.len();
    if n < 2 {
        return Err(PathError::TooFewSamples { needed: 2, got: n });
    }
    let mut acc = 0.0;
    let mut prev = observable(&path.states[0]);
    for i in 1..n {
        let cur = observable(&path.states[i]);
        acc += 0.5 * (prev + cur) * (path.times[i] - path.times[i - 1]);
        prev = cur;
    }
    Ok(acc / (path.times[n - 1] - path.times[0]))
}

/// Wilson score interval for `successes` out of `n` at `z` standard normal
/// quantiles (z = 1.96 for the 95% level).
pub fn wilson_interval(successes: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = successes as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z * libm::sqrt(p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)) / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Two-sided Kolmogorov-Smirnov distance between the samples' empirical CDF
/// and the density's CDF (obtained by quadrature, accumulated along the
/// sorted samples).
pub fn ks_statistic(samples: &[f64], d: &StationaryDensity) -> Result<f64, PathError> {
    let n = samples.len();
    if n < 50 {
        return Err(PathError::TooFewSamples { needed: 50, got: n });
    }
    let mut xs: Vec<f64> = samples.into();
    xs.sort_unstable_by(|a, b| a.partial_cmp(b).expect("samples must not be NaN"));
    let nf = n as f64;
    let mut cdf = d.cdf(xs[0])?;
    let mut stat: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        if i > 0 && x > xs[i - 1] {
            let pdf = |phi: f64| d.pdf(phi);
            cdf += quad::refine(&pdf, xs[i - 1], x, d.tol, 1e-12)
                .map_err(DensityError::from)?
                .value;
        }
        let f = cdf.clamp(0.0, 1.0);
        stat = stat
            .max(((i + 1) as f64 / nf - f).abs())
            .max((f - i as f64 / nf).abs());
    }
    Ok(stat)
}

/// Asymptotic 5% critical value of the two-sided KS statistic
/// (Stephens' small-sample correction).
pub fn ks_critical_5pct(n: usize) -> f64 {
    let s = libm::sqrt(n as f64);
    1.3581 / (s + 0.12 + 0.11 / s)
}

/// What one Monte Carlo path contributed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathVerdict {
    /// X crossed the floor first; slope of ln X over the tail window.
    XExtinct {
        /// Tail slope of the dying component, when the fit was possible.
        slope: Option<f64>,
    },
    /// Y crossed the floor first.
    YExtinct {
        /// Tail slope of the dying component, when the fit was possible.
        slope: Option<f64>,
    },
    /// Neither component crossed the floor within the horizon.
    Neither,
    /// The simulator failed (step index of the failure).
    Failed {
        /// Step at which the state became non-finite.
        step: usize,
    },
}

/// Extinction-probability estimates over a batch of paths.
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloReport {
    /// Requested number of paths.
    pub n_paths: u64,
    /// Paths that completed without simulator failure.
    pub completed: u64,
    /// Paths whose X component crossed the floor first.
    pub x_extinct_count: u64,
    /// Paths whose Y component crossed the floor first.
    pub y_extinct_count: u64,
    /// Completed paths with neither component below the floor.
    pub neither_count: u64,
    /// Failed paths (reported separately, excluded from the frequencies).
    pub failed: u64,
    /// X-extinction frequency among completed paths.
    pub p_hat: f64,
    /// Y-extinction frequency among completed paths.
    pub q_hat: f64,
    /// 1 − p_hat − q_hat, exactly.
    pub neither: f64,
    /// 95% Wilson interval for p_hat.
    pub ci_p: (f64, f64),
    /// 95% Wilson interval for q_hat.
    pub ci_q: (f64, f64),
    /// Mean tail slope of ln X over X-extinct paths.
    pub mean_slope_x: Option<f64>,
    /// Mean tail slope of ln Y over Y-extinct paths.
    pub mean_slope_y: Option<f64>,
    /// Extinction floor used.
    pub floor: f64,
    /// Horizon used.
    pub horizon: f64,
    /// Base seed of the batch (path i ran with seed + i).
    pub seed: u64,
}

const WILSON_Z95: f64 = 1.959_963_984_540_054;
/// Tail fraction used for per-path Lyapunov slopes in Monte Carlo reports.
const MC_SLOPE_WINDOW: f64 = 0.5;

/// Scores one completed path against the floor: the component that first
/// crosses decides the verdict (deeper crossing wins a tie), and the dying
/// component's tail slope is attached.
pub fn classify_outcome(path: &Path<2>, floor: f64) -> PathVerdict {
    let mut hit: Option<usize> = None;
    for (x, y) in path.states.iter().map(|s| (s[0], s[1])) {
        let bx = x <= floor;
        let by = y <= floor;
        if bx || by {
            hit = Some(if bx && by {
                usize::from(y < x)
            } else {
                usize::from(by)
            });
            break;
        }
    }
    match hit {
        Some(0) => PathVerdict::XExtinct {
            slope: lyapunov_exponent(path, 0, MC_SLOPE_WINDOW).ok().map(|e| e.slope),
        },
        Some(_) => PathVerdict::YExtinct {
            slope: lyapunov_exponent(path, 1, MC_SLOPE_WINDOW).ok().map(|e| e.slope),
        },
        None => PathVerdict::Neither,
    }
}

/// Runs path `index` of a batch: seed + index, simulate, classify.
pub fn run_batch_path(
    p: &ModelParams,
    z0: [f64; 2],
    cfg: &SimConfig,
    floor: f64,
    index: u64,
) -> PathVerdict {
    let path_cfg = SimConfig {
        seed: cfg.seed.wrapping_add(index),
        ..*cfg
    };
    match simulate_full(p, z0, &path_cfg) {
        Ok(path) => classify_outcome(&path, floor),
        Err(SimError::NonFiniteState { step }) => PathVerdict::Failed { step },
        Err(_) => PathVerdict::Failed { step: 0 },
    }
}

/// Aggregates slot-ordered verdicts into a report. Deterministic in the
/// verdict order, which the drivers fix by path index.
pub fn summarize_batch(
    verdicts: &[PathVerdict],
    floor: f64,
    horizon: f64,
    seed: u64,
) -> MonteCarloReport {
    let n = verdicts.len() as u64;
    let (mut nx, mut ny, mut nn, mut nf) = (0u64, 0u64, 0u64, 0u64);
    let (mut sx, mut sy) = ((0.0, 0u64), (0.0, 0u64));
    for v in verdicts {
        match v {
            PathVerdict::XExtinct { slope } => {
                nx += 1;
                if let Some(s) = slope {
                    sx = (sx.0 + s, sx.1 + 1);
                }
            }
            PathVerdict::YExtinct { slope } => {
                ny += 1;
                if let Some(s) = slope {
                    sy = (sy.0 + s, sy.1 + 1);
                }
            }
            PathVerdict::Neither => nn += 1,
            PathVerdict::Failed { .. } => nf += 1,
        }
    }
    let completed = n - nf;
    let denom = completed.max(1) as f64;
    let p_hat = nx as f64 / denom;
    let q_hat = ny as f64 / denom;
    MonteCarloReport {
        n_paths: n,
        completed,
        x_extinct_count: nx,
        y_extinct_count: ny,
        neither_count: nn,
        failed: nf,
        p_hat,
        q_hat,
        // Complement form keeps p + q + neither == 1 exact in floating point.
        neither: 1.0 - p_hat - q_hat,
        ci_p: wilson_interval(nx, completed, WILSON_Z95),
        ci_q: wilson_interval(ny, completed, WILSON_Z95),
        mean_slope_x: (sx.1 > 0).then(|| sx.0 / sx.1 as f64),
        mean_slope_y: (sy.1 > 0).then(|| sy.0 / sy.1 as f64),
        floor,
        horizon,
        seed,
    }
}

/// Runs `n_paths` independent full-system paths and scores extinction events
/// against `floor`. Simulator failures are counted, not fatal.
pub fn extinction_probabilities(
    p: &ModelParams,
    z0: [f64; 2],
    n_paths: u64,
    cfg: &SimConfig,
    floor: f64,
) -> Result<MonteCarloReport, PathError> {
    if n_paths < 1 {
        return Err(PathError::InvalidArgument {
            reason: "n_paths must be at least 1",
        });
    }
    if !(floor > 0.0) || floor >= z0[0].min(z0[1]) {
        return Err(PathError::InvalidArgument {
            reason: "floor must be positive and below min(z0)",
        });
    }
    cfg.validate()?;
    p.validate_deterministic()?;
    let verdicts: Vec<PathVerdict> = (0..n_paths)
        .map(|i| run_batch_path(p, z0, cfg, floor, i))
        .collect();
    Ok(summarize_batch(&verdicts, floor, cfg.horizon, cfg.seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{stationary_density, BoundarySpec};
    use crate::sde::simulate_boundary;
    use crate::testutil::example3;
    use alloc::string::String;
    use alloc::vec;
    use approx::assert_relative_eq;

    fn synthetic_path(slope: f64, intercept: f64, n: usize, dt: f64) -> Path<1> {
        let mut path = Path {
            times: Vec::new(),
            states: Vec::new(),
            log_states: Vec::new(),
            seed: 0,
            scheme: String::from("synthetic"),
        };
        for i in 0..n {
            let t = i as f64 * dt;
            let l = intercept + slope * t;
            path.times.push(t);
            path.states.push([libm::exp(l)]);
            path.log_states.push([l]);
        }
        path
    }

    #[test]
    fn exact_linear_input_recovers_slope() {
        let path = synthetic_path(-1.07, 3.0, 500, 0.1);
        let est = lyapunov_exponent(&path, 0, 0.5).unwrap();
        assert_relative_eq!(est.slope, -1.07, epsilon = 1e-12);
        assert!(est.stderr < 1e-12);
    }

    #[test]
    fn state_rescaling_only_shifts_the_intercept() {
        let path = synthetic_path(-0.4, 1.0, 300, 0.05);
        let mut scaled = path.clone();
        for (s, l) in scaled.states.iter_mut().zip(scaled.log_states.iter_mut()) {
            s[0] *= 7.5;
            l[0] += libm::log(7.5);
        }
        let a = lyapunov_exponent(&path, 0, 0.5).unwrap();
        let b = lyapunov_exponent(&scaled, 0, 0.5).unwrap();
        assert_relative_eq!(a.slope, b.slope, epsilon = 1e-12);
    }

    #[test]
    fn too_few_samples_is_an_error() {
        let path = synthetic_path(0.0, 0.0, 50, 0.1);
        assert!(matches!(
            lyapunov_exponent(&path, 0, 0.5),
            Err(PathError::TooFewSamples { .. })
        ));
    }

    #[test]
    fn constant_observable_averages_to_one() {
        let path = synthetic_path(0.1, 0.0, 200, 0.1);
        let avg = ergodic_average(&path, |_| 1.0).unwrap();
        assert_relative_eq!(avg, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn ergodic_average_is_linear_in_the_observable() {
        let path = synthetic_path(-0.2, 0.5, 200, 0.1);
        let f = |s: &[f64; 1]| s[0];
        let g = |s: &[f64; 1]| s[0] * s[0];
        let af = ergodic_average(&path, f).unwrap();
        let ag = ergodic_average(&path, g).unwrap();
        let combo = ergodic_average(&path, |s| 2.0 * f(s) - 3.0 * g(s)).unwrap();
        assert_relative_eq!(combo, 2.0 * af - 3.0 * ag, epsilon = 1e-12);
    }

    #[test]
    fn wilson_reference_value() {
        // 3 successes out of 10 at 95%: textbook (0.1078, 0.6032).
        let (lo, hi) = wilson_interval(3, 10, WILSON_Z95);
        assert_relative_eq!(lo, 0.107_791_267_406, epsilon = 1e-9);
        assert_relative_eq!(hi, 0.603_221_852_539, epsilon = 1e-9);
    }

    #[test]
    fn wilson_behaves_at_the_edges() {
        let (lo, hi) = wilson_interval(0, 20, WILSON_Z95);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.3);
        let (lo, hi) = wilson_interval(20, 20, WILSON_Z95);
        assert!(lo > 0.7 && lo < 1.0);
        assert_eq!(hi, 1.0);
    }

    #[test]
    fn ks_self_consistency_and_power() {
        // Terminal values of a long boundary path, subsampled every 10 time
        // units, against the path's own stationary density; then against a
        // deliberately mismatched density (a doubled).
        let spec = BoundarySpec {
            a: 2.0,
            b: 1.0,
            alpha: 1.0,
            gamma: 0.0,
        };
        let cfg = SimConfig {
            h: 1e-3,
            horizon: 5000.0,
            seed: 5,
            record_stride: 10_000, // one sample per 10 time units
            taming_cap: None,
        };
        let path = simulate_boundary(&spec, 1.0, &cfg).unwrap();
        let samples: Vec<f64> = path.states.iter().skip(10).map(|s| s[0]).collect();
        assert!(samples.len() >= 400);
        let d = stationary_density(&spec, 1e-10).unwrap();
        let stat = ks_statistic(&samples, &d).unwrap();
        assert!(
            stat < ks_critical_5pct(samples.len()),
            "ks = {stat} vs crit {}",
            ks_critical_5pct(samples.len())
        );
        let mismatched = stationary_density(
            &BoundarySpec {
                a: 4.0,
                ..spec
            },
            1e-10,
        )
        .unwrap();
        let stat = ks_statistic(&samples, &mismatched).unwrap();
        assert!(stat > ks_critical_5pct(samples.len()), "ks = {stat}");
    }

    #[test]
    fn bookkeeping_is_exact() {
        let verdicts = vec![
            PathVerdict::XExtinct { slope: Some(-1.0) },
            PathVerdict::YExtinct { slope: Some(-2.0) },
            PathVerdict::Neither,
            PathVerdict::XExtinct { slope: None },
            PathVerdict::Failed { step: 7 },
        ];
        let r = summarize_batch(&verdicts, 1e-8, 10.0, 0);
        assert_eq!(
            (r.n_paths, r.completed, r.failed, r.neither_count),
            (5, 4, 1, 1)
        );
        assert_eq!(r.p_hat + r.q_hat + r.neither, 1.0);
        assert_eq!(r.mean_slope_x, Some(-1.0));
        assert_eq!(r.mean_slope_y, Some(-2.0));
        assert!(r.ci_p.0 <= r.p_hat && r.p_hat <= r.ci_p.1);
        assert!(r.ci_q.0 <= r.q_hat && r.q_hat <= r.ci_q.1);
    }

    #[test]
    fn bistable_example_small_batch() {
        // A quick smoke run of the bistable system; the acceptance suite does
        // the statistically meaningful version.
        let cfg = SimConfig::new(1e-3, 30.0, 11);
        let r = extinction_probabilities(&example3(), [2.0, 2.0], 40, &cfg, 1e-6).unwrap();
        assert_eq!(r.n_paths, 40);
        assert_eq!(r.failed, 0);
        assert_eq!(r.p_hat + r.q_hat + r.neither, 1.0);
        assert!(r.x_extinct_count + r.y_extinct_count > 0);
    }

    #[test]
    fn floor_must_sit_below_z0() {
        let cfg = SimConfig::new(1e-3, 1.0, 0);
        assert!(matches!(
            extinction_probabilities(&example3(), [2.0, 2.0], 10, &cfg, 2.5),
            Err(PathError::InvalidArgument { .. })
        ));
    }
}
