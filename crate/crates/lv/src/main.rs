//! `lv` — classify and simulate two-species stochastic competitive
//! Lotka-Volterra systems.
//!
//! Exit codes: 0 success, 2 invalid input, 3 unclassified critical case,
//! 4 numeric failure, 5 degraded Monte Carlo batch (< 90% of paths completed).

use clap::{Parser, Subcommand};
use lv::manifest::{write_manifest, RunManifest};
use lv::report::{DeterministicJson, McReportJson, StochasticJson};
use lv::{csvio, driver, load_model, load_pdmp};
use lv_core::{
    classify_deterministic, classify_stochastic, params::ClassifyDetError, simulate_boundary,
    simulate_full, simulate_pdmp, BoundarySpec, ClassifyError, MonteCarloReport, PathError,
    PdmpSpec, Regime, SimConfig, SimError, Species, ThresholdError,
};
use serde_json::json;
use std::path::PathBuf;
use std::time::Instant;

const EXIT_OK: i32 = 0;
const EXIT_INPUT: i32 = 2;
const EXIT_CRITICAL: i32 = 3;
const EXIT_NUMERIC: i32 = 4;
const EXIT_DEGRADED: i32 = 5;

#[derive(Parser)]
#[command(name = "lv", version, about = "Stochastic competitive Lotka-Volterra toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify the long-run regime from the model coefficients.
    Classify {
        /// Model JSON file.
        #[arg(long)]
        model: PathBuf,
        /// Relative quadrature tolerance (also the critical-case band).
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Emit JSON instead of text.
        #[arg(long)]
        json: bool,
        /// Also write the report to this file (with a manifest).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate one seeded trajectory and write it as CSV.
    Simulate {
        /// Model JSON file (diffusion, or switched system with --pdmp).
        #[arg(long)]
        model: PathBuf,
        /// Initial state "x,y".
        #[arg(long, default_value = "2,2")]
        z0: String,
        /// Horizon.
        #[arg(long = "T", default_value_t = 100.0)]
        horizon: f64,
        /// Time step.
        #[arg(long = "h", default_value_t = 1e-3)]
        step: f64,
        /// Seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Record every this many steps.
        #[arg(long, default_value_t = 1)]
        stride: u32,
        /// Optional drift taming cap.
        #[arg(long)]
        cap: Option<f64>,
        /// Simulate only this species' boundary diffusion (1 or 2).
        #[arg(long)]
        boundary: Option<u8>,
        /// Treat the model file as a switched (telegraph) system.
        #[arg(long)]
        pdmp: bool,
        /// Initial regime for --pdmp.
        #[arg(long, default_value_t = 1)]
        i0: u8,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run an extinction Monte Carlo batch and write a JSON report.
    Montecarlo {
        /// Model JSON file (diffusion, or switched system with --pdmp).
        #[arg(long)]
        model: PathBuf,
        /// Initial state "x,y".
        #[arg(long, default_value = "2,2")]
        z0: String,
        /// Number of paths.
        #[arg(long, default_value_t = 500)]
        n: u64,
        /// Horizon.
        #[arg(long = "T", default_value_t = 200.0)]
        horizon: f64,
        /// Time step.
        #[arg(long = "h", default_value_t = 1e-3)]
        step: f64,
        /// Extinction floor.
        #[arg(long, default_value_t = 1e-8)]
        floor: f64,
        /// Base seed (path i uses seed + i).
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Record every this many steps.
        #[arg(long, default_value_t = 1)]
        stride: u32,
        /// Treat the model file as a switched system.
        #[arg(long)]
        pdmp: bool,
        /// Initial regime for --pdmp.
        #[arg(long, default_value_t = 1)]
        i0: u8,
        /// Output JSON path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate the switched-system boundary thresholds by ergodic averaging.
    PdmpLambdas {
        /// Switched-system JSON file.
        #[arg(long)]
        model: PathBuf,
        /// Horizon of the ergodic run.
        #[arg(long = "T", default_value_t = 1e4)]
        horizon: f64,
        /// Time step.
        #[arg(long = "h", default_value_t = 1e-3)]
        step: f64,
        /// Seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Emit JSON instead of text.
        #[arg(long)]
        json: bool,
        /// Also write the report to this file (with a manifest).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() {
    std::process::exit(run(Cli::parse()));
}

fn run(cli: Cli) -> i32 {
    match cli.cmd {
        Cmd::Classify {
            model,
            tol,
            json,
            out,
        } => cmd_classify(&model, tol, json, out.as_deref()),
        Cmd::Simulate {
            model,
            z0,
            horizon,
            step,
            seed,
            stride,
            cap,
            boundary,
            pdmp,
            i0,
            out,
        } => cmd_simulate(
            &model, &z0, horizon, step, seed, stride, cap, boundary, pdmp, i0, &out,
        ),
        Cmd::Montecarlo {
            model,
            z0,
            n,
            horizon,
            step,
            floor,
            seed,
            stride,
            pdmp,
            i0,
            out,
        } => cmd_montecarlo(&model, &z0, n, horizon, step, floor, seed, stride, pdmp, i0, &out),
        Cmd::PdmpLambdas {
            model,
            horizon,
            step,
            seed,
            json,
            out,
        } => cmd_pdmp_lambdas(&model, horizon, step, seed, json, out.as_deref()),
    }
}

fn parse_z0(text: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("z0 must be \"x,y\", got {text:?}"));
    }
    let x: f64 = parts[0].trim().parse().map_err(|e| format!("z0 x: {e}"))?;
    let y: f64 = parts[1].trim().parse().map_err(|e| format!("z0 y: {e}"))?;
    Ok([x, y])
}

fn fail(code: i32, msg: impl std::fmt::Display) -> i32 {
    eprintln!("error: {msg}");
    code
}

fn classify_exit(e: &ClassifyError) -> i32 {
    match e {
        ClassifyError::Validate(_) => EXIT_INPUT,
        ClassifyError::Threshold(ThresholdError::Validate(_)) => EXIT_INPUT,
        // Anything else is a numeric failure inside the quadrature.
        ClassifyError::Threshold(_) => EXIT_NUMERIC,
    }
}

fn cmd_classify(
    model: &std::path::Path,
    tol: f64,
    json: bool,
    out: Option<&std::path::Path>,
) -> i32 {
    let started = Instant::now();
    let p = match load_model(model) {
        Ok(p) => p,
        Err(e) => return fail(EXIT_INPUT, e),
    };
    if let Err(e) = p.validate() {
        return fail(EXIT_INPUT, e);
    }
    let det = classify_deterministic(&p);
    let sto = match classify_stochastic(&p, tol) {
        Ok(r) => r,
        Err(e) => return fail(classify_exit(&e), e),
    };
    let det_json = match &det {
        Ok(r) => serde_json::to_value(DeterministicJson::from(r)).unwrap(),
        Err(ClassifyDetError::CriticalCase { lambda1, lambda2 }) => json!({
            "lambda1": lambda1,
            "lambda2": lambda2,
            "case": "Critical",
            "equilibrium": null,
        }),
        Err(ClassifyDetError::Validate(e)) => return fail(EXIT_INPUT, e),
    };
    let report = json!({
        "deterministic": det_json,
        "stochastic": serde_json::to_value(StochasticJson::from(&sto)).unwrap(),
    });
    if json {
        println!("{}", serde_json::to_string_pretty(&report).unwrap());
    } else {
        match &det {
            Ok(r) => {
                print!(
                    "deterministic: lambda1={:.6} lambda2={:.6} case={}",
                    r.lambda1_det, r.lambda2_det, r.case
                );
                if let Some(eq) = r.equilibrium {
                    print!(" equilibrium=({:.6}, {:.6})", eq[0], eq[1]);
                }
                println!();
            }
            Err(ClassifyDetError::CriticalCase { lambda1, lambda2 }) => {
                println!(
                    "deterministic: lambda1={lambda1:.6} lambda2={lambda2:.6} case=Critical"
                );
            }
            Err(_) => unreachable!(),
        }
        let fmt_l = |l: Option<lv_core::Lambda>| match l {
            Some(l) => format!("{:.6} (err<={:.2e})", l.value, l.error_bound),
            None => "n/a".to_owned(),
        };
        print!(
            "stochastic:    lambda1={} lambda2={} regime={} theorem={}",
            fmt_l(sto.lambda1),
            fmt_l(sto.lambda2),
            sto.regime,
            sto.theorem
                .map(|t| t.to_string())
                .unwrap_or_else(|| "n/a".into()),
        );
        if let Some(s) = sto.survival {
            print!(" survival=({:.6}, {:.6})", s[0], s[1]);
        }
        println!();
    }
    if let Some(out) = out {
        let payload = serde_json::to_string_pretty(&report).unwrap();
        if let Err(e) = csvio::write(out, &payload) {
            return fail(EXIT_INPUT, e);
        }
        let manifest = RunManifest::new(
            "classify",
            json!({"model": model, "tol": tol, "out": out}),
            0,
            started.elapsed().as_secs_f64(),
        );
        if let Err(e) = write_manifest(out, &manifest) {
            return fail(EXIT_INPUT, e);
        }
    }
    // The stochastic regime is the headline result; a deterministic critical
    // case is reported in the output (case=Critical) without failing the
    // command, since e.g. the single-exclusion reference model is
    // deterministically critical (λ₂_det = 0) yet classifies fine
    // stochastically.
    if sto.regime == Regime::Unclassified {
        EXIT_CRITICAL
    } else {
        EXIT_OK
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    model: &std::path::Path,
    z0_text: &str,
    horizon: f64,
    step: f64,
    seed: u64,
    stride: u32,
    cap: Option<f64>,
    boundary: Option<u8>,
    pdmp: bool,
    i0: u8,
    out: &std::path::Path,
) -> i32 {
    let started = Instant::now();
    let z0 = match parse_z0(z0_text) {
        Ok(z) => z,
        Err(e) => return fail(EXIT_INPUT, e),
    };
    let cfg = SimConfig {
        h: step,
        horizon,
        seed,
        record_stride: stride,
        taming_cap: cap,
    };
    if let Err(e) = cfg.validate() {
        return fail(EXIT_INPUT, e);
    }
    let args = json!({
        "model": model, "z0": z0, "T": horizon, "h": step, "seed": seed,
        "stride": stride, "cap": cap, "boundary": boundary, "pdmp": pdmp,
        "i0": i0, "out": out,
    });
    let sim_fail = |e: SimError| match e {
        SimError::NonFiniteState { step } => fail(
            EXIT_NUMERIC,
            format!("state became non-finite at step {step}"),
        ),
        other => fail(EXIT_INPUT, other),
    };
    if pdmp {
        let spec = match load_pdmp(model) {
            Ok(s) => s,
            Err(e) => return fail(EXIT_INPUT, e),
        };
        let path = match simulate_pdmp(&spec, i0, z0, &cfg) {
            Ok(p) => p,
            Err(lv_core::pdmp::PdmpError::Sim(e)) => return sim_fail(e),
            Err(e) => return fail(EXIT_INPUT, e),
        };
        if let Err(e) = csvio::write(out, &csvio::switched_csv(&path)) {
            return fail(EXIT_INPUT, e);
        }
        if let Err(e) = csvio::write(&csvio::jumps_path(out), &csvio::jumps_csv(&path)) {
            return fail(EXIT_INPUT, e);
        }
    } else {
        let p = match load_model(model) {
            Ok(p) => p,
            Err(e) => return fail(EXIT_INPUT, e),
        };
        match boundary {
            Some(species) => {
                let s = match species {
                    1 => Species::One,
                    2 => Species::Two,
                    other => {
                        return fail(EXIT_INPUT, format!("boundary must be 1 or 2, got {other}"))
                    }
                };
                let spec = BoundarySpec::for_species(&p, s);
                let x0 = z0[s.index()];
                let path = match simulate_boundary(&spec, x0, &cfg) {
                    Ok(p) => p,
                    Err(e) => return sim_fail(e),
                };
                if let Err(e) = csvio::write(out, &csvio::boundary_csv(&path)) {
                    return fail(EXIT_INPUT, e);
                }
            }
            None => {
                let path = match simulate_full(&p, z0, &cfg) {
                    Ok(p) => p,
                    Err(e) => return sim_fail(e),
                };
                if let Err(e) = csvio::write(out, &csvio::full_csv(&path)) {
                    return fail(EXIT_INPUT, e);
                }
            }
        }
    }
    let manifest = RunManifest::new("simulate", args, seed, started.elapsed().as_secs_f64());
    if let Err(e) = write_manifest(out, &manifest) {
        return fail(EXIT_INPUT, e);
    }
    EXIT_OK
}

#[allow(clippy::too_many_arguments)]
fn cmd_montecarlo(
    model: &std::path::Path,
    z0_text: &str,
    n: u64,
    horizon: f64,
    step: f64,
    floor: f64,
    seed: u64,
    stride: u32,
    pdmp: bool,
    i0: u8,
    out: &std::path::Path,
) -> i32 {
    let started = Instant::now();
    let z0 = match parse_z0(z0_text) {
        Ok(z) => z,
        Err(e) => return fail(EXIT_INPUT, e),
    };
    let cfg = SimConfig {
        h: step,
        horizon,
        seed,
        record_stride: stride,
        taming_cap: None,
    };
    let report: MonteCarloReport = if pdmp {
        let spec = match load_pdmp(model) {
            Ok(s) => s,
            Err(e) => return fail(EXIT_INPUT, e),
        };
        match driver::pdmp_exclusion_mc_parallel(&spec, i0, z0, n, &cfg, floor) {
            Ok(r) => r,
            Err(e) => return fail(EXIT_INPUT, e),
        }
    } else {
        let p = match load_model(model) {
            Ok(p) => p,
            Err(e) => return fail(EXIT_INPUT, e),
        };
        if let Err(e) = p.validate() {
            return fail(EXIT_INPUT, e);
        }
        match driver::extinction_probabilities_parallel(&p, z0, n, &cfg, floor) {
            Ok(r) => r,
            Err(PathError::Density(e)) => return fail(EXIT_NUMERIC, e),
            Err(e) => return fail(EXIT_INPUT, e),
        }
    };
    let payload = serde_json::to_string_pretty(&McReportJson::from(&report)).unwrap();
    if let Err(e) = csvio::write(out, &payload) {
        return fail(EXIT_INPUT, e);
    }
    let args = json!({
        "model": model, "z0": z0, "n": n, "T": horizon, "h": step,
        "floor": floor, "seed": seed, "stride": stride, "pdmp": pdmp, "i0": i0,
        "out": out,
    });
    let manifest = RunManifest::new("montecarlo", args, seed, started.elapsed().as_secs_f64());
    if let Err(e) = write_manifest(out, &manifest) {
        return fail(EXIT_INPUT, e);
    }
    println!("{payload}");
    if report.completed * 10 >= report.n_paths * 9 {
        EXIT_OK
    } else {
        eprintln!(
            "warning: only {}/{} paths completed",
            report.completed, report.n_paths
        );
        EXIT_DEGRADED
    }
}

fn cmd_pdmp_lambdas(
    model: &std::path::Path,
    horizon: f64,
    step: f64,
    seed: u64,
    json_out: bool,
    out: Option<&std::path::Path>,
) -> i32 {
    let started = Instant::now();
    let spec: PdmpSpec = match load_pdmp(model) {
        Ok(s) => s,
        Err(e) => return fail(EXIT_INPUT, e),
    };
    let cfg = SimConfig::new(step, horizon, seed);
    let (l1, l2) = match lv_core::pdmp_boundary_lambdas(&spec, &cfg) {
        Ok(v) => v,
        Err(lv_core::pdmp::PdmpError::Sim(SimError::NonFiniteState { step })) => {
            return fail(
                EXIT_NUMERIC,
                format!("state became non-finite at step {step}"),
            )
        }
        Err(e) => return fail(EXIT_INPUT, e),
    };
    let report = json!({
        "lambda1_bar": l1.value, "stderr1": l1.stderr,
        "lambda2_bar": l2.value, "stderr2": l2.stderr,
        "T": horizon, "h": step, "seed": seed,
    });
    if json_out {
        println!("{}", serde_json::to_string_pretty(&report).unwrap());
    } else {
        println!(
            "lambda1_bar = {:.6} +/- {:.6}\nlambda2_bar = {:.6} +/- {:.6}",
            l1.value, l1.stderr, l2.value, l2.stderr
        );
    }
    if let Some(out) = out {
        if let Err(e) = csvio::write(out, &serde_json::to_string_pretty(&report).unwrap()) {
            return fail(EXIT_INPUT, e);
        }
        let manifest = RunManifest::new(
            "pdmp-lambdas",
            json!({"model": model, "T": horizon, "h": step, "seed": seed, "out": out}),
            seed,
            started.elapsed().as_secs_f64(),
        );
        if let Err(e) = write_manifest(out, &manifest) {
            return fail(EXIT_INPUT, e);
        }
    }
    EXIT_OK
}
