//! JSON model files.
//!
//! Diffusion model schema (field order fixed as species 1, species 2):
//!
//! ```json
//! {"a":[4.0,3.0],"b":[1.5,1.0],"c":[1.0,0.5],
//!  "alpha":[0.25,0.5],"beta":[0.5,0.25],"gamma":[0.0,0.0]}
//! ```
//!
//! Switched-system schema: per-regime Lotka-Volterra coefficients in the same
//! species-major layout plus the two switching rates:
//!
//! ```json
//! {"regimes":[{"a":[4.0,3.0],"b":[1.5,1.0],"c":[1.0,0.5]},
//!             {"a":[2.0,2.5],"b":[1.0,1.2],"c":[0.7,0.9]}],
//!  "switching":[1.0,2.0]}
//! ```

use lv_core::{ModelParams, PdmpSpec, RegimeCoeffs};
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;
use thiserror::Error;

/// On-disk diffusion model.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    /// Growth rates [a₁, a₂].
    pub a: [f64; 2],
    /// Intra-specific competition [b₁, b₂].
    pub b: [f64; 2],
    /// Inter-specific competition [c₁, c₂].
    pub c: [f64; 2],
    /// Quadratic noise intensities.
    #[serde(default)]
    pub alpha: [f64; 2],
    /// Cross-term noise intensities.
    #[serde(default)]
    pub beta: [f64; 2],
    /// Linear noise intensities.
    #[serde(default)]
    pub gamma: [f64; 2],
}

impl ModelFile {
    /// The in-memory parameter record.
    pub fn to_params(&self) -> ModelParams {
        ModelParams {
            a: self.a,
            b: self.b,
            c: self.c,
            alpha: self.alpha,
            beta: self.beta,
            gamma: self.gamma,
        }
    }
}

/// One regime of the on-disk switched model.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PdmpRegimeFile {
    /// Growth rates.
    pub a: [f64; 2],
    /// Intra-specific competition.
    pub b: [f64; 2],
    /// Inter-specific competition.
    pub c: [f64; 2],
}

/// On-disk switched model.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PdmpFile {
    /// The two regimes.
    pub regimes: [PdmpRegimeFile; 2],
    /// Switching rates [alpha (1→2), beta (2→1)].
    pub switching: [f64; 2],
}

impl PdmpFile {
    /// The in-memory spec.
    pub fn to_spec(&self) -> PdmpSpec {
        let conv = |r: &PdmpRegimeFile| RegimeCoeffs {
            a: r.a,
            b: r.b,
            c: r.c,
        };
        PdmpSpec {
            regimes: [conv(&self.regimes[0]), conv(&self.regimes[1])],
            alpha: self.switching[0],
            beta: self.switching[1],
        }
    }
}

/// Model-file loading failures.
#[derive(Debug, Error)]
pub enum LoadError {
    /// The file could not be read.
    #[error("cannot read {path}: {source}")]
    Io {
        /// File path.
        path: String,
        /// Underlying error.
        source: std::io::Error,
    },
    /// The file is not valid JSON for the schema.
    #[error("cannot parse {path}: {source}")]
    Parse {
        /// File path.
        path: String,
        /// Underlying error.
        source: serde_json::Error,
    },
}

fn read(path: &Path) -> Result<String, LoadError> {
    fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Loads a diffusion model file (schema only; semantic validation is the
/// caller's job so the error can carry the offending field).
pub fn load_model(path: &Path) -> Result<ModelParams, LoadError> {
    let text = read(path)?;
    let file: ModelFile = serde_json::from_str(&text).map_err(|source| LoadError::Parse {
        path: path.display().to_string(),
        source,
    })?;
    Ok(file.to_params())
}

/// Loads a switched model file.
pub fn load_pdmp(path: &Path) -> Result<PdmpSpec, LoadError> {
    let text = read(path)?;
    let file: PdmpFile = serde_json::from_str(&text).map_err(|source| LoadError::Parse {
        path: path.display().to_string(),
        source,
    })?;
    Ok(file.to_spec())
}
