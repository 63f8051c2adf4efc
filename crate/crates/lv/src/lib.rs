//! File formats, manifests, and the parallel Monte Carlo driver behind the
//! `lv` command-line tool. All numerics live in `lv-core`; this crate only
//! parses inputs, schedules batches, and serializes outputs.

pub mod csvio;
pub mod driver;
pub mod manifest;
pub mod model_file;
pub mod report;

pub use driver::{extinction_probabilities_parallel, pdmp_exclusion_mc_parallel, worker_threads};
pub use manifest::RunManifest;
pub use model_file::{load_model, load_pdmp, LoadError, ModelFile, PdmpFile};
