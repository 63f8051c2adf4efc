//! CSV serialization of trajectories.
//!
//! Floats are written with Rust's shortest round-trip formatting, so a parsed
//! value is bit-identical to the simulated one.

use lv_core::{Path as SimPath, SwitchedPath};
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

/// `t,x` rows of a boundary path.
pub fn boundary_csv(path: &SimPath<1>) -> String {
    let mut out = String::with_capacity(path.len() * 24 + 8);
    out.push_str("t,x\n");
    for (t, s) in path.times.iter().zip(&path.states) {
        let _ = writeln!(out, "{},{}", t, s[0]);
    }
    out
}

/// `t,x,y` rows of a full path.
pub fn full_csv(path: &SimPath<2>) -> String {
    let mut out = String::with_capacity(path.len() * 36 + 8);
    out.push_str("t,x,y\n");
    for (t, s) in path.times.iter().zip(&path.states) {
        let _ = writeln!(out, "{},{},{}", t, s[0], s[1]);
    }
    out
}

/// `t,x,y,regime` rows of a switched path.
pub fn switched_csv(path: &SwitchedPath) -> String {
    let mut out = String::with_capacity(path.times.len() * 40 + 16);
    out.push_str("t,x,y,regime\n");
    for ((t, s), r) in path.times.iter().zip(&path.states).zip(&path.regimes) {
        let _ = writeln!(out, "{},{},{},{}", t, s[0], s[1], r);
    }
    out
}

/// `t_jump,from,to` rows of the switch events.
pub fn jumps_csv(path: &SwitchedPath) -> String {
    let mut out = String::with_capacity(path.jumps.len() * 24 + 16);
    out.push_str("t_jump,from,to\n");
    for j in &path.jumps {
        let _ = writeln!(out, "{},{},{}", j.t, j.from, j.to);
    }
    out
}

/// Companion file path for the jump events: `run.csv` → `run.jumps.csv`.
pub fn jumps_path(out: &Path) -> std::path::PathBuf {
    let mut p = out.to_path_buf();
    let stem = p
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "path".into());
    p.set_file_name(format!("{stem}.jumps.csv"));
    p
}

/// Writes `contents` to `path`.
pub fn write(path: &Path, contents: &str) -> io::Result<()> {
    fs::write(path, contents)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jumps_path_replaces_extension() {
        assert_eq!(
            jumps_path(Path::new("/tmp/run.csv")),
            Path::new("/tmp/run.jumps.csv")
        );
        assert_eq!(jumps_path(Path::new("run")), Path::new("run.jumps.csv"));
    }

    #[test]
    fn csv_round_trips_floats() {
        let path = SimPath::<1> {
            times: vec![0.0, 0.1 + 1e-17],
            states: vec![[1.0], [0.123456789012345678]],
            log_states: vec![[0.0], [0.0]],
            seed: 0,
            scheme: "test".into(),
        };
        let text = boundary_csv(&path);
        let line = text.lines().nth(2).unwrap();
        let x: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(x.to_bits(), path.states[1][0].to_bits());
    }
}
