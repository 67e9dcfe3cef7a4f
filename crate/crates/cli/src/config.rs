//! Option file and initial-state file parsing.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::Deserialize;

use saari_core::reduction::{reduced_of_cartesian, CartesianState, ReducedState};

use crate::args::{Fixture, MethodArg};
use crate::error::CliError;

/// Defaults read from `--config`. Every key mirrors a command-line option.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub out_dir: Option<PathBuf>,
    pub alpha: Option<f64>,
    pub fixture: Option<Fixture>,
    pub initial_state: Option<PathBuf>,
    pub side: Option<f64>,
    pub seed: Option<u64>,
    pub t_end: Option<f64>,
    pub s_end: Option<f64>,
    pub output_interval: Option<f64>,
    pub method: Option<MethodArg>,
    pub abs_tol: Option<f64>,
    pub rel_tol: Option<f64>,
    pub max_step: Option<f64>,
    pub check_oracle: Option<bool>,
    pub name: Option<String>,
    pub levels: Option<Vec<f64>>,
    pub force: Option<bool>,
    pub step: Option<f64>,
    pub stage: Option<String>,
    pub threads: Option<usize>,
    pub omit_timings: Option<bool>,
    pub half_width: Option<f64>,
    pub cells: Option<usize>,
    pub theta0: Option<f64>,
}

/// Parses TOML, reporting failures as `path:line: message`.
pub fn parse_toml<T: DeserializeOwned>(text: &str, path: &Path) -> Result<T, CliError> {
    toml::from_str(text).map_err(|e| {
        let line = e.span().map_or(1, |s| text[..s.start.min(text.len())].matches('\n').count() + 1);
        CliError::Usage(format!("{}:{line}: {}", path.display(), e.message()))
    })
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

pub fn load_config(path: Option<&Path>) -> Result<FileConfig, CliError> {
    match path {
        Some(p) => parse_toml(&read(p)?, p),
        None => Ok(FileConfig::default()),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReducedSection {
    i: f64,
    i_dot: f64,
    theta: f64,
    theta_dot: f64,
    zeta: [f64; 2],
    zeta_dot: [f64; 2],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CartesianSection {
    q: [[f64; 2]; 3],
    v: [[f64; 2]; 3],
}

/// An initial-state file holds exactly one of `[reduced]` or `[cartesian]`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    reduced: Option<ReducedSection>,
    cartesian: Option<CartesianSection>,
}

fn c(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

pub fn parse_initial_state(text: &str, path: &Path) -> Result<ReducedState, CliError> {
    let f: StateFile = parse_toml(text, path)?;
    match (f.reduced, f.cartesian) {
        (Some(r), None) => Ok(ReducedState {
            i: r.i,
            i_dot: r.i_dot,
            theta: r.theta,
            theta_dot: r.theta_dot,
            zeta: c(r.zeta),
            zeta_dot: c(r.zeta_dot),
        }),
        (None, Some(k)) => {
            let state = CartesianState::new(k.q.map(c), k.v.map(c), 0.0);
            reduced_of_cartesian(&state).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
        }
        _ => Err(CliError::Usage(format!(
            "{}: expected exactly one of [reduced] or [cartesian]",
            path.display()
        ))),
    }
}

pub fn load_initial_state(path: &Path) -> Result<ReducedState, CliError> {
    parse_initial_state(&read(path)?, path)
}
