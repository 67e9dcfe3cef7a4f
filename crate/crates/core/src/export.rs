//! CSV and JSON writers for trajectories and contours.

use std::io::Write;

use serde::Serialize;

use crate::contour::LevelSetArc;
use crate::dynamics::{IntegratorConfig, ReducedTrajectory};
use crate::error::CoreError;
use crate::reduction::{Alpha, ReducedState};

pub const TRAJECTORY_HEADER: [&str; 10] = ["t", "s", "I", "theta", "x", "y", "C", "E", "mu", "saari_residual"];
pub const CONTOUR_HEADER: [&str; 4] = ["x", "y", "mu0", "arc"];

fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

fn io_err(e: impl std::fmt::Display) -> CoreError {
    CoreError::InvalidInput(format!("export failed: {e}"))
}

pub fn write_trajectory_csv<W: Write>(w: W, traj: &ReducedTrajectory) -> Result<(), CoreError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(TRAJECTORY_HEADER).map_err(io_err)?;
    for s in &traj.samples {
        let row = [s.t, s.s, s.state.i, s.state.theta, s.state.zeta.re, s.state.zeta.im, s.c, s.e, s.mu, s.saari_residual];
        out.write_record(row.map(sci)).map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

pub fn write_contours_csv<W: Write>(w: W, arcs: &[LevelSetArc]) -> Result<(), CoreError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CONTOUR_HEADER).map_err(io_err)?;
    for (k, arc) in arcs.iter().enumerate() {
        for &(x, y) in &arc.points {
            out.write_record([sci(x), sci(y), sci(arc.level), k.to_string()]).map_err(io_err)?;
        }
    }
    out.flush().map_err(io_err)
}

/// Run metadata written next to a trajectory CSV.
#[derive(Clone, Debug, Serialize)]
pub struct TrajectoryMetadata<'a> {
    pub alpha: Alpha,
    pub config: &'a IntegratorConfig,
    pub initial_state: &'a ReducedState,
    pub angular_momentum: f64,
    pub energy: f64,
    pub samples: usize,
    pub truncated: Option<&'a str>,
}

impl<'a> TrajectoryMetadata<'a> {
    pub fn new(traj: &'a ReducedTrajectory, config: &'a IntegratorConfig, init: &'a ReducedState) -> Self {
        TrajectoryMetadata {
            alpha: traj.alpha,
            config,
            initial_state: init,
            angular_momentum: traj.c0,
            energy: traj.e0,
            samples: traj.samples.len(),
            truncated: traj.truncated.as_deref(),
        }
    }
}

pub fn write_metadata_json<W: Write, T: Serialize>(w: W, meta: &T) -> Result<(), CoreError> {
    serde_json::to_writer_pretty(w, meta).map_err(io_err)
}
