//! Finite-difference solver for the Dirichlet problem of the wave equation
//! `u_tt - div(A grad u) = 0` with zero initial data, on grid-conforming
//! geometries: Cartesian rectangles and polar annuli.

mod grid;
mod operator;
mod record;
mod solver;

pub use grid::{BoundaryNode, Grid, GridKind, Resolution};
pub use operator::Operator;
pub use record::{normal_derivative, Snapshot, TraceRecord};
pub use solver::{choose_dt, run, stable_dt, BoundaryDrive, NoDrive, TestingInputs, WaveConfig, WaveState};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WaveError {
    #[error("UNSUPPORTED_DOMAIN: no grid-conforming solver geometry for {0}")]
    UnsupportedDomain(String),
    #[error("CFL_VIOLATION: dt = {dt:e} exceeds the stable limit {limit:e} (safety <= 0.9)")]
    CflViolation { dt: f64, limit: f64 },
    #[error("NAN_DETECTED at step {step}, node {node}")]
    NanDetected { step: usize, node: usize },
    #[error("invalid grid: {0}")]
    BadGrid(String),
}
