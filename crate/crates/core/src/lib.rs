//! Numerical lab for sidewise observability of the wave equation.
//!
//! The pipeline runs from boundary geometry ([`geometry`]) and the
//! classification of boundary covectors ([`symbols`]) to generalized
//! bicharacteristics ([`rayflow`]), the sidewise geometric control check
//! ([`sgcc`]), a finite-difference solver with boundary data ([`wavesim`]),
//! boundary-source families ([`sources`]) and the observability experiments
//! built on them ([`experiments`]). [`harness`] reads scenario files and
//! writes tables and figures.

pub mod experiments;
pub mod geometry;
pub mod harness;
pub mod rayflow;
pub mod sgcc;
pub mod sources;
pub mod symbols;
pub mod wavesim;

use thiserror::Error;

/// Any error the library can produce.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Geometry(#[from] geometry::GeometryError),
    #[error(transparent)]
    Symbol(#[from] symbols::SymbolError),
    #[error(transparent)]
    Ray(#[from] rayflow::RayError),
    #[error(transparent)]
    Sgcc(#[from] sgcc::SgccError),
    #[error(transparent)]
    Wave(#[from] wavesim::WaveError),
    #[error(transparent)]
    Source(#[from] sources::SourceError),
    #[error(transparent)]
    Experiment(#[from] experiments::ExperimentError),
    #[error(transparent)]
    Harness(#[from] harness::HarnessError),
}

impl Error {
    /// True for errors caused by the scenario rather than by a computation.
    pub fn is_config(&self) -> bool {
        match self {
            Error::Experiment(e) => e.is_config(),
            Error::Harness(e) => !matches!(
                e,
                harness::HarnessError::Write { .. } | harness::HarnessError::Serialize(_)
            ),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
