//! Observability quotients, invisibility sweeps and end-to-end studies.

mod lab;
mod quotient;
mod scenario;
mod study;
mod sweeps;

pub use lab::{content_hash, Lab, Solver};
pub use quotient::{observability_quotient, regularity_fits, spread, QuotientRecord, RegularityFit, SourcePlan};
pub use scenario::{
    AdmissibleFamilySpec, ArcSpec, DomainSpec, GlancingFamilySpec, GridSpec, InvisibleFamilySpec, OutputFormat,
    OutputSpec, RegionsSpec, Scenario, SourceSection, TimesSpec, ToleranceSpec,
};
pub use study::{full_study, Certificate, SgccSummary, StudyReport, Thresholds};
pub use sweeps::{
    admissible_sweep, glancing_sweep, invisibility_sweep, AdmissibleRow, AdmissibleSummary, AdmissibleTable, DecayRow,
    DecayTable, ADMISSIBLE_RATIO_THRESHOLD, DECAY_THRESHOLD, REFINEMENT_TOLERANCE,
};

use thiserror::Error;

use crate::geometry::GeometryError;
use crate::sgcc::SgccError;
use crate::sources::SourceError;
use crate::wavesim::WaveError;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("precondition: {0}")]
    Precondition(String),
    #[error("RESOLUTION gate: grid {have:?} below required {need:?}")]
    ResolutionGate { have: [usize; 2], need: [usize; 2] },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Sgcc(#[from] SgccError),
    #[error(transparent)]
    Wave(#[from] WaveError),
    #[error(transparent)]
    Source(#[from] SourceError),
}

impl ExperimentError {
    /// Configuration problems, as opposed to failed computations.
    pub fn is_config(&self) -> bool {
        matches!(self, ExperimentError::Config(_) | ExperimentError::Geometry(_))
    }
}
