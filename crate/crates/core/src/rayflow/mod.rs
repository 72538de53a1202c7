//! Generalized bicharacteristics: interior Hamiltonian flow, specular
//! reflection at hyperbolic points, pass-through at diffractive points and
//! gliding along strictly gliding boundary arcs.
//!
//! Rays are parametrized by physical time, so a ray with `A = Id` moves at
//! unit speed and the time of a region hit is directly comparable with the
//! observation window of the wave solver.

mod events;
mod export;
mod integrator;
mod trace;

pub use events::{detect_boundary_event, ArcStep, BoundaryHit};
pub use export::{write_path, PathRecordError};
pub use trace::{
    gliding_step, integrate_interior, reflect_hyperbolic, trace, trace_until, GlidingOutcome, InitialCondition, Lift,
    RayContext,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{GeometryError, RegionLabel, Vec2};
use crate::symbols::{BoundaryCovector, Classification, PhasePoint, SymbolError};

/// Numerical tolerances of the ray tracer. Lengths and times share the
/// units of the domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct RayTolerances {
    /// Local error target of the embedded Runge–Kutta pair.
    pub ode: f64,
    /// Largest interior step.
    pub dt_max: f64,
    /// Smallest step before the integrator gives up.
    pub dt_min: f64,
    /// Band on `|r0|` (normalized covector) treated as glancing.
    pub glancing: f64,
    /// Closest approach below which a tangential pass counts as a touch.
    pub tangency_band: f64,
    /// Hyperbolic hits with `r0 <= near_glancing_factor * glancing` are flagged.
    pub near_glancing_factor: f64,
    /// No boundary event is sought closer than this to the previous one.
    pub min_dwell: f64,
    /// Step of the gliding integrator.
    pub gliding_dt: f64,
}

impl Default for RayTolerances {
    fn default() -> Self {
        RayTolerances {
            ode: 1e-10,
            dt_max: 0.05,
            dt_min: 1e-12,
            glancing: crate::symbols::GLANCING_TOL,
            tangency_band: 1e-7,
            near_glancing_factor: 10.0,
            min_dwell: 1e-6,
            gliding_dt: 1e-3,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RayError {
    #[error("step size collapsed below {dt_min:e} at t = {t}")]
    StiffFailure { t: f64, dt_min: f64 },
    #[error("|tau| = {tau:.3e} is too small to parametrize by time")]
    TauDegenerate { tau: f64 },
    #[error("sampled distances violate the speed bound near t = {t}; event may be missed")]
    MissedEvent { t: f64 },
    #[error("collar denominator vanishes ({value:.3e}); contact of higher order")]
    DenominatorDegenerate { value: f64 },
    #[error("degenerate glancing contact at t = {t} on curve {curve}, s = {s}")]
    DegenerateContact { t: f64, curve: usize, s: f64 },
    #[error("initial covector is elliptic (r0 = {r0:.3e})")]
    EllipticStart { r0: f64 },
    #[error("initial phase point is not characteristic (p = {p:.3e})")]
    NotCharacteristic { p: f64 },
    #[error("ray left the domain (signed distance {distance:.3e}) at t = {t}")]
    Escaped { t: f64, distance: f64 },
    #[error(transparent)]
    Symbol(#[from] SymbolError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Where the ray currently lives.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Regime {
    Interior,
    Gliding(BoundaryCovector),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RayState {
    pub phase: PhasePoint,
    pub regime: Regime,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EventKind {
    HyperbolicReflection,
    DiffractiveTouch,
    GlidingEntry,
    GlidingExit,
    /// The path met a watched boundary region. `gliding` marks hits made
    /// while the ray moves along the boundary.
    RegionHit {
        label: RegionLabel,
        gliding: bool,
    },
    TimeExpired,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RayEvent {
    pub kind: EventKind,
    pub time: f64,
    pub position: Vec2,
    pub boundary: Option<BoundaryCovector>,
    pub classification: Option<Classification>,
    /// Near-glancing hyperbolic hit, or glancing crossing resolved by
    /// dropping a tiny normal component.
    pub flagged: bool,
}

/// One dense-output sample of a path.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PathSample {
    pub t: f64,
    pub x: Vec2,
    pub tau: f64,
    pub xi: Vec2,
    pub gliding: bool,
}

impl PathSample {
    fn from_phase(p: &PhasePoint, gliding: bool) -> Self {
        PathSample {
            t: p.t,
            x: p.x,
            tau: p.tau,
            xi: p.xi,
            gliding,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Termination {
    TimeExpired,
    Stopped,
    Failed(String),
}

#[derive(Clone, Debug, Serialize)]
pub struct RayPath {
    pub initial: RayState,
    pub samples: Vec<PathSample>,
    pub events: Vec<RayEvent>,
    pub termination: Termination,
    /// Largest `|p_A|` seen after projection.
    pub max_abs_symbol: f64,
    /// Largest per-step projection shift of the covector.
    pub max_projection_shift: f64,
}

impl RayPath {
    pub fn final_time(&self) -> f64 {
        self.samples.last().map(|s| s.t).unwrap_or(0.0)
    }

    pub fn region_hits(&self) -> impl Iterator<Item = &RayEvent> {
        self.events
            .iter()
            .filter(|e| matches!(e.kind, EventKind::RegionHit { .. }))
    }

    pub fn count(&self, kind: EventKind) -> usize {
        self.events.iter().filter(|e| e.kind == kind).count()
    }

    pub fn error(&self) -> Option<&str> {
        match &self.termination {
            Termination::Failed(m) => Some(m),
            _ => None,
        }
    }
}
