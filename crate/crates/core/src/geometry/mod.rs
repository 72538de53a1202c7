//! Planar domains, the coefficient field, boundary charts and the concavity check.

mod chart;
mod concavity;
mod curve;
mod domain;
mod metric;
mod region;

pub(crate) use chart::collar_step as chart_step;
pub use chart::{BoundaryChart, Collar};
pub(crate) use concavity::region_samples;
pub use concavity::{check_concavity, ConcavityReport, ConcavitySample, ConcavityVerdict};
pub use curve::{BoundaryCurve, CurveFrame, CurveShape, DomainSide, PeriodicSpline};
pub use domain::{BoundaryProjection, Domain, DomainPreset};
pub use metric::{Mat2, MetricField};
pub use region::{BoundaryRegion, RegionLabel};

use thiserror::Error;

pub type Vec2 = nalgebra::Vector2<f64>;

/// Axis-aligned bounding box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aabb {
    pub min: Vec2,
    pub max: Vec2,
}

impl Aabb {
    pub fn new(min: Vec2, max: Vec2) -> Self {
        Aabb { min, max }
    }

    pub fn include(&mut self, p: Vec2) {
        self.min = self.min.inf(&p);
        self.max = self.max.sup(&p);
    }

    pub fn union(&self, other: &Aabb) -> Aabb {
        Aabb::new(self.min.inf(&other.min), self.max.sup(&other.max))
    }

    pub fn size(&self) -> Vec2 {
        self.max - self.min
    }

    /// Box grown by `frac` of its larger side on every edge.
    pub fn padded(&self, frac: f64) -> Aabb {
        let pad = frac * self.size().max();
        let d = Vec2::new(pad, pad);
        Aabb::new(self.min - d, self.max + d)
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("point is equidistant ({distance:.3e}) from curves {first} and {second}")]
    Ambiguous {
        first: String,
        second: String,
        distance: f64,
    },
    #[error("point at distance {distance:.3e} is outside the collar of radius {radius:.3e}")]
    OutsideCollar { distance: f64, radius: f64 },
    #[error("point {0:?} is outside the domain and beyond every collar")]
    FarOutside([f64; 2]),
    #[error("curvature is not available on curve {curve} at s = {s}")]
    NonSmooth { curve: String, s: f64 },
    #[error("boundary region {0} is empty")]
    EmptyRegion(String),
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("unknown curve {0}")]
    UnknownCurve(String),
    #[error("collar of curve {curve} is not injective up to x_n = {depth:.3e}")]
    CollarNotInjective { curve: String, depth: f64 },
}
