//! Principal symbol of the wave operator, its Hamiltonian field, the boundary
//! symbol and the elliptic / hyperbolic / glancing classification of boundary
//! covectors.

use serde::Serialize;
use thiserror::Error;

use crate::geometry::{BoundaryChart, Domain, MetricField, Vec2};

/// Default band on `|r0|` inside which a normalized covector is glancing.
pub const GLANCING_TOL: f64 = 1e-7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymbolError {
    #[error("covector is not hyperbolic (r0 = {r0:.3e})")]
    NotHyperbolic { r0: f64 },
    #[error("covector (tau, xi_s) vanishes")]
    ZeroCovector,
}

/// Interior cotangent point `(t, x; tau, xi)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhasePoint {
    pub t: f64,
    pub x: Vec2,
    pub tau: f64,
    pub xi: Vec2,
}

impl PhasePoint {
    pub fn new(t: f64, x: Vec2, tau: f64, xi: Vec2) -> Self {
        PhasePoint { t, x, tau, xi }
    }

    pub fn covector_norm(&self) -> f64 {
        (self.tau * self.tau + self.xi.norm_squared()).sqrt()
    }

    /// Scaled so that `|(tau, xi)| = 1`.
    pub fn normalized(&self) -> Self {
        let n = self.covector_norm();
        PhasePoint {
            tau: self.tau / n,
            xi: self.xi / n,
            ..*self
        }
    }
}

/// Boundary cotangent point `(t, s; tau, xi_s)` on one curve. `xi_s` is the
/// covector applied to the unit tangent.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundaryCovector {
    pub curve: usize,
    pub s: f64,
    pub t: f64,
    pub tau: f64,
    pub xi_s: f64,
}

impl BoundaryCovector {
    pub fn new(curve: usize, s: f64, t: f64, tau: f64, xi_s: f64) -> Self {
        BoundaryCovector { curve, s, t, tau, xi_s }
    }

    pub fn norm(&self) -> f64 {
        self.tau.hypot(self.xi_s)
    }

    pub fn normalized(&self) -> Result<Self, SymbolError> {
        let n = self.norm();
        if n == 0.0 {
            return Err(SymbolError::ZeroCovector);
        }
        Ok(BoundaryCovector {
            tau: self.tau / n,
            xi_s: self.xi_s / n,
            ..*self
        })
    }

    /// Boundary covector under an interior covector based at `x(s)`, with the
    /// collar component `xi_n` returned alongside.
    pub fn from_phase(domain: &Domain, metric: &MetricField, curve: usize, s: f64, p: &PhasePoint) -> (Self, f64) {
        let ch = BoundaryChart::new(domain, metric, curve, s);
        let (xi_s, xi_n) = ch.split(p.xi);
        (BoundaryCovector::new(curve, ch.s, p.t, p.tau, xi_s), xi_n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GlancingKind {
    Diffractive,
    StrictlyGliding,
    Degenerate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CovectorClass {
    Elliptic,
    Hyperbolic,
    Glancing(GlancingKind),
}

/// Class of a boundary covector together with the margins that decided it,
/// both evaluated at the normalized covector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub class: CovectorClass,
    pub r0: f64,
    /// Collar derivative of the boundary symbol; computed only when glancing.
    pub dn_r: Option<f64>,
}

impl Classification {
    pub fn is_hyperbolic(&self) -> bool {
        self.class == CovectorClass::Hyperbolic
    }

    pub fn is_strictly_gliding(&self) -> bool {
        self.class == CovectorClass::Glancing(GlancingKind::StrictlyGliding)
    }
}

/// `tau^2 - xi^T A(x) xi`.
pub fn principal_symbol(p: &PhasePoint, metric: &MetricField) -> f64 {
    p.tau * p.tau - metric.quad(p.x, p.xi)
}

/// Components of the Hamiltonian vector field of the principal symbol.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HamiltonianField {
    pub dt: f64,
    pub dx: Vec2,
    pub dtau: f64,
    pub dxi: Vec2,
}

/// `(2 tau, -2 A xi, 0, (xi^T d_k A xi)_k)`.
pub fn hamiltonian_field(p: &PhasePoint, metric: &MetricField) -> HamiltonianField {
    let g = metric.grad(p.x);
    HamiltonianField {
        dt: 2.0 * p.tau,
        dx: -(metric.a(p.x) * p.xi) * 2.0,
        dtau: 0.0,
        dxi: Vec2::new(p.xi.dot(&(g[0] * p.xi)), p.xi.dot(&(g[1] * p.xi))),
    }
}

/// `tau^2 - h(s) xi_s^2`, the symbol at the tangential lift.
pub fn boundary_r0(b: &BoundaryCovector, domain: &Domain, metric: &MetricField) -> f64 {
    let ch = BoundaryChart::new(domain, metric, b.curve, b.s);
    b.tau * b.tau - ch.h0 * b.xi_s * b.xi_s
}

/// Collar derivative `d r / d x_n` at the boundary, `-h'(0) xi_s^2`, by
/// Richardson-extrapolated centered differences. `None` where the curvature
/// is unavailable.
pub fn boundary_dn_r(b: &BoundaryCovector, domain: &Domain, metric: &MetricField) -> Option<f64> {
    let ch = BoundaryChart::new(domain, metric, b.curve, b.s);
    let step = crate::geometry::chart_step(domain, &ch);
    ch.tangential_factor_slope(metric, step)
        .map(|slope| -slope * b.xi_s * b.xi_s)
}

/// Phase point over `x(s)` with vanishing collar component.
pub fn tangential_lift(b: &BoundaryCovector, domain: &Domain, metric: &MetricField) -> PhasePoint {
    let ch = BoundaryChart::new(domain, metric, b.curve, b.s);
    PhasePoint::new(b.t, ch.x, b.tau, ch.compose(b.xi_s, 0.0))
}

/// Classification of `b` after normalization. A glancing covector with no
/// curvature data is reported as degenerate.
pub fn classify(
    b: &BoundaryCovector,
    domain: &Domain,
    metric: &MetricField,
    tol: f64,
) -> Result<Classification, SymbolError> {
    let b = b.normalized()?;
    let r0 = boundary_r0(&b, domain, metric);
    if r0 < -tol {
        return Ok(Classification {
            class: CovectorClass::Elliptic,
            r0,
            dn_r: None,
        });
    }
    if r0 > tol {
        return Ok(Classification {
            class: CovectorClass::Hyperbolic,
            r0,
            dn_r: None,
        });
    }
    let dn_r = boundary_dn_r(&b, domain, metric);
    let kind = match dn_r {
        Some(d) if d > tol => GlancingKind::Diffractive,
        Some(d) if d < -tol => GlancingKind::StrictlyGliding,
        _ => GlancingKind::Degenerate,
    };
    Ok(Classification {
        class: CovectorClass::Glancing(kind),
        r0,
        dn_r,
    })
}

/// Number of real roots of `xi_n^2 = r0` under the glancing band.
pub fn fiber_count(b: &BoundaryCovector, domain: &Domain, metric: &MetricField, tol: f64) -> Result<u8, SymbolError> {
    let b = b.normalized()?;
    let r0 = boundary_r0(&b, domain, metric);
    Ok(if r0 > tol {
        2
    } else if r0 >= -tol {
        1
    } else {
        0
    })
}

/// Characteristic interior covector over a hyperbolic boundary point with
/// collar component `sign * sqrt(r0)`. Positive sign points into the domain
/// as a covector; the corresponding ray moves inward when `sign * tau < 0`.
pub fn hyperbolic_lift(
    b: &BoundaryCovector,
    sign: f64,
    domain: &Domain,
    metric: &MetricField,
    tol: f64,
) -> Result<PhasePoint, SymbolError> {
    let scale = b.norm();
    if scale == 0.0 {
        return Err(SymbolError::ZeroCovector);
    }
    let ch = BoundaryChart::new(domain, metric, b.curve, b.s);
    let r0 = b.tau * b.tau - ch.h0 * b.xi_s * b.xi_s;
    if r0 <= tol * scale * scale {
        return Err(SymbolError::NotHyperbolic {
            r0: r0 / (scale * scale),
        });
    }
    let xi_n = sign.signum() * r0.sqrt();
    Ok(PhasePoint::new(b.t, ch.x, b.tau, ch.compose(b.xi_s, xi_n)))
}

/// Sign of the collar component that makes the ray enter the domain.
pub fn inward_sign(tau: f64) -> f64 {
    -tau.signum()
}
