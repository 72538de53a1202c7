//! Boundary event detection inside one integration step.
//!
//! Positions inside a step come from re-stepping the Runge–Kutta pair from the
//! step start, so they carry the same accuracy as accepted steps. The signed
//! distance along the ray is Lipschitz with constant `sqrt(lambda_max)`; any
//! sub-interval whose Lipschitz lower bound stays above the tangency band is
//! certified free of events and skipped.

use super::integrator::{dp_step, pack, unpack, State};
use super::{RayError, RayTolerances};
use crate::geometry::{Domain, MetricField, Vec2};
use crate::symbols::{BoundaryCovector, PhasePoint};

/// One integration step, evaluable at any time in (a neighborhood of) its span.
#[derive(Clone, Copy, Debug)]
pub struct ArcStep<'a> {
    pub metric: &'a MetricField,
    pub start: PhasePoint,
    pub h: f64,
}

impl ArcStep<'_> {
    pub fn at(&self, t: f64) -> PhasePoint {
        let dt = t - self.start.t;
        if dt == 0.0 {
            return self.start;
        }
        let y: State = dp_step(self.metric, self.start.tau, &pack(&self.start), dt).0;
        unpack(&y, t, self.start.tau)
    }

    pub fn end_time(&self) -> f64 {
        self.start.t + self.h
    }
}

/// A boundary crossing or a close tangential pass.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryHit {
    pub t: f64,
    pub phase: PhasePoint,
    pub boundary: BoundaryCovector,
    /// Collar component of the covector at the hit.
    pub xi_n: f64,
    pub tangency: bool,
    /// Signed distance of the phase point from the boundary.
    pub distance: f64,
}

/// Nearest curve, its arc-length coordinate and the signed distance.
pub(crate) fn nearest(domain: &Domain, x: Vec2) -> (usize, f64, f64) {
    let mut best = (0, 0.0, f64::INFINITY);
    for i in 0..domain.curves().len() {
        let (s, d) = domain.curve_signed_distance(i, x);
        if d < best.2 {
            best = (i, s, d);
        }
    }
    best
}

const SUBDIVISIONS: usize = 8;

/// First boundary event of `step` at or after `t_from`.
pub fn detect_boundary_event(
    domain: &Domain,
    step: &ArcStep,
    t_from: f64,
    speed_bound: f64,
    tol: &RayTolerances,
) -> Result<Option<BoundaryHit>, RayError> {
    let t1 = step.end_time();
    if t_from >= t1 {
        return Ok(None);
    }
    let sd = |t: f64| domain.signed_distance(step.at(t).x);
    let band = tol.tangency_band;
    let lip = speed_bound * 1.000_001;
    let (d0, d1) = (sd(t_from), sd(t1));
    if 0.5 * (d0 + d1) - 0.5 * lip * (t1 - t_from) > band {
        return Ok(None);
    }
    let width = (t1 - t_from) / SUBDIVISIONS as f64;
    let mut a = t_from;
    let mut da = d0;
    for i in 0..SUBDIVISIONS {
        let b = if i + 1 == SUBDIVISIONS {
            t1
        } else {
            t_from + width * (i + 1) as f64
        };
        let db = if i + 1 == SUBDIVISIONS { d1 } else { sd(b) };
        if (db - da).abs() > lip * (b - a) + 1e-12 {
            return Err(RayError::MissedEvent { t: a });
        }
        if db <= 0.0 || 0.5 * (da + db) - 0.5 * lip * (b - a) <= band {
            let pad = 0.25 * (b - a);
            let lo = (a - pad).max(t_from);
            let hi = b + pad;
            let (tm, dm) = golden_min(&sd, lo, hi);
            let span = hi - lo;
            let interior = tm - lo > 1e-6 * span && hi - tm > 1e-6 * span;
            if dm < -band {
                // The first crossing may precede the minimum.
                let left = if tm > a { a } else { lo };
                let end = if db <= 0.0 && b < tm { b } else { tm };
                let t = root(&sd, left, end, sd(left));
                return Ok(Some(make_hit(domain, step, t, false)));
            }
            if interior && dm <= band && tm >= a && tm <= b + pad {
                return Ok(Some(make_hit(domain, step, tm, true)));
            }
            if db <= 0.0 {
                let t = root(&sd, a, b, da);
                return Ok(Some(make_hit(domain, step, t, false)));
            }
        }
        a = b;
        da = db;
    }
    Ok(None)
}

fn make_hit(domain: &Domain, step: &ArcStep, t: f64, tangency: bool) -> BoundaryHit {
    let phase = step.at(t);
    let (curve, s, distance) = nearest(domain, phase.x);
    let chart = crate::geometry::BoundaryChart::new(domain, step.metric, curve, s);
    let (xi_s, xi_n) = chart.split(phase.xi);
    BoundaryHit {
        t,
        phase,
        boundary: BoundaryCovector::new(curve, chart.s, t, phase.tau, xi_s),
        xi_n,
        tangency,
        distance,
    }
}

/// Golden-section minimization of `f` on `[a, b]`.
pub(crate) fn golden_min(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let tol = 1e-10 * (b - a) + 1e-15;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let (fa, fb) = (f(a), f(b));
    let mut best = if fc < fd { (c, fc) } else { (d, fd) };
    if fa < best.1 {
        best = (a, fa);
    }
    if fb < best.1 {
        best = (b, fb);
    }
    best
}

/// Root of `f` in `[a, b]` with `f(a) > 0 >= f(b)`, polished to `|f| <= 1e-12`
/// or machine resolution in `t`.
fn root(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, fa0: f64) -> f64 {
    let mut fa = fa0;
    let mut fb = f(b);
    if fb.abs() <= 1e-12 || fa <= 0.0 {
        return if fa <= 0.0 { a } else { b };
    }
    let mut side = 0;
    for _ in 0..200 {
        // Illinois variant of regula falsi.
        let mut c = (a * fb - b * fa) / (fb - fa);
        if !(c > a && c < b) {
            c = 0.5 * (a + b);
        }
        let fc = f(c);
        if fc.abs() <= 1e-12 || b - a < 4.0 * f64::EPSILON * b.abs().max(1.0) {
            return c;
        }
        if fc > 0.0 {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        } else {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        }
    }
    0.5 * (a + b)
}
