//! Closed boundary curves parametrized by arc length.
//!
//! Every curve is traversed in a fixed direction (counterclockwise for the
//! analytic shapes, point order for splines) and carries the side on which the
//! domain lies. Arc length `s` is periodic with period [`BoundaryCurve::length`].

use std::f64::consts::{PI, TAU};

use super::{Aabb, Vec2};

/// Side of the direction of travel on which the domain lies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DomainSide {
    Left,
    Right,
}

impl DomainSide {
    fn sign(self) -> f64 {
        match self {
            DomainSide::Left => 1.0,
            DomainSide::Right => -1.0,
        }
    }
}

const COARSE_SAMPLES: usize = 512;

/// Left normal: tangent rotated by +90 degrees.
fn rot90(v: Vec2) -> Vec2 {
    Vec2::new(-v.y, v.x)
}

#[derive(Clone, Debug)]
pub enum CurveShape {
    Circle {
        center: Vec2,
        radius: f64,
    },
    /// Two half discs of radius `radius` joined by straight sides of length
    /// `2 * half_length`. Curvature jumps at the four junctions.
    Stadium {
        center: Vec2,
        half_length: f64,
        radius: f64,
    },
    /// Star-shaped curve `r(theta) = c0 + sum_k (c_k cos k theta + d_k sin k theta)`.
    Polar {
        center: Vec2,
        cos: Vec<f64>,
        sin: Vec<f64>,
    },
    Spline(PeriodicSpline),
}

/// Position, unit tangent, inward unit normal and turning rate at one point.
#[derive(Clone, Copy, Debug)]
pub struct CurveFrame {
    pub point: Vec2,
    pub tangent: Vec2,
    /// Euclidean unit normal pointing into the domain.
    pub inward: Vec2,
    /// `d(inward)/ds . tangent`: positive where the boundary bends away from
    /// the domain (concave side, e.g. the hole of an annulus). `None` where
    /// the curvature is discontinuous.
    pub concavity: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct BoundaryCurve {
    pub name: String,
    pub shape: CurveShape,
    pub side: DomainSide,
    length: f64,
    arc: Option<ArcTable>,
    min_curvature_radius: f64,
    coarse: Vec<Vec2>,
}

impl BoundaryCurve {
    pub fn circle(name: &str, center: Vec2, radius: f64, side: DomainSide) -> Self {
        assert!(radius > 0.0);
        Self::build(name, CurveShape::Circle { center, radius }, side)
    }

    pub fn stadium(name: &str, center: Vec2, half_length: f64, radius: f64, side: DomainSide) -> Self {
        assert!(radius > 0.0 && half_length >= 0.0);
        Self::build(
            name,
            CurveShape::Stadium {
                center,
                half_length,
                radius,
            },
            side,
        )
    }

    pub fn polar(name: &str, center: Vec2, cos: Vec<f64>, sin: Vec<f64>, side: DomainSide) -> Self {
        Self::build(name, CurveShape::Polar { center, cos, sin }, side)
    }

    /// Periodic cubic spline through `points` (closed implicitly).
    pub fn spline(name: &str, points: &[Vec2], side: DomainSide) -> Self {
        Self::build(name, CurveShape::Spline(PeriodicSpline::new(points)), side)
    }

    fn build(name: &str, shape: CurveShape, side: DomainSide) -> Self {
        let (length, arc) = match &shape {
            CurveShape::Circle { radius, .. } => (TAU * radius, None),
            CurveShape::Stadium {
                half_length, radius, ..
            } => (4.0 * half_length + TAU * radius, None),
            CurveShape::Polar { .. } => {
                let breaks = (0..=1024).map(|i| TAU * i as f64 / 1024.0).collect();
                let t = ArcTable::new(&shape, breaks);
                (t.total, Some(t))
            }
            CurveShape::Spline(sp) => {
                // Panels never straddle a knot, where the third derivative jumps.
                let sub = 8;
                let n = sp.knots.len();
                let mut breaks = Vec::with_capacity(n * sub + 1);
                for i in 0..n {
                    let a = sp.knots[i];
                    let b = if i + 1 < n { sp.knots[i + 1] } else { sp.period };
                    for j in 0..sub {
                        breaks.push(a + (b - a) * j as f64 / sub as f64);
                    }
                }
                breaks.push(sp.period);
                let t = ArcTable::new(&shape, breaks);
                (t.total, Some(t))
            }
        };
        let mut c = BoundaryCurve {
            name: name.to_string(),
            shape,
            side,
            length,
            arc,
            min_curvature_radius: f64::INFINITY,
            coarse: Vec::new(),
        };
        let n = 2048;
        let mut kmax = 0.0_f64;
        for i in 0..n {
            let s = c.length * (i as f64 + 0.5) / n as f64;
            if let Some(k) = c.frame(s).concavity {
                kmax = kmax.max(k.abs());
            }
        }
        c.min_curvature_radius = if kmax > 0.0 { 1.0 / kmax } else { f64::INFINITY };
        c.coarse = c.polyline(COARSE_SAMPLES);
        c
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Smallest radius of curvature over the curve (infinite for a line).
    pub fn min_curvature_radius(&self) -> f64 {
        self.min_curvature_radius
    }

    pub fn wrap(&self, s: f64) -> f64 {
        s.rem_euclid(self.length)
    }

    pub fn point(&self, s: f64) -> Vec2 {
        self.frame(s).point
    }

    pub fn frame(&self, s: f64) -> CurveFrame {
        let s = self.wrap(s);
        let sign = self.side.sign();
        match &self.shape {
            CurveShape::Circle { center, radius } => {
                let th = s / radius;
                let radial = Vec2::new(th.cos(), th.sin());
                let tangent = rot90(radial);
                let left = rot90(tangent);
                CurveFrame {
                    point: center + radial * *radius,
                    tangent,
                    inward: left * sign,
                    concavity: Some(-sign / radius),
                }
            }
            CurveShape::Stadium {
                center,
                half_length,
                radius,
            } => {
                let (p, t, k) = stadium_eval(*half_length, *radius, s);
                let left = rot90(t);
                CurveFrame {
                    point: center + p,
                    tangent: t,
                    inward: left * sign,
                    concavity: k.map(|k| -sign * k),
                }
            }
            CurveShape::Polar { .. } | CurveShape::Spline(_) => {
                let arc = self.arc.as_ref().expect("parametric curve has arc table");
                let u = arc.param_at(&self.shape, s);
                let (p, d1, d2) = param_eval(&self.shape, u);
                let speed = d1.norm();
                let t = d1 / speed;
                let k_left = (d1.x * d2.y - d1.y * d2.x) / speed.powi(3);
                CurveFrame {
                    point: p,
                    tangent: t,
                    inward: rot90(t) * sign,
                    concavity: Some(-sign * k_left),
                }
            }
        }
    }

    /// Closed polyline with `n` vertices, uniform in arc length.
    pub fn polyline(&self, n: usize) -> Vec<Vec2> {
        (0..n).map(|i| self.point(self.length * i as f64 / n as f64)).collect()
    }

    pub fn bounding_box(&self) -> Aabb {
        let pts = self.polyline(1024);
        let mut b = Aabb::new(pts[0], pts[0]);
        for p in &pts {
            b.include(*p);
        }
        b
    }

    /// Nearest point on the curve: `(s, distance)`.
    pub fn closest(&self, x: Vec2) -> (f64, f64) {
        match &self.shape {
            CurveShape::Circle { center, radius } => {
                let d = x - center;
                let th = d.y.atan2(d.x).rem_euclid(TAU);
                (th * radius, (d.norm() - radius).abs())
            }
            _ => self.closest_generic(x),
        }
    }

    fn closest_generic(&self, x: Vec2) -> (f64, f64) {
        let n = self.coarse.len();
        let ds = self.length / n as f64;
        let dist: Vec<f64> = self.coarse.iter().map(|p| (p - x).norm()).collect();
        // Refine every sampled local minimum; several may compete.
        let mut best = (0.0, f64::INFINITY);
        for i in 0..n {
            let prev = dist[(i + n - 1) % n];
            let next = dist[(i + 1) % n];
            if dist[i] <= prev && dist[i] <= next {
                let s = self.refine_closest(x, i as f64 * ds, ds);
                let d = (self.point(s) - x).norm();
                if d < best.1 {
                    best = (s, d);
                }
            }
        }
        best
    }

    fn refine_closest(&self, x: Vec2, s0: f64, ds: f64) -> f64 {
        let mut s = s0;
        for _ in 0..50 {
            let f = self.frame(s);
            let r = f.point - x;
            let g = r.dot(&f.tangent);
            let k_left = f.concavity.unwrap_or(0.0) * -self.side.sign();
            let dg = 1.0 + k_left * r.dot(&rot90(f.tangent));
            let step = if dg > 0.1 { -g / dg } else { -g };
            let step = step.clamp(-ds, ds);
            s += step;
            if step.abs() < 1e-15 * self.length.max(1.0) {
                break;
            }
        }
        self.wrap(s)
    }
}

fn stadium_eval(a: f64, r: f64, s: f64) -> (Vec2, Vec2, Option<f64>) {
    let arc = PI * r;
    let seg = [a, arc, 2.0 * a, arc, a];
    let eps = 1e-12 * (a + r);
    let mut start = 0.0;
    for (i, len) in seg.iter().enumerate() {
        if s <= start + len || i == seg.len() - 1 {
            let u = s - start;
            let at_junction = u.abs() < eps || (u - len).abs() < eps;
            let (p, t, k) = match i {
                0 => (Vec2::new(u, -r), Vec2::new(1.0, 0.0), 0.0),
                1 => {
                    let th = -PI / 2.0 + u / r;
                    (
                        Vec2::new(a + r * th.cos(), r * th.sin()),
                        Vec2::new(-th.sin(), th.cos()),
                        1.0 / r,
                    )
                }
                2 => (Vec2::new(a - u, r), Vec2::new(-1.0, 0.0), 0.0),
                3 => {
                    let th = PI / 2.0 + u / r;
                    (
                        Vec2::new(-a + r * th.cos(), r * th.sin()),
                        Vec2::new(-th.sin(), th.cos()),
                        1.0 / r,
                    )
                }
                _ => (Vec2::new(-a + u, -r), Vec2::new(1.0, 0.0), 0.0),
            };
            let k = if at_junction && a > 0.0 { None } else { Some(k) };
            return (p, t, k);
        }
        start += len;
    }
    unreachable!()
}

/// Position and first two derivatives with respect to the native parameter.
fn param_eval(shape: &CurveShape, u: f64) -> (Vec2, Vec2, Vec2) {
    match shape {
        CurveShape::Polar { center, cos, sin } => {
            let (mut r, mut r1, mut r2) = (cos.first().copied().unwrap_or(1.0), 0.0, 0.0);
            for k in 1..cos.len().max(sin.len()) {
                let kf = k as f64;
                let a = cos.get(k).copied().unwrap_or(0.0);
                let b = sin.get(k).copied().unwrap_or(0.0);
                let (sk, ck) = (kf * u).sin_cos();
                r += a * ck + b * sk;
                r1 += kf * (-a * sk + b * ck);
                r2 += -kf * kf * (a * ck + b * sk);
            }
            let (s, c) = u.sin_cos();
            let e = Vec2::new(c, s);
            let de = Vec2::new(-s, c);
            (center + e * r, e * r1 + de * r, e * (r2 - r) + de * (2.0 * r1))
        }
        CurveShape::Spline(sp) => sp.eval(u),
        _ => unreachable!("analytic shapes are arc-length parametrized"),
    }
}

fn param_period(shape: &CurveShape) -> f64 {
    match shape {
        CurveShape::Polar { .. } => TAU,
        CurveShape::Spline(sp) => sp.period,
        _ => unreachable!(),
    }
}

const GL5_X: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GL5_W: [f64; 5] = [
    0.236_926_885_056_189,
    0.478_628_670_499_366,
    0.568_888_888_888_889,
    0.478_628_670_499_366,
    0.236_926_885_056_189,
];

fn gl_length(shape: &CurveShape, a: f64, b: f64) -> f64 {
    let m = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    GL5_X
        .iter()
        .zip(GL5_W.iter())
        .map(|(x, w)| w * param_eval(shape, m + h * x).1.norm())
        .sum::<f64>()
        * h
}

/// Cumulative arc length over parameter panels, with Newton inversion.
#[derive(Clone, Debug)]
struct ArcTable {
    period: f64,
    breaks: Vec<f64>,
    cumulative: Vec<f64>,
    total: f64,
}

impl ArcTable {
    fn new(shape: &CurveShape, breaks: Vec<f64>) -> Self {
        let period = param_period(shape);
        let mut cumulative = Vec::with_capacity(breaks.len());
        cumulative.push(0.0);
        let mut acc = 0.0;
        for w in breaks.windows(2) {
            acc += gl_length(shape, w[0], w[1]);
            cumulative.push(acc);
        }
        ArcTable {
            period,
            breaks,
            cumulative,
            total: acc,
        }
    }

    fn param_at(&self, shape: &CurveShape, s: f64) -> f64 {
        let panels = self.cumulative.len() - 1;
        let i = match self.cumulative.binary_search_by(|c| c.partial_cmp(&s).unwrap()) {
            Ok(i) => return self.breaks[i].min(self.period),
            Err(i) => (i.max(1) - 1).min(panels - 1),
        };
        let (c0, c1) = (self.cumulative[i], self.cumulative[i + 1]);
        let (u0, u1) = (self.breaks[i], self.breaks[i + 1]);
        let mut u = u0 + (u1 - u0) * (s - c0) / (c1 - c0);
        for _ in 0..20 {
            let f = c0 + gl_length(shape, u0, u) - s;
            let speed = param_eval(shape, u).1.norm();
            let step = f / speed;
            u = (u - step).clamp(u0, u1);
            if step.abs() < 1e-15 * self.period {
                break;
            }
        }
        u
    }
}

/// Periodic cubic spline through points with chord-length knots.
#[derive(Clone, Debug)]
pub struct PeriodicSpline {
    points: Vec<Vec2>,
    knots: Vec<f64>,
    second: Vec<Vec2>,
    period: f64,
}

impl PeriodicSpline {
    pub fn new(points: &[Vec2]) -> Self {
        let n = points.len();
        assert!(n >= 4, "a periodic spline needs at least four points");
        let h: Vec<f64> = (0..n).map(|i| (points[(i + 1) % n] - points[i]).norm()).collect();
        assert!(h.iter().all(|&v| v > 0.0), "repeated consecutive points");
        let mut knots = vec![0.0; n];
        for i in 1..n {
            knots[i] = knots[i - 1] + h[i - 1];
        }
        let period = knots[n - 1] + h[n - 1];
        // Cyclic tridiagonal system for second derivatives.
        let lower: Vec<f64> = (0..n).map(|i| h[(i + n - 1) % n]).collect();
        let diag: Vec<f64> = (0..n).map(|i| 2.0 * (h[(i + n - 1) % n] + h[i])).collect();
        let upper: Vec<f64> = h.clone();
        let mut second = vec![Vec2::zeros(); n];
        for c in 0..2 {
            let rhs: Vec<f64> = (0..n)
                .map(|i| {
                    let p = points[i][c];
                    let pn = points[(i + 1) % n][c];
                    let pp = points[(i + n - 1) % n][c];
                    6.0 * ((pn - p) / h[i] - (p - pp) / h[(i + n - 1) % n])
                })
                .collect();
            let m = solve_cyclic_tridiagonal(&lower, &diag, &upper, &rhs);
            for i in 0..n {
                second[i][c] = m[i];
            }
        }
        PeriodicSpline {
            points: points.to_vec(),
            knots,
            second,
            period,
        }
    }

    fn eval(&self, u: f64) -> (Vec2, Vec2, Vec2) {
        let n = self.points.len();
        let u = u.rem_euclid(self.period);
        let i = match self.knots.binary_search_by(|k| k.partial_cmp(&u).unwrap()) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let j = (i + 1) % n;
        let u0 = self.knots[i];
        let h = if j == 0 { self.period - u0 } else { self.knots[j] - u0 };
        let (p0, p1) = (self.points[i], self.points[j]);
        let (m0, m1) = (self.second[i], self.second[j]);
        let a = (u0 + h - u) / h;
        let b = (u - u0) / h;
        let p = p0 * a + p1 * b + (m0 * (a * a * a - a) + m1 * (b * b * b - b)) * (h * h / 6.0);
        let d1 = (p1 - p0) / h + (m1 * (3.0 * b * b - 1.0) - m0 * (3.0 * a * a - 1.0)) * (h / 6.0);
        let d2 = m0 * a + m1 * b;
        (p, d1, d2)
    }
}

/// Sherman-Morrison reduction of a cyclic tridiagonal system.
/// `lower[0]` couples row 0 to row n-1, `upper[n-1]` couples row n-1 to row 0.
fn solve_cyclic_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let gamma = -diag[0];
    let alpha = upper[n - 1];
    let beta = lower[0];
    let mut b = diag.to_vec();
    b[0] -= gamma;
    b[n - 1] -= alpha * beta / gamma;
    let x = thomas(lower, &b, upper, rhs);
    let mut uvec = vec![0.0; n];
    uvec[0] = gamma;
    uvec[n - 1] = alpha;
    let z = thomas(lower, &b, upper, &uvec);
    let fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
    x.iter().zip(z.iter()).map(|(xi, zi)| xi - fact * zi).collect()
}

fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = upper[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - lower[i] * c[i - 1];
        c[i] = upper[i] / m;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}
