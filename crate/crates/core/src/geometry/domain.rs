use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::{Aabb, BoundaryCurve, DomainSide, GeometryError, Vec2};

/// Named built-in domains.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DomainPreset {
    Disc {
        radius: f64,
    },
    Annulus {
        inner: f64,
        outer: f64,
    },
    /// Smoothed rectangle whose top side dips into the domain, giving one
    /// concave arc around `x = 0`.
    #[serde(rename_all = "kebab-case")]
    ConcavePocket {
        width: f64,
        height: f64,
        pocket_depth: f64,
        pocket_width: f64,
    },
    /// Star-shaped curve `r = 1 + lobe * cos(2 theta)`; concave near its waist
    /// when `lobe > 0.2`.
    Peanut {
        lobe: f64,
    },
    #[serde(rename_all = "kebab-case")]
    Stadium {
        half_length: f64,
        radius: f64,
    },
}

impl DomainPreset {
    pub fn build(&self) -> Result<Domain, GeometryError> {
        let bad = |m: &str| Err(GeometryError::InvalidCurve(m.to_string()));
        match *self {
            DomainPreset::Disc { radius } => {
                if !(radius > 0.0) {
                    return bad("disc radius must be positive");
                }
                Ok(Domain::new(
                    "disc",
                    vec![BoundaryCurve::circle("circle", Vec2::zeros(), radius, DomainSide::Left)],
                ))
            }
            DomainPreset::Annulus { inner, outer } => {
                if !(inner > 0.0 && outer > inner) {
                    return bad("annulus needs 0 < inner < outer");
                }
                Ok(Domain::new(
                    "annulus",
                    vec![
                        BoundaryCurve::circle("inner", Vec2::zeros(), inner, DomainSide::Right),
                        BoundaryCurve::circle("outer", Vec2::zeros(), outer, DomainSide::Left),
                    ],
                ))
            }
            DomainPreset::ConcavePocket {
                width,
                height,
                pocket_depth,
                pocket_width,
            } => {
                if !(width > 0.0 && height > 0.0 && pocket_depth >= 0.0 && pocket_depth < 0.5 * height) {
                    return bad("pocket needs positive sides and depth below half the height");
                }
                let pts = pocket_outline(width, height, pocket_depth, pocket_width);
                Ok(Domain::new(
                    "concave-pocket",
                    vec![BoundaryCurve::spline("boundary", &pts, DomainSide::Left)],
                ))
            }
            DomainPreset::Peanut { lobe } => {
                if !(0.0..0.5).contains(&lobe) {
                    return bad("peanut lobe must lie in [0, 0.5)");
                }
                Ok(Domain::new(
                    "peanut",
                    vec![BoundaryCurve::polar(
                        "boundary",
                        Vec2::zeros(),
                        vec![1.0, 0.0, lobe],
                        vec![],
                        DomainSide::Left,
                    )],
                ))
            }
            DomainPreset::Stadium { half_length, radius } => {
                if !(radius > 0.0 && half_length > 0.0) {
                    return bad("stadium needs positive radius and half length");
                }
                Ok(Domain::new(
                    "stadium",
                    vec![BoundaryCurve::stadium(
                        "boundary",
                        Vec2::zeros(),
                        half_length,
                        radius,
                        DomainSide::Left,
                    )],
                ))
            }
        }
    }
}

/// Dense outline of a superellipse with a Gaussian dent in its top side,
/// resampled uniformly in arc length.
fn pocket_outline(width: f64, height: f64, depth: f64, pocket_width: f64) -> Vec<Vec2> {
    let (a, b) = (0.5 * width, 0.5 * height);
    let p = 8;
    let dense: Vec<Vec2> = (0..8000)
        .map(|i| {
            let th = TAU * i as f64 / 8000.0;
            let (s, c) = th.sin_cos();
            let r = ((c / a).powi(p) + (s / b).powi(p)).powf(-1.0 / p as f64);
            let x = r * c;
            let mut y = r * s;
            if y > 0.0 {
                y -= depth * (-(x / pocket_width).powi(2)).exp() * (y / b).powi(8);
            }
            Vec2::new(x, y)
        })
        .collect();
    resample_closed(&dense, 240)
}

fn resample_closed(pts: &[Vec2], n: usize) -> Vec<Vec2> {
    let m = pts.len();
    let mut cum = vec![0.0; m + 1];
    for i in 0..m {
        cum[i + 1] = cum[i] + (pts[(i + 1) % m] - pts[i]).norm();
    }
    let total = cum[m];
    let mut out = Vec::with_capacity(n);
    let mut j = 0;
    for k in 0..n {
        let target = total * k as f64 / n as f64;
        while cum[j + 1] < target {
            j += 1;
        }
        let f = (target - cum[j]) / (cum[j + 1] - cum[j]);
        out.push(pts[j] + (pts[(j + 1) % m] - pts[j]) * f);
    }
    out
}

/// Nearest boundary point of a query.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryProjection {
    pub curve: usize,
    pub s: f64,
    pub distance: f64,
}

/// Planar domain bounded by one or more closed curves. The domain is the
/// intersection of the declared sides of all curves.
#[derive(Clone, Debug)]
pub struct Domain {
    pub name: String,
    curves: Vec<BoundaryCurve>,
    bbox: Aabb,
}

impl Domain {
    pub fn new(name: &str, curves: Vec<BoundaryCurve>) -> Self {
        assert!(!curves.is_empty());
        let mut bbox = curves[0].bounding_box();
        for c in &curves[1..] {
            bbox = bbox.union(&c.bounding_box());
        }
        Domain {
            name: name.to_string(),
            curves,
            bbox,
        }
    }

    /// Domain enclosed by a closed polyline, fitted with a periodic cubic
    /// spline. Orientation is detected from the signed area.
    pub fn from_polyline(name: &str, points: &[Vec2]) -> Result<Self, GeometryError> {
        if points.len() < 4 {
            return Err(GeometryError::InvalidCurve(format!(
                "polyline needs at least 4 points, got {}",
                points.len()
            )));
        }
        let n = points.len();
        let area: f64 = (0..n)
            .map(|i| {
                let (p, q) = (points[i], points[(i + 1) % n]);
                p.x * q.y - q.x * p.y
            })
            .sum::<f64>()
            * 0.5;
        if area.abs() < 1e-12 {
            return Err(GeometryError::InvalidCurve("polyline encloses no area".into()));
        }
        if (0..n).any(|i| (points[(i + 1) % n] - points[i]).norm() == 0.0) {
            return Err(GeometryError::InvalidCurve("repeated consecutive points".into()));
        }
        let side = if area > 0.0 {
            DomainSide::Left
        } else {
            DomainSide::Right
        };
        Ok(Domain::new(name, vec![BoundaryCurve::spline("boundary", points, side)]))
    }

    /// Parse whitespace-separated "x y" pairs, one per line; `#` starts a comment.
    pub fn parse_polyline(text: &str) -> Result<Vec<Vec2>, GeometryError> {
        let mut pts = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let nums: Result<Vec<f64>, _> = line.split_whitespace().map(str::parse).collect();
            match nums {
                Ok(v) if v.len() == 2 => pts.push(Vec2::new(v[0], v[1])),
                _ => {
                    return Err(GeometryError::InvalidCurve(format!(
                        "line {}: expected two numbers",
                        i + 1
                    )))
                }
            }
        }
        Ok(pts)
    }

    pub fn curves(&self) -> &[BoundaryCurve] {
        &self.curves
    }

    pub fn curve(&self, id: usize) -> &BoundaryCurve {
        &self.curves[id]
    }

    pub fn curve_id(&self, name: &str) -> Result<usize, GeometryError> {
        self.curves
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| GeometryError::UnknownCurve(name.to_string()))
    }

    pub fn bounding_box(&self) -> Aabb {
        self.bbox
    }

    /// Collar validity radius of one curve.
    pub fn collar_radius(&self, curve: usize) -> f64 {
        let c = &self.curves[curve];
        let r = 0.2 * c.min_curvature_radius();
        if r.is_finite() {
            r
        } else {
            0.2 * self.bbox.size().max()
        }
    }

    /// Signed distance to one curve, positive on its domain side.
    pub fn curve_signed_distance(&self, curve: usize, x: Vec2) -> (f64, f64) {
        let c = &self.curves[curve];
        let (s, d) = c.closest(x);
        let f = c.frame(s);
        let sign = if (x - f.point).dot(&f.inward) >= 0.0 { 1.0 } else { -1.0 };
        (s, sign * d)
    }

    /// Positive inside, zero on the boundary, negative outside.
    pub fn signed_distance(&self, x: Vec2) -> f64 {
        (0..self.curves.len())
            .map(|i| self.curve_signed_distance(i, x).1)
            .fold(f64::INFINITY, f64::min)
    }

    /// Signed distance that refuses points far outside the domain, where the
    /// value no longer relates to any collar coordinate.
    pub fn signed_distance_checked(&self, x: Vec2) -> Result<f64, GeometryError> {
        let d = self.signed_distance(x);
        let near = (0..self.curves.len()).any(|i| self.curve_signed_distance(i, x).1.abs() <= self.collar_radius(i));
        if d < 0.0 && !near {
            Err(GeometryError::FarOutside([x.x, x.y]))
        } else {
            Ok(d)
        }
    }

    pub fn contains(&self, x: Vec2) -> bool {
        self.signed_distance(x) > 0.0
    }

    /// Inside test from winding numbers; independent of the distance code.
    pub fn contains_by_winding(&self, x: Vec2) -> bool {
        self.curves.iter().all(|c| {
            let w = winding_number(&c.polyline(2048), x);
            let inside_loop = w != 0;
            // A counterclockwise loop with the domain on its left encloses
            // the domain; with the domain on its right it encloses a hole.
            let ccw = loop_area(&c.polyline(256)) > 0.0;
            let domain_inside_loop = ccw == (c.side == DomainSide::Left);
            inside_loop == domain_inside_loop
        })
    }

    /// Nearest boundary point across all curves.
    pub fn boundary_project(&self, x: Vec2) -> Result<BoundaryProjection, GeometryError> {
        let mut hits: Vec<(usize, f64, f64)> = (0..self.curves.len())
            .map(|i| {
                let (s, d) = self.curves[i].closest(x);
                (i, s, d)
            })
            .collect();
        hits.sort_by(|a, b| a.2.partial_cmp(&b.2).unwrap());
        if hits.len() > 1 && (hits[1].2 - hits[0].2).abs() <= 1e-9 {
            return Err(GeometryError::Ambiguous {
                first: self.curves[hits[0].0].name.clone(),
                second: self.curves[hits[1].0].name.clone(),
                distance: hits[0].2,
            });
        }
        let (curve, s, distance) = hits[0];
        let radius = self.collar_radius(curve);
        if distance > radius * (1.0 + 1e-12) {
            return Err(GeometryError::OutsideCollar { distance, radius });
        }
        Ok(BoundaryProjection { curve, s, distance })
    }
}

fn loop_area(pts: &[Vec2]) -> f64 {
    let n = pts.len();
    (0..n)
        .map(|i| {
            let (p, q) = (pts[i], pts[(i + 1) % n]);
            p.x * q.y - q.x * p.y
        })
        .sum::<f64>()
        * 0.5
}

/// Winding number of a closed polyline around `x` (crossing-number form).
pub(crate) fn winding_number(pts: &[Vec2], x: Vec2) -> i32 {
    let n = pts.len();
    let mut w = 0;
    for i in 0..n {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        let cross = (b.x - a.x) * (x.y - a.y) - (x.x - a.x) * (b.y - a.y);
        if a.y <= x.y {
            if b.y > x.y && cross > 0.0 {
                w += 1;
            }
        } else if b.y <= x.y && cross < 0.0 {
            w -= 1;
        }
    }
    w
}
