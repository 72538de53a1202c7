//! Arcs of a boundary curve: the source support, its neighborhood and the
//! measurement region.

use serde::{Deserialize, Serialize};

use super::{Domain, GeometryError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegionLabel {
    /// Support of the boundary source.
    Source,
    /// Open neighborhood of the closed source support.
    Neighborhood,
    /// Where the normal derivative is observed.
    Measurement,
}

impl std::fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RegionLabel::Source => "source",
            RegionLabel::Neighborhood => "neighborhood",
            RegionLabel::Measurement => "measurement",
        })
    }
}

/// Union of arc-length intervals `[a, b]` on one closed curve. Intervals may
/// wrap past `s = L`; an interval of length `>= L` is the whole curve.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryRegion {
    pub label: RegionLabel,
    pub curve: usize,
    /// `(start, length)` pairs, start reduced to `[0, L)`, sorted by start.
    intervals: Vec<(f64, f64)>,
    curve_length: f64,
}

impl BoundaryRegion {
    pub fn new(
        label: RegionLabel,
        domain: &Domain,
        curve: usize,
        intervals: &[(f64, f64)],
    ) -> Result<Self, GeometryError> {
        if curve >= domain.curves().len() {
            return Err(GeometryError::UnknownCurve(format!("#{curve}")));
        }
        let l = domain.curve(curve).length();
        let mut iv = Vec::new();
        for &(a, b) in intervals {
            if !(a.is_finite() && b.is_finite()) || b < a {
                return Err(GeometryError::InvalidRegion(format!(
                    "interval [{a}, {b}] must satisfy a <= b"
                )));
            }
            if b > a {
                iv.push((a.rem_euclid(l), (b - a).min(l)));
            }
        }
        if iv.is_empty() {
            return Err(GeometryError::EmptyRegion(label.to_string()));
        }
        iv.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        Ok(BoundaryRegion {
            label,
            curve,
            intervals: iv,
            curve_length: l,
        })
    }

    /// The whole curve.
    pub fn full(label: RegionLabel, domain: &Domain, curve: usize) -> Result<Self, GeometryError> {
        let l = domain.curve(curve).length();
        Self::new(label, domain, curve, &[(0.0, l)])
    }

    /// Arc given by polar angles in radians, for curves parametrized
    /// counterclockwise from the positive x axis (circles and polar curves).
    pub fn from_angles(
        label: RegionLabel,
        domain: &Domain,
        curve: usize,
        start: f64,
        end: f64,
    ) -> Result<Self, GeometryError> {
        let c = domain.curve(curve);
        let to_s = |a: f64| c.length() * a / std::f64::consts::TAU;
        Self::new(label, domain, curve, &[(to_s(start), to_s(end))])
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn curve_length(&self) -> f64 {
        self.curve_length
    }

    pub fn is_full(&self) -> bool {
        self.intervals.iter().any(|iv| iv.1 >= self.curve_length)
    }

    /// Total covered arc length (overlaps counted once).
    pub fn measure(&self) -> f64 {
        if self.is_full() {
            return self.curve_length;
        }
        let n = 4096;
        let hits = (0..n)
            .filter(|i| self.contains((*i as f64 + 0.5) * self.curve_length / n as f64, 0.0))
            .count();
        self.curve_length * hits as f64 / n as f64
    }

    /// Closed-interval membership with tolerance.
    pub fn contains(&self, s: f64, tol: f64) -> bool {
        let l = self.curve_length;
        self.intervals.iter().any(|&(a, len)| {
            if len >= l {
                return true;
            }
            let d = (s - a).rem_euclid(l);
            d <= len + tol || d >= l - tol
        })
    }

    /// Open-interval membership: at least `tol` inside an interval.
    pub fn contains_open(&self, s: f64, tol: f64) -> bool {
        let l = self.curve_length;
        self.intervals.iter().any(|&(a, len)| {
            if len >= l {
                return true;
            }
            let d = (s - a).rem_euclid(l);
            d > tol && d < len - tol
        })
    }

    /// Grows each interval by `frac` of the region's total length, split
    /// evenly between both ends.
    pub fn dilated(&self, label: RegionLabel, frac: f64) -> BoundaryRegion {
        let pad = 0.5 * frac * self.measure();
        let l = self.curve_length;
        let intervals = self
            .intervals
            .iter()
            .map(|&(a, len)| {
                if len >= l {
                    (0.0, l)
                } else {
                    ((a - pad).rem_euclid(l), (len + 2.0 * pad).min(l))
                }
            })
            .collect();
        BoundaryRegion {
            label,
            curve: self.curve,
            intervals,
            curve_length: l,
        }
    }

    /// Whether `closure(self)` lies in the interior of `other`.
    pub fn closure_inside(&self, other: &BoundaryRegion) -> bool {
        if self.curve != other.curve {
            return false;
        }
        if other.is_full() {
            return true;
        }
        if self.is_full() {
            return false;
        }
        self.intervals.iter().all(|&(a, len)| {
            other.intervals.iter().any(|&(b, blen)| {
                let off = (a - b).rem_euclid(self.curve_length);
                off > 0.0 && off + len < blen
            })
        })
    }

    /// Whether the closures of both regions are disjoint.
    pub fn closures_disjoint(&self, other: &BoundaryRegion) -> bool {
        if self.curve != other.curve {
            return true;
        }
        if self.is_full() || other.is_full() {
            return false;
        }
        let l = self.curve_length;
        self.intervals.iter().all(|&(a, alen)| {
            other.intervals.iter().all(|&(b, blen)| {
                // Interval [b, b+blen] relative to a must start after a+alen
                // and end before a+L.
                let off = (b - a).rem_euclid(l);
                off > alen && off + blen < l
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DomainPreset;
    use std::f64::consts::PI;

    #[test]
    fn arc_relations() {
        let d = DomainPreset::Annulus { inner: 1.0, outer: 2.0 }.build().unwrap();
        let o = BoundaryRegion::from_angles(RegionLabel::Source, &d, 0, -0.5, 0.5).unwrap();
        let nb = o.dilated(RegionLabel::Neighborhood, 0.05);
        assert!(o.closure_inside(&nb));
        assert!(!nb.closure_inside(&o));
        assert!(o.contains(2.0 * PI - 0.2, 0.0));
        assert!(!o.contains(PI, 0.0));
        let far = BoundaryRegion::from_angles(RegionLabel::Measurement, &d, 0, 2.0, 4.0).unwrap();
        assert!(nb.closures_disjoint(&far));
        let touching = BoundaryRegion::from_angles(RegionLabel::Measurement, &d, 0, 0.5, 1.0).unwrap();
        assert!(!o.closures_disjoint(&touching));
        let outer = BoundaryRegion::full(RegionLabel::Measurement, &d, 1).unwrap();
        assert!(nb.closures_disjoint(&outer));
        let full = BoundaryRegion::full(RegionLabel::Source, &d, 0).unwrap();
        assert!(full.closure_inside(&full.dilated(RegionLabel::Neighborhood, 0.05)));
        assert!((full.measure() - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn empty_and_reversed_intervals_are_rejected() {
        let d = DomainPreset::Disc { radius: 1.0 }.build().unwrap();
        assert!(matches!(
            BoundaryRegion::new(RegionLabel::Source, &d, 0, &[(1.0, 1.0)]),
            Err(GeometryError::EmptyRegion(_))
        ));
        assert!(BoundaryRegion::new(RegionLabel::Source, &d, 0, &[(2.0, 1.0)]).is_err());
    }
}
