//! Strict concavity of a boundary arc with respect to the metric.
//!
//! The margin at a boundary point is half the collar derivative of the
//! boundary symbol at the unit glancing covector. It is the geodesic
//! curvature of the boundary seen from the domain: for `A = Id` on a circle
//! of radius `R` it equals `+1/R` when the domain lies outside the circle and
//! `-1/R` when it lies inside.

use serde::Serialize;

use super::chart::collar_step;
use super::{BoundaryChart, BoundaryRegion, Domain, GeometryError, MetricField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ConcavityVerdict {
    StrictConcave,
    ConcaveDegenerate,
    NotConcave,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ConcavitySample {
    pub s: f64,
    pub margin: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConcavityReport {
    pub curve: String,
    pub threshold: f64,
    pub samples: Vec<ConcavitySample>,
    pub min_margin: f64,
    pub verdict: ConcavityVerdict,
}

/// Concavity margin at one boundary point, from the collar derivative of the
/// tangential coefficient.
pub(crate) fn concavity_margin(
    domain: &Domain,
    metric: &MetricField,
    curve: usize,
    s: f64,
) -> Result<f64, GeometryError> {
    let ch = BoundaryChart::new(domain, metric, curve, s);
    let slope = ch
        .tangential_factor_slope(metric, collar_step(domain, &ch))
        .ok_or_else(|| GeometryError::NonSmooth {
            curve: domain.curve(curve).name.clone(),
            s: ch.s,
        })?;
    Ok(-slope / (2.0 * ch.h0))
}

/// Arc-length positions spread uniformly over the region, `n` in total.
pub(crate) fn region_samples(region: &BoundaryRegion, n: usize) -> Vec<f64> {
    let l = region.curve_length();
    let ivs: Vec<(f64, f64)> = region.intervals().iter().map(|&(a, len)| (a, len.min(l))).collect();
    let total: f64 = ivs.iter().map(|iv| iv.1).sum();
    (0..n)
        .map(|i| {
            let mut u = total * (i as f64 + 0.5) / n as f64;
            for &(a, len) in &ivs {
                if u <= len {
                    return (a + u).rem_euclid(l);
                }
                u -= len;
            }
            let (a, len) = ivs[ivs.len() - 1];
            (a + len).rem_euclid(l)
        })
        .collect()
}

pub fn check_concavity(
    domain: &Domain,
    metric: &MetricField,
    region: &BoundaryRegion,
    n_samples: usize,
    threshold: f64,
) -> Result<ConcavityReport, GeometryError> {
    if n_samples == 0 {
        return Err(GeometryError::EmptyRegion(region.label.to_string()));
    }
    let samples = region_samples(region, n_samples)
        .into_iter()
        .map(|s| concavity_margin(domain, metric, region.curve, s).map(|margin| ConcavitySample { s, margin }))
        .collect::<Result<Vec<_>, _>>()?;
    let min_margin = samples.iter().map(|c| c.margin).fold(f64::INFINITY, f64::min);
    let verdict = if min_margin >= threshold {
        ConcavityVerdict::StrictConcave
    } else if min_margin >= -threshold {
        ConcavityVerdict::ConcaveDegenerate
    } else {
        ConcavityVerdict::NotConcave
    };
    Ok(ConcavityReport {
        curve: domain.curve(region.curve).name.clone(),
        threshold,
        samples,
        min_margin,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{DomainPreset, RegionLabel};

    #[test]
    fn circle_margin_is_inverse_radius() {
        let d = DomainPreset::Annulus { inner: 1.0, outer: 2.0 }.build().unwrap();
        let id = MetricField::Identity;
        let inner = BoundaryRegion::full(RegionLabel::Source, &d, 0).unwrap();
        let r = check_concavity(&d, &id, &inner, 64, 1e-6).unwrap();
        assert_eq!(r.verdict, ConcavityVerdict::StrictConcave);
        assert!(r.samples.iter().all(|c| (c.margin - 1.0).abs() < 1e-6));
        let outer = BoundaryRegion::full(RegionLabel::Source, &d, 1).unwrap();
        let r = check_concavity(&d, &id, &outer, 64, 1e-6).unwrap();
        assert_eq!(r.verdict, ConcavityVerdict::NotConcave);
        assert!(r.samples.iter().all(|c| (c.margin + 0.5).abs() < 1e-6));
    }

    #[test]
    fn disc_arc_is_not_concave() {
        let d = DomainPreset::Disc { radius: 1.0 }.build().unwrap();
        let arc = BoundaryRegion::from_angles(RegionLabel::Source, &d, 0, 0.0, 1.0).unwrap();
        let r = check_concavity(&d, &MetricField::Identity, &arc, 16, 1e-6).unwrap();
        assert_eq!(r.verdict, ConcavityVerdict::NotConcave);
        assert!((r.min_margin + 1.0).abs() < 1e-6);
    }

    #[test]
    fn flat_segment_is_degenerate_and_junction_is_non_smooth() {
        let d = DomainPreset::Stadium {
            half_length: 1.0,
            radius: 0.5,
        }
        .build()
        .unwrap();
        let flat = BoundaryRegion::new(RegionLabel::Source, &d, 0, &[(0.1, 0.9)]).unwrap();
        let r = check_concavity(&d, &MetricField::Identity, &flat, 16, 1e-6).unwrap();
        assert_eq!(r.verdict, ConcavityVerdict::ConcaveDegenerate);
        assert!(r.min_margin.abs() < 1e-12);
        let across = BoundaryRegion::new(RegionLabel::Source, &d, 0, &[(0.5, 1.5)]).unwrap();
        // The midpoint sample of two samples lands exactly on the junction s = 1.
        assert!(matches!(
            check_concavity(&d, &MetricField::Identity, &across, 1, 1e-6),
            Err(GeometryError::NonSmooth { .. })
        ));
    }

    #[test]
    fn pocket_dent_is_concave() {
        let d = DomainPreset::ConcavePocket {
            width: 3.0,
            height: 2.0,
            pocket_depth: 0.4,
            pocket_width: 0.4,
        }
        .build()
        .unwrap();
        let c = d.curve(0);
        // Locate the top of the dent: the boundary point closest to (0, 0.6).
        let (s0, _) = c.closest(crate::geometry::Vec2::new(0.0, 0.6));
        let arc = BoundaryRegion::new(RegionLabel::Source, &d, 0, &[(s0 - 0.1, s0 + 0.1)]).unwrap();
        let r = check_concavity(&d, &MetricField::Identity, &arc, 16, 1e-6).unwrap();
        assert_eq!(r.verdict, ConcavityVerdict::StrictConcave);
    }
}
