use std::f64::consts::PI;

use sidewise::geometry::{BoundaryRegion, Domain, DomainPreset, MetricField, RegionLabel};
use sidewise::rayflow::RayTolerances;
use sidewise::sgcc::{
    verify_halfray, verify_sgcc, CollarSpec, SampleOrigin, SampleOutcome, SamplingSpec, SgccRegions, SgccStatus,
};

fn annulus() -> Domain {
    DomainPreset::Annulus { inner: 1.0, outer: 2.0 }.build().unwrap()
}

fn small_sampling() -> SamplingSpec {
    SamplingSpec {
        n_s: 8,
        n_angle: 12,
        ..Default::default()
    }
}

#[test]
fn annulus_inner_to_outer_is_verified_with_tangent_chord_time() {
    let d = annulus();
    let id = MetricField::Identity;
    let o = BoundaryRegion::full(RegionLabel::Source, &d, 0).unwrap();
    let nb = BoundaryRegion::full(RegionLabel::Neighborhood, &d, 0).unwrap();
    let meas = BoundaryRegion::full(RegionLabel::Measurement, &d, 1).unwrap();
    let regions = SgccRegions {
        neighborhood: &nb,
        source: &o,
        measurement: &meas,
    };
    let v = verify_sgcc(&d, &id, regions, 4.0, &small_sampling(), &RayTolerances::default()).unwrap();
    assert_eq!(v.status, SgccStatus::VerifiedOnSamples, "{:?}", v.violations.first());
    let t0 = v.t0_observed.unwrap();
    assert!((t0 - 3f64.sqrt()).abs() < 1e-6, "t0 = {t0}");
}

#[test]
fn quarter_measurement_arc_is_violated_with_certificate() {
    let d = annulus();
    let id = MetricField::Identity;
    let o = BoundaryRegion::full(RegionLabel::Source, &d, 0).unwrap();
    let nb = BoundaryRegion::full(RegionLabel::Neighborhood, &d, 0).unwrap();
    let meas = BoundaryRegion::from_angles(RegionLabel::Measurement, &d, 1, 0.0, 0.5 * PI).unwrap();
    let regions = SgccRegions {
        neighborhood: &nb,
        source: &o,
        measurement: &meas,
    };
    let v = verify_sgcc(&d, &id, regions, 4.0, &small_sampling(), &RayTolerances::default()).unwrap();
    assert_eq!(v.status, SgccStatus::Violated);
    let cert = &v.violations[0];
    assert!(cert.outcome.is_violation());
    let path = cert.path.as_ref().expect("certificate path");
    assert!(!path.samples.is_empty());
}

#[test]
fn disc_arc_is_violated() {
    let d = DomainPreset::Disc { radius: 1.0 }.build().unwrap();
    let id = MetricField::Identity;
    let o = BoundaryRegion::from_angles(RegionLabel::Source, &d, 0, -0.3, 0.3).unwrap();
    let nb = o.dilated(RegionLabel::Neighborhood, 0.05);
    let meas = BoundaryRegion::from_angles(RegionLabel::Measurement, &d, 0, 0.5 * PI, 1.5 * PI).unwrap();
    let regions = SgccRegions {
        neighborhood: &nb,
        source: &o,
        measurement: &meas,
    };
    let v = verify_sgcc(&d, &id, regions, 8.0, &small_sampling(), &RayTolerances::default()).unwrap();
    assert_eq!(v.status, SgccStatus::Violated);
    assert!(v
        .violations
        .iter()
        .any(|s| matches!(s.origin, SampleOrigin::Glancing { .. }) && s.touched_source_first));
}

#[test]
fn hit_times_are_rotation_invariant_on_the_annulus() {
    let d = annulus();
    let id = MetricField::Identity;
    let o = BoundaryRegion::full(RegionLabel::Source, &d, 0).unwrap();
    let meas = BoundaryRegion::full(RegionLabel::Measurement, &d, 1).unwrap();
    let regions = SgccRegions {
        neighborhood: &o,
        source: &o,
        measurement: &meas,
    };
    let sampling = SamplingSpec {
        n_s: 6,
        n_angle: 5,
        both_lifts: false,
        ..Default::default()
    };
    let v = verify_sgcc(&d, &id, regions, 4.0, &sampling, &RayTolerances::default()).unwrap();
    assert!(v.is_verified());
    assert_eq!(v.samples, 6 * 7);
    // Chord from radius 1 at incidence angle a to radius 2.
    let chord = |a: f64| -a.cos() + (a.cos().powi(2) + 3.0).sqrt();
    for r in &v.records {
        let SampleOutcome::Qualified { time } = r.outcome else {
            panic!("{:?}", r.outcome)
        };
        let expected = match r.origin {
            SampleOrigin::Hyperbolic { angle, .. } => chord(angle),
            _ => 3f64.sqrt(),
        };
        assert!((time - expected).abs() < 1e-6, "{time} vs {expected}");
    }
}

#[test]
fn enlarging_the_measurement_region_keeps_verification() {
    let d = annulus();
    let id = MetricField::Identity;
    let half = BoundaryRegion::from_angles(RegionLabel::Measurement, &d, 1, 0.0, PI).unwrap();
    let full = BoundaryRegion::full(RegionLabel::Measurement, &d, 1).unwrap();
    let arc = BoundaryRegion::from_angles(RegionLabel::Source, &d, 0, 0.4 * PI, 0.6 * PI).unwrap();
    let nb = arc.dilated(RegionLabel::Neighborhood, 0.05);
    let sampling = small_sampling();
    let tol = RayTolerances::default();
    let run = |meas: &BoundaryRegion| {
        verify_sgcc(
            &d,
            &id,
            SgccRegions {
                neighborhood: &nb,
                source: &arc,
                measurement: meas,
            },
            4.0,
            &sampling,
            &tol,
        )
        .unwrap()
    };
    let a = run(&half);
    let b = run(&full);
    assert!(!a.is_verified() || b.is_verified());
    assert!(b.is_verified());
}

#[test]
fn collar_half_rays_verify_and_short_cap_fails() {
    let d = annulus();
    let id = MetricField::Identity;
    let o = BoundaryRegion::full(RegionLabel::Source, &d, 0).unwrap();
    let meas = BoundaryRegion::full(RegionLabel::Measurement, &d, 1).unwrap();
    let regions = SgccRegions {
        neighborhood: &o,
        source: &o,
        measurement: &meas,
    };
    let spec = CollarSpec {
        width: 0.1,
        n_s: 6,
        n_depth: 2,
        n_dir: 12,
    };
    let tol = RayTolerances::default();
    let v = verify_halfray(&d, &id, regions, &spec, 3.0, &tol).unwrap();
    assert!(v.is_verified(), "{:?}", v.violations.first().map(|s| &s.outcome));
    let t = v.t0_observed.unwrap();
    assert!(t > 1.0 && t < 3f64.sqrt() + 0.2, "t = {t}");
    let short = verify_halfray(&d, &id, regions, &spec, 1.2, &tol).unwrap();
    assert_eq!(short.status, SgccStatus::Violated);
    assert!(short.violations.iter().all(|s| matches!(
        s.outcome,
        SampleOutcome::NoQualifyingHit | SampleOutcome::ReturnedToSource { .. }
    )));
}
