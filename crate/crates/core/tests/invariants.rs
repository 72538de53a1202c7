use std::f64::consts::TAU;

use approx::assert_relative_eq;
use proptest::prelude::*;

use sidewise::geometry::{BoundaryChart, Domain, DomainPreset, MetricField, Vec2};
use sidewise::rayflow::{integrate_interior, reflect_hyperbolic, RayState, RayTolerances, Regime};
use sidewise::sources::{bump_on, sobolev_norm, BoundarySource, SobolevSpec, SourceFamily, SourceGrid, SourceMeta};
use sidewise::symbols::{classify, fiber_count, principal_symbol, BoundaryCovector, PhasePoint, GLANCING_TOL};

fn annulus() -> Domain {
    DomainPreset::Annulus { inner: 1.0, outer: 2.0 }.build().unwrap()
}

fn peanut() -> Domain {
    DomainPreset::Peanut { lobe: 0.3 }.build().unwrap()
}

fn metrics() -> impl Strategy<Value = MetricField> {
    prop_oneof![
        Just(MetricField::Identity),
        (0.5..2.0f64, -0.3..0.3f64, 0.5..2.0f64).prop_map(|(a11, a12, a22)| MetricField::Constant { a11, a12, a22 }),
        (0.0..0.5f64, 0.3..1.0f64).prop_map(|(amplitude, width)| MetricField::Bump {
            amplitude,
            center: [0.3, -0.2],
            width,
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn classification_is_invariant_under_positive_scaling(
        s in 0.0..TAU,
        tau in -3.0..3.0f64,
        xi in -3.0..3.0f64,
        lambda in 0.01..100.0f64,
        metric in metrics(),
    ) {
        prop_assume!(tau.hypot(xi) > 1e-3);
        let d = peanut();
        let b = BoundaryCovector::new(0, s, 0.0, tau, xi);
        let scaled = BoundaryCovector::new(0, s, 0.0, lambda * tau, lambda * xi);
        let a = classify(&b, &d, &metric, GLANCING_TOL).unwrap();
        let c = classify(&scaled, &d, &metric, GLANCING_TOL).unwrap();
        prop_assert_eq!(a.class, c.class);
        prop_assert!((a.r0 - c.r0).abs() < 1e-12);
        prop_assert_eq!(
            fiber_count(&b, &d, &metric, GLANCING_TOL).unwrap(),
            fiber_count(&scaled, &d, &metric, GLANCING_TOL).unwrap()
        );
    }

    #[test]
    fn chart_split_inverts_compose(s in 0.0..TAU, a in -5.0..5.0f64, b in -5.0..5.0f64, metric in metrics()) {
        let d = annulus();
        for curve in 0..2 {
            let ch = BoundaryChart::new(&d, &metric, curve, s);
            let (xs, xn) = ch.split(ch.compose(a, b));
            prop_assert!((xs - a).abs() < 1e-12 * (1.0 + a.abs()));
            prop_assert!((xn - b).abs() < 1e-12 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn reflection_keeps_tangential_data_and_the_symbol(
        s in 0.0..TAU,
        angle in 0.05..1.5f64,
        metric in metrics(),
    ) {
        let d = annulus();
        let ch = BoundaryChart::new(&d, &metric, 0, s);
        // Characteristic covector with tangential share cos(angle).
        let tau = 1.0;
        let xi_s = angle.cos() / ch.h0.sqrt();
        let r0 = tau * tau - ch.h0 * xi_s * xi_s;
        let xi_n = r0.sqrt();
        let incoming = PhasePoint::new(0.0, ch.x, tau, ch.compose(xi_s, xi_n));
        let b = BoundaryCovector::new(0, s, 0.0, tau, xi_s);
        let out = reflect_hyperbolic(&b, xi_n, &d, &metric, GLANCING_TOL).unwrap();
        let (os, on) = ch.split(out.xi);
        prop_assert_eq!(out.tau, tau);
        prop_assert!((os - xi_s).abs() < 1e-12);
        prop_assert!((on + xi_n).abs() < 1e-12);
        prop_assert!(principal_symbol(&incoming, &metric).abs() < 1e-10);
        prop_assert!(principal_symbol(&out, &metric).abs() < 1e-10);
    }

    #[test]
    fn identity_flow_is_a_straight_unit_speed_line(
        x in -0.5..0.5f64,
        y in -0.5..0.5f64,
        heading in 0.0..TAU,
        t_end in 0.1..2.0f64,
    ) {
        let metric = MetricField::Identity;
        let xi = Vec2::new(heading.cos(), heading.sin());
        let p = PhasePoint::new(0.0, Vec2::new(x, y), -1.0, xi);
        let state = RayState { phase: p, regime: Regime::Interior };
        let (end, _, _) = integrate_interior(&state, &metric, t_end, &RayTolerances::default()).unwrap();
        // With tau = -1 the ray moves along +xi.
        let expected = Vec2::new(x, y) + xi * t_end;
        prop_assert!((end.phase.x - expected).norm() < 1e-9, "{:?} vs {:?}", end.phase.x, expected);
        prop_assert!((end.phase.t - t_end).abs() < 1e-12);
    }

    #[test]
    fn sobolev_norms_are_absolutely_homogeneous(
        lambda in -10.0..10.0f64,
        exponent in -1.0..1.0f64,
        mode in 1u32..5,
    ) {
        let f = move |t: f64, s: f64| bump_on(t, 0.2, 1.8) * (mode as f64 * s).sin();
        let meta = SourceMeta::new(SourceFamily::Custom, [0.0; 2]);
        let g = BoundarySource::sample(0, TAU, 2.0, SourceGrid { nt: 129, ns: 32 }, meta, f);
        for spec in [SobolevSpec::full(exponent), SobolevSpec::mixed(exponent)] {
            let n = sobolev_norm(&g, &spec).unwrap();
            let m = sobolev_norm(&g.scaled(lambda), &spec).unwrap();
            assert_relative_eq!(m, lambda.abs() * n, max_relative = 1e-10, epsilon = 1e-14);
        }
    }

    #[test]
    fn sobolev_norm_grows_with_the_exponent(e1 in -1.0..1.0f64, de in 0.01..1.0f64) {
        let meta = SourceMeta::new(SourceFamily::Custom, [0.0; 2]);
        let g = BoundarySource::sample(0, TAU, 2.0, SourceGrid { nt: 129, ns: 32 }, meta, |t, s| {
            bump_on(t, 0.2, 1.8) * (1.0 + (3.0 * s).cos())
        });
        let a = sobolev_norm(&g, &SobolevSpec::full(e1)).unwrap();
        let b = sobolev_norm(&g, &SobolevSpec::full(e1 + de)).unwrap();
        prop_assert!(b >= a);
    }
}
