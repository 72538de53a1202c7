//! Sampling verification of the sidewise geometric control condition.
//!
//! Every ray issued from the neighborhood region must reach the measurement
//! region at a hyperbolic or strictly gliding point before the time cap,
//! without touching the closure of the source region at a positive time.
//! Verdicts are statements about the sampled rays only.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    check_concavity, region_samples, BoundaryChart, BoundaryRegion, Collar, ConcavityVerdict, Domain, GeometryError,
    MetricField, RegionLabel, Vec2,
};
use crate::rayflow::{trace_until, EventKind, InitialCondition, Lift, RayContext, RayEvent, RayPath, RayTolerances};
use crate::symbols::{BoundaryCovector, Classification, CovectorClass, GlancingKind, PhasePoint};

/// Boundary hits closer than this to `t = 0` belong to the start point.
const START_WINDOW: f64 = 1e-9;
/// Concavity threshold used for the standing-hypothesis warning.
const CONCAVITY_THRESHOLD: f64 = 1e-6;
/// Violations whose full ray path is kept as a certificate.
const MAX_CERTIFICATES: usize = 16;

#[derive(Debug, Error)]
pub enum SgccError {
    #[error("closures of {0} and {1} regions intersect")]
    Overlap(RegionLabel, RegionLabel),
    #[error("sampling must have n_s >= 1 and n_angle >= 1")]
    EmptySampling,
    #[error("time cap must be positive, got {0}")]
    BadTimeCap(f64),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Seeded random extra samples for stress testing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomRefinement {
    pub seed: u64,
    pub count: usize,
}

/// Interior samples in a collar of the neighborhood region.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct CollarSpec {
    /// Collar depth (length units); capped by the injectivity radius.
    pub width: f64,
    pub n_s: usize,
    pub n_depth: usize,
    /// Covector directions per point, uniform on the circle.
    pub n_dir: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct SamplingSpec {
    pub n_s: usize,
    /// Hyperbolic incidence angles per point.
    pub n_angle: usize,
    /// Angles within this margin (radians) of `±pi/2` are left to the two
    /// glancing samples.
    pub glancing_margin: f64,
    /// Trace both characteristic lifts of hyperbolic samples.
    pub both_lifts: bool,
    pub random: Option<RandomRefinement>,
}

impl Default for SamplingSpec {
    fn default() -> Self {
        SamplingSpec {
            n_s: 48,
            n_angle: 24,
            glancing_margin: 0.01,
            both_lifts: true,
            random: None,
        }
    }
}

impl SamplingSpec {
    pub fn describe(&self) -> String {
        let mut d = format!(
            "{} points x ({} incidence angles + 2 glancing), margin {} rad",
            self.n_s, self.n_angle, self.glancing_margin
        );
        if let Some(r) = &self.random {
            d.push_str(&format!(", {} random (seed {})", r.count, r.seed));
        }
        d
    }
}

/// How a sample starts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SampleOrigin {
    /// Hyperbolic boundary covector at incidence `angle` from the conormal.
    Hyperbolic { curve: usize, s: f64, angle: f64 },
    /// Glancing boundary covector, `direction = sign(xi_s)`.
    Glancing { curve: usize, s: f64, direction: f64 },
    /// Characteristic interior point at collar depth `depth`.
    Interior {
        s: f64,
        depth: f64,
        x: Vec2,
        xi: Vec2,
        tau: f64,
    },
}

impl SampleOrigin {
    /// Initial conditions traced for this sample.
    pub fn initials(&self, domain: &Domain, metric: &MetricField, both_lifts: bool) -> Vec<InitialCondition> {
        match *self {
            SampleOrigin::Hyperbolic { curve, s, angle } => {
                let h0 = BoundaryChart::new(domain, metric, curve, s).h0;
                let covector = BoundaryCovector::new(curve, s, 0.0, 1.0, angle.sin() / h0.sqrt());
                let mut v = vec![InitialCondition::Boundary {
                    covector,
                    lift: Lift::Inward,
                }];
                if both_lifts {
                    v.push(InitialCondition::Boundary {
                        covector,
                        lift: Lift::Outward,
                    });
                }
                v
            }
            SampleOrigin::Glancing { curve, s, direction } => {
                let h0 = BoundaryChart::new(domain, metric, curve, s).h0;
                vec![InitialCondition::Boundary {
                    covector: BoundaryCovector::new(curve, s, 0.0, 1.0, direction / h0.sqrt()),
                    lift: Lift::Inward,
                }]
            }
            SampleOrigin::Interior { x, xi, tau, .. } => {
                // Forward and backward half-rays.
                vec![
                    InitialCondition::Interior(PhasePoint::new(0.0, x, tau, xi)),
                    InitialCondition::Interior(PhasePoint::new(0.0, x, tau, -xi)),
                ]
            }
        }
    }
}

/// Boundary initial data on `region`: `n_s` points, each with `n_angle`
/// hyperbolic covectors and the two glancing ones, plus optional random
/// hyperbolic samples.
pub fn sample_initials(region: &BoundaryRegion, sampling: &SamplingSpec) -> Result<Vec<SampleOrigin>, SgccError> {
    if sampling.n_s == 0 || sampling.n_angle == 0 {
        return Err(SgccError::EmptySampling);
    }
    let curve = region.curve;
    let half = 0.5 * std::f64::consts::PI - sampling.glancing_margin;
    let angles: Vec<f64> = if sampling.n_angle == 1 {
        vec![0.0]
    } else {
        (0..sampling.n_angle)
            .map(|j| -half + 2.0 * half * j as f64 / (sampling.n_angle - 1) as f64)
            .collect()
    };
    let mut out = Vec::new();
    for s in region_samples(region, sampling.n_s) {
        for &angle in &angles {
            out.push(SampleOrigin::Hyperbolic { curve, s, angle });
        }
        for direction in [1.0, -1.0] {
            out.push(SampleOrigin::Glancing { curve, s, direction });
        }
    }
    if let Some(r) = &sampling.random {
        let mut rng = ChaCha8Rng::seed_from_u64(r.seed);
        let pool = region_samples(region, 4096);
        for _ in 0..r.count {
            let s = pool[rng.random_range(0..pool.len())];
            let angle = rng.random_range(-half..half);
            out.push(SampleOrigin::Hyperbolic { curve, s, angle });
        }
    }
    Ok(out)
}

/// Characteristic interior samples in the collar over `region`.
pub fn sample_collar(
    domain: &Domain,
    metric: &MetricField,
    region: &BoundaryRegion,
    spec: &CollarSpec,
) -> Result<Vec<SampleOrigin>, SgccError> {
    if spec.n_s == 0 || spec.n_depth == 0 || spec.n_dir == 0 {
        return Err(SgccError::EmptySampling);
    }
    let collar = Collar::new(domain, metric, region.curve)?;
    let width = spec.width.min(collar.depth());
    let mut out = Vec::new();
    for s in region_samples(region, spec.n_s) {
        for i in 1..=spec.n_depth {
            let depth = width * i as f64 / spec.n_depth as f64;
            let x = collar.map(s, depth);
            for j in 0..spec.n_dir {
                let phi = std::f64::consts::TAU * (j as f64 + 0.5) / spec.n_dir as f64;
                let xi = Vec2::new(phi.cos(), phi.sin());
                let tau = metric.quad(x, xi).sqrt();
                out.push(SampleOrigin::Interior { s, depth, x, xi, tau });
            }
        }
    }
    Ok(out)
}

/// Result of one traced half-ray or lift.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum SampleOutcome {
    /// Reached the measurement region at an accepted point.
    Qualified { time: f64 },
    /// Came back to the source closure first.
    ReturnedToSource { time: f64 },
    /// Never reached an accepted measurement point before the cap.
    NoQualifyingHit,
    /// Only marginal (near-glancing) measurement hits were found.
    Flagged { time: f64 },
    /// The tracer failed.
    Inconclusive { error: String },
}

impl SampleOutcome {
    fn rank(&self) -> u8 {
        match self {
            SampleOutcome::Qualified { .. } => 0,
            SampleOutcome::Flagged { .. } => 1,
            SampleOutcome::Inconclusive { .. } => 2,
            SampleOutcome::ReturnedToSource { .. } | SampleOutcome::NoQualifyingHit => 3,
        }
    }

    pub fn is_violation(&self) -> bool {
        self.rank() == 3
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SgccSample {
    pub index: usize,
    pub origin: SampleOrigin,
    pub outcome: SampleOutcome,
    /// Time of the accepted measurement hit.
    pub hit_time: Option<f64>,
    pub hit_classification: Option<Classification>,
    pub touched_source_first: bool,
    /// Ray path of the deciding trace, kept for violations.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<RayPath>,
}

/// Compact per-sample record kept for every sample.
#[derive(Clone, Debug, Serialize)]
pub struct SampleRecord {
    pub origin: SampleOrigin,
    pub outcome: SampleOutcome,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SgccStatus {
    VerifiedOnSamples,
    Violated,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct SgccVerdict {
    pub status: SgccStatus,
    /// Largest accepted hit time over the samples.
    pub t0_observed: Option<f64>,
    pub violations: Vec<SgccSample>,
    pub flagged: usize,
    pub inconclusive: usize,
    pub samples: usize,
    pub traces: usize,
    pub sampling: String,
    pub time_cap: f64,
    /// Concavity of the neighborhood region, when it could be evaluated.
    pub concavity: Option<ConcavityVerdict>,
    pub warnings: Vec<String>,
    /// Outcome of every sample, in sampling order.
    pub records: Vec<SampleRecord>,
}

impl SgccVerdict {
    pub fn is_verified(&self) -> bool {
        self.status == SgccStatus::VerifiedOnSamples
    }
}

/// Regions entering a verification.
#[derive(Clone, Copy, Debug)]
pub struct SgccRegions<'a> {
    /// Where rays are issued from.
    pub neighborhood: &'a BoundaryRegion,
    /// Source support; rays must not come back to its closure.
    pub source: &'a BoundaryRegion,
    pub measurement: &'a BoundaryRegion,
}

enum Verdict {
    Qualified,
    Returned,
    Flagged,
}

fn judge(ev: &RayEvent, source: &BoundaryRegion, tol: &RayTolerances) -> Option<Verdict> {
    let EventKind::RegionHit { label, gliding } = ev.kind else {
        return None;
    };
    match label {
        RegionLabel::Source => {
            if ev.time > START_WINDOW {
                return Some(Verdict::Returned);
            }
            // A ray gliding from inside the source arc stays on it.
            let b = ev.boundary?;
            (gliding && source.contains_open(b.s, 1e-9)).then_some(Verdict::Returned)
        }
        RegionLabel::Measurement => {
            let c = ev.classification?;
            let accepted = match c.class {
                CovectorClass::Hyperbolic => c.r0 >= tol.glancing,
                CovectorClass::Glancing(GlancingKind::StrictlyGliding) => {
                    gliding || c.dn_r.is_some_and(|d| d <= -tol.glancing)
                }
                _ => false,
            };
            if !accepted {
                None
            } else if ev.flagged {
                Some(Verdict::Flagged)
            } else {
                Some(Verdict::Qualified)
            }
        }
        RegionLabel::Neighborhood => None,
    }
}

struct Traced {
    outcome: SampleOutcome,
    class: Option<Classification>,
    path: RayPath,
}

fn trace_one(
    ctx: &RayContext,
    init: &InitialCondition,
    regions: &SgccRegions,
    watch: &[BoundaryRegion],
    t_cap: f64,
) -> Traced {
    let stop = |ev: &RayEvent| {
        matches!(
            judge(ev, regions.source, &ctx.tol),
            Some(Verdict::Qualified) | Some(Verdict::Returned)
        )
    };
    let path = trace_until(ctx, init, t_cap, watch, stop);
    let mut flagged = None;
    for ev in &path.events {
        match judge(ev, regions.source, &ctx.tol) {
            Some(Verdict::Qualified) => {
                return Traced {
                    outcome: SampleOutcome::Qualified { time: ev.time },
                    class: ev.classification,
                    path,
                };
            }
            Some(Verdict::Returned) => {
                return Traced {
                    outcome: SampleOutcome::ReturnedToSource { time: ev.time },
                    class: ev.classification,
                    path,
                };
            }
            Some(Verdict::Flagged) => {
                flagged.get_or_insert((ev.time, ev.classification));
            }
            None => {}
        }
    }
    let (outcome, class) = match (path.error(), flagged) {
        (Some(e), _) => (SampleOutcome::Inconclusive { error: e.to_string() }, None),
        (None, Some((time, c))) => (SampleOutcome::Flagged { time }, c),
        (None, None) => (SampleOutcome::NoQualifyingHit, None),
    };
    Traced { outcome, class, path }
}

/// Combines the traces of one sample. Boundary samples need every lift to
/// qualify; interior samples need one of the two half-rays.
fn combine(index: usize, origin: SampleOrigin, traced: Vec<Traced>) -> SgccSample {
    let interior = matches!(origin, SampleOrigin::Interior { .. });
    let pick = if interior {
        traced
            .into_iter()
            .min_by(|a, b| {
                a.outcome.rank().cmp(&b.outcome.rank()).then_with(|| {
                    hit_time(&a.outcome)
                        .unwrap_or(f64::INFINITY)
                        .total_cmp(&hit_time(&b.outcome).unwrap_or(f64::INFINITY))
                })
            })
            .expect("at least one trace")
    } else {
        traced
            .into_iter()
            .max_by(|a, b| {
                a.outcome.rank().cmp(&b.outcome.rank()).then_with(|| {
                    hit_time(&a.outcome)
                        .unwrap_or(0.0)
                        .total_cmp(&hit_time(&b.outcome).unwrap_or(0.0))
                })
            })
            .expect("at least one trace")
    };
    let qualified = matches!(pick.outcome, SampleOutcome::Qualified { .. });
    SgccSample {
        index,
        origin,
        hit_time: if qualified { hit_time(&pick.outcome) } else { None },
        hit_classification: if qualified { pick.class } else { None },
        touched_source_first: matches!(pick.outcome, SampleOutcome::ReturnedToSource { .. }),
        path: pick.outcome.is_violation().then_some(pick.path),
        outcome: pick.outcome,
    }
}

fn hit_time(o: &SampleOutcome) -> Option<f64> {
    match o {
        SampleOutcome::Qualified { time }
        | SampleOutcome::Flagged { time }
        | SampleOutcome::ReturnedToSource { time } => Some(*time),
        _ => None,
    }
}

fn check_regions(regions: &SgccRegions, t_cap: f64) -> Result<(), SgccError> {
    if !(t_cap > 0.0) {
        return Err(SgccError::BadTimeCap(t_cap));
    }
    if !regions.neighborhood.closures_disjoint(regions.measurement) {
        return Err(SgccError::Overlap(RegionLabel::Neighborhood, RegionLabel::Measurement));
    }
    if !regions.source.closures_disjoint(regions.measurement) {
        return Err(SgccError::Overlap(RegionLabel::Source, RegionLabel::Measurement));
    }
    Ok(())
}

fn aggregate(
    samples: Vec<SgccSample>,
    traces: usize,
    sampling: String,
    t_cap: f64,
    concavity: Option<ConcavityVerdict>,
    warnings: Vec<String>,
) -> SgccVerdict {
    let n = samples.len();
    let mut t0: Option<f64> = None;
    let mut flagged = 0;
    let mut inconclusive = 0;
    let mut violations = Vec::new();
    let mut records = Vec::with_capacity(n);
    for mut s in samples {
        records.push(SampleRecord {
            origin: s.origin,
            outcome: s.outcome.clone(),
        });
        match &s.outcome {
            SampleOutcome::Qualified { time } => t0 = Some(t0.map_or(*time, |m| m.max(*time))),
            SampleOutcome::Flagged { .. } => flagged += 1,
            SampleOutcome::Inconclusive { .. } => inconclusive += 1,
            _ => {
                if violations.len() >= MAX_CERTIFICATES {
                    s.path = None;
                }
                violations.push(s);
            }
        }
    }
    let status = if !violations.is_empty() {
        SgccStatus::Violated
    } else if inconclusive > 0 {
        SgccStatus::Inconclusive
    } else {
        SgccStatus::VerifiedOnSamples
    };
    SgccVerdict {
        status,
        t0_observed: t0,
        violations,
        flagged,
        inconclusive,
        samples: n,
        traces,
        sampling,
        time_cap: t_cap,
        concavity,
        warnings,
        records,
    }
}

fn run_samples(
    ctx: &RayContext,
    origins: Vec<SampleOrigin>,
    regions: &SgccRegions,
    t_cap: f64,
    both_lifts: bool,
) -> (Vec<SgccSample>, usize) {
    let watch = [regions.source.clone(), regions.measurement.clone()];
    let samples: Vec<(SgccSample, usize)> = origins
        .into_par_iter()
        .enumerate()
        .map(|(i, origin)| {
            let inits = origin.initials(ctx.domain, ctx.metric, both_lifts);
            let n = inits.len();
            let traced = inits
                .iter()
                .map(|init| trace_one(ctx, init, regions, &watch, t_cap))
                .collect();
            (combine(i, origin, traced), n)
        })
        .collect();
    let traces = samples.iter().map(|s| s.1).sum();
    (samples.into_iter().map(|s| s.0).collect(), traces)
}

fn concavity_warning(
    domain: &Domain,
    metric: &MetricField,
    region: &BoundaryRegion,
    warnings: &mut Vec<String>,
) -> Option<ConcavityVerdict> {
    match check_concavity(domain, metric, region, 64, CONCAVITY_THRESHOLD) {
        Ok(r) => {
            if r.verdict != ConcavityVerdict::StrictConcave {
                warnings.push(format!(
                    "neighborhood region is not strictly concave (min margin {:.3e})",
                    r.min_margin
                ));
            }
            Some(r.verdict)
        }
        Err(e) => {
            warnings.push(format!("concavity check failed: {e}"));
            None
        }
    }
}

/// Traces every boundary sample issued from the neighborhood region up to the
/// first accepted measurement hit or `t_cap`.
pub fn verify_sgcc(
    domain: &Domain,
    metric: &MetricField,
    regions: SgccRegions,
    t_cap: f64,
    sampling: &SamplingSpec,
    tol: &RayTolerances,
) -> Result<SgccVerdict, SgccError> {
    check_regions(&regions, t_cap)?;
    let mut warnings = Vec::new();
    let concavity = concavity_warning(domain, metric, regions.neighborhood, &mut warnings);
    let origins = sample_initials(regions.neighborhood, sampling)?;
    let ctx = RayContext::new(domain, metric, tol.clone());
    let (samples, traces) = run_samples(&ctx, origins, &regions, t_cap, sampling.both_lifts);
    Ok(aggregate(
        samples,
        traces,
        sampling.describe(),
        t_cap,
        concavity,
        warnings,
    ))
}

/// Interior variant: for each characteristic point in the collar, one of the
/// two half-rays must qualify before `t_cap`.
pub fn verify_halfray(
    domain: &Domain,
    metric: &MetricField,
    regions: SgccRegions,
    collar: &CollarSpec,
    t_cap: f64,
    tol: &RayTolerances,
) -> Result<SgccVerdict, SgccError> {
    check_regions(&regions, t_cap)?;
    let mut warnings = Vec::new();
    let concavity = concavity_warning(domain, metric, regions.neighborhood, &mut warnings);
    let origins = sample_collar(domain, metric, regions.neighborhood, collar)?;
    let ctx = RayContext::new(domain, metric, tol.clone());
    let (samples, traces) = run_samples(&ctx, origins, &regions, t_cap, false);
    let desc = format!(
        "collar width {} with {} x {} points, {} directions, both half-rays",
        collar.width, collar.n_s, collar.n_depth, collar.n_dir
    );
    Ok(aggregate(samples, traces, desc, t_cap, concavity, warnings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DomainPreset;

    fn annulus() -> Domain {
        DomainPreset::Annulus { inner: 1.0, outer: 2.0 }.build().unwrap()
    }

    #[test]
    fn sample_counts_and_glancing_exactness() {
        let d = annulus();
        let id = MetricField::Identity;
        let o = BoundaryRegion::full(RegionLabel::Neighborhood, &d, 0).unwrap();
        let sampling = SamplingSpec {
            n_s: 3,
            n_angle: 2,
            ..Default::default()
        };
        let v = sample_initials(&o, &sampling).unwrap();
        assert_eq!(v.len(), 12);
        for origin in &v {
            if let SampleOrigin::Glancing { .. } = origin {
                let InitialCondition::Boundary { covector, .. } = origin.initials(&d, &id, true)[0] else {
                    panic!()
                };
                let r0 = crate::symbols::boundary_r0(&covector.normalized().unwrap(), &d, &id);
                assert!(r0.abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn collar_samples_are_characteristic() {
        let d = annulus();
        let m = MetricField::Constant {
            a11: 2.0,
            a12: 0.3,
            a22: 1.0,
        };
        let o = BoundaryRegion::full(RegionLabel::Neighborhood, &d, 0).unwrap();
        let spec = CollarSpec {
            width: 0.1,
            n_s: 4,
            n_depth: 2,
            n_dir: 6,
        };
        for origin in sample_collar(&d, &m, &o, &spec).unwrap() {
            let SampleOrigin::Interior { x, xi, tau, .. } = origin else {
                panic!()
            };
            let p = PhasePoint::new(0.0, x, tau, xi).normalized();
            assert!(crate::symbols::principal_symbol(&p, &m).abs() <= 1e-12);
        }
    }

    #[test]
    fn overlapping_regions_are_rejected() {
        let d = annulus();
        let id = MetricField::Identity;
        let a = BoundaryRegion::full(RegionLabel::Source, &d, 1).unwrap();
        let regions = SgccRegions {
            neighborhood: &a,
            source: &a,
            measurement: &a,
        };
        let r = verify_sgcc(
            &d,
            &id,
            regions,
            3.0,
            &SamplingSpec::default(),
            &RayTolerances::default(),
        );
        assert!(matches!(r, Err(SgccError::Overlap(..))));
    }
}
