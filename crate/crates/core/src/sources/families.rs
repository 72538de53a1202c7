//! Source families.

use std::f64::consts::TAU;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::sobolev::{fft2, Spectrum};
use super::window::{plateau, smooth_step, TimeProfile};
use super::{
    sobolev_norm, tangential_coefficients, BoundarySource, SobolevSpec, SourceError, SourceFamily, SourceGrid,
    SourceMeta,
};
use crate::geometry::{BoundaryRegion, Domain, MetricField};

/// Smooth cutoff in arc length: a plateau over each interval of a boundary
/// region, ramping over `ramp` times the interval length at each end.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct SpatialWindow {
    pub curve_length: f64,
    pub intervals: Vec<(f64, f64)>,
    pub ramp: f64,
}

impl SpatialWindow {
    pub fn full(curve_length: f64) -> Self {
        SpatialWindow {
            curve_length,
            intervals: vec![(0.0, curve_length)],
            ramp: 0.0,
        }
    }

    pub fn from_region(region: &BoundaryRegion, ramp: f64) -> Self {
        SpatialWindow {
            curve_length: region.curve_length(),
            intervals: region.intervals().to_vec(),
            ramp,
        }
    }

    pub fn is_full(&self) -> bool {
        self.intervals.iter().any(|&(_, len)| len >= self.curve_length)
    }

    pub fn eval(&self, s: f64) -> f64 {
        let l = self.curve_length;
        self.intervals
            .iter()
            .map(|&(a, len)| {
                if len >= l {
                    1.0
                } else {
                    plateau((s - a).rem_euclid(l), 0.0, len, self.ramp * len)
                }
            })
            .fold(0.0, f64::max)
    }
}

fn check_profile(profile: &TimeProfile, duration: f64) -> Result<(), SourceError> {
    let (a, b) = profile.support();
    if a < 0.0 || b > duration + 1e-12 {
        return Err(SourceError::InvalidParameters(format!(
            "time profile support [{a}, {b}] leaves [0, {duration}]"
        )));
    }
    Ok(())
}

/// Range of the tangential coefficient over the points where `window > 0`.
fn coefficient_range(
    domain: &Domain,
    metric: &MetricField,
    curve: usize,
    window: &SpatialWindow,
    n: usize,
) -> (f64, f64) {
    let h = tangential_coefficients(domain, metric, curve, n);
    let ds = window.curve_length / n as f64;
    h.iter()
        .enumerate()
        .filter(|(j, _)| window.eval(*j as f64 * ds) > 0.0)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, &v)| {
            (lo.min(v), hi.max(v))
        })
}

/// `g(t, s) = w(t) chi_kappa(s)` where `chi_kappa` keeps the Fourier modes of
/// the window with `|xi| <= kappa`. `kappa = 0` keeps only the mean.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct AdmissibleSpec {
    pub duration: f64,
    pub profile: TimeProfile,
    pub window: SpatialWindow,
    pub kappa: f64,
}

impl AdmissibleSpec {
    pub fn grid_for(&self, ppw: f64) -> SourceGrid {
        let tau = 1.5 * self.profile.dominant_tau();
        SourceGrid::for_frequencies(self.duration, self.window.curve_length, tau, self.kappa, ppw)
    }
}

pub fn admissible_time_only(
    domain: &Domain,
    metric: &MetricField,
    curve: usize,
    spec: &AdmissibleSpec,
    grid: SourceGrid,
) -> Result<BoundarySource, SourceError> {
    let AdmissibleSpec {
        duration,
        profile,
        window,
        kappa,
    } = spec;
    let (duration, kappa) = (*duration, *kappa);
    check_profile(profile, duration)?;
    let ns = grid.ns;
    let l = window.curve_length;
    let chi: Vec<f64> = (0..ns).map(|j| window.eval(l * j as f64 / ns as f64)).collect();
    let mut c: Vec<Complex<f64>> = chi.iter().map(|&v| Complex::new(v, 0.0)).collect();
    fft2(&mut c, 1, ns, false);
    let total: f64 = c.iter().map(|z| z.norm_sqr()).sum();
    let mut kept = 0.0;
    for (m, z) in c.iter_mut().enumerate() {
        let mi = if m <= ns / 2 { m as f64 } else { m as f64 - ns as f64 };
        if (mi * TAU / l).abs() > kappa + 1e-12 {
            *z = Complex::new(0.0, 0.0);
        } else {
            kept += z.norm_sqr();
        }
    }
    let retained = if total > 0.0 { kept / total } else { 0.0 };
    if kappa > 0.0 && !window.is_full() && retained < 0.9 {
        return Err(SourceError::BandIncompatible { retained });
    }
    fft2(&mut c, 1, ns, true);
    let chi_k: Vec<f64> = c.iter().map(|z| z.re).collect();

    let mut meta = SourceMeta::new(SourceFamily::AdmissibleTimeOnly, [profile.dominant_tau(), kappa]);
    let mut src = BoundarySource::sample(curve, l, duration, grid, meta.clone(), |t, _| profile.eval(t));
    for k in 0..grid.nt {
        for j in 0..ns {
            src.values[k * ns + j] *= chi_k[j];
        }
    }
    let (_, a_max) = coefficient_range(domain, metric, curve, &SpatialWindow::full(l), ns);
    let sp = Spectrum::of(&src, 2);
    let all = sp.weighted(|_, _| 1.0);
    let outside = if all > 0.0 {
        sp.weighted(|tau, xi| if tau * tau <= a_max * xi * xi { 1.0 } else { 0.0 }) / all
    } else {
        0.0
    };
    let peak = chi_k.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let leak = chi_k
        .iter()
        .zip(&chi)
        .filter(|(_, &w)| w == 0.0)
        .fold(0.0f64, |m, (v, _)| m.max(v.abs()))
        / peak.max(f64::MIN_POSITIVE);
    meta.diagnostics.insert("band_retained".into(), retained);
    meta.diagnostics.insert("outside_cone_fraction".into(), outside);
    meta.diagnostics.insert("support_leak".into(), leak);
    if outside > 0.05 {
        meta.warnings.push(format!(
            "{:.1}% of the spectral mass has tau^2 <= a xi^2",
            100.0 * outside
        ));
    }
    src.meta = meta;
    Ok(src)
}

/// Oscillatory data concentrated on the ray `k (tau0, xi0)` inside the
/// elliptic cone `|tau| <= c |xi|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct InvisibleSpec {
    pub base: [f64; 2],
    pub cone: f64,
    /// Fraction of the cone angle over which the filter tapers to zero.
    pub taper: f64,
    pub duration: f64,
    pub profile: TimeProfile,
    pub window: SpatialWindow,
    /// Exponent of the full-norm normalization.
    pub exponent: f64,
    /// Largest spectral share allowed outside the cone.
    pub leak_tolerance: f64,
}

impl InvisibleSpec {
    /// Source grid with `ppw` points per wavelength at frequency `k`.
    pub fn grid_for(&self, k: f64, ppw: f64) -> SourceGrid {
        let tau = (k * self.base[0].abs()).max(self.profile.dominant_tau());
        let xi = k * self.base[1].abs() * 1.25;
        SourceGrid::for_frequencies(self.duration, self.window.curve_length, tau, xi, ppw)
    }
}

fn cone_filter(tau: f64, xi: f64, cone: f64, taper: f64) -> f64 {
    if tau == 0.0 && xi == 0.0 {
        return 1.0;
    }
    let phi = tau.abs().atan2(xi.abs());
    let phi_c = cone.atan();
    1.0 - smooth_step((phi - (1.0 - taper) * phi_c) / (taper * phi_c))
}

pub fn invisible_family(
    domain: &Domain,
    metric: &MetricField,
    curve: usize,
    spec: &InvisibleSpec,
    k: f64,
    grid: SourceGrid,
) -> Result<BoundarySource, SourceError> {
    check_profile(&spec.profile, spec.duration)?;
    let [tau0, xi0] = spec.base;
    if xi0 == 0.0 || !(spec.taper > 0.0 && spec.taper < 1.0) {
        return Err(SourceError::InvalidParameters(
            "need xi0 != 0 and taper in (0, 1)".into(),
        ));
    }
    let l = spec.window.curve_length;
    let (a_min, _) = coefficient_range(domain, metric, curve, &spec.window, grid.ns);
    let ratio = tau0 * tau0 / (a_min * xi0 * xi0);
    if ratio >= 1.0 {
        return Err(SourceError::NotElliptic { ratio });
    }
    let lower = ((tau0 / xi0).abs().atan() / (1.0 - spec.taper)).tan();
    let upper = a_min.sqrt();
    if !(spec.cone >= lower && spec.cone < upper) {
        return Err(SourceError::ConeEscapes {
            c: spec.cone,
            lower,
            upper,
        });
    }
    if spec.window.is_full() {
        let modes = k * xi0 * l / TAU;
        if (modes - modes.round()).abs() > 1e-6 {
            return Err(SourceError::InvalidParameters(format!(
                "k xi0 = {} is not a Fourier frequency of the closed curve",
                k * xi0
            )));
        }
    }

    let b1 = |t: f64, s: f64| spec.profile.eval(t) * spec.window.eval(s);
    let meta = SourceMeta::new(SourceFamily::Invisible, [k * tau0.abs(), k * xi0.abs()]);
    let f = BoundarySource::sample(curve, l, spec.duration, grid, meta, |t, s| {
        (k * (tau0 * t + xi0 * s)).cos() * b1(t, s)
    });
    let mut sp = Spectrum::of(&f, 2);
    for p in 0..sp.nt {
        let tau = sp.tau(p);
        for m in 0..sp.ns {
            let w = cone_filter(tau, sp.xi(m), spec.cone, spec.taper);
            sp.coeffs[p * sp.ns + m] *= w;
        }
    }
    fft2(&mut sp.coeffs, sp.nt, sp.ns, true);
    let scale = 1.0 / (f.dt() * f.ds());
    let mut g = f.clone();
    for kk in 0..grid.nt {
        for j in 0..grid.ns {
            let i = kk * grid.ns + j;
            g.values[i] = sp.coeffs[i].re * scale * b1(f.t(kk), f.s(j));
        }
    }
    let raw = sobolev_norm(&g, &SobolevSpec::full(spec.exponent))?;
    if raw == 0.0 {
        return Err(SourceError::InvalidParameters("filtered data vanish".into()));
    }
    let mut g = g.scaled(1.0 / raw);
    let gs = Spectrum::of(&g, 2);
    let all = gs.weighted(|_, _| 1.0);
    let inside = gs.weighted(|tau, xi| if tau.abs() <= spec.cone * xi.abs() { 1.0 } else { 0.0 });
    let outside = 1.0 - inside / all;
    if outside > spec.leak_tolerance {
        return Err(SourceError::ConeLeak { outside });
    }
    g.meta.k = Some(k);
    g.meta.cone = Some(spec.cone);
    g.meta.base = Some(spec.base);
    g.meta.diagnostics.insert("in_cone_fraction".into(), 1.0 - outside);
    g.meta.diagnostics.insert("elliptic_ratio".into(), ratio);
    g.meta.diagnostics.insert("unnormalized_norm".into(), raw);
    g.meta.diagnostics.insert("exponent".into(), spec.exponent);
    Ok(g)
}

/// Elliptic sequences approaching the glancing covector `(sqrt(a) xi0, xi0)`:
/// member `j` sits at relative distance `2^(-rate j)` from the glancing set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct GlancingSpec {
    pub xi0: f64,
    pub rate: f64,
    pub duration: f64,
    pub profile: TimeProfile,
    pub window: SpatialWindow,
    pub exponent: f64,
    pub leak_tolerance: f64,
}

impl GlancingSpec {
    pub fn margin(&self, j: u32) -> f64 {
        (-self.rate * j as f64).exp2()
    }

    /// Cone spec for member `j`, given the tangential coefficient `a`.
    pub fn member(&self, j: u32, a: f64) -> InvisibleSpec {
        let m = self.margin(j);
        let tau = self.xi0.abs() * (a * (1.0 - m)).sqrt();
        let cone = (a * (1.0 - 0.5 * m)).sqrt();
        let (phi0, phi_c) = ((tau / self.xi0.abs()).atan(), cone.atan());
        InvisibleSpec {
            base: [tau, self.xi0],
            cone,
            taper: 0.5 * (phi_c - phi0) / phi_c,
            duration: self.duration,
            profile: self.profile.clone(),
            window: self.window.clone(),
            exponent: self.exponent,
            leak_tolerance: self.leak_tolerance,
        }
    }
}

pub fn glancing_family(
    domain: &Domain,
    metric: &MetricField,
    curve: usize,
    spec: &GlancingSpec,
    j: u32,
    k: f64,
    grid: SourceGrid,
) -> Result<BoundarySource, SourceError> {
    let (min, max) = coefficient_range(domain, metric, curve, &spec.window, grid.ns);
    if max - min > 1e-9 * max {
        return Err(SourceError::NotGlancing { min, max });
    }
    let member = spec.member(j, min);
    let mut src = invisible_family(domain, metric, curve, &member, k, grid)?;
    src.meta.family = SourceFamily::Glancing;
    let distance = min.sqrt() - member.base[0] / spec.xi0.abs();
    src.meta.diagnostics.insert("glancing_distance".into(), distance);
    src.meta.diagnostics.insert("margin".into(), spec.margin(j));
    Ok(src)
}

/// Cosine mode `m` of the initial data: `g0 = amplitude cos(xi_m s)`,
/// `g1 = velocity cos(xi_m s)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct BetaMode {
    pub mode: u32,
    pub amplitude: f64,
    pub velocity: f64,
}

/// Window times a solution of `w_tt = beta a w_ss` on the curve, with `a`
/// the mean tangential coefficient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct BetaSpec {
    pub beta: f64,
    pub duration: f64,
    pub profile: TimeProfile,
    pub window: SpatialWindow,
    pub modes: Vec<BetaMode>,
}

pub fn beta_boundary_wave(
    domain: &Domain,
    metric: &MetricField,
    curve: usize,
    spec: &BetaSpec,
    grid: SourceGrid,
) -> Result<BoundarySource, SourceError> {
    if !(spec.beta > 0.0) {
        return Err(SourceError::BetaNonPositive(spec.beta));
    }
    check_profile(&spec.profile, spec.duration)?;
    let h = tangential_coefficients(domain, metric, curve, grid.ns);
    let a = h.iter().sum::<f64>() / h.len() as f64;
    let l = spec.window.curve_length;
    let xi_max = spec.modes.iter().map(|m| m.mode).max().unwrap_or(0) as f64 * TAU / l;
    let meta = SourceMeta::new(SourceFamily::BetaWave, [(spec.beta * a).sqrt() * xi_max, xi_max]);
    let mut src = BoundarySource::sample(curve, l, spec.duration, grid, meta, |t, s| {
        let w: f64 = spec
            .modes
            .iter()
            .map(|m| {
                let xi = m.mode as f64 * TAU / l;
                let omega = (spec.beta * a).sqrt() * xi;
                let time = if m.mode == 0 {
                    m.amplitude + m.velocity * t
                } else {
                    m.amplitude * (omega * t).cos() + m.velocity * (omega * t).sin() / omega
                };
                time * (xi * s).cos()
            })
            .sum();
        spec.profile.eval(t) * spec.window.eval(s) * w
    });
    let centroid = Spectrum::of(&src, 2).characteristic_centroid(a);
    src.meta.diagnostics.insert("beta".into(), spec.beta);
    src.meta.diagnostics.insert("characteristic_centroid".into(), centroid);
    src.meta.diagnostics.insert("mean_tangential_coefficient".into(), a);
    Ok(src)
}
