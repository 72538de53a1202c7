//! Boundary data on the source cylinder `[0, M] x curve`: admissible
//! sources, boundary-wave sources, elliptic-cone ("invisible") sequences, and
//! Sobolev norms computed by discrete Fourier transforms.

mod families;
mod io;
mod sobolev;
mod window;

pub use families::{
    admissible_time_only, beta_boundary_wave, glancing_family, invisible_family, AdmissibleSpec, BetaMode, BetaSpec,
    GlancingSpec, InvisibleSpec, SpatialWindow,
};
pub use io::{read_source, write_source};
pub use sobolev::{sobolev_norm, NormKind, SobolevSpec, Spectrum};
pub use window::{bump, bump_on, plateau, smooth_step, TimeProfile};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{BoundaryChart, Domain, MetricField};
use crate::wavesim::BoundaryDrive;

#[derive(Debug, Error)]
pub enum SourceError {
    #[error("RESOLUTION_INSUFFICIENT: {fraction:.3e} of the spectral mass lies in the outer quarter band")]
    ResolutionInsufficient { fraction: f64 },
    #[error("window/band incompatibility: the band keeps only {retained:.3} of the window energy")]
    BandIncompatible { retained: f64 },
    #[error("CONE_LEAK: {outside:.3e} of the spectral mass lies outside the cone")]
    ConeLeak { outside: f64 },
    #[error("NOT_ELLIPTIC: tau^2 / (a xi^2) = {ratio:.6} is not below 1")]
    NotElliptic { ratio: f64 },
    #[error("NOT_GLANCING: tangential coefficient varies over the support ({min:.6} .. {max:.6})")]
    NotGlancing { min: f64, max: f64 },
    #[error("cone constant {c} must lie in [{lower}, {upper})")]
    ConeEscapes { c: f64, lower: f64, upper: f64 },
    #[error("beta must be positive, got {0}")]
    BetaNonPositive(f64),
    #[error("invalid source parameters: {0}")]
    InvalidParameters(String),
    #[error("malformed source file: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceFamily {
    AdmissibleTimeOnly,
    Invisible,
    Glancing,
    BetaWave,
    Custom,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceMeta {
    pub family: SourceFamily,
    /// Frequency index of oscillatory families.
    pub k: Option<f64>,
    /// Cone constant `c` of `|tau| <= c |xi|`.
    pub cone: Option<f64>,
    /// Base covector `(tau0, xi0)`.
    pub base: Option<[f64; 2]>,
    /// Largest angular frequencies carrying the source, `(tau, xi)`.
    pub dominant: [f64; 2],
    /// Named diagnostics (spectral fractions, distances, ...).
    pub diagnostics: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
}

impl SourceMeta {
    pub fn new(family: SourceFamily, dominant: [f64; 2]) -> Self {
        SourceMeta {
            family,
            k: None,
            cone: None,
            base: None,
            dominant,
            diagnostics: BTreeMap::new(),
            warnings: Vec::new(),
        }
    }
}

/// Sampling of the source cylinder: `nt` times spanning `[0, duration]`
/// inclusive and `ns` periodic arc-length points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceGrid {
    pub nt: usize,
    pub ns: usize,
}

impl SourceGrid {
    /// Grid with at least `ppw` points per shortest wavelength in each
    /// direction, for angular frequencies up to `tau` and `xi`.
    pub fn for_frequencies(duration: f64, length: f64, tau: f64, xi: f64, ppw: f64) -> Self {
        let nt = ((duration * tau * ppw / std::f64::consts::TAU).ceil() as usize).max(64) + 1;
        let ns = ((length * xi * ppw / std::f64::consts::TAU).ceil() as usize).max(64);
        SourceGrid {
            nt,
            ns: ns.next_multiple_of(8),
        }
    }
}

/// Samples `g(t_k, s_j)` on one boundary curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundarySource {
    pub curve: usize,
    pub curve_length: f64,
    /// Source window `M`.
    pub duration: f64,
    pub grid: SourceGrid,
    /// Row-major, `values[k * ns + j]`.
    pub values: Vec<f64>,
    pub meta: SourceMeta,
}

impl BoundarySource {
    pub fn sample<F: Fn(f64, f64) -> f64>(
        curve: usize,
        curve_length: f64,
        duration: f64,
        grid: SourceGrid,
        meta: SourceMeta,
        f: F,
    ) -> Self {
        let mut values = Vec::with_capacity(grid.nt * grid.ns);
        let (dt, ds) = (duration / (grid.nt - 1) as f64, curve_length / grid.ns as f64);
        for k in 0..grid.nt {
            for j in 0..grid.ns {
                values.push(f(k as f64 * dt, j as f64 * ds));
            }
        }
        BoundarySource {
            curve,
            curve_length,
            duration,
            grid,
            values,
            meta,
        }
    }

    pub fn dt(&self) -> f64 {
        self.duration / (self.grid.nt - 1) as f64
    }

    pub fn ds(&self) -> f64 {
        self.curve_length / self.grid.ns as f64
    }

    pub fn t(&self, k: usize) -> f64 {
        k as f64 * self.dt()
    }

    pub fn s(&self, j: usize) -> f64 {
        j as f64 * self.ds()
    }

    pub fn at(&self, k: usize, j: usize) -> f64 {
        self.values[k * self.grid.ns + j]
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= factor);
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn l2(&self) -> f64 {
        let sum: f64 = self.values.iter().map(|v| v * v).sum();
        (sum * self.dt() * self.ds()).sqrt()
    }

    /// Cubic Lagrange interpolation, periodic in `s` and zero outside
    /// `[0, duration]` in `t`.
    pub fn eval(&self, t: f64, s: f64) -> f64 {
        if !(t > 0.0 && t < self.duration) {
            return 0.0;
        }
        let (nt, ns) = (self.grid.nt as isize, self.grid.ns as isize);
        let ut = t / self.dt();
        let us = s.rem_euclid(self.curve_length) / self.ds();
        let (kt, ks) = (ut.floor() as isize, us.floor() as isize);
        let (ft, fs) = (ut - kt as f64, us - ks as f64);
        let wt = lagrange4(ft);
        let ws = lagrange4(fs);
        let mut acc = 0.0;
        for (a, wa) in wt.iter().enumerate() {
            let k = kt + a as isize - 1;
            if k < 0 || k >= nt {
                continue;
            }
            let mut row = 0.0;
            for (b, wb) in ws.iter().enumerate() {
                let j = (ks + b as isize - 1).rem_euclid(ns);
                row += wb * self.values[(k * ns + j) as usize];
            }
            acc += wa * row;
        }
        acc
    }

    /// The same samples driving curve `side` of a solver grid.
    pub fn drive(&self) -> SourceDrive<'_> {
        SourceDrive { source: self }
    }

    /// Largest `|g|` at arc positions outside `region` relative to `max |g|`.
    pub fn support_leak(&self, region: &crate::geometry::BoundaryRegion) -> f64 {
        let peak = self.max_abs();
        if peak == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for j in 0..self.grid.ns {
            if region.contains(self.s(j), 1e-12) {
                continue;
            }
            for k in 0..self.grid.nt {
                worst = worst.max(self.at(k, j).abs());
            }
        }
        worst / peak
    }

    /// Largest `|g|` on the first and last time rows, relative to `max |g|`.
    pub fn endpoint_level(&self) -> f64 {
        let peak = self.max_abs();
        if peak == 0.0 {
            return 0.0;
        }
        let last = self.grid.nt - 1;
        (0..self.grid.ns)
            .map(|j| self.at(0, j).abs().max(self.at(last, j).abs()))
            .fold(0.0, f64::max)
            / peak
    }
}

/// Weights of 4-point Lagrange interpolation at nodes `-1, 0, 1, 2`.
fn lagrange4(x: f64) -> [f64; 4] {
    [
        -x * (x - 1.0) * (x - 2.0) / 6.0,
        (x + 1.0) * (x - 1.0) * (x - 2.0) / 2.0,
        -(x + 1.0) * x * (x - 2.0) / 2.0,
        (x + 1.0) * x * (x - 1.0) / 6.0,
    ]
}

pub struct SourceDrive<'a> {
    source: &'a BoundarySource,
}

impl BoundaryDrive for SourceDrive<'_> {
    fn value(&self, t: f64, side: usize, s: f64) -> f64 {
        if side == self.source.curve {
            self.source.eval(t, s)
        } else {
            0.0
        }
    }
}

/// Tangential coefficient `h0(s) = 1 / (t^T A^{-1} t)` at `n` points.
pub fn tangential_coefficients(domain: &Domain, metric: &MetricField, curve: usize, n: usize) -> Vec<f64> {
    let l = domain.curve(curve).length();
    (0..n)
        .map(|j| BoundaryChart::new(domain, metric, curve, l * j as f64 / n as f64).h0)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolation_reproduces_cubics_and_wraps() {
        let grid = SourceGrid { nt: 41, ns: 32 };
        let l = 2.0;
        let src = BoundarySource::sample(
            0,
            l,
            1.0,
            grid,
            SourceMeta::new(SourceFamily::Custom, [0.0; 2]),
            |t, s| t * t * t - 0.5 * t + (std::f64::consts::PI * s).cos(),
        );
        let exact = |t: f64, s: f64| t * t * t - 0.5 * t + (std::f64::consts::PI * s).cos();
        for &(t, s) in &[(0.33, 0.71), (0.5, 1.99), (0.9, -0.3)] {
            assert!((src.eval(t, s) - exact(t, s)).abs() < 1e-4);
        }
        assert_eq!(src.eval(-0.1, 0.0), 0.0);
        assert_eq!(src.eval(1.2, 0.0), 0.0);
    }
}
