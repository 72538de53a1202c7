//! Discrete Sobolev norms of boundary data.
//!
//! With `ghat(tau, xi)` the Fourier transform over the time line and the
//! closed curve, the full norm is
//! `||g||_s^2 = (2 pi)^-2 sum-integral (1 + tau^2 + xi^2)^s |ghat|^2`, and the
//! mixed norm integrates `||g(t, .)||_{H^s(curve)}^2` over `t`. Both reduce
//! to the plain `L^2` norm at `s = 0`.

use std::f64::consts::TAU;

use num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::{BoundarySource, SourceError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormKind {
    /// `L^2` in time with values in `H^s` of the curve.
    Mixed,
    /// Space-time weight `(1 + tau^2 + xi^2)^s`.
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct SobolevSpec {
    pub exponent: f64,
    pub kind: NormKind,
    /// Zero padding factor in time for the full norm, at least 2.
    pub pad: usize,
    /// Largest share of the weighted mass allowed in the outer quarter band.
    pub band_tolerance: f64,
}

impl Default for SobolevSpec {
    fn default() -> Self {
        SobolevSpec {
            exponent: 0.0,
            kind: NormKind::Full,
            pad: 2,
            band_tolerance: 0.01,
        }
    }
}

impl SobolevSpec {
    pub fn full(exponent: f64) -> Self {
        SobolevSpec {
            exponent,
            ..Default::default()
        }
    }

    pub fn mixed(exponent: f64) -> Self {
        SobolevSpec {
            exponent,
            kind: NormKind::Mixed,
            ..Default::default()
        }
    }
}

/// Space-time spectrum of a source, zero padded in time.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub nt: usize,
    pub ns: usize,
    pub dtau: f64,
    pub dxi: f64,
    /// `ghat[p * ns + m]`, scaled so that `sum |ghat|^2 * dtau * dxi / (2 pi)^2`
    /// is the squared `L^2` norm.
    pub coeffs: Vec<Complex<f64>>,
}

fn signed_index(i: usize, n: usize) -> f64 {
    if i <= n / 2 {
        i as f64
    } else {
        i as f64 - n as f64
    }
}

impl Spectrum {
    pub fn of(src: &BoundarySource, pad: usize) -> Self {
        let (nt0, ns) = (src.grid.nt, src.grid.ns);
        let nt = (pad.max(2) * nt0).next_power_of_two();
        let mut data = vec![Complex::new(0.0, 0.0); nt * ns];
        for k in 0..nt0 {
            for j in 0..ns {
                data[k * ns + j] = Complex::new(src.at(k, j), 0.0);
            }
        }
        fft2(&mut data, nt, ns, false);
        let scale = src.dt() * src.ds();
        data.iter_mut().for_each(|c| *c *= scale);
        Spectrum {
            nt,
            ns,
            dtau: TAU / (nt as f64 * src.dt()),
            dxi: TAU / src.curve_length,
            coeffs: data,
        }
    }

    pub fn tau(&self, p: usize) -> f64 {
        signed_index(p, self.nt) * self.dtau
    }

    pub fn xi(&self, m: usize) -> f64 {
        signed_index(m, self.ns) * self.dxi
    }

    /// `sum w(tau, xi) |ghat|^2` with the Plancherel normalization.
    pub fn weighted<F: Fn(f64, f64) -> f64>(&self, w: F) -> f64 {
        let mut acc = 0.0;
        for p in 0..self.nt {
            let tau = self.tau(p);
            for m in 0..self.ns {
                acc += w(tau, self.xi(m)) * self.coeffs[p * self.ns + m].norm_sqr();
            }
        }
        acc * self.dtau * self.dxi / (TAU * TAU)
    }

    pub fn norm_squared(&self, exponent: f64) -> f64 {
        self.weighted(|tau, xi| (1.0 + tau * tau + xi * xi).powf(exponent))
    }

    /// Share of the `exponent`-weighted mass beyond three quarters of the
    /// Nyquist frequency in either variable.
    pub fn outer_band_fraction(&self, exponent: f64) -> f64 {
        let (tq, xq) = (0.375 * self.nt as f64 * self.dtau, 0.375 * self.ns as f64 * self.dxi);
        let total = self.norm_squared(exponent);
        if total == 0.0 {
            return 0.0;
        }
        let outer = self.weighted(|tau, xi| {
            if tau.abs() > tq || xi.abs() > xq {
                (1.0 + tau * tau + xi * xi).powf(exponent)
            } else {
                0.0
            }
        });
        outer / total
    }

    /// Signed centroid `sum (tau^2 - a xi^2) |ghat|^2 / sum (tau^2 + a xi^2) |ghat|^2`.
    pub fn characteristic_centroid(&self, a: f64) -> f64 {
        let num = self.weighted(|tau, xi| tau * tau - a * xi * xi);
        let den = self.weighted(|tau, xi| tau * tau + a * xi * xi);
        if den == 0.0 {
            0.0
        } else {
            num / den
        }
    }
}

/// In-place 2D transform of a row-major `n1 x n2` array. The inverse is
/// normalized by `1 / (n1 n2)`.
pub(crate) fn fft2(data: &mut [Complex<f64>], n1: usize, n2: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let (f1, f2) = if inverse {
        (planner.plan_fft_inverse(n1), planner.plan_fft_inverse(n2))
    } else {
        (planner.plan_fft_forward(n1), planner.plan_fft_forward(n2))
    };
    f2.process(data);
    let mut col = vec![Complex::new(0.0, 0.0); n1];
    for j in 0..n2 {
        for i in 0..n1 {
            col[i] = data[i * n2 + j];
        }
        f1.process(&mut col);
        for i in 0..n1 {
            data[i * n2 + j] = col[i];
        }
    }
    if inverse {
        let s = 1.0 / (n1 * n2) as f64;
        data.iter_mut().for_each(|c| *c *= s);
    }
}

/// Mixed norm and its outer-band share.
fn mixed(src: &BoundarySource, exponent: f64) -> (f64, f64) {
    let ns = src.grid.ns;
    let fft = FftPlanner::new().plan_fft_forward(ns);
    let (dt, ds, l) = (src.dt(), src.ds(), src.curve_length);
    let xq = 0.375 * ns as f64 * TAU / l;
    let (mut total, mut outer) = (0.0, 0.0);
    let mut row = vec![Complex::new(0.0, 0.0); ns];
    for k in 0..src.grid.nt {
        for j in 0..ns {
            row[j] = Complex::new(src.at(k, j) * ds, 0.0);
        }
        fft.process(&mut row);
        let (mut r_total, mut r_outer) = (0.0, 0.0);
        for (m, c) in row.iter().enumerate() {
            let xi = signed_index(m, ns) * TAU / l;
            let v = (1.0 + xi * xi).powf(exponent) * c.norm_sqr() / l;
            r_total += v;
            if xi.abs() > xq {
                r_outer += v;
            }
        }
        let w = if k == 0 || k + 1 == src.grid.nt { 0.5 * dt } else { dt };
        total += w * r_total;
        outer += w * r_outer;
    }
    (total, if total > 0.0 { outer / total } else { 0.0 })
}

/// Sobolev norm of `src`, refusing under-resolved data.
pub fn sobolev_norm(src: &BoundarySource, spec: &SobolevSpec) -> Result<f64, SourceError> {
    let (sq, fraction) = match spec.kind {
        NormKind::Mixed => mixed(src, spec.exponent),
        NormKind::Full => {
            let sp = Spectrum::of(src, spec.pad);
            (sp.norm_squared(spec.exponent), sp.outer_band_fraction(spec.exponent))
        }
    };
    if fraction > spec.band_tolerance {
        return Err(SourceError::ResolutionInsufficient { fraction });
    }
    Ok(sq.sqrt())
}
