//! Boundary charts and the geodesic collar of a boundary curve.
//!
//! At a boundary point with unit tangent `t` and Euclidean inward normal `nu`
//! the collar direction is the metric conormal `n = A nu / sqrt(nu^T A nu)`.
//! Covectors split as `xi = xi_s e_s + xi_n e_n` against the dual basis of
//! `(t, n)`, and the dual quadratic form becomes `h xi_s^2 + xi_n^2`.

use super::{Domain, GeometryError, Mat2, MetricField, Vec2};

#[derive(Clone, Copy, Debug)]
pub struct BoundaryChart {
    pub curve: usize,
    pub s: f64,
    pub x: Vec2,
    pub t_vec: Vec2,
    /// Collar direction, unit length in the metric `A^-1`.
    pub n_vec: Vec2,
    /// Euclidean inward unit normal.
    pub nu: Vec2,
    /// Dual basis covector pairing to one with `t_vec`, zero with `n_vec`.
    pub e_s: Vec2,
    /// Dual basis covector pairing to one with `n_vec`, zero with `t_vec`.
    pub e_n: Vec2,
    /// Tangential coefficient `h = 1 / (t^T A^-1 t)` of the dual form.
    pub h0: f64,
    /// Turning rate of the Euclidean normal; `None` at curvature jumps.
    pub concavity: Option<f64>,
}

impl BoundaryChart {
    pub fn new(domain: &Domain, metric: &MetricField, curve: usize, s: f64) -> Self {
        let c = domain.curve(curve);
        let s = c.wrap(s);
        let f = c.frame(s);
        let a = metric.a(f.point);
        let an = a * f.inward;
        let m = f.inward.dot(&an).sqrt();
        let n_vec = an / m;
        let basis = Mat2::from_columns(&[f.tangent, n_vec]);
        let dual = basis.try_inverse().expect("collar frame is nondegenerate");
        let e_s = Vec2::new(dual[(0, 0)], dual[(0, 1)]);
        let e_n = Vec2::new(dual[(1, 0)], dual[(1, 1)]);
        let ainv = metric.inverse(f.point);
        let h0 = 1.0 / f.tangent.dot(&(ainv * f.tangent));
        BoundaryChart {
            curve,
            s,
            x: f.point,
            t_vec: f.tangent,
            n_vec,
            nu: f.inward,
            e_s,
            e_n,
            h0,
            concavity: f.concavity,
        }
    }

    /// `(xi_s, xi_n)` components of an ambient covector.
    pub fn split(&self, xi: Vec2) -> (f64, f64) {
        (xi.dot(&self.t_vec), xi.dot(&self.n_vec))
    }

    pub fn compose(&self, xi_s: f64, xi_n: f64) -> Vec2 {
        self.e_s * xi_s + self.e_n * xi_n
    }

    /// Derivative of the collar direction along the curve. Requires the
    /// curvature; `None` at curvature jumps.
    pub fn n_vec_derivative(&self, metric: &MetricField) -> Option<Vec2> {
        let kappa = self.concavity?;
        let dnu = self.t_vec * kappa;
        let a = metric.a(self.x);
        let da = metric.derivative_along(self.x, self.t_vec);
        let an = a * self.nu;
        let m = self.nu.dot(&an).sqrt();
        let dan = da * self.nu + a * dnu;
        let dm = (self.nu.dot(&(da * self.nu)) + 2.0 * dnu.dot(&an)) / (2.0 * m);
        Some(dan / m - an * (dm / (m * m)))
    }

    /// Tangential coefficient `h(x_n)` of the dual form a collar distance
    /// `x_n` into the domain, to first order in the collar map.
    pub fn tangential_factor(&self, metric: &MetricField, dn: Vec2, x_n: f64) -> f64 {
        let x = self.x + self.n_vec * x_n;
        let ds = self.t_vec + dn * x_n;
        1.0 / ds.dot(&(metric.inverse(x) * ds))
    }

    /// `d h / d x_n` at the boundary by centered differences with one
    /// Richardson step. `step` is the base difference.
    pub fn tangential_factor_slope(&self, metric: &MetricField, step: f64) -> Option<f64> {
        let dn = self.n_vec_derivative(metric)?;
        let d = |h: f64| (self.tangential_factor(metric, dn, h) - self.tangential_factor(metric, dn, -h)) / (2.0 * h);
        let (d1, d2) = (d(step), d(0.5 * step));
        Some((4.0 * d2 - d1) / 3.0)
    }

    /// Closed form of [`Self::tangential_factor_slope`], used as a cross-check.
    pub fn tangential_factor_slope_exact(&self, metric: &MetricField) -> Option<f64> {
        let dn = self.n_vec_derivative(metric)?;
        let ainv = metric.inverse(self.x);
        let da = metric.derivative_along(self.x, self.n_vec);
        let dainv = -ainv * da * ainv;
        let g = self.t_vec.dot(&(ainv * self.t_vec));
        let dg = 2.0 * dn.dot(&(ainv * self.t_vec)) + self.t_vec.dot(&(dainv * self.t_vec));
        Some(-dg / (g * g))
    }
}

/// Difference step for collar derivatives: a small fraction of the
/// curvature radius, or of the domain size on flat curves.
pub(crate) fn collar_step(domain: &Domain, chart: &BoundaryChart) -> f64 {
    let scale = match chart.concavity {
        Some(k) if k.abs() > 1e-12 => 1.0 / k.abs(),
        _ => domain.bounding_box().size().max(),
    };
    1e-4 * scale.min(domain.bounding_box().size().max())
}

/// The map `(s, x_n) -> x(s) + x_n n_vec(s)` of one curve.
pub struct Collar<'a> {
    domain: &'a Domain,
    metric: &'a MetricField,
    curve: usize,
    depth: f64,
}

impl<'a> Collar<'a> {
    /// Builds the collar of width `0.2 x` the minimum curvature radius and
    /// checks injectivity by sampling.
    pub fn new(domain: &'a Domain, metric: &'a MetricField, curve: usize) -> Result<Self, GeometryError> {
        let depth = domain.collar_radius(curve);
        let collar = Collar {
            domain,
            metric,
            curve,
            depth,
        };
        collar.check_injective(256, 8)?;
        Ok(collar)
    }

    pub fn depth(&self) -> f64 {
        self.depth
    }

    pub fn map(&self, s: f64, x_n: f64) -> Vec2 {
        let ch = BoundaryChart::new(self.domain, self.metric, self.curve, s);
        ch.x + ch.n_vec * x_n
    }

    /// Inverts the collar map by Newton iteration from the Euclidean
    /// projection. Returns `(s, x_n)`.
    pub fn inverse(&self, x: Vec2) -> Result<(f64, f64), GeometryError> {
        let c = self.domain.curve(self.curve);
        let (mut s, _) = c.closest(x);
        let ch = BoundaryChart::new(self.domain, self.metric, self.curve, s);
        let mut xn = (x - ch.x).dot(&ch.e_n);
        let h = 1e-6 * c.length();
        for _ in 0..40 {
            let r = self.map(s, xn) - x;
            if r.norm() < 1e-14 * c.length().max(1.0) {
                break;
            }
            let js = (self.map(s + h, xn) - self.map(s - h, xn)) / (2.0 * h);
            let jn = BoundaryChart::new(self.domain, self.metric, self.curve, s).n_vec;
            let j = Mat2::from_columns(&[js, jn]);
            let step = j.try_inverse().ok_or(GeometryError::CollarNotInjective {
                curve: c.name.clone(),
                depth: xn,
            })? * r;
            s -= step.x;
            xn -= step.y;
        }
        Ok((c.wrap(s), xn))
    }

    fn check_injective(&self, n_s: usize, n_depth: usize) -> Result<(), GeometryError> {
        let c = self.domain.curve(self.curve);
        let fail = || GeometryError::CollarNotInjective {
            curve: c.name.clone(),
            depth: self.depth,
        };
        // Every sampled collar point must sit at the right side and distance
        // of the curve, and the sampled Jacobian must keep its sign.
        for i in 0..n_s {
            let s = c.length() * i as f64 / n_s as f64;
            let ch = BoundaryChart::new(self.domain, self.metric, self.curve, s);
            for j in 1..=n_depth {
                let xn = self.depth * j as f64 / n_depth as f64;
                let x = ch.x + ch.n_vec * xn;
                let (_, sd) = self.domain.curve_signed_distance(self.curve, x);
                if sd <= 0.0 {
                    return Err(fail());
                }
                let h = 1e-6 * c.length();
                let js = (self.map(s + h, xn) - self.map(s - h, xn)) / (2.0 * h);
                let det = js.x * ch.n_vec.y - js.y * ch.n_vec.x;
                let det0 = ch.t_vec.x * ch.n_vec.y - ch.t_vec.y * ch.n_vec.x;
                if det * det0 <= 0.0 {
                    return Err(fail());
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DomainPreset;

    fn skewed() -> MetricField {
        MetricField::DiagonalAffine {
            base: [1.0, 1.2],
            slope: [[0.1, 0.05], [-0.05, 0.1]],
            power: 2,
        }
    }

    #[test]
    fn dual_form_is_diagonal_in_collar_frame() {
        let d = DomainPreset::Peanut { lobe: 0.3 }.build().unwrap();
        let m = MetricField::Constant {
            a11: 2.0,
            a12: 0.4,
            a22: 1.0,
        };
        for i in 0..20 {
            let ch = BoundaryChart::new(&d, &m, 0, 0.3 * i as f64);
            let a = m.a(ch.x);
            assert!((ch.e_n.dot(&(a * ch.e_n)) - 1.0).abs() < 1e-12);
            assert!(ch.e_s.dot(&(a * ch.e_n)).abs() < 1e-12);
            assert!((ch.e_s.dot(&(a * ch.e_s)) - ch.h0).abs() < 1e-12);
            let xi = Vec2::new(0.3, -0.7);
            let (xs, xn) = ch.split(xi);
            assert!((ch.compose(xs, xn) - xi).norm() < 1e-12);
        }
    }

    #[test]
    fn slope_matches_closed_form() {
        let d = DomainPreset::Peanut { lobe: 0.3 }.build().unwrap();
        for m in [MetricField::Identity, skewed()] {
            for i in 0..30 {
                let ch = BoundaryChart::new(&d, &m, 0, 0.2 * i as f64);
                let fd = ch.tangential_factor_slope(&m, collar_step(&d, &ch)).unwrap();
                let exact = ch.tangential_factor_slope_exact(&m).unwrap();
                assert!((fd - exact).abs() < 1e-7 * exact.abs().max(1.0), "{fd} vs {exact}");
            }
        }
    }

    #[test]
    fn collar_round_trip() {
        let d = DomainPreset::Annulus { inner: 1.0, outer: 2.0 }.build().unwrap();
        let id = MetricField::Identity;
        let collar = Collar::new(&d, &id, 0).unwrap();
        for i in 0..50 {
            let s = 0.12 * i as f64;
            let xn = collar.depth() * 0.5 * (i % 7) as f64 / 6.0;
            let x = collar.map(s, xn);
            let p = d.boundary_project(x).unwrap();
            assert_eq!(p.curve, 0);
            let ds = (p.s - d.curve(0).wrap(s)).abs();
            assert!(ds.min(d.curve(0).length() - ds) < 1e-8);
            assert!((p.distance - xn).abs() < 1e-8);
        }
        let m = skewed();
        let collar = Collar::new(&d, &m, 1).unwrap();
        for i in 0..30 {
            let s = 0.4 * i as f64;
            let xn = collar.depth() * 0.4;
            let (s2, xn2) = collar.inverse(collar.map(s, xn)).unwrap();
            let ds = (s2 - d.curve(1).wrap(s)).abs();
            assert!(ds.min(d.curve(1).length() - ds) < 1e-8);
            assert!((xn2 - xn).abs() < 1e-8);
        }
    }
}
