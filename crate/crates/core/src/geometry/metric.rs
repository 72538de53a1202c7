//! Coefficient matrix `A(x)` of the wave operator.

use nalgebra::{Matrix2, SymmetricEigen, Vector2};
use serde::{Deserialize, Serialize};

use super::{Aabb, Vec2};

pub type Mat2 = Matrix2<f64>;

/// Symmetric, uniformly positive definite coefficient field `A(x)`.
///
/// Rays travel along geodesics of the inverse matrix `A(x)^-1`; the solver
/// discretizes `div(A grad u)`. Every variant is smooth with closed-form first
/// derivatives.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MetricField {
    /// `A = Id`.
    #[default]
    Identity,
    /// Constant symmetric matrix.
    #[serde(rename_all = "kebab-case")]
    Constant { a11: f64, a12: f64, a22: f64 },
    /// Diagonal matrix with `a_ii(x) = (base_i + slope_i . x)^power`.
    #[serde(rename_all = "kebab-case")]
    DiagonalAffine {
        base: [f64; 2],
        slope: [[f64; 2]; 2],
        power: u32,
    },
    /// Isotropic bump `(1 + amplitude * exp(-|x - center|^2 / width^2)) Id`.
    #[serde(rename_all = "kebab-case")]
    Bump {
        amplitude: f64,
        center: [f64; 2],
        width: f64,
    },
}

impl MetricField {
    pub fn is_identity(&self) -> bool {
        matches!(self, MetricField::Identity)
    }

    pub fn a(&self, x: Vec2) -> Mat2 {
        match self {
            MetricField::Identity => Mat2::identity(),
            MetricField::Constant { a11, a12, a22 } => Mat2::new(*a11, *a12, *a12, *a22),
            MetricField::DiagonalAffine { base, slope, power } => {
                let d = |i: usize| {
                    let lin = base[i] + slope[i][0] * x.x + slope[i][1] * x.y;
                    lin.powi(*power as i32)
                };
                Mat2::new(d(0), 0.0, 0.0, d(1))
            }
            MetricField::Bump {
                amplitude,
                center,
                width,
            } => {
                let c = Vector2::new(center[0], center[1]);
                let r2 = (x - c).norm_squared() / (width * width);
                Mat2::identity() * (1.0 + amplitude * (-r2).exp())
            }
        }
    }

    /// Partial derivatives `[dA/dx1, dA/dx2]`.
    pub fn grad(&self, x: Vec2) -> [Mat2; 2] {
        match self {
            MetricField::Identity | MetricField::Constant { .. } => [Mat2::zeros(); 2],
            MetricField::DiagonalAffine { base, slope, power } => {
                let p = *power as i32;
                let mut out = [Mat2::zeros(); 2];
                for i in 0..2 {
                    let lin = base[i] + slope[i][0] * x.x + slope[i][1] * x.y;
                    let dlin = if p == 0 { 0.0 } else { p as f64 * lin.powi(p - 1) };
                    for (k, o) in out.iter_mut().enumerate() {
                        o[(i, i)] = dlin * slope[i][k];
                    }
                }
                out
            }
            MetricField::Bump {
                amplitude,
                center,
                width,
            } => {
                let c = Vector2::new(center[0], center[1]);
                let d = x - c;
                let w2 = width * width;
                let e = amplitude * (-d.norm_squared() / w2).exp();
                [
                    Mat2::identity() * (-2.0 * d.x / w2 * e),
                    Mat2::identity() * (-2.0 * d.y / w2 * e),
                ]
            }
        }
    }

    /// Directional derivative of `A` along `v`.
    pub fn derivative_along(&self, x: Vec2, v: Vec2) -> Mat2 {
        let g = self.grad(x);
        g[0] * v.x + g[1] * v.y
    }

    pub fn inverse(&self, x: Vec2) -> Mat2 {
        self.a(x).try_inverse().expect("metric must be positive definite")
    }

    /// Smallest and largest eigenvalue of `A(x)`.
    pub fn eigen_bounds_at(&self, x: Vec2) -> (f64, f64) {
        let e = SymmetricEigen::new(self.a(x)).eigenvalues;
        (e.min(), e.max())
    }

    /// Ellipticity bounds sampled on a grid covering `bbox` padded by 10%.
    pub fn ellipticity_bounds(&self, bbox: &Aabb) -> (f64, f64) {
        match self {
            MetricField::Identity => (1.0, 1.0),
            MetricField::Constant { .. } => self.eigen_bounds_at(Vec2::zeros()),
            _ => {
                let b = bbox.padded(0.1);
                let n = 41;
                let mut lo = f64::INFINITY;
                let mut hi = 0.0_f64;
                for i in 0..n {
                    for j in 0..n {
                        let x = Vec2::new(
                            b.min.x + (b.max.x - b.min.x) * i as f64 / (n - 1) as f64,
                            b.min.y + (b.max.y - b.min.y) * j as f64 / (n - 1) as f64,
                        );
                        let (l, h) = self.eigen_bounds_at(x);
                        lo = lo.min(l);
                        hi = hi.max(h);
                    }
                }
                (lo, hi)
            }
        }
    }

    /// Largest asymmetry `|a12 - a21|` seen over the samples; zero for every
    /// variant by construction, kept as a checkable invariant.
    pub fn max_asymmetry(&self, samples: &[Vec2]) -> f64 {
        samples
            .iter()
            .map(|x| {
                let a = self.a(*x);
                (a[(0, 1)] - a[(1, 0)]).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Quadratic form `v^T A(x) v`.
    pub fn quad(&self, x: Vec2, v: Vec2) -> f64 {
        v.dot(&(self.a(x) * v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fd_grad(m: &MetricField, x: Vec2) -> [Mat2; 2] {
        let h = 1e-5;
        let ex = Vec2::new(h, 0.0);
        let ey = Vec2::new(0.0, h);
        [
            (m.a(x + ex) - m.a(x - ex)) / (2.0 * h),
            (m.a(x + ey) - m.a(x - ey)) / (2.0 * h),
        ]
    }

    #[test]
    fn gradients_match_centered_differences() {
        let metrics = [
            MetricField::DiagonalAffine {
                base: [1.0, 1.0],
                slope: [[0.3, 0.1], [0.0, -0.2]],
                power: 2,
            },
            MetricField::Bump {
                amplitude: 0.4,
                center: [0.2, -0.1],
                width: 0.7,
            },
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for m in &metrics {
            for _ in 0..200 {
                let x = Vec2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                let g = m.grad(x);
                let fd = fd_grad(m, x);
                for k in 0..2 {
                    let scale = g[k].norm().max(1e-3);
                    assert!((g[k] - fd[k]).norm() / scale < 1e-5, "{m:?} at {x:?}");
                }
            }
        }
    }

    #[test]
    fn ellipticity_bounds_cover_samples() {
        let m = MetricField::Bump {
            amplitude: 0.5,
            center: [0.0, 0.0],
            width: 0.5,
        };
        let bbox = Aabb::new(Vec2::new(-1.0, -1.0), Vec2::new(1.0, 1.0));
        let (lo, hi) = m.ellipticity_bounds(&bbox);
        assert!(lo > 0.0);
        assert!((hi - 1.5).abs() < 1e-9);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let x = Vec2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let v = Vec2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let q = m.quad(x, v);
            assert!(q >= lo * v.norm_squared() - 1e-12);
            assert!(q <= hi * v.norm_squared() + 1e-12);
        }
        assert_eq!(m.max_asymmetry(&[Vec2::new(0.1, 0.2)]), 0.0);
    }

    #[test]
    fn parses_from_toml() {
        let m: MetricField = toml::from_str("kind = \"constant\"\na11 = 4.0\na12 = 0.0\na22 = 1.0\n").unwrap();
        assert_eq!(m.a(Vec2::zeros()), Mat2::new(4.0, 0.0, 0.0, 1.0));
        let id: MetricField = toml::from_str("kind = \"identity\"").unwrap();
        assert!(id.is_identity());
    }
}
