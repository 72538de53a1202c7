//! Conservative discretization of `-div(A grad u)` on a logical grid.
//!
//! The stiffness matrix is the Hessian of the discrete energy
//! `Q(u) = sum_edges c11 (D1 u)^2 + c22 (D2 u)^2 + sum_cells 2 c12 D1u D2u`,
//! where `c = J G^{-1}` is the coefficient tensor in grid coordinates and the
//! cross term uses cell-centered averages. It is symmetric by construction and
//! reduces to the 5-point Laplacian for `A = Id` on a Cartesian grid.

use super::grid::{Grid, GridKind};
use crate::geometry::{MetricField, Vec2};

/// Row-wise 9-point stencil; slot `(di + 1) * 3 + (dj + 1)`.
#[derive(Clone, Debug)]
pub struct Operator {
    pub stiffness: Vec<[f64; 9]>,
    /// Lumped (trapezoid) mass, including the Jacobian.
    pub mass: Vec<f64>,
    n1: usize,
    n2: usize,
    periodic2: bool,
}

/// Coefficient tensor `(c11, c12, c22)` and Jacobian at logical point `(q1, q2)`.
fn coefficients(grid: &Grid, metric: &MetricField, q1: f64, q2: f64) -> ([f64; 3], f64) {
    match grid.kind {
        GridKind::Cartesian { origin, .. } => {
            let a = metric.a(Vec2::new(origin[0] + q1, origin[1] + q2));
            ([a[(0, 0)], a[(0, 1)], a[(1, 1)]], 1.0)
        }
        GridKind::Polar { inner, .. } => {
            let r = inner + q1;
            let (s, c) = q2.sin_cos();
            let a = metric.a(Vec2::new(r * c, r * s));
            let er = Vec2::new(c, s);
            let et = Vec2::new(-s, c);
            let grr = er.dot(&(a * er));
            let grt = er.dot(&(a * et)) / r;
            let gtt = et.dot(&(a * et)) / (r * r);
            ([r * grr, r * grt, r * gtt], r)
        }
    }
}

impl Operator {
    pub fn assemble(grid: &Grid, metric: &MetricField) -> Operator {
        let (n1, n2, h1, h2) = (grid.n1, grid.n2, grid.h1, grid.h2);
        let p2 = grid.periodic2;
        let mut k = vec![[0.0; 9]; grid.len()];
        let cells2 = if p2 { n2 } else { n2 - 1 };
        let wrap = |j: usize| if j == n2 { 0 } else { j };
        // Adds c * (sum_a alpha_a u_a)(sum_b beta_b u_b), symmetrized.
        let mut add = |terms_a: &[((usize, usize), f64)], terms_b: &[((usize, usize), f64)], c: f64| {
            for &((ia, ja), al) in terms_a {
                for &((ib, jb), be) in terms_b {
                    let v = 0.5 * c * al * be;
                    let (row_a, row_b) = (ia * n2 + ja, ib * n2 + jb);
                    k[row_a][slot(ia, ja, ib, jb, n2)] += v;
                    k[row_b][slot(ib, jb, ia, ja, n2)] += v;
                }
            }
        };
        let half_if = |edge: bool| if edge { 0.5 } else { 1.0 };
        // Edges along direction 1.
        for i in 0..n1 - 1 {
            for j in 0..n2 {
                let (c, _) = coefficients(grid, metric, (i as f64 + 0.5) * h1, j as f64 * h2);
                let nu = half_if(!p2 && (j == 0 || j == n2 - 1));
                let d = [((i + 1, j), 1.0), ((i, j), -1.0)];
                add(&d, &d, c[0] * nu * h2 / h1);
            }
        }
        // Edges along direction 2.
        for i in 0..n1 {
            for j in 0..cells2 {
                let (c, _) = coefficients(grid, metric, i as f64 * h1, (j as f64 + 0.5) * h2);
                let nu = half_if(i == 0 || i == n1 - 1);
                let d = [((i, wrap(j + 1)), 1.0), ((i, j), -1.0)];
                add(&d, &d, c[2] * nu * h1 / h2);
            }
        }
        // Cross terms on cells.
        for i in 0..n1 - 1 {
            for j in 0..cells2 {
                let (c, _) = coefficients(grid, metric, (i as f64 + 0.5) * h1, (j as f64 + 0.5) * h2);
                if c[1] == 0.0 {
                    continue;
                }
                let jp = wrap(j + 1);
                let d1 = [((i + 1, j), 0.5), ((i, j), -0.5), ((i + 1, jp), 0.5), ((i, jp), -0.5)];
                let d2 = [((i, jp), 0.5), ((i, j), -0.5), ((i + 1, jp), 0.5), ((i + 1, j), -0.5)];
                add(&d1, &d2, 2.0 * c[1]);
            }
        }
        let mut mass = vec![0.0; grid.len()];
        for i in 0..n1 {
            for j in 0..n2 {
                let (_, jac) = coefficients(grid, metric, i as f64 * h1, j as f64 * h2);
                let nu = half_if(i == 0 || i == n1 - 1) * half_if(!p2 && (j == 0 || j == n2 - 1));
                mass[i * n2 + j] = jac * h1 * h2 * nu;
            }
        }
        Operator {
            stiffness: k,
            mass,
            n1,
            n2,
            periodic2: p2,
        }
    }

    fn neighbors(&self, row: usize) -> [Option<usize>; 9] {
        let (i, j) = (row / self.n2, row % self.n2);
        let mut out = [None; 9];
        for di in 0..3 {
            for dj in 0..3 {
                let ii = i as isize + di as isize - 1;
                let mut jj = j as isize + dj as isize - 1;
                if ii < 0 || ii >= self.n1 as isize {
                    continue;
                }
                if self.periodic2 {
                    jj = jj.rem_euclid(self.n2 as isize);
                } else if jj < 0 || jj >= self.n2 as isize {
                    continue;
                }
                out[di * 3 + dj] = Some(ii as usize * self.n2 + jj as usize);
            }
        }
        out
    }

    /// `(K u)_row`.
    pub fn apply_row(&self, u: &[f64], row: usize) -> f64 {
        let c = &self.stiffness[row];
        self.neighbors(row)
            .iter()
            .zip(c)
            .filter_map(|(n, w)| n.map(|k| w * u[k]))
            .sum()
    }

    pub fn apply(&self, u: &[f64], out: &mut [f64]) {
        for (row, o) in out.iter_mut().enumerate() {
            *o = self.apply_row(u, row);
        }
    }

    /// `u^T K v`, summed in index order.
    pub fn form(&self, u: &[f64], v: &[f64]) -> f64 {
        (0..u.len()).map(|row| u[row] * self.apply_row(v, row)).sum()
    }

    /// Gershgorin bound on the spectrum of `M^{-1} K` over the rows where
    /// `interior` holds.
    pub fn spectral_bound(&self, interior: &[bool]) -> f64 {
        (0..self.stiffness.len())
            .filter(|&r| interior[r])
            .map(|r| self.stiffness[r].iter().map(|c| c.abs()).sum::<f64>() / self.mass[r])
            .fold(0.0, f64::max)
    }

    /// Largest asymmetry `|K_ab - K_ba|` over the interior block.
    pub fn asymmetry(&self, interior: &[bool]) -> f64 {
        let mut worst: f64 = 0.0;
        for row in 0..self.stiffness.len() {
            if !interior[row] {
                continue;
            }
            for (slot_ab, n) in self.neighbors(row).iter().enumerate() {
                let Some(col) = *n else { continue };
                if !interior[col] {
                    continue;
                }
                let back = self
                    .neighbors(col)
                    .iter()
                    .position(|m| *m == Some(row))
                    .map(|s| self.stiffness[col][s])
                    .unwrap_or(0.0);
                worst = worst.max((self.stiffness[row][slot_ab] - back).abs());
            }
        }
        worst
    }
}

/// Stencil slot of node `(ib, jb)` in the row of `(ia, ja)`.
fn slot(ia: usize, ja: usize, ib: usize, jb: usize, n2: usize) -> usize {
    let di = ib as isize - ia as isize;
    let mut dj = jb as isize - ja as isize;
    if dj > 1 {
        dj -= n2 as isize;
    } else if dj < -1 {
        dj += n2 as isize;
    }
    ((di + 1) * 3 + (dj + 1)) as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_metric_gives_five_point_laplacian() {
        let g = Grid::rectangle([0.0, 0.0], 1.0, 1.0, [8, 8], false).unwrap();
        let op = Operator::assemble(&g, &MetricField::Identity);
        let row = g.index(3, 4);
        let s = op.stiffness[row];
        let w = op.mass[row];
        let h2 = g.h1 * g.h1;
        let expected = [0.0, -1.0, 0.0, -1.0, 4.0, -1.0, 0.0, -1.0, 0.0];
        for (a, b) in s.iter().zip(expected) {
            assert!((a / w * h2 - b).abs() < 1e-12);
        }
    }

    #[test]
    fn constants_are_in_the_kernel() {
        let m = MetricField::Constant {
            a11: 1.5,
            a12: 0.2,
            a22: 0.8,
        };
        for g in [
            Grid::rectangle([0.0, 0.0], 1.0, 1.0, [8, 8], false).unwrap(),
            Grid::annulus(1.0, 2.0, [8, 32]).unwrap(),
        ] {
            let op = Operator::assemble(&g, &m);
            let u = vec![1.0; g.len()];
            for row in 0..g.len() {
                assert!(op.apply_row(&u, row).abs() < 1e-12);
            }
            let interior: Vec<bool> = g.is_boundary.iter().map(|b| !b).collect();
            assert!(op.asymmetry(&interior) < 1e-14);
        }
    }

    #[test]
    fn log_r_residual_is_second_order_on_the_annulus() {
        let res = |n: usize| {
            let g = Grid::annulus(1.0, 2.0, [n, 4 * n]).unwrap();
            let op = Operator::assemble(&g, &MetricField::Identity);
            let u: Vec<f64> = g.nodes.iter().map(|x| x.norm().ln()).collect();
            (0..g.len())
                .filter(|&r| !g.is_boundary[r])
                .map(|r| (op.apply_row(&u, r) / op.mass[r]).abs())
                .fold(0.0, f64::max)
        };
        let (a, b) = (res(32), res(64));
        assert!((a / b).log2() > 1.9, "{a} {b}");
    }
}
