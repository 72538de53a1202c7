//! Logically rectangular node grids: Cartesian rectangles and polar annuli.
//!
//! Nodes are indexed `(i, j)` with `i` along the first coordinate (`x` or
//! `r`) and `j` along the second (`y` or `theta`); the flat index is
//! `i * n2 + j`. A periodic second direction stores no duplicate column.

use serde::{Deserialize, Serialize};

use super::WaveError;
use crate::geometry::{Domain, DomainPreset, Vec2};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GridKind {
    /// `[x0, x0 + width] x [y0, y0 + height]`; sides are numbered
    /// left 0, right 1, bottom 2, top 3.
    Cartesian {
        origin: [f64; 2],
        width: f64,
        height: f64,
        periodic_y: bool,
    },
    /// Annulus centered at the origin; side 0 is the inner circle and side 1
    /// the outer one, matching the curve order of the annulus preset.
    Polar { inner: f64, outer: f64 },
}

/// Where a boundary node sits and how to reach its collar neighbors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundaryNode {
    pub index: usize,
    pub side: usize,
    /// Arc-length coordinate along the side.
    pub s: f64,
    /// First and second neighbor along the inward grid normal.
    pub inward: [usize; 2],
    /// Spacing along the inward normal.
    pub h_normal: f64,
    /// Arc-length weight of the node in boundary quadrature.
    pub ds: f64,
}

#[derive(Clone, Debug)]
pub struct Grid {
    pub kind: GridKind,
    pub n1: usize,
    pub n2: usize,
    pub h1: f64,
    pub h2: f64,
    pub periodic2: bool,
    pub nodes: Vec<Vec2>,
    pub boundary: Vec<BoundaryNode>,
    pub is_boundary: Vec<bool>,
}

/// Node counts of a grid, by spacing or explicitly.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Resolution {
    /// Target spacing; the polar grid uses it radially and on the inner circle.
    Spacing(f64),
    /// Cell counts `(n1, n2)`.
    Cells([usize; 2]),
}

impl Resolution {
    /// The resolution with every spacing halved.
    pub fn refined(&self) -> Self {
        match *self {
            Resolution::Spacing(h) => Resolution::Spacing(0.5 * h),
            Resolution::Cells([a, b]) => Resolution::Cells([2 * a, 2 * b]),
        }
    }
}

impl Grid {
    pub fn rectangle(
        origin: [f64; 2],
        width: f64,
        height: f64,
        cells: [usize; 2],
        periodic_y: bool,
    ) -> Result<Grid, WaveError> {
        if !(width > 0.0 && height > 0.0) || cells[0] < 4 || cells[1] < 4 {
            return Err(WaveError::BadGrid(format!(
                "rectangle {width} x {height} with cells {cells:?}"
            )));
        }
        let kind = GridKind::Cartesian {
            origin,
            width,
            height,
            periodic_y,
        };
        let h1 = width / cells[0] as f64;
        let h2 = height / cells[1] as f64;
        let n1 = cells[0] + 1;
        let n2 = if periodic_y { cells[1] } else { cells[1] + 1 };
        let mut nodes = Vec::with_capacity(n1 * n2);
        for i in 0..n1 {
            for j in 0..n2 {
                nodes.push(Vec2::new(origin[0] + i as f64 * h1, origin[1] + j as f64 * h2));
            }
        }
        let idx = |i: usize, j: usize| i * n2 + j;
        let mut boundary = Vec::new();
        let edge_weight = |k: usize, n: usize, h: f64, periodic: bool| {
            if !periodic && (k == 0 || k == n - 1) {
                0.5 * h
            } else {
                h
            }
        };
        for j in 0..n2 {
            let ds = edge_weight(j, n2, h2, periodic_y);
            let s = j as f64 * h2;
            boundary.push(BoundaryNode {
                index: idx(0, j),
                side: 0,
                s,
                inward: [idx(1, j), idx(2, j)],
                h_normal: h1,
                ds,
            });
            boundary.push(BoundaryNode {
                index: idx(n1 - 1, j),
                side: 1,
                s,
                inward: [idx(n1 - 2, j), idx(n1 - 3, j)],
                h_normal: h1,
                ds,
            });
        }
        if !periodic_y {
            // Corners stay with the left and right sides.
            for i in 1..n1 - 1 {
                let ds = h1;
                let s = i as f64 * h1;
                boundary.push(BoundaryNode {
                    index: idx(i, 0),
                    side: 2,
                    s,
                    inward: [idx(i, 1), idx(i, 2)],
                    h_normal: h2,
                    ds,
                });
                boundary.push(BoundaryNode {
                    index: idx(i, n2 - 1),
                    side: 3,
                    s,
                    inward: [idx(i, n2 - 2), idx(i, n2 - 3)],
                    h_normal: h2,
                    ds,
                });
            }
        }
        Ok(Self::finish(kind, n1, n2, h1, h2, periodic_y, nodes, boundary))
    }

    pub fn annulus(inner: f64, outer: f64, cells: [usize; 2]) -> Result<Grid, WaveError> {
        if !(inner > 0.0 && outer > inner) || cells[0] < 4 || cells[1] < 8 {
            return Err(WaveError::BadGrid(format!(
                "annulus {inner}..{outer} with cells {cells:?}"
            )));
        }
        let h1 = (outer - inner) / cells[0] as f64;
        let h2 = std::f64::consts::TAU / cells[1] as f64;
        let n1 = cells[0] + 1;
        let n2 = cells[1];
        let mut nodes = Vec::with_capacity(n1 * n2);
        for i in 0..n1 {
            let r = inner + i as f64 * h1;
            for j in 0..n2 {
                let th = j as f64 * h2;
                nodes.push(Vec2::new(r * th.cos(), r * th.sin()));
            }
        }
        let idx = |i: usize, j: usize| i * n2 + j;
        let mut boundary = Vec::new();
        for j in 0..n2 {
            let th = j as f64 * h2;
            boundary.push(BoundaryNode {
                index: idx(0, j),
                side: 0,
                s: inner * th,
                inward: [idx(1, j), idx(2, j)],
                h_normal: h1,
                ds: inner * h2,
            });
        }
        for j in 0..n2 {
            let th = j as f64 * h2;
            boundary.push(BoundaryNode {
                index: idx(n1 - 1, j),
                side: 1,
                s: outer * th,
                inward: [idx(n1 - 2, j), idx(n1 - 3, j)],
                h_normal: h1,
                ds: outer * h2,
            });
        }
        let kind = GridKind::Polar { inner, outer };
        Ok(Self::finish(kind, n1, n2, h1, h2, true, nodes, boundary))
    }

    /// Grid for a domain preset. Only the annulus has a grid-conforming
    /// solver geometry.
    pub fn for_preset(preset: &DomainPreset, resolution: Resolution) -> Result<Grid, WaveError> {
        match *preset {
            DomainPreset::Annulus { inner, outer } => {
                let cells = match resolution {
                    Resolution::Cells(c) => c,
                    Resolution::Spacing(h) => {
                        let nr = ((outer - inner) / h).round().max(4.0) as usize;
                        let nt = (std::f64::consts::TAU * inner / h / 4.0).round().max(2.0) as usize * 4;
                        [nr, nt]
                    }
                };
                Grid::annulus(inner, outer, cells)
            }
            ref other => Err(WaveError::UnsupportedDomain(format!("{other:?}"))),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn finish(
        kind: GridKind,
        n1: usize,
        n2: usize,
        h1: f64,
        h2: f64,
        periodic2: bool,
        nodes: Vec<Vec2>,
        boundary: Vec<BoundaryNode>,
    ) -> Grid {
        let mut is_boundary = vec![false; nodes.len()];
        for b in &boundary {
            is_boundary[b.index] = true;
        }
        Grid {
            kind,
            n1,
            n2,
            h1,
            h2,
            periodic2,
            nodes,
            boundary,
            is_boundary,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n2 + j
    }

    pub fn sides(&self) -> usize {
        match self.kind {
            GridKind::Cartesian { .. } => 4,
            GridKind::Polar { .. } => 2,
        }
    }

    /// Smallest physical distance between neighboring nodes.
    pub fn h_min(&self) -> f64 {
        match self.kind {
            GridKind::Cartesian { .. } => self.h1.min(self.h2),
            GridKind::Polar { inner, .. } => self.h1.min(inner * self.h2),
        }
    }

    /// Boundary nodes on `side` accepted by `keep`.
    pub fn select<F: Fn(f64) -> bool>(&self, side: usize, keep: F) -> Vec<BoundaryNode> {
        self.boundary
            .iter()
            .filter(|b| b.side == side && keep(b.s))
            .copied()
            .collect()
    }

    /// Checks that the grid geometry matches `domain` (same curves and sides).
    pub fn matches(&self, domain: &Domain) -> bool {
        match self.kind {
            GridKind::Polar { inner, outer } => {
                domain.curves().len() == 2
                    && (domain.curve(0).length() - std::f64::consts::TAU * inner).abs() < 1e-9
                    && (domain.curve(1).length() - std::f64::consts::TAU * outer).abs() < 1e-9
            }
            GridKind::Cartesian { .. } => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_sets_partition_the_boundary() {
        for g in [
            Grid::rectangle([0.0, 0.0], 2.0, 1.0, [8, 6], false).unwrap(),
            Grid::rectangle([0.0, 0.0], 2.0, 1.0, [8, 6], true).unwrap(),
            Grid::annulus(1.0, 2.0, [6, 16]).unwrap(),
        ] {
            let mut seen = vec![0; g.len()];
            for b in &g.boundary {
                seen[b.index] += 1;
            }
            assert!(seen.iter().all(|&c| c <= 1));
            let expected = match g.kind {
                GridKind::Cartesian { periodic_y: true, .. } => 2 * g.n2,
                GridKind::Cartesian { .. } => 2 * g.n1 + 2 * g.n2 - 4,
                GridKind::Polar { .. } => 2 * g.n2,
            };
            assert_eq!(g.boundary.len(), expected);
        }
    }

    #[test]
    fn preset_grid_support() {
        let g = Grid::for_preset(
            &DomainPreset::Annulus { inner: 1.0, outer: 2.0 },
            Resolution::Spacing(0.1),
        )
        .unwrap();
        assert_eq!((g.n1, g.n2), (11, 64));
        assert!((g.h_min() - 0.1).abs() < 0.01);
        let d = DomainPreset::Annulus { inner: 1.0, outer: 2.0 }.build().unwrap();
        assert!(g.matches(&d));
        assert!(matches!(
            Grid::for_preset(&DomainPreset::Disc { radius: 1.0 }, Resolution::Spacing(0.1)),
            Err(WaveError::UnsupportedDomain(_))
        ));
    }
}
