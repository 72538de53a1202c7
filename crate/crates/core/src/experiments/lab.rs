//! A scenario resolved into geometry, regions and solver grids.

use std::f64::consts::TAU;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::{ExperimentError, Scenario};
use crate::geometry::{BoundaryRegion, Domain, RegionLabel};
use crate::sgcc::{verify_sgcc, RandomRefinement, SgccRegions, SgccVerdict};
use crate::sources::{sobolev_norm, BoundarySource, SobolevSpec, SourceGrid, SourceMeta};
use crate::wavesim::{
    run, BoundaryNode, Grid, GridKind, Operator, Resolution, TestingInputs, TraceRecord, WaveConfig, WaveError,
};

/// Hex SHA-256 of the JSON encoding of `value`.
pub fn content_hash<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("report types serialize");
    hex::encode(Sha256::digest(&bytes))
}

pub struct Lab {
    pub scenario: Scenario,
    pub domain: Domain,
    pub source: BoundaryRegion,
    pub neighborhood: BoundaryRegion,
    pub measurement: BoundaryRegion,
    pub hash: String,
}

/// Solver grid with its operator and measurement nodes.
pub struct Solver {
    pub grid: Grid,
    pub operator: Operator,
    pub measurement: Vec<BoundaryNode>,
}

impl Solver {
    pub fn cells(&self) -> [usize; 2] {
        [self.grid.n1, self.grid.n2]
    }
}

impl Lab {
    pub fn new(scenario: &Scenario) -> Result<Self, ExperimentError> {
        let t = &scenario.times;
        if !(t.source_window > 0.0 && t.observation > 0.0) {
            return Err(ExperimentError::Config("times must be positive".into()));
        }
        let domain = scenario.domain.build()?;
        let source = scenario.regions.source.build(RegionLabel::Source, &domain)?;
        let measurement = scenario.regions.measurement.build(RegionLabel::Measurement, &domain)?;
        let neighborhood = source.dilated(RegionLabel::Neighborhood, scenario.regions.neighborhood_margin);
        Ok(Lab {
            scenario: scenario.clone(),
            domain,
            source,
            neighborhood,
            measurement,
            hash: content_hash(scenario),
        })
    }

    pub fn horizon(&self) -> f64 {
        self.scenario.times.source_window + self.scenario.times.observation
    }

    pub fn sgcc(&self) -> Result<SgccVerdict, ExperimentError> {
        let tol = &self.scenario.tolerances;
        let mut sampling = tol.sampling.clone();
        if let Some(r) = &mut sampling.random {
            *r = RandomRefinement {
                seed: self.scenario.seed,
                count: r.count,
            };
        }
        let regions = SgccRegions {
            neighborhood: &self.neighborhood,
            source: &self.source,
            measurement: &self.measurement,
        };
        Ok(verify_sgcc(
            &self.domain,
            &self.scenario.metric,
            regions,
            self.scenario.times.observation,
            &sampling,
            &tol.rays,
        )?)
    }

    pub fn solver(&self, resolution: Resolution) -> Result<Solver, ExperimentError> {
        let preset = self
            .scenario
            .domain
            .preset()
            .ok_or_else(|| ExperimentError::Wave(WaveError::UnsupportedDomain("polyline domain".into())))?;
        let grid = Grid::for_preset(preset, resolution)?;
        if !grid.matches(&self.domain) {
            return Err(ExperimentError::Config("solver grid does not match the domain".into()));
        }
        let operator = Operator::assemble(&grid, &self.scenario.metric);
        let m = &self.measurement;
        let measurement = grid.select(m.curve, |s| m.contains(s, 1e-9));
        Ok(Solver {
            grid,
            operator,
            measurement,
        })
    }

    /// Base grid, refined as needed to give `points_per_wavelength` nodes per
    /// dominant wavelength of `meta`.
    pub fn solver_for(&self, meta: &SourceMeta, refine: bool) -> Result<Solver, ExperimentError> {
        let base = self.solver(self.scenario.grid.resolution)?;
        let [need1, need2] = self.required_cells(&base.grid, meta);
        let mut cells = base.cells();
        if refine {
            cells = [2 * cells[0], 2 * cells[1]];
        }
        if need1 <= cells[0] && need2 <= cells[1] && !refine {
            return Ok(base);
        }
        let cells = [cells[0].max(need1), cells[1].max(need2).next_multiple_of(4)];
        self.solver(Resolution::Cells(cells))
    }

    fn required_cells(&self, grid: &Grid, meta: &SourceMeta) -> [usize; 2] {
        let ppw = self.scenario.grid.points_per_wavelength;
        let [tau, xi] = meta.dominant;
        match grid.kind {
            GridKind::Polar { inner, outer } => {
                let curve_len = self.domain.curve(self.source.curve).length();
                let n1 = (ppw * tau * (outer - inner) / TAU).ceil() as usize;
                let n2 = (ppw * xi * curve_len / TAU).max(ppw * tau * outer).ceil() as usize;
                [n1, n2]
            }
            GridKind::Cartesian { width, height, .. } => {
                let k = tau.max(xi);
                [
                    (ppw * k * width / TAU).ceil() as usize,
                    (ppw * k * height / TAU).ceil() as usize,
                ]
            }
        }
    }

    /// Points per wavelength check of a solver grid against source metadata.
    pub fn resolution_gate(&self, solver: &Solver, meta: &SourceMeta) -> Result<(), ExperimentError> {
        let [need1, need2] = self.required_cells(&solver.grid, meta);
        if solver.grid.n1 < need1 || solver.grid.n2 < need2 {
            return Err(ExperimentError::ResolutionGate {
                have: solver.cells(),
                need: [need1, need2],
            });
        }
        Ok(())
    }

    /// Source sampling matched to a solver: nodes of the source curve are
    /// source samples, and time is sampled finely enough for interpolation.
    pub fn source_grid(&self, solver: &Solver, family: SourceGrid, tau: f64) -> SourceGrid {
        let on_curve = solver.grid.select(self.source.curve, |_| true).len().max(1);
        let over = self.scenario.grid.source_oversampling.max(1);
        let ns = (on_curve * over).max(family.ns).next_multiple_of(on_curve);
        let m = self.scenario.times.source_window;
        let nt = ((self.scenario.grid.source_time_points * tau * m / TAU).ceil() as usize + 1).max(family.nt);
        SourceGrid { nt, ns }
    }

    pub fn run(
        &self,
        solver: &Solver,
        g: &BoundarySource,
        snapshots: Vec<f64>,
    ) -> Result<TraceRecord, ExperimentError> {
        let config = WaveConfig {
            cfl: self.scenario.grid.cfl,
            dt: None,
            horizon: self.horizon(),
            snapshots,
        };
        Ok(run(
            &solver.grid,
            &solver.operator,
            &g.drive(),
            &solver.measurement,
            &config,
            &TestingInputs::default(),
        )?)
    }

    pub fn norm(&self, g: &BoundarySource, exponent: f64) -> Result<f64, ExperimentError> {
        let spec = SobolevSpec {
            band_tolerance: self.scenario.tolerances.band,
            ..SobolevSpec::full(exponent)
        };
        Ok(sobolev_norm(g, &spec)?)
    }
}
