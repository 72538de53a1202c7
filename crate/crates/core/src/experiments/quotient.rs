//! Observability quotients and fitted energy / trace constants.

use serde::Serialize;

use super::lab::{Lab, Solver};
use super::ExperimentError;
use crate::sources::{
    admissible_time_only, glancing_family, invisible_family, AdmissibleSpec, BoundarySource, GlancingSpec,
    InvisibleSpec, SourceFamily, SourceMeta, SpatialWindow, TimeProfile,
};
use crate::wavesim::Resolution;

/// Which source to build once the solver grid is known.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourcePlan {
    Admissible(TimeProfile),
    Invisible { k: f64 },
    Glancing { j: u32, k: f64 },
}

impl SourcePlan {
    fn window(&self, lab: &Lab) -> SpatialWindow {
        let s = &lab.scenario.source;
        let ramp = match self {
            SourcePlan::Admissible(_) => s.admissible.window_ramp,
            SourcePlan::Invisible { .. } => s.invisible.window_ramp,
            SourcePlan::Glancing { .. } => s.glancing.as_ref().map_or(0.2, |g| g.window_ramp),
        };
        SpatialWindow::from_region(&lab.source, ramp)
    }

    fn admissible_spec(&self, lab: &Lab, profile: &TimeProfile) -> AdmissibleSpec {
        let fam = &lab.scenario.source.admissible;
        AdmissibleSpec {
            duration: lab.scenario.times.source_window,
            profile: profile.clone(),
            window: self.window(lab),
            kappa: fam.kappa.unwrap_or(0.25 * profile.dominant_tau()),
        }
    }

    fn invisible_spec(&self, lab: &Lab) -> InvisibleSpec {
        let fam = &lab.scenario.source.invisible;
        InvisibleSpec {
            base: fam.base,
            cone: fam.cone,
            taper: fam.taper,
            duration: lab.scenario.times.source_window,
            profile: fam.profile.clone(),
            window: self.window(lab),
            exponent: fam.exponent,
            leak_tolerance: fam.leak_tolerance,
        }
    }

    fn glancing_spec(&self, lab: &Lab) -> Result<GlancingSpec, ExperimentError> {
        let fam = lab
            .scenario
            .source
            .glancing
            .as_ref()
            .ok_or_else(|| ExperimentError::Config("no [source.glancing] section".into()))?;
        Ok(GlancingSpec {
            xi0: fam.xi0,
            rate: fam.rate,
            duration: lab.scenario.times.source_window,
            profile: fam.profile.clone(),
            window: self.window(lab),
            exponent: fam.exponent,
            leak_tolerance: fam.leak_tolerance,
        })
    }

    /// Frequencies `(tau, xi)` the solver and source grids must resolve.
    pub fn dominant(&self, lab: &Lab) -> Result<[f64; 2], ExperimentError> {
        Ok(match self {
            SourcePlan::Admissible(p) => {
                let spec = self.admissible_spec(lab, p);
                [p.dominant_tau(), spec.kappa]
            }
            SourcePlan::Invisible { k } => {
                let b = lab.scenario.source.invisible.base;
                [k * b[0].abs(), k * b[1].abs()]
            }
            SourcePlan::Glancing { k, .. } => {
                let xi = self.glancing_spec(lab)?.xi0.abs();
                [k * xi, k * xi]
            }
        })
    }

    pub fn solver(&self, lab: &Lab, refine: bool) -> Result<Solver, ExperimentError> {
        let meta = SourceMeta::new(SourceFamily::Custom, self.dominant(lab)?);
        lab.solver_for(&meta, refine)
    }

    pub fn build(&self, lab: &Lab, solver: &Solver) -> Result<BoundarySource, ExperimentError> {
        let (domain, metric, curve) = (&lab.domain, &lab.scenario.metric, lab.source.curve);
        let ppw = lab.scenario.grid.points_per_wavelength;
        let [tau, _] = self.dominant(lab)?;
        Ok(match self {
            SourcePlan::Admissible(p) => {
                let spec = self.admissible_spec(lab, p);
                let grid = lab.source_grid(solver, spec.grid_for(ppw), 1.5 * tau);
                admissible_time_only(domain, metric, curve, &spec, grid)?
            }
            SourcePlan::Invisible { k } => {
                let spec = self.invisible_spec(lab);
                let grid = lab.source_grid(solver, spec.grid_for(*k, ppw), tau);
                invisible_family(domain, metric, curve, &spec, *k, grid)?
            }
            SourcePlan::Glancing { j, k } => {
                let spec = self.glancing_spec(lab)?;
                let probe = spec.member(*j, 1.0).grid_for(*k, ppw);
                let grid = lab.source_grid(solver, probe, tau);
                glancing_family(domain, metric, curve, &spec, *j, *k, grid)?
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuotientRecord {
    /// Space-time `H^1` norm of the source.
    pub h1: f64,
    pub l2: f64,
    /// `L^2` norm of the normal derivative over the measurement region and
    /// the whole observation window.
    pub trace: f64,
    pub quotient: Option<f64>,
    /// `(trace + l2) / h1`.
    pub relaxed: Option<f64>,
    /// Zero source: no quotient is defined.
    pub degenerate: bool,
    pub max_energy: f64,
    pub cells: [usize; 2],
    pub dt: f64,
    pub scenario_hash: String,
    pub source: SourceMeta,
}

pub fn observability_quotient(
    lab: &Lab,
    solver: &Solver,
    g: &BoundarySource,
) -> Result<QuotientRecord, ExperimentError> {
    lab.resolution_gate(solver, &g.meta)?;
    let rec = lab.run(solver, g, Vec::new())?;
    let trace = rec.trace_l2_window(0.0, lab.horizon());
    let degenerate = g.max_abs() == 0.0;
    let (h1, l2) = if degenerate {
        (0.0, 0.0)
    } else {
        (lab.norm(g, 1.0)?, lab.norm(g, 0.0)?)
    };
    let (quotient, relaxed) = if degenerate {
        (None, None)
    } else {
        (Some(trace / h1), Some((trace + l2) / h1))
    };
    Ok(QuotientRecord {
        h1,
        l2,
        trace,
        quotient,
        relaxed,
        degenerate,
        max_energy: rec.max_energy(),
        cells: solver.cells(),
        dt: rec.dt,
        scenario_hash: lab.hash.clone(),
        source: g.meta.clone(),
    })
}

/// Discrete constants of the energy and trace bounds at one resolution.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegularityFit {
    pub cells: [usize; 2],
    pub h1: f64,
    pub max_energy: f64,
    pub trace: f64,
    /// `sup_t E(t) / ||g||_{H^1}^2`.
    pub energy_constant: f64,
    /// `||d_n u||_{L^2} / ||g||_{H^1}`.
    pub trace_constant: f64,
}

/// Fits at the base resolution and `levels - 1` successive refinements.
pub fn regularity_fits(lab: &Lab, plan: &SourcePlan, levels: usize) -> Result<Vec<RegularityFit>, ExperimentError> {
    let mut solver = plan.solver(lab, false)?;
    let mut out = Vec::with_capacity(levels);
    for level in 0..levels {
        if level > 0 {
            let [a, b] = solver.cells();
            solver = lab.solver(Resolution::Cells([2 * a, 2 * b]))?;
        }
        let g = plan.build(lab, &solver)?;
        let q = observability_quotient(lab, &solver, &g)?;
        out.push(RegularityFit {
            cells: q.cells,
            h1: q.h1,
            max_energy: q.max_energy,
            trace: q.trace,
            energy_constant: q.max_energy / (q.h1 * q.h1),
            trace_constant: q.trace / q.h1,
        });
    }
    Ok(out)
}

/// Largest relative deviation from the mean.
pub fn spread(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    values.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max) / mean.abs()
}
