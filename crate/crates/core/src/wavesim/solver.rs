//! Leapfrog time stepping with strong Dirichlet data.

use serde::{Deserialize, Serialize};

use super::grid::{BoundaryNode, Grid};
use super::operator::Operator;
use super::record::{Snapshot, TraceRecord};
use super::WaveError;
use crate::geometry::Vec2;

/// Boundary values `g(t, side, s)`; zero where the source is off.
pub trait BoundaryDrive: Sync {
    fn value(&self, t: f64, side: usize, s: f64) -> f64;
}

impl<F: Fn(f64, usize, f64) -> f64 + Sync> BoundaryDrive for F {
    fn value(&self, t: f64, side: usize, s: f64) -> f64 {
        self(t, side, s)
    }
}

/// Homogeneous boundary data.
pub struct NoDrive;

impl BoundaryDrive for NoDrive {
    fn value(&self, _: f64, _: usize, _: f64) -> f64 {
        0.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct WaveConfig {
    /// Fraction of the stability limit used for the time step.
    pub cfl: f64,
    /// Explicit time step; checked against the stability limit.
    pub dt: Option<f64>,
    /// Final time.
    pub horizon: f64,
    /// Times at which full fields are kept.
    pub snapshots: Vec<f64>,
}

impl Default for WaveConfig {
    fn default() -> Self {
        WaveConfig {
            cfl: 0.8,
            dt: None,
            horizon: 1.0,
            snapshots: Vec::new(),
        }
    }
}

/// Auxiliary inputs used only to test the scheme against known solutions.
#[derive(Default)]
pub struct TestingInputs<'a> {
    /// Interior forcing `f(t, x)` added to the equation.
    pub forcing: Option<&'a (dyn Fn(f64, Vec2) -> f64 + Sync)>,
    /// Initial displacement and velocity; zero when absent.
    pub initial: Option<(&'a [f64], &'a [f64])>,
}

/// Solution values at two consecutive time levels.
#[derive(Clone, Debug)]
pub struct WaveState {
    pub u_prev: Vec<f64>,
    pub u_curr: Vec<f64>,
    pub t_curr: f64,
    pub dt: f64,
}

/// Largest stable time step `2 / sqrt(bound)` of the interior block.
pub fn stable_dt(grid: &Grid, op: &Operator) -> f64 {
    let interior: Vec<bool> = grid.is_boundary.iter().map(|b| !b).collect();
    2.0 / op.spectral_bound(&interior).sqrt()
}

/// Time step chosen for `config`: `cfl` times the stability limit, shrunk so
/// that an integer number of steps reaches the horizon.
pub fn choose_dt(grid: &Grid, op: &Operator, config: &WaveConfig) -> Result<(f64, usize), WaveError> {
    let limit = stable_dt(grid, op);
    if !(config.cfl > 0.0 && config.cfl <= 0.9) {
        return Err(WaveError::CflViolation {
            dt: config.cfl * limit,
            limit,
        });
    }
    let dt = match config.dt {
        Some(dt) if dt > 0.9 * limit || dt <= 0.0 => {
            return Err(WaveError::CflViolation { dt, limit });
        }
        Some(dt) => dt,
        None => config.cfl * limit,
    };
    let steps = (config.horizon / dt).ceil().max(1.0) as usize;
    Ok((config.horizon / steps as f64, steps))
}

/// Solves `W u'' + K u = W f` with `u = g` on the boundary, recording the
/// discrete energy at half steps and the outward normal derivative on
/// `measurement` at every step.
pub fn run(
    grid: &Grid,
    op: &Operator,
    drive: &dyn BoundaryDrive,
    measurement: &[BoundaryNode],
    config: &WaveConfig,
    testing: &TestingInputs,
) -> Result<TraceRecord, WaveError> {
    let (dt, steps) = choose_dt(grid, op, config)?;
    let n = grid.len();
    let dt2 = dt * dt;
    let mut rec = TraceRecord::new(dt, measurement.to_vec());
    let mut ku = vec![0.0; n];
    let mut state = WaveState {
        u_prev: vec![0.0; n],
        u_curr: vec![0.0; n],
        t_curr: 0.0,
        dt,
    };
    let mut next = vec![0.0; n];
    let mut snaps: Vec<f64> = config.snapshots.clone();
    snaps.sort_by(f64::total_cmp);
    let mut snap_iter = snaps.into_iter().peekable();

    // u at t = -dt, reconstructed by Taylor expansion when initial data exist.
    if let Some((u0, v0)) = testing.initial {
        if u0.len() != n || v0.len() != n {
            return Err(WaveError::BadGrid("initial data length".into()));
        }
        state.u_curr.copy_from_slice(u0);
        op.apply(u0, &mut ku);
        for k in 0..n {
            let f = testing.forcing.map_or(0.0, |f| f(0.0, grid.nodes[k]));
            state.u_prev[k] = u0[k] - dt * v0[k] + 0.5 * dt2 * (f - ku[k] / op.mass[k]);
        }
    }
    rec.push_trace(0.0, &state.u_curr);
    while snap_iter.peek().is_some_and(|&t| t <= 0.5 * dt) {
        rec.snapshots.push(Snapshot {
            t: snap_iter.next().unwrap_or(0.0),
            values: state.u_curr.clone(),
        });
    }

    for step in 0..steps {
        let t = step as f64 * dt;
        let t_next = (step + 1) as f64 * dt;
        op.apply(&state.u_curr, &mut ku);
        for k in 0..n {
            if grid.is_boundary[k] {
                continue;
            }
            let f = testing.forcing.map_or(0.0, |f| f(t, grid.nodes[k]));
            next[k] = 2.0 * state.u_curr[k] - state.u_prev[k] + dt2 * (f - ku[k] / op.mass[k]);
        }
        for b in &grid.boundary {
            next[b.index] = drive.value(t_next, b.side, b.s);
        }
        if let Some(k) = next.iter().position(|v| !v.is_finite()) {
            return Err(WaveError::NanDetected {
                step: step + 1,
                node: k,
            });
        }
        // E = |D_t u|_W^2 + u_{n+1}^T K u_n at t_{n+1/2}.
        let kinetic: f64 = (0..n)
            .map(|k| op.mass[k] * ((next[k] - state.u_curr[k]) / dt).powi(2))
            .sum();
        let potential: f64 = (0..n).map(|k| next[k] * ku[k]).sum();
        rec.energy_times.push(t + 0.5 * dt);
        rec.energy.push(kinetic + potential);
        std::mem::swap(&mut state.u_prev, &mut state.u_curr);
        std::mem::swap(&mut state.u_curr, &mut next);
        state.t_curr = t_next;
        rec.push_trace(t_next, &state.u_curr);
        while snap_iter.peek().is_some_and(|&ts| ts <= t_next + 0.5 * dt) {
            rec.snapshots.push(Snapshot {
                t: t_next,
                values: state.u_curr.clone(),
            });
            snap_iter.next();
        }
    }
    rec.max_abs = rec
        .snapshots
        .iter()
        .flat_map(|s| s.values.iter())
        .chain(state.u_curr.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(rec)
}
