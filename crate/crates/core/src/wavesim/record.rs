//! Energy histories and normal-derivative traces of a run.

use std::io::{self, Write};

use serde::Serialize;

use super::grid::BoundaryNode;

#[derive(Clone, Debug, Serialize)]
pub struct Snapshot {
    pub t: f64,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceRecord {
    pub dt: f64,
    /// Half-step times of the energy samples.
    pub energy_times: Vec<f64>,
    pub energy: Vec<f64>,
    pub nodes: Vec<BoundaryNode>,
    /// Times of the trace rows, `k * dt`.
    pub times: Vec<f64>,
    /// Outward normal derivative, one row per time, one column per node.
    pub trace: Vec<Vec<f64>>,
    pub snapshots: Vec<Snapshot>,
    /// Largest `|u|` seen in snapshots and the final state.
    pub max_abs: f64,
}

impl TraceRecord {
    pub(crate) fn new(dt: f64, nodes: Vec<BoundaryNode>) -> Self {
        TraceRecord {
            dt,
            energy_times: Vec::new(),
            energy: Vec::new(),
            nodes,
            times: Vec::new(),
            trace: Vec::new(),
            snapshots: Vec::new(),
            max_abs: 0.0,
        }
    }

    pub(crate) fn push_trace(&mut self, t: f64, u: &[f64]) {
        let row = self.nodes.iter().map(|b| normal_derivative(b, u)).collect();
        self.times.push(t);
        self.trace.push(row);
    }

    pub fn max_energy(&self) -> f64 {
        self.energy.iter().copied().fold(0.0, f64::max)
    }

    /// `L^2` norm of the trace over all recorded times and nodes: trapezoid in
    /// time, node arc-length weights in space.
    pub fn trace_l2(&self) -> f64 {
        self.trace_l2_window(f64::NEG_INFINITY, f64::INFINITY)
    }

    /// Same, restricted to rows with `t0 <= t <= t1`.
    pub fn trace_l2_window(&self, t0: f64, t1: f64) -> f64 {
        let rows: Vec<usize> = (0..self.times.len())
            .filter(|&k| self.times[k] >= t0 && self.times[k] <= t1)
            .collect();
        let mut sum = 0.0;
        for (pos, &k) in rows.iter().enumerate() {
            let w = if pos == 0 || pos + 1 == rows.len() { 0.5 } else { 1.0 };
            let row: f64 = self.trace[k].iter().zip(&self.nodes).map(|(v, b)| b.ds * v * v).sum();
            sum += w * self.dt * row;
        }
        sum.sqrt()
    }

    /// Writes a metadata header followed by CSV blocks for the energy history
    /// and the trace samples.
    pub fn write_csv<W: Write>(&self, meta: &[(&str, String)], mut w: W) -> io::Result<()> {
        for (k, v) in meta {
            writeln!(w, "# {k}: {v}")?;
        }
        writeln!(w, "# dt: {:e}", self.dt)?;
        writeln!(w, "# block: energy")?;
        writeln!(w, "t,energy")?;
        for (t, e) in self.energy_times.iter().zip(&self.energy) {
            writeln!(w, "{t:e},{e:e}")?;
        }
        writeln!(w, "# block: trace")?;
        let header: Vec<String> = self
            .nodes
            .iter()
            .map(|b| format!("side{}:s={:.6}", b.side, b.s))
            .collect();
        writeln!(w, "t,{}", header.join(","))?;
        for (t, row) in self.times.iter().zip(&self.trace) {
            let vals: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            writeln!(w, "{t:e},{}", vals.join(","))?;
        }
        Ok(())
    }

    /// Flat dump of a snapshot with a shape header.
    pub fn write_snapshot<W: Write>(snap: &Snapshot, shape: [usize; 2], mut w: W) -> io::Result<()> {
        writeln!(w, "# t: {:e}", snap.t)?;
        writeln!(w, "# shape: {} {}", shape[0], shape[1])?;
        for v in &snap.values {
            writeln!(w, "{v:e}")?;
        }
        Ok(())
    }
}

/// Second-order one-sided outward derivative `(3 u0 - 4 u1 + u2) / (2 h)`.
pub fn normal_derivative(b: &BoundaryNode, u: &[f64]) -> f64 {
    (3.0 * u[b.index] - 4.0 * u[b.inward[0]] + u[b.inward[1]]) / (2.0 * b.h_normal)
}
