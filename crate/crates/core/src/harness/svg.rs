//! Minimal SVG line plots.

use std::fmt::Write;

use crate::experiments::DecayTable;
use crate::geometry::{Aabb, BoundaryRegion, Domain, Vec2};
use crate::rayflow::RayPath;

const SIZE: f64 = 480.0;
const PAD: f64 = 20.0;

struct Frame {
    min: Vec2,
    scale: f64,
    height: f64,
}

impl Frame {
    fn new(bbox: &Aabb) -> Self {
        let size = bbox.size();
        let scale = (SIZE - 2.0 * PAD) / size.x.max(size.y);
        Frame {
            min: bbox.min,
            scale,
            height: size.y * scale + 2.0 * PAD,
        }
    }

    fn map(&self, p: Vec2) -> (f64, f64) {
        (
            PAD + (p.x - self.min.x) * self.scale,
            self.height - PAD - (p.y - self.min.y) * self.scale,
        )
    }

    fn polyline(&self, pts: impl Iterator<Item = Vec2>, style: &str) -> String {
        let mut d = String::new();
        for p in pts {
            let (x, y) = self.map(p);
            let _ = write!(d, "{x:.2},{y:.2} ");
        }
        format!("<polyline fill=\"none\" {style} points=\"{}\"/>\n", d.trim_end())
    }
}

fn open(width: f64, height: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" \
         viewBox=\"0 0 {width:.0} {height:.0}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}

/// Domain outline, highlighted regions and ray paths.
pub fn ray_plot(domain: &Domain, regions: &[&BoundaryRegion], paths: &[&RayPath]) -> String {
    let frame = Frame::new(&domain.bounding_box().padded(0.05));
    let mut out = open(SIZE, frame.height);
    for c in domain.curves() {
        let mut pts = c.polyline(400);
        pts.push(pts[0]);
        out += &frame.polyline(pts.into_iter(), "stroke=\"black\" stroke-width=\"1.5\"");
    }
    let colors = ["#d62728", "#ff7f0e", "#2ca02c"];
    for (i, r) in regions.iter().enumerate() {
        let c = domain.curve(r.curve);
        for &(a, len) in r.intervals() {
            let n = 100;
            let pts = (0..=n).map(|k| c.point(a + len.min(c.length()) * k as f64 / n as f64));
            let style = format!(
                "stroke=\"{}\" stroke-width=\"4\" opacity=\"0.6\"",
                colors[i % colors.len()]
            );
            out += &frame.polyline(pts, &style);
        }
    }
    for p in paths {
        out += &frame.polyline(p.samples.iter().map(|s| s.x), "stroke=\"#1f77b4\" stroke-width=\"0.8\"");
    }
    out + "</svg>\n"
}

fn axes_plot(series: &[(&str, Vec<(f64, f64)>)], log_y: bool) -> String {
    let height = 320.0;
    let mut out = open(SIZE, height);
    let pts: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|(_, s)| s.iter().copied())
        .filter(|p| p.1.is_finite() && (!log_y || p.1 > 0.0))
        .collect();
    if pts.is_empty() {
        return out + "</svg>\n";
    }
    let ty = |y: f64| if log_y { y.log10() } else { y };
    let (x0, x1) = pts
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.0), b.max(p.0)));
    let (y0, y1) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| {
        (a.min(ty(p.1)), b.max(ty(p.1)))
    });
    let sx = (SIZE - 3.0 * PAD) / (x1 - x0).max(1e-300);
    let sy = (height - 3.0 * PAD) / (y1 - y0).max(1e-300);
    let map = |x: f64, y: f64| (2.0 * PAD + (x - x0) * sx, height - 2.0 * PAD - (ty(y) - y0) * sy);
    let _ = writeln!(
        out,
        "<path d=\"M{p} {q} H{r} M{p} {q} V{PAD}\" stroke=\"black\" fill=\"none\"/>",
        p = 2.0 * PAD,
        q = height - 2.0 * PAD,
        r = SIZE - PAD
    );
    let colors = ["#1f77b4", "#d62728", "#2ca02c"];
    for (i, (name, s)) in series.iter().enumerate() {
        let mut d = String::new();
        for &(x, y) in s.iter().filter(|p| p.1.is_finite() && (!log_y || p.1 > 0.0)) {
            let (u, v) = map(x, y);
            let _ = write!(d, "{u:.2},{v:.2} ");
            let _ = writeln!(
                out,
                "<circle cx=\"{u:.2}\" cy=\"{v:.2}\" r=\"2\" fill=\"{}\"/>",
                colors[i % 3]
            );
        }
        let _ = writeln!(
            out,
            "<polyline fill=\"none\" stroke=\"{}\" points=\"{}\"/>\n<text x=\"{}\" y=\"{}\" font-size=\"12\">{name}</text>",
            colors[i % 3],
            d.trim_end(),
            3.0 * PAD,
            PAD + 14.0 * i as f64
        );
    }
    out + "</svg>\n"
}

/// Trace norm against `k`, logarithmic in the trace.
pub fn decay_plot(tables: &[(&str, &DecayTable)]) -> String {
    let series: Vec<(&str, Vec<(f64, f64)>)> = tables
        .iter()
        .map(|(name, t)| (*name, t.rows.iter().map(|r| (r.k.log2(), r.trace)).collect()))
        .collect();
    axes_plot(&series, true)
}

pub fn energy_plot(times: &[f64], energy: &[f64]) -> String {
    axes_plot(
        &[("energy", times.iter().copied().zip(energy.iter().copied()).collect())],
        false,
    )
}
