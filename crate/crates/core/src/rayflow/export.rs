//! Plain-text export of a ray path.
//!
//! ```text
//! # t x1 x2 tau xi1 xi2 regime
//! 0.000000000000e0 1.0e0 0.0e0 ... interior
//! ...
//! # events
//! # kind t x1 x2 curve s flagged
//! HyperbolicReflection 1.2e0 ...
//! ```

use std::io::{self, Write};

use thiserror::Error;

use super::{EventKind, RayPath};

#[derive(Debug, Error)]
pub enum PathRecordError {
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn kind_name(kind: &EventKind) -> String {
    match kind {
        EventKind::RegionHit { label, gliding } => {
            format!("RegionHit({label}{})", if *gliding { ",gliding" } else { "" })
        }
        other => format!("{other:?}"),
    }
}

pub fn write_path<W: Write>(path: &RayPath, mut w: W) -> Result<(), PathRecordError> {
    writeln!(w, "# t x1 x2 tau xi1 xi2 regime")?;
    for s in &path.samples {
        writeln!(
            w,
            "{:e} {:e} {:e} {:e} {:e} {:e} {}",
            s.t,
            s.x.x,
            s.x.y,
            s.tau,
            s.xi.x,
            s.xi.y,
            if s.gliding { "gliding" } else { "interior" }
        )?;
    }
    writeln!(w, "# events")?;
    writeln!(w, "# kind t x1 x2 curve s flagged")?;
    for e in &path.events {
        let (curve, s) = e
            .boundary
            .map(|b| (b.curve.to_string(), format!("{:e}", b.s)))
            .unwrap_or_else(|| ("-".into(), "-".into()));
        writeln!(
            w,
            "{} {:e} {:e} {:e} {} {} {}",
            kind_name(&e.kind),
            e.time,
            e.position.x,
            e.position.y,
            curve,
            s,
            e.flagged
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{DomainPreset, MetricField};
    use crate::rayflow::{trace, InitialCondition, Lift, RayContext, RayTolerances};
    use crate::symbols::BoundaryCovector;

    #[test]
    fn samples_round_trip_through_text() {
        let d = DomainPreset::Disc { radius: 1.0 }.build().unwrap();
        let id = MetricField::Identity;
        let ctx = RayContext::new(&d, &id, RayTolerances::default());
        let init = InitialCondition::Boundary {
            covector: BoundaryCovector::new(0, 0.0, 0.0, 1.0, 0.3),
            lift: Lift::Inward,
        };
        let path = trace(&ctx, &init, 3.0, &[]);
        let mut buf = Vec::new();
        write_path(&path, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let rows: Vec<Vec<f64>> = text
            .lines()
            .take_while(|l| !l.starts_with("# events"))
            .filter(|l| !l.starts_with('#'))
            .map(|l| l.split_whitespace().take(6).map(|v| v.parse().unwrap()).collect())
            .collect();
        assert_eq!(rows.len(), path.samples.len());
        for (r, s) in rows.iter().zip(&path.samples) {
            assert_eq!(r[0], s.t);
            assert_eq!(r[1], s.x.x);
            assert_eq!(r[5], s.xi.y);
        }
        assert!(text.contains("HyperbolicReflection"));
        assert!(text.contains("TimeExpired"));
    }
}
