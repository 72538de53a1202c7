//! CSV storage of sampled sources.
//!
//! ```text
//! # curve = 0
//! # curve_length = 6.283185307179586
//! # duration = 2
//! # nt = 129
//! # ns = 64
//! # meta = {"family":"invisible",...}
//! t,s0,s1,...
//! 0,0,0,...
//! ```

use std::io::{BufRead, Write};

use super::{BoundarySource, SourceError, SourceGrid};

pub fn write_source<W: Write>(src: &BoundarySource, mut w: W) -> Result<(), SourceError> {
    writeln!(w, "# curve = {}", src.curve)?;
    writeln!(w, "# curve_length = {:?}", src.curve_length)?;
    writeln!(w, "# duration = {:?}", src.duration)?;
    writeln!(w, "# nt = {}", src.grid.nt)?;
    writeln!(w, "# ns = {}", src.grid.ns)?;
    let meta = serde_json::to_string(&src.meta).map_err(|e| SourceError::Parse(e.to_string()))?;
    writeln!(w, "# meta = {meta}")?;
    write!(w, "t")?;
    for j in 0..src.grid.ns {
        write!(w, ",{:?}", src.s(j))?;
    }
    writeln!(w)?;
    for k in 0..src.grid.nt {
        write!(w, "{:?}", src.t(k))?;
        for j in 0..src.grid.ns {
            write!(w, ",{:?}", src.at(k, j))?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn read_source<R: BufRead>(r: R) -> Result<BoundarySource, SourceError> {
    let bad = |m: &str| SourceError::Parse(m.to_string());
    let mut header = std::collections::HashMap::new();
    let mut values = Vec::new();
    let mut seen_columns = false;
    for line in r.lines() {
        let line = line?;
        if let Some(rest) = line.strip_prefix('#') {
            let (k, v) = rest.split_once('=').ok_or_else(|| bad("header line without '='"))?;
            header.insert(k.trim().to_string(), v.trim().to_string());
        } else if !seen_columns {
            seen_columns = true;
        } else if !line.trim().is_empty() {
            for cell in line.split(',').skip(1) {
                values.push(cell.trim().parse::<f64>().map_err(|e| bad(&e.to_string()))?);
            }
        }
    }
    let get = |k: &str| header.get(k).ok_or_else(|| bad(&format!("missing header field {k}")));
    let num = |k: &str| -> Result<f64, SourceError> { get(k)?.parse().map_err(|_| bad(k)) };
    let int = |k: &str| -> Result<usize, SourceError> { get(k)?.parse().map_err(|_| bad(k)) };
    let grid = SourceGrid {
        nt: int("nt")?,
        ns: int("ns")?,
    };
    if values.len() != grid.nt * grid.ns || grid.nt < 2 {
        return Err(bad("sample count does not match nt x ns"));
    }
    Ok(BoundarySource {
        curve: int("curve")?,
        curve_length: num("curve_length")?,
        duration: num("duration")?,
        grid,
        values,
        meta: serde_json::from_str(get("meta")?).map_err(|e| bad(&e.to_string()))?,
    })
}
