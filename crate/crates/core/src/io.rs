//! CSV dumps of fields (`x,re,im`) and evolution traces (`t,M,P,Eaction,drift`).

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::evolve::EvolutionTrace;
use crate::spectral::{make_grid, Field, Grid};

pub const FIELD_HEADER: &str = "x,re,im";
pub const TRACE_HEADER: &str = "t,M,P,Eaction,drift";

pub fn field_to_csv(f: &Field) -> String {
    let mut s = String::with_capacity(f.values().len() * 72);
    s.push_str(FIELD_HEADER);
    s.push('\n');
    for (x, v) in f.grid().x().iter().zip(f.values()) {
        let _ = writeln!(s, "{:.16e},{:.16e},{:.16e}", x, v.re, v.im);
    }
    s
}

fn parse_rows(text: &str, header: &str, width: usize) -> Result<Vec<Vec<f64>>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == header => {}
        other => return Err(Error::Parse(format!("expected header `{header}`, found `{}`", other.unwrap_or("")))),
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: std::result::Result<Vec<f64>, _> = line.split(',').map(|c| c.trim().parse::<f64>()).collect();
        let row = row.map_err(|e| Error::Parse(format!("row {}: {e}", i + 2)))?;
        if row.len() != width {
            return Err(Error::Parse(format!("row {}: expected {width} columns, got {}", i + 2, row.len())));
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Reads a field dump, rebuilding the grid from the abscissae.
pub fn field_from_csv(text: &str) -> Result<Field> {
    let rows = parse_rows(text, FIELD_HEADER, 3)?;
    let n = rows.len();
    if n < 2 {
        return Err(Error::Parse("field dump needs at least two rows".into()));
    }
    let dx = rows[1][0] - rows[0][0];
    let half_length = n as f64 * dx / 2.0;
    let grid = make_grid(n, half_length)?;
    let tol = 1e-9 * half_length.max(1.0);
    if (rows[0][0] + half_length).abs() > tol {
        return Err(Error::Parse("abscissae do not start at -L".into()));
    }
    field_on_grid(&grid, &rows)
}

fn field_on_grid(grid: &Arc<Grid>, rows: &[Vec<f64>]) -> Result<Field> {
    let tol = 1e-9 * grid.half_length().max(1.0);
    for (row, x) in rows.iter().zip(grid.x()) {
        if (row[0] - x).abs() > tol {
            return Err(Error::Parse(format!("abscissa {} is off the uniform grid", row[0])));
        }
    }
    Field::new(grid.clone(), rows.iter().map(|r| Complex64::new(r[1], r[2])).collect())
}

pub fn trace_to_csv(t: &EvolutionTrace) -> String {
    let mut s = String::new();
    s.push_str(TRACE_HEADER);
    s.push('\n');
    for i in 0..t.times.len() {
        let _ = writeln!(
            s,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            t.times[i], t.mass[i], t.momentum[i], t.action[i], t.drift[i]
        );
    }
    s
}

pub fn trace_from_csv(text: &str) -> Result<EvolutionTrace> {
    let rows = parse_rows(text, TRACE_HEADER, 5)?;
    let col = |j: usize| rows.iter().map(|r| r[j]).collect::<Vec<f64>>();
    Ok(EvolutionTrace {
        times: col(0),
        mass: col(1),
        momentum: col(2),
        action: col(3),
        drift: col(4),
        hamiltonian: None,
        blowup_time: None,
    })
}

pub fn write_field(path: &Path, f: &Field) -> Result<()> {
    std::fs::write(path, field_to_csv(f))?;
    Ok(())
}

pub fn read_field(path: &Path) -> Result<Field> {
    field_from_csv(&std::fs::read_to_string(path)?)
}

pub fn write_trace(path: &Path, t: &EvolutionTrace) -> Result<()> {
    std::fs::write(path, trace_to_csv(t))?;
    Ok(())
}

pub fn read_trace(path: &Path) -> Result<EvolutionTrace> {
    trace_from_csv(&std::fs::read_to_string(path)?)
}
