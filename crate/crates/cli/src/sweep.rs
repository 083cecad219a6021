//! `sweep`: cartesian parameter grids, one solve per point on a worker pool.

use std::path::Path;

use clap::Args;
use rayon::prelude::*;
use serde::Serialize;

use crate::exit::{CliError, SWEEP_FAILED};
use crate::layers::{parse_axis, Layers, SWEEP_KEYS};
use crate::manifest::{ensure_dir, status_name, write_json, MANIFEST_FILE};
use crate::solve::{self, SolveArgs, SUMMARY_FILE};

pub const INDEX_FILE: &str = "index.json";

#[derive(Args, Clone, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub solve: SolveArgs,
    /// Axis `KEY=v1,v2,...` or `KEY=start:stop:step`; repeat for a cartesian product.
    #[arg(long = "set", value_name = "KEY=VALUES", required = true, allow_hyphen_values = true)]
    pub axes: Vec<String>,
    /// Worker threads [default: all cores].
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Axis {
    pub key: String,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PointRecord {
    pub index: usize,
    pub assignment: Vec<(String, f64)>,
    pub dir: String,
    pub status: String,
    pub exit_code: i32,
    pub message: Option<String>,
    pub manifest: Option<String>,
    pub summary: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepIndex {
    pub axes: Vec<Axis>,
    pub points: Vec<PointRecord>,
    pub succeeded: usize,
    pub failed: usize,
}

pub fn parse_axes(specs: &[String]) -> Result<Vec<Axis>, CliError> {
    let mut axes: Vec<Axis> = Vec::new();
    for spec in specs {
        let (key, values) =
            spec.split_once('=').ok_or_else(|| CliError::usage(format!("expected KEY=VALUES, got `{spec}`")))?;
        let key = key.trim();
        if !SWEEP_KEYS.contains(&key) {
            return Err(CliError::usage(format!("cannot sweep over `{key}`; allowed: {}", SWEEP_KEYS.join(", "))));
        }
        if axes.iter().any(|a| a.key == key) {
            return Err(CliError::usage(format!("`{key}` is swept twice")));
        }
        axes.push(Axis { key: key.to_string(), values: parse_axis(values)? });
    }
    Ok(axes)
}

/// Cartesian product, last axis varying fastest.
pub fn product(axes: &[Axis]) -> Vec<Vec<(String, f64)>> {
    let mut points = vec![Vec::new()];
    for axis in axes {
        points = points
            .into_iter()
            .flat_map(|p| {
                axis.values.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push((axis.key.clone(), v));
                    q
                })
            })
            .collect();
    }
    points
}

fn run_point(
    base: &Layers,
    index: usize,
    assignment: Vec<(String, f64)>,
    out: &Path,
    hash: Option<String>,
) -> PointRecord {
    let mut l = base.clone();
    for (k, v) in &assignment {
        l.set(k, v);
    }
    let dir_name = format!("point-{index:04}");
    let dir = out.join(&dir_name);
    let result = solve::run(&l, &dir, hash, true);
    let manifest = dir.join(MANIFEST_FILE).exists().then(|| format!("{dir_name}/{MANIFEST_FILE}"));
    let (status, exit_code, message, summary) = match result {
        Ok(_) => ("ok".to_string(), 0, None, Some(format!("{dir_name}/{SUMMARY_FILE}"))),
        Err(e) => (status_name(e.code).to_string(), e.code, Some(e.message), None),
    };
    PointRecord { index, assignment, dir: dir_name, status, exit_code, message, manifest, summary }
}

pub fn run(args: &SweepArgs, base: &Layers, out: &Path, hash: Option<String>) -> Result<(), CliError> {
    let axes = parse_axes(&args.axes)?;
    let points = product(&axes);
    ensure_dir(out)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = args.jobs {
        if j == 0 {
            return Err(CliError::usage("--jobs must be at least 1"));
        }
        builder = builder.num_threads(j);
    }
    let pool = builder.build().map_err(|e| CliError::usage(e.to_string()))?;
    let records: Vec<PointRecord> = pool.install(|| {
        points.into_par_iter().enumerate().map(|(i, a)| run_point(base, i, a, out, hash.clone())).collect()
    });
    let succeeded = records.iter().filter(|r| r.exit_code == 0).count();
    let index = SweepIndex { failed: records.len() - succeeded, succeeded, axes, points: records };
    write_json(&out.join(INDEX_FILE), &index)?;
    for r in &index.points {
        let assignment: Vec<String> = r.assignment.iter().map(|(k, v)| format!("{k}={v}")).collect();
        println!("{} {} {}", r.dir, assignment.join(","), r.status);
    }
    if succeeded == 0 {
        return Err(CliError::new(SWEEP_FAILED, "every sweep point failed"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_order() {
        let axes = parse_axes(&["gamma=0,1".to_string(), "b=1:3:1".to_string()]).unwrap();
        let p = product(&axes);
        assert_eq!(p.len(), 6);
        assert_eq!(p[1], vec![("gamma".to_string(), 0.0), ("b".to_string(), 2.0)]);
        assert_eq!(p[3], vec![("gamma".to_string(), 1.0), ("b".to_string(), 1.0)]);
    }

    #[test]
    fn rejects_unknown_and_duplicate_keys() {
        assert!(parse_axes(&["n=1,2".to_string()]).is_err());
        assert!(parse_axes(&["b=1".to_string(), "b=2".to_string()]).is_err());
    }
}
