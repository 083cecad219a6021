//! Merging of defaults, config-file entries and command-line flags into one key map.

use std::collections::BTreeMap;
use std::path::Path;

use solwave_core::params::parse_key_values;
use solwave_core::{reduce, GroundStateSummary, PhysicalParams, ReducedParams};

use crate::exit::CliError;

/// Keys accepted from config files and sweep assignments.
pub const KNOWN_KEYS: &[&str] = &[
    "b",
    "alpha",
    "beta",
    "gamma",
    "omega",
    "c",
    "nu",
    "A",
    "B",
    "n",
    "L",
    "q",
    "alpha1",
    "alpha2",
    "problem",
    "guess",
    "width",
    "max_iters",
    "tol",
    "seed",
    "perturbation",
    "force",
    "t_final",
    "dt",
    "stride",
];

/// Keys a sweep may vary.
pub const SWEEP_KEYS: &[&str] = &["b", "alpha", "beta", "gamma", "omega", "c", "nu", "A", "B", "q", "alpha1", "alpha2"];

pub const DEFAULT_N: usize = 1 << 14;
pub const DEFAULT_L: f64 = 128.0 * std::f64::consts::PI;

/// Later layers win: file entries over defaults, flags over file entries.
#[derive(Clone, Debug, Default)]
pub struct Layers {
    values: BTreeMap<String, String>,
}

impl Layers {
    pub fn from_file(path: Option<&Path>) -> Result<(Layers, Option<String>), CliError> {
        let Some(path) = path else { return Ok((Layers::default(), None)) };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        let values = parse_key_values(&text).map_err(|e| CliError::usage(e.to_string()))?;
        if let Some(bad) = values.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
            return Err(CliError::usage(format!("unknown config key `{bad}`")));
        }
        Ok((Layers { values }, Some(crate::manifest::sha256_hex(text.as_bytes()))))
    }

    /// Entries of `top` replace existing ones.
    pub fn overlay(&mut self, top: &Layers) {
        for (k, v) in &top.values {
            self.values.insert(k.clone(), v.clone());
        }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.values.insert(key.to_string(), value.to_string());
    }

    pub fn flag<T: std::fmt::Display>(&mut self, key: &str, value: &Option<T>) {
        if let Some(v) = value {
            self.set(key, v);
        }
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.raw(key) {
            None => Ok(None),
            Some(s) => s.parse().map(Some).map_err(|_| CliError::usage(format!("`{key}` has an invalid value `{s}`"))),
        }
    }

    pub fn number(&self, key: &str) -> Result<Option<f64>, CliError> {
        let v: Option<f64> = self.parsed(key)?;
        match v {
            Some(x) if !x.is_finite() => Err(CliError::usage(format!("`{key}` must be finite"))),
            _ => Ok(v),
        }
    }

    pub fn physical(&self) -> Result<PhysicalParams, CliError> {
        let mut p = PhysicalParams::default();
        for key in ["b", "alpha", "beta", "gamma", "omega", "c"] {
            if let Some(v) = self.number(key)? {
                p.set(key, v).map_err(|e| CliError::usage(e.to_string()))?;
            }
        }
        Ok(p)
    }

    /// Reduced coefficients of the physical parameters, with `nu`, `A`, `B` overriding.
    pub fn reduced(&self, physical: &PhysicalParams) -> Result<ReducedParams, CliError> {
        let mut r = reduce(physical);
        if let Some(v) = self.number("nu")? {
            r.frequency = v;
        }
        if let Some(v) = self.number("A")? {
            r.cubic = v;
        }
        if let Some(v) = self.number("B")? {
            r.quintic = v;
        }
        Ok(r)
    }

    pub fn grid(&self, n: usize, half_length: f64) -> Result<(usize, f64), CliError> {
        let n = self.parsed("n")?.unwrap_or(n);
        let l = self.number("L")?.unwrap_or(half_length);
        if n < 8 || !n.is_multiple_of(2) || !(l > 0.0) {
            return Err(CliError::usage(format!("grid needs an even n >= 8 and L > 0, got n = {n}, L = {l}")));
        }
        Ok((n, l))
    }
}

/// Short description used by the one-line summaries.
pub fn summary_line(s: &GroundStateSummary) -> String {
    let f = &s.functionals;
    let constraint = match s.level {
        Some(q) => format!("Q={q:.6e}"),
        None => format!("K={:.3e}", f.nehari),
    };
    format!(
        "regime={} E={:.10e} {} mu={:.6e} residual={:.3e} iterations={}",
        s.regime, f.action, constraint, s.multiplier, s.residual.normalized, s.iterations
    )
}

/// Parses a sweep axis: `v1,v2,...` or `start:stop:step` (stop included up to round-off).
pub fn parse_axis(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::usage(format!("invalid sweep values `{spec}`"));
    if spec.contains(':') {
        let parts: Vec<f64> =
            spec.split(':').map(|s| s.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad())?;
        let [start, stop, step] = parts[..] else { return Err(bad()) };
        if !(step.is_finite() && step != 0.0 && start.is_finite() && stop.is_finite()) || (stop - start) / step < 0.0 {
            return Err(bad());
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        if count > 100_000 {
            return Err(bad());
        }
        Ok((0..count).map(|i| start + i as f64 * step).collect())
    } else {
        spec.split(',')
            .map(|s| s.trim().parse::<f64>().ok().filter(|v| v.is_finite()))
            .collect::<Option<Vec<_>>>()
            .filter(|v| !v.is_empty())
            .ok_or_else(bad)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_forms() {
        assert_eq!(parse_axis("0,0.5,1").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_axis("-2:-1:0.5").unwrap(), vec![-2.0, -1.5, -1.0]);
        assert_eq!(parse_axis("0:1:0.1").unwrap().len(), 11);
        assert!(parse_axis("1:0:1").is_err());
        assert!(parse_axis("a,b").is_err());
        assert!(parse_axis("0:1:0").is_err());
    }

    #[test]
    fn flags_override_file() {
        let mut l = Layers::default();
        l.set("omega", -1.0);
        l.flag("omega", &Some(-2.0));
        l.flag::<f64>("b", &None);
        let p = l.physical().unwrap();
        assert_eq!(p.omega, -2.0);
        assert_eq!(p.b, 0.0);
    }

    #[test]
    fn overrides_replace_reduction() {
        let mut l = Layers::default();
        l.set("omega", -1.25);
        l.set("c", 1.0);
        l.set("b", 1.0);
        let p = l.physical().unwrap();
        let r = l.reduced(&p).unwrap();
        assert_eq!((r.frequency, r.cubic), (-1.0, -1.0));
        l.set("A", 3.0);
        assert_eq!(l.reduced(&p).unwrap().cubic, 3.0);
    }
}
