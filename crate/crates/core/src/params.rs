//! Equation coefficients, the reduced profile-equation coefficients, and regime tags.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Band around zero inside which the frequency offset counts as zero.
pub const FREQUENCY_ZERO_BAND: f64 = 1e-12;

/// Coefficients of the evolution equation plus the traveling-wave frequency and speed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub b: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub omega: f64,
    pub c: f64,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        PhysicalParams { b: 0.0, alpha: 0.0, beta: 0.0, gamma: 0.0, omega: 0.0, c: 0.0 }
    }
}

impl PhysicalParams {
    pub fn is_finite(&self) -> bool {
        [self.b, self.alpha, self.beta, self.gamma, self.omega, self.c].iter().all(|v| v.is_finite())
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        Some(match key {
            "b" => self.b,
            "alpha" => self.alpha,
            "beta" => self.beta,
            "gamma" => self.gamma,
            "omega" => self.omega,
            "c" => self.c,
            _ => return None,
        })
    }

    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        match key {
            "b" => self.b = value,
            "alpha" => self.alpha = value,
            "beta" => self.beta = value,
            "gamma" => self.gamma = value,
            "omega" => self.omega = value,
            "c" => self.c = value,
            _ => return Err(Error::Parse(format!("unknown parameter key `{key}`"))),
        }
        Ok(())
    }

    /// Reads `key = value` lines; `#` starts a comment, blank lines are skipped.
    /// Keys that are not equation parameters are returned untouched in the second slot.
    pub fn parse_config(text: &str) -> Result<(PhysicalParams, BTreeMap<String, String>)> {
        let entries = parse_key_values(text)?;
        let mut p = PhysicalParams::default();
        let mut rest = BTreeMap::new();
        for (key, value) in entries {
            if p.get(&key).is_some() {
                let v: f64 =
                    value.parse().map_err(|_| Error::Parse(format!("`{key}` expects a number, got `{value}`")))?;
                p.set(&key, v)?;
            } else {
                rest.insert(key, value);
            }
        }
        Ok((p, rest))
    }
}

/// Flat `key = value` parsing shared by the config readers.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) =
            line.split_once('=').ok_or_else(|| Error::Parse(format!("line {}: expected `key = value`", lineno + 1)))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::Parse(format!("line {}: empty key", lineno + 1)));
        }
        out.insert(key.to_string(), value.trim().to_string());
    }
    Ok(out)
}

/// Coefficients of the stationary profile equation
/// `-psi'' - nu psi + A |psi|^2 psi + B |psi|^4 psi + gamma psi |D|(|psi|^2) = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedParams {
    #[serde(rename = "A")]
    pub cubic: f64,
    #[serde(rename = "B")]
    pub quintic: f64,
    #[serde(rename = "G")]
    pub current: f64,
    #[serde(rename = "nu")]
    pub frequency: f64,
    #[serde(rename = "gamma")]
    pub nonlocal: f64,
}

impl ReducedParams {
    /// Direct construction, with the current coefficient set to zero.
    pub fn new(frequency: f64, cubic: f64, quintic: f64, nonlocal: f64) -> ReducedParams {
        ReducedParams { cubic, quintic, current: 0.0, frequency, nonlocal }
    }

    pub fn is_finite(&self) -> bool {
        [self.cubic, self.quintic, self.current, self.frequency, self.nonlocal].iter().all(|v| v.is_finite())
    }

    pub fn frequency_is_zero(&self) -> bool {
        self.frequency.abs() <= FREQUENCY_ZERO_BAND
    }

    pub fn frequency_negative(&self) -> bool {
        self.frequency < -FREQUENCY_ZERO_BAND
    }

    pub fn frequency_nonnegative(&self) -> bool {
        !self.frequency_negative()
    }
}

/// Closed-form reduction to the profile equation.
pub fn reduce(p: &PhysicalParams) -> ReducedParams {
    let PhysicalParams { b, alpha, beta, gamma, omega, c } = *p;
    ReducedParams {
        cubic: -b + c * (alpha - beta) / 2.0,
        quintic: (alpha + beta) * (-3.0 * alpha + 5.0 * beta) / 16.0,
        current: beta - alpha,
        frequency: omega + c * c / 4.0,
        nonlocal: gamma,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RegimeTag {
    Nonexistence1,
    Nonexistence2,
    SubcriticalNehari,
    CriticalNehari,
    FixedMeanFlow,
    FixedQuartic,
    Unclassified,
}

impl RegimeTag {
    pub fn is_nonexistence(self) -> bool {
        matches!(self, RegimeTag::Nonexistence1 | RegimeTag::Nonexistence2)
    }
}

impl fmt::Display for RegimeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RegimeTag::Nonexistence1 => "nonexistence-1",
            RegimeTag::Nonexistence2 => "nonexistence-2",
            RegimeTag::SubcriticalNehari => "subcritical-nehari",
            RegimeTag::CriticalNehari => "critical-nehari",
            RegimeTag::FixedMeanFlow => "fixed-meanflow",
            RegimeTag::FixedQuartic => "fixed-quartic",
            RegimeTag::Unclassified => "unclassified",
        };
        f.write_str(s)
    }
}

/// All matching tags, nonexistence tags first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Regime {
    pub tags: Vec<RegimeTag>,
    pub reason: String,
}

impl Regime {
    pub fn primary(&self) -> RegimeTag {
        self.tags[0]
    }

    pub fn contains(&self, tag: RegimeTag) -> bool {
        self.tags.contains(&tag)
    }

    pub fn is_blocked(&self) -> bool {
        self.primary().is_nonexistence()
    }
}

/// Classifies a reduced parameter point by the sign patterns of the existence and
/// nonexistence results. For the constraint-driven problems the cubic and nonlocal
/// coefficients are outputs, so only the remaining signs are checked.
pub fn classify(r: &ReducedParams) -> Regime {
    let (a, b, g) = (r.cubic, r.quintic, r.nonlocal);
    let neg = r.frequency_negative();
    let zero = r.frequency_is_zero();
    let mut tags = Vec::new();
    let mut reasons = Vec::new();
    if b >= 0.0 && a >= 0.0 && g > 0.0 {
        tags.push(RegimeTag::Nonexistence1);
        reasons.push("B >= 0, A >= 0, gamma > 0: the two integral identities force every solution to vanish");
    }
    if b <= 0.0 && a <= 0.0 && r.frequency_nonnegative() {
        tags.push(RegimeTag::Nonexistence2);
        reasons.push("B <= 0, A <= 0, nu >= 0: the two integral identities force every solution to vanish");
    }
    if neg && b <= 0.0 && g >= 0.0 {
        tags.push(RegimeTag::SubcriticalNehari);
        reasons.push("nu < 0, B <= 0, gamma >= 0: Nehari minimization on the subcritical energy space");
    }
    if zero && a > 0.0 && b < 0.0 && g >= 0.0 {
        tags.push(RegimeTag::CriticalNehari);
        reasons.push("nu = 0, A > 0, B < 0, gamma >= 0: Nehari minimization on the critical energy space");
    }
    if neg && b == 0.0 {
        tags.push(RegimeTag::FixedMeanFlow);
        reasons.push("nu < 0, B = 0: fixed mean-flow constraint, A and gamma recovered from the multiplier (sign of the multiplier reported, not assumed)");
    }
    if zero && b < 0.0 && g >= 0.0 {
        tags.push(RegimeTag::FixedQuartic);
        reasons.push("nu = 0, B < 0, gamma >= 0: fixed quartic constraint, A recovered from the multiplier (sign not known a priori)");
    }
    if tags.is_empty() {
        tags.push(RegimeTag::Unclassified);
        reasons.push("no existence or nonexistence pattern matches");
    }
    Regime { tags, reason: reasons.join("; ") }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduce_examples() {
        let r = reduce(&PhysicalParams { b: 0.0, alpha: 1.0, beta: 1.0, gamma: -1.0, omega: 0.0, c: 3.0 });
        assert_eq!(r.quintic, 0.25);
        assert_eq!(r.current, 0.0);
        assert_eq!(r.cubic, 0.0);
        assert_eq!(r.quintic, r.nonlocal * r.nonlocal / 4.0);

        let r = reduce(&PhysicalParams { b: 1.5, omega: -2.0, c: 2.0, ..Default::default() });
        assert_eq!((r.quintic, r.current, r.cubic, r.frequency), (0.0, 0.0, -1.5, -1.0));

        let r = reduce(&PhysicalParams { alpha: -1.0, c: 2.0, ..Default::default() });
        assert_eq!(r.cubic, -1.0);
        assert_eq!(r.quintic, -3.0 / 16.0);
        assert_eq!(r.current, 1.0);
    }

    #[test]
    fn classify_examples() {
        let reg = classify(&ReducedParams::new(-1.0, 0.0, -1.0, 0.0));
        assert_eq!(reg.primary(), RegimeTag::SubcriticalNehari);
        let reg = classify(&ReducedParams::new(0.5, -1.0, -1.0, 0.0));
        assert_eq!(reg.primary(), RegimeTag::Nonexistence2);
        let reg = classify(&ReducedParams::new(0.0, 1.0, 1.0, 1.0));
        assert_eq!(reg.primary(), RegimeTag::Nonexistence1);
        let reg = classify(&ReducedParams::new(0.0, 1.0, -1.0, 0.0));
        assert_eq!(reg.tags, vec![RegimeTag::CriticalNehari, RegimeTag::FixedQuartic]);
        let reg = classify(&ReducedParams::new(-1.0, -2.0, 0.0, 0.0));
        assert_eq!(reg.tags, vec![RegimeTag::SubcriticalNehari, RegimeTag::FixedMeanFlow]);
        let reg = classify(&ReducedParams::new(1.0, 1.0, -1.0, -1.0));
        assert_eq!(reg.tags, vec![RegimeTag::Unclassified]);
    }

    #[test]
    fn nonexistence_is_listed_first() {
        // B = 0, A = 0, gamma = 1, nu = 0 fits both nonexistence rows and the quartic row fails (B = 0)
        let reg = classify(&ReducedParams::new(0.0, 0.0, 0.0, 1.0));
        assert_eq!(reg.tags, vec![RegimeTag::Nonexistence1, RegimeTag::Nonexistence2]);
        // nu < 0 with gamma > 0, A = B = 0 is both blocked and subcritical
        let reg = classify(&ReducedParams::new(-1.0, 0.0, 0.0, 1.0));
        assert_eq!(reg.primary(), RegimeTag::Nonexistence1);
        assert!(reg.contains(RegimeTag::SubcriticalNehari));
        assert!(reg.is_blocked());
    }

    #[test]
    fn frequency_band() {
        let r = ReducedParams::new(5e-13, 1.0, -1.0, 0.0);
        assert!(r.frequency_is_zero());
        assert_eq!(classify(&r).primary(), RegimeTag::CriticalNehari);
    }

    #[test]
    fn config_parsing() {
        let text = "# sample\nb = 1\nalpha=0.5\n\nomega = -1.25  # trailing\nn = 512\n";
        let (p, rest) = PhysicalParams::parse_config(text).unwrap();
        assert_eq!(p.b, 1.0);
        assert_eq!(p.alpha, 0.5);
        assert_eq!(p.omega, -1.25);
        assert_eq!(rest.get("n").map(String::as_str), Some("512"));
        assert!(PhysicalParams::parse_config("b 1").is_err());
        assert!(PhysicalParams::parse_config("b = x").is_err());
    }

    #[test]
    fn reduced_serializes_with_short_keys() {
        let r = ReducedParams::new(-1.0, 2.0, -0.5, 0.25);
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(json, r#"{"A":2.0,"B":-0.5,"G":0.0,"nu":-1.0,"gamma":0.25}"#);
    }
}
