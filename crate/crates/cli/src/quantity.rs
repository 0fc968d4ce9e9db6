//! Unit-annotated scalar values in configuration files.
//!
//! Frequencies are cyclic (`omega / 2pi`) and need a unit: `"4.9 MHz"`,
//! `"160 Hz"`, or a ratio to the mechanical frequency, `"0.3 wm"`.
//! Angles are radians when bare, or carry `pi`, `rad` or `deg`.
//! Temperatures need `K`, `mK` or `uK`.

use serde::Deserialize;
use sqzopto::model::units::FrequencyUnit;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Num(f64),
    Text(String),
}

/// How a value is interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    /// Dimensionless number, no unit allowed.
    Plain,
    Frequency,
    Angle,
    /// Returned in millikelvin.
    Temperature,
}

fn split(s: &str) -> Result<(f64, &str), String> {
    let s = s.trim();
    let cut = s.find(|c: char| c.is_whitespace()).unwrap_or(s.len());
    let (num, unit) = (&s[..cut], s[cut..].trim());
    match num.parse::<f64>() {
        Ok(v) => Ok((v, unit)),
        // "pi" alone
        Err(_) if unit.is_empty() => Ok((1.0, num)),
        Err(_) => Err(format!("cannot read a number from '{s}'")),
    }
}

impl Value {
    pub fn convert(&self, kind: Kind, unit: FrequencyUnit) -> Result<f64, String> {
        let v = match (self, kind) {
            (Value::Num(v), Kind::Plain | Kind::Angle) => *v,
            (Value::Num(v), Kind::Frequency) => {
                return Err(format!(
                    "missing unit on frequency {v} (write e.g. \"{v} MHz\" or \"{v} wm\")"
                ))
            }
            (Value::Num(v), Kind::Temperature) => {
                return Err(format!("missing unit on temperature {v} (write e.g. \"{v} mK\")"))
            }
            (Value::Text(s), Kind::Plain) => return Err(format!("expected a plain number, got '{s}'")),
            (Value::Text(s), Kind::Frequency) => {
                let (x, u) = split(s)?;
                match u {
                    "Hz" => unit.from_mhz(x * 1e-6),
                    "kHz" => unit.from_mhz(x * 1e-3),
                    "MHz" => unit.from_mhz(x),
                    "GHz" => unit.from_mhz(x * 1e3),
                    "wm" | "omega_m" => x,
                    "" => return Err(format!("missing unit on frequency '{s}'")),
                    other => {
                        return Err(format!(
                            "unknown frequency unit '{other}' (use Hz, kHz, MHz, GHz or wm)"
                        ))
                    }
                }
            }
            (Value::Text(s), Kind::Angle) => {
                let (x, u) = split(s)?;
                match u {
                    "pi" => x * std::f64::consts::PI,
                    "rad" | "" => x,
                    "deg" => x.to_radians(),
                    other => return Err(format!("unknown angle unit '{other}' (use pi, rad or deg)")),
                }
            }
            (Value::Text(s), Kind::Temperature) => {
                let (x, u) = split(s)?;
                match u {
                    "K" => x * 1e3,
                    "mK" => x,
                    "uK" => x * 1e-3,
                    "" => return Err(format!("missing unit on temperature '{s}'")),
                    other => return Err(format!("unknown temperature unit '{other}' (use K, mK or uK)")),
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err("value is not finite".into())
        }
    }
}

/// A scalar or a two-element array, for per-mechanical-mode keys.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum PerMode {
    One(Value),
    Two(Vec<Value>),
}

impl PerMode {
    pub fn convert(&self, kind: Kind, unit: FrequencyUnit) -> Result<[f64; 2], String> {
        match self {
            PerMode::One(v) => {
                let x = v.convert(kind, unit)?;
                Ok([x, x])
            }
            PerMode::Two(vs) if vs.len() == 2 => Ok([vs[0].convert(kind, unit)?, vs[1].convert(kind, unit)?]),
            PerMode::Two(vs) => Err(format!(
                "expected one value or two (one per mechanical mode), got {}",
                vs.len()
            )),
        }
    }
}
