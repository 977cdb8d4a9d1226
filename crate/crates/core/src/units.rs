//! Logarithm units for entropies and rates.
//!
//! Every rate the crate reports is tagged with one of these. `PerBase` uses
//! logarithms to base `q`, under which the uniform de Bruijn source has
//! entropy rate exactly 1. `PerTauMer` uses base `q^tau`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Unit {
    #[default]
    PerBase,
    Bits,
    #[serde(rename = "per-taumer")]
    PerTauMer,
    Nats,
}

impl Unit {
    /// Natural log of the logarithm base for an alphabet of `q` bases and memory `tau`.
    pub fn ln_base(self, q: u32, tau: u32) -> f64 {
        match self {
            Unit::PerBase => (q as f64).ln(),
            Unit::Bits => std::f64::consts::LN_2,
            Unit::PerTauMer => tau as f64 * (q as f64).ln(),
            Unit::Nats => 1.0,
        }
    }

    pub fn from_nats(self, nats: f64, q: u32, tau: u32) -> f64 {
        nats / self.ln_base(q, tau)
    }

    pub fn to_nats(self, value: f64, q: u32, tau: u32) -> f64 {
        value * self.ln_base(q, tau)
    }

    /// Re-express `value` (given in `self`) in `other`.
    pub fn convert(self, value: f64, other: Unit, q: u32, tau: u32) -> f64 {
        other.from_nats(self.to_nats(value, q, tau), q, tau)
    }

    pub fn tag(self) -> &'static str {
        match self {
            Unit::PerBase => "per-base",
            Unit::Bits => "bits",
            Unit::PerTauMer => "per-taumer",
            Unit::Nats => "nats",
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Unit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per-base" => Ok(Unit::PerBase),
            "bits" => Ok(Unit::Bits),
            "per-taumer" | "per-tau-mer" => Ok(Unit::PerTauMer),
            "nats" => Ok(Unit::Nats),
            other => Err(Error::Config(format!("unknown units '{other}'"))),
        }
    }
}

/// A real value tagged with the unit it is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rate {
    pub value: f64,
    pub unit: Unit,
}

impl Rate {
    pub fn from_nats(nats: f64, unit: Unit, q: u32, tau: u32) -> Self {
        Rate {
            value: unit.from_nats(nats, q, tau),
            unit,
        }
    }

    pub fn nats(nats: f64) -> Self {
        Rate {
            value: nats,
            unit: Unit::Nats,
        }
    }

    pub fn to(self, unit: Unit, q: u32, tau: u32) -> Rate {
        Rate {
            value: self.unit.convert(self.value, unit, q, tau),
            unit,
        }
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.value, self.unit)
    }
}
