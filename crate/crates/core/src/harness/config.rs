//! Experiment configuration: grids, duplication and channel specs, and the
//! flat `key = value` file format shared with the command line.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::bounds::KernelChoice;
use crate::dmc::ChannelSpec;
use crate::duplication::{make_binomial, make_constant, make_iid, make_uniform, DuplicationDist};
use crate::error::{Error, Result};
use crate::units::Unit;

fn cfg(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

/// Values of a numeric grid: `v1,v2,...` or `lo..hi/step` (inclusive). Integer
/// ranges may omit the step.
pub fn parse_float_grid(s: &str) -> Result<Vec<f64>> {
    let s = s.trim();
    if let Some((range, step)) = s.split_once('/') {
        let (lo, hi) = range
            .split_once("..")
            .ok_or_else(|| cfg(format!("bad range '{s}': expected lo..hi/step")))?;
        let lo: f64 = parse_num(lo)?;
        let hi: f64 = parse_num(hi)?;
        let step: f64 = parse_num(step)?;
        if !(step > 0.0) || hi < lo {
            return Err(cfg(format!("bad range '{s}'")));
        }
        let n = ((hi - lo) / step + 1e-9).floor() as usize;
        if n > 10_000_000 {
            return Err(cfg(format!("range '{s}' has too many points")));
        }
        // rounding keeps printed grid values free of accumulation noise
        return Ok((0..=n)
            .map(|i| ((lo + i as f64 * step) * 1e12).round() / 1e12)
            .collect());
    }
    if let Some((lo, hi)) = s.split_once("..") {
        let lo: f64 = parse_num(lo)?;
        let hi: f64 = parse_num(hi)?;
        if hi < lo || lo.fract() != 0.0 || hi.fract() != 0.0 {
            return Err(cfg(format!(
                "bad range '{s}': non-integer ranges need a step"
            )));
        }
        return Ok((lo as i64..=hi as i64).map(|v| v as f64).collect());
    }
    let v: Vec<f64> = s.split(',').map(parse_num).collect::<Result<_>>()?;
    if v.is_empty() {
        return Err(cfg("empty grid"));
    }
    Ok(v)
}

fn parse_num<T: FromStr>(s: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    s.trim()
        .parse::<T>()
        .map_err(|e| cfg(format!("cannot parse '{}': {e}", s.trim())))
}

/// Integer grid with the same grammar.
pub fn parse_int_grid(s: &str) -> Result<Vec<usize>> {
    parse_float_grid(s)?
        .into_iter()
        .map(|v| {
            if v < 0.0 || v.fract() != 0.0 {
                Err(cfg(format!("'{s}' must list non-negative integers")))
            } else {
                Ok(v as usize)
            }
        })
        .collect()
}

/// A duplication law as written on the command line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum DupSpec {
    Iid(f64),
    Binom(usize, f64),
    Uniform(usize, usize),
    Constant(usize),
    /// JSON file `{support, pmf}`.
    Table(PathBuf),
}

impl DupSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            DupSpec::Iid(_) => "iid",
            DupSpec::Binom(..) => "binom",
            DupSpec::Uniform(..) => "uniform",
            DupSpec::Constant(_) => "constant",
            DupSpec::Table(_) => "table",
        }
    }

    /// Parameter text for the CSV column; commas would break it, so pairs are
    /// joined with a space.
    pub fn param(&self) -> String {
        match self {
            DupSpec::Iid(p) => format!("{p}"),
            DupSpec::Binom(n, p) => format!("{n} {p}"),
            DupSpec::Uniform(lo, hi) => format!("{lo} {hi}"),
            DupSpec::Constant(k) => format!("{k}"),
            DupSpec::Table(p) => p.display().to_string(),
        }
    }

    pub fn build(&self) -> Result<DuplicationDist> {
        match self {
            DupSpec::Iid(p) => make_iid(*p),
            DupSpec::Binom(n, p) => make_binomial(*n, *p),
            DupSpec::Uniform(lo, hi) => make_uniform(*lo, *hi),
            DupSpec::Constant(k) => make_constant(*k),
            DupSpec::Table(path) => {
                let text = std::fs::read_to_string(path)?;
                Ok(serde_json::from_str(&text)?)
            }
        }
    }

    /// Parse one `kind:args` item; `iid` accepts a grid and so may expand.
    pub fn parse_many(s: &str) -> Result<Vec<DupSpec>> {
        let (kind, arg) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| cfg(format!("bad duplication law '{s}': expected kind:args")))?;
        let pair = |a: &str| -> Result<(String, String)> {
            a.split_once(',')
                .map(|(x, y)| (x.to_string(), y.to_string()))
                .ok_or_else(|| cfg(format!("'{s}' needs two comma-separated values")))
        };
        Ok(match kind.trim() {
            "iid" => parse_float_grid(arg)?
                .into_iter()
                .map(DupSpec::Iid)
                .collect(),
            "binom" => {
                let (n, p) = pair(arg)?;
                vec![DupSpec::Binom(parse_num(&n)?, parse_num(&p)?)]
            }
            "uniform" => {
                let (lo, hi) = pair(arg)?;
                vec![DupSpec::Uniform(parse_num(&lo)?, parse_num(&hi)?)]
            }
            "constant" => vec![DupSpec::Constant(parse_num(arg)?)],
            "table" => vec![DupSpec::Table(PathBuf::from(arg.trim()))],
            other => return Err(cfg(format!("unknown duplication kind '{other}'"))),
        })
    }
}

impl fmt::Display for DupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DupSpec::Binom(n, p) => write!(f, "binom:{n},{p}"),
            DupSpec::Uniform(lo, hi) => write!(f, "uniform:{lo},{hi}"),
            other => write!(f, "{}:{}", other.kind(), other.param()),
        }
    }
}

/// Expand `kind[:grid]` channel items; `;` separates items.
pub fn parse_channels(s: &str) -> Result<Vec<ChannelSpec>> {
    let mut out = Vec::new();
    for item in s.split(';').map(str::trim).filter(|x| !x.is_empty()) {
        match item.split_once(':') {
            Some((kind @ ("erasure" | "symmetric"), grid)) => {
                for v in parse_float_grid(grid)? {
                    out.push(format!("{kind}:{v}").parse()?);
                }
            }
            _ => out.push(item.parse()?),
        }
    }
    if out.is_empty() {
        return Err(cfg("empty channel grid"));
    }
    Ok(out)
}

/// Expand `;`-separated duplication items.
pub fn parse_dups(s: &str) -> Result<Vec<DupSpec>> {
    let mut out = Vec::new();
    for item in s.split(';').map(str::trim).filter(|x| !x.is_empty()) {
        out.extend(DupSpec::parse_many(item)?);
    }
    if out.is_empty() {
        return Err(cfg("empty duplication grid"));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    BoundsSweep,
    Simulate,
    CapacityTable,
    TraceDump,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bounds-sweep" => Ok(Mode::BoundsSweep),
            "simulate" => Ok(Mode::Simulate),
            "capacity-table" => Ok(Mode::CapacityTable),
            "trace-dump" => Ok(Mode::TraceDump),
            other => Err(cfg(format!("unknown mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(cfg(format!("unknown format '{other}'"))),
        }
    }
}

/// Which decoder `simulate` runs. `auto` picks burst filling for clean and
/// erasure channels and change-point decoding otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DecoderChoice {
    Auto,
    Clean,
    Changepoint,
}

impl FromStr for DecoderChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(DecoderChoice::Auto),
            "clean" => Ok(DecoderChoice::Clean),
            "changepoint" => Ok(DecoderChoice::Changepoint),
            other => Err(cfg(format!("unknown decoder '{other}'"))),
        }
    }
}

/// Every knob of a harness run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub q: Vec<u32>,
    pub tau: Vec<u32>,
    pub dup: Vec<DupSpec>,
    #[serde(serialize_with = "ser_channels")]
    pub channel: Vec<ChannelSpec>,
    pub m: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub units: Unit,
    pub kernel: KernelChoice,
    /// Change-point false-alarm level; with `trim` it selects custom schedules.
    pub alpha: Option<f64>,
    pub gamma: f64,
    pub trim: Option<usize>,
    pub decoder: DecoderChoice,
    pub out: PathBuf,
    pub format: Format,
    /// Skip grid points before this index and append to existing outputs.
    pub resume_from: usize,
}

fn ser_channels<S: serde::Serializer>(
    v: &[ChannelSpec],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|c| c.to_string()))
}

/// Keys accepted in config files and on the command line.
pub const KEYS: &[&str] = &[
    "mode",
    "q",
    "tau",
    "tau-max",
    "dup",
    "channel",
    "m",
    "trials",
    "seed",
    "units",
    "kernel",
    "alpha",
    "gamma",
    "trim",
    "decoder",
    "out",
    "format",
    "resume-from",
];

/// Parse a flat `key = value` file. `#` starts a comment; underscores in keys
/// are read as dashes.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| cfg(format!("line {}: expected key = value", n + 1)))?;
        let key = k.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(cfg(format!("line {}: unknown key '{}'", n + 1, k.trim())));
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

pub fn load_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    parse_config_text(&std::fs::read_to_string(path)?)
}

impl ExperimentConfig {
    /// Build from key/value pairs; later layers (flags) are merged over
    /// earlier ones (file) by the caller.
    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self> {
        let get = |k: &str| map.get(k).map(String::as_str);
        let mode: Mode = get("mode").ok_or_else(|| cfg("missing mode"))?.parse()?;
        let q: Vec<u32> = parse_int_grid(get("q").unwrap_or("2"))?
            .into_iter()
            .map(|v| v as u32)
            .collect();
        let mut tau: Vec<u32> = parse_int_grid(get("tau").unwrap_or("1"))?
            .into_iter()
            .map(|v| v as u32)
            .collect();
        if let Some(tmax) = get("tau-max") {
            let tmax: u32 = parse_num(tmax)?;
            let lo = tau.iter().copied().min().unwrap_or(1);
            if tmax < lo {
                return Err(cfg("tau-max is below the smallest tau"));
            }
            tau = (lo..=tmax).collect();
        }
        let units: Unit = get("units").unwrap_or("per-base").parse()?;
        if units == Unit::Nats {
            return Err(cfg("units must be per-base, bits or per-taumer"));
        }
        let kernel = match get("kernel") {
            None if mode == Mode::BoundsSweep => KernelChoice::Uniform,
            None => KernelChoice::NoLoop,
            Some("uniform") => KernelChoice::Uniform,
            Some("no-loop") => KernelChoice::NoLoop,
            Some(other) => return Err(cfg(format!("unknown kernel '{other}'"))),
        };
        let trials: usize = parse_num(get("trials").unwrap_or("1000"))?;
        let c = ExperimentConfig {
            mode,
            q,
            tau,
            dup: parse_dups(get("dup").unwrap_or("iid:0.5"))?,
            channel: parse_channels(get("channel").unwrap_or("clean"))?,
            m: parse_int_grid(get("m").unwrap_or("100"))?,
            trials,
            seed: parse_num(get("seed").unwrap_or("0"))?,
            units,
            kernel,
            alpha: get("alpha").map(parse_num).transpose()?,
            gamma: parse_num(get("gamma").unwrap_or("2"))?,
            trim: get("trim").map(parse_num).transpose()?,
            decoder: get("decoder").unwrap_or("auto").parse()?,
            out: PathBuf::from(get("out").unwrap_or("out")),
            format: get("format").unwrap_or("csv").parse()?,
            resume_from: parse_num(get("resume-from").unwrap_or("0"))?,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.q.is_empty() || self.tau.is_empty() || self.m.is_empty() {
            return Err(cfg("grid must be nonempty"));
        }
        if self.q.iter().any(|&q| q < 2) || self.tau.iter().any(|&t| t < 1) {
            return Err(cfg("need q >= 2 and tau >= 1"));
        }
        if self.trials < 1 {
            return Err(cfg("trials must be at least 1"));
        }
        if self.m.contains(&0) {
            return Err(cfg("m must be at least 1"));
        }
        if !(self.gamma > 1.0) {
            return Err(cfg("gamma must exceed 1"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_float_grid("0.1,0.2").unwrap(), vec![0.1, 0.2]);
        let g = parse_float_grid("0..0.05/0.001").unwrap();
        assert_eq!(g.len(), 51);
        assert_eq!(g[3], 0.003);
        assert_eq!(g[50], 0.05);
        assert_eq!(parse_int_grid("1..6").unwrap(), vec![1, 2, 3, 4, 5, 6]);
        assert!(parse_int_grid("1.5").is_err());
        assert!(parse_float_grid("0.5..0.1/0.1").is_err());
    }

    #[test]
    fn dup_and_channel_specs() {
        let d = parse_dups("iid:0.3,0.999;binom:2,0.5").unwrap();
        assert_eq!(
            d,
            vec![
                DupSpec::Iid(0.3),
                DupSpec::Iid(0.999),
                DupSpec::Binom(2, 0.5)
            ]
        );
        assert_eq!(d[2].to_string(), "binom:2,0.5");
        assert_eq!(d[2].param(), "2 0.5");
        let c = parse_channels("clean;erasure:0,0.1;symmetric:0.2").unwrap();
        assert_eq!(c.len(), 4);
        assert_eq!(c[2], ChannelSpec::Erasure(0.1));
        assert!(parse_dups("poisson:3").is_err());
    }

    #[test]
    fn file_then_flags() {
        let mut map =
            parse_config_text("# sweep\nmode = bounds-sweep\nq = 3\ntau_max = 4 # inline\n")
                .unwrap();
        map.insert("q".into(), "2".into());
        let c = ExperimentConfig::from_map(&map).unwrap();
        assert_eq!(c.q, vec![2]);
        assert_eq!(c.tau, vec![1, 2, 3, 4]);
        assert_eq!(c.kernel, KernelChoice::Uniform);
        assert!(parse_config_text("colour = red").is_err());
    }

    #[test]
    fn validation() {
        let base = |k: &str, v: &str| {
            let mut m = BTreeMap::new();
            m.insert("mode".to_string(), "simulate".to_string());
            m.insert(k.to_string(), v.to_string());
            ExperimentConfig::from_map(&m)
        };
        assert!(base("trials", "0").is_err());
        assert!(base("units", "nats").is_err());
        assert!(base("units", "bits").is_ok());
        assert!(base("format", "xml").is_err());
        assert!(base("q", "1").is_err());
    }
}
