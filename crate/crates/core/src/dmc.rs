//! Memoryless channels from tau-mer inputs to a finite output alphabet.
//!
//! Inputs are tau-mer codes `0..Q` with `Q = q^tau`. Outputs are integers
//! `0..n_outputs`; for the erasure channel the erasure symbol is index `Q`.
//! Structured kinds evaluate rows on demand and use closed forms wherever the
//! symmetry of the channel allows; only general channels are stored densely.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::info::{self, binary_entropy, entropy};
use crate::units::{Rate, Unit};

/// Largest input alphabet a general channel may store densely.
pub const MAX_DENSE_INPUTS: usize = 4096;
const ROW_TOL: f64 = 1e-12;
const BA_GAP: f64 = 1e-10;
const BA_MAX_ITER: usize = 1_000_000;
pub const CHERNOFF_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DmcKind {
    Clean,
    Erasure(f64),
    Symmetric(f64),
    General,
}

impl DmcKind {
    pub fn name(&self) -> &'static str {
        match self {
            DmcKind::Clean => "clean",
            DmcKind::Erasure(_) => "erasure",
            DmcKind::Symmetric(_) => "symmetric",
            DmcKind::General => "general",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dmc {
    n_inputs: usize,
    n_outputs: usize,
    kind: DmcKind,
    /// Row-major dense matrix, general kind only.
    dense: Vec<f64>,
}

impl Dmc {
    pub fn clean(n_inputs: usize) -> Result<Self> {
        check_inputs(n_inputs)?;
        Ok(Dmc {
            n_inputs,
            n_outputs: n_inputs,
            kind: DmcKind::Clean,
            dense: Vec::new(),
        })
    }

    /// Erases each input independently with probability `eps`.
    pub fn erasure(n_inputs: usize, eps: f64) -> Result<Self> {
        check_inputs(n_inputs)?;
        check_prob(eps)?;
        Ok(Dmc {
            n_inputs,
            n_outputs: n_inputs + 1,
            kind: DmcKind::Erasure(eps),
            dense: Vec::new(),
        })
    }

    /// Keeps the input with probability `1 - p`, otherwise outputs one of
    /// the other inputs uniformly.
    pub fn symmetric(n_inputs: usize, p: f64) -> Result<Self> {
        check_inputs(n_inputs)?;
        check_prob(p)?;
        Ok(Dmc {
            n_inputs,
            n_outputs: n_inputs,
            kind: DmcKind::Symmetric(p),
            dense: Vec::new(),
        })
    }

    pub fn general(rows: &[Vec<f64>]) -> Result<Self> {
        let n_inputs = rows.len();
        check_inputs(n_inputs)?;
        if n_inputs > MAX_DENSE_INPUTS {
            return Err(invalid(format!(
                "general channel with {n_inputs} inputs exceeds the dense limit {MAX_DENSE_INPUTS}"
            )));
        }
        let n_outputs = rows[0].len();
        if n_outputs == 0 {
            return Err(invalid("channel needs at least one output"));
        }
        let mut dense = Vec::with_capacity(n_inputs * n_outputs);
        for (z, row) in rows.iter().enumerate() {
            if row.len() != n_outputs {
                return Err(invalid(format!(
                    "row {z} has {} entries, expected {n_outputs}",
                    row.len()
                )));
            }
            if row.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
                return Err(invalid(format!(
                    "row {z} has a negative or non-finite entry"
                )));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > ROW_TOL {
                return Err(invalid(format!("row {z} sums to {s}")));
            }
            dense.extend_from_slice(row);
        }
        Ok(Dmc {
            n_inputs,
            n_outputs,
            kind: DmcKind::General,
            dense,
        })
    }

    /// Channel for tau-mers over `q` bases described by `spec`.
    pub fn from_spec(spec: &ChannelSpec, q: u32, tau: u32) -> Result<Self> {
        let n = crate::alphabet::TauMerSpace::new(q, tau)?.n_states();
        let w = match spec {
            ChannelSpec::Clean => Dmc::clean(n)?,
            ChannelSpec::Erasure(e) => Dmc::erasure(n, *e)?,
            ChannelSpec::Symmetric(p) => Dmc::symmetric(n, *p)?,
            ChannelSpec::General(path) => {
                let text = std::fs::read_to_string(path)?;
                let w: Dmc = serde_json::from_str(&text)?;
                if w.n_inputs != n {
                    return Err(invalid(format!(
                        "channel file has {} inputs but q^tau = {n}",
                        w.n_inputs
                    )));
                }
                w
            }
        };
        Ok(w)
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn n_outputs(&self) -> usize {
        self.n_outputs
    }

    pub fn kind(&self) -> DmcKind {
        self.kind
    }

    /// Index of the erasure output, if this is an erasure channel.
    pub fn erasure_symbol(&self) -> Option<usize> {
        matches!(self.kind, DmcKind::Erasure(_)).then_some(self.n_inputs)
    }

    /// `W(y | z)`.
    #[inline]
    pub fn prob(&self, z: usize, y: usize) -> f64 {
        let q = self.n_inputs;
        match self.kind {
            DmcKind::Clean => (y == z) as u8 as f64,
            DmcKind::Erasure(e) => {
                if y == q {
                    e
                } else if y == z {
                    1.0 - e
                } else {
                    0.0
                }
            }
            DmcKind::Symmetric(p) => {
                if y == z {
                    1.0 - p
                } else {
                    p / (q - 1) as f64
                }
            }
            DmcKind::General => self.dense[z * self.n_outputs + y],
        }
    }

    pub fn row(&self, z: usize) -> Vec<f64> {
        (0..self.n_outputs).map(|y| self.prob(z, y)).collect()
    }

    fn check_input(&self, z: usize) -> Result<()> {
        if z >= self.n_inputs {
            return Err(Error::IndexOutOfRange {
                index: z,
                size: self.n_inputs,
            });
        }
        Ok(())
    }

    fn check_pair(&self, z: usize, z2: usize) -> Result<()> {
        self.check_input(z)?;
        self.check_input(z2)?;
        if z == z2 {
            return Err(Error::UndefinedPair(z));
        }
        Ok(())
    }

    /// Draw an output for input `z`.
    pub fn apply<R: Rng + ?Sized>(&self, z: usize, rng: &mut R) -> Result<usize> {
        self.check_input(z)?;
        Ok(self.apply_unchecked(z, rng))
    }

    #[inline]
    pub fn apply_unchecked<R: Rng + ?Sized>(&self, z: usize, rng: &mut R) -> usize {
        match self.kind {
            DmcKind::Clean => z,
            DmcKind::Erasure(e) => {
                if rng.random::<f64>() < e {
                    self.n_inputs
                } else {
                    z
                }
            }
            DmcKind::Symmetric(p) => {
                if rng.random::<f64>() < p {
                    let j = rng.random_range(0..self.n_inputs - 1);
                    if j >= z {
                        j + 1
                    } else {
                        j
                    }
                } else {
                    z
                }
            }
            DmcKind::General => {
                let row = &self.dense[z * self.n_outputs..(z + 1) * self.n_outputs];
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let mut last = 0;
                for (y, &p) in row.iter().enumerate() {
                    if p > 0.0 {
                        acc += p;
                        last = y;
                        if u < acc {
                            return y;
                        }
                    }
                }
                last
            }
        }
    }

    /// The overlap `sum_y sqrt(W(y|z) W(y|z'))` for a structured channel, where
    /// it is the same for every pair.
    fn structured_beta(&self) -> Option<f64> {
        match self.kind {
            DmcKind::Clean => Some(0.0),
            DmcKind::Erasure(e) => Some(e),
            DmcKind::Symmetric(p) => Some(symmetric_overlap(p, self.n_inputs)),
            DmcKind::General => None,
        }
    }

    pub fn pairwise_bhattacharyya(&self, z: usize, z2: usize) -> Result<f64> {
        self.check_pair(z, z2)?;
        Ok(self.beta_unchecked(z, z2))
    }

    fn beta_unchecked(&self, z: usize, z2: usize) -> f64 {
        match self.structured_beta() {
            Some(b) => b,
            None => {
                let n = self.n_outputs;
                info::bhattacharyya(
                    &self.dense[z * n..(z + 1) * n],
                    &self.dense[z2 * n..(z2 + 1) * n],
                )
                .min(1.0)
            }
        }
    }

    /// `sum_{z != z'} beta(z, z')^k`.
    pub fn rho_k(&self, k: u32) -> f64 {
        let q = self.n_inputs as f64;
        match self.structured_beta() {
            Some(b) => q * (q - 1.0) * b.powi(k as i32),
            None => {
                let mut acc = 0.0;
                for z in 0..self.n_inputs {
                    for z2 in z + 1..self.n_inputs {
                        acc += 2.0 * self.beta_unchecked(z, z2).powi(k as i32);
                    }
                }
                acc
            }
        }
    }

    pub fn rho(&self) -> f64 {
        self.rho_k(1)
    }

    /// `(1 / (Q - 1)) sum_{z != z'} sqrt(pi(z) pi(z')) beta(z, z')^k`.
    pub fn zg_k(&self, pi: &[f64], k: u32) -> Result<f64> {
        check_distribution(pi, self.n_inputs)?;
        let q = self.n_inputs as f64;
        match self.structured_beta() {
            Some(b) => {
                let s: f64 = pi.iter().map(|p| p.sqrt()).sum();
                let total: f64 = pi.iter().sum();
                Ok(b.powi(k as i32) * (s * s - total).max(0.0) / (q - 1.0))
            }
            None => {
                let mut acc = 0.0;
                for z in 0..self.n_inputs {
                    if pi[z] == 0.0 {
                        continue;
                    }
                    for z2 in z + 1..self.n_inputs {
                        acc += 2.0
                            * (pi[z] * pi[z2]).sqrt()
                            * self.beta_unchecked(z, z2).powi(k as i32);
                    }
                }
                Ok(acc / (q - 1.0))
            }
        }
    }

    pub fn zg(&self, pi: &[f64]) -> Result<f64> {
        self.zg_k(pi, 1)
    }

    pub fn kl(&self, z: usize, z2: usize) -> Result<f64> {
        self.check_pair(z, z2)?;
        Ok(info::kl_divergence(&self.row(z), &self.row(z2)))
    }

    pub fn chernoff_distance(&self, z: usize, z2: usize) -> Result<f64> {
        self.check_pair(z, z2)?;
        Ok(info::chernoff(&self.row(z), &self.row(z2), CHERNOFF_TOL).distance)
    }

    /// Smallest KL divergence and Chernoff distance over ordered input pairs.
    pub fn min_pair_divergences(&self) -> (f64, f64) {
        if self.structured_beta().is_some() {
            let kl = info::kl_divergence(&self.row(0), &self.row(1));
            let c = info::chernoff(&self.row(0), &self.row(1), CHERNOFF_TOL).distance;
            return (kl, c);
        }
        let mut kl = f64::INFINITY;
        let mut c = f64::INFINITY;
        for z in 0..self.n_inputs {
            for z2 in 0..self.n_inputs {
                if z != z2 {
                    let (a, b) = (self.row(z), self.row(z2));
                    kl = kl.min(info::kl_divergence(&a, &b));
                    c = c.min(info::chernoff(&a, &b, CHERNOFF_TOL).distance);
                }
            }
        }
        (kl, c)
    }

    /// Whether every pair of rows differs.
    pub fn rows_distinct(&self) -> bool {
        let q = self.n_inputs as f64;
        match self.kind {
            DmcKind::Clean => true,
            DmcKind::Erasure(e) => e < 1.0,
            DmcKind::Symmetric(p) => (p - (q - 1.0) / q).abs() > 1e-15,
            DmcKind::General => {
                let n = self.n_outputs;
                for z in 0..self.n_inputs {
                    for z2 in z + 1..self.n_inputs {
                        if self.dense[z * n..(z + 1) * n] == self.dense[z2 * n..(z2 + 1) * n] {
                            return false;
                        }
                    }
                }
                true
            }
        }
    }

    /// Output law under input law `pi`.
    pub fn output_distribution(&self, pi: &[f64]) -> Vec<f64> {
        let q = self.n_inputs;
        match self.kind {
            DmcKind::Clean => pi.to_vec(),
            DmcKind::Erasure(e) => {
                let mut out: Vec<f64> = pi.iter().map(|p| p * (1.0 - e)).collect();
                out.push(e * pi.iter().sum::<f64>());
                out
            }
            DmcKind::Symmetric(p) => {
                let total: f64 = pi.iter().sum();
                let off = p / (q - 1) as f64;
                pi.iter()
                    .map(|&x| x * (1.0 - p) + (total - x) * off)
                    .collect()
            }
            DmcKind::General => {
                let mut out = vec![0.0; self.n_outputs];
                for (z, &pz) in pi.iter().enumerate() {
                    if pz > 0.0 {
                        for (y, o) in out.iter_mut().enumerate() {
                            *o += pz * self.dense[z * self.n_outputs + y];
                        }
                    }
                }
                out
            }
        }
    }

    fn row_entropy(&self, z: usize) -> f64 {
        let q = self.n_inputs as f64;
        match self.kind {
            DmcKind::Clean => 0.0,
            DmcKind::Erasure(e) => binary_entropy(e),
            DmcKind::Symmetric(p) => {
                binary_entropy(p) + if p > 0.0 { p * (q - 1.0).ln() } else { 0.0 }
            }
            DmcKind::General => entropy(&self.dense[z * self.n_outputs..(z + 1) * self.n_outputs]),
        }
    }

    /// `H(Z | Y)` in nats when `Z ~ pi`, via `H(Z) + H(Y | Z) - H(Y)`.
    pub fn cond_entropy_input_given_output(&self, pi: &[f64]) -> Result<f64> {
        check_distribution(pi, self.n_inputs)?;
        let hyz: f64 = pi
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(z, &p)| p * self.row_entropy(z))
            .sum();
        let v = entropy(pi) + hyz - entropy(&self.output_distribution(pi));
        Ok(v.max(0.0))
    }

    /// Closed-form capacity in nats for structured kinds.
    pub fn closed_form_capacity(&self) -> Option<f64> {
        let q = self.n_inputs as f64;
        match self.kind {
            DmcKind::Clean => Some(q.ln()),
            DmcKind::Erasure(e) => Some((1.0 - e) * q.ln()),
            DmcKind::Symmetric(_) => Some((q.ln() - self.row_entropy(0)).max(0.0)),
            DmcKind::General => None,
        }
    }

    /// Capacity in nats: closed form for structured kinds, Blahut-Arimoto otherwise.
    pub fn capacity_nats(&self) -> Result<f64> {
        match self.closed_form_capacity() {
            Some(c) => Ok(c),
            None => Ok(blahut_arimoto(self)?.capacity),
        }
    }

    pub fn capacity(&self, unit: Unit, q: u32, tau: u32) -> Result<Rate> {
        Ok(Rate::from_nats(self.capacity_nats()?, unit, q, tau))
    }

    pub fn spec(&self) -> Option<ChannelSpec> {
        match self.kind {
            DmcKind::Clean => Some(ChannelSpec::Clean),
            DmcKind::Erasure(e) => Some(ChannelSpec::Erasure(e)),
            DmcKind::Symmetric(p) => Some(ChannelSpec::Symmetric(p)),
            DmcKind::General => None,
        }
    }
}

/// Overlap of two rows of the `Q`-ary symmetric channel:
/// `2 sqrt(p (1 - p) / (Q - 1)) + p (Q - 2) / (Q - 1)`.
pub fn symmetric_overlap(p: f64, n_inputs: usize) -> f64 {
    let q = n_inputs as f64;
    (2.0 * (p * (1.0 - p) / (q - 1.0)).sqrt() + p * (q - 2.0) / (q - 1.0)).min(1.0)
}

fn check_inputs(n: usize) -> Result<()> {
    if n < 2 {
        return Err(invalid("channel needs at least two inputs"));
    }
    Ok(())
}

fn check_prob(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("channel parameter {p} outside [0, 1]")));
    }
    Ok(())
}

fn check_distribution(pi: &[f64], n: usize) -> Result<()> {
    if pi.len() != n {
        return Err(invalid(format!(
            "distribution has {} entries, expected {n}",
            pi.len()
        )));
    }
    if pi.iter().any(|&p| !(p >= 0.0)) {
        return Err(invalid("distribution has a negative entry"));
    }
    let s: f64 = pi.iter().sum();
    if (s - 1.0).abs() > 1e-9 {
        return Err(invalid(format!("distribution sums to {s}")));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct BlahutArimoto {
    /// Midpoint of the final bracket, in nats.
    pub capacity: f64,
    pub lower: f64,
    pub upper: f64,
    pub input: Vec<f64>,
    pub iterations: usize,
}

/// Blahut-Arimoto iteration until the upper and lower capacity bounds agree
/// to `1e-10` nats.
pub fn blahut_arimoto(w: &Dmc) -> Result<BlahutArimoto> {
    let n = w.n_inputs;
    let rows: Vec<Vec<f64>> = (0..n).map(|z| w.row(z)).collect();
    let mut r = vec![1.0 / n as f64; n];
    let mut c = vec![0.0; n];
    let (mut lower, mut upper) = (0.0, f64::INFINITY);
    for it in 1..=BA_MAX_ITER {
        let out = {
            let mut o = vec![0.0; w.n_outputs];
            for (z, row) in rows.iter().enumerate() {
                for (y, &p) in row.iter().enumerate() {
                    o[y] += r[z] * p;
                }
            }
            o
        };
        for (z, row) in rows.iter().enumerate() {
            let d: f64 = row
                .iter()
                .zip(&out)
                .filter(|(&p, _)| p > 0.0)
                .map(|(&p, &o)| p * (p / o).ln())
                .sum();
            c[z] = d.exp();
        }
        let s: f64 = r.iter().zip(&c).map(|(a, b)| a * b).sum();
        lower = s.ln();
        upper = c.iter().cloned().fold(f64::NEG_INFINITY, f64::max).ln();
        if upper - lower < BA_GAP {
            return Ok(BlahutArimoto {
                capacity: 0.5 * (lower + upper),
                lower,
                upper,
                input: r,
                iterations: it,
            });
        }
        for (rz, cz) in r.iter_mut().zip(&c) {
            *rz *= cz / s;
        }
    }
    Err(Error::NotConverged {
        what: "Blahut-Arimoto",
        iterations: BA_MAX_ITER,
        residual: upper - lower,
    })
}

/// How a channel is named on the command line and in sweep output.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelSpec {
    Clean,
    Erasure(f64),
    Symmetric(f64),
    /// A JSON file holding `{n_inputs, n_outputs, rows}`.
    General(String),
}

impl ChannelSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            ChannelSpec::Clean => "clean",
            ChannelSpec::Erasure(_) => "erasure",
            ChannelSpec::Symmetric(_) => "symmetric",
            ChannelSpec::General(_) => "general",
        }
    }

    pub fn param(&self) -> String {
        match self {
            ChannelSpec::Clean => String::new(),
            ChannelSpec::Erasure(x) | ChannelSpec::Symmetric(x) => format!("{x}"),
            ChannelSpec::General(p) => p.clone(),
        }
    }
}

impl fmt::Display for ChannelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelSpec::Clean => f.write_str("clean"),
            other => write!(f, "{}:{}", other.kind(), other.param()),
        }
    }
}

impl FromStr for ChannelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k.trim(), Some(a.trim())),
            None => (s.trim(), None),
        };
        let num = |a: Option<&str>| -> Result<f64> {
            a.ok_or_else(|| Error::Config(format!("channel '{kind}' needs a parameter")))?
                .parse::<f64>()
                .map_err(|e| Error::Config(format!("bad channel parameter in '{s}': {e}")))
        };
        match kind {
            "clean" => Ok(ChannelSpec::Clean),
            "erasure" => Ok(ChannelSpec::Erasure(num(arg)?)),
            "symmetric" => Ok(ChannelSpec::Symmetric(num(arg)?)),
            "general" => Ok(ChannelSpec::General(
                arg.ok_or_else(|| Error::Config("general channel needs a path".into()))?
                    .to_string(),
            )),
            other => Err(Error::Config(format!("unknown channel kind '{other}'"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum DmcJson {
    Dense {
        n_inputs: usize,
        n_outputs: usize,
        rows: Vec<Vec<f64>>,
    },
    Structured {
        kind: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        param: Option<f64>,
        n_inputs: usize,
    },
}

impl Serialize for Dmc {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let j = match self.kind {
            DmcKind::General => DmcJson::Dense {
                n_inputs: self.n_inputs,
                n_outputs: self.n_outputs,
                rows: (0..self.n_inputs).map(|z| self.row(z)).collect(),
            },
            DmcKind::Clean => DmcJson::Structured {
                kind: "clean".into(),
                param: None,
                n_inputs: self.n_inputs,
            },
            DmcKind::Erasure(x) | DmcKind::Symmetric(x) => DmcJson::Structured {
                kind: self.kind.name().into(),
                param: Some(x),
                n_inputs: self.n_inputs,
            },
        };
        j.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Dmc {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = match DmcJson::deserialize(d)? {
            DmcJson::Dense {
                n_inputs,
                n_outputs,
                rows,
            } => {
                if rows.len() != n_inputs || rows.iter().any(|r| r.len() != n_outputs) {
                    return Err(D::Error::custom(
                        "row shape disagrees with n_inputs/n_outputs",
                    ));
                }
                Dmc::general(&rows)
            }
            DmcJson::Structured {
                kind,
                param,
                n_inputs,
            } => match (kind.as_str(), param) {
                ("clean", _) => Dmc::clean(n_inputs),
                ("erasure", Some(e)) => Dmc::erasure(n_inputs, e),
                ("symmetric", Some(p)) => Dmc::symmetric(n_inputs, p),
                (k, _) => return Err(D::Error::custom(format!("bad channel kind '{k}'"))),
            },
        };
        r.map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::trace_rng;

    fn random_general(n_in: usize, n_out: usize, seed: u64) -> Dmc {
        let mut rng = trace_rng(seed, 0);
        let rows: Vec<Vec<f64>> = (0..n_in)
            .map(|_| {
                let r: Vec<f64> = (0..n_out).map(|_| rng.random::<f64>() + 0.01).collect();
                let s: f64 = r.iter().sum();
                r.into_iter().map(|x| x / s).collect()
            })
            .collect();
        // renormalize to exact sums
        let rows: Vec<Vec<f64>> = rows
            .into_iter()
            .map(|mut r| {
                let s: f64 = r.iter().sum();
                let last = r.len() - 1;
                r[last] += 1.0 - s;
                r
            })
            .collect();
        Dmc::general(&rows).unwrap()
    }

    #[test]
    fn apply_examples() {
        let mut rng = trace_rng(3, 0);
        let c = Dmc::clean(16).unwrap();
        assert!((0..16).all(|z| c.apply(z, &mut rng).unwrap() == z));
        let e = Dmc::erasure(16, 1.0).unwrap();
        assert!((0..16).all(|z| e.apply(z, &mut rng).unwrap() == 16));
        let s = Dmc::symmetric(16, 0.0).unwrap();
        assert!((0..16).all(|z| s.apply(z, &mut rng).unwrap() == z));
        assert!(c.apply(16, &mut rng).is_err());
    }

    #[test]
    fn structured_overlaps_match_direct_sums() {
        for w in [
            Dmc::erasure(9, 0.3).unwrap(),
            Dmc::symmetric(9, 0.2).unwrap(),
            Dmc::clean(9).unwrap(),
        ] {
            let direct = info::bhattacharyya(&w.row(2), &w.row(5));
            assert!((w.pairwise_bhattacharyya(2, 5).unwrap() - direct).abs() < 1e-14);
        }
        assert_eq!(
            Dmc::erasure(9, 0.3)
                .unwrap()
                .pairwise_bhattacharyya(0, 1)
                .unwrap(),
            0.3
        );
        assert!(matches!(
            Dmc::clean(4).unwrap().pairwise_bhattacharyya(1, 1),
            Err(Error::UndefinedPair(1))
        ));
    }

    #[test]
    fn rho_for_erasure_views() {
        let w = Dmc::erasure(9, 0.2).unwrap();
        for k in 1..5 {
            assert!((w.rho_k(k) - 72.0 * 0.2f64.powi(k as i32)).abs() < 1e-12);
        }
        let c = Dmc::clean(9).unwrap();
        let pi = vec![1.0 / 9.0; 9];
        assert_eq!((c.rho(), c.zg(&pi).unwrap()), (0.0, 0.0));
    }

    #[test]
    fn uniform_zg_identity_on_random_channels() {
        for seed in 0..5 {
            let w = random_general(6, 4, seed);
            let pi = vec![1.0 / 6.0; 6];
            let zg = w.zg(&pi).unwrap();
            assert!((zg - w.rho() / (5.0 * 6.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn structured_zg_matches_general_sum() {
        let pi = [0.1, 0.2, 0.3, 0.15, 0.25];
        for w in [
            Dmc::erasure(5, 0.4).unwrap(),
            Dmc::symmetric(5, 0.3).unwrap(),
        ] {
            let g = Dmc::general(&(0..5).map(|z| w.row(z)).collect::<Vec<_>>()).unwrap();
            for k in 1..4 {
                assert!((w.zg_k(&pi, k).unwrap() - g.zg_k(&pi, k).unwrap()).abs() < 1e-12);
                assert!((w.rho_k(k) - g.rho_k(k)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn capacities() {
        let ln2 = std::f64::consts::LN_2;
        let w = Dmc::erasure(16, 0.25).unwrap();
        assert!((w.capacity(Unit::PerTauMer, 4, 2).unwrap().value - 0.75).abs() < 1e-15);
        assert!(
            (Dmc::clean(16)
                .unwrap()
                .capacity(Unit::PerTauMer, 4, 2)
                .unwrap()
                .value
                - 1.0)
                .abs()
                < 1e-15
        );
        let bsc = Dmc::symmetric(2, 0.11).unwrap();
        let want = 1.0 - binary_entropy(0.11) / ln2;
        let g = Dmc::general(&[bsc.row(0), bsc.row(1)]).unwrap();
        let ba = blahut_arimoto(&g).unwrap();
        assert!((ba.capacity / ln2 - want).abs() < 1e-8);
        assert!((want - 0.5).abs() < 1e-3);
        for w in [
            Dmc::erasure(4, 0.3).unwrap(),
            Dmc::symmetric(5, 0.2).unwrap(),
        ] {
            let ba = blahut_arimoto(&w).unwrap();
            assert!((ba.capacity - w.closed_form_capacity().unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn chernoff_and_kl() {
        let w = Dmc::general(&[vec![0.9, 0.1], vec![0.1, 0.9]]).unwrap();
        let c = w.chernoff_distance(0, 1).unwrap();
        assert!((c - (-(2.0 * 0.09f64.sqrt()).ln())).abs() < 1e-9);
        assert!(w.kl(0, 1).unwrap() >= c);
        assert!(Dmc::clean(4)
            .unwrap()
            .chernoff_distance(0, 1)
            .unwrap()
            .is_infinite());
        assert!(Dmc::erasure(4, 0.5)
            .unwrap()
            .kl(0, 1)
            .unwrap()
            .is_infinite());
    }

    #[test]
    fn input_given_output_entropy() {
        let pi = [0.1, 0.2, 0.3, 0.4];
        let e = Dmc::erasure(4, 0.35).unwrap();
        let h = e.cond_entropy_input_given_output(&pi).unwrap();
        assert!((h - 0.35 * entropy(&pi)).abs() < 1e-12);
        // direct joint evaluation
        for w in [e, Dmc::symmetric(4, 0.2).unwrap()] {
            let mut hzy = 0.0;
            for (z, &pz) in pi.iter().enumerate() {
                for y in 0..w.n_outputs() {
                    let j = pz * w.prob(z, y);
                    if j > 0.0 {
                        hzy -= j * j.ln();
                    }
                }
            }
            let direct = hzy - entropy(&w.output_distribution(&pi));
            assert!((w.cond_entropy_input_given_output(&pi).unwrap() - direct).abs() < 1e-12);
        }
        assert_eq!(
            Dmc::clean(4)
                .unwrap()
                .cond_entropy_input_given_output(&pi)
                .unwrap(),
            0.0
        );
    }

    #[test]
    fn spec_parse_and_json() {
        assert_eq!(
            "erasure:0.2".parse::<ChannelSpec>().unwrap(),
            ChannelSpec::Erasure(0.2)
        );
        assert_eq!("clean".parse::<ChannelSpec>().unwrap(), ChannelSpec::Clean);
        assert!("erasure".parse::<ChannelSpec>().is_err());
        assert!("bogus:1".parse::<ChannelSpec>().is_err());
        let w = Dmc::symmetric(4, 0.1).unwrap();
        let js = serde_json::to_string(&w).unwrap();
        assert_eq!(js, r#"{"kind":"symmetric","param":0.1,"n_inputs":4}"#);
        assert_eq!(serde_json::from_str::<Dmc>(&js).unwrap(), w);
        let g = random_general(3, 2, 9);
        let js = serde_json::to_string(&g).unwrap();
        assert!(js.starts_with(r#"{"n_inputs":3,"n_outputs":2,"rows""#));
        assert_eq!(serde_json::from_str::<Dmc>(&js).unwrap(), g);
    }
}
