//! Duplication distributions and geometric-run entropy functionals.
//!
//! `K` is a finite-support law on the positive integers. The central
//! quantity is `H(G_b | K_1 + ... + K_{G_b})`, the uncertainty about the
//! length of a run of a constant tau-mer that survives after duplication.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::info::{binary_entropy, convolve, entropy};
use crate::units::{Rate, Unit};

const PMF_TOL: f64 = 1e-12;
/// Largest geometric truncation point accepted.
const MAX_TERMS: usize = 10_000_000;
/// Work budget (multiply-adds) for the compound-sum convolutions.
const MAX_WORK: f64 = 2e10;
const TAIL_BOUND: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct DuplicationDist {
    support: Vec<usize>,
    pmf: Vec<f64>,
    cdf: Vec<f64>,
}

impl DuplicationDist {
    /// Build from a support and matching pmf. Zero-mass points are dropped.
    pub fn new(support: Vec<usize>, pmf: Vec<f64>) -> Result<Self> {
        if support.len() != pmf.len() {
            return Err(invalid("support and pmf lengths differ"));
        }
        if support.is_empty() {
            return Err(invalid("empty duplication support"));
        }
        let mut pairs: Vec<(usize, f64)> = support.into_iter().zip(pmf).collect();
        pairs.sort_by_key(|&(k, _)| k);
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(invalid("duplicate support point"));
        }
        if pairs[0].0 < 1 {
            return Err(invalid("duplication support must be positive"));
        }
        if pairs.iter().any(|&(_, p)| !(p >= 0.0) || !p.is_finite()) {
            return Err(invalid("pmf entries must be finite and nonnegative"));
        }
        let total: f64 = pairs.iter().map(|&(_, p)| p).sum();
        if (total - 1.0).abs() > PMF_TOL {
            return Err(invalid(format!("pmf sums to {total}")));
        }
        pairs.retain(|&(_, p)| p > 0.0);
        let (support, pmf): (Vec<usize>, Vec<f64>) = pairs.into_iter().unzip();
        let mut acc = 0.0;
        let cdf = pmf
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Ok(DuplicationDist { support, pmf, cdf })
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn min(&self) -> usize {
        self.support[0]
    }

    pub fn max(&self) -> usize {
        *self.support.last().unwrap()
    }

    /// `P(K = k)`.
    pub fn prob(&self, k: usize) -> f64 {
        match self.support.binary_search(&k) {
            Ok(i) => self.pmf[i],
            Err(_) => 0.0,
        }
    }

    pub fn entropy_nats(&self) -> f64 {
        entropy(&self.pmf)
    }

    pub fn entropy(&self, unit: Unit, q: u32, tau: u32) -> Rate {
        Rate::from_nats(self.entropy_nats(), unit, q, tau)
    }

    pub fn mean(&self) -> f64 {
        self.support
            .iter()
            .zip(&self.pmf)
            .map(|(&k, &p)| k as f64 * p)
            .sum()
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        self.support
            .iter()
            .zip(&self.pmf)
            .map(|(&k, &p)| p * (k as f64 - mu).powi(2))
            .sum()
    }

    /// `E[f(K)]` over the finite support.
    pub fn expect(&self, f: impl Fn(usize) -> f64) -> f64 {
        self.support
            .iter()
            .zip(&self.pmf)
            .map(|(&k, &p)| p * f(k))
            .sum()
    }

    /// Dense pmf indexed by value, from 0 to `max()`.
    pub fn dense(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.max() + 1];
        for (&k, &p) in self.support.iter().zip(&self.pmf) {
            v[k] = p;
        }
        v
    }

    /// Inverse-CDF draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random::<f64>() * self.cdf[self.cdf.len() - 1];
        let i = self.cdf.partition_point(|&c| c <= u);
        self.support[i.min(self.support.len() - 1)]
    }
}

/// `K = 1 + Ber(p)`.
pub fn make_iid(p: f64) -> Result<DuplicationDist> {
    check_prob(p)?;
    DuplicationDist::new(vec![1, 2], vec![1.0 - p, p])
}

/// `K = 1 + Bin(n, p)`.
pub fn make_binomial(n: usize, p: f64) -> Result<DuplicationDist> {
    check_prob(p)?;
    if n < 1 {
        return Err(invalid("binomial duplication needs n >= 1"));
    }
    let pmf = binomial_pmf(n, p);
    DuplicationDist::new((1..=n + 1).collect(), pmf)
}

/// `K` uniform on `{lo, ..., hi}`.
pub fn make_uniform(lo: usize, hi: usize) -> Result<DuplicationDist> {
    if lo < 1 || hi < lo {
        return Err(invalid(format!(
            "uniform duplication needs 1 <= lo <= hi, got {lo}..{hi}"
        )));
    }
    let n = hi - lo + 1;
    DuplicationDist::new((lo..=hi).collect(), vec![1.0 / n as f64; n])
}

/// `K` fixed at `k`.
pub fn make_constant(k: usize) -> Result<DuplicationDist> {
    DuplicationDist::new(vec![k], vec![1.0])
}

fn check_prob(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("probability {p} outside [0, 1]")));
    }
    Ok(())
}

fn binomial_pmf(n: usize, p: f64) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    let mut c = 1.0f64;
    for (k, o) in out.iter_mut().enumerate() {
        if k > 0 {
            c = c * (n - k + 1) as f64 / k as f64;
        }
        *o = c * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32);
    }
    out
}

#[derive(Serialize, Deserialize)]
struct DupJson {
    support: Vec<usize>,
    pmf: Vec<f64>,
}

impl Serialize for DuplicationDist {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DupJson {
            support: self.support.clone(),
            pmf: self.pmf.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DuplicationDist {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = DupJson::deserialize(d)?;
        DuplicationDist::new(j.support, j.pmf).map_err(serde::de::Error::custom)
    }
}

/// Run length of a constant tau-mer: `P(G = g) = (1 - p_b)^(g-1) p_b`, `g >= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeomRun {
    pub p_b: f64,
}

impl GeomRun {
    pub fn new(p_b: f64) -> Result<Self> {
        if !(p_b > 0.0 && p_b <= 1.0) {
            return Err(invalid(format!("leaving probability {p_b} outside (0, 1]")));
        }
        Ok(GeomRun { p_b })
    }

    pub fn pmf(&self, g: usize) -> f64 {
        if g == 0 {
            0.0
        } else {
            (1.0 - self.p_b).powi(g as i32 - 1) * self.p_b
        }
    }

    pub fn mean(&self) -> f64 {
        1.0 / self.p_b
    }

    pub fn entropy_nats(&self) -> f64 {
        binary_entropy(self.p_b) / self.p_b
    }

    /// Smallest `g` with `P(G > g) < tail_eps`.
    fn truncation(&self, tail_eps: f64) -> Result<usize> {
        if self.p_b >= 1.0 {
            return Ok(1);
        }
        let r = 1.0 - self.p_b;
        let g = (tail_eps.ln() / r.ln()).floor() as usize + 1;
        if g > MAX_TERMS {
            return Err(Error::TruncationCap {
                residual: r.powi(MAX_TERMS as i32),
                terms: MAX_TERMS,
            });
        }
        Ok(g.max(1))
    }
}

/// Entropies of the pair `(G_b, S)` with `S = K_1 + ... + K_{G_b}`, in nats.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompoundRun {
    /// `H(G_b)`, exact.
    pub h_g: f64,
    /// `H(G_b, S)` over the truncated joint law.
    pub h_joint: f64,
    /// `H(S)` over the truncated marginal.
    pub h_sum: f64,
    /// Geometric mass beyond the truncation point.
    pub residual: f64,
    pub terms: usize,
}

impl CompoundRun {
    /// `H(G_b | S) = H(G_b, S) - H(S)`.
    pub fn conditional(&self) -> f64 {
        (self.h_joint - self.h_sum).clamp(0.0, self.h_g)
    }

    /// The chain-rule expression `H(G_b) + E[G_b] H(K) - H(S)`.
    ///
    /// This treats `H(S | G_b)` as `E[G_b] H(K)`, which overstates it, so the
    /// value can exceed `H(G_b)`; kept for comparison with the closed forms.
    pub fn chain_rule(&self, p_b: f64, d: &DuplicationDist) -> f64 {
        self.h_g + d.entropy_nats() / p_b - self.h_sum
    }
}

/// Joint entropies of a geometric run and its duplicated length.
pub fn compound_run(p_b: f64, d: &DuplicationDist, tail_eps: f64) -> Result<CompoundRun> {
    let geo = GeomRun::new(p_b)?;
    if !(tail_eps > 0.0) {
        return Err(invalid("tail_eps must be positive"));
    }
    let g_max = geo.truncation(tail_eps)?;
    let span = d.max() - d.min();
    let work = (g_max as f64).powi(2) * (span as f64 + 1.0) * d.support().len() as f64 / 2.0;
    if work > MAX_WORK {
        return Err(Error::Precondition(format!(
            "compound sum needs about {work:.1e} operations; duplication support too wide"
        )));
    }
    let r = 1.0 - p_b;
    let dense = d.dense();
    let k_pmf = &dense[d.min()..];
    let kmin = d.min();
    let mut sum_pmf = vec![0.0; g_max * d.max() + 1];
    let mut conv = vec![1.0];
    let mut h_joint = 0.0;
    let mut weight = p_b;
    for g in 1..=g_max {
        // conv is the law of K_1 + ... + K_g shifted down by g*kmin
        conv = convolve(&conv, k_pmf);
        let offset = g * kmin;
        for (i, &c) in conv.iter().enumerate() {
            let j = weight * c;
            if j > 0.0 {
                h_joint -= j * j.ln();
                sum_pmf[offset + i] += j;
            }
        }
        weight *= r;
    }
    let residual = if p_b >= 1.0 {
        0.0
    } else {
        r.powi(g_max as i32)
    };
    if residual > 0.0 {
        let range = sum_pmf.len() as f64;
        let bound = residual * (residual.ln().abs() + range.ln());
        if bound >= TAIL_BOUND {
            return Err(Error::TruncationCap {
                residual,
                terms: g_max,
            });
        }
    }
    Ok(CompoundRun {
        h_g: geo.entropy_nats(),
        h_joint,
        h_sum: entropy(&sum_pmf),
        residual,
        terms: g_max,
    })
}

/// `H(G_b | K_1 + ... + K_{G_b})` in nats, computed from the exact joint law.
pub fn run_conditional_entropy(p_b: f64, d: &DuplicationDist, tail_eps: f64) -> Result<f64> {
    if p_b >= 1.0 {
        GeomRun::new(p_b)?;
        return Ok(0.0);
    }
    if d.support().len() == 1 {
        // the sum is a fixed multiple of G_b
        GeomRun::new(p_b)?;
        return Ok(0.0);
    }
    Ok(compound_run(p_b, d, tail_eps)?.conditional())
}

/// Default truncation level for the geometric tail.
pub const DEFAULT_TAIL_EPS: f64 = 1e-12;

/// Truncated pmf of a geometric variable on `{offset, offset+1, ...}` with
/// success probability `theta`.
fn geometric_pmf(theta: f64, offset: usize, tail_eps: f64) -> Vec<f64> {
    let mut v = vec![0.0; offset];
    if theta >= 1.0 {
        v.push(1.0);
        return v;
    }
    let mut p = theta;
    let mut tail = 1.0 - theta;
    v.push(p);
    while tail >= tail_eps * 1e-3 {
        p *= 1.0 - theta;
        tail *= 1.0 - theta;
        v.push(p);
    }
    v
}

/// Negative binomial failures before the `n`th success, success probability `theta`.
fn negative_binomial_pmf(n: usize, theta: f64, tail_eps: f64) -> Vec<f64> {
    if theta >= 1.0 {
        return vec![1.0];
    }
    let mut v = vec![theta.powi(n as i32)];
    let mut j = 0usize;
    while j < MAX_TERMS {
        let ratio = (j + n) as f64 / (j + 1) as f64 * (1.0 - theta);
        let next = v[j] * ratio;
        v.push(next);
        j += 1;
        // term ratios decrease, so past the mode the tail is dominated by a geometric series
        let r = (j + n) as f64 / (j + 1) as f64 * (1.0 - theta);
        if r < 1.0 && next * r / (1.0 - r) < tail_eps * 1e-3 {
            break;
        }
    }
    v
}

/// The usual closed-form expression for `K = 1 + Ber(p)`:
/// `(h(p_b) + h(p)) / p_b - H(G + G_b)` with `G` geometric on `{0, 1, ...}`
/// of mean `p / p_b`.
pub fn iid_closed_form(p_b: f64, p: f64, tail_eps: f64) -> Result<f64> {
    GeomRun::new(p_b)?;
    check_prob(p)?;
    let theta = p_b / (p_b + p);
    let g = geometric_pmf(theta, 0, tail_eps);
    let gb = geometric_pmf(p_b, 1, tail_eps);
    let s = convolve(&g, &gb);
    Ok((binary_entropy(p_b) + binary_entropy(p)) / p_b - entropy(&s))
}

/// The usual closed-form expression for `K = 1 + Bin(n, p)`:
/// `H(G_b) + H(Bin(n, p)) / p_b - H(N + G_b)` with `N` negative binomial of
/// mean `n p / p_b`.
pub fn binomial_closed_form(p_b: f64, n: usize, p: f64, tail_eps: f64) -> Result<f64> {
    let geo = GeomRun::new(p_b)?;
    check_prob(p)?;
    let theta = p_b / (p_b + p);
    let nb = negative_binomial_pmf(n, theta, tail_eps);
    let gb = geometric_pmf(p_b, 1, tail_eps);
    let s = convolve(&nb, &gb);
    Ok(geo.entropy_nats() + entropy(&binomial_pmf(n, p)) / p_b - entropy(&s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::trace_rng;

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn iid_examples() {
        let d = make_iid(0.0).unwrap();
        assert_eq!((d.entropy_nats(), d.mean()), (0.0, 1.0));
        let d = make_iid(0.999).unwrap();
        assert!((d.mean() - 1.999).abs() < 1e-15);
        assert!((d.entropy_nats() / LN2 - 0.011_407_757_737_461_1).abs() < 1e-9);
        let d = make_iid(1.0).unwrap();
        assert_eq!(d.support(), &[2]);
        assert_eq!(d.entropy_nats(), 0.0);
        let d = make_iid(0.5).unwrap();
        assert!((d.entropy_nats() / LN2 - 1.0).abs() < 1e-15);
        assert_eq!(d.mean(), 1.5);
        assert!(make_iid(1.2).is_err());
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(make_binomial(1, 0.3).unwrap(), make_iid(0.3).unwrap());
        let d = make_binomial(3, 0.5).unwrap();
        assert_eq!(d.pmf(), &[0.125, 0.375, 0.375, 0.125]);
        assert_eq!(d.support(), &[1, 2, 3, 4]);
        let direct: f64 = [0.125f64, 0.375, 0.375, 0.125]
            .iter()
            .map(|p| -p * p.log2())
            .sum();
        assert!((d.entropy_nats() / LN2 - direct).abs() < 1e-12);
        assert!((direct - 1.811_278_124_459_133).abs() < 1e-12);
        assert_eq!(make_binomial(2, 0.0).unwrap().support(), &[1]);
        assert!(make_binomial(0, 0.5).is_err());
    }

    #[test]
    fn sampling_frequencies() {
        let mut rng = trace_rng(1, 0);
        let d = make_iid(1.0).unwrap();
        assert!((0..1000).all(|_| d.sample(&mut rng) == 2));
        let d = make_iid(0.3).unwrap();
        let n = 1_000_000;
        let twos = (0..n).filter(|_| d.sample(&mut rng) == 2).count();
        assert!((twos as f64 / n as f64 - 0.3).abs() < 0.002);
        let d = make_binomial(3, 0.5).unwrap();
        let mean = (0..n).map(|_| d.sample(&mut rng)).sum::<usize>() as f64 / n as f64;
        assert!((mean - 2.5).abs() < 0.01);
    }

    #[test]
    fn degenerate_conditional_entropies() {
        let d = make_iid(0.0).unwrap();
        assert_eq!(
            run_conditional_entropy(0.3, &d, DEFAULT_TAIL_EPS).unwrap(),
            0.0
        );
        let d = make_iid(0.4).unwrap();
        assert_eq!(
            run_conditional_entropy(1.0, &d, DEFAULT_TAIL_EPS).unwrap(),
            0.0
        );
        assert!(run_conditional_entropy(0.0, &d, DEFAULT_TAIL_EPS).is_err());
    }

    // Brute-force joint law over (g, s) by enumerating every K-vector for small g.
    fn brute_conditional(p_b: f64, d: &DuplicationDist, g_max: usize) -> f64 {
        use std::collections::BTreeMap;
        let mut joint: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for g in 1..=g_max {
            let wg = (1.0 - p_b).powi(g as i32 - 1) * p_b;
            let mut states: BTreeMap<usize, f64> = BTreeMap::new();
            states.insert(0, 1.0);
            for _ in 0..g {
                let mut next = BTreeMap::new();
                for (&s, &p) in &states {
                    for (&k, &pk) in d.support().iter().zip(d.pmf()) {
                        *next.entry(s + k).or_insert(0.0) += p * pk;
                    }
                }
                states = next;
            }
            for (s, p) in states {
                *joint.entry((g, s)).or_insert(0.0) += wg * p;
            }
        }
        let mut marg: BTreeMap<usize, f64> = BTreeMap::new();
        let mut hj = 0.0;
        for (&(_, s), &p) in &joint {
            *marg.entry(s).or_insert(0.0) += p;
            hj -= p * p.ln();
        }
        let hs: f64 = marg.values().map(|&p| -p * p.ln()).sum();
        hj - hs
    }

    #[test]
    fn exact_matches_brute_force_enumeration() {
        let d = make_binomial(2, 0.4).unwrap();
        let p_b = 0.9;
        let brute = brute_conditional(p_b, &d, 14);
        let fast = run_conditional_entropy(p_b, &d, DEFAULT_TAIL_EPS).unwrap();
        assert!((brute - fast).abs() < 1e-9, "{brute} vs {fast}");
    }

    #[test]
    fn conditional_is_bounded_by_marginal() {
        for &p_b in &[0.1, 0.5, 0.9] {
            for &p in &[0.1, 0.5, 0.9] {
                let d = make_iid(p).unwrap();
                let c = compound_run(p_b, &d, DEFAULT_TAIL_EPS).unwrap();
                let h = c.conditional();
                assert!(h >= 0.0 && h <= c.h_g + 1e-12);
                assert!(c.h_joint - c.h_sum >= -1e-12);
            }
        }
    }

    #[test]
    fn closed_forms_reduce_when_no_duplication() {
        for &p_b in &[0.2, 0.7] {
            assert!(iid_closed_form(p_b, 0.0, DEFAULT_TAIL_EPS).unwrap().abs() < 1e-9);
            assert!(
                binomial_closed_form(p_b, 2, 0.0, DEFAULT_TAIL_EPS)
                    .unwrap()
                    .abs()
                    < 1e-9
            );
            let a = iid_closed_form(p_b, 0.4, DEFAULT_TAIL_EPS).unwrap();
            let b = binomial_closed_form(p_b, 1, 0.4, DEFAULT_TAIL_EPS).unwrap();
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn json_round_trip() {
        let d = make_binomial(3, 0.25).unwrap();
        let js = serde_json::to_string(&d).unwrap();
        assert!(js.starts_with("{\"support\":[1,2,3,4]"));
        let back: DuplicationDist = serde_json::from_str(&js).unwrap();
        assert_eq!(d, back);
    }
}
