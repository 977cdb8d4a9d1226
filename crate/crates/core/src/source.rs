//! Stationary de Bruijn Markov sources over tau-mers.
//!
//! From state `s` the chain moves to `shift(s, a)` with probability
//! `probs[s][a]`. Kernels are validated for irreducibility and aperiodicity
//! at construction, except for the explicitly unchecked constructors.

use std::collections::VecDeque;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alphabet::TauMerSpace;
use crate::error::{invalid, Error, Result};
use crate::info::entropy;
use crate::rng::trace_rng;
use crate::spectral::perron_root;
use crate::units::{Rate, Unit};

const ROW_TOL: f64 = 1e-12;
const STATIONARY_TOL: f64 = 1e-12;
const STATIONARY_MAX_ITER: usize = 1_000_000;
const PAR_THRESHOLD: usize = 1 << 14;

#[derive(Debug, Clone, PartialEq)]
pub struct DeBruijnKernel {
    space: TauMerSpace,
    /// Row-major, `q` entries per state.
    probs: Vec<f64>,
    no_self_loop: bool,
}

impl DeBruijnKernel {
    /// Build and validate a kernel from explicit rows indexed by tau-mer code.
    pub fn from_rows(q: u32, tau: u32, rows: &[Vec<f64>], no_self_loop: bool) -> Result<Self> {
        let k = Self::from_rows_unchecked(q, tau, rows, no_self_loop)?;
        k.check_ergodic()?;
        Ok(k)
    }

    /// Like [`from_rows`](Self::from_rows) but skips the ergodicity check.
    /// Row sums and the self-loop flag are still enforced.
    pub fn from_rows_unchecked(
        q: u32,
        tau: u32,
        rows: &[Vec<f64>],
        no_self_loop: bool,
    ) -> Result<Self> {
        let space = TauMerSpace::new(q, tau)?;
        if rows.len() != space.n_states() {
            return Err(invalid(format!(
                "expected {} rows, got {}",
                space.n_states(),
                rows.len()
            )));
        }
        let mut probs = Vec::with_capacity(space.n_states() * q as usize);
        for (s, row) in rows.iter().enumerate() {
            if row.len() != q as usize {
                return Err(invalid(format!(
                    "row {s} has {} entries, expected {q}",
                    row.len()
                )));
            }
            probs.extend_from_slice(row);
        }
        let k = DeBruijnKernel {
            space,
            probs,
            no_self_loop,
        };
        k.check_rows()?;
        Ok(k)
    }

    fn check_rows(&self) -> Result<()> {
        for s in 0..self.space.n_states() {
            let row = self.row(s);
            if row.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
                return Err(invalid(format!(
                    "row {s} has a negative or non-finite entry"
                )));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_TOL {
                return Err(invalid(format!("row {s} sums to {sum}")));
            }
        }
        if self.no_self_loop {
            for b in 0..self.space.q {
                let c = self.space.constant(b);
                if self.prob(c, b) != 0.0 {
                    return Err(invalid(format!("constant state {c} has a self-loop")));
                }
            }
        }
        Ok(())
    }

    pub fn space(&self) -> &TauMerSpace {
        &self.space
    }

    pub fn q(&self) -> u32 {
        self.space.q
    }

    pub fn tau(&self) -> u32 {
        self.space.tau
    }

    pub fn n_states(&self) -> usize {
        self.space.n_states()
    }

    pub fn no_self_loop(&self) -> bool {
        self.no_self_loop
    }

    #[inline]
    pub fn row(&self, s: usize) -> &[f64] {
        let q = self.space.q as usize;
        &self.probs[s * q..(s + 1) * q]
    }

    /// Probability of appending base `a` from state `s`.
    #[inline]
    pub fn prob(&self, s: usize, a: u32) -> f64 {
        self.probs[s * self.space.q as usize + a as usize]
    }

    /// Transition probability between two tau-mer codes; 0 if they do not overlap.
    pub fn transition(&self, s: usize, t: usize) -> f64 {
        let a = self.space.last_base(t);
        if self.space.shift(s, a) == t {
            self.prob(s, a)
        } else {
            0.0
        }
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n_states()).map(|s| self.row(s).to_vec()).collect()
    }

    /// Irreducibility by forward and backward search from state 0, then the
    /// period as the gcd of level differences over all edges.
    pub fn check_ergodic(&self) -> Result<()> {
        let n = self.n_states();
        let q = self.space.q;
        let high = n / q as usize;
        let mut level = vec![u64::MAX; n];
        let mut queue = VecDeque::new();
        level[0] = 0;
        queue.push_back(0usize);
        while let Some(u) = queue.pop_front() {
            for a in 0..q {
                if self.prob(u, a) > 0.0 {
                    let v = self.space.shift(u, a);
                    if level[v] == u64::MAX {
                        level[v] = level[u] + 1;
                        queue.push_back(v);
                    }
                }
            }
        }
        if level.contains(&u64::MAX) {
            return Err(Error::NotIrreducible);
        }
        let mut seen = vec![false; n];
        seen[0] = true;
        queue.push_back(0);
        while let Some(v) = queue.pop_front() {
            let b = self.space.last_base(v);
            for a in 0..q as usize {
                let u = a * high + v / q as usize;
                if !seen[u] && self.prob(u, b) > 0.0 {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
        if seen.iter().any(|&x| !x) {
            return Err(Error::NotIrreducible);
        }
        let mut period = 0u64;
        for u in 0..n {
            for a in 0..q {
                if self.prob(u, a) > 0.0 {
                    let v = self.space.shift(u, a);
                    let d = (level[u] + 1).abs_diff(level[v]);
                    period = gcd(period, d);
                }
            }
        }
        if period != 1 {
            return Err(Error::NotAperiodic(period));
        }
        Ok(())
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Every admissible transition has probability `1/q`.
pub fn build_uniform_kernel(q: u32, tau: u32) -> Result<DeBruijnKernel> {
    let space = TauMerSpace::new(q, tau)?;
    let k = DeBruijnKernel {
        space,
        probs: vec![1.0 / q as f64; space.n_states() * q as usize],
        no_self_loop: false,
    };
    Ok(k)
}

/// The max-entropic chain on the self-loop-free de Bruijn graph,
/// `P(s -> s') = v(s') / (lambda v(s))` with `(lambda, v)` the Perron pair.
pub fn build_noloop_max_entropic(q: u32, tau: u32) -> Result<DeBruijnKernel> {
    let space = TauMerSpace::new(q, tau)?;
    let perron = perron_root(&space, true)?;
    let qu = q as usize;
    let mut probs = vec![0.0; space.n_states() * qu];
    for s in 0..space.n_states() {
        let row = &mut probs[s * qu..(s + 1) * qu];
        for a in 0..q {
            let t = space.shift(s, a);
            if t != s {
                row[a as usize] = perron.vector[t] / (perron.lambda * perron.vector[s]);
            }
        }
        let sum: f64 = row.iter().sum();
        row.iter_mut().for_each(|p| *p /= sum);
    }
    let k = DeBruijnKernel {
        space,
        probs,
        no_self_loop: true,
    };
    k.check_ergodic()?;
    Ok(k)
}

/// Deterministic walk around a de Bruijn cycle: every row is a unit vector.
///
/// This chain is periodic, so it bypasses the ergodicity check. It is meant
/// for reproducibility tests and degenerate-entropy checks only.
pub fn deterministic_cycle_kernel(q: u32, tau: u32) -> Result<DeBruijnKernel> {
    let space = TauMerSpace::new(q, tau)?;
    let seq = de_bruijn_sequence(q, tau);
    let n = space.n_states();
    let qu = q as usize;
    let mut probs = vec![0.0; n * qu];
    // the cyclic sequence visits each tau-mer exactly once
    let mut code = 0usize;
    for &b in &seq[..tau as usize] {
        code = code * qu + b as usize;
    }
    for i in 0..n {
        let next = seq[(i + tau as usize) % n];
        probs[code * qu + next as usize] = 1.0;
        code = space.shift(code, next);
    }
    Ok(DeBruijnKernel {
        space,
        probs,
        no_self_loop: false,
    })
}

/// Lexicographically least de Bruijn sequence B(q, n) via Lyndon words.
fn de_bruijn_sequence(q: u32, n: u32) -> Vec<u32> {
    fn rec(t: usize, p: usize, q: u32, n: usize, a: &mut Vec<u32>, out: &mut Vec<u32>) {
        if t > n {
            if n.is_multiple_of(p) {
                out.extend_from_slice(&a[1..=p]);
            }
        } else {
            a[t] = a[t - p];
            rec(t + 1, p, q, n, a, out);
            for j in a[t - p] + 1..q {
                a[t] = j;
                rec(t + 1, t, q, n, a, out);
            }
        }
    }
    let n = n as usize;
    let mut a = vec![0u32; n + 1];
    let mut out = Vec::new();
    rec(1, 1, q, n, &mut a, &mut out);
    out
}

/// Stationary quantities of a kernel. The entropy rate is held in nats.
#[derive(Debug, Clone)]
pub struct StationaryInfo {
    pub pi: Vec<f64>,
    entropy_rate_nats: f64,
    /// `p_b = 1 - P(b..b -> b..b)` for each base `b`.
    pub leaving_probs: Vec<f64>,
    q: u32,
    tau: u32,
}

impl StationaryInfo {
    pub fn entropy_rate_nats(&self) -> f64 {
        self.entropy_rate_nats
    }

    pub fn entropy_rate(&self, unit: Unit) -> Rate {
        Rate::from_nats(self.entropy_rate_nats, unit, self.q, self.tau)
    }
}

/// Stationary distribution by power iteration on the transpose, started
/// from the uniform vector, to a max-norm residual of `1e-12`.
pub fn stationary_info(k: &DeBruijnKernel) -> Result<StationaryInfo> {
    let n = k.n_states();
    let q = k.q() as usize;
    let high = n / q;
    let step = |pi: &[f64], out: &mut [f64]| {
        let f = |t: usize| -> f64 {
            let b = (t % q) as u32;
            let base = t / q;
            (0..q)
                .map(|a| pi[a * high + base] * k.prob(a * high + base, b))
                .sum()
        };
        if n >= PAR_THRESHOLD {
            out.par_iter_mut().enumerate().for_each(|(t, o)| *o = f(t));
        } else {
            for (t, o) in out.iter_mut().enumerate() {
                *o = f(t);
            }
        }
    };
    let mut pi = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    let mut converged = false;
    for _ in 0..STATIONARY_MAX_ITER {
        step(&pi, &mut next);
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= total);
        residual = pi
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        std::mem::swap(&mut pi, &mut next);
        if residual <= STATIONARY_TOL {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NotConverged {
            what: "stationary distribution",
            iterations: STATIONARY_MAX_ITER,
            residual,
        });
    }
    let entropy_rate_nats = (0..n).map(|s| pi[s] * entropy(k.row(s))).sum();
    let leaving_probs = (0..k.q())
        .map(|b| 1.0 - k.prob(k.space().constant(b), b))
        .collect();
    Ok(StationaryInfo {
        pi,
        entropy_rate_nats,
        leaving_probs,
        q: k.q(),
        tau: k.tau(),
    })
}

/// Expected number of runs of the constant tau-mer `b..b` in `S^m`, by exit
/// counting: `m - 1` exit opportunities plus the entry flow into `b..b`.
/// A run still open at position `m` that began earlier is missed, so
/// this falls short of the true mean by `pi(b..b) (1 - p_b)`; see
/// [`expected_run_count_exact`]. The two agree for loop-free kernels.
pub fn expected_run_count(k: &DeBruijnKernel, info: &StationaryInfo, b: u32, m: usize) -> f64 {
    let sp = k.space();
    let c = sp.constant(b);
    let q = k.q() as usize;
    let high = k.n_states() / q;
    let mut entry = 0.0;
    for a in 0..k.q() {
        if a == b {
            continue;
        }
        // (a, b, ..., b)
        let s = a as usize * high + c / q;
        entry += info.pi[s] * k.prob(s, b);
    }
    (m as f64 - 1.0) * info.pi[c] * info.leaving_probs[b as usize] + entry
}

/// Exact expected number of runs of `b..b` in a stationary `S^m`: every run
/// either ends with an exit at some `i < m` or is open at `m`, so the mean is
/// `(m - 1) pi(b..b) p_b + pi(b..b)`.
pub fn expected_run_count_exact(
    info: &StationaryInfo,
    space: &TauMerSpace,
    b: u32,
    m: usize,
) -> f64 {
    let c = space.constant(b);
    ((m as f64 - 1.0) * info.leaving_probs[b as usize] + 1.0) * info.pi[c]
}

/// A sampled state sequence and its de-overlapped base read-out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampledSequence {
    pub states: Vec<usize>,
    /// `m + tau - 1` bases.
    pub bases: Vec<u32>,
}

/// Precomputed cumulative tables for repeated sampling from one kernel.
#[derive(Debug, Clone)]
pub struct SourceSampler {
    kernel: DeBruijnKernel,
    pi_cdf: Vec<f64>,
}

impl SourceSampler {
    pub fn new(kernel: &DeBruijnKernel, info: &StationaryInfo) -> Self {
        let mut acc = 0.0;
        let pi_cdf = info
            .pi
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        SourceSampler {
            kernel: kernel.clone(),
            pi_cdf,
        }
    }

    pub fn kernel(&self) -> &DeBruijnKernel {
        &self.kernel
    }

    pub fn initial<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random::<f64>() * self.pi_cdf.last().copied().unwrap_or(1.0);
        let i = self.pi_cdf.partition_point(|&c| c <= u);
        let mut i = i.min(self.pi_cdf.len() - 1);
        // never land on a zero-mass state through rounding
        while i > 0 && self.pi_cdf[i] == self.pi_cdf[i - 1] {
            i -= 1;
        }
        i
    }

    pub fn next_base<R: Rng + ?Sized>(&self, s: usize, rng: &mut R) -> u32 {
        let row = self.kernel.row(s);
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut last = 0;
        for (a, &p) in row.iter().enumerate() {
            if p > 0.0 {
                acc += p;
                last = a;
                if u < acc {
                    return a as u32;
                }
            }
        }
        last as u32
    }

    pub fn sample<R: Rng + ?Sized>(&self, m: usize, rng: &mut R) -> SampledSequence {
        let sp = self.kernel.space();
        let mut states = Vec::with_capacity(m);
        if m == 0 {
            return SampledSequence {
                states,
                bases: Vec::new(),
            };
        }
        let mut s = self.initial(rng);
        let mut bases = sp.digits(s);
        states.push(s);
        for _ in 1..m {
            let a = self.next_base(s, rng);
            s = sp.shift(s, a);
            bases.push(a);
            states.push(s);
        }
        SampledSequence { states, bases }
    }
}

/// Sample `S^m` with `S_1 ~ pi`, using the generator for stream `seed`.
pub fn sample_sequence(k: &DeBruijnKernel, m: usize, seed: u64) -> Result<SampledSequence> {
    if m < 1 {
        return Err(invalid("sequence length m must be at least 1"));
    }
    let info = stationary_info(k)?;
    let sampler = SourceSampler::new(k, &info);
    Ok(sampler.sample(m, &mut trace_rng(seed, 0)))
}

#[derive(Serialize, Deserialize)]
struct KernelJson {
    q: u32,
    tau: u32,
    no_self_loop: bool,
    rows: Vec<Vec<f64>>,
}

impl Serialize for DeBruijnKernel {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        KernelJson {
            q: self.q(),
            tau: self.tau(),
            no_self_loop: self.no_self_loop,
            rows: self.rows(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DeBruijnKernel {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let j = KernelJson::deserialize(deserializer)?;
        DeBruijnKernel::from_rows(j.q, j.tau, &j.rows, j.no_self_loop)
            .map_err(serde::de::Error::custom)
    }
}
