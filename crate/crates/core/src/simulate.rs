//! End-to-end channel traces: source, then duplication, then memoryless noise.

use std::io::Write;

use rand::Rng;
use serde::Serialize;

use crate::dmc::Dmc;
use crate::duplication::DuplicationDist;
use crate::error::{invalid, Error, Result};
use crate::rng::trace_rng;
use crate::source::{stationary_info, DeBruijnKernel, SourceSampler};

/// Default cap on `T_m`, the number of channel uses in one trace.
pub const DEFAULT_SAMPLE_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelTrace {
    /// Input tau-mers `S_1..S_m`.
    pub s: Vec<usize>,
    /// Duplication counts `K_1..K_m`.
    pub k: Vec<usize>,
    /// Boundaries `T_0 = 0, T_i = K_1 + ... + K_i`.
    pub t: Vec<usize>,
    /// Duplicated tau-mers, `T_m` entries.
    pub z: Vec<usize>,
    /// Channel outputs, `T_m` entries.
    pub y: Vec<usize>,
}

impl ChannelTrace {
    pub fn m(&self) -> usize {
        self.s.len()
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }
}

/// Reusable sampler for one (kernel, duplication, channel) configuration.
#[derive(Debug, Clone)]
pub struct TraceSampler {
    source: SourceSampler,
    dup: DuplicationDist,
    channel: Dmc,
    budget: u64,
}

impl TraceSampler {
    pub fn new(kernel: &DeBruijnKernel, dup: &DuplicationDist, channel: &Dmc) -> Result<Self> {
        if channel.n_inputs() != kernel.n_states() {
            return Err(invalid(format!(
                "channel has {} inputs but the source has {} states",
                channel.n_inputs(),
                kernel.n_states()
            )));
        }
        let info = stationary_info(kernel)?;
        Ok(TraceSampler {
            source: SourceSampler::new(kernel, &info),
            dup: dup.clone(),
            channel: channel.clone(),
            budget: DEFAULT_SAMPLE_BUDGET,
        })
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn kernel(&self) -> &DeBruijnKernel {
        self.source.kernel()
    }

    pub fn dup(&self) -> &DuplicationDist {
        &self.dup
    }

    pub fn channel(&self) -> &Dmc {
        &self.channel
    }

    pub fn sample<R: Rng + ?Sized>(&self, m: usize, rng: &mut R) -> Result<ChannelTrace> {
        if m < 1 {
            return Err(invalid("trace length m must be at least 1"));
        }
        let s = self.source.sample(m, rng).states;
        let k: Vec<usize> = (0..m).map(|_| self.dup.sample(rng)).collect();
        let total: u64 = k.iter().map(|&x| x as u64).sum();
        if total > self.budget {
            return Err(Error::TraceTooLong {
                len: total,
                budget: self.budget,
            });
        }
        let mut t = Vec::with_capacity(m + 1);
        t.push(0);
        let mut z = Vec::with_capacity(total as usize);
        for (&si, &ki) in s.iter().zip(&k) {
            z.extend(std::iter::repeat_n(si, ki));
            t.push(z.len());
        }
        let y = z
            .iter()
            .map(|&zj| self.channel.apply_unchecked(zj, rng))
            .collect();
        Ok(ChannelTrace { s, k, t, z, y })
    }

    /// Trace `i` of the batch seeded with `seed`.
    pub fn sample_indexed(&self, m: usize, seed: u64, i: u64) -> Result<ChannelTrace> {
        self.sample(m, &mut trace_rng(seed, i))
    }
}

/// One trace drawn from stream `seed`.
pub fn sample_trace(
    kernel: &DeBruijnKernel,
    dup: &DuplicationDist,
    channel: &Dmc,
    m: usize,
    seed: u64,
) -> Result<ChannelTrace> {
    TraceSampler::new(kernel, dup, channel)?.sample_indexed(m, seed, 0)
}

/// Collapse each maximal run to a single symbol. Only meaningful for sources
/// without self-loops, where it inverts duplication exactly.
pub fn collapse_runs(z: &[usize], no_loop: bool) -> Result<Vec<usize>> {
    if !no_loop {
        return Err(Error::AmbiguousCollapse);
    }
    if z.is_empty() {
        return Err(Error::EmptySequence);
    }
    let mut out = Vec::with_capacity(z.len());
    for &x in z {
        if out.last() != Some(&x) {
            out.push(x);
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct TraceRecord {
    i: usize,
    s_i: usize,
    k_i: usize,
}

/// Write one `{i, s_i, k_i}` JSON line per input symbol to `records` and the
/// output sequence as a single JSON array to `outputs`.
pub fn write_trace<W1: Write, W2: Write>(
    trace: &ChannelTrace,
    records: &mut W1,
    outputs: &mut W2,
) -> Result<()> {
    for (i, (&s, &k)) in trace.s.iter().zip(&trace.k).enumerate() {
        serde_json::to_writer(&mut *records, &TraceRecord { i, s_i: s, k_i: k })?;
        records.write_all(b"\n")?;
    }
    serde_json::to_writer(&mut *outputs, &trace.y)?;
    outputs.write_all(b"\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::duplication::{make_iid, make_uniform};
    use crate::source::{build_noloop_max_entropic, build_uniform_kernel};

    #[test]
    fn trace_invariants() {
        let k = build_uniform_kernel(3, 2).unwrap();
        let d = make_uniform(1, 4).unwrap();
        let w = Dmc::symmetric(9, 0.2).unwrap();
        let tr = sample_trace(&k, &d, &w, 500, 11).unwrap();
        assert_eq!(tr.t[0], 0);
        assert_eq!(tr.t.len(), 501);
        assert_eq!(*tr.t.last().unwrap(), tr.z.len());
        assert_eq!(tr.y.len(), tr.z.len());
        for i in 0..500 {
            assert!(tr.k[i] >= 1);
            assert_eq!(tr.t[i + 1] - tr.t[i], tr.k[i]);
            assert!(tr.z[tr.t[i]..tr.t[i + 1]].iter().all(|&x| x == tr.s[i]));
        }
    }

    #[test]
    fn identity_and_doubling() {
        let k = build_uniform_kernel(2, 3).unwrap();
        let w = Dmc::clean(8).unwrap();
        let tr = sample_trace(&k, &make_iid(0.0).unwrap(), &w, 100, 5).unwrap();
        assert_eq!(tr.y, tr.s);
        let tr = sample_trace(&k, &make_iid(1.0).unwrap(), &w, 100, 5).unwrap();
        let doubled: Vec<usize> = tr.s.iter().flat_map(|&x| [x, x]).collect();
        assert_eq!(tr.y, doubled);
        let e = Dmc::erasure(8, 1.0).unwrap();
        let tr = sample_trace(&k, &make_iid(0.5).unwrap(), &e, 100, 5).unwrap();
        assert!(tr.y.iter().all(|&y| y == 8));
        assert!(collapse_runs(&tr.z, true).unwrap().len() <= 100);
    }

    #[test]
    fn collapse_inverts_no_loop_duplication() {
        let k = build_noloop_max_entropic(2, 2).unwrap();
        let d = make_uniform(1, 5).unwrap();
        let w = Dmc::clean(4).unwrap();
        let ts = TraceSampler::new(&k, &d, &w).unwrap();
        for i in 0..10_000 {
            let tr = ts.sample_indexed(30, 77, i).unwrap();
            assert_eq!(collapse_runs(&tr.y, true).unwrap(), tr.s);
        }
    }

    #[test]
    fn collapse_examples() {
        let (a, b) = (3, 5);
        assert_eq!(
            collapse_runs(&[a, a, b, b, b, a], true).unwrap(),
            vec![a, b, a]
        );
        assert!(matches!(
            collapse_runs(&[], true),
            Err(Error::EmptySequence)
        ));
        assert_eq!(
            collapse_runs(&[1, 2], false).unwrap_err().to_string(),
            "ambiguous collapse: run collapsing requires a no-self-loop source"
        );
    }

    #[test]
    fn budget_is_enforced() {
        let k = build_uniform_kernel(2, 1).unwrap();
        let d = make_uniform(100, 100).unwrap();
        let w = Dmc::clean(2).unwrap();
        let ts = TraceSampler::new(&k, &d, &w).unwrap().with_budget(999);
        assert!(matches!(
            ts.sample_indexed(10, 1, 0),
            Err(Error::TraceTooLong {
                len: 1000,
                budget: 999
            })
        ));
    }

    #[test]
    fn dump_format() {
        let k = build_uniform_kernel(2, 1).unwrap();
        let w = Dmc::erasure(2, 0.5).unwrap();
        let tr = sample_trace(&k, &make_iid(0.5).unwrap(), &w, 3, 2).unwrap();
        let (mut a, mut b) = (Vec::new(), Vec::new());
        write_trace(&tr, &mut a, &mut b).unwrap();
        let text = String::from_utf8(a).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(
            lines[0],
            format!("{{\"i\":0,\"s_i\":{},\"k_i\":{}}}", tr.s[0], tr.k[0])
        );
        let y: Vec<usize> = serde_json::from_slice(&b).unwrap();
        assert_eq!(y, tr.y);
    }
}
