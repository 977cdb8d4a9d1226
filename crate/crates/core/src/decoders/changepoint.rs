//! Change-point segmentation followed by per-segment MAP decoding.
//!
//! At high sampling rates every input tau-mer is seen many times in a row
//! through the channel. The decoder repeatedly (1) estimates the current
//! tau-mer from a short window, (2) runs a Shiryaev detector for the switch
//! to any admissible successor, (3) MAP-decodes the samples before the
//! detected boundary, dropping a trimming margin that may already belong to
//! the next segment, and (4) restarts just after the boundary.

use serde::Serialize;

use crate::dmc::Dmc;
use crate::duplication::DuplicationDist;
use crate::error::{invalid, Error, Result};
use crate::source::{stationary_info, DeBruijnKernel};

/// Schedules and thresholds for [`changepoint_decode`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChangePointParams {
    pub gamma: f64,
    pub eta: f64,
    /// Shiryaev false-alarm level.
    pub alpha: f64,
    /// Trimming length.
    pub c: usize,
    /// Shortest segment the schedule plans for.
    pub ell: usize,
    /// Longest segment the schedule plans for.
    pub h: usize,
    /// Per-sample change probability of the geometric prior.
    pub prior_rho: f64,
    /// Samples used to estimate the pre-change tau-mer.
    pub w0: usize,
}

impl ChangePointParams {
    /// The asymptotic schedules: `ell = m^2 (ln m)^3`, `h = gamma ell`,
    /// `alpha = 1 / (m^3 (ln m)^4)`, `c = m (ln m)^2`, with `w0 = c`.
    pub fn asymptotic(m: usize, gamma: f64, eta: f64, d: &DuplicationDist) -> Result<Self> {
        if m < 2 {
            return Err(invalid("the asymptotic schedule needs m >= 2"));
        }
        if !(gamma > 1.0) || !(eta > 0.0) {
            return Err(invalid("need gamma > 1 and eta > 0"));
        }
        let mf = m as f64;
        let lm = mf.ln();
        let ell = (mf * mf * lm.powi(3)).ceil() as usize;
        let c = (mf * lm * lm).ceil() as usize;
        let p = ChangePointParams {
            gamma,
            eta,
            alpha: 1.0 / (mf.powi(3) * lm.powi(4)),
            c,
            ell,
            h: (gamma * mf * mf * lm.powi(3)).ceil() as usize,
            prior_rho: 1.0 / d.mean(),
            w0: c,
        };
        if ell <= m * c {
            return Err(Error::Precondition(format!(
                "segment floor {ell} does not exceed m * c = {}",
                m * c
            )));
        }
        Ok(p)
    }

    /// User-chosen schedules for desk-scale experiments. Requires the segment
    /// floor to exceed twice the trimming length.
    pub fn custom(ell: usize, h: usize, alpha: f64, c: usize, d: &DuplicationDist) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(invalid("alpha must lie in (0, 1)"));
        }
        if h < ell || ell == 0 {
            return Err(invalid("need 0 < ell <= h"));
        }
        if ell <= 2 * c {
            return Err(Error::Precondition(format!(
                "segment floor {ell} does not exceed twice the trim {c}"
            )));
        }
        Ok(ChangePointParams {
            gamma: h as f64 / ell as f64,
            eta: 1.0,
            alpha,
            c,
            ell,
            h,
            prior_rho: 1.0 / d.mean(),
            w0: c.max(1),
        })
    }
}

/// Outcome of a Shiryaev run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Detection {
    /// Index (into the stream) of the sample at which the change was declared.
    At(usize),
    NoChange,
}

/// Per-output log-likelihood ratio of the post-change mixture against the
/// pre-change law. `+inf` where only the mixture has mass, `0` where neither does.
fn log_ratios(pre: &[f64], post: &[Vec<f64>]) -> Vec<f64> {
    let n = post.len() as f64;
    (0..pre.len())
        .map(|y| {
            let f1: f64 = post.iter().map(|r| r[y]).sum::<f64>() / n;
            let f0 = pre[y];
            match (f0 > 0.0, f1 > 0.0) {
                (true, true) => (f1 / f0).ln(),
                (false, true) => f64::INFINITY,
                (true, false) => f64::NEG_INFINITY,
                (false, false) => 0.0,
            }
        })
        .collect()
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

fn detect_with_ratios(stream: &[usize], llr: &[f64], prior_rho: f64, alpha: f64) -> Detection {
    let log_thresh = ((1.0 - alpha) / alpha).ln();
    let ln_rho = prior_rho.ln();
    let ln_keep = (1.0 - prior_rho).ln();
    let mut log_r = f64::NEG_INFINITY;
    for (n, &y) in stream.iter().enumerate() {
        let l = llr[y];
        if l == f64::INFINITY {
            return Detection::At(n);
        }
        log_r = log_add(log_r, ln_rho) - ln_keep + l;
        if log_r >= log_thresh {
            return Detection::At(n);
        }
    }
    Detection::NoChange
}

/// Shiryaev's procedure: odds `R_n = (R_{n-1} + rho) / (1 - rho) * L_n` with
/// `L_n` the likelihood ratio of the uniform post-change mixture, declaring at
/// the first `n` where the posterior change probability reaches `1 - alpha`.
pub fn shiryaev_detect(
    stream: &[usize],
    pre: &[f64],
    post: &[Vec<f64>],
    prior_rho: f64,
    alpha: f64,
) -> Result<Detection> {
    if post.is_empty() {
        return Err(Error::Precondition("empty post-change family".into()));
    }
    if post.iter().any(|r| r.len() != pre.len()) {
        return Err(invalid(
            "pre- and post-change laws have different alphabets",
        ));
    }
    if post.iter().any(|r| r.as_slice() == pre) {
        return Err(Error::Precondition(
            "post-change component identical to the pre-change law".into(),
        ));
    }
    if !(prior_rho > 0.0 && prior_rho < 1.0) || !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid("prior_rho and alpha must lie in (0, 1)"));
    }
    if let Some(&y) = stream.iter().find(|&&y| y >= pre.len()) {
        return Err(invalid(format!("stream symbol {y} out of range")));
    }
    Ok(detect_with_ratios(
        stream,
        &log_ratios(pre, post),
        prior_rho,
        alpha,
    ))
}

/// MAP estimate of the tau-mer behind `window` given a prior over candidates.
/// Ties go to the smallest code.
pub fn map_views(window: &[usize], prior: &[(usize, f64)], w: &Dmc) -> Result<usize> {
    if window.is_empty() {
        return Err(Error::EmptySequence);
    }
    if prior.is_empty() {
        return Err(invalid("empty candidate set"));
    }
    let mut counts = vec![0usize; w.n_outputs()];
    for &y in window {
        if y >= counts.len() {
            return Err(invalid(format!("output symbol {y} out of range")));
        }
        counts[y] += 1;
    }
    let seen: Vec<(usize, usize)> = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(y, &c)| (y, c))
        .collect();
    let mut best: Option<(f64, usize)> = None;
    for &(z, p) in prior {
        if p <= 0.0 {
            continue;
        }
        let mut score = p.ln();
        for &(y, c) in &seen {
            let l = w.prob(z, y);
            if l == 0.0 {
                score = f64::NEG_INFINITY;
                break;
            }
            score += c as f64 * l.ln();
        }
        if score == f64::NEG_INFINITY {
            continue;
        }
        best = match best {
            Some((bs, bz)) if bs > score || (bs == score && bz < z) => Some((bs, bz)),
            _ => Some((score, z)),
        };
    }
    best.map(|(_, z)| z).ok_or(Error::InconsistentWindow)
}

/// Everything the decoder needs to know about the channel model.
#[derive(Debug, Clone)]
pub struct ChangePointModel {
    kernel: DeBruijnKernel,
    pi: Vec<f64>,
    channel: Dmc,
}

impl ChangePointModel {
    pub fn new(kernel: &DeBruijnKernel, channel: &Dmc) -> Result<Self> {
        if channel.n_inputs() != kernel.n_states() {
            return Err(invalid("channel inputs and source states differ"));
        }
        if !channel.rows_distinct() {
            return Err(Error::Precondition(
                "channel rows are not pairwise distinct".into(),
            ));
        }
        Ok(ChangePointModel {
            kernel: kernel.clone(),
            pi: stationary_info(kernel)?.pi,
            channel: channel.clone(),
        })
    }

    pub fn channel(&self) -> &Dmc {
        &self.channel
    }

    pub fn kernel(&self) -> &DeBruijnKernel {
        &self.kernel
    }

    /// Stationary law over every tau-mer.
    fn initial_prior(&self) -> Vec<(usize, f64)> {
        self.pi
            .iter()
            .copied()
            .enumerate()
            .filter(|(_, p)| *p > 0.0)
            .collect()
    }

    /// Stationary law restricted to the loop-free successors of `prev`.
    fn successor_prior(&self, prev: usize) -> Vec<(usize, f64)> {
        let sp = self.kernel.space();
        let mut out: Vec<(usize, f64)> = (0..sp.q)
            .map(|a| sp.shift(prev, a))
            .filter(|&t| t != prev && self.kernel.transition(prev, t) > 0.0)
            .map(|t| (t, self.pi[t]))
            .collect();
        out.sort_by_key(|&(t, _)| t);
        out.dedup_by_key(|&mut (t, _)| t);
        let total: f64 = out.iter().map(|&(_, p)| p).sum();
        if total > 0.0 {
            out.iter_mut().for_each(|(_, p)| *p /= total);
        }
        out
    }
}

/// Detect boundaries, trim, MAP-decode each segment.
pub fn changepoint_decode(
    y: &[usize],
    model: &ChangePointModel,
    params: &ChangePointParams,
) -> Result<Vec<usize>> {
    let w = &model.channel;
    let rows: Vec<Vec<f64>> = (0..w.n_inputs()).map(|z| w.row(z)).collect();
    let mut out: Vec<usize> = Vec::new();
    let mut start = 0usize;
    while start < y.len() {
        let prior = match out.last() {
            None => model.initial_prior(),
            Some(&prev) => model.successor_prior(prev),
        };
        let est_end = (start + params.w0.max(1)).min(y.len());
        let pre = map_views(&y[start..est_end], &prior, w)?;
        let successors: Vec<Vec<f64>> = model
            .successor_prior(pre)
            .iter()
            .map(|&(t, _)| rows[t].clone())
            .collect();
        let detection = if successors.is_empty() {
            Detection::NoChange
        } else {
            let llr = log_ratios(&rows[pre], &successors);
            detect_with_ratios(&y[start..], &llr, params.prior_rho, params.alpha)
        };
        match detection {
            Detection::At(n) => {
                let t_hat = start + n;
                let end = if t_hat >= start + params.c && t_hat - params.c > start {
                    t_hat - params.c
                } else {
                    t_hat.max(start + 1)
                };
                out.push(map_views(&y[start..end], &prior, w)?);
                start = t_hat + 1;
            }
            Detection::NoChange => {
                out.push(map_views(&y[start..], &prior, w)?);
                break;
            }
        }
    }
    Ok(out)
}

/// Union-bound budget on the four ways a decode can fail: a segment length
/// outside `[ell, h]`, a false alarm, a delay beyond the trim, and a MAP error
/// on a trimmed window. Each term is capped at 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorBudget {
    pub out_of_range: f64,
    pub false_alarm: f64,
    pub late_detection: f64,
    pub map_error: f64,
}

impl ErrorBudget {
    pub fn total(&self) -> f64 {
        self.out_of_range + self.false_alarm + self.late_detection + self.map_error
    }
}

/// Evaluate the budget for `m` segments. The delay term uses Markov's
/// inequality on the `(1 + delta)(-ln alpha) / D_min` delay envelope; the MAP
/// term bounds each window of at least `ell - 2c` samples by
/// `(Q - 1) * max_pair Bhattacharyya^len`.
pub fn error_budget(
    m: usize,
    d: &DuplicationDist,
    w: &Dmc,
    params: &ChangePointParams,
    delta: f64,
) -> Result<ErrorBudget> {
    let outside: f64 = d
        .support()
        .iter()
        .zip(d.pmf())
        .filter(|(k, _)| !(params.ell..=params.h).contains(*k))
        .map(|(_, p)| p)
        .sum();
    let mf = m as f64;
    let out_of_range = 0.0 - (mf * (-outside.min(1.0)).ln_1p()).exp_m1();
    let false_alarm = (mf * params.h as f64 * params.alpha).min(1.0);
    let (kl_min, _) = w.min_pair_divergences();
    let late_detection = if params.c == 0 || kl_min <= 0.0 {
        1.0
    } else {
        ((1.0 + delta) * mf * -params.alpha.ln() / (params.c as f64 * kl_min)).min(1.0)
    };
    let n = w.n_inputs();
    let mut bc_max: f64 = 0.0;
    for z in 0..n {
        for z2 in z + 1..n {
            bc_max = bc_max.max(w.pairwise_bhattacharyya(z, z2)?);
        }
    }
    let len = params.ell.saturating_sub(2 * params.c) as f64;
    let map_error = (mf * (n as f64 - 1.0) * bc_max.powf(len)).min(1.0);
    Ok(ErrorBudget {
        out_of_range,
        false_alarm,
        late_detection,
        map_error,
    })
}
