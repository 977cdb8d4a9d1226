//! Capacity bounds for a (source kernel, duplication law, channel) triple.
//!
//! Every function here returns a [`Rate`] in per-base units (logarithms to
//! base `q`), except [`ub_erasure_printed`] which uses per-tau-mer units.
//! Bhattacharyya-type penalty terms are dimensionless and are subtracted
//! from per-base entropies as they stand.

use serde::Serialize;

use crate::dmc::{symmetric_overlap, Dmc, DmcKind};
use crate::duplication::{run_conditional_entropy, DuplicationDist, DEFAULT_TAIL_EPS};
use crate::error::Result;
use crate::source::{
    build_noloop_max_entropic, build_uniform_kernel, stationary_info, DeBruijnKernel,
};
use crate::spectral::noiseless_capacity;
use crate::units::{Rate, Unit};

fn per_base(value: f64) -> Rate {
    Rate {
        value,
        unit: Unit::PerBase,
    }
}

fn ln_q(q: u32) -> f64 {
    (q as f64).ln()
}

/// Entropy rate minus the run-length ambiguity left after duplication:
/// `H(S) - sum_b pi(b..b) p_b H(G_b | sum K)`.
pub fn noiseless_lb(k: &DeBruijnKernel, d: &DuplicationDist) -> Result<Rate> {
    let info = stationary_info(k)?;
    let sp = k.space();
    let mut correction = 0.0;
    for b in 0..k.q() {
        let p_b = info.leaving_probs[b as usize];
        let pi_b = info.pi[sp.constant(b)];
        if pi_b == 0.0 {
            continue;
        }
        correction += pi_b * p_b * run_conditional_entropy(p_b, d, DEFAULT_TAIL_EPS)?;
    }
    Ok(per_base(
        (info.entropy_rate_nats() - correction) / ln_q(k.q()),
    ))
}

/// The same bound at the uniform kernel, in closed form:
/// `1 - ((q - 1) / q^(tau + 1)) * q * H(G_b | sum K)` with `p_b = (q - 1) / q`.
pub fn noiseless_lb_uniform(q: u32, tau: u32, d: &DuplicationDist) -> Result<Rate> {
    crate::alphabet::TauMerSpace::new(q, tau)?;
    let qf = q as f64;
    let p_b = (qf - 1.0) / qf;
    let h = run_conditional_entropy(p_b, d, DEFAULT_TAIL_EPS)? / ln_q(q);
    Ok(per_base(
        1.0 - (qf - 1.0) / qf.powi(tau as i32 + 1) * qf * h,
    ))
}

/// `E_K[Z_g(W^{(x)K})]` under input law `pi`.
pub fn expected_zg(w: &Dmc, pi: &[f64], d: &DuplicationDist) -> Result<f64> {
    let mut acc = 0.0;
    for (&k, &p) in d.support().iter().zip(d.pmf()) {
        acc += p * w.zg_k(pi, k as u32)?;
    }
    Ok(acc)
}

/// `E_K[rho(W^{(x)K})]`.
pub fn expected_rho(w: &Dmc, d: &DuplicationDist) -> f64 {
    d.support()
        .iter()
        .zip(d.pmf())
        .map(|(&k, &p)| p * w.rho_k(k as u32))
        .sum()
}

/// `H(S) - H(K) - E_K[Z_g(W^{(x)K})]` at kernel `k`.
pub fn general_lb(k: &DeBruijnKernel, d: &DuplicationDist, w: &Dmc) -> Result<Rate> {
    let info = stationary_info(k)?;
    let lq = ln_q(k.q());
    let zg = expected_zg(w, &info.pi, d)?;
    Ok(per_base(
        info.entropy_rate_nats() / lq - d.entropy_nats() / lq - zg,
    ))
}

/// `1 - H(K) - E_K[rho(W^{(x)K})]`, the uniform-input form.
pub fn uniform_lb(q: u32, tau: u32, d: &DuplicationDist, w: &Dmc) -> Result<Rate> {
    crate::alphabet::TauMerSpace::new(q, tau)?;
    Ok(per_base(
        1.0 - d.entropy_nats() / ln_q(q) - expected_rho(w, d),
    ))
}

fn n_states(q: u32, tau: u32) -> Result<f64> {
    Ok(crate::alphabet::TauMerSpace::new(q, tau)?.n_states() as f64)
}

/// Erasure specialization: `1 - H(K) - Q (Q - 1) E[eps^K]`, `Q = q^tau`.
pub fn erasure_lb(q: u32, tau: u32, d: &DuplicationDist, eps: f64) -> Result<Rate> {
    let n = n_states(q, tau)?;
    let e = d.expect(|k| eps.powi(k as i32));
    Ok(per_base(
        1.0 - d.entropy_nats() / ln_q(q) - n * (n - 1.0) * e,
    ))
}

/// Symmetric-channel specialization: `1 - H(K) - Q (Q - 1) E[g(p)^K]`.
pub fn symmetric_lb(q: u32, tau: u32, d: &DuplicationDist, p: f64) -> Result<Rate> {
    let n = n_states(q, tau)?;
    let g = symmetric_overlap(p, n as usize);
    let e = d.expect(|k| g.powi(k as i32));
    Ok(per_base(
        1.0 - d.entropy_nats() / ln_q(q) - n * (n - 1.0) * e,
    ))
}

/// `E[K] C(W)` expressed in `unit`.
pub fn ub_mean_k(d: &DuplicationDist, w: &Dmc, unit: Unit, q: u32, tau: u32) -> Result<Rate> {
    Ok(Rate::from_nats(d.mean() * w.capacity_nats()?, unit, q, tau))
}

/// `E[K] C(W)` in per-tau-mer units; for the erasure channel with `K = 1 + Ber(p)`
/// this is `(1 + p)(1 - eps)`.
pub fn ub_erasure_printed(d: &DuplicationDist, w: &Dmc, q: u32, tau: u32) -> Result<Rate> {
    ub_mean_k(d, w, Unit::PerTauMer, q, tau)
}

/// Data-processing bound: the noiseless bound at kernel `k`.
pub fn ub_dpi_noiseless(k: &DeBruijnKernel, d: &DuplicationDist) -> Result<Rate> {
    noiseless_lb(k, d)
}

/// Which canonical kernel a bound was evaluated at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelChoice {
    Uniform,
    NoLoop,
}

impl KernelChoice {
    pub fn build(self, q: u32, tau: u32) -> Result<DeBruijnKernel> {
        match self {
            KernelChoice::Uniform => build_uniform_kernel(q, tau),
            KernelChoice::NoLoop => build_noloop_max_entropic(q, tau),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            KernelChoice::Uniform => "uniform",
            KernelChoice::NoLoop => "no-loop",
        }
    }
}

/// The data-processing bound maximized over the two canonical kernels only;
/// the true supremum over kernels is not computed.
pub fn ub_dpi_noiseless_canonical(
    q: u32,
    tau: u32,
    d: &DuplicationDist,
) -> Result<(Rate, KernelChoice)> {
    let mut best = (
        ub_dpi_noiseless(&build_uniform_kernel(q, tau)?, d)?,
        KernelChoice::Uniform,
    );
    // (2, 1) has no aperiodic self-loop-free chain
    if let Ok(k) = build_noloop_max_entropic(q, tau) {
        let v = ub_dpi_noiseless(&k, d)?;
        if v.value > best.0.value {
            best = (v, KernelChoice::NoLoop);
        }
    }
    Ok(best)
}

/// `lim I(S; Z)/m - (E[K] H(Z | Y) - H(K))` at kernel `k`.
pub fn ub_output_loss(k: &DeBruijnKernel, d: &DuplicationDist, w: &Dmc) -> Result<Rate> {
    let info = stationary_info(k)?;
    let lq = ln_q(k.q());
    let izm = noiseless_lb(k, d)?.value;
    let hzy = w.cond_entropy_input_given_output(&info.pi)? / lq;
    Ok(per_base(izm - (d.mean() * hzy - d.entropy_nats() / lq)))
}

/// `C_tau(no-loop) - E[K] eps^tau tau`: the rate left after discarding
/// every erasure burst of length at least `tau`.
pub fn erasure_regime_lb(q: u32, tau: u32, d: &DuplicationDist, eps: f64) -> Result<Rate> {
    let c = noiseless_capacity(q, tau, true)?;
    Ok(per_base(c - d.mean() * eps.powi(tau as i32) * tau as f64))
}

/// One evaluated bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundValue {
    pub value: f64,
    pub unit: Unit,
    /// Negative lower bound, or upper bound above the noiseless ceiling.
    pub trivial: bool,
    /// True for lower bounds on the noisy capacity.
    #[serde(skip)]
    pub is_lower: bool,
}

/// All bounds that apply to one configuration.
#[derive(Debug, Clone, Serialize)]
pub struct BoundsReport {
    pub q: u32,
    pub tau: u32,
    pub kernel: KernelChoice,
    pub dup: String,
    pub channel: String,
    pub unit: Unit,
    pub noiseless_lb: Option<BoundValue>,
    pub noiseless_lb_uniform: Option<BoundValue>,
    pub general_lb: Option<BoundValue>,
    pub uniform_lb: Option<BoundValue>,
    pub erasure_lb: Option<BoundValue>,
    pub symmetric_lb: Option<BoundValue>,
    pub ub_mean_k: Option<BoundValue>,
    pub ub_erasure_printed: Option<BoundValue>,
    pub ub_dpi_noiseless: Option<BoundValue>,
    /// Kernel at which the data-processing bound peaked.
    pub ub_dpi_kernel: Option<KernelChoice>,
    pub ub_output_loss: Option<BoundValue>,
    pub erasure_regime_lb: Option<BoundValue>,
    /// Lower bounds exceeding upper bounds in the same units.
    pub diagnostics: Vec<String>,
}

impl BoundsReport {
    /// `(name, value)` for every present bound, in a fixed order.
    pub fn entries(&self) -> Vec<(&'static str, BoundValue)> {
        let all = [
            ("noiseless_lb", self.noiseless_lb),
            ("noiseless_lb_uniform", self.noiseless_lb_uniform),
            ("general_lb", self.general_lb),
            ("uniform_lb", self.uniform_lb),
            ("erasure_lb", self.erasure_lb),
            ("symmetric_lb", self.symmetric_lb),
            ("ub_mean_k", self.ub_mean_k),
            ("ub_erasure_printed", self.ub_erasure_printed),
            ("ub_dpi_noiseless", self.ub_dpi_noiseless),
            ("ub_output_loss", self.ub_output_loss),
            ("erasure_regime_lb", self.erasure_regime_lb),
        ];
        all.into_iter()
            .filter_map(|(n, v)| v.map(|v| (n, v)))
            .collect()
    }
}

/// One point of a bounds sweep.
#[derive(Debug, Clone, Copy)]
pub struct BoundsInput<'a> {
    pub q: u32,
    pub tau: u32,
    pub kernel: KernelChoice,
    pub dup: &'a DuplicationDist,
    pub dup_label: &'a str,
    pub channel: &'a Dmc,
    pub channel_label: &'a str,
    pub unit: Unit,
}

/// Evaluate every applicable bound. Per-base results are converted to `unit`;
/// the printed erasure form always stays per-tau-mer.
pub fn evaluate_bounds(input: &BoundsInput<'_>) -> Result<BoundsReport> {
    let BoundsInput {
        q,
        tau,
        kernel,
        dup: d,
        dup_label,
        channel: w,
        channel_label,
        unit,
    } = *input;
    let k = kernel.build(q, tau)?;
    let conv = |r: Rate, is_lower: bool| BoundValue {
        value: r.to(unit, q, tau).value,
        unit,
        trivial: false,
        is_lower,
    };
    let (dpi, dpi_kernel) = ub_dpi_noiseless_canonical(q, tau, d)?;
    let ceiling = dpi.value;

    let lower = |r: Rate| {
        let mut b = conv(r, true);
        b.trivial = r.value < 0.0;
        b
    };
    let noiseless = lower(noiseless_lb(&k, d)?);
    let noiseless_uniform = lower(noiseless_lb_uniform(q, tau, d)?);
    let general = lower(general_lb(&k, d, w)?);
    let uniform = lower(uniform_lb(q, tau, d, w)?);
    let (erasure, symmetric, regime) = match w.kind() {
        DmcKind::Erasure(e) => (
            Some(lower(erasure_lb(q, tau, d, e)?)),
            None,
            Some(lower(erasure_regime_lb(q, tau, d, e)?)),
        ),
        DmcKind::Symmetric(p) => (None, Some(lower(symmetric_lb(q, tau, d, p)?)), None),
        _ => (None, None, None),
    };
    // noiseless_lb bounds the noiseless channel, not this one
    let noiseless = BoundValue {
        is_lower: false,
        ..noiseless
    };
    let noiseless_uniform = BoundValue {
        is_lower: false,
        ..noiseless_uniform
    };

    let upper = |r: Rate| {
        let mut b = conv(r, false);
        b.trivial = r.to(Unit::PerBase, q, tau).value > ceiling + 1e-12;
        b
    };
    let mean_k = upper(ub_mean_k(d, w, Unit::PerBase, q, tau)?);
    let output_loss = upper(ub_output_loss(&k, d, w)?);
    let dpi_v = upper(dpi);
    let printed = match w.kind() {
        DmcKind::Erasure(_) => {
            let r = ub_erasure_printed(d, w, q, tau)?;
            Some(BoundValue {
                value: r.value,
                unit: Unit::PerTauMer,
                trivial: r.value >= 1.0,
                is_lower: false,
            })
        }
        _ => None,
    };

    let mut report = BoundsReport {
        q,
        tau,
        kernel,
        dup: dup_label.to_string(),
        channel: channel_label.to_string(),
        unit,
        noiseless_lb: Some(noiseless),
        noiseless_lb_uniform: Some(noiseless_uniform),
        general_lb: Some(general),
        uniform_lb: Some(uniform),
        erasure_lb: erasure,
        symmetric_lb: symmetric,
        ub_mean_k: Some(mean_k),
        ub_erasure_printed: printed,
        ub_dpi_noiseless: Some(dpi_v),
        ub_dpi_kernel: Some(dpi_kernel),
        ub_output_loss: Some(output_loss),
        erasure_regime_lb: regime,
        diagnostics: Vec::new(),
    };
    report.diagnostics = ordering_diagnostics(&report);
    Ok(report)
}

/// Every finite lower bound should sit below every finite upper bound of the
/// same unit. Violations are reported, never clamped.
pub fn ordering_diagnostics(r: &BoundsReport) -> Vec<String> {
    let entries = r.entries();
    let lows: Vec<_> = entries.iter().filter(|(_, v)| v.is_lower).collect();
    let ups: Vec<_> = entries
        .iter()
        .filter(|(n, _)| n.starts_with("ub_"))
        .collect();
    let mut out = Vec::new();
    for (ln, lv) in &lows {
        for (un, uv) in &ups {
            if lv.unit != uv.unit {
                continue;
            }
            if lv.value.is_finite() && uv.value.is_finite() && lv.value > uv.value + 1e-12 {
                out.push(format!(
                    "{ln} = {} exceeds {un} = {} ({})",
                    lv.value, uv.value, lv.unit
                ));
            }
        }
    }
    out
}
