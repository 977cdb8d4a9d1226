//! Property tests for the structural invariants of each component.

use proptest::prelude::*;

use nnc::alphabet::{run_decompose, taumer_shift, TauMer, TauMerSpace};
use nnc::bounds::{erasure_lb, erasure_regime_lb, general_lb, ub_dpi_noiseless};
use nnc::decoders::{map_views, CleanDecoder};
use nnc::dmc::{blahut_arimoto, Dmc};
use nnc::duplication::{
    make_binomial, make_iid, run_conditional_entropy, DuplicationDist, GeomRun, DEFAULT_TAIL_EPS,
};
use nnc::harness::wilson_ci_95;
use nnc::info::{binary_entropy, chernoff, convolve, entropy, kl_divergence};
use nnc::rng::trace_rng;
use nnc::simulate::TraceSampler;
use nnc::source::{
    build_noloop_max_entropic, build_uniform_kernel, expected_run_count, expected_run_count_exact,
    stationary_info, SourceSampler,
};
use nnc::spectral::noiseless_capacity;

fn small_space() -> impl Strategy<Value = (u32, u32)> {
    (2u32..=4, 1u32..=4)
}

fn pmf(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, n).prop_map(|v| {
        let s: f64 = v.iter().sum();
        v.into_iter().map(|x| x / s).collect()
    })
}

fn dup_law() -> impl Strategy<Value = DuplicationDist> {
    prop_oneof![
        (0.0f64..=1.0).prop_map(|p| make_iid(p).unwrap()),
        (1usize..=3, 0.0f64..=1.0).prop_map(|(n, p)| make_binomial(n, p).unwrap()),
        pmf(3).prop_map(|p| DuplicationDist::new(vec![1, 2, 4], p).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn digits_round_trip((q, tau) in small_space(), seed in any::<u64>()) {
        let sp = TauMerSpace::new(q, tau).unwrap();
        let code = (seed % sp.n_states() as u64) as usize;
        let digits = sp.digits(code);
        prop_assert_eq!(digits.len(), tau as usize);
        prop_assert_eq!(sp.encode(&digits).unwrap(), code);
    }

    #[test]
    fn shifting_in_tau_bases_reaches_that_taumer((q, tau) in small_space(), start in any::<u64>(), bases in prop::collection::vec(any::<u32>(), 4)) {
        let sp = TauMerSpace::new(q, tau).unwrap();
        let bases: Vec<u32> = bases[..tau as usize].iter().map(|b| b % q).collect();
        let mut s = TauMer::new(sp, (start % sp.n_states() as u64) as usize).unwrap();
        for &b in &bases {
            s = taumer_shift(s, b).unwrap();
        }
        prop_assert_eq!(s.bases(), bases);
    }

    #[test]
    fn run_decomposition_reconstructs(b in prop::collection::vec(0u8..3, 1..60)) {
        let r = run_decompose(&b).unwrap();
        prop_assert_eq!(r.lengths.iter().sum::<usize>(), b.len());
        prop_assert!(r.lengths.iter().all(|&l| l >= 1));
        prop_assert!(r.symbols.windows(2).all(|w| w[0] != w[1]));
        prop_assert_eq!(r.expand(), b);
    }

    #[test]
    fn kernels_are_stochastic_and_stationary((q, tau) in small_space(), no_loop in any::<bool>()) {
        prop_assume!(!(no_loop && q == 2 && tau == 1));
        let k = if no_loop { build_noloop_max_entropic(q, tau) } else { build_uniform_kernel(q, tau) }.unwrap();
        let sp = *k.space();
        for s in 0..k.n_states() {
            let row = k.row(s);
            prop_assert!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            prop_assert!(row.iter().all(|&p| p >= 0.0));
        }
        if no_loop {
            for b in 0..q {
                prop_assert_eq!(k.prob(sp.constant(b), b), 0.0);
            }
        }
        let info = stationary_info(&k).unwrap();
        prop_assert!((info.pi.iter().sum::<f64>() - 1.0).abs() <= 1e-10);
        for t in 0..k.n_states() {
            let flow: f64 = (0..k.n_states()).map(|s| info.pi[s] * k.transition(s, t)).sum();
            prop_assert!((flow - info.pi[t]).abs() <= 1e-10);
        }
        prop_assert!(info.leaving_probs.iter().all(|&p| p > 0.0 && p <= 1.0));
    }

    #[test]
    fn no_loop_capacity_is_bracketed((q, tau) in small_space()) {
        let c = noiseless_capacity(q, tau, true).unwrap();
        let c_next = noiseless_capacity(q, tau + 1, true).unwrap();
        let floor = ((q - 1) as f64).ln() / (q as f64).ln();
        prop_assert!(floor <= c + 1e-12 && c < 1.0);
        prop_assert!(c < c_next);
    }

    #[test]
    fn duplication_laws_are_valid(d in dup_law()) {
        prop_assert!(d.min() >= 1);
        prop_assert!((d.pmf().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!(d.pmf().iter().all(|&p| p >= 0.0));
    }

    #[test]
    fn geometric_run_law(p_b in 0.05f64..=1.0) {
        let g = GeomRun::new(p_b).unwrap();
        let mean: f64 = (1..5000).map(|n| n as f64 * g.pmf(n)).sum();
        prop_assert!((mean - 1.0 / p_b).abs() <= 1e-8);
        prop_assert_eq!(g.pmf(1), p_b);
    }

    #[test]
    fn conditional_run_entropy_is_bounded(p_b in 0.1f64..=1.0, d in dup_law()) {
        let h = run_conditional_entropy(p_b, &d, DEFAULT_TAIL_EPS).unwrap();
        let h_g = GeomRun::new(p_b).unwrap().entropy_nats();
        prop_assert!(h >= 0.0 && h <= h_g + 1e-12);
    }

    #[test]
    fn entropy_of_independent_sum_is_bracketed(a in pmf(5), b in pmf(4)) {
        let (ha, hb) = (entropy(&a), entropy(&b));
        let hs = entropy(&convolve(&a, &b));
        prop_assert!(ha.max(hb) <= hs + 1e-12);
        prop_assert!(hs <= ha + hb + 1e-12);
    }

    #[test]
    fn chernoff_is_below_both_divergences(p in pmf(4), r in pmf(4)) {
        let c = chernoff(&p, &r, 1e-10).distance;
        let d = kl_divergence(&p, &r).min(kl_divergence(&r, &p));
        prop_assert!(c <= d + 1e-9);
        prop_assert!(c >= 0.0);
    }

    #[test]
    fn channel_rows_are_stochastic(n in 2usize..=16, e in 0.0f64..=1.0) {
        for w in [Dmc::clean(n).unwrap(), Dmc::erasure(n, e).unwrap(), Dmc::symmetric(n, e).unwrap()] {
            for z in 0..n {
                let row = w.row(z);
                prop_assert!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            }
        }
        let er = Dmc::erasure(n, e).unwrap();
        prop_assert_eq!(er.n_outputs(), n + 1);
        prop_assert_eq!(er.prob(0, 0), 1.0 - e);
        prop_assert_eq!(er.prob(0, n), e);
        let sy = Dmc::symmetric(n, e).unwrap();
        prop_assert!((sy.prob(0, 1) - e / (n as f64 - 1.0)).abs() <= 1e-15);
    }

    #[test]
    fn pairwise_overlap_powers_decrease(p in 0.01f64..0.99, n in 2usize..8) {
        let w = Dmc::symmetric(n, p).unwrap();
        let beta = w.pairwise_bhattacharyya(0, 1).unwrap();
        prop_assume!(beta > 0.0 && beta < 1.0);
        let powers: Vec<f64> = (1..6).map(|k| beta.powi(k)).collect();
        prop_assert!(powers.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn symmetric_capacity_matches_closed_form(p in 0.0f64..0.9, n in 2usize..6) {
        let w = Dmc::symmetric(n, p).unwrap();
        let ba = blahut_arimoto(&w).unwrap().capacity;
        let closed = (n as f64).ln() - binary_entropy(p) - p * (n as f64 - 1.0).ln();
        prop_assert!((ba - closed).abs() <= 1e-8);
    }

    #[test]
    fn erasure_bound_is_nonincreasing_in_eps(q in 2u32..=4, tau in 1u32..=3, d in dup_law(), e1 in 0.0f64..0.5, de in 0.0f64..0.5) {
        let a = erasure_lb(q, tau, &d, e1).unwrap().value;
        let b = erasure_lb(q, tau, &d, e1 + de).unwrap().value;
        prop_assert!(b <= a + 1e-12);
    }

    #[test]
    fn lower_bounds_sit_below_the_noiseless_ceiling(q in 2u32..=3, tau in 1u32..=3, d in dup_law(), e in 0.0f64..=0.5) {
        prop_assume!(!(q == 2 && tau == 1));
        let k = build_noloop_max_entropic(q, tau).unwrap();
        let ub = ub_dpi_noiseless(&k, &d).unwrap();
        let w = Dmc::erasure(k.n_states(), e).unwrap();
        let g = general_lb(&k, &d, &w).unwrap();
        let r = erasure_regime_lb(q, tau, &d, e).unwrap();
        prop_assert_eq!(g.unit, ub.unit);
        prop_assert!(g.value <= ub.value + 1e-12);
        prop_assert!(r.to(ub.unit, q, tau).value <= ub.value + 1e-12);
    }

    #[test]
    fn traces_are_consistent((q, tau) in small_space(), d in dup_law(), e in 0.0f64..=1.0, m in 1usize..40, i in any::<u64>()) {
        prop_assume!(!(q == 2 && tau == 1));
        let k = build_noloop_max_entropic(q, tau).unwrap();
        let w = Dmc::erasure(k.n_states(), e).unwrap();
        let tr = TraceSampler::new(&k, &d, &w).unwrap().sample_indexed(m, 3, i).unwrap();
        prop_assert_eq!(tr.t[0], 0);
        prop_assert_eq!(tr.t.len(), m + 1);
        prop_assert_eq!(tr.z.len(), tr.t[m]);
        prop_assert_eq!(tr.y.len(), tr.z.len());
        for j in 0..m {
            prop_assert!(tr.k[j] >= 1);
            prop_assert_eq!(tr.t[j + 1], tr.t[j] + tr.k[j]);
            prop_assert!(tr.z[tr.t[j]..tr.t[j + 1]].iter().all(|&z| z == tr.s[j]));
        }
        for (&z, &y) in tr.z.iter().zip(&tr.y) {
            prop_assert!(y == z || y == k.n_states());
        }
    }

    #[test]
    fn clean_decoder_is_exact_without_erasures(q in prop::sample::select(vec![2u32, 4]), tau in 2u32..=4, d in dup_law(), m in 1usize..60, i in any::<u64>()) {
        let k = build_noloop_max_entropic(q, tau).unwrap();
        let w = Dmc::erasure(k.n_states(), 0.0).unwrap();
        let tr = TraceSampler::new(&k, &d, &w).unwrap().sample_indexed(m, 11, i).unwrap();
        let r = CleanDecoder::new(q, tau).unwrap().decode(&tr.y, None).unwrap();
        prop_assert_eq!(r.s_hat, Some(tr.s));
    }

    #[test]
    fn clean_decoder_output_respects_the_shift_constraint(d in dup_law(), e in 0.0f64..0.6, m in 1usize..40, i in any::<u64>()) {
        let (q, tau) = (2, 3);
        let k = build_noloop_max_entropic(q, tau).unwrap();
        let w = Dmc::erasure(k.n_states(), e).unwrap();
        let tr = TraceSampler::new(&k, &d, &w).unwrap().sample_indexed(m, 12, i).unwrap();
        let sp = *k.space();
        if let Some(s) = CleanDecoder::new(q, tau).unwrap().decode(&tr.y, None).unwrap().s_hat {
            for p in s.windows(2) {
                prop_assert!(p[0] != p[1]);
                prop_assert!((0..q).any(|b| sp.shift(p[0], b) == p[1]));
            }
        }
    }

    #[test]
    fn map_views_stays_inside_the_prior(prev in 0usize..9, p in 0.0f64..0.9, window in prop::collection::vec(0usize..9, 1..30)) {
        let sp = TauMerSpace::new(3, 2).unwrap();
        let w = Dmc::symmetric(9, p).unwrap();
        let prior: Vec<(usize, f64)> = (0..3).map(|b| sp.shift(prev, b)).filter(|&t| t != prev).map(|t| (t, 0.5)).collect();
        let s = map_views(&window, &prior, &w).unwrap();
        prop_assert!(prior.iter().any(|&(t, _)| t == s));
    }

    #[test]
    fn wilson_interval_contains_the_estimate(n in 1usize..5000, frac in 0.0f64..=1.0) {
        let e = ((n as f64) * frac).round() as usize;
        let (lo, hi) = wilson_ci_95(e, n);
        let p = e as f64 / n as f64;
        prop_assert!(0.0 <= lo && lo <= p && p <= hi && hi <= 1.0);
    }
}

/// Mean and standard error of a sample.
fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

#[test]
fn trace_length_per_input_matches_mean_duplication() {
    let k = build_noloop_max_entropic(2, 3).unwrap();
    let d = make_binomial(3, 0.4).unwrap();
    let w = Dmc::clean(8).unwrap();
    let ts = TraceSampler::new(&k, &d, &w).unwrap();
    let m = 50;
    let ratios: Vec<f64> = (0..10_000)
        .map(|i| ts.sample_indexed(m, 77, i).unwrap().len() as f64 / m as f64)
        .collect();
    let (mean, se) = mean_se(&ratios);
    assert!(
        (mean - d.mean()).abs() <= 3.0 * se,
        "{mean} vs {} (se {se})",
        d.mean()
    );
}

#[test]
fn constant_taumer_run_counts_match_their_expectation() {
    for (q, tau, no_loop) in [(2u32, 2u32, false), (3, 2, true), (2, 3, true)] {
        let k = if no_loop {
            build_noloop_max_entropic(q, tau)
        } else {
            build_uniform_kernel(q, tau)
        }
        .unwrap();
        let info = stationary_info(&k).unwrap();
        let sampler = SourceSampler::new(&k, &info);
        let c = k.space().constant(0);
        let m = 40;
        let counts: Vec<f64> = (0..10_000)
            .map(|i| {
                let s = sampler.sample(m, &mut trace_rng(5, i)).states;
                let r = run_decompose(&s).unwrap();
                r.lengths_of(&c).len() as f64
            })
            .collect();
        let (mean, se) = mean_se(&counts);
        let expect = expected_run_count_exact(&info, k.space(), 0, m);
        assert!(
            (mean - expect).abs() <= 3.0 * se,
            "q={q} tau={tau}: {mean} vs {expect} (se {se})"
        );
        // the exit-counting form misses a run left open at the end
        let gap = expect - expected_run_count(&k, &info, 0, m);
        assert!((gap - info.pi[c] * (1.0 - info.leaving_probs[0])).abs() < 1e-12);
    }
}
