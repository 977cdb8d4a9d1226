//! Burst-filling decoder for the erasure channel, Monte Carlo error rate
//! against the `m E[K] eps^tau` estimate.
//!
//! `cargo run --release --example erasure_decoder -- [trials]`

use nnc::decoders::{erasure_clean_decode, CleanDecoder};
use nnc::dmc::Dmc;
use nnc::duplication::make_iid;
use nnc::error::Result;
use nnc::simulate::TraceSampler;
use nnc::source::build_noloop_max_entropic;
use rayon::prelude::*;

fn main() -> Result<()> {
    let trials: u64 = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(2000);
    let (q, tau, eps, m) = (4, 4, 0.2, 100);
    let k = build_noloop_max_entropic(q, tau)?;
    let d = make_iid(0.5)?;
    let w = Dmc::erasure(k.n_states(), eps)?;
    let sampler = TraceSampler::new(&k, &d, &w)?;
    let informed = CleanDecoder::with_model(&k, &d, eps)?;

    let tr = sampler.sample_indexed(12, 1, 0)?;
    let r = erasure_clean_decode(&tr.y, q, tau)?;
    println!("y     = {:?}", tr.y);
    println!("s     = {:?}", tr.s);
    println!(
        "s_hat = {:?} (ambiguous bursts {})",
        r.s_hat, r.ambiguous_bursts
    );

    let (blind, model): (usize, usize) = (0..trials)
        .into_par_iter()
        .map(|i| {
            let tr = sampler.sample_indexed(m, 2024, i).unwrap();
            let ok = |s: Option<Vec<usize>>| (s.as_deref() == Some(&tr.s[..])) as usize;
            let a = ok(erasure_clean_decode(&tr.y, q, tau).unwrap().s_hat);
            let b = ok(informed.decode(&tr.y, Some(m)).unwrap().s_hat);
            (1 - a, 1 - b)
        })
        .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
    let n = trials as f64;
    println!("\nq={q}, tau={tau}, eps={eps}, m={m}, {trials} traces");
    println!(
        "model-free decoder error rate:          {:.4}",
        blind as f64 / n
    );
    println!(
        "model-aware decoder with length hint:   {:.4}",
        model as f64 / n
    );
    println!(
        "m E[K] eps^tau:                         {:.4}",
        m as f64 * d.mean() * eps.powi(tau as i32)
    );
    Ok(())
}
