//! Change-point decoding over a noisy symmetric channel with long
//! duplication runs: detect each boundary with the Shiryaev statistic, trim,
//! then pick the most likely tau-mer for the segment.

use nnc::decoders::{changepoint_decode, error_budget, ChangePointModel, ChangePointParams};
use nnc::dmc::Dmc;
use nnc::duplication::make_uniform;
use nnc::error::Result;
use nnc::harness::fano_rate;
use nnc::simulate::TraceSampler;
use nnc::source::{build_noloop_max_entropic, stationary_info};
use nnc::units::Unit;
use rayon::prelude::*;

fn main() -> Result<()> {
    let (q, tau) = (2, 2);
    let k = build_noloop_max_entropic(q, tau)?;
    let w = Dmc::symmetric(k.n_states(), 0.1)?;
    let d = make_uniform(2000, 4000)?;
    let model = ChangePointModel::new(&k, &w)?;
    let params = ChangePointParams::custom(2000, 4000, 1e-5, 200, &d)?;
    let sampler = TraceSampler::new(&k, &d, &w)?;
    let h = stationary_info(&k)?.entropy_rate(Unit::PerBase);

    for m in [8usize, 16, 32] {
        let trials = 100u64;
        let errors: usize = (0..trials)
            .into_par_iter()
            .map(|i| {
                let tr = sampler.sample_indexed(m, 9, i).unwrap();
                (changepoint_decode(&tr.y, &model, &params).ok() != Some(tr.s)) as usize
            })
            .sum();
        let p = errors as f64 / trials as f64;
        let b = error_budget(m, &d, &w, &params, 0.5)?;
        println!(
            "m={m:>2}: error rate {p:.3}, budget {:.3} (range {:.1e}, false alarm {:.1e}, delay {:.3}, MAP {:.1e}), Fano rate {:.4}",
            b.total(),
            b.out_of_range,
            b.false_alarm,
            b.late_detection,
            b.map_error,
            fano_rate(h, p, tau, q, Unit::PerBase).value
        );
    }

    // the asymptotic schedule is only usable once m is large enough
    match ChangePointParams::asymptotic(8, 2.0, 0.5, &d) {
        Ok(p) => println!("asymptotic schedule at m=8: ell={} c={}", p.ell, p.c),
        Err(e) => println!("asymptotic schedule at m=8: {e}"),
    }
    Ok(())
}
