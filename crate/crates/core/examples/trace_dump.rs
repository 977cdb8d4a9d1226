//! Sample one trace through source, duplication and channel, then write it
//! in the dump format: one `{i, s_i, k_i}` line per input followed by the
//! output array, with erasures coded as `q^tau`.

use std::io::stdout;

use nnc::dmc::Dmc;
use nnc::duplication::make_binomial;
use nnc::error::Result;
use nnc::simulate::{write_trace, TraceSampler};
use nnc::source::build_noloop_max_entropic;

fn main() -> Result<()> {
    let k = build_noloop_max_entropic(2, 3)?;
    let d = make_binomial(2, 0.5)?;
    let w = Dmc::erasure(k.n_states(), 0.25)?;
    let trace = TraceSampler::new(&k, &d, &w)?.sample_indexed(8, 42, 0)?;
    println!("m = {}, T_m = {}", trace.m(), trace.len());
    let out = stdout();
    write_trace(&trace, &mut out.lock(), &mut out.lock())?;
    Ok(())
}
