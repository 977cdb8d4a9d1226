//! Noiseless capacities of the de Bruijn graph with and without self-loops.
//!
//! `cargo run --example capacity_table`

use nnc::alphabet::TauMerSpace;
use nnc::error::Result;
use nnc::spectral::{noiseless_capacity, perron_root};

fn main() -> Result<()> {
    println!(
        "{:>2} {:>3} {:>14} {:>12} {:>10}",
        "q", "tau", "lambda", "C no-loop", "iters"
    );
    for q in 2..=4u32 {
        for tau in 1..=6u32 {
            let p = perron_root(&TauMerSpace::new(q, tau)?, true)?;
            let c = noiseless_capacity(q, tau, true)?;
            println!(
                "{q:>2} {tau:>3} {:>14.10} {c:>12.8} {:>10}",
                p.lambda, p.iterations
            );
        }
    }
    // with self-loops allowed every state has q successors, so lambda = q
    let full = perron_root(&TauMerSpace::new(4, 6)?, false)?;
    println!("\nunconstrained q=4, tau=6: lambda = {}", full.lambda);
    Ok(())
}
