//! Discrete memoryless channel tools: closed-form and Blahut-Arimoto
//! capacities, pairwise overlaps and divergences.

use nnc::dmc::{blahut_arimoto, Dmc};
use nnc::error::Result;
use nnc::units::Unit;

fn main() -> Result<()> {
    let n = 16;
    for w in [Dmc::erasure(n, 0.2)?, Dmc::symmetric(n, 0.1)?] {
        let ba = blahut_arimoto(&w)?;
        let closed = w.closed_form_capacity();
        let (kl, ch) = w.min_pair_divergences();
        println!(
            "{:<9} capacity {:.8} nats (closed form {:?}), {:.6} per tau-mer; min KL {kl:.4}, min Chernoff {ch:.4}, rho {:.4}",
            w.kind().name(),
            ba.capacity,
            closed,
            w.capacity(Unit::PerTauMer, 2, 4)?.value,
            w.rho()
        );
    }
    let general = Dmc::general(&[vec![0.9, 0.1, 0.0], vec![0.2, 0.5, 0.3]])?;
    let ba = blahut_arimoto(&general)?;
    println!(
        "general   capacity in [{:.10}, {:.10}] after {} iterations, input {:?}",
        ba.lower, ba.upper, ba.iterations, ba.input
    );
    Ok(())
}
