//! Lower bounds for the erasure channel as the erasure rate and the tau-mer
//! length vary.

use nnc::bounds::{erasure_lb, erasure_regime_lb};
use nnc::duplication::make_iid;
use nnc::error::Result;

fn main() -> Result<()> {
    let d = make_iid(0.999)?;
    println!("q=3, tau=2, K = 1 + Ber(0.999)");
    for i in 0..=10 {
        let eps = i as f64 * 0.005;
        println!("  eps {eps:.3}: {:.6}", erasure_lb(3, 2, &d, eps)?.value);
    }

    // for long tau-mers the loop-free source loses almost nothing to erasures
    let d = make_iid(0.5)?;
    println!("\nq=4, K = 1 + Ber(0.5), eps = 0.3");
    for tau in [2, 4, 6, 8, 10, 12] {
        let r = erasure_regime_lb(4, tau, &d, 0.3)?;
        println!("  tau {tau:>2}: {:.6} {}", r.value, r.unit.tag());
    }
    Ok(())
}
