//! A configuration where the erasure lower bound is negative, and therefore
//! vacuous, even at a tiny erasure rate.

use nnc::bounds::erasure_lb;
use nnc::duplication::make_iid;
use nnc::error::Result;

fn main() -> Result<()> {
    let eps = 1.3e-4;
    let v = erasure_lb(4, 4, &make_iid(0.5)?, eps)?;
    println!(
        "q=4, tau=4, K = 1 + Ber(0.5), eps = {eps}: {:.6} {} (trivial: {})",
        v.value,
        v.unit.tag(),
        v.value < 0.0
    );
    println!("\nsign across the duplication probability:");
    for p in [0.0, 0.01, 0.05, 0.1, 0.3, 0.5, 0.9, 0.95, 1.0] {
        println!(
            "  p = {p:<4}: {:>10.6}",
            erasure_lb(4, 4, &make_iid(p)?, eps)?.value
        );
    }
    Ok(())
}
