//! Every capacity bound for one configuration, with units and triviality
//! flags, plus any ordering violations the evaluator noticed.

use nnc::bounds::{evaluate_bounds, BoundsInput, KernelChoice};
use nnc::dmc::Dmc;
use nnc::duplication::make_iid;
use nnc::error::Result;
use nnc::units::Unit;

fn main() -> Result<()> {
    let (q, tau) = (3, 2);
    let d = make_iid(0.999)?;
    for eps in [0.0, 0.004, 0.05] {
        let w = Dmc::erasure(9, eps)?;
        let report = evaluate_bounds(&BoundsInput {
            q,
            tau,
            kernel: KernelChoice::Uniform,
            dup: &d,
            dup_label: "iid:0.999",
            channel: &w,
            channel_label: &format!("erasure:{eps}"),
            unit: Unit::PerBase,
        })?;
        println!("erasure {eps}:");
        for (name, b) in report.entries() {
            let flag = if b.trivial { " (trivial)" } else { "" };
            println!("  {name:<22} {:>10.6} {}{flag}", b.value, b.unit.tag());
        }
        for msg in &report.diagnostics {
            println!("  ! {msg}");
        }
    }
    Ok(())
}
