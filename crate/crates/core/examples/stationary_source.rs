//! Build the maximum-entropy loop-free source, inspect its stationary law
//! and sample a base sequence from it.

use nnc::error::Result;
use nnc::source::{
    build_noloop_max_entropic, expected_run_count_exact, sample_sequence, stationary_info,
};
use nnc::units::Unit;

fn main() -> Result<()> {
    let (q, tau) = (4, 3);
    let k = build_noloop_max_entropic(q, tau)?;
    let info = stationary_info(&k)?;
    for unit in [Unit::PerBase, Unit::Bits, Unit::PerTauMer] {
        let r = info.entropy_rate(unit);
        println!("entropy rate: {:.6} {}", r.value, r.unit.tag());
    }
    let sp = k.space();
    let aaa = sp.constant(0);
    println!(
        "pi(AAA) = {:.6}, expected AAA runs in 1000 tau-mers: {:.3}",
        info.pi[aaa],
        expected_run_count_exact(&info, sp, 0, 1000)
    );

    let s = sample_sequence(&k, 40, 7)?;
    let letters: String = s
        .bases
        .iter()
        .map(|&b| b"ACGT"[b as usize] as char)
        .collect();
    println!("bases:   {letters}");
    println!("tau-mers: {:?}", &s.states[..10]);
    Ok(())
}
