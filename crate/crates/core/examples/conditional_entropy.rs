//! The run-length uncertainty left after duplication, `H(G_b | K_1 + ... + K_{G_b})`,
//! computed exactly from the joint law and compared with the standard
//! closed-form expressions. The closed forms do not reproduce the exact
//! value; the differences are printed rather than hidden.

use nnc::duplication::{
    binomial_closed_form, compound_run, iid_closed_form, make_binomial, make_iid,
    run_conditional_entropy, DEFAULT_TAIL_EPS,
};
use nnc::error::Result;

fn main() -> Result<()> {
    let eps = DEFAULT_TAIL_EPS;
    println!("K = 1 + Ber(p), nats");
    println!(
        "{:>4} {:>4} {:>10} {:>10} {:>10} {:>10}",
        "p_b", "p", "exact", "H(G_b)", "closed", "chain"
    );
    for p_b in [0.2, 0.5, 0.8] {
        for p in [0.1, 0.5, 0.9] {
            let d = make_iid(p)?;
            let exact = run_conditional_entropy(p_b, &d, eps)?;
            let run = compound_run(p_b, &d, eps)?;
            let closed = iid_closed_form(p_b, p, eps)?;
            println!(
                "{p_b:>4} {p:>4} {exact:>10.6} {:>10.6} {closed:>10.6} {:>10.6}",
                run.h_g,
                run.chain_rule(p_b, &d)
            );
        }
    }
    println!("\nK = 1 + Bin(n, 0.5), p_b = 0.5");
    for n in 1..=3 {
        let exact = run_conditional_entropy(0.5, &make_binomial(n, 0.5)?, eps)?;
        let closed = binomial_closed_form(0.5, n, 0.5, eps)?;
        println!("n={n}: exact {exact:.6}, closed form {closed:.6}");
    }
    Ok(())
}
