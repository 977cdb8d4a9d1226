//! The Shiryaev change detector on its own: a Bernoulli stream switches law
//! at a known time; report detection delays and false alarms.

use nnc::decoders::{shiryaev_detect, Detection};
use nnc::error::Result;
use nnc::info::kl_divergence;
use nnc::rng::trace_rng;
use rand::Rng;

fn main() -> Result<()> {
    let pre = vec![0.8, 0.2];
    let post = vec![vec![0.3, 0.7]];
    let (rho, alpha, change) = (1e-3, 1e-4, 1000usize);
    let (mut delays, mut false_alarms) = (Vec::new(), 0);
    for i in 0..500 {
        let mut rng = trace_rng(3, i);
        let stream: Vec<usize> = (0..change + 500)
            .map(|t| {
                let p1 = if t < change { pre[1] } else { post[0][1] };
                (rng.random::<f64>() < p1) as usize
            })
            .collect();
        match shiryaev_detect(&stream, &pre, &post, rho, alpha)? {
            Detection::At(t) if t < change => false_alarms += 1,
            Detection::At(t) => delays.push((t - change) as f64),
            Detection::NoChange => {}
        }
    }
    let mean = delays.iter().sum::<f64>() / delays.len() as f64;
    let kl = kl_divergence(&post[0], &pre);
    println!("false alarms: {false_alarms}/500 at alpha = {alpha}");
    println!(
        "mean delay {mean:.1} samples; (-ln alpha - ln rho) / D = {:.1}",
        (-alpha.ln() - rho.ln()) / kl
    );
    Ok(())
}
