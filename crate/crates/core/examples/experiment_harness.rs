//! Drive the experiment harness from code: the same key/value settings the
//! `nnc` binary accepts, written to a temporary output directory.

use std::collections::BTreeMap;

use nnc::error::Result;
use nnc::harness::{run, ExperimentConfig};

fn main() -> Result<()> {
    let out = std::env::temp_dir().join("nnc-example-harness");
    let settings = [
        ("mode", "simulate"),
        ("q", "2"),
        ("tau", "3"),
        ("dup", "iid:0.5;binom:2,0.5"),
        ("channel", "erasure:0.1,0.3"),
        ("m", "50"),
        ("trials", "500"),
        ("seed", "1"),
    ];
    let mut map: BTreeMap<String, String> = settings
        .iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();
    map.insert("out".into(), out.display().to_string());
    let summary = run(&ExperimentConfig::from_map(&map)?)?;
    println!(
        "{} grid points, {} rows",
        summary.grid_points, summary.rows_written
    );
    for e in &summary.estimates {
        println!(
            "{} {} m={}: p_hat {:.4}  95% CI [{:.4}, {:.4}]  Fano rate {:.4} {}",
            e.dup_kind, e.channel_param, e.m, e.p_hat, e.ci_low, e.ci_high, e.fano_rate, e.units
        );
    }
    print!("{}", std::fs::read_to_string(out.join("estimates.csv"))?);
    Ok(())
}
