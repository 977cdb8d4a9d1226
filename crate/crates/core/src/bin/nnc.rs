use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use nnc::error::Result;
use nnc::harness::{self, config, ExperimentConfig};

/// Capacity bounds, trace simulation and decoding for the noisy nanopore channel.
///
/// Grids: `v1,v2`, `lo..hi` (integers) or `lo..hi/step`. Duplication laws:
/// `iid:P | binom:N,P | uniform:LO,HI | constant:K | table:PATH`, several
/// separated by `;`. Channels: `clean | erasure:EPS | symmetric:P | general:PATH`,
/// where EPS and P may be grids. Outputs go to the directory given by `--out`.
#[derive(Parser, Debug)]
#[command(name = "nnc", version)]
struct Cli {
    /// bounds-sweep | simulate | capacity-table | trace-dump
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    tau: Option<String>,
    /// Sweep tau from the smallest `--tau` value up to this one.
    #[arg(long = "tau-max")]
    tau_max: Option<String>,
    #[arg(long)]
    dup: Option<String>,
    #[arg(long)]
    channel: Option<String>,
    /// Input length(s) for simulate and trace-dump.
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// per-base | bits | per-taumer
    #[arg(long)]
    units: Option<String>,
    /// Change-point false-alarm level (with --trim: custom schedules).
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    /// Change-point trimming length.
    #[arg(long)]
    trim: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// csv | json
    #[arg(long)]
    format: Option<String>,
    /// auto | clean | changepoint
    #[arg(long)]
    decoder: Option<String>,
    /// uniform | no-loop
    #[arg(long)]
    kernel: Option<String>,
    /// Flat `key = value` file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Skip grid points before this index and append to existing outputs.
    #[arg(long = "resume-from")]
    resume_from: Option<String>,
}

impl Cli {
    fn pairs(&self) -> [(&'static str, &Option<String>); 18] {
        [
            ("mode", &self.mode),
            ("q", &self.q),
            ("tau", &self.tau),
            ("tau-max", &self.tau_max),
            ("dup", &self.dup),
            ("channel", &self.channel),
            ("m", &self.m),
            ("trials", &self.trials),
            ("seed", &self.seed),
            ("units", &self.units),
            ("alpha", &self.alpha),
            ("gamma", &self.gamma),
            ("trim", &self.trim),
            ("out", &self.out),
            ("format", &self.format),
            ("decoder", &self.decoder),
            ("kernel", &self.kernel),
            ("resume-from", &self.resume_from),
        ]
    }
}

fn load(cli: &Cli) -> Result<ExperimentConfig> {
    let mut map = match &cli.config {
        Some(p) => config::load_config_file(p)?,
        None => BTreeMap::new(),
    };
    for (k, v) in cli.pairs() {
        if let Some(v) = v {
            map.insert(k.to_string(), v.clone());
        }
    }
    ExperimentConfig::from_map(&map)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match load(&cli).and_then(|c| harness::run(&c)) {
        Ok(summary) => {
            for o in &summary.outputs {
                println!("{}", summary.config.out.join(o).display());
            }
            for d in &summary.diagnostics {
                eprintln!("diagnostic: {d}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let report =
                serde_json::json!({ "error": harness::error_kind(&e), "message": e.to_string() });
            eprintln!("{report}");
            ExitCode::from(harness::exit_code(&e) as u8)
        }
    }
}
