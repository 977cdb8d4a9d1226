use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{DecoderChoice, DupSpec, ExperimentConfig, Format, Mode};
use super::MonteCarloEstimate;
use crate::alphabet::TauMerSpace;
use crate::bounds::{evaluate_bounds, BoundsInput};
use crate::decoders::{
    changepoint_decode, error_budget, ChangePointModel, ChangePointParams, CleanDecoder,
};
use crate::dmc::{ChannelSpec, Dmc, DmcKind};
use crate::duplication::DuplicationDist;
use crate::error::{Error, Result};
use crate::simulate::{write_trace, TraceSampler};
use crate::source::{stationary_info, DeBruijnKernel};
use crate::spectral::{noiseless_capacity, perron_root};
use crate::units::{Rate, Unit};

/// Outcome of one decoded trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub trace_id: u64,
    pub decoder: &'static str,
    pub m: usize,
    pub correct: bool,
    pub hamming_symbol_errors: usize,
    pub length_mismatch: bool,
    pub wall_time_us: u64,
}

impl Verdict {
    fn new(
        trace_id: u64,
        decoder: &'static str,
        truth: &[usize],
        decoded: Option<&[usize]>,
        us: u64,
    ) -> Self {
        let (ham, mismatch) = match decoded {
            Some(s) => {
                let common = s.len().min(truth.len());
                let diff = (0..common).filter(|&i| s[i] != truth[i]).count();
                (diff + s.len().abs_diff(truth.len()), s.len() != truth.len())
            }
            None => (truth.len(), true),
        };
        Verdict {
            trace_id,
            decoder,
            m: truth.len(),
            correct: ham == 0,
            hamming_symbol_errors: ham,
            length_mismatch: mismatch,
            wall_time_us: us,
        }
    }
}

/// What a run produced.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub mode: Mode,
    pub config: ExperimentConfig,
    pub grid_points: usize,
    pub resumed_from: usize,
    pub outputs: Vec<String>,
    pub rows_written: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub estimates: Vec<EstimateRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
struct BoundRow<'a> {
    q: u32,
    tau: u32,
    dup_kind: &'a str,
    dup_param: String,
    channel_kind: &'a str,
    channel_param: String,
    bound_name: &'a str,
    units: &'a str,
    value: f64,
    trivial_flag: bool,
}

#[derive(Debug, Clone, Serialize)]
struct CapacityRow {
    q: u32,
    tau: u32,
    lambda: f64,
    capacity_no_loop: f64,
    capacity_unconstrained: f64,
    units: &'static str,
}

/// One Monte Carlo grid point.
#[derive(Debug, Clone, Serialize)]
pub struct EstimateRow {
    pub grid_index: usize,
    pub q: u32,
    pub tau: u32,
    pub dup_kind: &'static str,
    pub dup_param: String,
    pub channel_kind: &'static str,
    pub channel_param: String,
    pub decoder: &'static str,
    pub m: usize,
    pub trials: usize,
    pub errors: usize,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Analytic error bound for the decoder at this point, when one applies.
    pub analytic_bound: Option<f64>,
    pub fano_rate: f64,
    pub units: &'static str,
}

/// Row sink that writes CSV or JSON lines and flushes on demand.
struct Sink {
    path: PathBuf,
    format: Format,
    csv: Option<csv::Writer<File>>,
    json: Option<BufWriter<File>>,
}

impl Sink {
    fn open(path: PathBuf, format: Format, append: bool) -> Result<Self> {
        let existing = append && fs::metadata(&path).map(|m| m.len() > 0).unwrap_or(false);
        let file = if append {
            OpenOptions::new().create(true).append(true).open(&path)?
        } else {
            File::create(&path)?
        };
        let (csv, json) = match format {
            Format::Csv => (
                Some(
                    csv::WriterBuilder::new()
                        .has_headers(!existing)
                        .from_writer(file),
                ),
                None,
            ),
            Format::Json => (None, Some(BufWriter::new(file))),
        };
        Ok(Sink {
            path,
            format,
            csv,
            json,
        })
    }

    fn row<T: Serialize>(&mut self, r: &T) -> Result<()> {
        match self.format {
            Format::Csv => self.csv.as_mut().unwrap().serialize(r)?,
            Format::Json => {
                let w = self.json.as_mut().unwrap();
                serde_json::to_writer(&mut *w, r)?;
                w.write_all(b"\n")?;
            }
        }
        Ok(())
    }

    fn flush(&mut self) -> Result<()> {
        if let Some(w) = self.csv.as_mut() {
            w.flush()?;
        }
        if let Some(w) = self.json.as_mut() {
            w.flush()?;
        }
        Ok(())
    }
}

fn ext(format: Format) -> &'static str {
    match format {
        Format::Csv => "csv",
        Format::Json => "jsonl",
    }
}

fn name(p: &Path) -> String {
    p.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Execute a configured experiment, writing every artefact below `config.out`.
pub fn run(config: &ExperimentConfig) -> Result<RunSummary> {
    fs::create_dir_all(&config.out)?;
    let mut summary = RunSummary {
        mode: config.mode,
        config: config.clone(),
        grid_points: 0,
        resumed_from: config.resume_from,
        outputs: Vec::new(),
        rows_written: 0,
        estimates: Vec::new(),
        diagnostics: Vec::new(),
    };
    match config.mode {
        Mode::CapacityTable => capacity_table(config, &mut summary)?,
        Mode::BoundsSweep => bounds_sweep(config, &mut summary)?,
        Mode::Simulate => simulate(config, &mut summary)?,
        Mode::TraceDump => trace_dump(config, &mut summary)?,
    }
    let path = config.out.join("summary.json");
    let mut f = BufWriter::new(File::create(&path)?);
    serde_json::to_writer_pretty(&mut f, &summary)?;
    f.write_all(b"\n")?;
    f.flush()?;
    summary.outputs.push(name(&path));
    Ok(summary)
}

/// Record the next grid index so an interrupted sweep can resume there.
fn mark_progress(out: &Path, next: usize) -> Result<()> {
    fs::write(
        out.join("progress.json"),
        format!("{{\"next_grid_index\":{next}}}\n"),
    )?;
    Ok(())
}

fn capacity_table(c: &ExperimentConfig, s: &mut RunSummary) -> Result<()> {
    let path = c.out.join(format!("capacity.{}", ext(c.format)));
    let mut sink = Sink::open(path.clone(), c.format, c.resume_from > 0)?;
    let grid: Vec<(u32, u32)> =
        c.q.iter()
            .flat_map(|&q| c.tau.iter().map(move |&t| (q, t)))
            .collect();
    s.grid_points = grid.len();
    for (g, &(q, tau)) in grid.iter().enumerate().skip(c.resume_from) {
        let lambda = perron_root(&TauMerSpace::new(q, tau)?, true)?.lambda;
        let cap = noiseless_capacity(q, tau, true)?;
        let conv = |v: f64| {
            Rate {
                value: v,
                unit: Unit::PerBase,
            }
            .to(c.units, q, tau)
            .value
        };
        sink.row(&CapacityRow {
            q,
            tau,
            lambda,
            capacity_no_loop: conv(cap),
            capacity_unconstrained: conv(1.0),
            units: c.units.tag(),
        })?;
        sink.flush()?;
        s.rows_written += 1;
        mark_progress(&c.out, g + 1)?;
    }
    s.outputs.push(name(&sink.path));
    Ok(())
}

/// Every (q, tau, dup, channel) combination in grid order.
fn model_grid(c: &ExperimentConfig) -> Vec<(u32, u32, &DupSpec, &ChannelSpec)> {
    let mut out = Vec::new();
    for &q in &c.q {
        for &tau in &c.tau {
            for d in &c.dup {
                for w in &c.channel {
                    out.push((q, tau, d, w));
                }
            }
        }
    }
    out
}

fn bounds_sweep(c: &ExperimentConfig, s: &mut RunSummary) -> Result<()> {
    let path = c.out.join(format!("bounds.{}", ext(c.format)));
    let mut sink = Sink::open(path.clone(), c.format, c.resume_from > 0)?;
    let grid = model_grid(c);
    s.grid_points = grid.len();
    for (g, &(q, tau, ds, ws)) in grid.iter().enumerate().skip(c.resume_from) {
        let d = ds.build()?;
        let w = Dmc::from_spec(ws, q, tau)?;
        let (dl, wl) = (ds.to_string(), ws.to_string());
        let report = evaluate_bounds(&BoundsInput {
            q,
            tau,
            kernel: c.kernel,
            dup: &d,
            dup_label: &dl,
            channel: &w,
            channel_label: &wl,
            unit: c.units,
        })?;
        for (bound_name, b) in report.entries() {
            sink.row(&BoundRow {
                q,
                tau,
                dup_kind: ds.kind(),
                dup_param: ds.param(),
                channel_kind: ws.kind(),
                channel_param: ws.param(),
                bound_name,
                units: b.unit.tag(),
                value: b.value,
                trivial_flag: b.trivial,
            })?;
            s.rows_written += 1;
        }
        s.diagnostics.extend(
            report
                .diagnostics
                .iter()
                .map(|m| format!("q={q} tau={tau} {dl} {wl}: {m}")),
        );
        sink.flush()?;
        mark_progress(&c.out, g + 1)?;
    }
    s.outputs.push(name(&sink.path));
    Ok(())
}

enum Decoder {
    Clean(CleanDecoder),
    Changepoint(ChangePointModel, ChangePointParams),
}

impl Decoder {
    fn name(&self) -> &'static str {
        match self {
            Decoder::Clean(_) => "clean",
            Decoder::Changepoint(..) => "changepoint",
        }
    }

    fn decode(&self, y: &[usize], m: usize) -> Result<Option<Vec<usize>>> {
        match self {
            Decoder::Clean(dec) => Ok(dec.decode(y, Some(m))?.s_hat),
            Decoder::Changepoint(model, params) => match changepoint_decode(y, model, params) {
                Ok(s) => Ok(Some(s)),
                Err(Error::InconsistentWindow) => Ok(None),
                Err(e) => Err(e),
            },
        }
    }
}

fn changepoint_params(
    c: &ExperimentConfig,
    m: usize,
    d: &DuplicationDist,
) -> Result<ChangePointParams> {
    match (c.alpha, c.trim) {
        (Some(alpha), Some(trim)) => ChangePointParams::custom(d.min(), d.max(), alpha, trim, d),
        (None, None) => ChangePointParams::asymptotic(m, c.gamma, 1.0, d),
        _ => Err(Error::Config(
            "alpha and trim must be given together".into(),
        )),
    }
}

fn build_decoder(
    c: &ExperimentConfig,
    k: &DeBruijnKernel,
    d: &DuplicationDist,
    w: &Dmc,
    m: usize,
) -> Result<(Decoder, Option<f64>)> {
    let eps = match w.kind() {
        DmcKind::Clean => Some(0.0),
        DmcKind::Erasure(e) => Some(e),
        _ => None,
    };
    let choice = match c.decoder {
        DecoderChoice::Auto if eps.is_some() => DecoderChoice::Clean,
        DecoderChoice::Auto => DecoderChoice::Changepoint,
        other => other,
    };
    match choice {
        DecoderChoice::Clean => {
            let eps = eps.ok_or_else(|| {
                Error::Config("the clean decoder needs a clean or erasure channel".into())
            })?;
            let bound = m as f64 * d.mean() * eps.powi(k.tau() as i32);
            Ok((
                Decoder::Clean(CleanDecoder::with_model(k, d, eps)?),
                Some(bound),
            ))
        }
        _ => {
            let params = changepoint_params(c, m, d)?;
            let budget = error_budget(m, d, w, &params, 0.5)?;
            let model = ChangePointModel::new(k, w)?;
            Ok((
                Decoder::Changepoint(model, params),
                Some(budget.total().min(1.0)),
            ))
        }
    }
}

fn simulate(c: &ExperimentConfig, s: &mut RunSummary) -> Result<()> {
    let append = c.resume_from > 0;
    let est_path = c.out.join(format!("estimates.{}", ext(c.format)));
    let mut sink = Sink::open(est_path.clone(), c.format, append)?;
    let ver_path = c.out.join("verdicts.jsonl");
    let mut verdicts = Sink::open(ver_path.clone(), Format::Json, append)?;
    let mut grid = Vec::new();
    for (q, tau, ds, ws) in model_grid(c) {
        for &m in &c.m {
            grid.push((q, tau, ds, ws, m));
        }
    }
    s.grid_points = grid.len();
    for (g, &(q, tau, ds, ws, m)) in grid.iter().enumerate().skip(c.resume_from) {
        let k = c.kernel.build(q, tau)?;
        let d = ds.build()?;
        let w = Dmc::from_spec(ws, q, tau)?;
        let (dec, bound) = build_decoder(c, &k, &d, &w, m)?;
        let sampler = TraceSampler::new(&k, &d, &w)?;
        let results: Vec<Result<Verdict>> = (0..c.trials as u64)
            .into_par_iter()
            .map(|i| {
                let tr = sampler.sample_indexed(m, c.seed, i)?;
                let t0 = Instant::now();
                let out = dec.decode(&tr.y, m)?;
                let us = t0.elapsed().as_micros() as u64;
                Ok(Verdict::new(i, dec.name(), &tr.s, out.as_deref(), us))
            })
            .collect();
        let mut errors = 0;
        for v in results {
            let v = v?;
            errors += (!v.correct) as usize;
            verdicts.row(&v)?;
        }
        let h = stationary_info(&k)?.entropy_rate(Unit::PerBase);
        let est = MonteCarloEstimate::new(c.trials, errors, h, tau, q, c.units);
        let row = EstimateRow {
            grid_index: g,
            q,
            tau,
            dup_kind: ds.kind(),
            dup_param: ds.param(),
            channel_kind: ws.kind(),
            channel_param: ws.param(),
            decoder: dec.name(),
            m,
            trials: est.trials,
            errors,
            p_hat: est.p_hat,
            ci_low: est.wilson_ci_95.0,
            ci_high: est.wilson_ci_95.1,
            analytic_bound: bound,
            fano_rate: est.fano_rate.value,
            units: c.units.tag(),
        };
        sink.row(&row)?;
        sink.flush()?;
        verdicts.flush()?;
        s.rows_written += 1;
        s.estimates.push(row);
        mark_progress(&c.out, g + 1)?;
    }
    s.outputs.push(name(&sink.path));
    s.outputs.push(name(&verdicts.path));
    Ok(())
}

fn trace_dump(c: &ExperimentConfig, s: &mut RunSummary) -> Result<()> {
    let mut grid = Vec::new();
    for (q, tau, ds, ws) in model_grid(c) {
        for &m in &c.m {
            grid.push((q, tau, ds, ws, m));
        }
    }
    s.grid_points = grid.len();
    for (g, &(q, tau, ds, ws, m)) in grid.iter().enumerate().skip(c.resume_from) {
        let k = c.kernel.build(q, tau)?;
        let sampler = TraceSampler::new(&k, &ds.build()?, &Dmc::from_spec(ws, q, tau)?)?;
        let tr = sampler.sample_indexed(m, c.seed, g as u64)?;
        let rec = c.out.join(format!("trace-{g}.ndjson"));
        let ys = c.out.join(format!("trace-{g}-y.json"));
        let mut a = BufWriter::new(File::create(&rec)?);
        let mut b = BufWriter::new(File::create(&ys)?);
        write_trace(&tr, &mut a, &mut b)?;
        a.flush()?;
        b.flush()?;
        s.outputs.push(name(&rec));
        s.outputs.push(name(&ys));
        s.rows_written += tr.m();
        mark_progress(&c.out, g + 1)?;
    }
    Ok(())
}
