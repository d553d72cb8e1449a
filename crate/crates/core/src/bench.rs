//! Benchmark harness over generated datasets.

use std::io::Write;

use serde::Serialize;

use crate::datagen::generate_dataset;
use crate::error::{Error, Result};
use crate::resources::{current_memory, peak_memory, process_cpu_seconds, reset_peak_memory};
use crate::solve::{solve, Algorithm, SolveOptions};

/// `(m, n, k)`.
pub type Shape = (usize, usize, usize);

pub const DEFAULT_BASE: Shape = (4, 4, 10);

/// The base shape plus one axis varied at a time, without duplicates.
pub fn default_grid() -> Vec<Shape> {
    let (m0, n0, k0) = DEFAULT_BASE;
    let mut out = Vec::new();
    let mut push = |s: Shape| {
        if !out.contains(&s) {
            out.push(s);
        }
    };
    for m in 1..=6 {
        push((m, n0, k0));
    }
    for n in [2, 4, 6, 8, 10] {
        push((m0, n, k0));
    }
    for k in [5, 10, 15, 20, 25] {
        push((m0, n0, k));
    }
    out
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub algorithms: Vec<Algorithm>,
    pub grid: Vec<Shape>,
    pub trials: usize,
    pub seed: u64,
    pub options: SolveOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Budget,
    Infeasible,
    Error,
}

/// One CSV line. Raw rows carry a trial number; aggregate rows carry the
/// mean with min and max over the successful trials.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub row: &'static str,
    pub algo: String,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub trial: Option<usize>,
    pub seed: Option<u64>,
    pub status: Status,
    pub cpu_seconds: Option<f64>,
    pub cpu_min: Option<f64>,
    pub cpu_max: Option<f64>,
    pub peak_mem: Option<f64>,
    pub peak_mem_min: Option<f64>,
    pub peak_mem_max: Option<f64>,
    pub fd_nodes: Option<f64>,
    pub fd_edges: Option<f64>,
}

fn run_trial(
    algo: Algorithm,
    shape: Shape,
    trial: usize,
    seed: u64,
    opts: &SolveOptions,
) -> Result<BenchRow> {
    let (m, n, k) = shape;
    let instance = generate_dataset(m, n, k, seed)?.instance()?;
    reset_peak_memory();
    let base_mem = current_memory().unwrap_or(0);
    let start = process_cpu_seconds();
    let outcome = solve(&instance, algo, opts);
    let cpu = process_cpu_seconds() - start;
    let mem = peak_memory().map(|p| p.saturating_sub(base_mem) as f64);
    let mut row = BenchRow {
        row: "raw",
        algo: algo.to_string(),
        m,
        n,
        k,
        trial: Some(trial),
        seed: Some(seed),
        status: Status::Ok,
        cpu_seconds: Some(cpu),
        cpu_min: None,
        cpu_max: None,
        peak_mem: mem,
        peak_mem_min: None,
        peak_mem_max: None,
        fd_nodes: None,
        fd_edges: None,
    };
    match outcome {
        Ok(sol) => {
            row.fd_nodes = Some(sol.fd_size() as f64);
            row.fd_edges = Some(sol.diagram.edge_count() as f64);
        }
        Err(Error::Budget(_)) => row.status = Status::Budget,
        Err(Error::Infeasible(_) | Error::BeamDeadEnd { .. }) => row.status = Status::Infeasible,
        Err(e @ (Error::FlagViolation { .. } | Error::InvalidParameter(_))) => return Err(e),
        Err(_) => row.status = Status::Error,
    }
    Ok(row)
}

fn aggregate(raw: &[BenchRow]) -> BenchRow {
    let first = &raw[0];
    let ok: Vec<&BenchRow> = raw.iter().filter(|r| r.status == Status::Ok).collect();
    let status = raw
        .iter()
        .map(|r| r.status)
        .find(|s| *s != Status::Ok)
        .unwrap_or(Status::Ok);
    let stat = |f: fn(&BenchRow) -> Option<f64>| -> (Option<f64>, Option<f64>, Option<f64>) {
        let vals: Vec<f64> = ok.iter().filter_map(|r| f(r)).collect();
        if vals.is_empty() {
            return (None, None, None);
        }
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (Some(mean), Some(min), Some(max))
    };
    let (cpu, cpu_min, cpu_max) = stat(|r| r.cpu_seconds);
    let (mem, mem_min, mem_max) = stat(|r| r.peak_mem);
    BenchRow {
        row: "mean",
        algo: first.algo.clone(),
        m: first.m,
        n: first.n,
        k: first.k,
        trial: None,
        seed: None,
        status,
        cpu_seconds: cpu,
        cpu_min,
        cpu_max,
        peak_mem: mem,
        peak_mem_min: mem_min,
        peak_mem_max: mem_max,
        fd_nodes: stat(|r| r.fd_nodes).0,
        fd_edges: stat(|r| r.fd_edges).0,
    }
}

/// Runs every `(algorithm, shape)` pair `trials` times with seeds
/// `seed, seed + 1, …`, calling `on_row` as rows become available.
pub fn run_bench(cfg: &BenchConfig, mut on_row: impl FnMut(&BenchRow)) -> Result<Vec<BenchRow>> {
    if cfg.trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let mut rows = Vec::new();
    for &algo in &cfg.algorithms {
        for &shape in &cfg.grid {
            let mut raw = Vec::with_capacity(cfg.trials);
            for trial in 0..cfg.trials {
                let seed = cfg.seed.wrapping_add(trial as u64);
                let row = run_trial(algo, shape, trial, seed, &cfg.options)?;
                on_row(&row);
                raw.push(row);
            }
            let mean = aggregate(&raw);
            on_row(&mean);
            rows.extend(raw);
            rows.push(mean);
        }
    }
    Ok(rows)
}

pub fn write_csv(rows: &[BenchRow], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)
            .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    }
    w.flush()?;
    Ok(())
}
