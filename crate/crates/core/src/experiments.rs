//! Batch experiments: density sweeps and makespan runs, with CSV output.
//!
//! Runs fan out over a rayon pool; results are always returned in a fixed
//! order so output is identical regardless of scheduling.

use std::io;

use rayon::prelude::*;

use crate::device::Device;
use crate::instances::{random_instance, GenError, GenParams};
use crate::sim::{generate_workload, simulate_schedule, Policy, SimConfig, SimError, WorkloadParams};
use crate::strategies::{greedy_defrag, tabu_defrag};

/// Mixes a base seed with cell coordinates (splitmix64).
pub fn cell_seed(base: u64, a: u64, b: u64) -> u64 {
    let mut z = base ^ a.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ b.wrapping_mul(0xc2b2_ae3d_27d4_eb4f);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Inclusive grid `from, from + step, ..., to`, free of accumulated drift.
pub fn density_grid(from: f64, to: f64, step: f64) -> Vec<f64> {
    if step <= 0.0 || to < from {
        return vec![from];
    }
    let steps = ((to - from) / step + 1e-9).floor() as usize;
    (0..=steps).map(|i| ((from + i as f64 * step) * 1e9).round() / 1e9).collect()
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub device_name: String,
    pub device: Device,
    pub densities: Vec<f64>,
    pub runs: usize,
    pub seed: u64,
}

/// Per-density averages over all runs.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub device: String,
    pub target_density: f64,
    pub runs: usize,
    pub mean_density: f64,
    pub before_max_free: f64,
    pub greedy_max_free: f64,
    pub tabu_max_free: f64,
    pub before_free_intervals: f64,
    pub greedy_free_intervals: f64,
    pub tabu_free_intervals: f64,
}

impl SweepRow {
    /// Relative gain of tabu over the input, `after / before - 1`.
    pub fn tabu_improvement(&self) -> f64 {
        self.tabu_max_free / self.before_max_free - 1.0
    }

    pub fn greedy_improvement(&self) -> f64 {
        self.greedy_max_free / self.before_max_free - 1.0
    }
}

struct SweepSample {
    density: f64,
    before: (usize, usize),
    greedy: (usize, usize),
    tabu: (usize, usize),
}

pub fn density_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>, GenError> {
    let cells: Vec<(usize, usize)> =
        (0..config.densities.len()).flat_map(|d| (0..config.runs).map(move |r| (d, r))).collect();
    let samples: Vec<SweepSample> = cells
        .par_iter()
        .map(|&(d, r)| {
            let params = GenParams {
                device: config.device.clone(),
                target_density: config.densities[d],
                seed: cell_seed(config.seed, d as u64, r as u64),
            };
            let generated = random_instance(&params)?;
            let layout = &generated.layout;
            let greedy = greedy_defrag(layout);
            let tabu = tabu_defrag(layout, None);
            Ok(SweepSample {
                density: generated.actual_density,
                before: (layout.max_free_interval(), layout.free_intervals().len()),
                greedy: (greedy.best_max_free, greedy.best_layout.free_intervals().len()),
                tabu: (tabu.best_max_free, tabu.best_layout.free_intervals().len()),
            })
        })
        .collect::<Result<_, GenError>>()?;

    Ok(config
        .densities
        .iter()
        .enumerate()
        .map(|(d, &target)| {
            let chunk = &samples[d * config.runs..(d + 1) * config.runs];
            let runs = chunk.len().max(1) as f64;
            let mean = |f: &dyn Fn(&SweepSample) -> f64| chunk.iter().map(f).sum::<f64>() / runs;
            SweepRow {
                device: config.device_name.clone(),
                target_density: target,
                runs: config.runs,
                mean_density: mean(&|s| s.density),
                before_max_free: mean(&|s| s.before.0 as f64),
                greedy_max_free: mean(&|s| s.greedy.0 as f64),
                tabu_max_free: mean(&|s| s.tabu.0 as f64),
                before_free_intervals: mean(&|s| s.before.1 as f64),
                greedy_free_intervals: mean(&|s| s.greedy.1 as f64),
                tabu_free_intervals: mean(&|s| s.tabu.1 as f64),
            }
        })
        .collect())
}

#[derive(Debug, Clone)]
pub struct MakespanConfig {
    pub device_length: usize,
    pub count: usize,
    pub size_mean: f64,
    pub duration_mean: f64,
    pub runs: usize,
    pub seed: u64,
    pub policies: Vec<Policy>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MakespanRow {
    pub seed: u64,
    pub policy: Policy,
    pub size_mean: f64,
    pub duration_mean: f64,
    pub makespan: u64,
    pub defrag_invocations: usize,
    pub relocations: usize,
    pub total_relocation_cost: u64,
    pub rejected_count: usize,
}

/// One row per (run, policy); run `i` uses workload seed `seed + i`.
pub fn makespan_runs(config: &MakespanConfig) -> Result<Vec<MakespanRow>, SimError> {
    let device = Device::homogeneous(config.device_length).map_err(|_| SimError::InvalidParameters)?;
    let cells: Vec<(u64, Policy)> = (0..config.runs as u64)
        .flat_map(|i| config.policies.iter().map(move |&p| (config.seed.wrapping_add(i), p)))
        .collect();
    cells
        .par_iter()
        .map(|&(seed, policy)| {
            let workload = generate_workload(&WorkloadParams {
                count: config.count,
                size_mean: config.size_mean,
                duration_mean: config.duration_mean,
                device_length: config.device_length,
                seed,
            })?;
            let report = simulate_schedule(&workload, &SimConfig { device: device.clone(), policy })?;
            Ok(MakespanRow {
                seed,
                policy,
                size_mean: config.size_mean,
                duration_mean: config.duration_mean,
                makespan: report.makespan,
                defrag_invocations: report.defrag_invocations,
                relocations: report.relocations,
                total_relocation_cost: report.total_relocation_cost,
                rejected_count: report.rejected_admissions,
            })
        })
        .collect()
}

/// Mean makespan per policy, in `policies` order.
pub fn mean_makespan(rows: &[MakespanRow], policy: Policy) -> f64 {
    let selected: Vec<f64> = rows.iter().filter(|r| r.policy == policy).map(|r| r.makespan as f64).collect();
    selected.iter().sum::<f64>() / selected.len().max(1) as f64
}

pub const SWEEP_HEADER: [&str; 10] = [
    "device",
    "target_density",
    "runs",
    "mean_density",
    "before_max_free",
    "greedy_max_free",
    "tabu_max_free",
    "before_free_intervals",
    "greedy_free_intervals",
    "tabu_free_intervals",
];

pub const MAKESPAN_HEADER: [&str; 9] = [
    "seed",
    "policy",
    "size_mean",
    "duration_mean",
    "makespan",
    "defrag_invocations",
    "relocations",
    "total_relocation_cost",
    "rejected_count",
];

fn f(v: f64) -> String {
    format!("{v:.4}")
}

pub fn write_sweep_csv<W: io::Write>(rows: &[SweepRow], out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for r in rows {
        w.write_record([
            r.device.clone(),
            format!("{:.2}", r.target_density),
            r.runs.to_string(),
            f(r.mean_density),
            f(r.before_max_free),
            f(r.greedy_max_free),
            f(r.tabu_max_free),
            f(r.before_free_intervals),
            f(r.greedy_free_intervals),
            f(r.tabu_free_intervals),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_makespan_csv<W: io::Write>(rows: &[MakespanRow], out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(MAKESPAN_HEADER)?;
    for r in rows {
        w.write_record([
            r.seed.to_string(),
            r.policy.to_string(),
            r.size_mean.to_string(),
            r.duration_mean.to_string(),
            r.makespan.to_string(),
            r.defrag_invocations.to_string(),
            r.relocations.to_string(),
            r.total_relocation_cost.to_string(),
            r.rejected_count.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
