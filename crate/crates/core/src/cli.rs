//! Command-line front end.
//!
//! Exit codes: 0 ok, 1 usage, 2 invalid or unreadable instance, 3 strategy
//! precondition failure.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::device::Device;
use crate::experiments::{
    density_grid, density_sweep, makespan_runs, write_makespan_csv, write_sweep_csv, MakespanConfig, SweepConfig,
};
use crate::format::{parse_layout, write_layout, write_moves};
use crate::instances::{
    flatten_rows, inapprox_instance, lower_bound_instance, random_instance, three_partition_instance, GenParams,
};
use crate::layout::Layout;
use crate::oracle::{bfs_optimum, min_moves_to_size, OracleOptions, Reachability, DEFAULT_BUDGET};
use crate::sim::Policy;
use crate::strategies::{tabu_defrag, LrsError, Strategy};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID_INSTANCE: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "fpga-defrag", version, about = "Defragment module layouts on column-reconfigurable devices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate an instance file.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
        /// Output file (stdout if omitted).
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Run a defragmentation strategy on an instance.
    Defrag {
        #[arg(long, value_parser = parse_strategy)]
        strategy: Strategy,
        #[arg(long = "in")]
        input: PathBuf,
        /// Tabu iteration limit (default 2n^2).
        #[arg(long)]
        max_iterations: Option<usize>,
        /// Write the resulting layout here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Average greedy/tabu results over random instances per density.
    Sweep {
        #[arg(long, default_value_t = 0.3)]
        density_from: f64,
        #[arg(long, default_value_t = 0.9)]
        density_to: f64,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        #[arg(long, default_value_t = 100)]
        runs: usize,
        #[arg(long, value_enum, default_value_t = DevicePreset::Het94)]
        device: DevicePreset,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate module sequences and report makespans.
    Makespan {
        #[arg(long)]
        size_mean: f64,
        #[arg(long)]
        duration_mean: f64,
        #[arg(long, default_value_t = 100)]
        runs: usize,
        #[arg(long, value_enum, default_value_t = PolicyChoice::All)]
        policy: PolicyChoice,
        /// Modules per sequence.
        #[arg(long, default_value_t = 200)]
        count: usize,
        /// Device length in columns.
        #[arg(long, default_value_t = 200)]
        length: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact optimum by breadth-first search (small instances only).
    Oracle {
        #[arg(long = "in")]
        input: PathBuf,
        /// Also report the fewest moves to reach a free interval of this size.
        #[arg(long)]
        target: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        /// Treat modules with identical patterns as interchangeable.
        #[arg(long)]
        interchangeable: bool,
    },
}

#[derive(Debug, Subcommand)]
enum GenKind {
    /// Random layout at a target density.
    Random(RandomArgs),
    /// Quadratic lower-bound staircase.
    Lowerbound {
        #[arg(long)]
        n: usize,
    },
    /// 3-Partition gadget.
    #[command(name = "3partition")]
    ThreePartition {
        #[arg(long, value_delimiter = ',', required = true)]
        c: Vec<usize>,
        #[arg(long)]
        bound: usize,
    },
    /// 3-Partition gadget extended with r ladder groups.
    Inapprox {
        #[arg(long, value_delimiter = ',', required = true)]
        c: Vec<usize>,
        #[arg(long)]
        bound: usize,
        #[arg(long)]
        r: usize,
    },
    /// Flatten 2D rows into a 1D device with separators (empty layout).
    Flatten {
        /// Comma-separated rows of slot types, e.g. `lllll,lllll`.
        #[arg(long, value_delimiter = ',', required = true)]
        rows: Vec<String>,
    },
}

#[derive(Debug, Args)]
struct RandomArgs {
    #[arg(long, value_enum, default_value_t = DevicePreset::Het94)]
    device: DevicePreset,
    #[arg(long)]
    density: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DevicePreset {
    Homogeneous94,
    Het94,
}

impl DevicePreset {
    fn device(self) -> Device {
        match self {
            DevicePreset::Homogeneous94 => Device::homogeneous94(),
            DevicePreset::Het94 => Device::het94(),
        }
    }

    fn name(self) -> &'static str {
        match self {
            DevicePreset::Homogeneous94 => "homogeneous94",
            DevicePreset::Het94 => "het94",
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PolicyChoice {
    None,
    Greedy,
    Tabu,
    All,
}

impl PolicyChoice {
    fn policies(self) -> Vec<Policy> {
        match self {
            PolicyChoice::None => vec![Policy::None],
            PolicyChoice::Greedy => vec![Policy::Greedy],
            PolicyChoice::Tabu => vec![Policy::Tabu],
            PolicyChoice::All => Policy::ALL.to_vec(),
        }
    }
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse()
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl ToString) -> Self {
        Failure { code: EXIT_USAGE, message: message.to_string() }
    }

    fn instance(message: impl ToString) -> Self {
        Failure { code: EXIT_INVALID_INSTANCE, message: message.to_string() }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match execute(cli.command, &mut out) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = out.flush();
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn read_layout(path: &Path) -> Result<Layout, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::instance(format!("{}: {e}", path.display())))?;
    parse_layout(&text).map_err(|e| Failure::instance(format!("{}: {e}", path.display())))
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::usage(format!("{}: {e}", p.display()))),
        None => out.write_all(text.as_bytes()).map_err(Failure::usage),
    }
}

fn csv_to(out: &mut dyn Write, path: Option<&Path>, write: impl FnOnce(&mut Vec<u8>) -> csv::Result<()>) -> Result<(), Failure> {
    let mut buf = Vec::new();
    write(&mut buf).map_err(Failure::usage)?;
    emit(out, path, &String::from_utf8(buf).expect("csv output is utf-8"))
}

fn execute(command: Command, out: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Gen { kind, out: path } => {
            let (layout, comments) = generate(kind)?;
            emit(out, path.as_deref(), &write_layout(&layout, &comments))
        }
        Command::Defrag { strategy, input, max_iterations, out: path } => {
            let layout = read_layout(&input)?;
            let report = match (strategy, max_iterations) {
                (Strategy::Tabu, Some(limit)) => Ok(tabu_defrag(&layout, Some(limit))),
                _ => strategy.run(&layout),
            };
            let report = report.map_err(|e| {
                let message = match &e {
                    LrsError::DensityTooHigh { density, bound } => {
                        format!("precondition failed: density {density:.4} > bound {bound:.4}")
                    }
                    other => format!("precondition failed: {other}"),
                };
                Failure { code: EXIT_PRECONDITION, message }
            })?;
            let mut text = String::new();
            text.push_str(&format!("strategy {strategy}\n"));
            text.push_str(&metrics_line("before", &layout));
            text.push_str(&metrics_line("after", &report.best_layout));
            text.push_str(&format!("best_max_free {}\n", report.best_max_free));
            text.push_str(&format!("best_fitness {:.4}\n", report.best_fitness));
            text.push_str(&format!("iterations {}\n", report.iterations_used));
            text.push_str(&format!("moves {} best_step {}\n", report.moves.len(), report.best_step));
            text.push_str(&write_moves(&report.moves));
            emit(out, None, &text)?;
            if let Some(p) = path {
                let comments = vec![format!("defragmented with {strategy}")];
                emit(out, Some(&p), &write_layout(&report.best_layout, &comments))?;
            }
            Ok(())
        }
        Command::Sweep { density_from, density_to, step, runs, device, seed, out: path } => {
            if !(0.0..1.0).contains(&density_from) || !(0.0..1.0).contains(&density_to) || step <= 0.0 {
                return Err(Failure::usage("densities must lie in [0, 1) and step must be positive"));
            }
            let config = SweepConfig {
                device_name: device.name().to_owned(),
                device: device.device(),
                densities: density_grid(density_from, density_to, step),
                runs,
                seed,
            };
            let rows = density_sweep(&config).map_err(Failure::usage)?;
            csv_to(out, path.as_deref(), |buf| write_sweep_csv(&rows, buf))
        }
        Command::Makespan { size_mean, duration_mean, runs, policy, count, length, seed, out: path } => {
            let config = MakespanConfig {
                device_length: length,
                count,
                size_mean,
                duration_mean,
                runs,
                seed,
                policies: policy.policies(),
            };
            let rows = makespan_runs(&config).map_err(Failure::usage)?;
            csv_to(out, path.as_deref(), |buf| write_makespan_csv(&rows, buf))
        }
        Command::Oracle { input, target, budget, interchangeable } => {
            let layout = read_layout(&input)?;
            let options = OracleOptions { budget, interchangeable };
            let r = bfs_optimum(&layout, options);
            let mut text = format!(
                "optimum_max_free {}\nmin_moves_to_optimum {}\nstates_explored {}\ntruncated {}\n",
                r.optimum_max_free, r.min_moves_to_optimum, r.states_explored, r.truncated
            );
            if let Some(k) = target {
                let line = match min_moves_to_size(&layout, k, options) {
                    Reachability::Reached { moves, .. } => format!("target {k} reached {moves}\n"),
                    Reachability::Unreachable { .. } => format!("target {k} unreachable\n"),
                    Reachability::Truncated { .. } => format!("target {k} truncated\n"),
                };
                text.push_str(&line);
            }
            emit(out, None, &text)
        }
    }
}

fn metrics_line(label: &str, layout: &Layout) -> String {
    format!(
        "{label} max_free {} free_intervals {} free_slots {} fitness {:.4} density {:.4}\n",
        layout.max_free_interval(),
        layout.free_intervals().len(),
        layout.free_slots(),
        layout.fitness(),
        layout.density()
    )
}

fn generate(kind: GenKind) -> Result<(Layout, Vec<String>), Failure> {
    match kind {
        GenKind::Random(args) => {
            let generated = random_instance(&GenParams {
                device: args.device.device(),
                target_density: args.density,
                seed: args.seed,
            })
            .map_err(Failure::usage)?;
            let mut comments = vec![
                format!("generator random device {}", args.device.name()),
                format!("seed {}", args.seed),
                format!("target_density {}", args.density),
                format!("actual_density {:.6}", generated.actual_density),
            ];
            if generated.density_unreachable {
                comments.push("density_unreachable true".into());
            }
            Ok((generated.layout, comments))
        }
        GenKind::Lowerbound { n } => {
            let layout = lower_bound_instance(n).map_err(Failure::usage)?;
            Ok((layout, vec![format!("generator lowerbound n {n}")]))
        }
        GenKind::ThreePartition { c, bound } => {
            let (layout, target) = three_partition_instance(&c, bound).map_err(Failure::usage)?;
            Ok((layout, vec![format!("generator 3partition bound {bound}"), format!("target {target}")]))
        }
        GenKind::Inapprox { c, bound, r } => {
            let layout = inapprox_instance(&c, bound, r).map_err(Failure::usage)?;
            Ok((layout, vec![format!("generator inapprox bound {bound} r {r}")]))
        }
        GenKind::Flatten { rows } => {
            let refs: Vec<&str> = rows.iter().map(String::as_str).collect();
            let device = flatten_rows(&refs).map_err(Failure::usage)?;
            Ok((Layout::empty(device), vec![format!("generator flatten rows {}", rows.len())]))
        }
    }
}
