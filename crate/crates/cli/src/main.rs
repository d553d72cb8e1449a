use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use flowdiag::bench::{default_grid, run_bench, write_csv, BenchConfig, Shape};
use flowdiag::datagen::generate_dataset;
use flowdiag::resources::{process_cpu_seconds, Budget, TrackingAllocator};
use flowdiag::{
    solve, to_dot, validate, Algorithm, Dataset, DiagramFile, DotOptions, Error, FilterMode,
    SolveOptions,
};

#[global_allocator]
static ALLOC: TrackingAllocator = TrackingAllocator;

#[derive(Parser)]
#[command(
    name = "flowdiag",
    version,
    about = "Summarize state sequences as minimal flow diagrams"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a synthetic dataset from a Markov ring.
    Generate {
        #[arg(short, long, default_value_t = 4)]
        m: usize,
        #[arg(short, long, default_value_t = 4)]
        n: usize,
        #[arg(short, long, default_value_t = 10)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Build a flow diagram for a dataset.
    Build {
        #[arg(short, long)]
        dataset: PathBuf,
        #[arg(short, long, value_enum, default_value_t = AlgoArg::Frontier)]
        algo: AlgoArg,
        /// Beam width for the beam algorithms.
        #[arg(short, long, default_value_t = 1)]
        q: usize,
        /// Diagram JSON output; a `.dot` file is written next to it.
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = FilterArg::Pairwise)]
        filter: FilterArg,
        /// Disable the greedy shortcut in the exact search.
        #[arg(long)]
        no_prune: bool,
        /// Cap on beam candidates.
        #[arg(long)]
        max_expansions: Option<usize>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Check a diagram and its certificates against a dataset.
    Validate {
        #[arg(short, long)]
        dataset: PathBuf,
        #[arg(short = 'g', long)]
        diagram: PathBuf,
    },
    /// Render a diagram as Graphviz DOT.
    ExportDot {
        #[arg(short = 'g', long)]
        diagram: PathBuf,
        /// Defaults to standard output.
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Criteria drawn with a grey fill.
        #[arg(long, value_delimiter = ',', default_value = "SG,SNG,LB,CFB")]
        significant: Vec<String>,
    },
    /// Time the solvers over a grid of generated datasets and emit CSV.
    Bench {
        #[arg(
            long,
            value_enum,
            value_delimiter = ',',
            default_value = "exact,frontier,beam-seq,beam-step"
        )]
        algos: Vec<AlgoArg>,
        #[arg(long, default_value_t = 5)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Explicit shapes as `m:n:k`, comma separated; defaults to the
        /// base shape 4:4:10 with one axis varied at a time.
        #[arg(long, value_delimiter = ',', value_parser = parse_shape)]
        shapes: Vec<Shape>,
        /// Defaults to standard output.
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
}

#[derive(Args, Clone, Copy)]
struct BudgetArgs {
    /// CPU-time cap in seconds.
    #[arg(long, default_value_t = 3600.0)]
    time_limit: f64,
    /// Memory cap in MiB.
    #[arg(long, default_value_t = 8192)]
    memory_limit: u64,
}

impl BudgetArgs {
    fn budget(self) -> Budget {
        Budget {
            cpu_time: Some(Duration::from_secs_f64(self.time_limit.max(0.0))),
            memory_bytes: Some(self.memory_limit * 1024 * 1024),
        }
    }
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum AlgoArg {
    Exact,
    Reference,
    Frontier,
    FrontierDep,
    BeamSeq,
    BeamStep,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Exact => Algorithm::Exact,
            AlgoArg::Reference => Algorithm::Reference,
            AlgoArg::Frontier => Algorithm::Frontier,
            AlgoArg::FrontierDep => Algorithm::FrontierDependent,
            AlgoArg::BeamSeq => Algorithm::BeamSequence,
            AlgoArg::BeamStep => Algorithm::BeamTimestep,
        }
    }
}

#[derive(ValueEnum, Clone, Copy)]
enum FilterArg {
    Pairwise,
    Marking,
}

fn parse_shape(s: &str) -> std::result::Result<Shape, String> {
    let parts: Vec<usize> = s
        .split(':')
        .map(|p| {
            p.parse()
                .map_err(|_| format!("bad shape `{s}`, expected m:n:k"))
        })
        .collect::<std::result::Result<_, _>>()?;
    match parts[..] {
        [m, n, k] => Ok((m, n, k)),
        _ => Err(format!("bad shape `{s}`, expected m:n:k")),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_dataset(path: &Path) -> Result<Dataset> {
    Dataset::from_json(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn load_diagram(path: &Path) -> Result<DiagramFile> {
    DiagramFile::from_json(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Generate { m, n, k, seed, out } => {
            let ds = generate_dataset(m, n, k, seed)?;
            write(&out, &(ds.to_json()? + "\n"))?;
        }
        Command::Build {
            dataset,
            algo,
            q,
            out,
            filter,
            no_prune,
            max_expansions,
            budget,
        } => {
            let instance = load_dataset(&dataset)?.instance()?;
            let opts = SolveOptions {
                budget: budget.budget(),
                prune_monotone: !no_prune,
                filter: match filter {
                    FilterArg::Pairwise => FilterMode::Pairwise,
                    FilterArg::Marking => FilterMode::MarkingGrid,
                },
                beam_width: q,
                max_expansions,
                ..SolveOptions::default()
            };
            let start = process_cpu_seconds();
            let sol = solve(&instance, algo.into(), &opts)?;
            let cpu = process_cpu_seconds() - start;
            let dot = to_dot(&sol.diagram, &DotOptions::default());
            let file = DiagramFile {
                diagram: sol.diagram,
                certificates: sol.certificates,
            };
            write(&out, &(file.to_json()? + "\n"))?;
            write(&out.with_extension("dot"), &dot)?;
            println!("fd_size {}", file.diagram.nodes.len());
            println!("edges {}", file.diagram.edge_count());
            println!("cpu_seconds {cpu:.6}");
        }
        Command::Validate { dataset, diagram } => {
            let instance = load_dataset(&dataset)?.instance()?;
            let file = load_diagram(&diagram)?;
            match validate(&file.diagram, &instance, &file.certificates) {
                Ok(()) => println!("valid"),
                Err(v) => {
                    println!("invalid: {v}");
                    return Ok(ExitCode::from(1));
                }
            }
        }
        Command::ExportDot {
            diagram,
            out,
            significant,
        } => {
            let file = load_diagram(&diagram)?;
            let opts = DotOptions {
                significant: significant.into_iter().filter(|s| !s.is_empty()).collect(),
            };
            let dot = to_dot(&file.diagram, &opts);
            match out {
                Some(p) => write(&p, &dot)?,
                None => print!("{dot}"),
            }
        }
        Command::Bench {
            algos,
            trials,
            seed,
            shapes,
            out,
            budget,
        } => {
            let cfg = BenchConfig {
                algorithms: algos.into_iter().map(Algorithm::from).collect(),
                grid: if shapes.is_empty() {
                    default_grid()
                } else {
                    shapes
                },
                trials,
                seed,
                options: SolveOptions {
                    budget: budget.budget(),
                    ..SolveOptions::default()
                },
            };
            let rows = run_bench(&cfg, |r| {
                eprintln!(
                    "{} m={} n={} k={} {} {:?}",
                    r.row, r.m, r.n, r.k, r.algo, r.status
                );
            })?;
            match out {
                Some(p) => {
                    let f =
                        fs::File::create(&p).with_context(|| format!("writing {}", p.display()))?;
                    write_csv(&rows, f)?;
                }
                None => write_csv(&rows, std::io::stdout().lock())?,
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Budget(_)) => 3,
        Some(Error::FlagViolation { .. } | Error::InvalidParameter(_)) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
