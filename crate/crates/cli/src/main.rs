use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use steiner_core::exact::dreyfus_wagner;
use steiner_core::experiment::{
    aggregate, read_best_known, read_records, run_experiment, write_records, write_summary,
    ExperimentConfig, ExperimentOutput, StarSizeHistogram,
};
use steiner_core::finish::{self, Finisher};
use steiner_core::preprocess::preprocessing;
use steiner_core::star::ContractConfig;
use steiner_core::stp::{hanan_grid_instance, parse_points, parse_stp, write_solution, write_stp};
use steiner_core::{Instance, StarMode, WorkingGraph};

#[derive(Parser)]
#[command(
    name = "steiner",
    version,
    about = "Steiner tree heuristics built around star contraction"
)]
struct Cli {
    /// Accepted for script compatibility; every algorithm is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and print `VALUE <w>` and the tree edges.
    Solve(SolveArgs),
    /// Apply the reductions and print the reduced instance.
    Preprocess { file: PathBuf },
    /// Run the checkpoint protocol over many instances and write CSVs.
    Experiment(ExperimentArgs),
    /// Recompute `summary.csv` from the `records.csv` in a directory.
    Aggregate { dir: PathBuf },
    /// Solve exactly (at most 14 terminals).
    Exact { file: PathBuf },
    /// Build the Hanan grid instance of a point file and print it.
    Rect { file: PathBuf },
}

#[derive(Clone, Copy, Debug)]
enum Method {
    Finisher(Finisher),
    Exact,
    /// Contraction alone; needs `--contract` down to one terminal.
    Contract,
}

fn parse_method(s: &str) -> Result<Method, String> {
    match s {
        "exact" => Ok(Method::Exact),
        "contract" => Ok(Method::Contract),
        _ => s.parse().map(Method::Finisher).map_err(|_| {
            let names: Vec<&str> = Finisher::ALL.iter().map(|f| f.name()).collect();
            format!("expected one of {}, exact, contract", names.join(", "))
        }),
    }
}

/// Largest star size; `None` for `inf`.
#[derive(Clone, Copy, Debug)]
struct StarLimit(Option<usize>);

fn parse_star_limit(s: &str) -> Result<StarLimit, String> {
    if s == "inf" {
        return Ok(StarLimit(None));
    }
    match s.parse::<usize>() {
        Ok(k) if k >= 2 => Ok(StarLimit(Some(k))),
        _ => Err("expected an integer of at least 2 or `inf`".into()),
    }
}

fn parse_mode(s: &str) -> Result<StarMode, String> {
    s.parse()
        .map_err(|_| "expected basic or improved".to_string())
}

#[derive(Args)]
struct SolveArgs {
    file: PathBuf,
    #[arg(long, default_value = "mst_plus", value_parser = parse_method)]
    method: Method,
    /// Shortcut for `--method exact`.
    #[arg(long, conflicts_with = "method")]
    exact: bool,
    /// Contract stars of at most this many terminals first.
    #[arg(long, value_parser = parse_star_limit)]
    contract: Option<StarLimit>,
    #[arg(long, default_value = "improved", value_parser = parse_mode)]
    mode: StarMode,
    /// Stop contracting once this many terminals remain.
    #[arg(long, default_value_t = 1)]
    tau: usize,
    #[arg(long)]
    no_preprocess: bool,
    /// Disable the best-star cache.
    #[arg(long)]
    no_cache: bool,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// Percentages of the contraction sequence.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0,10,20,30,40,50,60,70,80,90,100"
    )]
    checkpoints: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_value = "improved", value_parser = parse_mode)]
    modes: Vec<StarMode>,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "mst,mst_plus,zelikovsky,zelikovsky_minus,zelikovsky_plus"
    )]
    finishers: Vec<Finisher>,
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// CSV with `instance,weight` reference values.
    #[arg(long)]
    bestknown: Option<PathBuf>,
    /// Record wall-clock time; output is then no longer reproducible.
    #[arg(long)]
    timing: bool,
}

/// Reads an STP file; `-` reads standard input.
fn read_instance(path: &Path) -> Result<Instance> {
    let text = if path.as_os_str() == "-" {
        io::read_to_string(io::stdin()).context("reading standard input")?
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
    };
    parse_stp(&text).with_context(|| format!("parsing {}", path.display()))
}

fn instance_id(path: &Path) -> String {
    path.file_name().map_or_else(
        || path.display().to_string(),
        |n| n.to_string_lossy().into_owned(),
    )
}

fn solve(args: SolveArgs) -> Result<()> {
    let inst = read_instance(&args.file)?;
    let method = if args.exact {
        Method::Exact
    } else {
        args.method
    };
    let solution = match method {
        Method::Exact => dreyfus_wagner(&inst)?,
        Method::Finisher(_) | Method::Contract => {
            let config = args
                .contract
                .map(|StarLimit(max_terminals)| ContractConfig {
                    mode: args.mode,
                    max_terminals,
                    tau: args.tau,
                    cache: !args.no_cache,
                });
            if matches!(method, Method::Contract) && config.is_none() {
                bail!("--method contract needs --contract");
            }
            let finisher = match method {
                Method::Finisher(f) => Some(f),
                _ => None,
            };
            let run = finish::solve(&inst, !args.no_preprocess, config.as_ref(), finisher)?;
            eprintln!("contractions {}", run.contractions.len());
            run.solution
        }
    };
    print!("{}", write_solution(&inst, &solution));
    Ok(())
}

fn preprocess(file: &Path) -> Result<()> {
    let inst = read_instance(file)?;
    let mut g = WorkingGraph::from_instance(&inst);
    let report = preprocessing(&mut g);
    let (reduced, _) = g.to_instance()?;
    print!("{}", write_stp(&reduced));
    eprintln!("bought weight {}", g.bought_weight());
    eprint!("{}", report.to_csv());
    Ok(())
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn experiment(args: ExperimentArgs) -> Result<()> {
    let best = match &args.bestknown {
        Some(path) => read_best_known(
            File::open(path).with_context(|| format!("opening {}", path.display()))?,
        )?,
        None => Default::default(),
    };
    let base = ExperimentConfig {
        modes: args.modes.clone(),
        finishers: args.finishers.clone(),
        checkpoints: args.checkpoints.clone(),
        reference: None,
        timing: args.timing,
    };
    let results: Vec<(String, Result<ExperimentOutput>)> = args
        .files
        .par_iter()
        .map(|path| {
            let id = instance_id(path);
            let config = ExperimentConfig {
                reference: best.get(&id).copied(),
                ..base.clone()
            };
            let out = read_instance(path).and_then(|inst| Ok(run_experiment(&id, &inst, &config)?));
            (id, out)
        })
        .collect();

    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let mut records = Vec::new();
    let mut histogram = StarSizeHistogram::default();
    let mut errors = csv::Writer::from_writer(create(&args.out, "errors.csv")?);
    errors.write_record(["instance", "error"])?;
    for (id, result) in results {
        match result {
            Ok(out) => {
                records.extend(out.records);
                histogram.merge(&out.histogram);
            }
            Err(e) => {
                eprintln!("{id}: {e:#}");
                errors.write_record([id, format!("{e:#}")])?;
            }
        }
    }
    errors.flush()?;
    write_records(&records, create(&args.out, "records.csv")?)?;
    histogram.write_csv(&args.modes, create(&args.out, "star_sizes.csv")?)?;
    write_summary(&aggregate(&records), create(&args.out, "summary.csv")?)?;
    Ok(())
}

fn aggregate_dir(dir: &Path) -> Result<()> {
    let path = dir.join("records.csv");
    let records =
        read_records(File::open(&path).with_context(|| format!("opening {}", path.display()))?)?;
    write_summary(&aggregate(&records), create(dir, "summary.csv")?)?;
    Ok(())
}

fn exact(file: &Path) -> Result<()> {
    let inst = read_instance(file)?;
    print!("{}", write_solution(&inst, &dreyfus_wagner(&inst)?));
    Ok(())
}

fn rect(file: &Path) -> Result<()> {
    let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let inst = hanan_grid_instance(&parse_points(&text)?)?;
    io::stdout().write_all(write_stp(&inst).as_bytes())?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve(args) => solve(args),
        Command::Preprocess { file } => preprocess(&file),
        Command::Experiment(args) => experiment(args),
        Command::Aggregate { dir } => aggregate_dir(&dir),
        Command::Exact { file } => exact(&file),
        Command::Rect { file } => rect(&file),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
