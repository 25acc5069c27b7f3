use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};

use setcover::bench::{self, Metric, SweepConfig, SweepInstance};
use setcover::{dynamize, load_instance, opt_cover, Algorithm, Error, OracleBudget, Result, SetSystem, UpdateSequence};

#[derive(Parser)]
#[command(name = "setcover", version, about = "Dynamic set cover engine and benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Turn a static instance into an update sequence.
    Dynamize {
        instance: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Replay one sequence through one algorithm and report amortized metrics.
    Run {
        #[arg(long)]
        algo: Algorithm,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        sequence: PathBuf,
        /// Check invariants after every step (outside the timed region).
        #[arg(long)]
        check: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every algorithm/beta combination over a directory of instances.
    Sweep {
        #[arg(long, value_delimiter = ',', required = true)]
        algos: Vec<Algorithm>,
        #[arg(long, value_delimiter = ',', required = true)]
        betas: Vec<f64>,
        #[arg(long)]
        instances: PathBuf,
        #[arg(long, default_value_t = 1)]
        reps: usize,
        #[arg(long, default_value_t = 1)]
        parallel: usize,
        /// Seed used to dynamize every instance.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        check: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Performance profile of one metric from a results CSV.
    Profile {
        #[arg(long)]
        metric: Metric,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Beta minimizing the objective per algorithm (median over instances).
    BestBeta {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Normalized geometric-mean trade-off table from a results CSV.
    Tradeoff {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay with invariant checking; fails on the first violation.
    Verify {
        #[arg(long)]
        algo: Algorithm,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        sequence: PathBuf,
    },
    /// Exact minimum cover size of a small universe.
    Oracle {
        #[arg(long)]
        instance: PathBuf,
        /// Whitespace-separated 1-based element ids; defaults to all elements.
        #[arg(long)]
        universe: Option<PathBuf>,
        #[arg(long, default_value_t = OracleBudget::default().elements)]
        max_elements: usize,
        #[arg(long, default_value_t = OracleBudget::default().sets)]
        max_sets: usize,
    },
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn load_system(path: &Path) -> Result<SetSystem> {
    load_instance(&read_text(path)?).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn load_sequence(path: &Path) -> Result<UpdateSequence> {
    UpdateSequence::parse(&read_text(path)?).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn instance_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn instance_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry?.path();
        let hidden = path
            .file_name()
            .is_some_and(|n| n.to_string_lossy().starts_with('.'));
        if path.is_file() && !hidden {
            files.push(path);
        }
    }
    files.sort();
    if files.is_empty() {
        return Err(Error::Io(format!("{}: no instance files", dir.display())));
    }
    Ok(files)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Dynamize { instance, seed, out } => {
            let sys = load_system(&instance)?;
            let seq = dynamize(&sys, seed)?;
            let mut w = create(&out)?;
            w.write_all(seq.to_text().as_bytes())?;
            w.flush()?;
        }
        Command::Run {
            algo,
            beta,
            instance,
            sequence,
            check,
            out,
        } => {
            algo.check_beta(beta)?;
            let sys = Arc::new(load_system(&instance)?);
            let seq = load_sequence(&sequence)?;
            let rec = bench::run_experiment(&sys, &seq, &instance_id(&instance), algo, beta, 0, check)?;
            bench::write_results(output(out.as_deref())?, &[rec])?;
        }
        Command::Sweep {
            algos,
            betas,
            instances,
            reps,
            parallel,
            seed,
            check,
            out,
        } => {
            let mut prepared = Vec::new();
            for path in instance_files(&instances)? {
                let system = load_system(&path)?;
                let sequence = dynamize(&system, seed)?;
                prepared.push(SweepInstance {
                    id: instance_id(&path),
                    system: Arc::new(system),
                    sequence,
                });
            }
            let cfg = SweepConfig {
                algos,
                betas,
                reps,
                parallel,
                checking: check,
            };
            let rows = bench::sweep(&prepared, &cfg)?;
            bench::write_results(create(&out)?, &rows)?;
            let mut meta_path = out.into_os_string();
            meta_path.push(".meta");
            let mut meta = create(Path::new(&meta_path))?;
            writeln!(
                meta,
                "seed={seed}\nparallel={parallel}\nreps={reps}\ninstances={}\nruns={}",
                prepared.len(),
                rows.len()
            )?;
            meta.flush()?;
        }
        Command::Profile { metric, input, out } => {
            let rows = bench::read_results(File::open(&input)?)?;
            let curve = bench::performance_profile(&rows, metric)?;
            bench::write_profile(output(out.as_deref())?, &curve)?;
        }
        Command::BestBeta { input } => {
            let rows = bench::read_results(File::open(&input)?)?;
            let mut stdout = io::stdout().lock();
            writeln!(stdout, "algo,beta")?;
            for (algo, beta) in bench::select_best_beta(&rows)? {
                writeln!(stdout, "{algo},{beta}")?;
            }
        }
        Command::Tradeoff { input, out } => {
            let rows = bench::read_results(File::open(&input)?)?;
            bench::write_tradeoff(output(out.as_deref())?, &bench::tradeoff(&rows)?)?;
        }
        Command::Verify {
            algo,
            beta,
            instance,
            sequence,
        } => {
            algo.check_beta(beta)?;
            let sys = Arc::new(load_system(&instance)?);
            let seq = load_sequence(&sequence)?;
            let log = bench::run_logged(&sys, &seq, algo, beta, true)?;
            println!("ok: {algo} beta {beta}, {} steps, invariants held", log.len());
        }
        Command::Oracle {
            instance,
            universe,
            max_elements,
            max_sets,
        } => {
            let sys = load_system(&instance)?;
            let universe: Vec<u32> = match universe {
                None => (0..sys.num_elements() as u32).collect(),
                Some(path) => read_text(&path)?
                    .split_whitespace()
                    .map(|tok| match tok.parse::<u32>() {
                        Ok(id) if id >= 1 && (id as usize) <= sys.num_elements() => Ok(id - 1),
                        _ => Err(Error::Io(format!("{}: bad element id {tok:?}", path.display()))),
                    })
                    .collect::<Result<_>>()?,
            };
            let budget = OracleBudget {
                elements: max_elements,
                sets: max_sets,
            };
            println!("{}", opt_cover(&sys, &universe, budget)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
