use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use blde::experiment::{
    compare_files, run_experiment, write_comparison, Algorithm, ExperimentConfig, ProblemSpec, OUTPUT_DIR_ENV,
};
use blde::mkp::{mkp_bruteforce, MkpInstance, BRUTEFORCE_LIMIT};
use blde::stats::{sci, Verdict};
use blde::ucp::{check_constraints, hybrid_solve, HybridConfig, UcpInstance};

#[derive(Parser)]
#[command(name = "blde", version, about = "Binary learning differential evolution experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run seeded batches and write runs, timings, summary and metric CSVs.
    Bench(BenchArgs),
    /// Rank-sum verdicts of a candidate run table against a reference one.
    Compare(CompareArgs),
    /// Unit commitment.
    Ucp {
        #[command(subcommand)]
        command: UcpCommand,
    },
    /// Multidimensional knapsack instances.
    Mkp {
        #[command(subcommand)]
        command: MkpCommand,
    },
}

#[derive(Args)]
struct BenchArgs {
    /// TOML experiment config.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Benchmark problems to run when no config is given (P1..P7).
    #[arg(long = "problem", short, value_delimiter = ',')]
    problems: Vec<String>,
    /// MKP instance files to run when no config is given.
    #[arg(long = "instance")]
    instances: Vec<PathBuf>,
    #[arg(long)]
    runs: Option<usize>,
    /// Base seed; run k uses seed + k.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    algorithm: Option<AlgorithmArg>,
    /// Output directory (overrides the config and the environment).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run the batch on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum AlgorithmArg {
    Blde,
    Random,
}

#[derive(Args)]
struct CompareArgs {
    /// Reference `runs.csv`.
    reference: PathBuf,
    /// Candidate `runs.csv`; `+` means it beats the reference.
    candidate: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Also write the verdicts as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum UcpCommand {
    Solve(UcpArgs),
}

#[derive(Args)]
struct UcpArgs {
    /// Instance JSON; the built-in 10-unit system when omitted.
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Power-balance tolerance in percent.
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
    #[arg(long, default_value_t = 100)]
    pop: usize,
    #[arg(long, default_value_t = 2500)]
    iters: usize,
    #[arg(long, default_value_t = 0.8)]
    f: f64,
    #[arg(long, default_value_t = 0.5)]
    cr: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Keep unrepaired genes in the population.
    #[arg(long)]
    no_lamarckian: bool,
    /// Directory for `ucp_schedule.csv` and `ucp_history.csv`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum MkpCommand {
    /// Parse an instance, print its shape and solve it exactly when small.
    Check { instance: PathBuf },
}

fn output_dir(flag: Option<PathBuf>, configured: &Path) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUTPUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| configured.to_path_buf())
}

fn bench(args: BenchArgs) -> Result<()> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path).with_context(|| format!("loading {}", path.display()))?,
        None => {
            if args.problems.is_empty() && args.instances.is_empty() {
                bail!("give --config, --problem or --instance");
            }
            ExperimentConfig::default()
        }
    };
    if args.config.is_none() {
        cfg.problems = args
            .problems
            .iter()
            .map(|name| ProblemSpec { name: Some(name.clone()), ..Default::default() })
            .chain(args.instances.iter().map(|p| ProblemSpec { instance: Some(p.clone()), ..Default::default() }))
            .collect();
    }
    if let Some(runs) = args.runs {
        cfg.runs = runs;
        for spec in &mut cfg.problems {
            spec.runs = None;
        }
    }
    if let Some(seed) = args.seed {
        cfg.base_seed = seed;
    }
    if let Some(alg) = args.algorithm {
        cfg.algorithm = match alg {
            AlgorithmArg::Blde => Algorithm::Blde,
            AlgorithmArg::Random => Algorithm::Random,
        };
    }
    cfg.sequential |= args.sequential;
    cfg.output_dir = output_dir(args.out, &cfg.output_dir);
    cfg.validate()?;

    let report = run_experiment(&cfg)?;
    println!("{:<10} {:<12} AveFit±StdDev (SR, RunTime)", "algorithm", "problem");
    for row in &report.summaries {
        println!("{:<10} {:<12} {}", row.algorithm, row.problem, row.summary().table_cell());
    }
    println!("wrote {}", report.output_dir.display());
    Ok(())
}

fn compare(args: CompareArgs) -> Result<()> {
    let rows = compare_files(&args.reference, &args.candidate, args.alpha)?;
    println!("{:<12} {:<10} {:<10} {:>10} {:>12}  verdict", "problem", "reference", "candidate", "U", "p");
    for r in &rows {
        println!(
            "{:<12} {:<10} {:<10} {:>10} {:>12}  {}",
            r.problem,
            r.reference,
            r.candidate,
            r.u,
            sci(r.p_value),
            r.verdict
        );
    }
    for v in [Verdict::Superior, Verdict::NoDifference, Verdict::Inferior] {
        let names: Vec<&str> = rows.iter().filter(|r| r.verdict == v).map(|r| r.problem.as_str()).collect();
        println!("{}: {}", v, if names.is_empty() { "none".to_string() } else { names.join(", ") });
    }
    if let Some(out) = args.out {
        write_comparison(&rows, &out)?;
    }
    Ok(())
}

fn ucp_solve(args: UcpArgs) -> Result<()> {
    let inst = match &args.instance {
        Some(path) => UcpInstance::load(path).with_context(|| format!("loading {}", path.display()))?,
        None => UcpInstance::ten_unit(),
    };
    let inst = inst.with_epsilon(args.epsilon / 100.0);
    let cfg = HybridConfig {
        pop_size: args.pop,
        iterations: args.iters,
        f: args.f,
        cr: args.cr,
        seed: args.seed,
        lamarckian: !args.no_lamarckian,
        ..HybridConfig::default()
    };
    let res = hybrid_solve(&inst, &cfg)?;
    let report = check_constraints(&res.best, &inst)?;

    println!("hour  {}", (1..=inst.n_units()).map(|i| format!("{:>8}", format!("U{i}"))).collect::<String>());
    for t in 0..inst.hours() {
        let cells: String = (0..inst.n_units()).map(|i| format!("{:>8.1}", res.best.p[i][t])).collect();
        println!("{:>4}  {cells}", t + 1);
    }
    println!("cost {:.2}  evaluations {}  violations {}", res.cost, res.evaluations, report.count());

    let dir = output_dir(args.out, Path::new("results"));
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut sched = String::from("unit,hour,on,output\n");
    for i in 0..inst.n_units() {
        for t in 0..inst.hours() {
            sched.push_str(&format!("{},{},{},{}\n", i + 1, t + 1, res.best.u[i][t] as u8, res.best.p[i][t]));
        }
    }
    fs::write(dir.join("ucp_schedule.csv"), sched)?;
    let mut hist = String::from("iteration,best_cost\n");
    for (k, c) in res.history.iter().enumerate() {
        hist.push_str(&format!("{k},{c}\n"));
    }
    fs::write(dir.join("ucp_history.csv"), hist)?;
    Ok(())
}

fn mkp_check(path: &Path) -> Result<()> {
    let inst = MkpInstance::load(path).with_context(|| format!("loading {}", path.display()))?;
    println!("name {}", inst.name);
    println!("items {}  constraints {}", inst.n(), inst.m());
    match inst.known_opt {
        Some(v) => println!("known optimum {v}"),
        None => println!("known optimum unset"),
    }
    println!("penalty coefficient {:.6}", inst.penalty_coefficient());
    println!("budget {}", inst.budget());
    if inst.n() <= BRUTEFORCE_LIMIT {
        let (bits, profit) = mkp_bruteforce(&inst)?;
        println!("exact optimum {profit} at {bits}");
        if let Some(known) = inst.known_opt {
            if known != profit {
                bail!("file optimum {known} differs from the exact optimum {profit}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Bench(args) => bench(args),
        Command::Compare(args) => compare(args),
        Command::Ucp { command: UcpCommand::Solve(args) } => ucp_solve(args),
        Command::Mkp { command: MkpCommand::Check { instance } } => mkp_check(&instance),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
