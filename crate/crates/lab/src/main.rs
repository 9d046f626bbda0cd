use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use rmt_lab::acceptance::{config_for, run_suite, CRITERIA};
use rmt_lab::output::{check_lines, write_report};
use rmt_lab::{catalog, find, ExperimentConfig, Parallel};

#[derive(Parser)]
#[command(name = "rmt-lab", version, about = "Random-matrix universality experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct RunArgs {
    /// Experiment id (see `list`); `suite` runs the acceptance suite.
    #[arg(long)]
    experiment: Option<String>,
    /// JSON config file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long, env = "RMT_LAB_OUT")]
    out: Option<PathBuf>,
    /// Matrix size(s), comma separated.
    #[arg(long = "N", value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write CSV and JSON output.
    Run(RunArgs),
    /// List experiment ids.
    List,
    /// Run the acceptance suite.
    Suite(RunArgs),
}

const EXIT_FAIL: u8 = 1;
const EXIT_INVALID: u8 = 2;

fn resolve(args: &RunArgs) -> Result<ExperimentConfig, String> {
    let mut cfg = match &args.config {
        Some(p) => ExperimentConfig::load(p).map_err(|e| e.to_string())?,
        None => ExperimentConfig::default(),
    };
    if let Some(e) = &args.experiment {
        cfg.experiment = e.clone();
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(t) = args.threads {
        cfg.threads = Some(t);
    }
    if let Some(o) = &args.out {
        cfg.out = Some(o.clone());
    }
    if let Some(n) = &args.sizes {
        cfg.sizes = n.clone();
    }
    if let Some(s) = args.samples {
        cfg.samples = Some(s);
    }
    Ok(cfg)
}

fn out_dir(cfg: &ExperimentConfig) -> PathBuf {
    cfg.out.clone().unwrap_or_else(|| PathBuf::from("rmt-lab-out"))
}

fn suite(cfg: &ExperimentConfig) -> ExitCode {
    let exec = match Parallel::new(cfg.threads) {
        Ok(e) => e,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    let dir = out_dir(cfg);
    let outcomes = run_suite(&exec, cfg.seed, |o| {
        println!("{}", o.line());
        if let Ok(r) = &o.report {
            let c = config_for(&CRITERIA[o.number - 1], cfg.seed);
            if let Err(e) = write_report(&dir.join(format!("criterion{:02}", o.number)), &c, r, exec.threads(), o.seconds) {
                eprintln!("cannot write output: {e}");
            }
        }
    });
    let passed = outcomes.iter().filter(|o| o.passed()).count();
    println!("suite: {passed}/{} criteria passed", outcomes.len());
    if passed == outcomes.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    }
}

fn run(cfg: &ExperimentConfig) -> ExitCode {
    if cfg.experiment == "suite" {
        return suite(cfg);
    }
    let entry = match find(&cfg.experiment) {
        Ok(e) => e,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    let exec = match Parallel::new(cfg.threads) {
        Ok(e) => e,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    let start = Instant::now();
    let report = match entry.run(&exec, cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{}: {e}", cfg.experiment);
            return ExitCode::from(if e.is_invalid() { EXIT_INVALID } else { EXIT_FAIL });
        }
    };
    let secs = start.elapsed().as_secs_f64();
    print!("{}", check_lines(&report));
    match write_report(&out_dir(cfg), cfg, &report, exec.threads(), secs) {
        Ok(files) => {
            for f in files {
                println!("  wrote {}", f.display());
            }
        }
        Err(e) => {
            eprintln!("cannot write output: {e}");
            return ExitCode::from(EXIT_FAIL);
        }
    }
    println!("{} ({secs:.1} s)", report.verdict());
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INVALID } else { 0 });
        }
    };
    match cli.command {
        Command::List => {
            for e in catalog() {
                println!("{:<17} {}  [{}]", e.id, e.description, e.topic);
            }
            ExitCode::SUCCESS
        }
        Command::Run(args) => match resolve(&args) {
            Ok(cfg) if args.experiment.is_none() && args.config.is_none() => {
                eprintln!("run needs --experiment or --config");
                let _ = cfg;
                ExitCode::from(EXIT_INVALID)
            }
            Ok(cfg) => run(&cfg),
            Err(e) => {
                eprintln!("{e}");
                ExitCode::from(EXIT_INVALID)
            }
        },
        Command::Suite(args) => match resolve(&args) {
            Ok(mut cfg) => {
                cfg.experiment = "suite".into();
                suite(&cfg)
            }
            Err(e) => {
                eprintln!("{e}");
                ExitCode::from(EXIT_INVALID)
            }
        },
    }
}
