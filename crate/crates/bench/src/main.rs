use std::net::TcpListener;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use curriculum::{build_teacher, TeacherKind};
use curriculum_bench::bridge::Bridge;
use curriculum_bench::csv_out::{emit_csv, emit_median_csv};
use curriculum_bench::presets::{self, PRESETS};
use curriculum_bench::{run_campaign, ExperimentFile};

#[derive(Parser)]
#[command(
    name = "bench",
    about = "Curriculum teacher benchmarks on the hypercube toy space"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a seeded multi-repeat campaign and write per-run metrics as CSV.
    Run {
        /// Config file, or `preset:<name>` for a built-in one.
        #[arg(long)]
        config: String,
        #[arg(long)]
        teacher: Option<TeacherKind>,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        repeats: Option<usize>,
        /// Base seed; repeat i uses seed + i.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        eval_every: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        /// Also write the median curve here.
        #[arg(long)]
        median_out: Option<PathBuf>,
    },
    /// Built-in configurations.
    Presets {
        #[command(subcommand)]
        action: PresetAction,
    },
    /// Expose a teacher over newline-delimited JSON on stdin/stdout, or on a
    /// TCP port.
    Serve {
        #[arg(long)]
        teacher: TeacherKind,
        #[arg(long)]
        config: String,
        #[arg(long)]
        port: Option<u16>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum PresetAction {
    List,
    /// Print a preset's config file.
    Show {
        name: String,
    },
}

fn load(config: &str) -> anyhow::Result<ExperimentFile> {
    Ok(match config.strip_prefix("preset:") {
        Some(name) => presets::find(name)?.file()?,
        None => ExperimentFile::load(config.as_ref())?,
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Run {
            config,
            teacher,
            budget,
            repeats,
            seed,
            eval_every,
            out,
            median_out,
        } => {
            let mut file = load(&config)?;
            file.teacher = teacher.or(file.teacher);
            file.budget = budget.or(file.budget);
            file.repeats = repeats.or(file.repeats);
            file.base_seed = seed.or(file.base_seed);
            file.eval_every = eval_every.or(file.eval_every);
            if let (Some(b), None) = (budget, eval_every) {
                // keep an overridden budget valid against the file's cadence
                file.eval_every = file.eval_every.map(|e| e.min(b));
            }
            let cfg = file.resolve()?;
            let result = run_campaign(&cfg)?;
            emit_csv(result.rows(), &out)?;
            if let Some(path) = median_out {
                emit_median_csv(&result.median, &path)?;
            }
            eprintln!(
                "{}: {} runs x {} episodes, final median unlocked {:.1}%",
                cfg.teacher,
                cfg.repeats,
                cfg.budget,
                100.0 * result.final_median()
            );
        }
        Command::Presets { action } => match action {
            PresetAction::List => {
                for p in PRESETS {
                    println!("{:<14} {}", p.name, p.summary());
                }
            }
            PresetAction::Show { name } => print!("{}", presets::find(&name)?.text),
        },
        Command::Serve {
            teacher,
            config,
            port,
            seed,
        } => {
            let mut file = load(&config)?;
            file.teacher = Some(teacher);
            let cfg = file.resolve()?;
            let teacher = build_teacher(teacher, cfg.space(), &cfg.params, seed)?;
            let mut bridge = Bridge::new(teacher);
            match port {
                Some(port) => {
                    let listener = TcpListener::bind(("127.0.0.1", port))
                        .with_context(|| format!("binding port {port}"))?;
                    eprintln!("listening on {}", listener.local_addr()?);
                    bridge.serve_tcp(listener)?;
                }
                None => bridge.serve(std::io::stdin().lock(), std::io::stdout().lock())?,
            }
        }
    }
    Ok(())
}
