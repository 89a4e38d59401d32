use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use crossed_cube::DiagnosisModel;
use crossed_cube_cli::{run, Campaign, CliError, Command, DiagnoseMode, ExitStatus, ExportFormat};

#[derive(Parser)]
#[command(name = "cqnet", version, about = "Crossed cube topology, cut and diagnosability campaigns")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Cube dimension.
    #[arg(long, global = true, default_value_t = 4)]
    n: u32,
    /// Report file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, env = "CQNET_WORKERS", default_value_t = default_workers())]
    workers: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Maximum subsets (or fault-set pairs) to enumerate.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Write a checkpoint after every sweep batch.
    #[arg(long, global = true)]
    checkpoint: Option<PathBuf>,
    /// Continue from a checkpoint, saving further progress to it.
    #[arg(long, global = true)]
    resume: Option<PathBuf>,
    #[arg(long, global = true, hide = true)]
    halt_after: Option<u64>,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Edges,
    Dot,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Pmc,
    Mm,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exhaustive,
    Witness,
    Bracket,
}

#[derive(Subcommand)]
enum Sub {
    /// Export the topology.
    Gen {
        #[arg(long, value_enum, default_value_t = Format::Edges)]
        format: Format,
    },
    /// Compare the flat and recursive constructions.
    VerifyTopology,
    /// Classify every fault set of one size against the matching structure statement.
    Classify {
        #[arg(long)]
        size: usize,
    },
    /// Exact g-extra connectivity with a witness cut.
    ExtraConn {
        #[arg(long, default_value_t = 3)]
        g: u32,
    },
    /// Census of all g-extra cuts of one size.
    MinCuts {
        #[arg(long, default_value_t = 3)]
        g: u32,
        #[arg(long)]
        size: usize,
    },
    /// The 3-path set, its neighborhood and the indistinguishable pair.
    Witness,
    /// g-extra diagnosability under PMC or MM*.
    Diagnose {
        #[arg(long, default_value_t = 3)]
        g: u32,
        #[arg(long)]
        t: Option<usize>,
        #[arg(long, value_enum, default_value_t = Model::Pmc)]
        model: Model,
        #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
        mode: Mode,
    },
}

fn campaign(cli: Cli) -> Campaign {
    let command = match cli.command {
        Sub::Gen { format } => Command::Gen {
            format: match format {
                Format::Edges => ExportFormat::Edges,
                Format::Dot => ExportFormat::Dot,
                Format::Json => ExportFormat::Json,
            },
        },
        Sub::VerifyTopology => Command::VerifyTopology,
        Sub::Classify { size } => Command::Classify { size },
        Sub::ExtraConn { g } => Command::ExtraConn { g },
        Sub::MinCuts { g, size } => Command::MinCuts { g, size },
        Sub::Witness => Command::Witness,
        Sub::Diagnose { g, t, model, mode } => Command::Diagnose {
            g,
            t,
            model: match model {
                Model::Pmc => DiagnosisModel::Pmc,
                Model::Mm => DiagnosisModel::MmStar,
            },
            mode: match mode {
                Mode::Exhaustive => DiagnoseMode::Exhaustive,
                Mode::Witness => DiagnoseMode::Witness,
                Mode::Bracket => DiagnoseMode::Bracket,
            },
        },
    };
    let c = cli.common;
    Campaign {
        command,
        n: c.n,
        out: c.out,
        workers: c.workers,
        seed: c.seed,
        budget: c.budget,
        checkpoint: c.checkpoint,
        resume: c.resume,
        halt_after: c.halt_after,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let status = if e.use_stderr() { ExitStatus::Usage } else { ExitStatus::Ok };
            let _ = e.print();
            return ExitCode::from(status as u8);
        }
    };
    let campaign = campaign(cli);
    match run(&campaign) {
        Ok(outcome) => {
            if campaign.out.is_none() {
                print!("{}", outcome.report);
            }
            ExitCode::from(outcome.status as u8)
        }
        Err(e) => {
            eprintln!("cqnet: {e}");
            let status = match e {
                CliError::Usage(_) | CliError::Core(_) | CliError::Checkpoint { .. } => ExitStatus::Usage,
                CliError::Io { .. } => ExitStatus::Incomplete,
            };
            ExitCode::from(status as u8)
        }
    }
}
