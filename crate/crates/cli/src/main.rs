use std::io::Write;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use goldsand_cli::commands::{self, CommandError, CommandResult, SimulateArgs};
use goldsand_cli::service::{serve, AppState};
use goldsand_core::solver::DEFAULT_TOL;
use goldsand_core::strategy::{PusherMode, PusherPolicy, RemoverPolicy};
use goldsand_core::GameKind;
use serde_json::Value;

#[derive(Parser)]
#[command(name = "goldsand", version, about = "Gold sand chip game engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the game value e(x), the minimizer p* and the degeneracy class.
    Value {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Play one game between two policies.
    Simulate {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[arg(long, default_value = "optimal-adaptive")]
        pusher: PusherPolicy,
        #[arg(long, default_value = "optimal")]
        remover: RemoverPolicy,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        #[arg(long, value_parser = parse_mode)]
        mode: Option<PusherMode>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        max_rounds: usize,
        /// Write the round-by-round trace as JSON lines.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Optimal Pusher against optimal Remover, reported against e(x0).
    Duel {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
    },
    /// Independent oracles.
    Oracle {
        #[command(subcommand)]
        oracle: Oracle,
    },
    /// Color an on-line hypergraph stream; prints one `color <label>` line per vertex.
    Color {
        #[arg(long)]
        kind: Option<GameKind>,
        #[arg(long, value_name = "FILE")]
        stream: PathBuf,
        #[arg(long, default_value = "optimal")]
        remover: RemoverPolicy,
    },
    /// Benchmarks over random instances.
    Bench {
        #[command(subcommand)]
        bench: Bench,
    },
    /// Run the HTTP session service.
    Serve {
        #[arg(long, env = "GOLDSAND_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Persist sessions as JSON files in this directory.
        #[arg(long)]
        state_dir: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Oracle {
    /// Exact game-tree search on small discrete arrangements.
    Minimax {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[arg(long, default_value_t = 2_000_000)]
        budget: usize,
    },
    /// Exact survival probabilities against the closed-form panchromatic weights.
    Panchromatic {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        i: u32,
        /// Comma-separated probabilities, as fractions (1/3) or decimals (0.25).
        #[arg(long)]
        p: String,
    },
    /// Best Remover line against a fixed Pusher, searched to a horizon.
    RemoverLine {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[arg(long, default_value_t = 6)]
        horizon: u32,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        #[arg(long, default_value = "optimal-adaptive")]
        pusher: PusherPolicy,
    },
}

#[derive(Subcommand)]
enum Bench {
    /// Random streams and an adaptive Presenter just below the edge threshold.
    Thresholds {
        #[arg(long)]
        kind: GameKind,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 100)]
        streams: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parse_mode(text: &str) -> Result<PusherMode, String> {
    match text {
        "adaptive" => Ok(PusherMode::Adaptive),
        "proof" => Ok(PusherMode::Proof),
        other => Err(format!("unknown mode {other:?}; expected adaptive or proof")),
    }
}

/// Writes a line to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(line: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{line}");
}

fn print_json(v: &Value) {
    emit(&serde_json::to_string_pretty(v).expect("json prints"));
}

fn run(cli: Cli) -> CommandResult<bool> {
    match cli.command {
        Command::Value { input, tol } => print_json(&commands::value_cmd(&commands::read_arrangement(&input)?, tol)?),
        Command::Simulate { input, pusher, remover, eps, mode, seed, max_rounds, trace } => {
            let x = commands::read_arrangement(&input)?;
            let args = SimulateArgs { pusher, remover, eps, mode, seed, max_rounds, trace };
            print_json(&commands::simulate_cmd(&x, &args)?);
        }
        Command::Duel { input, eps } => print_json(&commands::duel_cmd(&commands::read_arrangement(&input)?, eps)?),
        Command::Oracle { oracle } => match oracle {
            Oracle::Minimax { input, budget } => {
                print_json(&commands::minimax_cmd(&commands::read_arrangement(&input)?, budget)?)
            }
            Oracle::Panchromatic { r, i, p } => {
                let report = commands::panchromatic_cmd(r, i, &p)?;
                print_json(&report);
                return Ok(report["allEqual"] == Value::Bool(true));
            }
            Oracle::RemoverLine { input, horizon, eps, pusher } => {
                let x = commands::read_arrangement(&input)?;
                print_json(&commands::remover_line_cmd(&x, pusher, horizon, eps)?);
            }
        },
        Command::Color { kind, stream, remover } => {
            let text = commands::read_input(&stream)?;
            let (lines, report) = commands::color_cmd(&text, kind, remover)?;
            for line in lines {
                emit(&line);
            }
            emit(&serde_json::to_string(&report).expect("json prints"));
        }
        Command::Bench { bench: Bench::Thresholds { kind, k, streams, seed } } => {
            let report = commands::thresholds_cmd(kind, k, streams, seed)?;
            print_json(&report);
            return Ok(report["holds"] == Value::Bool(true));
        }
        Command::Serve { port, host, state_dir } => {
            let addr: SocketAddr = format!("{host}:{port}")
                .parse()
                .map_err(|e| CommandError::Usage(format!("bad address {host}:{port}: {e}")))?;
            let state = match state_dir {
                Some(dir) => AppState::with_state_dir(&dir).map_err(|e| CommandError::Io(e.to_string()))?,
                None => AppState::default(),
            };
            let runtime = tokio::runtime::Runtime::new().map_err(|e| CommandError::Io(e.to_string()))?;
            runtime.block_on(serve(addr, state)).map_err(|e| CommandError::Io(e.to_string()))?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("warn,goldsand_cli=info")),
        )
        .with_writer(std::io::stderr)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
