//! Command-line front end: replay pose logs, pack and inspect GSTB files,
//! and sync them with a persistence server.
//!
//! Exit codes: 0 success, 2 parse/usage/decode errors, 3 unusable wall scan,
//! 4 write failures, 5 server or transport failures.

mod brush_args;
mod local;
mod remote;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use gesto_core::artwork::{ArtworkError, DecodeError};
use gesto_core::error::{EngineError, LogError};

pub use brush_args::BrushOverrides;
pub use local::{load_canvas, pack_artwork, replay_file, ReplayRun};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Log { path: PathBuf, source: LogError },
    #[error("{path}: {source}")]
    Decode { path: PathBuf, source: DecodeError },
    #[error("scan rejected: {0}")]
    Scan(EngineError),
    #[error(transparent)]
    Engine(ArtworkError),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("server answered {status}: {body}")]
    Http { status: u16, body: String },
    #[error("request failed: {0}")]
    Transport(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Log { .. } | CliError::Decode { .. } | CliError::Engine(_) | CliError::Read { .. } => 2,
            CliError::Scan(_) => 3,
            CliError::Write { .. } => 4,
            CliError::Http { .. } | CliError::Transport(_) => 5,
        }
    }
}

impl From<ArtworkError> for CliError {
    fn from(e: ArtworkError) -> Self {
        match e {
            ArtworkError::Engine(e @ (EngineError::DegenerateScan(_) | EngineError::ScanTooNoisy { .. })) => CliError::Scan(e),
            other => CliError::Engine(other),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "gesto", version, about = "Replay, pack, inspect and sync GSTB artworks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    #[value(name = "2d")]
    Canvas,
    #[value(name = "3d")]
    Free,
}

/// Inputs shared by replay and pack.
#[derive(Debug, clap::Args)]
pub struct PipelineArgs {
    /// Pose log (JSON Lines).
    #[arg(long)]
    pub poses: PathBuf,
    /// Drawing mode; 2d needs --scan.
    #[arg(long, value_enum, default_value = "3d")]
    pub mode: ModeArg,
    /// Wall scan (JSON Lines of [x, y, z]).
    #[arg(long)]
    pub scan: Option<PathBuf>,
    /// Brush and pipeline overrides, e.g. width=0.1 color=1,0,0,1.
    #[arg(long = "brush", value_name = "KEY=VALUE")]
    pub brush: Vec<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a pose log through the pipeline and export the mesh.
    Replay {
        #[command(flatten)]
        input: PipelineArgs,
        /// Mesh output, .obj or .glb.
        #[arg(long)]
        out: PathBuf,
    },
    /// Replay a pose log and save the strokes as a GSTB artwork.
    Pack {
        #[command(flatten)]
        input: PipelineArgs,
        #[arg(long)]
        title: String,
        #[arg(long)]
        author: String,
        #[arg(long)]
        out: PathBuf,
        /// Artwork id; derived from the inputs when omitted.
        #[arg(long)]
        id: Option<uuid::Uuid>,
        /// Creation time in UTC seconds.
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        created_at: i64,
    },
    /// Print the debug JSON mirror of a GSTB file.
    Inspect { file: PathBuf },
    /// Open a session and print its token.
    Login {
        #[arg(long)]
        server: String,
        #[arg(long)]
        author: String,
    },
    /// Upload a GSTB file and print its id.
    Push {
        #[arg(long)]
        server: String,
        #[arg(long)]
        token: String,
        file: PathBuf,
    },
    /// Download an artwork.
    Pull {
        #[arg(long)]
        server: String,
        #[arg(long)]
        token: Option<String>,
        id: String,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Runs one command, writing its normal output to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let emit = |out: &mut dyn Write, line: &str| {
        writeln!(out, "{line}").map_err(|e| CliError::Write { path: "<stdout>".into(), source: e })
    };
    match cli.command {
        Command::Replay { input, out: path } => {
            let run = replay_file(&input)?;
            local::write_mesh(&run.output.mesh, &path)?;
            emit(out, &serde_json::to_string(&run.output.stats).expect("stats serialize"))
        }
        Command::Pack { input, title, author, out: path, id, created_at } => {
            let (artwork, bytes) = pack_artwork(&input, &title, &author, id, created_at)?;
            local::write_file(&path, &bytes)?;
            emit(out, &artwork.artwork_id.to_string())
        }
        Command::Inspect { file } => {
            let artwork = local::read_artwork(&file)?;
            emit(out, &gesto_core::artwork::to_debug_json(&artwork))
        }
        Command::Login { server, author } => emit(out, &remote::login(&server, &author)?),
        Command::Push { server, token, file } => {
            let bytes = local::read_file(&file)?;
            emit(out, &remote::push(&server, &token, bytes)?)
        }
        Command::Pull { server, token, id, out: path } => {
            let bytes = remote::pull(&server, token.as_deref(), &id)?;
            local::write_file(&path, &bytes)
        }
    }
}
