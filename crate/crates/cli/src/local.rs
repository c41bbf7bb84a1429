//! Offline commands: replay, pack, inspect.

use std::fs::{self, File};
use std::io::BufReader;
use std::path::Path;

use gesto_core::artwork::{decode, encode, Artwork};
use gesto_core::canvas::{fit_plane, read_scan_log, CanvasPlane, DrawMode};
use gesto_core::export::{export_mesh, MeshFormat};
use gesto_core::pipeline::{replay, PipelineSettings, ReplayOutput};
use gesto_core::pose::read_pose_log;
use gesto_core::TriangleMesh;
use sha2::{Digest, Sha256};
use uuid::Uuid;

use crate::{BrushOverrides, CliError, ModeArg, PipelineArgs};

pub struct ReplayRun {
    pub settings: PipelineSettings,
    pub output: ReplayOutput,
}

pub(crate) fn read_file(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|source| CliError::Read { path: path.into(), source })
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|source| CliError::Write { path: path.into(), source })
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|source| CliError::Read { path: path.into(), source })
}

/// Reads a wall scan and fits the canvas plane.
pub fn load_canvas(path: &Path, max_rms: f64) -> Result<CanvasPlane, CliError> {
    let samples = read_scan_log(open(path)?).map_err(|source| CliError::Log { path: path.into(), source })?;
    fit_plane(&samples, max_rms).map_err(CliError::Scan)
}

pub fn replay_file(args: &PipelineArgs) -> Result<ReplayRun, CliError> {
    let overrides = BrushOverrides::parse(&args.brush)?;
    let mode = match args.mode {
        ModeArg::Canvas => DrawMode::Canvas2D,
        ModeArg::Free => DrawMode::Free3D,
    };
    if mode == DrawMode::Canvas2D && args.scan.is_none() {
        return Err(CliError::Usage("--mode 2d requires --scan FILE (the wall scan to draw on)".into()));
    }
    let settings = overrides.apply(PipelineSettings { mode, seed: args.seed, ..PipelineSettings::default() })?;
    let stream = read_pose_log(open(&args.poses)?).map_err(|source| CliError::Log { path: args.poses.clone(), source })?;
    let canvas = args.scan.as_deref().map(|p| load_canvas(p, overrides.max_rms())).transpose()?;
    let output = replay(&stream, canvas, &settings)?;
    Ok(ReplayRun { settings, output })
}

pub(crate) fn write_mesh(mesh: &TriangleMesh, path: &Path) -> Result<(), CliError> {
    let format = MeshFormat::from_path(path)
        .ok_or_else(|| CliError::Usage(format!("{}: output must end in .obj or .glb", path.display())))?;
    write_file(path, &export_mesh(mesh, format))
}

/// Id derived from everything that determines the packed bytes, so packing
/// the same inputs twice yields the same file.
fn derived_id(args: &PipelineArgs, title: &str, author: &str, created_at: i64) -> Result<Uuid, CliError> {
    let mut h = Sha256::new();
    let mut field = |bytes: &[u8]| {
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(bytes);
    };
    field(&read_file(&args.poses)?);
    field(&args.scan.as_deref().map(read_file).transpose()?.unwrap_or_default());
    field(title.as_bytes());
    field(author.as_bytes());
    field(&created_at.to_le_bytes());
    field(&args.seed.to_le_bytes());
    field(&[args.mode as u8]);
    for b in &args.brush {
        field(b.as_bytes());
    }
    let digest = h.finalize();
    let mut bytes = [0u8; 16];
    bytes.copy_from_slice(&digest[..16]);
    Ok(uuid::Builder::from_custom_bytes(bytes).into_uuid())
}

pub fn pack_artwork(
    args: &PipelineArgs,
    title: &str,
    author: &str,
    id: Option<Uuid>,
    created_at: i64,
) -> Result<(Artwork, Vec<u8>), CliError> {
    let run = replay_file(args)?;
    let id = match id {
        Some(id) => id,
        None => derived_id(args, title, author, created_at)?,
    };
    let artwork = run.output.into_artwork(id, author, title, created_at)?;
    let bytes = encode(&artwork);
    Ok((artwork, bytes))
}

pub(crate) fn read_artwork(path: &Path) -> Result<Artwork, CliError> {
    decode(&read_file(path)?).map_err(|source| CliError::Decode { path: path.into(), source })
}
