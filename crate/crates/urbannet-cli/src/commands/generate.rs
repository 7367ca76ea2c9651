use std::path::PathBuf;

use clap::Parser;

use urbannet::descriptor::SnippetSpec;
use urbannet::synth::{self, ProfileKind};

use crate::config::ConfigFile;
use crate::CliError;

#[derive(Parser)]
pub struct Args {
    /// Output dataset directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Benchmark seed
    #[arg(long)]
    seed: Option<u64>,
    /// Road profile: mixed, flat, grade:SLOPE, crest:CURV, sag:CURV, banked:SLOPE
    #[arg(long)]
    profile: Option<String>,
    /// Vehicles per scene
    #[arg(long)]
    vehicles: Option<usize>,
    /// Also write per-scene 4-channel snippet tensors (large)
    #[arg(long)]
    emit_snippets: bool,
    /// Config file with `key = value` lines (flags win)
    #[arg(long)]
    config: Option<PathBuf>,
}

pub fn parse_profile(s: &str) -> Result<Option<ProfileKind>, CliError> {
    if s == "mixed" {
        return Ok(None);
    }
    if s == "flat" {
        return Ok(Some(ProfileKind::Flat));
    }
    let (kind, value) = s
        .split_once(':')
        .ok_or_else(|| CliError::Usage(format!("bad profile '{s}'")))?;
    let v: f64 = value
        .parse()
        .map_err(|_| CliError::Usage(format!("bad profile parameter in '{s}'")))?;
    Ok(Some(match kind {
        "grade" => ProfileKind::Grade { slope: v },
        "crest" => ProfileKind::Crest { curvature: v },
        "sag" => ProfileKind::Sag { curvature: v },
        "banked" => ProfileKind::Banked { cross_slope: v },
        _ => return Err(CliError::Usage(format!("unknown profile kind '{kind}'"))),
    }))
}

pub fn run(args: Args) -> Result<(), CliError> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let out = cfg
        .resolve_opt(args.out, "out")?
        .ok_or_else(|| CliError::Usage("generate needs --out".into()))?;
    let seed = cfg.resolve(args.seed, "seed", 0u64)?;
    let profile = cfg.resolve(args.profile, "profile", "mixed".to_string())?;
    let vehicles = cfg.resolve(args.vehicles, "vehicles", 50usize)?;
    let emit_snippets = cfg.resolve_bool(args.emit_snippets, "emit-snippets")?;

    let scenes = match parse_profile(&profile)? {
        None => synth::benchmark(seed),
        Some(kind) => synth::benchmark_with_profile(seed, kind, vehicles),
    }
    .map_err(|e| CliError::Data(e.to_string()))?;
    synth::write_dataset(&scenes, &out).map_err(|e| CliError::Data(e.to_string()))?;

    if emit_snippets {
        for (i, scene) in scenes.iter().enumerate() {
            let mut blob: Vec<u8> = Vec::new();
            blob.extend_from_slice(b"UNSN");
            blob.extend_from_slice(&1u32.to_le_bytes());
            blob.extend_from_slice(&(scene.vehicles.len() as u32).to_le_bytes());
            for v in &scene.vehicles {
                let spec = SnippetSpec::new(v.box2d, urbannet::descriptor::SNIPPET_SIZE);
                let rgb = synth::render_snippet(v.uid, &spec);
                let lane = urbannet::lanes::lane_channel(
                    &scene.lanes,
                    &scene.camera,
                    &v.box2d,
                    urbannet::descriptor::SNIPPET_SIZE,
                    false,
                );
                for ch in rgb.iter().chain(std::iter::once(&lane)) {
                    for val in ch {
                        blob.extend_from_slice(&val.to_le_bytes());
                    }
                }
            }
            super::write_output(&out.join(format!("scene_{i:03}/snippets.bin")), &blob)?;
        }
    }

    let total: usize = scenes.iter().map(|s| s.vehicles.len()).sum();
    println!(
        "generated {} scenes / {} vehicles under {}",
        scenes.len(),
        total,
        out.display()
    );
    Ok(())
}
