use std::path::{Path, PathBuf};

use clap::Parser;
use rayon::prelude::*;

use urbannet::descriptor::{
    self, DescriptorVector, Detection, NoiseSpec, OracleMode, SnippetSpec, SNIPPET_SIZE,
};
use urbannet::eval::label_objects;
use urbannet::lanes::lane_channel;
use urbannet::lifting::lift;
use urbannet::net::{forward, NetSpec, Tensor3, WeightBundle};
use urbannet::seeded;
use urbannet::synth::{render_snippet, SceneFiles};
use urbannet::tin::NoiseMode;

use crate::config::ConfigFile;
use crate::records::{write_lifted, LiftedRecord};
use crate::CliError;

#[derive(Parser)]
pub struct Args {
    /// Dataset directory (from `generate`)
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Output lifted-records file
    #[arg(long)]
    out: Option<PathBuf>,
    /// Descriptor source: perfect | noisy | file | net
    #[arg(long)]
    descriptor_mode: Option<String>,
    /// Keypoint noise (normalized units) for the noisy oracle
    #[arg(long)]
    sigma_kp: Option<f64>,
    /// Dimension noise (scaled units) for the noisy oracle
    #[arg(long)]
    sigma_dim: Option<f64>,
    /// Observation-angle noise (normalized units) for the noisy oracle
    #[arg(long)]
    sigma_alpha: Option<f64>,
    /// Oracle noise seed
    #[arg(long)]
    oracle_seed: Option<u64>,
    /// Detections file for --descriptor-mode file
    #[arg(long)]
    detections: Option<PathBuf>,
    /// Weight bundle for --descriptor-mode net
    #[arg(long)]
    weights: Option<PathBuf>,
    /// Map elevation noise: none | elevation | vertex
    #[arg(long)]
    map_noise: Option<String>,
    /// Map noise standard deviation in meters
    #[arg(long)]
    map_sigma: Option<f64>,
    /// Map noise seed
    #[arg(long)]
    map_seed: Option<u64>,
    /// Emit/consume the reduced bottom-only descriptor
    #[arg(long)]
    bottom_only: bool,
    /// Zero the lane channel (net descriptor mode)
    #[arg(long)]
    no_centerlines: bool,
    /// Worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
    /// Config file with `key = value` lines (flags win)
    #[arg(long)]
    config: Option<PathBuf>,
}

enum DescriptorSource {
    Oracle(OracleMode, bool),
    File(Vec<(u64, Vec<Detection>)>),
    Net(Box<WeightBundle>, bool, bool),
}

pub fn parse_map_noise(kind: &str, sigma: f64, seed: u64) -> Result<NoiseMode, CliError> {
    match kind {
        "none" => Ok(NoiseMode::Nominal),
        "elevation" => Ok(NoiseMode::ElevationOnly { sigma, seed }),
        "vertex" => Ok(NoiseMode::VertexPerturbed { sigma, seed }),
        other => Err(CliError::Usage(format!("unknown map noise '{other}'"))),
    }
}

fn scene_detections(
    scene_idx: usize,
    scene: &SceneFiles,
    source: &DescriptorSource,
) -> Result<Vec<Detection>, CliError> {
    match source {
        DescriptorSource::Oracle(mode, bottom_only) => {
            let objects =
                label_objects(&scene.labels).map_err(|e| CliError::Data(e.to_string()))?;
            descriptor::oracle_descriptor(
                scene_idx as u64,
                &objects,
                &scene.camera,
                mode,
                *bottom_only,
            )
            .map_err(|e| CliError::Data(e.to_string()))
        }
        DescriptorSource::File(frames) => Ok(frames
            .iter()
            .find(|(f, _)| *f == scene_idx as u64)
            .map(|(_, d)| d.clone())
            .unwrap_or_default()),
        DescriptorSource::Net(bundle, bottom_only, no_centerlines) => {
            let spec = NetSpec::standard();
            let mut out = Vec::with_capacity(scene.labels.len());
            for (li, label) in scene.labels.iter().enumerate() {
                let snip = SnippetSpec::new(label.box2d, SNIPPET_SIZE);
                let uid = seeded::mix_words(&[scene_idx as u64, li as u64]);
                let rgb = render_snippet(uid, &snip);
                let lanes = lane_channel(
                    &scene.lanes,
                    &scene.camera,
                    &label.box2d,
                    SNIPPET_SIZE,
                    *no_centerlines,
                );
                let mut channels: Vec<Vec<f32>> = rgb.into_iter().collect();
                channels.push(lanes);
                let input =
                    Tensor3::from_channels(channels, SNIPPET_SIZE as usize, SNIPPET_SIZE as usize)
                        .expect("channel shapes are fixed");
                let raw =
                    forward(bundle, &spec, &input).map_err(|e| CliError::Data(e.to_string()))?;
                let values: Vec<f64> = raw.iter().map(|&v| v as f64).collect();
                let Some(vector) = DescriptorVector::from_values(&values) else {
                    return Err(CliError::Internal("network output length drifted".into()));
                };
                let vector = if *bottom_only {
                    match vector {
                        DescriptorVector::Full(f) => DescriptorVector::Bottom(f.to_bottom()),
                        b => b,
                    }
                } else {
                    vector
                };
                out.push(Detection {
                    box2d: label.box2d,
                    descriptor: vector,
                    // Untrained networks carry no meaningful ranking signal.
                    confidence: 1.0,
                    class: label.class,
                });
            }
            Ok(out)
        }
    }
}

pub fn run(args: Args) -> Result<(), CliError> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let dataset: PathBuf = cfg
        .resolve_opt(args.dataset, "dataset")?
        .ok_or_else(|| CliError::Usage("lift needs --dataset".into()))?;
    let out: PathBuf = cfg
        .resolve_opt(args.out, "out")?
        .ok_or_else(|| CliError::Usage("lift needs --out".into()))?;
    let mode = cfg.resolve(
        args.descriptor_mode,
        "descriptor-mode",
        "perfect".to_string(),
    )?;
    let sigma_kp = cfg.resolve(args.sigma_kp, "sigma-kp", 0.02)?;
    let sigma_dim = cfg.resolve(args.sigma_dim, "sigma-dim", 0.005)?;
    let sigma_alpha = cfg.resolve(args.sigma_alpha, "sigma-alpha", 0.01)?;
    let oracle_seed = cfg.resolve(args.oracle_seed, "oracle-seed", 0u64)?;
    let map_noise_kind = cfg.resolve(args.map_noise, "map-noise", "none".to_string())?;
    let map_sigma = cfg.resolve(args.map_sigma, "map-sigma", 0.0)?;
    let map_seed = cfg.resolve(args.map_seed, "map-seed", 0u64)?;
    let bottom_only = cfg.resolve_bool(args.bottom_only, "bottom-only")?;
    let no_centerlines = cfg.resolve_bool(args.no_centerlines, "no-centerlines")?;
    let threads = cfg.resolve_opt(args.threads, "threads")?;

    let noise_mode = parse_map_noise(&map_noise_kind, map_sigma, map_seed)?;
    let source = match mode.as_str() {
        "perfect" => DescriptorSource::Oracle(OracleMode::Perfect, bottom_only),
        "noisy" => DescriptorSource::Oracle(
            OracleMode::Noisy(NoiseSpec::with_seed(
                sigma_kp,
                sigma_dim,
                sigma_alpha,
                oracle_seed,
            )),
            bottom_only,
        ),
        "file" => {
            let path = cfg
                .resolve_opt(args.detections, "detections")?
                .ok_or_else(|| CliError::Usage("descriptor-mode file needs --detections".into()))?;
            let text = std::fs::read_to_string(&path)
                .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
            DescriptorSource::File(descriptor::read_detections(&path, &text)?)
        }
        "net" => {
            let path: PathBuf = cfg
                .resolve_opt(args.weights, "weights")?
                .ok_or_else(|| CliError::Usage("descriptor-mode net needs --weights".into()))?;
            let bundle = WeightBundle::load(&path).map_err(|e| CliError::Data(e.to_string()))?;
            bundle
                .validate(&NetSpec::standard())
                .map_err(|e| CliError::Data(e.to_string()))?;
            DescriptorSource::Net(Box::new(bundle), bottom_only, no_centerlines)
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown descriptor mode '{other}'"
            )))
        }
    };

    let scenes = super::load_dataset(&dataset)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Internal(e.to_string()))?;

    // Frame-level parallelism with deterministic ordered collection.
    let per_scene: Result<Vec<(Vec<LiftedRecord>, usize)>, CliError> = pool.install(|| {
        scenes
            .par_iter()
            .enumerate()
            .map(|(idx, scene)| {
                let detections = scene_detections(idx, scene, &source)?;
                let map = scene
                    .tin
                    .with_noise(noise_mode)
                    .map_err(|e| CliError::Data(e.to_string()))?;
                let mut records = Vec::with_capacity(detections.len());
                let mut failures = 0usize;
                for det in &detections {
                    match lift(det, &scene.camera, &map) {
                        Ok(r) => records.push(LiftedRecord::new(
                            idx as u64,
                            det.class,
                            det.confidence,
                            &r,
                        )),
                        Err(_) => failures += 1,
                    }
                }
                Ok((records, failures))
            })
            .collect()
    });
    let per_scene = per_scene?;
    let mut records = Vec::new();
    let mut failures = 0;
    for (r, f) in per_scene {
        records.extend(r);
        failures += f;
    }
    super::write_output(&out, write_lifted(&records).as_bytes())?;
    println!(
        "lifted {} detections ({failures} failed) into {}",
        records.len(),
        out.display()
    );
    Ok(())
}

pub fn read_lifted_file(path: &Path) -> Result<Vec<LiftedRecord>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    Ok(crate::records::read_lifted(path, &text)?)
}
