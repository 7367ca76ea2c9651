use std::path::PathBuf;

use clap::Parser;

use urbannet::descriptor::NoiseSpec;
use urbannet::eval::{
    ablation_csv, ablation_grid, plot_bins_svg, run_ablation, AblationScene, MatchConfig,
};

use crate::config::ConfigFile;
use crate::CliError;

#[derive(Parser)]
pub struct Args {
    /// Dataset directory (from `generate`)
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Output directory for ablation.txt / ablation.csv / bins.svg
    #[arg(long)]
    out: Option<PathBuf>,
    /// Keypoint noise of the oracle descriptor
    #[arg(long)]
    sigma_kp: Option<f64>,
    /// Dimension noise of the oracle descriptor
    #[arg(long)]
    sigma_dim: Option<f64>,
    /// Observation-angle noise of the oracle descriptor
    #[arg(long)]
    sigma_alpha: Option<f64>,
    /// Oracle noise seed
    #[arg(long)]
    oracle_seed: Option<u64>,
    /// Map elevation-noise seed for the 10/40 cm columns
    #[arg(long)]
    map_seed: Option<u64>,
    /// Config file with `key = value` lines (flags win)
    #[arg(long)]
    config: Option<PathBuf>,
}

pub fn run(args: Args) -> Result<(), CliError> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let dataset: PathBuf = cfg
        .resolve_opt(args.dataset, "dataset")?
        .ok_or_else(|| CliError::Usage("ablate needs --dataset".into()))?;
    let out: PathBuf = cfg
        .resolve_opt(args.out, "out")?
        .ok_or_else(|| CliError::Usage("ablate needs --out".into()))?;
    let noise = NoiseSpec::with_seed(
        cfg.resolve(args.sigma_kp, "sigma-kp", 0.02)?,
        cfg.resolve(args.sigma_dim, "sigma-dim", 0.005)?,
        cfg.resolve(args.sigma_alpha, "sigma-alpha", 0.01)?,
        cfg.resolve(args.oracle_seed, "oracle-seed", 0u64)?,
    );
    let map_seed = cfg.resolve(args.map_seed, "map-seed", 9u64)?;

    let scenes = super::load_dataset(&dataset)?;
    let abl: Result<Vec<AblationScene>, _> = scenes.iter().map(AblationScene::from_files).collect();
    let abl = abl.map_err(|e| CliError::Data(e.to_string()))?;

    let table = run_ablation(&abl, &noise, &MatchConfig::default(), map_seed)
        .map_err(|e| CliError::Data(e.to_string()))?;

    let grid = ablation_grid(&table);
    super::write_output(&out.join("ablation.txt"), grid.as_bytes())?;
    super::write_output(&out.join("ablation.csv"), ablation_csv(&table).as_bytes())?;

    // Mean-IoU-by-range plot for the full setup, one line per noise column,
    // one line per noise level.
    let series: Vec<(&str, &str, &[urbannet::eval::BinStats])> = vec![
        (
            "Nominal",
            "#2a9d2a",
            &table.cell("UrbanNet", "Nominal").unwrap().report.bins,
        ),
        (
            "STD 10cm",
            "#ff9900",
            &table.cell("UrbanNet", "STD 10cm").unwrap().report.bins,
        ),
        (
            "STD 40cm",
            "#dd2222",
            &table.cell("UrbanNet", "STD 40cm").unwrap().report.bins,
        ),
    ];
    super::write_output(&out.join("bins.svg"), plot_bins_svg(&series).as_bytes())?;

    println!("{grid}");
    Ok(())
}
