use std::path::PathBuf;

use clap::Parser;

use urbannet::net::{LayerKind, NetSpec, WeightBundle};

use crate::CliError;

#[derive(Parser)]
pub struct Args {
    /// Validate a weight bundle against the architecture
    #[arg(long)]
    weights: Option<PathBuf>,
    /// Write a seeded random weight bundle and exit
    #[arg(long)]
    write_random: Option<PathBuf>,
    /// Seed for --write-random
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

pub fn run(args: Args) -> Result<(), CliError> {
    let spec = NetSpec::standard();

    if let Some(path) = args.write_random {
        let bundle = WeightBundle::random(&spec, args.seed);
        super::write_output(&path, &bundle.to_bytes())?;
        println!(
            "wrote random bundle (seed {}) to {}",
            args.seed,
            path.display()
        );
        return Ok(());
    }

    println!("{:<8} {:<18} {:>12}", "layer", "shape", "parameters");
    for l in spec.layers() {
        let shape = match l.kind {
            LayerKind::Conv { in_ch, out_ch } => format!("conv 3x3 {in_ch}->{out_ch}"),
            LayerKind::Fc { inputs, outputs } => format!("fc {inputs}->{outputs}"),
        };
        println!("{:<8} {:<18} {:>12}", l.name, shape, l.parameter_count());
    }
    println!(
        "{:<8} {:<18} {:>12}",
        "total",
        format!(
            "conv {} + fc {}",
            spec.conv_parameter_count(),
            spec.fc_parameter_count()
        ),
        spec.parameter_count()
    );

    if let Some(path) = args.weights {
        let bundle = WeightBundle::load(&path).map_err(|e| CliError::Data(e.to_string()))?;
        bundle
            .validate(&spec)
            .map_err(|e| CliError::Data(e.to_string()))?;
        let bytes = bundle.to_bytes().len();
        println!(
            "weights: {} ({} bytes serialized, {})",
            path.display(),
            bytes,
            if bytes < 3 * 1024 * 1024 {
                "under the 3 MiB budget"
            } else {
                "OVER the 3 MiB budget"
            }
        );
    }
    Ok(())
}
