//! Synthetic scene generation: parametric sloped roads, lane center-lines,
//! vehicles conformed to the surface, ground-truth labels and procedural
//! snippet content. The generator doubles as the pipeline's oracle: perfect
//! descriptors plus a nominal map must reproduce the generated boxes.

mod benchmark;
mod labels;
mod profile;
mod scene;
#[cfg(test)]
mod tests;
mod texture;

pub use benchmark::{benchmark, benchmark_with_profile, read_dataset, write_dataset, SceneFiles};
pub use labels::{
    gt_to_labels, read_labels, read_labels_file, write_labels, write_labels_file, LabelRecord,
};
pub use profile::{PlanRect, ProfileKind, RoadProfile};
pub use scene::{
    generate_scene, paper_camera, paper_intrinsics, GtVehicle, Scene, SceneSpec, MAX_LATERAL_JITTER,
};
pub use texture::render_snippet;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error(
        "could not place {requested} vehicles ({placed} placed before the attempt budget ran out)"
    )]
    InfeasibleSpec { placed: usize, requested: usize },
    #[error("invalid scene spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Profile(#[from] profile::ProfileError),
    #[error(transparent)]
    Tin(#[from] crate::tin::TinError),
    #[error(transparent)]
    Lane(#[from] crate::lanes::LaneError),
    #[error(transparent)]
    Geometry(#[from] crate::geometry::GeometryError),
    #[error(transparent)]
    Format(#[from] crate::io::FormatError),
}
