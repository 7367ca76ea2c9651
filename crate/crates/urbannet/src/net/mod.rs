//! Reference forward pass of the fixed 3D-descriptor network and its weight
//! bundle format. Training is out of scope; this module exists to pin the
//! architecture (parameter count, layer shapes, memory footprint) and to run
//! deterministic single-sample inference.
//!
//! Architecture: a 128x128x4 input runs through six conv(3x3, stride 1,
//! same padding) + maxpool(2x2, stride 2) pairs, each halving the spatial
//! size and doubling the channels (4 -> 8 -> ... -> 256), then three fully
//! connected layers 1024 -> 256 -> 64 -> 22. Rectifier activations follow
//! every convolution and the first two FC layers; the output layer is linear.

mod forward;
mod weights;

pub use forward::{forward, Tensor3};
pub use weights::{LayerWeights, WeightBundle};

use thiserror::Error;

pub const INPUT_CHANNELS: usize = 4;
pub const INPUT_SIZE: usize = 128;
pub const OUTPUT_LEN: usize = 22;
pub const CONV_KERNEL: usize = 3;

#[derive(Debug, Error)]
pub enum NetError {
    #[error("layer '{layer}': expected {expected}, found {found}")]
    ShapeMismatch {
        layer: String,
        expected: String,
        found: String,
    },
    #[error("layer '{layer}' contains non-finite weights")]
    NonFiniteWeights { layer: String },
    #[error("bad input tensor: {0}")]
    BadInput(String),
    #[error("weight file error: {0}")]
    Format(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerKind {
    Conv { in_ch: usize, out_ch: usize },
    Fc { inputs: usize, outputs: usize },
}

#[derive(Debug, Clone)]
pub struct LayerSpec {
    pub name: String,
    pub kind: LayerKind,
}

impl LayerSpec {
    pub fn weight_len(&self) -> usize {
        match self.kind {
            LayerKind::Conv { in_ch, out_ch } => in_ch * out_ch * CONV_KERNEL * CONV_KERNEL,
            LayerKind::Fc { inputs, outputs } => inputs * outputs,
        }
    }

    pub fn bias_len(&self) -> usize {
        match self.kind {
            LayerKind::Conv { out_ch, .. } => out_ch,
            LayerKind::Fc { outputs, .. } => outputs,
        }
    }

    pub fn parameter_count(&self) -> u64 {
        (self.weight_len() + self.bias_len()) as u64
    }
}

/// The fixed descriptor architecture.
#[derive(Debug, Clone)]
pub struct NetSpec {
    layers: Vec<LayerSpec>,
}

impl Default for NetSpec {
    fn default() -> Self {
        Self::standard()
    }
}

impl NetSpec {
    pub fn standard() -> Self {
        let mut layers = Vec::new();
        let mut ch = INPUT_CHANNELS;
        for i in 0..6 {
            layers.push(LayerSpec {
                name: format!("conv{}", i + 1),
                kind: LayerKind::Conv {
                    in_ch: ch,
                    out_ch: ch * 2,
                },
            });
            ch *= 2;
        }
        // Spatial size after six pooling halvings: 128 / 2^6 = 2.
        let spatial = INPUT_SIZE >> 6;
        let mut n = ch * spatial * spatial;
        for i in 0..2 {
            layers.push(LayerSpec {
                name: format!("fc{}", i + 1),
                kind: LayerKind::Fc {
                    inputs: n,
                    outputs: n / 4,
                },
            });
            n /= 4;
        }
        layers.push(LayerSpec {
            name: "fc3".into(),
            kind: LayerKind::Fc {
                inputs: n,
                outputs: OUTPUT_LEN,
            },
        });
        Self { layers }
    }

    pub fn layers(&self) -> &[LayerSpec] {
        &self.layers
    }

    pub fn parameter_count(&self) -> u64 {
        self.layers.iter().map(|l| l.parameter_count()).sum()
    }

    /// Parameters in the convolutional backbone alone.
    pub fn conv_parameter_count(&self) -> u64 {
        self.layers
            .iter()
            .filter(|l| matches!(l.kind, LayerKind::Conv { .. }))
            .map(|l| l.parameter_count())
            .sum()
    }

    /// Parameters in the fully connected head alone.
    pub fn fc_parameter_count(&self) -> u64 {
        self.layers
            .iter()
            .filter(|l| matches!(l.kind, LayerKind::Fc { .. }))
            .map(|l| l.parameter_count())
            .sum()
    }
}
