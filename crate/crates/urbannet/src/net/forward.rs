//! Deterministic single-sample inference. Convolutions accumulate in f64 so
//! the result is insensitive to summation order at f32 output precision.

use super::{LayerKind, NetError, NetSpec, WeightBundle, INPUT_CHANNELS, INPUT_SIZE};

/// Channel-major tensor: `data[c * h * w + y * w + x]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    pub channels: usize,
    pub height: usize,
    pub width: usize,
    pub data: Vec<f32>,
}

impl Tensor3 {
    pub fn zeros(channels: usize, height: usize, width: usize) -> Self {
        Self {
            channels,
            height,
            width,
            data: vec![0.0; channels * height * width],
        }
    }

    pub fn from_channels(channels: Vec<Vec<f32>>, height: usize, width: usize) -> Option<Self> {
        if channels.iter().any(|c| c.len() != height * width) {
            return None;
        }
        let n = channels.len();
        let mut data = Vec::with_capacity(n * height * width);
        for c in channels {
            data.extend_from_slice(&c);
        }
        Some(Self {
            channels: n,
            height,
            width,
            data,
        })
    }

    #[inline]
    pub fn at(&self, c: usize, y: usize, x: usize) -> f32 {
        self.data[(c * self.height + y) * self.width + x]
    }
}

fn conv3x3_same(input: &Tensor3, out_ch: usize, weights: &[f32], bias: &[f32]) -> Tensor3 {
    let (h, w, in_ch) = (input.height, input.width, input.channels);
    let mut out = Tensor3::zeros(out_ch, h, w);
    for (o, &bias_o) in bias.iter().enumerate().take(out_ch) {
        for y in 0..h {
            for x in 0..w {
                let mut acc = bias_o as f64;
                for i in 0..in_ch {
                    let w_base = ((o * in_ch + i) * 3) * 3;
                    let in_base = (i * h) * w;
                    for ky in 0..3usize {
                        let yy = y as isize + ky as isize - 1;
                        if yy < 0 || yy >= h as isize {
                            continue;
                        }
                        let row = in_base + yy as usize * w;
                        for kx in 0..3usize {
                            let xx = x as isize + kx as isize - 1;
                            if xx < 0 || xx >= w as isize {
                                continue;
                            }
                            acc += input.data[row + xx as usize] as f64
                                * weights[w_base + ky * 3 + kx] as f64;
                        }
                    }
                }
                out.data[(o * h + y) * w + x] = acc as f32;
            }
        }
    }
    out
}

fn relu_in_place(t: &mut Tensor3) {
    for v in &mut t.data {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
}

fn maxpool2x2(input: &Tensor3) -> Tensor3 {
    let (h, w, ch) = (input.height / 2, input.width / 2, input.channels);
    let mut out = Tensor3::zeros(ch, h, w);
    for c in 0..ch {
        for y in 0..h {
            for x in 0..w {
                let m = input
                    .at(c, 2 * y, 2 * x)
                    .max(input.at(c, 2 * y, 2 * x + 1))
                    .max(input.at(c, 2 * y + 1, 2 * x))
                    .max(input.at(c, 2 * y + 1, 2 * x + 1));
                out.data[(c * h + y) * w + x] = m;
            }
        }
    }
    out
}

fn fully_connected(input: &[f32], outputs: usize, weights: &[f32], bias: &[f32]) -> Vec<f32> {
    let inputs = input.len();
    (0..outputs)
        .map(|o| {
            let mut acc = bias[o] as f64;
            let row = &weights[o * inputs..(o + 1) * inputs];
            for (v, w) in input.iter().zip(row) {
                acc += *v as f64 * *w as f64;
            }
            acc as f32
        })
        .collect()
}

/// Run the descriptor network on a 4x128x128 input in [0, 1]. The flatten
/// between the backbone and the head keeps the channel-major layout.
pub fn forward(
    bundle: &WeightBundle,
    spec: &NetSpec,
    input: &Tensor3,
) -> Result<Vec<f32>, NetError> {
    bundle.validate(spec)?;
    if input.channels != INPUT_CHANNELS || input.height != INPUT_SIZE || input.width != INPUT_SIZE {
        return Err(NetError::BadInput(format!(
            "expected {INPUT_CHANNELS}x{INPUT_SIZE}x{INPUT_SIZE}, got {}x{}x{}",
            input.channels, input.height, input.width
        )));
    }
    if input.data.iter().any(|v| !v.is_finite()) {
        return Err(NetError::BadInput("non-finite input values".into()));
    }
    let mut feat = input.clone();
    let mut flat: Vec<f32> = Vec::new();
    for (idx, layer) in bundle.layers.iter().enumerate() {
        match layer.kind {
            LayerKind::Conv { out_ch, .. } => {
                feat = conv3x3_same(&feat, out_ch, &layer.weights, &layer.bias);
                relu_in_place(&mut feat);
                feat = maxpool2x2(&feat);
            }
            LayerKind::Fc { outputs, .. } => {
                if flat.is_empty() {
                    flat = feat.data.clone();
                }
                flat = fully_connected(&flat, outputs, &layer.weights, &layer.bias);
                // Rectify after fc1/fc2, identity after the output layer.
                if idx + 1 < bundle.layers.len() {
                    for v in &mut flat {
                        if *v < 0.0 {
                            *v = 0.0;
                        }
                    }
                }
            }
        }
    }
    Ok(flat)
}
