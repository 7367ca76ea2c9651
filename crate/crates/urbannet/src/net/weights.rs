//! Weight bundle: per-layer tensors in the documented order, serialized as a
//! self-describing little-endian binary file.
//!
//! File layout (all integers little-endian):
//!   magic "UNWB", u32 major version,
//!   u32 layer count, then per layer:
//!     u32 name length, name bytes (utf-8),
//!     u8 kind (0 = conv 3x3, 1 = fully connected),
//!     u32 in, u32 out,
//!     u64 weight count, f32 weights,
//!     u64 bias count, f32 biases.
//!
//! Conv weights are indexed [out][in][ky][kx]; FC weights [out][in].

use std::io::{Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{LayerKind, NetError, NetSpec};

const MAGIC: &[u8; 4] = b"UNWB";
const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct LayerWeights {
    pub name: String,
    pub kind: LayerKind,
    pub weights: Vec<f32>,
    pub bias: Vec<f32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightBundle {
    pub layers: Vec<LayerWeights>,
}

impl WeightBundle {
    /// All-zero weights matching `spec`.
    pub fn zeros(spec: &NetSpec) -> Self {
        Self {
            layers: spec
                .layers()
                .iter()
                .map(|l| LayerWeights {
                    name: l.name.clone(),
                    kind: l.kind,
                    weights: vec![0.0; l.weight_len()],
                    bias: vec![0.0; l.bias_len()],
                })
                .collect(),
        }
    }

    /// Seeded random initialization, scaled by 1/sqrt(fan-in) so activations
    /// stay O(1) through the stack.
    pub fn random(spec: &NetSpec, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layers = spec
            .layers()
            .iter()
            .map(|l| {
                let fan_in = match l.kind {
                    LayerKind::Conv { in_ch, .. } => in_ch * 9,
                    LayerKind::Fc { inputs, .. } => inputs,
                };
                let scale = 1.0 / (fan_in as f32).sqrt();
                LayerWeights {
                    name: l.name.clone(),
                    kind: l.kind,
                    weights: (0..l.weight_len())
                        .map(|_| rng.gen_range(-1.0f32..1.0) * scale)
                        .collect(),
                    bias: (0..l.bias_len())
                        .map(|_| rng.gen_range(-0.1f32..0.1))
                        .collect(),
                }
            })
            .collect();
        Self { layers }
    }

    /// Check layer names, kinds, tensor shapes and value finiteness against
    /// the architecture.
    pub fn validate(&self, spec: &NetSpec) -> Result<(), NetError> {
        if self.layers.len() != spec.layers().len() {
            return Err(NetError::ShapeMismatch {
                layer: "<bundle>".into(),
                expected: format!("{} layers", spec.layers().len()),
                found: format!("{} layers", self.layers.len()),
            });
        }
        for (have, want) in self.layers.iter().zip(spec.layers()) {
            if have.name != want.name || have.kind != want.kind {
                return Err(NetError::ShapeMismatch {
                    layer: want.name.clone(),
                    expected: format!("{} {:?}", want.name, want.kind),
                    found: format!("{} {:?}", have.name, have.kind),
                });
            }
            if have.weights.len() != want.weight_len() || have.bias.len() != want.bias_len() {
                return Err(NetError::ShapeMismatch {
                    layer: want.name.clone(),
                    expected: format!("{} weights + {} biases", want.weight_len(), want.bias_len()),
                    found: format!(
                        "{} weights + {} biases",
                        have.weights.len(),
                        have.bias.len()
                    ),
                });
            }
            if have.weights.iter().any(|w| !w.is_finite())
                || have.bias.iter().any(|b| !b.is_finite())
            {
                return Err(NetError::NonFiniteWeights {
                    layer: want.name.clone(),
                });
            }
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(self.layers.len() as u32).to_le_bytes());
        for l in &self.layers {
            out.extend_from_slice(&(l.name.len() as u32).to_le_bytes());
            out.extend_from_slice(l.name.as_bytes());
            let (tag, a, b) = match l.kind {
                LayerKind::Conv { in_ch, out_ch } => (0u8, in_ch as u32, out_ch as u32),
                LayerKind::Fc { inputs, outputs } => (1u8, inputs as u32, outputs as u32),
            };
            out.push(tag);
            out.extend_from_slice(&a.to_le_bytes());
            out.extend_from_slice(&b.to_le_bytes());
            out.extend_from_slice(&(l.weights.len() as u64).to_le_bytes());
            for w in &l.weights {
                out.extend_from_slice(&w.to_le_bytes());
            }
            out.extend_from_slice(&(l.bias.len() as u64).to_le_bytes());
            for b in &l.bias {
                out.extend_from_slice(&b.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, NetError> {
        let mut r = Cursor { bytes, pos: 0 };
        let magic = r.take(4)?;
        if magic != MAGIC {
            return Err(NetError::Format("bad magic; not a weight bundle".into()));
        }
        let version = r.u32()?;
        if version != VERSION {
            return Err(NetError::Format(format!(
                "unsupported weight format version {version} (supported: {VERSION})"
            )));
        }
        let n_layers = r.u32()? as usize;
        if n_layers > 1024 {
            return Err(NetError::Format(format!(
                "implausible layer count {n_layers}"
            )));
        }
        let mut layers = Vec::with_capacity(n_layers);
        for _ in 0..n_layers {
            let name_len = r.u32()? as usize;
            if name_len > 4096 {
                return Err(NetError::Format("implausible layer name length".into()));
            }
            let name = String::from_utf8(r.take(name_len)?.to_vec())
                .map_err(|_| NetError::Format("layer name is not utf-8".into()))?;
            let tag = r.take(1)?[0];
            let a = r.u32()? as usize;
            let b = r.u32()? as usize;
            let kind = match tag {
                0 => LayerKind::Conv {
                    in_ch: a,
                    out_ch: b,
                },
                1 => LayerKind::Fc {
                    inputs: a,
                    outputs: b,
                },
                t => return Err(NetError::Format(format!("unknown layer kind tag {t}"))),
            };
            let w_len = r.u64()? as usize;
            let weights = r.f32s(w_len)?;
            let b_len = r.u64()? as usize;
            let bias = r.f32s(b_len)?;
            layers.push(LayerWeights {
                name,
                kind,
                weights,
                bias,
            });
        }
        Ok(Self { layers })
    }

    pub fn save(&self, path: &Path) -> Result<(), NetError> {
        let bytes = self.to_bytes();
        let mut f = std::fs::File::create(path)?;
        f.write_all(&bytes)?;
        f.sync_all()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, NetError> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        Self::from_bytes(&bytes)
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], NetError> {
        if self.pos + n > self.bytes.len() {
            return Err(NetError::Format(format!(
                "unexpected end of file at byte {} (wanted {n} more)",
                self.pos
            )));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, NetError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, NetError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f32s(&mut self, n: usize) -> Result<Vec<f32>, NetError> {
        let raw = self.take(n * 4)?;
        Ok(raw
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }
}
