//! The `1 − n×L − 1` perceptron: one input, `L` tanh layers of `n` units,
//! one identity output.

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::autodiff::{Jet, Tape};
use crate::error::{Error, Result};
use crate::real::{Precision, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Architecture {
    pub hidden_layers: usize,
    pub hidden_units: usize,
}

impl Architecture {
    pub fn new(hidden_layers: usize, hidden_units: usize) -> Result<Self> {
        let arch = Architecture {
            hidden_layers,
            hidden_units,
        };
        arch.validate()?;
        Ok(arch)
    }

    pub fn validate(&self) -> Result<()> {
        if self.hidden_layers == 0 || self.hidden_units == 0 {
            return Err(Error::Invalid {
                key: "architecture",
                reason: format!(
                    "1-{}x{}-1 needs at least one layer and one unit",
                    self.hidden_units, self.hidden_layers
                ),
            });
        }
        Ok(())
    }

    /// `2n + (L − 1)(n² + n) + (n + 1)`.
    pub fn parameter_count(&self) -> usize {
        let n = self.hidden_units;
        2 * n + (self.hidden_layers - 1) * (n * n + n) + (n + 1)
    }

    /// `(rows, cols)` of every affine layer, input layer first.
    pub fn layer_shapes(&self) -> Vec<(usize, usize)> {
        let n = self.hidden_units;
        let mut shapes = Vec::with_capacity(self.hidden_layers + 1);
        shapes.push((n, 1));
        shapes.extend(std::iter::repeat_n((n, n), self.hidden_layers - 1));
        shapes.push((1, n));
        shapes
    }
}

impl std::fmt::Display for Architecture {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "1-{}x{}-1", self.hidden_units, self.hidden_layers)
    }
}

/// Parameter count of a fully connected tanh net with `inputs` inputs,
/// `layers` hidden layers of `units` each and one output.
pub fn dense_parameter_count(inputs: usize, units: usize, layers: usize) -> usize {
    assert!(layers >= 1);
    units * (inputs + 1) + (layers - 1) * (units * units + units) + units + 1
}

/// All weights and biases, flat: for each layer the row-major weights
/// followed by the biases.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpParams<T> {
    arch: Architecture,
    data: Vec<T>,
    // (offset, rows, cols) per affine layer
    layout: Vec<(usize, usize, usize)>,
}

impl<T: Real> MlpParams<T> {
    pub fn zeros(arch: Architecture) -> Self {
        let mut layout = Vec::with_capacity(arch.hidden_layers + 1);
        let mut offset = 0;
        for (rows, cols) in arch.layer_shapes() {
            layout.push((offset, rows, cols));
            offset += rows * cols + rows;
        }
        debug_assert_eq!(offset, arch.parameter_count());
        MlpParams {
            arch,
            data: vec![T::zero(); offset],
            layout,
        }
    }

    /// Glorot-uniform weights `U(±√(6/(fan_in + fan_out)))`, zero biases.
    pub fn init(arch: Architecture, seed: u64) -> Self {
        let mut params = Self::zeros(arch);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for &(offset, rows, cols) in &params.layout {
            let limit = (6.0 / (rows + cols) as f64).sqrt();
            for w in &mut params.data[offset..offset + rows * cols] {
                *w = T::of(rng.gen_range(-limit..limit));
            }
        }
        params
    }

    pub fn from_vec(arch: Architecture, data: Vec<T>) -> Result<Self> {
        let mut params = Self::zeros(arch);
        if data.len() != params.data.len() {
            return Err(Error::Dimension {
                context: "parameter vector",
                expected: params.data.len(),
                actual: data.len(),
            });
        }
        params.data = data;
        Ok(params)
    }

    pub fn architecture(&self) -> Architecture {
        self.arch
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    /// `(weights, bias)` of affine layer `l` (0-based, input layer first).
    pub fn layer(&self, l: usize) -> (&[T], &[T]) {
        let (offset, rows, cols) = self.layout[l];
        let w_end = offset + rows * cols;
        (&self.data[offset..w_end], &self.data[w_end..w_end + rows])
    }

    pub fn layer_mut(&mut self, l: usize) -> (&mut [T], &mut [T]) {
        let (offset, rows, cols) = self.layout[l];
        let w_end = offset + rows * cols;
        self.data[offset..w_end + rows].split_at_mut(rows * cols)
    }

    /// Knowledge transfer: an independent copy to start the next time level.
    pub fn transfer(&self) -> Self {
        self.clone()
    }

    /// Network output without derivatives.
    pub fn eval(&self, x: T) -> T {
        let mut cur = vec![x];
        let mut next = Vec::with_capacity(self.arch.hidden_units);
        let last = self.layout.len() - 1;
        for (l, &(offset, rows, cols)) in self.layout.iter().enumerate() {
            let w_end = offset + rows * cols;
            let weights = &self.data[offset..w_end];
            let bias = &self.data[w_end..w_end + rows];
            next.clear();
            for (row, &b) in weights.chunks_exact(cols).zip(bias) {
                let mut v = T::zero();
                for (&w, &a) in row.iter().zip(&cur) {
                    v += w * a;
                }
                let s = v + b;
                next.push(if l == last { s } else { s.tanh() });
            }
            std::mem::swap(&mut cur, &mut next);
        }
        cur[0]
    }

    /// `(ũ, ũ_x, ũ_xx)` at `x`, recording the pass on `tape` for a later
    /// [`Tape::backward`] against [`MlpParams::as_slice`].
    pub fn forward_jet(&self, x: T, tape: &mut Tape<T>) -> Jet<T> {
        tape.begin(&[Jet::seed(x)]);
        let last = self.layout.len() - 1;
        for (l, &(offset, rows, _)) in self.layout.iter().enumerate() {
            tape.affine(&self.data, offset, rows);
            if l != last {
                tape.tanh();
            }
        }
        tape.output()[0]
    }

    /// Jet without keeping the tape around.
    pub fn jet(&self, x: T) -> Jet<T> {
        self.forward_jet(x, &mut Tape::new())
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Same parameters in another precision.
    pub fn cast<U: Real>(&self) -> MlpParams<U> {
        MlpParams {
            arch: self.arch,
            data: self.data.iter().map(|v| U::of(v.as_f64())).collect(),
            layout: self.layout.clone(),
        }
    }
}

const MAGIC: &[u8; 12] = b"BURGERSPINN\0";
const FORMAT_VERSION: u32 = 1;

/// Human-readable mirror of a checkpoint header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointMeta {
    pub format_version: u32,
    pub hidden_layers: usize,
    pub hidden_units: usize,
    pub precision: Precision,
    pub parameter_count: usize,
}

/// Binary checkpoint: 12-byte magic, `u32` version, `u32` hidden layers,
/// `u32` hidden units, one byte holding the float width (4 or 8), then every
/// parameter little-endian in flat layout order.
pub fn encode_checkpoint<T: Real>(params: &MlpParams<T>) -> Vec<u8> {
    let arch = params.architecture();
    let mut out = Vec::with_capacity(29 + params.len() * T::PRECISION.bytes());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(arch.hidden_layers as u32).to_le_bytes());
    out.extend_from_slice(&(arch.hidden_units as u32).to_le_bytes());
    out.push(T::PRECISION.bytes() as u8);
    for &v in params.as_slice() {
        v.write_le(&mut out);
    }
    out
}

fn bad(detail: impl Into<String>) -> Error {
    Error::Format {
        what: "checkpoint",
        detail: detail.into(),
    }
}

fn read_u32(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap())
}

/// Reads the header only.
pub fn checkpoint_meta(bytes: &[u8]) -> Result<CheckpointMeta> {
    if bytes.len() < 25 {
        return Err(bad("truncated header"));
    }
    if &bytes[..12] != MAGIC {
        return Err(bad("bad magic"));
    }
    let version = read_u32(bytes, 12);
    if version != FORMAT_VERSION {
        return Err(bad(format!("unsupported version {version}")));
    }
    let arch = Architecture::new(read_u32(bytes, 16) as usize, read_u32(bytes, 20) as usize)?;
    let precision = Precision::from_bytes(bytes[24] as usize)
        .ok_or_else(|| bad(format!("bad precision flag {}", bytes[24])))?;
    Ok(CheckpointMeta {
        format_version: version,
        hidden_layers: arch.hidden_layers,
        hidden_units: arch.hidden_units,
        precision,
        parameter_count: arch.parameter_count(),
    })
}

/// Decodes a checkpoint written in precision `T`.
pub fn decode_checkpoint<T: Real>(bytes: &[u8]) -> Result<MlpParams<T>> {
    let meta = checkpoint_meta(bytes)?;
    if meta.precision != T::PRECISION {
        return Err(bad(format!(
            "checkpoint holds {} parameters, {} requested",
            meta.precision,
            T::PRECISION
        )));
    }
    let width = T::PRECISION.bytes();
    let body = &bytes[25..];
    if body.len() != meta.parameter_count * width {
        return Err(bad(format!(
            "expected {} parameter bytes, found {}",
            meta.parameter_count * width,
            body.len()
        )));
    }
    let data = body.chunks_exact(width).map(T::read_le).collect();
    MlpParams::from_vec(
        Architecture::new(meta.hidden_layers, meta.hidden_units)?,
        data,
    )
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".json");
    PathBuf::from(name)
}

/// Writes `path` and its `path.json` metadata sidecar.
pub fn save_checkpoint<T: Real>(params: &MlpParams<T>, path: &Path) -> Result<()> {
    let bytes = encode_checkpoint(params);
    fs::write(path, &bytes).map_err(|e| Error::io(path, e))?;
    let meta = checkpoint_meta(&bytes)?;
    let json = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    let side = sidecar_path(path);
    fs::write(&side, json + "\n").map_err(|e| Error::io(side, e))
}

pub fn load_checkpoint<T: Real>(path: &Path) -> Result<MlpParams<T>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_checkpoint(&bytes)
}
