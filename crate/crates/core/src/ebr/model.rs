//! Feed-forward energy network `E(x, ŷ; θ)` over standardized features.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::features::{FeatureVector, FEATURE_NAMES, N_FEATURES};
use super::TrainConfig;
use crate::error::{Error, Result};

pub const HIDDEN: usize = 16;

const W1: usize = 0;
const B1: usize = W1 + HIDDEN * N_FEATURES;
const W2: usize = B1 + HIDDEN;
const B2: usize = W2 + HIDDEN;
/// Number of trainable parameters.
pub const N_PARAMS: usize = B2 + 1;

pub const MODEL_VERSION: &str = "ebr-v1";

/// Per-feature standardization statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardization {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardization {
    pub fn identity() -> Self {
        Standardization {
            mean: vec![0.0; N_FEATURES],
            std: vec![1.0; N_FEATURES],
        }
    }

    /// Population mean/stddev; zero-variance features get stddev 1.
    pub fn fit<'a>(features: impl IntoIterator<Item = &'a FeatureVector>) -> Self {
        let mut n = 0usize;
        let mut sum = [0.0; N_FEATURES];
        let mut sq = [0.0; N_FEATURES];
        for f in features {
            n += 1;
            for (i, v) in f.0.iter().enumerate() {
                sum[i] += v;
                sq[i] += v * v;
            }
        }
        if n == 0 {
            return Self::identity();
        }
        let mut mean = vec![0.0; N_FEATURES];
        let mut std = vec![1.0; N_FEATURES];
        for i in 0..N_FEATURES {
            mean[i] = sum[i] / n as f64;
            let var = (sq[i] / n as f64 - mean[i] * mean[i]).max(0.0);
            if var.sqrt() > 1e-12 {
                std[i] = var.sqrt();
            }
        }
        Standardization { mean, std }
    }

    fn apply(&self, f: &FeatureVector) -> [f64; N_FEATURES] {
        std::array::from_fn(|i| (f.0[i] - self.mean[i]) / self.std[i])
    }
}

/// Standardization plus a 12→16→1 tanh network with a linear output.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyModel {
    pub standardization: Standardization,
    /// Layout: hidden weights (row-major 16×12), hidden bias, output
    /// weights, output bias.
    params: Vec<f64>,
    /// `max_len` used for the length feature.
    pub feature_max_len: usize,
    pub train_config: Option<TrainConfig>,
}

/// Intermediate values kept for backpropagation.
pub(crate) struct Forward {
    z: [f64; N_FEATURES],
    hidden: [f64; HIDDEN],
    pub energy: f64,
}

impl EnergyModel {
    pub fn zeros(feature_max_len: usize) -> Self {
        EnergyModel {
            standardization: Standardization::identity(),
            params: vec![0.0; N_PARAMS],
            feature_max_len,
            train_config: None,
        }
    }

    /// Weights drawn uniformly from ±0.1.
    pub fn init(seed: u64, standardization: Standardization, feature_max_len: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = (0..N_PARAMS).map(|_| rng.random_range(-0.1..=0.1)).collect();
        EnergyModel {
            standardization,
            params,
            feature_max_len,
            train_config: None,
        }
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    /// Multiplies the output layer (weights and bias) by `c`.
    pub fn scale_output(&mut self, c: f64) {
        for p in &mut self.params[W2..] {
            *p *= c;
        }
    }

    pub(crate) fn forward(&self, f: &FeatureVector) -> Forward {
        let z = self.standardization.apply(f);
        let p = &self.params;
        let mut hidden = [0.0; HIDDEN];
        let mut energy = p[B2];
        for (h, out) in hidden.iter_mut().enumerate() {
            let row = &p[W1 + h * N_FEATURES..W1 + (h + 1) * N_FEATURES];
            let pre: f64 = p[B1 + h] + row.iter().zip(&z).map(|(w, x)| w * x).sum::<f64>();
            *out = pre.tanh();
            energy += p[W2 + h] * *out;
        }
        Forward { z, hidden, energy }
    }

    /// Adds `d_energy · ∂E/∂θ` into `grad`.
    pub(crate) fn backward(&self, fw: &Forward, d_energy: f64, grad: &mut [f64]) {
        let p = &self.params;
        grad[B2] += d_energy;
        for h in 0..HIDDEN {
            grad[W2 + h] += d_energy * fw.hidden[h];
            let d_pre = d_energy * p[W2 + h] * (1.0 - fw.hidden[h] * fw.hidden[h]);
            grad[B1 + h] += d_pre;
            let row = &mut grad[W1 + h * N_FEATURES..W1 + (h + 1) * N_FEATURES];
            for (g, x) in row.iter_mut().zip(&fw.z) {
                *g += d_pre * x;
            }
        }
    }

    /// Energy of one feature vector; lower is better.
    pub fn energy(&self, f: &FeatureVector) -> Result<f64> {
        if !f.is_finite() {
            return Err(Error::NonFinite(format!("feature vector {:?}", f.0)));
        }
        Ok(self.forward(f).energy)
    }

    pub fn to_json(&self) -> String {
        let p = &self.params;
        let file = ModelFile {
            version: MODEL_VERSION.to_owned(),
            feature_names: FEATURE_NAMES.iter().map(|s| (*s).to_owned()).collect(),
            standardization: self.standardization.clone(),
            layers: vec![
                Layer {
                    shape: [HIDDEN, N_FEATURES],
                    weights: p[W1..B1].to_vec(),
                    bias: p[B1..W2].to_vec(),
                    activation: "tanh".to_owned(),
                },
                Layer {
                    shape: [1, HIDDEN],
                    weights: p[W2..B2].to_vec(),
                    bias: vec![p[B2]],
                    activation: "linear".to_owned(),
                },
            ],
            feature_max_len: self.feature_max_len,
            train_config: self.train_config.clone(),
        };
        serde_json::to_string_pretty(&file).expect("serializable model")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(s)?;
        if file.version != MODEL_VERSION {
            return Err(Error::invalid(format!(
                "unsupported model version `{}`",
                file.version
            )));
        }
        let st = &file.standardization;
        if st.mean.len() != N_FEATURES || st.std.len() != N_FEATURES {
            return Err(Error::invalid("standardization arrays must have 12 entries"));
        }
        if st.std.iter().any(|s| !(*s > 0.0)) {
            return Err(Error::invalid("standardization stddev must be positive"));
        }
        let shapes_ok = file.layers.len() == 2
            && file.layers[0].shape == [HIDDEN, N_FEATURES]
            && file.layers[0].weights.len() == HIDDEN * N_FEATURES
            && file.layers[0].bias.len() == HIDDEN
            && file.layers[1].shape == [1, HIDDEN]
            && file.layers[1].weights.len() == HIDDEN
            && file.layers[1].bias.len() == 1;
        if !shapes_ok {
            return Err(Error::invalid("model layers must be 12→16→1"));
        }
        let mut params = Vec::with_capacity(N_PARAMS);
        for l in &file.layers {
            params.extend_from_slice(&l.weights);
            params.extend_from_slice(&l.bias);
        }
        Ok(EnergyModel {
            standardization: file.standardization,
            params,
            feature_max_len: file.feature_max_len,
            train_config: file.train_config,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct Layer {
    shape: [usize; 2],
    weights: Vec<f64>,
    bias: Vec<f64>,
    activation: String,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    version: String,
    feature_names: Vec<String>,
    standardization: Standardization,
    layers: Vec<Layer>,
    feature_max_len: usize,
    train_config: Option<TrainConfig>,
}
