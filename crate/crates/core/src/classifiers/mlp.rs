//! 8-10-1 sigmoid network trained by full-batch backpropagation on mean
//! squared error.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::scaling::{learn_bounds, scale_features};
use super::{RiskAssessment, RiskLevel, Stage};

pub const MLP_INPUTS: usize = 8;
pub const MLP_HIDDEN: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MlpHyper {
    pub learning_rate: f64,
    pub epochs: u32,
    pub seed: u64,
}

impl Default for MlpHyper {
    fn default() -> Self {
        Self {
            learning_rate: 0.5,
            epochs: 8000,
            seed: 17,
        }
    }
}

/// Network state. `w1` is input-major ([input * 10 + hidden]); inputs are
/// scaled into [-1, 1] with the stored bounds before the forward pass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: f64,
    pub input_min: Vec<f64>,
    pub input_max: Vec<f64>,
    pub hyper: MlpHyper,
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

impl MlpModel {
    /// Weights drawn uniformly from [-0.5, 0.5) in a fixed order: w1
    /// input-major, then b1, w2, b2.
    pub fn seeded(seed: u64, hyper: MlpHyper) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |n: usize| -> Vec<f64> {
            (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect()
        };
        Self {
            w1: draw(MLP_INPUTS * MLP_HIDDEN),
            b1: draw(MLP_HIDDEN),
            w2: draw(MLP_HIDDEN),
            b2: draw(1)[0],
            input_min: vec![-1.0; MLP_INPUTS],
            input_max: vec![1.0; MLP_INPUTS],
            hyper,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.w1.len() != MLP_INPUTS * MLP_HIDDEN
            || self.b1.len() != MLP_HIDDEN
            || self.w2.len() != MLP_HIDDEN
            || self.input_min.len() != MLP_INPUTS
            || self.input_max.len() != MLP_INPUTS
        {
            return Err(Error::ModelFormat("mlp topology must be 8-10-1".into()));
        }
        let finite = self
            .w1
            .iter()
            .chain(&self.b1)
            .chain(&self.w2)
            .chain(std::iter::once(&self.b2))
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::ModelFormat("non-finite mlp weight".into()));
        }
        Ok(())
    }

    pub fn scale_inputs(&self, raw: &[f64]) -> Result<Vec<f64>> {
        if raw.len() != MLP_INPUTS {
            return Err(Error::InvalidInput(format!(
                "mlp expects {MLP_INPUTS} inputs, got {}",
                raw.len()
            )));
        }
        Ok(scale_features(raw, &self.input_min, &self.input_max))
    }

    fn hidden(&self, x: &[f64]) -> Vec<f64> {
        (0..MLP_HIDDEN)
            .map(|j| {
                let z: f64 = (0..MLP_INPUTS)
                    .map(|i| x[i] * self.w1[i * MLP_HIDDEN + j])
                    .sum::<f64>()
                    + self.b1[j];
                sigmoid(z)
            })
            .collect()
    }
}

/// Forward pass over inputs already scaled to [-1, 1].
pub fn mlp_forward(model: &MlpModel, x: &[f64]) -> Result<f64> {
    if x.len() != MLP_INPUTS {
        return Err(Error::InvalidInput(format!(
            "mlp expects {MLP_INPUTS} inputs, got {}",
            x.len()
        )));
    }
    let h = model.hidden(x);
    let z: f64 = h.iter().zip(&model.w2).map(|(hi, wi)| hi * wi).sum::<f64>() + model.b2;
    Ok(sigmoid(z))
}

/// Mean squared error L = (1/2n) sum (o - y)^2 over scaled samples.
pub fn mlp_loss(model: &MlpModel, xs: &[Vec<f64>], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    xs.iter()
        .zip(ys)
        .map(|(x, &y)| {
            let o = mlp_forward(model, x).expect("scaled sample arity");
            (o - y).powi(2)
        })
        .sum::<f64>()
        / (2.0 * n)
}

#[derive(Debug, Clone)]
pub struct MlpGradients {
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: f64,
}

/// Backpropagated gradients of `mlp_loss` over a scaled batch.
#[allow(clippy::needless_range_loop)]
pub fn mlp_gradients(model: &MlpModel, xs: &[Vec<f64>], ys: &[f64]) -> MlpGradients {
    let n = xs.len() as f64;
    let mut gw1 = vec![0.0; MLP_INPUTS * MLP_HIDDEN];
    let mut gb1 = vec![0.0; MLP_HIDDEN];
    let mut gw2 = vec![0.0; MLP_HIDDEN];
    let mut gb2 = 0.0;
    for (x, &y) in xs.iter().zip(ys) {
        let h = model.hidden(x);
        let z: f64 = h.iter().zip(&model.w2).map(|(hi, wi)| hi * wi).sum::<f64>() + model.b2;
        let o = sigmoid(z);
        let delta_o = (o - y) / n * o * (1.0 - o);
        for j in 0..MLP_HIDDEN {
            gw2[j] += h[j] * delta_o;
            let delta_h = model.w2[j] * delta_o * h[j] * (1.0 - h[j]);
            gb1[j] += delta_h;
            for i in 0..MLP_INPUTS {
                gw1[i * MLP_HIDDEN + j] += x[i] * delta_h;
            }
        }
        gb2 += delta_o;
    }
    MlpGradients {
        w1: gw1,
        b1: gb1,
        w2: gw2,
        b2: gb2,
    }
}

/// Trains on raw 8-value inputs with labels in {0, 1}; scaling bounds are
/// learned from the batch. Deterministic for a fixed (seed, lr, epochs).
pub fn train_mlp(
    samples: &[Vec<f64>],
    labels: &[f64],
    hyper: &MlpHyper,
) -> Result<MlpModel> {
    if samples.is_empty() {
        return Err(Error::InvalidInput("empty mlp training set".into()));
    }
    if samples.len() != labels.len() {
        return Err(Error::InvalidInput(format!(
            "{} samples vs {} labels",
            samples.len(),
            labels.len()
        )));
    }
    if samples.iter().any(|s| s.len() != MLP_INPUTS) {
        return Err(Error::InvalidInput(format!(
            "mlp samples must have {MLP_INPUTS} values"
        )));
    }
    if labels.iter().any(|&y| y != 0.0 && y != 1.0) {
        return Err(Error::InvalidInput("mlp labels must be 0 or 1".into()));
    }
    let has_pos = labels.contains(&1.0);
    let has_neg = labels.contains(&0.0);
    if !has_pos || !has_neg {
        return Err(Error::SingleClass { needed: 1 });
    }

    let (min, max) = learn_bounds(samples);
    let mut model = MlpModel::seeded(hyper.seed, hyper.clone());
    model.input_min = min;
    model.input_max = max;
    let xs: Vec<Vec<f64>> = samples
        .iter()
        .map(|s| scale_features(s, &model.input_min, &model.input_max))
        .collect();

    for _ in 0..hyper.epochs {
        let g = mlp_gradients(&model, &xs, labels);
        for (w, gw) in model.w1.iter_mut().zip(&g.w1) {
            *w -= hyper.learning_rate * gw;
        }
        for (b, gb) in model.b1.iter_mut().zip(&g.b1) {
            *b -= hyper.learning_rate * gb;
        }
        for (w, gw) in model.w2.iter_mut().zip(&g.w2) {
            *w -= hyper.learning_rate * gw;
        }
        model.b2 -= hyper.learning_rate * g.b2;
    }
    Ok(model)
}

/// Second-stage rule: output >= 0.5 is High (1), below is Low (0).
pub fn ann_risk_level(output: f64) -> RiskLevel {
    if output >= 0.5 {
        RiskLevel::High
    } else {
        RiskLevel::Low
    }
}

/// Assessment over raw (unscaled) inputs.
pub fn mlp_assess(model: &MlpModel, raw: &[f64]) -> Result<RiskAssessment> {
    let x = model.scale_inputs(raw)?;
    let o = mlp_forward(model, &x)?;
    Ok(RiskAssessment {
        probability_pct: 100.0 * o,
        level: ann_risk_level(o),
        stage: Stage::Ann,
        ann_output: Some(o),
    })
}
