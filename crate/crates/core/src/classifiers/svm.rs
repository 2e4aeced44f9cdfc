//! Linear soft-margin SVM trained by deterministic full-batch subgradient
//! descent on the regularized hinge loss, plus recursive feature
//! elimination over the learned weights.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureVector;

use super::scaling::{scale_value, scale_features, learn_bounds};
use super::{ClassLabel, RiskAssessment, RiskLevel, Stage};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmHyper {
    pub c: f64,
    pub epochs: u32,
    pub learning_rate: f64,
    /// Recorded for provenance; the full-batch optimizer itself is
    /// deterministic and draws nothing from it.
    pub seed: u64,
}

impl Default for SvmHyper {
    fn default() -> Self {
        Self {
            c: 1.0,
            epochs: 4000,
            learning_rate: 1.0,
            seed: 0,
        }
    }
}

/// Hinge objective: lambda/2 |w|^2 + mean hinge, lambda = 1 / (C n).
pub fn svm_objective(
    samples: &[Vec<f64>],
    labels: &[ClassLabel],
    weights: &[f64],
    bias: f64,
    c: f64,
) -> f64 {
    let n = samples.len() as f64;
    let lambda = 1.0 / (c * n);
    let reg = 0.5 * lambda * weights.iter().map(|w| w * w).sum::<f64>();
    let hinge: f64 = samples
        .iter()
        .zip(labels)
        .map(|(x, l)| {
            let margin = l.sign() * (dot(weights, x) + bias);
            (1.0 - margin).max(0.0)
        })
        .sum::<f64>()
        / n;
    reg + hinge
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Raw hyperplane fit with the min/max raw decision values seen on the
/// training set (the probability calibration interval).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SvmFit {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub decision_lo: f64,
    pub decision_hi: f64,
}

fn validate_training_set(samples: &[Vec<f64>], labels: &[ClassLabel]) -> Result<usize> {
    if samples.len() != labels.len() {
        return Err(Error::InvalidInput(format!(
            "{} samples vs {} labels",
            samples.len(),
            labels.len()
        )));
    }
    let pos = labels.iter().filter(|l| l.sign() > 0.0).count();
    let neg = labels.len() - pos;
    if pos < 2 || neg < 2 {
        return Err(Error::SingleClass { needed: 2 });
    }
    let dim = samples[0].len();
    if dim == 0 || samples.iter().any(|s| s.len() != dim) {
        return Err(Error::InvalidInput(
            "samples must share a nonzero dimension".into(),
        ));
    }
    Ok(dim)
}

/// Trains on already-scaled vectors. The step decays as
/// lr / (1 + lr * lambda * t) and the returned hyperplane is the average
/// of the final quarter of iterates, which settles the hinge-kink
/// oscillation of plain subgradient steps.
pub fn train_svm(
    samples: &[Vec<f64>],
    labels: &[ClassLabel],
    hyper: &SvmHyper,
) -> Result<SvmFit> {
    let dim = validate_training_set(samples, labels)?;
    if hyper.c <= 0.0 || hyper.learning_rate <= 0.0 || hyper.epochs == 0 {
        return Err(Error::InvalidConfig(
            "svm hyperparameters must be positive".into(),
        ));
    }
    let n = samples.len() as f64;
    let lambda = 1.0 / (hyper.c * n);
    let lr = hyper.learning_rate;

    let mut w = vec![0.0; dim];
    let mut b = 0.0;
    let tail_start = (hyper.epochs - hyper.epochs / 4) as u64;
    let mut w_acc = vec![0.0; dim];
    let mut b_acc = 0.0;
    let mut tail_count = 0u64;

    let mut grad_w = vec![0.0; dim];
    for t in 1..=u64::from(hyper.epochs) {
        let eta = lr / (1.0 + lr * lambda * t as f64);
        grad_w.fill(0.0);
        let mut grad_b = 0.0;
        for (x, l) in samples.iter().zip(labels) {
            let y = l.sign();
            if y * (dot(&w, x) + b) < 1.0 {
                for (g, &xi) in grad_w.iter_mut().zip(x) {
                    *g -= y * xi;
                }
                grad_b -= y;
            }
        }
        for (wi, g) in w.iter_mut().zip(&grad_w) {
            *wi -= eta * (lambda * *wi + g / n);
        }
        b -= eta * grad_b / n;

        if t >= tail_start {
            for (acc, &wi) in w_acc.iter_mut().zip(&w) {
                *acc += wi;
            }
            b_acc += b;
            tail_count += 1;
        }
    }
    let weights: Vec<f64> = w_acc.iter().map(|acc| acc / tail_count as f64).collect();
    let bias = b_acc / tail_count as f64;

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for x in samples {
        let raw = dot(&weights, x) + bias;
        lo = lo.min(raw);
        hi = hi.max(raw);
    }
    if hi <= lo {
        hi = lo + 1.0;
    }
    Ok(SvmFit {
        weights,
        bias,
        decision_lo: lo,
        decision_hi: hi,
    })
}

/// Recursive feature elimination outcome: survivors in canonical order
/// plus the elimination order.
#[derive(Debug, Clone)]
pub struct RfeResult {
    pub selected: Vec<String>,
    pub eliminated: Vec<String>,
}

/// Repeatedly retrains and drops the feature with the smallest |weight|
/// (ties drop the larger canonical index) until `target_count` survive.
pub fn svm_rfe(
    samples: &[Vec<f64>],
    labels: &[ClassLabel],
    names: &[String],
    hyper: &SvmHyper,
    target_count: usize,
) -> Result<RfeResult> {
    let dim = validate_training_set(samples, labels)?;
    if names.len() != dim {
        return Err(Error::InvalidInput(format!(
            "{} names for {dim} feature columns",
            names.len()
        )));
    }
    if target_count == 0 || target_count >= dim {
        return Err(Error::InvalidConfig(format!(
            "target_count must be in [1, {}], got {target_count}",
            dim - 1
        )));
    }
    let mut surviving: Vec<usize> = (0..dim).collect();
    let mut eliminated = Vec::new();
    while surviving.len() > target_count {
        let projected: Vec<Vec<f64>> = samples
            .iter()
            .map(|s| surviving.iter().map(|&j| s[j]).collect())
            .collect();
        let fit = train_svm(&projected, labels, hyper)?;
        let mut drop_pos = 0;
        for k in 1..surviving.len() {
            let (wk, wd) = (fit.weights[k].abs(), fit.weights[drop_pos].abs());
            // tie goes to the larger canonical index, i.e. the later k
            if wk < wd || (wk == wd && surviving[k] > surviving[drop_pos]) {
                drop_pos = k;
            }
        }
        eliminated.push(names[surviving[drop_pos]].clone());
        surviving.remove(drop_pos);
    }
    Ok(RfeResult {
        selected: surviving.iter().map(|&j| names[j].clone()).collect(),
        eliminated,
    })
}

/// Trained SVM stage: hyperplane over the selected features plus the
/// scaling and calibration intervals learned from training data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinearSvmModel {
    pub selected: Vec<String>,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub feature_min: Vec<f64>,
    pub feature_max: Vec<f64>,
    pub decision_lo: f64,
    pub decision_hi: f64,
    pub hyper: SvmHyper,
}

impl LinearSvmModel {
    pub fn validate(&self) -> Result<()> {
        let k = self.selected.len();
        if k == 0
            || self.weights.len() != k
            || self.feature_min.len() != k
            || self.feature_max.len() != k
        {
            return Err(Error::ModelFormat(
                "selected/weights/bounds lengths disagree".into(),
            ));
        }
        if self
            .feature_min
            .iter()
            .zip(&self.feature_max)
            .any(|(lo, hi)| hi < lo)
        {
            return Err(Error::ModelFormat("feature_max below feature_min".into()));
        }
        if self.decision_hi <= self.decision_lo {
            return Err(Error::ModelFormat(
                "decision_hi must exceed decision_lo".into(),
            ));
        }
        Ok(())
    }

    /// Full training path over raw feature vectors: learn bounds, scale,
    /// run RFE down to `rfe_target` features, refit on the survivors.
    pub fn train_on_features(
        features: &[FeatureVector],
        labels: &[ClassLabel],
        names: &[String],
        hyper: &SvmHyper,
        rfe_target: usize,
    ) -> Result<(Self, Vec<String>)> {
        let raw: Vec<Vec<f64>> = features.iter().map(|f| f.values().to_vec()).collect();
        let (min, max) = learn_bounds(&raw);
        let scaled: Vec<Vec<f64>> = raw
            .iter()
            .map(|s| scale_features(s, &min, &max))
            .collect();
        let rfe = svm_rfe(&scaled, labels, names, hyper, rfe_target)?;
        let indices: Vec<usize> = rfe
            .selected
            .iter()
            .map(|n| names.iter().position(|m| m == n).expect("name from names"))
            .collect();
        let projected: Vec<Vec<f64>> = scaled
            .iter()
            .map(|s| indices.iter().map(|&j| s[j]).collect())
            .collect();
        let fit = train_svm(&projected, labels, hyper)?;
        let model = Self {
            selected: rfe.selected,
            weights: fit.weights,
            bias: fit.bias,
            feature_min: indices.iter().map(|&j| min[j]).collect(),
            feature_max: indices.iter().map(|&j| max[j]).collect(),
            decision_lo: fit.decision_lo,
            decision_hi: fit.decision_hi,
            hyper: hyper.clone(),
        };
        model.validate()?;
        Ok((model, rfe.eliminated))
    }

    /// Calibrated probability in [0, 1] for a full feature vector.
    pub fn probability(&self, f: &FeatureVector) -> Result<f64> {
        let mut raw = self.bias;
        for (k, name) in self.selected.iter().enumerate() {
            let value = f.get(name).ok_or_else(|| {
                Error::InvalidInput(format!("feature '{name}' missing from vector"))
            })?;
            raw += self.weights[k] * scale_value(value, self.feature_min[k], self.feature_max[k]);
        }
        Ok(((raw - self.decision_lo) / (self.decision_hi - self.decision_lo)).clamp(0.0, 1.0))
    }
}

/// First-stage risk rule: High for p >= 0.40, Medium for p >= 0.30,
/// Low below.
pub fn svm_risk_level(probability: f64) -> RiskLevel {
    if probability >= 0.40 {
        RiskLevel::High
    } else if probability >= 0.30 {
        RiskLevel::Medium
    } else {
        RiskLevel::Low
    }
}

pub fn svm_assess(model: &LinearSvmModel, f: &FeatureVector) -> Result<RiskAssessment> {
    let p = model.probability(f)?;
    Ok(RiskAssessment {
        probability_pct: 100.0 * p,
        level: svm_risk_level(p),
        stage: Stage::Svm,
        ann_output: None,
    })
}
