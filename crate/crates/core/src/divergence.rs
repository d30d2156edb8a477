//! Discrete divergences, in bits.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{check_probabilities, Label, LabelSpace, PredictionRecord};

pub const DEFAULT_KL_SMOOTHING: f64 = 1e-6;

/// Probability vector indexed by label-space position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDistribution {
    probs: Vec<f64>,
}

impl DiscreteDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::InvalidDistribution(format!(
                "need at least two outcomes, got {}",
                probs.len()
            )));
        }
        check_probabilities(&probs).map_err(Error::InvalidDistribution)?;
        Ok(DiscreteDistribution { probs })
    }

    pub fn uniform(k: usize) -> Result<Self> {
        Self::new(vec![1.0 / k as f64; k])
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

pub fn point_mass(label: &Label, space: &LabelSpace) -> Result<DiscreteDistribution> {
    let idx = space.index_of(label)?;
    let mut probs = vec![0.0; space.len()];
    probs[idx] = 1.0;
    Ok(DiscreteDistribution { probs })
}

fn same_dim(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    Ok(())
}

pub fn tv(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<f64> {
    same_dim(p, q)?;
    Ok(0.5
        * p.probs
            .iter()
            .zip(&q.probs)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>())
}

/// Σ p log2(p/q), skipping p = 0 terms. Infinite if q = 0 where p > 0.
fn kl_raw(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(a, _)| **a > 0.0)
        .map(|(a, b)| a * (a / b).log2())
        .sum()
}

/// KL(p ‖ q′) with q′ = (1 − ε)q + ε·uniform.
pub fn kl(p: &DiscreteDistribution, q: &DiscreteDistribution, smoothing: f64) -> Result<f64> {
    same_dim(p, q)?;
    if !(smoothing > 0.0 && smoothing < 0.5) {
        return Err(Error::InvalidDistribution(format!(
            "KL smoothing {smoothing} must lie in (0, 0.5)"
        )));
    }
    let u = smoothing / q.len() as f64;
    let smoothed: Vec<f64> = q.probs.iter().map(|b| (1.0 - smoothing) * b + u).collect();
    // rounding can push tiny same-support values a hair below zero
    Ok(kl_raw(&p.probs, &smoothed).max(0.0))
}

pub fn js(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<f64> {
    same_dim(p, q)?;
    let m: Vec<f64> = p
        .probs
        .iter()
        .zip(&q.probs)
        .map(|(a, b)| 0.5 * (a + b))
        .collect();
    let v = 0.5 * kl_raw(&p.probs, &m) + 0.5 * kl_raw(&q.probs, &m);
    Ok(v.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DivergenceKind {
    #[default]
    Tv,
    Kl,
    Js,
}

impl DivergenceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DivergenceKind::Tv => "tv",
            DivergenceKind::Kl => "kl",
            DivergenceKind::Js => "js",
        }
    }
}

impl fmt::Display for DivergenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DivergenceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tv" | "total_variation" => Ok(DivergenceKind::Tv),
            "kl" | "kullback_leibler" => Ok(DivergenceKind::Kl),
            "js" | "jensen_shannon" => Ok(DivergenceKind::Js),
            other => Err(Error::Config(format!("unknown divergence {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergenceSpec {
    pub kind: DivergenceKind,
    pub kl_smoothing_epsilon: f64,
}

impl Default for DivergenceSpec {
    fn default() -> Self {
        DivergenceSpec {
            kind: DivergenceKind::Tv,
            kl_smoothing_epsilon: DEFAULT_KL_SMOOTHING,
        }
    }
}

impl DivergenceSpec {
    pub fn new(kind: DivergenceKind) -> Self {
        DivergenceSpec {
            kind,
            ..Default::default()
        }
    }

    pub fn divergence(&self, p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<f64> {
        match self.kind {
            DivergenceKind::Tv => tv(p, q),
            DivergenceKind::Kl => kl(p, q, self.kl_smoothing_epsilon),
            DivergenceKind::Js => js(p, q),
        }
    }
}

impl fmt::Display for DivergenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            DivergenceKind::Kl => write!(f, "kl(smoothing={:e})", self.kl_smoothing_epsilon),
            k => write!(f, "{k}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictionMode {
    /// Compare point masses of the true and predicted labels.
    #[default]
    HardLabel,
    /// Compare the true point mass to the predicted distribution.
    Probabilistic,
}

impl PredictionMode {
    pub fn as_str(self) -> &'static str {
        match self {
            PredictionMode::HardLabel => "hard_label",
            PredictionMode::Probabilistic => "probabilistic",
        }
    }
}

/// Predicted distribution of a record: its probability vector, or in the
/// binary case `(1 − score, score)`.
pub fn predicted_distribution(
    record: &PredictionRecord,
    space: &LabelSpace,
) -> Result<DiscreteDistribution> {
    if let Some(p) = &record.probs {
        return DiscreteDistribution::new(p.clone());
    }
    match record.score {
        Some(s) if space.is_binary() => DiscreteDistribution::new(vec![1.0 - s, s]),
        Some(_) => Err(Error::MissingScores {
            id: record.id.clone(),
            needed_for:
                "probabilistic divergence over a non-binary label space (probability vector)".into(),
        }),
        None => Err(Error::MissingScores {
            id: record.id.clone(),
            needed_for: "probabilistic divergence".into(),
        }),
    }
}

pub fn record_divergence(
    record: &PredictionRecord,
    space: &LabelSpace,
    spec: &DivergenceSpec,
    mode: PredictionMode,
) -> Result<f64> {
    let truth = point_mass(&record.y_true, space)?;
    let predicted = match mode {
        PredictionMode::HardLabel => point_mass(&record.y_pred, space)?,
        PredictionMode::Probabilistic => predicted_distribution(record, space)?,
    };
    spec.divergence(&truth, &predicted)
}
