//! Temperature-tuned message sources.
//!
//! A [`SourceFamily`] fixes one score per message; the generative complexity
//! [`Lambda`] acts as a softmax temperature over those scores.

use serde::{Deserialize, Serialize};
use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::info::{entropy, Bits, ProbVector};

/// Default upper limit on the generative complexity.
pub const DEFAULT_LAMBDA_MAX: f64 = 1e3;

/// Generative complexity; a strictly positive temperature.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Lambda(f64);

impl Lambda {
    pub fn new(value: f64) -> Result<Self> {
        Self::with_max(value, DEFAULT_LAMBDA_MAX)
    }

    pub fn with_max(value: f64, max: f64) -> Result<Self> {
        if !value.is_finite() || value <= 0.0 {
            return Err(Error::domain(format!(
                "lambda must be positive, got {value}"
            )));
        }
        if value > max {
            return Err(Error::domain(format!(
                "lambda {value} exceeds maximum {max}"
            )));
        }
        Ok(Lambda(value))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl<'de> Deserialize<'de> for Lambda {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Lambda::new(f64::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

#[derive(Deserialize, Serialize)]
struct SourceFamilyRepr {
    messages: Vec<String>,
    scores: Vec<f64>,
}

/// Messages with fixed base scores (log-weights).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SourceFamilyRepr", into = "SourceFamilyRepr")]
pub struct SourceFamily {
    message_ids: Vec<String>,
    base_scores: Vec<f64>,
}

impl SourceFamily {
    pub fn new(message_ids: Vec<String>, base_scores: Vec<f64>) -> Result<Self> {
        if message_ids.is_empty() {
            return Err(Error::domain("source family needs at least one message"));
        }
        if message_ids.len() != base_scores.len() {
            return Err(Error::shape(format!(
                "{} messages but {} scores",
                message_ids.len(),
                base_scores.len()
            )));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = message_ids.iter().find(|id| !seen.insert(id.as_str())) {
            return Err(Error::domain(format!("duplicate message id `{dup}`")));
        }
        if let Some(i) = base_scores.iter().position(|s| !s.is_finite()) {
            return Err(Error::domain(format!(
                "score for message `{}` is not finite",
                message_ids[i]
            )));
        }
        Ok(Self {
            message_ids,
            base_scores,
        })
    }

    /// Messages named `m0`, `m1`, ...
    pub fn from_scores(base_scores: Vec<f64>) -> Result<Self> {
        let ids = (0..base_scores.len()).map(|i| format!("m{i}")).collect();
        Self::new(ids, base_scores)
    }

    pub fn len(&self) -> usize {
        self.message_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.message_ids.is_empty()
    }

    pub fn message_ids(&self) -> &[String] {
        &self.message_ids
    }

    pub fn base_scores(&self) -> &[f64] {
        &self.base_scores
    }

    /// Reorders messages; `order[k]` is the old index placed at position `k`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.len() {
            return Err(Error::shape(
                "permutation length differs from message count",
            ));
        }
        Self::new(
            order.iter().map(|&k| self.message_ids[k].clone()).collect(),
            order.iter().map(|&k| self.base_scores[k]).collect(),
        )
    }
}

impl TryFrom<SourceFamilyRepr> for SourceFamily {
    type Error = Error;

    fn try_from(r: SourceFamilyRepr) -> Result<Self> {
        SourceFamily::new(r.messages, r.scores)
    }
}

impl From<SourceFamily> for SourceFamilyRepr {
    fn from(f: SourceFamily) -> Self {
        SourceFamilyRepr {
            messages: f.message_ids,
            scores: f.base_scores,
        }
    }
}

/// `P_λ(m) ∝ exp(s_m / λ)`, evaluated with the maximum score subtracted.
pub fn message_distribution(family: &SourceFamily, lambda: Lambda) -> ProbVector {
    let max = family
        .base_scores
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = family
        .base_scores
        .iter()
        .map(|s| ((s - max) / lambda.get()).exp())
        .collect();
    // The argmax contributes exp(0) = 1, so the total is at least 1.
    ProbVector::from_weights(weights).expect("softmax weights are finite with total >= 1")
}

/// Semiotic breadth `S(λ)`: entropy of the message distribution.
pub fn breadth(family: &SourceFamily, lambda: Lambda) -> Bits {
    entropy(&message_distribution(family, lambda))
}
