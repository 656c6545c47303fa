use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;
use std::str::FromStr;

use super::CountTable;
use crate::error::{Error, Result};
use crate::info::{self, Bits, JointDist};

/// Entropy estimator family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Entropy of the empirical frequencies.
    Plugin,
    /// Plugin plus `(K̂ - 1) / (2N ln 2)` bits, `K̂` the observed support.
    MillerMadow,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plugin" => Ok(Method::Plugin),
            "miller_madow" | "miller-madow" => Ok(Method::MillerMadow),
            other => Err(Error::domain(format!("unknown estimator `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    Message,
    Interpretation,
}

/// Estimator settings. `smoothing` adds a pseudo-count to every cell of the
/// table before frequencies are formed; it is zero unless asked for.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimator {
    pub method: Method,
    pub smoothing: f64,
}

impl Estimator {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            smoothing: 0.0,
        }
    }

    pub fn with_smoothing(method: Method, smoothing: f64) -> Result<Self> {
        if !smoothing.is_finite() || smoothing < 0.0 {
            return Err(Error::domain(format!(
                "smoothing must be >= 0, got {smoothing}"
            )));
        }
        Ok(Self { method, smoothing })
    }

    fn joint(&self, t: &CountTable) -> JointDist {
        let (rows, cols) = t.shape();
        let denom = t.total() as f64 + self.smoothing * (rows * cols) as f64;
        let probs = t
            .counts()
            .iter()
            .map(|&c| (c as f64 + self.smoothing) / denom)
            .collect();
        JointDist::from_parts_unchecked(rows, cols, probs)
    }

    fn correction(&self, counts: impl Iterator<Item = u64>, total: u64) -> f64 {
        match self.method {
            Method::Plugin => 0.0,
            Method::MillerMadow => {
                let support = counts.filter(|&c| c > 0).count();
                (support as f64 - 1.0) / (2.0 * total as f64 * LN_2)
            }
        }
    }

    fn marginal_entropy(&self, t: &CountTable, axis: Axis) -> f64 {
        let joint = self.joint(t);
        let (probs, counts) = match axis {
            Axis::Message => (joint.row_marginal(), t.message_counts()),
            Axis::Interpretation => (joint.column_marginal(), t.interpretation_counts()),
        };
        info::entropy_raw(&probs) + self.correction(counts.into_iter(), t.total())
    }

    pub fn entropy(&self, t: &CountTable, axis: Axis) -> Bits {
        Bits::snap(self.marginal_entropy(t, axis))
    }

    pub fn mutual_information(&self, t: &CountTable) -> Bits {
        let joint = self.joint(t);
        match self.method {
            Method::Plugin => info::mutual_information(&joint),
            Method::MillerMadow => {
                let h_m = self.marginal_entropy(t, Axis::Message);
                let h_i = self.marginal_entropy(t, Axis::Interpretation);
                let h_joint = info::entropy_raw(joint.as_slice())
                    + self.correction(t.counts().iter().copied(), t.total());
                Bits::snap((h_m + h_i - h_joint).max(0.0))
            }
        }
    }

    /// `H(Int) - I`, both terms from the same method, floored at zero.
    pub fn conditional_entropy(&self, t: &CountTable) -> Bits {
        let h_i = self.marginal_entropy(t, Axis::Interpretation);
        Bits::snap((h_i - self.mutual_information(t).get()).max(0.0))
    }
}

pub fn estimate_entropy(t: &CountTable, axis: Axis, method: Method) -> Bits {
    Estimator::new(method).entropy(t, axis)
}

pub fn estimate_mutual_information(t: &CountTable, method: Method) -> Bits {
    Estimator::new(method).mutual_information(t)
}

pub fn estimate_conditional_entropy(t: &CountTable, method: Method) -> Bits {
    Estimator::new(method).conditional_entropy(t)
}
