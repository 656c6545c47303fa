//! Exact information measures over finite discrete distributions.
//!
//! Everything is in bits. `0 · log 0` is taken as 0.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// Absolute tolerance on the total mass of a distribution.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// Magnitude below which a computed information value is treated as zero.
pub const ZERO_SNAP: f64 = 1e-12;

/// Tolerance used when inverting the Fano inequality.
pub const FANO_TOLERANCE: f64 = 1e-10;

/// An information quantity measured in bits.
#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Bits(f64);

impl Bits {
    pub const ZERO: Bits = Bits(0.0);

    /// Wraps a value, rejecting anything negative beyond rounding noise.
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || value < -ZERO_SNAP {
            return Err(Error::domain(format!(
                "bits must be nonnegative, got {value}"
            )));
        }
        Ok(Self::snap(value))
    }

    /// For values produced by our own arithmetic: rounding residue around
    /// zero is flushed to exactly zero.
    pub(crate) fn snap(value: f64) -> Self {
        debug_assert!(
            value >= -1e-9,
            "computed information value {value} is negative"
        );
        if value.abs() < ZERO_SNAP {
            Bits(0.0)
        } else {
            Bits(value.max(0.0))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl From<Bits> for f64 {
    fn from(b: Bits) -> f64 {
        b.0
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} bits", self.0)
    }
}

fn validate_mass(values: &[f64]) -> Result<f64> {
    let mut sum = 0.0;
    for (index, &value) in values.iter().enumerate() {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::InvalidProbability { index, value });
        }
        sum += value;
    }
    if (sum - 1.0).abs() > SUM_TOLERANCE {
        return Err(Error::NotNormalized { sum });
    }
    Ok(sum)
}

/// A probability distribution over a finite alphabet.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ProbVector {
    probs: Vec<f64>,
}

impl ProbVector {
    /// Validates `probs` and renormalizes it exactly when the sum is within
    /// [`SUM_TOLERANCE`] of one.
    pub fn new(mut probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::domain("distribution needs at least one symbol"));
        }
        let sum = validate_mass(&probs)?;
        if sum != 1.0 {
            probs.iter_mut().for_each(|p| *p /= sum);
        }
        Ok(Self { probs })
    }

    /// Normalizes a vector of nonnegative weights with a positive total.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        if let Some((index, &value)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !w.is_finite() || **w < 0.0)
        {
            return Err(Error::InvalidProbability { index, value });
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::domain("weights must have positive total"));
        }
        Self::new(weights.into_iter().map(|w| w / total).collect())
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("distribution needs at least one symbol"));
        }
        Ok(Self {
            probs: vec![1.0 / n as f64; n],
        })
    }

    pub fn point_mass(n: usize, at: usize) -> Result<Self> {
        if at >= n {
            return Err(Error::domain(format!(
                "index {at} outside alphabet of size {n}"
            )));
        }
        let mut probs = vec![0.0; n];
        probs[at] = 1.0;
        Ok(Self { probs })
    }

    pub fn alphabet_size(&self) -> usize {
        self.probs.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.probs
    }
}

impl<'de> Deserialize<'de> for ProbVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let probs = Vec::<f64>::deserialize(d)?;
        ProbVector::new(probs).map_err(serde::de::Error::custom)
    }
}

/// Joint law of (message, interpretation), stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDist {
    rows: usize,
    cols: usize,
    probs: Vec<f64>,
}

impl JointDist {
    pub fn new(rows: usize, cols: usize, mut probs: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::shape("joint distribution must be at least 1x1"));
        }
        if probs.len() != rows * cols {
            return Err(Error::shape(format!(
                "expected {} entries for a {rows}x{cols} joint, got {}",
                rows * cols,
                probs.len()
            )));
        }
        let sum = validate_mass(&probs)?;
        if sum != 1.0 {
            probs.iter_mut().for_each(|p| *p /= sum);
        }
        Ok(Self { rows, cols, probs })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::shape("ragged joint distribution rows"));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    /// Builds a joint without revalidating; callers guarantee the invariants.
    pub(crate) fn from_parts_unchecked(rows: usize, cols: usize, probs: Vec<f64>) -> Self {
        Self { rows, cols, probs }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, message: usize, interpretation: usize) -> f64 {
        self.probs[message * self.cols + interpretation]
    }

    pub fn row(&self, message: usize) -> &[f64] {
        &self.probs[message * self.cols..(message + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }

    pub fn row_marginal(&self) -> Vec<f64> {
        (0..self.rows).map(|m| self.row(m).iter().sum()).collect()
    }

    pub fn column_marginal(&self) -> Vec<f64> {
        let mut marginal = vec![0.0; self.cols];
        for m in 0..self.rows {
            for (acc, p) in marginal.iter_mut().zip(self.row(m)) {
                *acc += p;
            }
        }
        marginal
    }

    pub fn transpose(&self) -> Self {
        let mut probs = Vec::with_capacity(self.probs.len());
        for i in 0..self.cols {
            for m in 0..self.rows {
                probs.push(self.get(m, i));
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            probs,
        }
    }
}

/// `-Σ p log2 p` over raw (already validated) probabilities.
pub(crate) fn entropy_raw(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

/// Shannon entropy of `p`; lies in `[0, log2 |alphabet|]`.
pub fn entropy(p: &ProbVector) -> Bits {
    Bits::snap(entropy_raw(p.as_slice()))
}

/// `h(p) = -p log2 p - (1-p) log2 (1-p)`.
pub fn binary_entropy(p: f64) -> Result<Bits> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!(
            "binary entropy needs p in [0, 1], got {p}"
        )));
    }
    Ok(Bits::snap(binary_entropy_raw(p)))
}

fn binary_entropy_raw(p: f64) -> f64 {
    entropy_raw(&[p, 1.0 - p])
}

pub(crate) fn conditional_entropy_raw(j: &JointDist) -> f64 {
    let mut total = 0.0;
    for m in 0..j.rows {
        let row = j.row(m);
        let pm: f64 = row.iter().sum();
        if pm <= 0.0 {
            continue;
        }
        for &p in row.iter().filter(|&&p| p > 0.0) {
            total -= p * (p / pm).log2();
        }
    }
    total
}

/// `H(Int | M) = Σ_m p(m) H(Int | M = m)`.
pub fn conditional_entropy(j: &JointDist) -> Bits {
    Bits::snap(conditional_entropy_raw(j))
}

/// `I(M; Int) = H(Int) - H(Int | M)`.
pub fn mutual_information(j: &JointDist) -> Bits {
    let h_int = entropy_raw(&j.column_marginal());
    let residual = conditional_entropy_raw(j);
    Bits::snap((h_int - residual).max(0.0))
}

/// Smallest error probability compatible with a residual ambiguity of
/// `residual` bits over `k` interpretations, i.e. the least `P_e` with
/// `h(P_e) + P_e log2(k - 1) >= residual`.
///
/// The left-hand side increases on `[0, 1 - 1/k]`, so bisection applies.
pub fn fano_error_lower_bound(residual: Bits, k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::domain(format!(
            "interpretation alphabet must have at least 2 symbols, got {k}"
        )));
    }
    let target = residual.get();
    let max_residual = (k as f64).log2();
    if target > max_residual + ZERO_SNAP {
        return Err(Error::Infeasible(format!(
            "residual ambiguity {target} exceeds log2({k}) = {max_residual}"
        )));
    }
    if target <= 0.0 {
        return Ok(0.0);
    }

    let log_rest = ((k - 1) as f64).log2();
    let lhs = |x: f64| binary_entropy_raw(x) + x * log_rest;
    let upper = 1.0 - 1.0 / k as f64;
    if lhs(upper) <= target {
        return Ok(upper);
    }

    let (mut lo, mut hi) = (0.0, upper);
    while hi - lo > FANO_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if lhs(mid) >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
