//! Interpretive risk and threshold-based certification of a profile.
//!
//! Archetype thresholds are repository conventions on the log-λ axis of the
//! profile grid:
//!
//! * technician: `λ_opt` in the lowest third, and the run of grid points
//!   around the optimum with `D >= 0.9 C` covers at least half the grid;
//! * poet: `λ_opt` in the highest third, and `D` drops below `0.5 C` within
//!   a third of the log-λ range past `λ_opt`;
//! * tightrope walker: neither of the above, on a unimodal profile;
//! * unclassified: everything else, including zero capacity.

use serde::{Deserialize, Serialize};

use crate::capacity::{CapacityResult, ProfileCurve};
use crate::error::{Error, Result};
use crate::info::{Bits, ZERO_SNAP};

pub const DEFAULT_RISK_CAP: f64 = 1e6;

/// Decipherability below this is treated as zero by [`risk_score`].
pub const RISK_EPSILON: f64 = 1e-12;

const TECHNICIAN_PLATEAU: f64 = 0.9;
const POET_DROP: f64 = 0.5;

/// `S / D`, or `cap` when `D` is (numerically) zero.
pub fn risk_score(breadth: Bits, decipherability: Bits, cap: f64) -> f64 {
    if decipherability.get() > RISK_EPSILON {
        breadth.get() / decipherability.get()
    } else {
        cap
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    RawBits,
    /// `D / log2 |Int|`, in `[0, 1]`.
    #[default]
    Normalized,
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificationPolicy {
    #[serde(default)]
    pub metric: Metric,
    pub d_min: f64,
    #[serde(default)]
    pub s_min: Option<f64>,
    #[serde(default)]
    pub s_max: Option<f64>,
    #[serde(default = "default_true")]
    pub require_unimodal: bool,
}

impl CertificationPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.d_min.is_finite() && self.d_min >= 0.0) {
            return Err(Error::domain(format!(
                "d_min must be >= 0, got {}",
                self.d_min
            )));
        }
        if let (Some(lo), Some(hi)) = (self.s_min, self.s_max) {
            if lo > hi {
                return Err(Error::domain(format!("s_min {lo} exceeds s_max {hi}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Archetype {
    Poet,
    Technician,
    TightropeWalker,
    Unclassified,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub pass: bool,
    pub capacity: CapacityResult,
    pub archetype: Archetype,
    /// One `clause: detail` entry per failed clause.
    pub reasons: Vec<String>,
    pub metric: Metric,
    /// Decipherability at `λ_opt` in the policy's metric.
    pub decipherability_metric: f64,
    pub breadth_at_opt_bits: Bits,
}

fn breadth_at_opt(curve: &ProfileCurve, capacity: &CapacityResult) -> Bits {
    capacity.breadth_bits.unwrap_or_else(|| {
        let target = capacity.lambda_opt.ln();
        curve
            .points()
            .iter()
            .min_by(|a, b| {
                (a.lambda.ln() - target)
                    .abs()
                    .total_cmp(&(b.lambda.ln() - target).abs())
            })
            .expect("curves are nonempty")
            .breadth_bits
    })
}

/// Classifies the profile shape; see the module docs for the rules.
pub fn classify(curve: &ProfileCurve, capacity: &CapacityResult) -> Archetype {
    let points = curve.points();
    let c = capacity.capacity_bits.get();
    let (lo, hi) = (points[0].lambda, points[points.len() - 1].lambda);
    if c <= ZERO_SNAP || points.len() < 2 || hi <= lo {
        return Archetype::Unclassified;
    }
    let span = (hi / lo).ln();
    let position = ((capacity.lambda_opt / lo).ln() / span).clamp(0.0, 1.0);

    let nearest = points
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| {
            (a.lambda / capacity.lambda_opt)
                .ln()
                .abs()
                .total_cmp(&(b.lambda / capacity.lambda_opt).ln().abs())
        })
        .map(|(k, _)| k)
        .expect("curves are nonempty");
    let high = |k: usize| points[k].decipherability_bits.get() >= TECHNICIAN_PLATEAU * c;
    let plateau = if high(nearest) {
        let left = (0..nearest).rev().take_while(|&k| high(k)).count();
        let right = (nearest + 1..points.len()).take_while(|&k| high(k)).count();
        left + right + 1
    } else {
        0
    };
    if position <= 1.0 / 3.0 && 2 * plateau >= points.len() {
        return Archetype::Technician;
    }

    let drops = points.iter().any(|p| {
        p.lambda > capacity.lambda_opt
            && (p.lambda / capacity.lambda_opt).ln() <= span / 3.0
            && p.decipherability_bits.get() < POET_DROP * c
    });
    if position >= 2.0 / 3.0 && drops {
        return Archetype::Poet;
    }

    if curve.unimodal() {
        Archetype::TightropeWalker
    } else {
        Archetype::Unclassified
    }
}

/// Checks `policy` against one channel's profile and capacity.
///
/// Policy failure is reported through `pass` and `reasons`; only malformed
/// inputs produce an error.
pub fn certify(
    curve: &ProfileCurve,
    capacity: &CapacityResult,
    policy: &CertificationPolicy,
    interp_alphabet: usize,
) -> Result<CertificationReport> {
    policy.validate()?;
    let mismatch =
        |a: &Option<String>, b: &Option<String>| matches!((a, b), (Some(x), Some(y)) if x != y);
    if mismatch(&curve.audience_id, &capacity.audience_id)
        || mismatch(&curve.context_id, &capacity.context_id)
    {
        return Err(Error::domain(format!(
            "curve channel ({:?}, {:?}) differs from capacity channel ({:?}, {:?})",
            curve.audience_id, curve.context_id, capacity.audience_id, capacity.context_id
        )));
    }

    let c = capacity.capacity_bits.get();
    let value = match policy.metric {
        Metric::RawBits => c,
        Metric::Normalized => {
            if interp_alphabet < 2 {
                return Err(Error::domain(
                    "normalized metric needs at least 2 interpretations",
                ));
            }
            c / (interp_alphabet as f64).log2()
        }
    };
    let breadth = breadth_at_opt(curve, capacity);

    let mut reasons = Vec::new();
    if value < policy.d_min {
        reasons.push(format!(
            "d_min: decipherability {value} at lambda_opt {} is below the minimum {}",
            capacity.lambda_opt, policy.d_min
        ));
    }
    if let Some(s_min) = policy.s_min {
        if breadth.get() < s_min {
            reasons.push(format!(
                "s_min: breadth {} bits at lambda_opt is below {s_min}",
                breadth.get()
            ));
        }
    }
    if let Some(s_max) = policy.s_max {
        if breadth.get() > s_max {
            reasons.push(format!(
                "s_max: breadth {} bits at lambda_opt exceeds {s_max}",
                breadth.get()
            ));
        }
    }
    if policy.require_unimodal && !(curve.unimodal() && capacity.unimodal) {
        reasons.push(format!(
            "unimodal: decipherability profile has {} local maxima",
            curve.local_maxima_count()
        ));
    }

    Ok(CertificationReport {
        pass: reasons.is_empty(),
        capacity: capacity.clone(),
        archetype: classify(curve, capacity),
        reasons,
        metric: policy.metric,
        decipherability_metric: value,
        breadth_at_opt_bits: breadth,
    })
}
