use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};
use std::str::FromStr;

use super::{Axis, CountTable, Estimator, Method};
use crate::error::{Error, Result};
use crate::info::Bits;

pub const MIN_REPLICATES: usize = 100;

/// Quantity a bootstrap interval is built for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    EntropyM,
    EntropyInt,
    Mi,
    CondEntropy,
}

impl Statistic {
    pub fn evaluate(self, estimator: &Estimator, t: &CountTable) -> Bits {
        match self {
            Statistic::EntropyM => estimator.entropy(t, Axis::Message),
            Statistic::EntropyInt => estimator.entropy(t, Axis::Interpretation),
            Statistic::Mi => estimator.mutual_information(t),
            Statistic::CondEntropy => estimator.conditional_entropy(t),
        }
    }
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "entropy_m" => Ok(Statistic::EntropyM),
            "entropy_int" => Ok(Statistic::EntropyInt),
            "mi" => Ok(Statistic::Mi),
            "cond_entropy" => Ok(Statistic::CondEntropy),
            other => Err(Error::domain(format!("unknown statistic `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub replicates: usize,
    pub level: f64,
    pub seed: u64,
}

impl BootstrapConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replicates < MIN_REPLICATES {
            return Err(Error::domain(format!(
                "bootstrap needs at least {MIN_REPLICATES} replicates, got {}",
                self.replicates
            )));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(Error::domain(format!(
                "confidence level must be in (0, 1), got {}",
                self.level
            )));
        }
        Ok(())
    }
}

/// Point estimate with a percentile bootstrap interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithCI {
    pub point: Bits,
    pub ci_low: Bits,
    pub ci_high: Bits,
    pub method: Method,
    pub n_bootstrap: usize,
    pub level: f64,
}

/// Draws a multinomial count vector with `n` trials over `counts / Σ counts`
/// by sequential conditional binomials.
fn resample(counts: &[u64], n: u64, rng: &mut ChaCha8Rng) -> Vec<u64> {
    let mut remaining_n = n;
    let mut remaining_mass = n;
    counts
        .iter()
        .map(|&c| {
            if remaining_n == 0 || c == 0 {
                return 0;
            }
            let draw = if c >= remaining_mass {
                remaining_n
            } else {
                let p = c as f64 / remaining_mass as f64;
                Binomial::new(remaining_n, p)
                    .expect("p in [0, 1]")
                    .sample(rng)
            };
            remaining_mass -= c;
            remaining_n -= draw;
            draw
        })
        .collect()
}

/// Linear interpolation between order statistics.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Percentile bootstrap over multinomial resamples of the table.
///
/// Replicate `b` uses ChaCha8 seeded from `cfg.seed` on stream `b`, so the
/// replicates are independent of evaluation order. The interval is widened
/// to contain the point estimate when the percentiles miss it.
pub fn bootstrap_ci(
    t: &CountTable,
    statistic: Statistic,
    method: Method,
    cfg: &BootstrapConfig,
) -> Result<EstimateWithCI> {
    cfg.validate()?;
    let estimator = Estimator::new(method);
    let point = statistic.evaluate(&estimator, t);
    let mut replicates: Vec<f64> = (0..cfg.replicates)
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(b as u64);
            let counts = resample(t.counts(), t.total(), &mut rng);
            let table = t.with_counts(counts).expect("resample keeps the total");
            statistic.evaluate(&estimator, &table).get()
        })
        .collect();
    replicates.sort_by(f64::total_cmp);
    let alpha = 1.0 - cfg.level;
    let low = quantile(&replicates, alpha / 2.0).min(point.get());
    let high = quantile(&replicates, 1.0 - alpha / 2.0).max(point.get());
    Ok(EstimateWithCI {
        point,
        ci_low: Bits::snap(low),
        ci_high: Bits::snap(high),
        method,
        n_bootstrap: cfg.replicates,
        level: cfg.level,
    })
}
