use super::{bootstrap_ci, Axis, BootstrapConfig, CountTable, Estimator, Method, Statistic};
use crate::capacity::{ProfileCurve, ProfilePoint};
use crate::certify::DEFAULT_RISK_CAP;
use crate::error::{Error, Result};

/// Mixes the table index into the bootstrap seed so every λ gets its own
/// replicate streams.
fn table_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Profile estimated from count tables of a single (audience, context),
/// one point per λ. With `bootstrap`, breadth and decipherability carry
/// percentile intervals.
pub fn empirical_profile(
    tables: &[CountTable],
    method: Method,
    bootstrap: Option<&BootstrapConfig>,
) -> Result<ProfileCurve> {
    let first = tables
        .first()
        .ok_or_else(|| Error::domain("no count tables to profile"))?;
    if let Some(t) = tables
        .iter()
        .find(|t| t.audience_id() != first.audience_id() || t.context_id() != first.context_id())
    {
        return Err(Error::domain(format!(
            "tables mix channels ({}, {}) and ({}, {})",
            first.audience_id(),
            first.context_id(),
            t.audience_id(),
            t.context_id()
        )));
    }
    let mut ordered: Vec<(usize, &CountTable)> = tables.iter().enumerate().collect();
    ordered.sort_by(|a, b| a.1.lambda().total_cmp(&b.1.lambda()));
    if let Some(w) = ordered
        .windows(2)
        .find(|w| w[0].1.lambda() == w[1].1.lambda())
    {
        return Err(Error::domain(format!(
            "duplicate lambda {} in table set",
            w[0].1.lambda()
        )));
    }

    let estimator = Estimator::new(method);
    let points = ordered
        .into_iter()
        .map(|(index, t)| {
            let mut point = ProfilePoint::new(
                t.lambda(),
                estimator.entropy(t, Axis::Message),
                estimator.mutual_information(t),
                estimator.conditional_entropy(t),
                DEFAULT_RISK_CAP,
            );
            if let Some(cfg) = bootstrap {
                let cfg = BootstrapConfig {
                    seed: table_seed(cfg.seed, index),
                    ..*cfg
                };
                let s = bootstrap_ci(t, Statistic::EntropyM, method, &cfg)?;
                let d = bootstrap_ci(t, Statistic::Mi, method, &cfg)?;
                point.breadth_ci = Some([s.ci_low, s.ci_high]);
                point.decipherability_ci = Some([d.ci_low, d.ci_high]);
            }
            Ok(point)
        })
        .collect::<Result<Vec<_>>>()?;
    ProfileCurve::new(
        Some(first.audience_id().to_owned()),
        Some(first.context_id().to_owned()),
        points,
    )
}
