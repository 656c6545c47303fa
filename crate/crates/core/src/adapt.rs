//! Closed-loop λ adjustment from sampled interaction batches.

use serde::{Deserialize, Serialize};
use std::io::Write;

use crate::error::{Error, Result};
use crate::estimation::{tabulate, Axis, CountTable, Estimator, Method};
use crate::sampling::{InteractionRecord, ScenarioSampler};
use crate::source::Lambda;

/// Minimum expected count per (message, interpretation) cell; batches
/// smaller than `MIN_EXPECTED_PER_CELL · |M| · |Int|` are rejected.
pub const MIN_EXPECTED_PER_CELL: usize = 5;

/// The controller stops once its relative step falls below this.
pub const MIN_STEP: f64 = 1e-3;

/// Produces a fresh batch of interactions at a given λ, already tabulated.
pub trait BatchSampler {
    /// (messages, interpretations) the sampler can emit.
    fn alphabet_sizes(&self) -> (usize, usize);

    fn sample_batch(&mut self, lambda: Lambda, n: usize) -> Result<CountTable>;
}

impl BatchSampler for ScenarioSampler {
    fn alphabet_sizes(&self) -> (usize, usize) {
        let m = self.channel().matrix();
        (m.messages(), m.interpretations())
    }

    fn sample_batch(&mut self, lambda: Lambda, n: usize) -> Result<CountTable> {
        self.sample_table(lambda, n)
    }
}

/// Adapts a record-producing closure (for example, a live logging pipeline)
/// into a [`BatchSampler`]. Each batch must form a single (audience, context, λ) group.
pub struct RecordSampler<F> {
    sizes: (usize, usize),
    produce: F,
}

impl<F> RecordSampler<F>
where
    F: FnMut(Lambda, usize) -> Result<Vec<InteractionRecord>>,
{
    pub fn new(messages: usize, interpretations: usize, produce: F) -> Self {
        Self {
            sizes: (messages, interpretations),
            produce,
        }
    }
}

impl<F> BatchSampler for RecordSampler<F>
where
    F: FnMut(Lambda, usize) -> Result<Vec<InteractionRecord>>,
{
    fn alphabet_sizes(&self) -> (usize, usize) {
        self.sizes
    }

    fn sample_batch(&mut self, lambda: Lambda, n: usize) -> Result<CountTable> {
        let records = (self.produce)(lambda, n)?;
        let mut tables = tabulate(&records)?;
        match tables.len() {
            1 => Ok(tables.remove(0)),
            0 => Err(Error::Sampler("sampler returned no records".into())),
            k => Err(Error::Sampler(format!(
                "sampler returned {k} groups in one batch"
            ))),
        }
    }
}

fn default_lambda_init() -> f64 {
    1.0
}
fn default_step_init() -> f64 {
    0.5
}
fn default_batch_size() -> usize {
    20_000
}
fn default_shrink() -> f64 {
    0.5
}
fn default_max_rounds() -> usize {
    60
}
fn default_penalty() -> f64 {
    1.0
}
fn default_lambda_min() -> f64 {
    crate::capacity::DEFAULT_BOUNDS.0
}
fn default_lambda_max() -> f64 {
    crate::capacity::DEFAULT_BOUNDS.1
}

/// Controller settings; every field has a default so `{}` is a valid config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaptConfig {
    #[serde(default = "default_lambda_init")]
    pub lambda_init: f64,
    #[serde(default = "default_step_init")]
    pub step_init: f64,
    #[serde(default = "default_batch_size")]
    pub batch_size: usize,
    #[serde(default = "default_shrink")]
    pub shrink_factor: f64,
    #[serde(default = "default_max_rounds")]
    pub max_rounds: usize,
    /// Penalize estimated breadth above `breadth_cap`.
    #[serde(default)]
    pub safe_mode: bool,
    #[serde(default)]
    pub breadth_cap: Option<f64>,
    #[serde(default = "default_penalty")]
    pub penalty: f64,
    #[serde(default = "default_lambda_min")]
    pub lambda_min: f64,
    #[serde(default = "default_lambda_max")]
    pub lambda_max: f64,
    #[serde(default = "default_method")]
    pub method: Method,
}

fn default_method() -> Method {
    Method::Plugin
}

impl Default for AdaptConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

impl AdaptConfig {
    fn validate(&self, sizes: (usize, usize)) -> Result<()> {
        let (lo, hi) = (self.lambda_min, self.lambda_max);
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi) {
            return Err(Error::domain(format!(
                "need 0 < lambda_min <= lambda_max, got [{lo}, {hi}]"
            )));
        }
        if !(self.lambda_init >= lo && self.lambda_init <= hi) {
            return Err(Error::domain(format!(
                "lambda_init {} outside [{lo}, {hi}]",
                self.lambda_init
            )));
        }
        if !(self.step_init.is_finite() && self.step_init > 0.0) {
            return Err(Error::domain("step_init must be positive"));
        }
        if !(self.shrink_factor > 0.0 && self.shrink_factor < 1.0) {
            return Err(Error::domain("shrink_factor must lie in (0, 1)"));
        }
        if self.max_rounds == 0 {
            return Err(Error::domain("max_rounds must be at least 1"));
        }
        let min_batch = MIN_EXPECTED_PER_CELL * sizes.0 * sizes.1;
        if self.batch_size < min_batch {
            return Err(Error::domain(format!(
                "batch_size {} below the minimum {min_batch} for a {}x{} alphabet",
                self.batch_size, sizes.0, sizes.1
            )));
        }
        if self.safe_mode && self.breadth_cap.is_none() {
            return Err(Error::domain("safe_mode needs breadth_cap"));
        }
        if !(self.penalty.is_finite() && self.penalty >= 0.0) {
            return Err(Error::domain("penalty must be >= 0"));
        }
        Ok(())
    }
}

/// State after one controller round.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaptStep {
    pub round: usize,
    pub lambda: f64,
    pub decipherability_bits: f64,
    pub breadth_bits: f64,
    pub objective: f64,
    pub step: f64,
}

struct Evaluation {
    decipherability: f64,
    breadth: f64,
    objective: f64,
}

/// Derivative-free hill climb on the estimated decipherability.
///
/// Each round samples fresh batches at `λ / (1 + step)`, `λ` and
/// `λ · (1 + step)` (clamped to the configured range), moves to the best
/// candidate, and multiplies `step` by `shrink_factor` when the centre wins.
/// In safe mode the objective is `D̂ - penalty · max(0, Ŝ - breadth_cap)`.
/// Runs for `max_rounds` or until `step < MIN_STEP`.
pub fn adapt_lambda<S: BatchSampler + ?Sized>(
    sampler: &mut S,
    cfg: &AdaptConfig,
) -> Result<Vec<AdaptStep>> {
    cfg.validate(sampler.alphabet_sizes())?;
    let estimator = Estimator::new(cfg.method);
    let clamp = |l: f64| l.clamp(cfg.lambda_min, cfg.lambda_max);

    let mut evaluate = |lambda: f64| -> Result<Evaluation> {
        let table =
            sampler.sample_batch(Lambda::with_max(lambda, cfg.lambda_max)?, cfg.batch_size)?;
        let observed = table.message_counts().iter().filter(|&&c| c > 0).count();
        let decipherability = if observed <= 1 {
            0.0
        } else {
            estimator.mutual_information(&table).get()
        };
        let breadth = estimator.entropy(&table, Axis::Message).get();
        let excess = match (cfg.safe_mode, cfg.breadth_cap) {
            (true, Some(cap)) => (breadth - cap).max(0.0),
            _ => 0.0,
        };
        Ok(Evaluation {
            decipherability,
            breadth,
            objective: decipherability - cfg.penalty * excess,
        })
    };

    let mut lambda = cfg.lambda_init;
    let mut step = cfg.step_init;
    let mut trace = Vec::new();
    for round in 1..=cfg.max_rounds {
        let down = clamp(lambda / (1.0 + step));
        let up = clamp(lambda * (1.0 + step));
        let centre = evaluate(lambda)?;
        let mut best = (lambda, centre);
        for candidate in [down, up] {
            if candidate == lambda {
                continue;
            }
            let e = evaluate(candidate)?;
            if e.objective > best.1.objective {
                best = (candidate, e);
            }
        }
        if best.0 == lambda {
            step *= cfg.shrink_factor;
        } else {
            lambda = best.0;
        }
        trace.push(AdaptStep {
            round,
            lambda,
            decipherability_bits: best.1.decipherability,
            breadth_bits: best.1.breadth,
            objective: best.1.objective,
            step,
        });
        if step < MIN_STEP {
            break;
        }
    }
    Ok(trace)
}

/// Writes the trace as CSV (one row per round).
pub fn write_trace_csv<W: Write>(trace: &[AdaptStep], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for step in trace {
        w.serialize(step)?;
    }
    w.flush()?;
    Ok(())
}
