//! Synthetic reference scenarios with known analytic behaviour.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use std::fmt;
use std::str::FromStr;

use crate::channel::{ChannelMatrix, Scenario, SemioticChannel};
use crate::error::{Error, Result};
use crate::source::SourceFamily;

/// Seed used for every named builtin scenario.
pub const BUILTIN_SEED: u64 = 7;

/// Shipped tiered-confusability shape: 4 clear messages, 12 noisy ones.
pub const TIERED_DEFAULT: ScenarioKind = ScenarioKind::Tiered {
    n_clear: 4,
    n_noisy: 12,
};

/// Relative jitter applied to noisy rows of the tiered scenario.
const TIERED_JITTER: f64 = 0.1;

/// Names accepted after `builtin:`.
pub const BUILTIN_NAMES: [&str; 5] = [
    "identity4",
    "constant4",
    "bsc011",
    "bsc025",
    "tiered_default",
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScenarioKind {
    /// Noiseless channel; scores `0, -1, -2, ...`.
    Identity { size: usize },
    /// Every message read through the uniform interpretation distribution.
    Constant { size: usize },
    /// Binary symmetric channel with crossover `p`; scores `(0, -1)`.
    Bsc { p: f64 },
    /// Random scores in `[-4, 0]` and Dirichlet(1) channel rows.
    Random {
        messages: usize,
        interpretations: usize,
    },
    /// High-score "clear" messages each mapping to their own interpretation,
    /// followed by low-score "noisy" messages read near-uniformly.
    Tiered { n_clear: usize, n_noisy: usize },
}

impl ScenarioKind {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            ScenarioKind::Identity { size } | ScenarioKind::Constant { size } => size >= 1,
            ScenarioKind::Bsc { p } => (0.0..=1.0).contains(&p),
            ScenarioKind::Random {
                messages,
                interpretations,
            } => messages >= 1 && interpretations >= 1,
            ScenarioKind::Tiered { n_clear, n_noisy } => n_clear >= 1 && n_noisy >= 1,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "invalid scenario parameters: {self}"
            )))
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ScenarioKind::Identity { size } => write!(f, "identity({size})"),
            ScenarioKind::Constant { size } => write!(f, "constant({size})"),
            ScenarioKind::Bsc { p } => write!(f, "bsc({p})"),
            ScenarioKind::Random {
                messages,
                interpretations,
            } => {
                write!(f, "random({messages},{interpretations})")
            }
            ScenarioKind::Tiered { n_clear, n_noisy } => write!(f, "tiered({n_clear},{n_noisy})"),
        }
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    /// Accepts the builtin short names as well as `identity(n)`, `constant(n)`,
    /// `bsc(p)`, `random(k)`, `random(m,i)` and `tiered(clear,noisy)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let kind = match s {
            "identity4" => ScenarioKind::Identity { size: 4 },
            "constant4" => ScenarioKind::Constant { size: 4 },
            "bsc011" => ScenarioKind::Bsc { p: 0.11 },
            "bsc025" => ScenarioKind::Bsc { p: 0.25 },
            "tiered_default" => TIERED_DEFAULT,
            _ => {
                let unknown = || Error::domain(format!("unknown scenario `{s}`"));
                let (name, rest) = s.split_once('(').ok_or_else(unknown)?;
                let args: Vec<&str> = rest
                    .strip_suffix(')')
                    .ok_or_else(unknown)?
                    .split(',')
                    .map(str::trim)
                    .collect();
                let size = |k: usize| -> Result<usize> {
                    args[k]
                        .parse()
                        .map_err(|_| Error::domain(format!("bad size `{}` in `{s}`", args[k])))
                };
                match (name, args.len()) {
                    ("identity", 1) => ScenarioKind::Identity { size: size(0)? },
                    ("constant", 1) => ScenarioKind::Constant { size: size(0)? },
                    ("bsc", 1) => ScenarioKind::Bsc {
                        p: args[0]
                            .parse()
                            .map_err(|_| Error::domain(format!("bad probability in `{s}`")))?,
                    },
                    ("random", 1) => ScenarioKind::Random {
                        messages: size(0)?,
                        interpretations: size(0)?,
                    },
                    ("random", 2) => ScenarioKind::Random {
                        messages: size(0)?,
                        interpretations: size(1)?,
                    },
                    ("tiered", 2) => ScenarioKind::Tiered {
                        n_clear: size(0)?,
                        n_noisy: size(1)?,
                    },
                    _ => return Err(unknown()),
                }
            }
        };
        kind.validate()?;
        Ok(kind)
    }
}

fn descending_scores(n: usize) -> Vec<f64> {
    (0..n).map(|m| -(m as f64)).collect()
}

/// Builds the scenario for `kind`; deterministic in `seed` (only the random
/// and tiered kinds consume randomness).
pub fn reference_scenario(kind: ScenarioKind, seed: u64) -> Result<Scenario> {
    kind.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (scores, matrix) = match kind {
        ScenarioKind::Identity { size } => {
            (descending_scores(size), ChannelMatrix::identity(size)?)
        }
        ScenarioKind::Constant { size } => (
            descending_scores(size),
            ChannelMatrix::constant(size, &vec![1.0 / size as f64; size])?,
        ),
        ScenarioKind::Bsc { p } => (
            descending_scores(2),
            ChannelMatrix::from_rows(vec![vec![1.0 - p, p], vec![p, 1.0 - p]])?,
        ),
        ScenarioKind::Random {
            messages,
            interpretations,
        } => {
            let scores = (0..messages).map(|_| -4.0 * rng.random::<f64>()).collect();
            let rows = (0..messages)
                .map(|_| {
                    normalized(
                        (0..interpretations)
                            .map(|_| rng.sample::<f64, _>(Exp1))
                            .collect(),
                    )
                })
                .collect();
            (scores, ChannelMatrix::from_rows(rows)?)
        }
        ScenarioKind::Tiered { n_clear, n_noisy } => {
            let mut rows = Vec::with_capacity(n_clear + n_noisy);
            for m in 0..n_clear {
                let mut row = vec![0.0; n_clear];
                row[m] = 1.0;
                rows.push(row);
            }
            for _ in 0..n_noisy {
                rows.push(normalized(
                    (0..n_clear)
                        .map(|_| 1.0 + TIERED_JITTER * (2.0 * rng.random::<f64>() - 1.0))
                        .collect(),
                ));
            }
            (
                descending_scores(n_clear + n_noisy),
                ChannelMatrix::from_rows(rows)?,
            )
        }
    };
    let channel = SemioticChannel::with_default_ids("reference", kind.to_string(), matrix)?;
    Scenario::new(SourceFamily::from_scores(scores)?, channel)
}

/// Resolves a builtin name (see [`ScenarioKind::from_str`]) with [`BUILTIN_SEED`].
pub fn builtin(name: &str) -> Result<Scenario> {
    reference_scenario(name.parse()?, BUILTIN_SEED)
}

fn normalized(mut v: Vec<f64>) -> Vec<f64> {
    let total: f64 = v.iter().sum();
    if total > 0.0 {
        v.iter_mut().for_each(|x| *x /= total);
    } else {
        let n = v.len() as f64;
        v.iter_mut().for_each(|x| *x = 1.0 / n);
    }
    v
}
