//! Semiotic channels: an (audience, context) pair acting as a stochastic map
//! from messages to categorical interpretations.

use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::path::Path;

use crate::error::{Error, Result};
use crate::info::{self, Bits, JointDist, ProbVector};
use crate::source::{message_distribution, Lambda, SourceFamily};

/// Row-stochastic matrix `P(Int | M)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl ChannelMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || cols == 0 {
            return Err(Error::shape("channel matrix must be at least 1x1"));
        }
        let n_rows = rows.len();
        let mut data = Vec::with_capacity(n_rows * cols);
        for (m, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(Error::shape(format!(
                    "channel row {m} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            let row = ProbVector::new(row).map_err(|e| match e {
                Error::InvalidProbability { index, value } => Error::domain(format!(
                    "channel row {m}: invalid probability {value} at column {index}"
                )),
                Error::NotNormalized { sum } => {
                    Error::domain(format!("channel row {m} sums to {sum}, not 1"))
                }
                other => other,
            })?;
            data.extend(row.into_vec());
        }
        Ok(Self {
            rows: n_rows,
            cols,
            data,
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_rows(
            (0..n)
                .map(|m| (0..n).map(|i| if i == m { 1.0 } else { 0.0 }).collect())
                .collect(),
        )
    }

    /// Every message is read through the same interpretation distribution.
    pub fn constant(messages: usize, row: &[f64]) -> Result<Self> {
        Self::from_rows(vec![row.to_vec(); messages])
    }

    pub fn messages(&self) -> usize {
        self.rows
    }

    pub fn interpretations(&self) -> usize {
        self.cols
    }

    pub fn row(&self, message: usize) -> &[f64] {
        &self.data[message * self.cols..(message + 1) * self.cols]
    }

    pub fn get(&self, message: usize, interpretation: usize) -> f64 {
        self.data[message * self.cols + interpretation]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|m| self.row(m).to_vec()).collect()
    }
}

#[derive(Deserialize, Serialize)]
struct ChannelRepr {
    audience: String,
    context: String,
    interpretations: Vec<String>,
    rows: Vec<Vec<f64>>,
}

/// A channel for one audience and context.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChannelRepr", into = "ChannelRepr")]
pub struct SemioticChannel {
    audience_id: String,
    context_id: String,
    interpretation_ids: Vec<String>,
    matrix: ChannelMatrix,
}

impl SemioticChannel {
    pub fn new(
        audience_id: impl Into<String>,
        context_id: impl Into<String>,
        interpretation_ids: Vec<String>,
        matrix: ChannelMatrix,
    ) -> Result<Self> {
        if interpretation_ids.len() != matrix.interpretations() {
            return Err(Error::shape(format!(
                "{} interpretation ids for a matrix with {} columns",
                interpretation_ids.len(),
                matrix.interpretations()
            )));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = interpretation_ids
            .iter()
            .find(|id| !seen.insert(id.as_str()))
        {
            return Err(Error::domain(format!(
                "duplicate interpretation id `{dup}`"
            )));
        }
        Ok(Self {
            audience_id: audience_id.into(),
            context_id: context_id.into(),
            interpretation_ids,
            matrix,
        })
    }

    /// Interpretations named `i0`, `i1`, ...
    pub fn with_default_ids(
        audience_id: impl Into<String>,
        context_id: impl Into<String>,
        matrix: ChannelMatrix,
    ) -> Result<Self> {
        let ids = (0..matrix.interpretations())
            .map(|i| format!("i{i}"))
            .collect();
        Self::new(audience_id, context_id, ids, matrix)
    }

    pub fn audience_id(&self) -> &str {
        &self.audience_id
    }

    pub fn context_id(&self) -> &str {
        &self.context_id
    }

    pub fn interpretation_ids(&self) -> &[String] {
        &self.interpretation_ids
    }

    pub fn matrix(&self) -> &ChannelMatrix {
        &self.matrix
    }

    /// Reorders interpretation columns and their ids together.
    pub fn permute_interpretations(&self, order: &[usize]) -> Result<Self> {
        check_permutation(order, self.matrix.interpretations())?;
        let rows = (0..self.matrix.messages())
            .map(|m| order.iter().map(|&i| self.matrix.get(m, i)).collect())
            .collect();
        Self::new(
            self.audience_id.clone(),
            self.context_id.clone(),
            order
                .iter()
                .map(|&i| self.interpretation_ids[i].clone())
                .collect(),
            ChannelMatrix::from_rows(rows)?,
        )
    }

    /// Reorders message rows; pair with [`SourceFamily::permuted`].
    pub fn permute_messages(&self, order: &[usize]) -> Result<Self> {
        check_permutation(order, self.matrix.messages())?;
        let rows = order.iter().map(|&m| self.matrix.row(m).to_vec()).collect();
        Self::new(
            self.audience_id.clone(),
            self.context_id.clone(),
            self.interpretation_ids.clone(),
            ChannelMatrix::from_rows(rows)?,
        )
    }
}

fn check_permutation(order: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if order.len() != n {
        return Err(Error::shape(format!(
            "permutation of length {} for {n} items",
            order.len()
        )));
    }
    for &k in order {
        if k >= n || std::mem::replace(&mut seen[k], true) {
            return Err(Error::domain("not a permutation"));
        }
    }
    Ok(())
}

impl TryFrom<ChannelRepr> for SemioticChannel {
    type Error = Error;

    fn try_from(r: ChannelRepr) -> Result<Self> {
        SemioticChannel::new(
            r.audience,
            r.context,
            r.interpretations,
            ChannelMatrix::from_rows(r.rows)?,
        )
    }
}

impl From<SemioticChannel> for ChannelRepr {
    fn from(c: SemioticChannel) -> Self {
        ChannelRepr {
            audience: c.audience_id,
            context: c.context_id,
            interpretations: c.interpretation_ids,
            rows: c.matrix.to_rows(),
        }
    }
}

#[derive(Deserialize, Serialize)]
struct ScenarioRepr {
    source: SourceFamily,
    channel: SemioticChannel,
}

/// A source family together with the channel it is read through.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScenarioRepr", into = "ScenarioRepr")]
pub struct Scenario {
    pub source: SourceFamily,
    pub channel: SemioticChannel,
}

impl Scenario {
    pub fn new(source: SourceFamily, channel: SemioticChannel) -> Result<Self> {
        check_dims(&source, &channel)?;
        Ok(Self { source, channel })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

impl TryFrom<ScenarioRepr> for Scenario {
    type Error = Error;

    fn try_from(r: ScenarioRepr) -> Result<Self> {
        Scenario::new(r.source, r.channel)
    }
}

impl From<Scenario> for ScenarioRepr {
    fn from(s: Scenario) -> Self {
        ScenarioRepr {
            source: s.source,
            channel: s.channel,
        }
    }
}

fn check_dims(family: &SourceFamily, channel: &SemioticChannel) -> Result<()> {
    if family.len() != channel.matrix.messages() {
        return Err(Error::shape(format!(
            "source has {} messages but channel has {} rows",
            family.len(),
            channel.matrix.messages()
        )));
    }
    Ok(())
}

/// `p(m, i) = source(m) · P(i | m)`.
pub fn joint_distribution(source: &ProbVector, channel: &SemioticChannel) -> Result<JointDist> {
    let matrix = &channel.matrix;
    if source.alphabet_size() != matrix.messages() {
        return Err(Error::shape(format!(
            "source has {} symbols but channel has {} rows",
            source.alphabet_size(),
            matrix.messages()
        )));
    }
    let probs = source
        .as_slice()
        .iter()
        .enumerate()
        .flat_map(|(m, &pm)| matrix.row(m).iter().map(move |&w| pm * w))
        .collect();
    Ok(JointDist::from_parts_unchecked(
        matrix.messages(),
        matrix.interpretations(),
        probs,
    ))
}

/// Breadth, decipherability and residual ambiguity at one λ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Measures {
    pub breadth: Bits,
    pub decipherability: Bits,
    pub residual_ambiguity: Bits,
}

/// Evaluates all three measures from a single joint construction.
pub fn measures(
    family: &SourceFamily,
    lambda: Lambda,
    channel: &SemioticChannel,
) -> Result<Measures> {
    check_dims(family, channel)?;
    let source = message_distribution(family, lambda);
    let joint = joint_distribution(&source, channel)?;
    Ok(Measures {
        breadth: info::entropy(&source),
        decipherability: info::mutual_information(&joint),
        residual_ambiguity: info::conditional_entropy(&joint),
    })
}

/// `D(λ) = I(M; Int)` under `P_λ(M)`.
pub fn decipherability(
    family: &SourceFamily,
    lambda: Lambda,
    channel: &SemioticChannel,
) -> Result<Bits> {
    Ok(measures(family, lambda, channel)?.decipherability)
}

/// `H(Int | M)` under `P_λ(M)`.
pub fn residual_ambiguity(
    family: &SourceFamily,
    lambda: Lambda,
    channel: &SemioticChannel,
) -> Result<Bits> {
    Ok(measures(family, lambda, channel)?.residual_ambiguity)
}
