//! Seeded interaction sampling.
//!
//! The generator is ChaCha8 seeded through `SeedableRng::seed_from_u64`.
//! Each record draws its message from `P_λ(M)` first and then its
//! interpretation from that message's channel row, both by
//! `rand::distr::weighted::WeightedIndex`. Output is therefore bit-for-bit
//! reproducible for a given seed and crate version.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::io::Write;

use crate::channel::SemioticChannel;
use crate::error::{Error, Result};
use crate::estimation::CountTable;
use crate::source::{message_distribution, Lambda, SourceFamily};

/// One observed (message, interpretation) pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteractionRecord {
    pub audience_id: String,
    pub context_id: String,
    pub lambda: f64,
    pub message_id: String,
    pub interpretation_id: String,
}

/// Index-level sampler for one (family, λ, channel) triple.
pub struct PairSampler {
    messages: WeightedIndex<f64>,
    rows: Vec<WeightedIndex<f64>>,
}

impl PairSampler {
    pub fn new(family: &SourceFamily, lambda: Lambda, channel: &SemioticChannel) -> Result<Self> {
        let matrix = channel.matrix();
        if family.len() != matrix.messages() {
            return Err(Error::shape(format!(
                "source has {} messages but channel has {} rows",
                family.len(),
                matrix.messages()
            )));
        }
        let weighted = |w: &[f64]| {
            WeightedIndex::new(w.iter().copied())
                .map_err(|e| Error::domain(format!("sampling weights: {e}")))
        };
        let source = message_distribution(family, lambda);
        Ok(Self {
            messages: weighted(source.as_slice())?,
            rows: (0..matrix.messages())
                .map(|m| weighted(matrix.row(m)))
                .collect::<Result<_>>()?,
        })
    }

    /// Draws a message index, then an interpretation index from its row.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, usize) {
        let m = self.messages.sample(rng);
        let i = self.rows[m].sample(rng);
        (m, i)
    }
}

/// `n` i.i.d. records from the analytic joint, reproducible from `seed`.
pub fn sample_interactions(
    family: &SourceFamily,
    lambda: Lambda,
    channel: &SemioticChannel,
    n: usize,
    seed: u64,
) -> Result<Vec<InteractionRecord>> {
    if n == 0 {
        return Err(Error::domain("sample size must be at least 1"));
    }
    let sampler = PairSampler::new(family, lambda, channel)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let messages = family.message_ids();
    let interpretations = channel.interpretation_ids();
    Ok((0..n)
        .map(|_| {
            let (m, i) = sampler.draw(&mut rng);
            InteractionRecord {
                audience_id: channel.audience_id().to_owned(),
                context_id: channel.context_id().to_owned(),
                lambda: lambda.get(),
                message_id: messages[m].clone(),
                interpretation_id: interpretations[i].clone(),
            }
        })
        .collect())
}

/// Stateful sampler that tabulates fresh batches directly into counts,
/// without materializing records. Uses the same draw order as
/// [`sample_interactions`].
pub struct ScenarioSampler {
    family: SourceFamily,
    channel: SemioticChannel,
    rng: ChaCha8Rng,
}

impl ScenarioSampler {
    pub fn new(family: SourceFamily, channel: SemioticChannel, seed: u64) -> Result<Self> {
        if family.len() != channel.matrix().messages() {
            return Err(Error::shape("source and channel disagree on message count"));
        }
        Ok(Self {
            family,
            channel,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn family(&self) -> &SourceFamily {
        &self.family
    }

    pub fn channel(&self) -> &SemioticChannel {
        &self.channel
    }

    /// Counts over the full declared alphabets (unobserved ids get zero rows
    /// or columns).
    pub fn sample_table(&mut self, lambda: Lambda, n: usize) -> Result<CountTable> {
        if n == 0 {
            return Err(Error::domain("sample size must be at least 1"));
        }
        let sampler = PairSampler::new(&self.family, lambda, &self.channel)?;
        let cols = self.channel.matrix().interpretations();
        let mut counts = vec![0u64; self.family.len() * cols];
        for _ in 0..n {
            let (m, i) = sampler.draw(&mut self.rng);
            counts[m * cols + i] += 1;
        }
        CountTable::new(
            self.channel.audience_id(),
            self.channel.context_id(),
            lambda.get(),
            self.family.message_ids().to_vec(),
            self.channel.interpretation_ids().to_vec(),
            counts,
        )
    }
}

/// Writes one JSON object per line.
pub fn write_jsonl<W: Write>(records: &[InteractionRecord], mut out: W) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Writes CSV with a header row named after the record fields.
pub fn write_csv<W: Write>(records: &[InteractionRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
