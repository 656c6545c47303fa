use serde_json::Value;
use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, BufReader, Read};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::sampling::InteractionRecord;

/// Joint (message × interpretation) counts for one (audience, context, λ) group.
#[derive(Clone, Debug, PartialEq)]
pub struct CountTable {
    audience_id: String,
    context_id: String,
    lambda: f64,
    message_ids: Vec<String>,
    interpretation_ids: Vec<String>,
    counts: Vec<u64>,
    total: u64,
}

impl CountTable {
    pub fn new(
        audience_id: impl Into<String>,
        context_id: impl Into<String>,
        lambda: f64,
        message_ids: Vec<String>,
        interpretation_ids: Vec<String>,
        counts: Vec<u64>,
    ) -> Result<Self> {
        if message_ids.is_empty() || interpretation_ids.is_empty() {
            return Err(Error::shape(
                "count table needs at least one message and interpretation",
            ));
        }
        if counts.len() != message_ids.len() * interpretation_ids.len() {
            return Err(Error::shape(format!(
                "{} counts for a {}x{} table",
                counts.len(),
                message_ids.len(),
                interpretation_ids.len()
            )));
        }
        let total = counts.iter().sum();
        if total == 0 {
            return Err(Error::domain("count table is empty"));
        }
        Ok(Self {
            audience_id: audience_id.into(),
            context_id: context_id.into(),
            lambda,
            message_ids,
            interpretation_ids,
            counts,
            total,
        })
    }

    /// Same ids and group key, new counts.
    pub fn with_counts(&self, counts: Vec<u64>) -> Result<Self> {
        Self::new(
            self.audience_id.clone(),
            self.context_id.clone(),
            self.lambda,
            self.message_ids.clone(),
            self.interpretation_ids.clone(),
            counts,
        )
    }

    pub fn audience_id(&self) -> &str {
        &self.audience_id
    }

    pub fn context_id(&self) -> &str {
        &self.context_id
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn message_ids(&self) -> &[String] {
        &self.message_ids
    }

    pub fn interpretation_ids(&self) -> &[String] {
        &self.interpretation_ids
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.message_ids.len(), self.interpretation_ids.len())
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn get(&self, message: usize, interpretation: usize) -> u64 {
        self.counts[message * self.interpretation_ids.len() + interpretation]
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn message_counts(&self) -> Vec<u64> {
        self.counts
            .chunks(self.interpretation_ids.len())
            .map(|r| r.iter().sum())
            .collect()
    }

    pub fn interpretation_counts(&self) -> Vec<u64> {
        let cols = self.interpretation_ids.len();
        let mut out = vec![0; cols];
        for row in self.counts.chunks(cols) {
            for (acc, c) in out.iter_mut().zip(row) {
                *acc += c;
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecordFormat {
    Jsonl,
    Csv,
}

impl FromStr for RecordFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jsonl" | "json" => Ok(RecordFormat::Jsonl),
            "csv" => Ok(RecordFormat::Csv),
            other => Err(Error::domain(format!("unknown record format `{other}`"))),
        }
    }
}

const FIELDS: [&str; 5] = [
    "audience_id",
    "context_id",
    "lambda",
    "message_id",
    "interpretation_id",
];

fn check_lambda(lambda: f64, line: usize) -> Result<f64> {
    if lambda.is_finite() && lambda > 0.0 {
        Ok(lambda)
    } else {
        Err(Error::Malformed {
            line,
            message: format!("lambda must be positive, got {lambda}"),
        })
    }
}

fn parse_jsonl<R: Read>(input: R) -> Result<Vec<InteractionRecord>> {
    let mut records = Vec::new();
    for (k, line) in BufReader::new(input).lines().enumerate() {
        let line_no = k + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(&line).map_err(|e| Error::Malformed {
            line: line_no,
            message: e.to_string(),
        })?;
        let obj = value.as_object().ok_or_else(|| Error::Malformed {
            line: line_no,
            message: "expected a JSON object".into(),
        })?;
        let field = |name: &str| {
            obj.get(name).ok_or_else(|| Error::MissingField {
                line: line_no,
                field: name.into(),
            })
        };
        let text = |name: &str| -> Result<String> {
            field(name)?
                .as_str()
                .map(str::to_owned)
                .ok_or_else(|| Error::Malformed {
                    line: line_no,
                    message: format!("field `{name}` must be a string"),
                })
        };
        let lambda = field("lambda")?.as_f64().ok_or_else(|| Error::Malformed {
            line: line_no,
            message: "field `lambda` must be a number".into(),
        })?;
        records.push(InteractionRecord {
            audience_id: text("audience_id")?,
            context_id: text("context_id")?,
            lambda: check_lambda(lambda, line_no)?,
            message_id: text("message_id")?,
            interpretation_id: text("interpretation_id")?,
        });
    }
    Ok(records)
}

fn parse_csv<R: Read>(input: R) -> Result<Vec<InteractionRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let headers = reader.headers()?.clone();
    if headers.is_empty() {
        return Ok(Vec::new());
    }
    let mut index = [0usize; 5];
    for (slot, name) in index.iter_mut().zip(FIELDS) {
        *slot = headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::MissingField {
                line: 1,
                field: name.into(),
            })?;
    }
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::Malformed {
                line,
                message: e.to_string(),
            }
        })?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        let get = |k: usize| -> Result<String> {
            row.get(index[k])
                .map(str::to_owned)
                .ok_or_else(|| Error::MissingField {
                    line,
                    field: FIELDS[k].into(),
                })
        };
        let lambda: f64 = get(2)?.trim().parse().map_err(|_| Error::Malformed {
            line,
            message: format!(
                "field `lambda` is not a number: `{}`",
                row.get(index[2]).unwrap_or("")
            ),
        })?;
        records.push(InteractionRecord {
            audience_id: get(0)?,
            context_id: get(1)?,
            lambda: check_lambda(lambda, line)?,
            message_id: get(3)?,
            interpretation_id: get(4)?,
        });
    }
    Ok(records)
}

/// Parses an interaction stream and tabulates it per (audience, context, λ).
///
/// Groups come back sorted by key; within a group both alphabets are the
/// observed ids in lexicographic order.
pub fn ingest<R: Read>(input: R, format: RecordFormat) -> Result<Vec<CountTable>> {
    let records = match format {
        RecordFormat::Jsonl => parse_jsonl(input)?,
        RecordFormat::Csv => parse_csv(input)?,
    };
    tabulate(&records)
}

/// Groups already-parsed records into count tables.
pub fn tabulate(records: &[InteractionRecord]) -> Result<Vec<CountTable>> {
    #[derive(Default)]
    struct Group<'a> {
        messages: BTreeSet<&'a str>,
        interpretations: BTreeSet<&'a str>,
        cells: BTreeMap<(&'a str, &'a str), u64>,
    }

    // λ > 0, so the IEEE bit pattern orders the same way as the value.
    let mut groups: BTreeMap<(&str, &str, u64), Group> = BTreeMap::new();
    for r in records {
        let g = groups
            .entry((
                r.audience_id.as_str(),
                r.context_id.as_str(),
                r.lambda.to_bits(),
            ))
            .or_default();
        g.messages.insert(&r.message_id);
        g.interpretations.insert(&r.interpretation_id);
        *g.cells
            .entry((&r.message_id, &r.interpretation_id))
            .or_default() += 1;
    }

    groups
        .into_iter()
        .map(|((audience, context, lambda_bits), g)| {
            let messages: Vec<String> = g.messages.iter().map(|s| s.to_string()).collect();
            let interpretations: Vec<String> =
                g.interpretations.iter().map(|s| s.to_string()).collect();
            let mut counts = Vec::with_capacity(messages.len() * interpretations.len());
            for m in &g.messages {
                for i in &g.interpretations {
                    counts.push(g.cells.get(&(*m, *i)).copied().unwrap_or(0));
                }
            }
            CountTable::new(
                audience,
                context,
                f64::from_bits(lambda_bits),
                messages,
                interpretations,
                counts,
            )
        })
        .collect()
}
