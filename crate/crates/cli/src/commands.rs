use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use semioscope_core::adapt::{adapt_lambda, write_trace_csv, AdaptConfig};
use semioscope_core::capacity::{self, BlahutArimotoResult, CapacityResult, ProfileCurve};
use semioscope_core::certify::{self, risk_score, CertificationPolicy};
use semioscope_core::estimation::{
    bootstrap_ci, empirical_profile, ingest, BootstrapConfig, CountTable, Estimator, Method,
    RecordFormat, Statistic,
};
use semioscope_core::info::Bits;
use semioscope_core::sampling::{sample_interactions, write_csv, write_jsonl, ScenarioSampler};
use semioscope_core::{scenario, Error, Lambda, Result, Scenario};

use crate::{
    AdaptArgs, CapacityArgs, CertifyArgs, EstimateArgs, ProfileArgs, RiskArgs, SimulateArgs,
};

fn has_extension(path: &Path, ext: &str) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case(ext))
}

fn with_path(path: &Path) -> impl FnOnce(io::Error) -> Error + '_ {
    move |e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path).map_err(with_path(path))?))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(with_path(path))?))
}

fn load_scenario(arg: &str) -> Result<Scenario> {
    match arg.strip_prefix("builtin:") {
        Some(name) => scenario::builtin(name),
        None => {
            let path = Path::new(arg);
            Scenario::from_json(&fs::read_to_string(path).map_err(with_path(path))?)
        }
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    Ok(serde_json::from_reader(open(path)?)?)
}

fn read_curve(path: &Path) -> Result<ProfileCurve> {
    if has_extension(path, "json") {
        read_json(path)
    } else {
        ProfileCurve::read_csv(open(path)?)
    }
}

pub fn simulate(a: SimulateArgs) -> Result<()> {
    let s = load_scenario(&a.scenario)?;
    let mut records = Vec::with_capacity(a.n * a.lambda.len());
    for (k, &l) in a.lambda.iter().enumerate() {
        let lambda = Lambda::new(l)?;
        records.extend(sample_interactions(
            &s.source,
            lambda,
            &s.channel,
            a.n,
            a.seed.wrapping_add(k as u64),
        )?);
    }
    let mut out = create(&a.out)?;
    if has_extension(&a.out, "csv") {
        write_csv(&records, &mut out)?;
    } else {
        write_jsonl(&records, &mut out)?;
    }
    out.flush()?;
    Ok(())
}

pub fn profile(a: ProfileArgs) -> Result<()> {
    let s = load_scenario(&a.scenario)?;
    let grid = capacity::parse_grid(&a.grid)?;
    let curve = capacity::profile(&s.source, &s.channel, &grid)?;
    if has_extension(&a.out, "json") {
        write_json(&a.out, &curve)
    } else {
        let mut out = create(&a.out)?;
        curve.write_csv(&mut out)?;
        out.flush()?;
        Ok(())
    }
}

#[derive(Serialize)]
struct StatisticOut {
    point: Bits,
    #[serde(skip_serializing_if = "Option::is_none")]
    ci_low: Option<Bits>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ci_high: Option<Bits>,
}

#[derive(Serialize)]
struct TableEstimates {
    audience_id: String,
    context_id: String,
    lambda: f64,
    n: u64,
    entropy_m: StatisticOut,
    entropy_int: StatisticOut,
    mi: StatisticOut,
    cond_entropy: StatisticOut,
}

#[derive(Serialize)]
struct EstimateReport {
    method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    bootstrap: Option<BootstrapConfig>,
    tables: Vec<TableEstimates>,
    profiles: Vec<ProfileCurve>,
}

fn estimate_table(
    t: &CountTable,
    index: usize,
    method: Method,
    bootstrap: Option<&BootstrapConfig>,
) -> Result<TableEstimates> {
    let estimator = Estimator::new(method);
    let stats = [
        Statistic::EntropyM,
        Statistic::EntropyInt,
        Statistic::Mi,
        Statistic::CondEntropy,
    ];
    let values = stats
        .iter()
        .enumerate()
        .map(|(k, &s)| match bootstrap {
            None => Ok(StatisticOut {
                point: s.evaluate(&estimator, t),
                ci_low: None,
                ci_high: None,
            }),
            Some(cfg) => {
                let seed = cfg.seed.wrapping_add((4 * index + k) as u64);
                let e = bootstrap_ci(t, s, method, &BootstrapConfig { seed, ..*cfg })?;
                Ok(StatisticOut {
                    point: e.point,
                    ci_low: Some(e.ci_low),
                    ci_high: Some(e.ci_high),
                })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let [entropy_m, entropy_int, mi, cond_entropy]: [StatisticOut; 4] = values
        .try_into()
        .unwrap_or_else(|_| unreachable!("four statistics"));
    Ok(TableEstimates {
        audience_id: t.audience_id().to_owned(),
        context_id: t.context_id().to_owned(),
        lambda: t.lambda(),
        n: t.total(),
        entropy_m,
        entropy_int,
        mi,
        cond_entropy,
    })
}

pub fn estimate(a: EstimateArgs) -> Result<()> {
    let method: Method = a.method.parse()?;
    let bootstrap = a
        .bootstrap
        .map(|replicates| {
            let cfg = BootstrapConfig {
                replicates,
                level: a.level,
                seed: a.seed,
            };
            cfg.validate().map(|()| cfg)
        })
        .transpose()?;
    let format = if has_extension(&a.records, "csv") {
        RecordFormat::Csv
    } else {
        RecordFormat::Jsonl
    };
    let tables = ingest(open(&a.records)?, format)?;

    let estimates = tables
        .iter()
        .enumerate()
        .map(|(k, t)| estimate_table(t, k, method, bootstrap.as_ref()))
        .collect::<Result<Vec<_>>>()?;

    let mut profiles = Vec::new();
    let mut start = 0;
    while start < tables.len() {
        let same = |t: &CountTable| {
            t.audience_id() == tables[start].audience_id()
                && t.context_id() == tables[start].context_id()
        };
        let end = start + tables[start..].iter().take_while(|t| same(t)).count();
        profiles.push(empirical_profile(
            &tables[start..end],
            method,
            bootstrap.as_ref(),
        )?);
        start = end;
    }

    write_json(
        &a.out,
        &EstimateReport {
            method,
            bootstrap,
            tables: estimates,
            profiles,
        },
    )
}

#[derive(Serialize, Deserialize)]
struct CapacityFile {
    #[serde(flatten)]
    search: CapacityResult,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    interpretation_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    blahut_arimoto: Option<BlahutArimotoResult>,
}

pub fn capacity(a: CapacityArgs) -> Result<()> {
    let s = load_scenario(&a.scenario)?;
    let search = capacity::lambda_opt(
        &s.source,
        &s.channel,
        (a.bounds[0], a.bounds[1]),
        a.coarse,
        a.tol,
    )?;
    let ba = capacity::blahut_arimoto(&s.channel, a.ba_tol, a.ba_max_iter)?;
    let file = CapacityFile {
        search,
        interpretation_count: Some(s.channel.matrix().interpretations()),
        blahut_arimoto: Some(ba),
    };
    write_json(&a.out, &file)
}

pub fn certify(a: CertifyArgs) -> Result<()> {
    let curve = read_curve(&a.curve)?;
    let file: CapacityFile = read_json(&a.capacity)?;
    let policy: CertificationPolicy = read_json(&a.policy)?;
    let alphabet = a
        .interpretations
        .or(file.interpretation_count)
        .ok_or_else(|| {
            Error::Domain("interpretation count unknown; pass --interpretations".into())
        })?;
    let report = certify::certify(&curve, &file.search, &policy, alphabet)?;
    write_json(&a.out, &report)
}

#[derive(Serialize)]
struct RiskRow {
    lambda: f64,
    breadth_bits: f64,
    decipherability_bits: f64,
    risk: f64,
}

pub fn risk(a: RiskArgs) -> Result<()> {
    if !(a.cap.is_finite() && a.cap > 0.0) {
        return Err(Error::Domain(format!(
            "risk cap must be positive, got {}",
            a.cap
        )));
    }
    let curve = read_curve(&a.curve)?;
    let mut w = csv::Writer::from_writer(create(&a.out)?);
    for p in curve.points() {
        w.serialize(RiskRow {
            lambda: p.lambda,
            breadth_bits: p.breadth_bits.get(),
            decipherability_bits: p.decipherability_bits.get(),
            risk: risk_score(p.breadth_bits, p.decipherability_bits, a.cap),
        })
        .map_err(Error::from)?;
    }
    w.flush()?;
    Ok(())
}

pub fn adapt(a: AdaptArgs) -> Result<()> {
    let s = load_scenario(&a.scenario)?;
    let cfg = match &a.config {
        Some(path) => read_json(path)?,
        None => AdaptConfig::default(),
    };
    let mut sampler = ScenarioSampler::new(s.source, s.channel, a.seed)?;
    let trace = adapt_lambda(&mut sampler, &cfg)?;
    let mut out = create(&a.out)?;
    write_trace_csv(&trace, &mut out)?;
    out.flush()?;
    Ok(())
}
