//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. Set `SEMIOSCOPE_BLESS=1` to rewrite the
//! golden profile instead of comparing against it.

mod common;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use semioscope_core::adapt::{adapt_lambda, AdaptConfig};
use semioscope_core::capacity::{
    self, blahut_arimoto, lambda_opt, log_grid, profile, ProfileCurve,
};
use semioscope_core::certify::{certify, CertificationPolicy};
use semioscope_core::channel::ChannelMatrix;
use semioscope_core::estimation::{
    bootstrap_ci, ingest, tabulate, BootstrapConfig, Estimator, Method, RecordFormat, Statistic,
};
use semioscope_core::info::{binary_entropy, fano_error_lower_bound, Bits};
use semioscope_core::sampling::{sample_interactions, write_csv, write_jsonl, ScenarioSampler};
use semioscope_core::scenario::{builtin, reference_scenario, ScenarioKind, BUILTIN_NAMES};
use semioscope_core::{breadth, Lambda, Scenario, SemioticChannel, SourceFamily};

type Check = std::result::Result<String, String>;

/// (number, description, time limit in seconds, check)
type Criterion = (u8, &'static str, f64, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn scenario(scores: Vec<f64>, rows: Vec<Vec<f64>>, context: &str) -> Scenario {
    let matrix = ChannelMatrix::from_rows(rows).unwrap();
    let channel = SemioticChannel::with_default_ids("acceptance", context, matrix).unwrap();
    Scenario::new(SourceFamily::from_scores(scores).unwrap(), channel).unwrap()
}

fn uniform_bsc(p: f64) -> Scenario {
    scenario(
        vec![0.0, 0.0],
        vec![vec![1.0 - p, p], vec![p, 1.0 - p]],
        "bsc",
    )
}

fn random_scenarios(count: usize, seed: u64) -> Vec<Scenario> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| {
            let kind = ScenarioKind::Random {
                messages: rng.random_range(1..=16),
                interpretations: rng.random_range(1..=16),
            };
            reference_scenario(kind, seed + k as u64).unwrap()
        })
        .collect()
}

fn wide_grid() -> Vec<f64> {
    log_grid(0.01, 100.0, 33).unwrap()
}

fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/tiered_default_profile.csv")
}

fn tiered_curve() -> ProfileCurve {
    let s = builtin("tiered_default").unwrap();
    profile(&s.source, &s.channel, &log_grid(0.05, 20.0, 64).unwrap()).unwrap()
}

fn c1_decipherability_below_breadth() -> Check {
    let grid = wide_grid();
    let mut worst = f64::NEG_INFINITY;
    for s in random_scenarios(200, 1_000) {
        for p in profile(&s.source, &s.channel, &grid).map_err(err)?.points() {
            let gap = p.decipherability_bits.get() - p.breadth_bits.get();
            worst = worst.max(gap);
            ensure(gap <= 1e-9, || {
                format!("D exceeds S by {gap} at lambda {}", p.lambda)
            })?;
        }
    }
    Ok(format!(
        "200 scenarios x 33 points, max(D - S) = {worst:.3e}"
    ))
}

fn c2_breadth_monotone() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2_000);
    for _ in 0..200 {
        let n = rng.random_range(1..=16);
        let scores: Vec<f64> = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();
        let family = SourceFamily::from_scores(scores).map_err(err)?;
        let mut grid: Vec<f64> = (0..33)
            .map(|_| 10f64.powf(rng.random_range(-2.0..3.0)))
            .collect();
        grid.sort_by(f64::total_cmp);
        let s: Vec<f64> = grid
            .iter()
            .map(|&l| breadth(&family, Lambda::new(l).unwrap()).get())
            .collect();
        if let Some(w) = s.windows(2).find(|w| w[1] < w[0] - 1e-9) {
            return Err(format!("S decreased from {} to {}", w[0], w[1]));
        }
    }
    Ok("200 families x 33 sorted random lambdas".into())
}

fn c3_tiered_shape_and_golden() -> Check {
    let curve = tiered_curve();
    let pts = curve.points();
    ensure(
        pts.windows(2)
            .all(|w| w[1].breadth_bits.get() >= w[0].breadth_bits.get() - 1e-9),
        || "S not nondecreasing".into(),
    )?;
    ensure(curve.local_maxima_count() == 1, || {
        format!("{} local maxima", curve.local_maxima_count())
    })?;
    let best = curve.argmax();
    ensure(best > 0 && best + 1 < pts.len(), || {
        format!("argmax at boundary index {best}")
    })?;

    let mut emitted = Vec::new();
    curve.write_csv(&mut emitted).map_err(err)?;
    let path = golden_path();
    if std::env::var_os("SEMIOSCOPE_BLESS").is_some() {
        std::fs::write(&path, &emitted).map_err(err)?;
    }
    let golden = ProfileCurve::read_csv(std::fs::File::open(&path).map_err(err)?).map_err(err)?;
    ensure(golden.points().len() == pts.len(), || {
        "golden length differs".into()
    })?;
    let mut worst: f64 = 0.0;
    for (a, b) in golden.points().iter().zip(pts) {
        for (x, y) in [
            (a.lambda, b.lambda),
            (a.breadth_bits.get(), b.breadth_bits.get()),
            (a.decipherability_bits.get(), b.decipherability_bits.get()),
            (
                a.residual_ambiguity_bits.get(),
                b.residual_ambiguity_bits.get(),
            ),
            (a.risk, b.risk),
        ] {
            worst = worst.max((x - y).abs());
        }
    }
    ensure(worst <= 1e-9, || format!("golden mismatch {worst:.3e}"))?;
    Ok(format!(
        "64 points, one peak at lambda {:.4}, golden max diff {worst:.1e}",
        pts[best].lambda
    ))
}

fn c4_blahut_arimoto_oracles() -> Check {
    let ba = |s: &Scenario| {
        blahut_arimoto(
            &s.channel,
            capacity::DEFAULT_BA_TOL,
            capacity::DEFAULT_BA_MAX_ITER,
        )
    };
    let mut worst: f64 = 0.0;
    for p in [0.05, 0.11, 0.25, 0.45] {
        let got = ba(&uniform_bsc(p)).map_err(err)?.capacity_bits.get();
        let want = 1.0 - binary_entropy(p).map_err(err)?.get();
        let oracle = 1.0 - common::h2(p);
        ensure((want - oracle).abs() < 1e-12, || {
            "binary entropy disagrees with oracle".into()
        })?;
        worst = worst.max((got - want).abs());
        ensure((got - want).abs() <= 1e-6, || {
            format!("BSC({p}): {got} vs {want}")
        })?;
    }
    for n in 1..=16 {
        let s = reference_scenario(ScenarioKind::Identity { size: n }, 0).map_err(err)?;
        let got = ba(&s).map_err(err)?.capacity_bits.get();
        ensure((got - (n as f64).log2()).abs() <= 1e-9, || {
            format!("identity({n}): {got}")
        })?;
        let s = reference_scenario(ScenarioKind::Constant { size: n }, 0).map_err(err)?;
        let got = ba(&s).map_err(err)?.capacity_bits.get();
        ensure(got == 0.0, || format!("constant({n}): {got}"))?;
    }
    Ok(format!(
        "BSC max error {worst:.1e}; identity 1..16 and constant 1..16 exact"
    ))
}

fn c5_lambda_search() -> Check {
    let s = builtin("tiered_default").map_err(err)?;
    let found = lambda_opt(&s.source, &s.channel, (0.05, 20.0), 33, 1e-4).map_err(err)?;
    let (dense_l, dense_d, step) = common::dense_argmax(&s, 0.05, 20.0, 4096);
    let offset = (found.lambda_opt / dense_l).ln().abs();
    ensure(offset <= step, || {
        format!("lambda_opt {} vs dense {dense_l}", found.lambda_opt)
    })?;
    let c = found.capacity_bits.get();
    ensure(c >= dense_d - 1e-6, || {
        format!("capacity {c} below dense max {dense_d}")
    })?;
    Ok(format!(
        "lambda_opt {:.6} vs dense {dense_l:.6} ({:.2} steps), C {c:.9} vs {dense_d:.9}",
        found.lambda_opt,
        offset / step
    ))
}

fn c6_domination() -> Check {
    let mut all: Vec<Scenario> = BUILTIN_NAMES.iter().map(|n| builtin(n).unwrap()).collect();
    all.extend(random_scenarios(50, 6_000));
    let grid = wide_grid();
    let mut tightest = f64::INFINITY;
    for s in &all {
        let curve = profile(&s.source, &s.channel, &grid).map_err(err)?;
        let dmax = curve.points()[curve.argmax()].decipherability_bits.get();
        let ba = blahut_arimoto(
            &s.channel,
            capacity::DEFAULT_BA_TOL,
            capacity::DEFAULT_BA_MAX_ITER,
        )
        .map_err(err)?
        .capacity_bits
        .get();
        tightest = tightest.min(ba - dmax);
        ensure(dmax <= ba + 1e-6, || {
            format!("{}: max D {dmax} > BA {ba}", s.channel.context_id())
        })?;
    }
    Ok(format!(
        "{} scenarios, min(BA - max D) = {tightest:.3e}",
        all.len()
    ))
}

fn mi_estimate(s: &Scenario, n: usize, seed: u64, method: Method) -> f64 {
    let mut sampler = ScenarioSampler::new(s.source.clone(), s.channel.clone(), seed).unwrap();
    let table = sampler.sample_table(Lambda::new(1.0).unwrap(), n).unwrap();
    Estimator::new(method).mutual_information(&table).get()
}

fn c7_estimator_fidelity() -> Check {
    let s = uniform_bsc(0.25);
    let truth = 1.0 - common::h2(0.25);
    ensure((truth - 0.188722).abs() < 5e-7, || {
        format!("analytic MI {truth}")
    })?;
    let big = mi_estimate(&s, 200_000, 7_000, Method::Plugin);
    ensure((big - truth).abs() <= 0.01, || {
        format!("plugin at N=200000: {big}")
    })?;

    let seeds = 7_100..7_120u64;
    let mean = |method| {
        seeds
            .clone()
            .map(|seed| mi_estimate(&s, 1_000, seed, method))
            .sum::<f64>()
            / 20.0
    };
    let plugin_err = (mean(Method::Plugin) - truth).abs();
    let mm_err = (mean(Method::MillerMadow) - truth).abs();
    ensure(mm_err <= plugin_err, || {
        format!("mean over 20 seeds: Miller-Madow error {mm_err:.6} > plugin error {plugin_err:.6}")
    })?;
    Ok(format!(
        "N=200000 error {:.5}; N=1000 mean error plugin {plugin_err:.6}, Miller-Madow {mm_err:.6}",
        (big - truth).abs()
    ))
}

fn c8_bootstrap_coverage() -> Check {
    let s = uniform_bsc(0.25);
    let truth = 1.0 - common::h2(0.25);
    let mut covered = 0;
    for r in 0..100u64 {
        let mut sampler =
            ScenarioSampler::new(s.source.clone(), s.channel.clone(), 8_000 + r).unwrap();
        let table = sampler
            .sample_table(Lambda::new(1.0).unwrap(), 50_000)
            .map_err(err)?;
        let cfg = BootstrapConfig {
            replicates: 500,
            level: 0.95,
            seed: 80_000 + r,
        };
        let ci = bootstrap_ci(&table, Statistic::Mi, Method::Plugin, &cfg).map_err(err)?;
        if ci.ci_low.get() <= truth && truth <= ci.ci_high.get() {
            covered += 1;
        }
    }
    ensure(covered >= 90, || format!("coverage {covered}/100"))?;
    Ok(format!("coverage {covered}/100"))
}

fn c9_round_trip() -> Check {
    let s = builtin("tiered_default").map_err(err)?;
    let lambda = Lambda::new(1.5).unwrap();
    let records = sample_interactions(&s.source, lambda, &s.channel, 100_000, 7).map_err(err)?;
    let direct = tabulate(&records).map_err(err)?;

    let mut jsonl = Vec::new();
    write_jsonl(&records, &mut jsonl).map_err(err)?;
    let mut csv = Vec::new();
    write_csv(&records, &mut csv).map_err(err)?;
    for (bytes, format) in [(&jsonl, RecordFormat::Jsonl), (&csv, RecordFormat::Csv)] {
        let tables = ingest(bytes.as_slice(), format).map_err(err)?;
        ensure(tables == direct, || {
            format!("{format:?} ingest differs from direct counts")
        })?;
    }
    ensure(direct.len() == 1 && direct[0].total() == 100_000, || {
        "wrong total".into()
    })?;

    let mut independent = std::collections::HashMap::new();
    for r in &records {
        *independent
            .entry((r.message_id.as_str(), r.interpretation_id.as_str()))
            .or_insert(0u64) += 1;
    }
    let t = &direct[0];
    for (m, mid) in t.message_ids().iter().enumerate() {
        for (i, iid) in t.interpretation_ids().iter().enumerate() {
            let want = independent
                .get(&(mid.as_str(), iid.as_str()))
                .copied()
                .unwrap_or(0);
            ensure(t.get(m, i) == want, || format!("cell ({mid}, {iid})"))?;
        }
    }

    let again = sample_interactions(&s.source, lambda, &s.channel, 100_000, 7).map_err(err)?;
    let mut jsonl2 = Vec::new();
    write_jsonl(&again, &mut jsonl2).map_err(err)?;
    ensure(jsonl == jsonl2, || "repeated run not byte-identical".into())?;
    Ok(format!(
        "100000 records, JSONL {} bytes and CSV round trips exact",
        jsonl.len()
    ))
}

fn certify_bsc(
    target: f64,
) -> std::result::Result<(f64, semioscope_core::certify::CertificationReport), String> {
    // crossover p in [0, 1/2] with 1 - h(p) = target
    let (mut lo, mut hi) = (0.0, 0.5);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if 1.0 - common::h2(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s = uniform_bsc(0.5 * (lo + hi));
    let curve = profile(&s.source, &s.channel, &log_grid(0.05, 20.0, 33).unwrap()).map_err(err)?;
    let cap = lambda_opt(&s.source, &s.channel, (0.05, 20.0), 33, 1e-4).map_err(err)?;
    let policy: CertificationPolicy =
        serde_json::from_str(r#"{"metric": "normalized", "d_min": 0.8}"#).map_err(err)?;
    let report = certify(&curve, &cap, &policy, 2).map_err(err)?;
    Ok((report.decipherability_metric, report))
}

fn c10_certification() -> Check {
    let (high, pass) = certify_bsc(0.85)?;
    ensure((high - 0.85).abs() < 1e-9, || {
        format!("constructed scenario has D = {high}")
    })?;
    ensure(pass.pass && pass.reasons.is_empty(), || {
        format!("0.85 did not pass: {:?}", pass.reasons)
    })?;
    let (low, fail) = certify_bsc(0.5)?;
    ensure((low - 0.5).abs() < 1e-9, || {
        format!("constructed scenario has D = {low}")
    })?;
    ensure(!fail.pass, || "0.5 passed".into())?;
    ensure(fail.reasons.iter().any(|r| r.starts_with("d_min:")), || {
        format!("reasons {:?}", fail.reasons)
    })?;
    let json = serde_json::to_value(&fail).map_err(err)?;
    ensure(json["pass"] == false && json["reasons"].is_array(), || {
        "report JSON shape".into()
    })?;
    Ok(format!("0.85 passes, 0.5 fails with {:?}", fail.reasons))
}

fn c11_fano() -> Check {
    let f = |r: f64, k: usize| fano_error_lower_bound(Bits::new(r).unwrap(), k).map_err(err);
    for k in [2, 4, 8, 16] {
        ensure(f(0.0, k)? == 0.0, || format!("fano(0, {k}) != 0"))?;
    }
    ensure(f(1.0, 2)? == 0.5, || {
        format!("fano(1, 2) = {}", f(1.0, 2).unwrap())
    })?;
    for k in [2usize, 4, 8] {
        let top = (k as f64).log2();
        let mut prev = -1.0;
        for j in 0..100 {
            let v = f(top * j as f64 / 99.0, k)?;
            ensure(v >= prev, || format!("K={k}: decreased at grid index {j}"))?;
            prev = v;
        }
    }
    Ok("zero at 0, 0.5 at (1, 2), monotone for K in {2, 4, 8}".into())
}

fn adapt_final(s: &Scenario, seed: u64, cfg: &AdaptConfig) -> std::result::Result<f64, String> {
    let mut sampler =
        ScenarioSampler::new(s.source.clone(), s.channel.clone(), seed).map_err(err)?;
    let trace = adapt_lambda(&mut sampler, cfg).map_err(err)?;
    Ok(trace.last().map(|t| t.lambda).unwrap_or(cfg.lambda_init))
}

fn c12_adaptive_controller() -> Check {
    let cfg = AdaptConfig::default();
    let identity = builtin("identity4").map_err(err)?;
    let mut hits_identity = 0;
    for seed in 0..10 {
        if (adapt_final(&identity, 12_000 + seed, &cfg)? - cfg.lambda_max).abs()
            <= 0.1 * cfg.lambda_max
        {
            hits_identity += 1;
        }
    }
    let tiered = builtin("tiered_default").map_err(err)?;
    let target = lambda_opt(
        &tiered.source,
        &tiered.channel,
        (cfg.lambda_min, cfg.lambda_max),
        33,
        1e-6,
    )
    .map_err(err)?
    .lambda_opt;
    let mut finals = Vec::new();
    for seed in 0..10 {
        finals.push(adapt_final(&tiered, 12_100 + seed, &cfg)?);
    }
    let hits_tiered = finals
        .iter()
        .filter(|&&l| (l - target).abs() <= 0.25 * target)
        .count();
    ensure(hits_identity >= 9 && hits_tiered >= 8, || {
        format!("identity {hits_identity}/10, tiered {hits_tiered}/10 (target {target:.4}, finals {finals:.3?})")
    })?;
    Ok(format!(
        "identity {hits_identity}/10, tiered {hits_tiered}/10 near lambda_opt {target:.4}"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        (
            1,
            "decipherability never exceeds breadth",
            10.0,
            c1_decipherability_below_breadth,
        ),
        (
            2,
            "breadth nondecreasing in lambda",
            5.0,
            c2_breadth_monotone,
        ),
        (
            3,
            "tiered profile shape and golden curve",
            2.0,
            c3_tiered_shape_and_golden,
        ),
        (
            4,
            "Blahut-Arimoto closed-form capacities",
            2.0,
            c4_blahut_arimoto_oracles,
        ),
        (5, "lambda_opt against dense grid", 5.0, c5_lambda_search),
        (
            6,
            "Blahut-Arimoto dominates the profile",
            10.0,
            c6_domination,
        ),
        (7, "estimator fidelity", 30.0, c7_estimator_fidelity),
        (8, "bootstrap coverage", 180.0, c8_bootstrap_coverage),
        (9, "record round trip", f64::INFINITY, c9_round_trip),
        (10, "certification thresholds", 1.0, c10_certification),
        (11, "Fano bound consistency", 1.0, c11_fano),
        (12, "adaptive controller", 120.0, c12_adaptive_controller),
    ];
    let mut failures = 0;
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed.as_secs_f64() > limit => Err(format!(
                "{detail}; took {:.2} s, limit {limit} s",
                elapsed.as_secs_f64()
            )),
            other => other,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!(
            "criterion {id:>2} [{tag}] {name} ({:.2} s): {detail}",
            elapsed.as_secs_f64()
        );
        failures += usize::from(outcome.is_err());
    }
    println!("acceptance: {} passed, {failures} failed", 12 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
