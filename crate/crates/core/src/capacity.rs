//! λ-profiles, optimal-λ search and the unconstrained capacity bound.

use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

use crate::certify::{risk_score, DEFAULT_RISK_CAP};
use crate::channel::{measures, SemioticChannel};
use crate::error::{Error, Result};
use crate::info::{Bits, ProbVector};
use crate::source::{Lambda, SourceFamily};

/// Values closer than this are one plateau when counting local maxima.
pub const PLATEAU_TOLERANCE: f64 = 1e-9;

pub const DEFAULT_BOUNDS: (f64, f64) = (0.05, 20.0);
pub const DEFAULT_COARSE_POINTS: usize = 33;
pub const DEFAULT_SEARCH_TOL: f64 = 1e-4;

pub const DEFAULT_BA_TOL: f64 = 1e-9;
pub const DEFAULT_BA_MAX_ITER: usize = 100_000;

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    check_bounds(lo, hi)?;
    if n == 0 {
        return Err(Error::domain("grid needs at least one point"));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.ln(), hi.ln());
    let mut grid: Vec<f64> = (0..n)
        .map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp())
        .collect();
    grid[0] = lo;
    grid[n - 1] = hi;
    Ok(grid)
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    check_bounds(lo, hi)?;
    if n == 0 {
        return Err(Error::domain("grid needs at least one point"));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let mut grid: Vec<f64> = (0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
        .collect();
    grid[n - 1] = hi;
    Ok(grid)
}

/// Parses `lo:hi:points[:log|:lin]` (log spacing when omitted).
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').map(str::trim).collect();
    let bad = || Error::domain(format!("bad grid `{text}`, expected lo:hi:points:log|lin"));
    if !(3..=4).contains(&parts.len()) {
        return Err(bad());
    }
    let lo: f64 = parts[0].parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].parse().map_err(|_| bad())?;
    let n: usize = parts[2].parse().map_err(|_| bad())?;
    match parts.get(3).copied().unwrap_or("log") {
        "log" => log_grid(lo, hi, n),
        "lin" | "linear" => linear_grid(lo, hi, n),
        _ => Err(bad()),
    }
}

fn check_bounds(lo: f64, hi: f64) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo < hi) {
        return Err(Error::domain(format!("need 0 < lo < hi, got [{lo}, {hi}]")));
    }
    Ok(())
}

/// Number of strict local maxima in `values`, where a maximal run of
/// neighbours equal within `tol` counts as a single point.
pub fn count_local_maxima(values: &[f64], tol: f64) -> usize {
    let mut runs: Vec<f64> = Vec::new();
    let mut prev: Option<f64> = None;
    for &v in values {
        match (prev, runs.last_mut()) {
            (Some(p), Some(last)) if (v - p).abs() <= tol => *last = last.max(v),
            _ => runs.push(v),
        }
        prev = Some(v);
    }
    (0..runs.len())
        .filter(|&k| {
            let left = k == 0 || runs[k - 1] < runs[k];
            let right = k + 1 == runs.len() || runs[k + 1] < runs[k];
            left && right
        })
        .count()
}

/// One sample of the semiotic profile.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub lambda: f64,
    pub breadth_bits: Bits,
    pub decipherability_bits: Bits,
    pub residual_ambiguity_bits: Bits,
    pub risk: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub breadth_ci: Option<[Bits; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decipherability_ci: Option<[Bits; 2]>,
}

impl ProfilePoint {
    pub fn new(
        lambda: f64,
        breadth: Bits,
        decipherability: Bits,
        residual: Bits,
        risk_cap: f64,
    ) -> Self {
        Self {
            lambda,
            breadth_bits: breadth,
            decipherability_bits: decipherability,
            residual_ambiguity_bits: residual,
            risk: risk_score(breadth, decipherability, risk_cap),
            breadth_ci: None,
            decipherability_ci: None,
        }
    }
}

#[derive(Deserialize)]
struct ProfileCurveRepr {
    #[serde(default)]
    audience_id: Option<String>,
    #[serde(default)]
    context_id: Option<String>,
    points: Vec<ProfilePoint>,
}

/// Profile points in ascending λ, with the unimodality diagnostic on `D`.
///
/// Channel ids are absent when the curve was read back from CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileCurveRepr")]
pub struct ProfileCurve {
    pub audience_id: Option<String>,
    pub context_id: Option<String>,
    points: Vec<ProfilePoint>,
    unimodal: bool,
    local_maxima_count: usize,
}

impl TryFrom<ProfileCurveRepr> for ProfileCurve {
    type Error = Error;

    fn try_from(r: ProfileCurveRepr) -> Result<Self> {
        ProfileCurve::new(r.audience_id, r.context_id, r.points)
    }
}

const CSV_COLUMNS: [&str; 5] = [
    "lambda",
    "breadth_bits",
    "decipherability_bits",
    "residual_ambiguity_bits",
    "risk",
];
const CSV_CI_COLUMNS: [&str; 4] = [
    "breadth_ci_low",
    "breadth_ci_high",
    "decipherability_ci_low",
    "decipherability_ci_high",
];

impl ProfileCurve {
    pub fn new(
        audience_id: Option<String>,
        context_id: Option<String>,
        points: Vec<ProfilePoint>,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::domain("profile curve needs at least one point"));
        }
        if let Some(w) = points.windows(2).find(|w| w[1].lambda <= w[0].lambda) {
            return Err(Error::domain(format!(
                "profile lambdas must be strictly increasing ({} then {})",
                w[0].lambda, w[1].lambda
            )));
        }
        let d: Vec<f64> = points
            .iter()
            .map(|p| p.decipherability_bits.get())
            .collect();
        let local_maxima_count = count_local_maxima(&d, PLATEAU_TOLERANCE);
        Ok(Self {
            audience_id,
            context_id,
            points,
            unimodal: local_maxima_count == 1,
            local_maxima_count,
        })
    }

    pub fn points(&self) -> &[ProfilePoint] {
        &self.points
    }

    pub fn unimodal(&self) -> bool {
        self.unimodal
    }

    pub fn local_maxima_count(&self) -> usize {
        self.local_maxima_count
    }

    /// Index of the largest `D`, leftmost on ties.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (k, p) in self.points.iter().enumerate() {
            if p.decipherability_bits > self.points[best].decipherability_bits {
                best = k;
            }
        }
        best
    }

    pub fn has_intervals(&self) -> bool {
        self.points
            .iter()
            .any(|p| p.breadth_ci.is_some() || p.decipherability_ci.is_some())
    }

    /// Columns: lambda, breadth_bits, decipherability_bits,
    /// residual_ambiguity_bits, risk; followed by the four CI columns when
    /// any point carries intervals.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let with_ci = self.has_intervals();
        let mut header: Vec<&str> = CSV_COLUMNS.to_vec();
        if with_ci {
            header.extend(CSV_CI_COLUMNS);
        }
        w.write_record(&header)?;
        for p in &self.points {
            let mut row = vec![
                p.lambda.to_string(),
                p.breadth_bits.get().to_string(),
                p.decipherability_bits.get().to_string(),
                p.residual_ambiguity_bits.get().to_string(),
                p.risk.to_string(),
            ];
            if with_ci {
                for ci in [p.breadth_ci, p.decipherability_ci] {
                    match ci {
                        Some([lo, hi]) => row.extend([lo.get().to_string(), hi.get().to_string()]),
                        None => row.extend([String::new(), String::new()]),
                    }
                }
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut reader = csv::Reader::from_reader(input);
        let headers = reader.headers()?.clone();
        let find = |name: &str| headers.iter().position(|h| h.trim() == name);
        let mut required = [0usize; 5];
        for (slot, name) in required.iter_mut().zip(CSV_COLUMNS) {
            *slot = find(name).ok_or_else(|| Error::MissingField {
                line: 1,
                field: name.into(),
            })?;
        }
        let optional: Vec<Option<usize>> = CSV_CI_COLUMNS.iter().map(|n| find(n)).collect();

        let mut points = Vec::new();
        for row in reader.records() {
            let row = row?;
            let line = row.position().map_or(0, |p| p.line() as usize);
            let number = |k: usize, name: &str| -> Result<Option<f64>> {
                match row.get(k).map(str::trim) {
                    None | Some("") => Ok(None),
                    Some(s) => s.parse().map(Some).map_err(|_| Error::Malformed {
                        line,
                        message: format!("column `{name}` is not a number: `{s}`"),
                    }),
                }
            };
            let need = |k: usize| -> Result<f64> {
                number(required[k], CSV_COLUMNS[k])?.ok_or_else(|| Error::MissingField {
                    line,
                    field: CSV_COLUMNS[k].into(),
                })
            };
            let bits = |v: f64| {
                Bits::new(v).map_err(|e| Error::Malformed {
                    line,
                    message: e.to_string(),
                })
            };
            let ci = |a: usize, b: usize| -> Result<Option<[Bits; 2]>> {
                match (optional[a], optional[b]) {
                    (Some(x), Some(y)) => {
                        match (number(x, CSV_CI_COLUMNS[a])?, number(y, CSV_CI_COLUMNS[b])?) {
                            (Some(lo), Some(hi)) => Ok(Some([bits(lo)?, bits(hi)?])),
                            _ => Ok(None),
                        }
                    }
                    _ => Ok(None),
                }
            };
            points.push(ProfilePoint {
                lambda: need(0)?,
                breadth_bits: bits(need(1)?)?,
                decipherability_bits: bits(need(2)?)?,
                residual_ambiguity_bits: bits(need(3)?)?,
                risk: need(4)?,
                breadth_ci: ci(0, 1)?,
                decipherability_ci: ci(2, 3)?,
            });
        }
        Self::new(None, None, points)
    }
}

/// Analytic profile of `family` through `channel` on a strictly increasing grid.
pub fn profile(
    family: &SourceFamily,
    channel: &SemioticChannel,
    grid: &[f64],
) -> Result<ProfileCurve> {
    if grid.is_empty() {
        return Err(Error::domain("lambda grid is empty"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("lambda grid must be strictly increasing"));
    }
    let points = grid
        .iter()
        .map(|&l| {
            let m = measures(family, Lambda::new(l)?, channel)?;
            Ok(ProfilePoint::new(
                l,
                m.breadth,
                m.decipherability,
                m.residual_ambiguity,
                DEFAULT_RISK_CAP,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    ProfileCurve::new(
        Some(channel.audience_id().to_owned()),
        Some(channel.context_id().to_owned()),
        points,
    )
}

/// Best λ found by the capacity search and the decipherability there.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapacityResult {
    pub lambda_opt: f64,
    pub capacity_bits: Bits,
    /// `S(λ_opt)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub breadth_bits: Option<Bits>,
    pub search_iterations: usize,
    pub unimodal: bool,
    pub bounds: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub audience_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub context_id: Option<String>,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximization of `f` on `[a, b]` down to width `tol`.
fn golden_section_max(
    f: impl Fn(f64) -> f64,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> (f64, f64, usize) {
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iterations = 0;
    while b - a >= tol {
        iterations += 1;
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1, iterations)
    } else {
        (x2, f2, iterations)
    }
}

/// Semiotic capacity: maximizes `D(λ)` over `[lo, hi]`.
///
/// A log-spaced scan of `coarse_points` locates the best grid point (leftmost
/// within [`PLATEAU_TOLERANCE`]); golden-section search then refines between
/// its grid neighbours until the bracket is narrower than `tol`. The refined
/// point replaces the grid point only if it is strictly better, so boundary
/// optima and flat curves report the grid value. `unimodal` records whether
/// the coarse scan showed exactly one local maximum.
pub fn lambda_opt(
    family: &SourceFamily,
    channel: &SemioticChannel,
    bounds: (f64, f64),
    coarse_points: usize,
    tol: f64,
) -> Result<CapacityResult> {
    let (lo, hi) = bounds;
    check_bounds(lo, hi)?;
    if coarse_points < 3 {
        return Err(Error::domain(format!(
            "need at least 3 coarse points, got {coarse_points}"
        )));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::domain(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let max_lambda = hi.max(crate::source::DEFAULT_LAMBDA_MAX);
    let evaluate = |l: f64| -> Result<crate::channel::Measures> {
        measures(family, Lambda::with_max(l, max_lambda)?, channel)
    };

    let grid = log_grid(lo, hi, coarse_points)?;
    let d: Vec<f64> = grid
        .iter()
        .map(|&l| Ok(evaluate(l)?.decipherability.get()))
        .collect::<Result<_>>()?;
    let max = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let best = d
        .iter()
        .position(|&v| v >= max - PLATEAU_TOLERANCE)
        .expect("grid is nonempty");
    let unimodal = count_local_maxima(&d, PLATEAU_TOLERANCE) == 1;

    let a = grid[best.saturating_sub(1)];
    let b = grid[(best + 1).min(grid.len() - 1)];
    let objective = |l: f64| {
        evaluate(l)
            .map(|m| m.decipherability.get())
            .unwrap_or(f64::NEG_INFINITY)
    };
    let (x, fx, iterations) = golden_section_max(objective, a, b, tol);

    let lambda = if fx > d[best] { x } else { grid[best] };
    let at_opt = evaluate(lambda)?;
    Ok(CapacityResult {
        lambda_opt: lambda,
        capacity_bits: at_opt.decipherability,
        breadth_bits: Some(at_opt.breadth),
        search_iterations: iterations,
        unimodal,
        bounds: [lo, hi],
        audience_id: Some(channel.audience_id().to_owned()),
        context_id: Some(channel.context_id().to_owned()),
    })
}

/// Outcome of the Blahut–Arimoto iteration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlahutArimotoResult {
    /// Lower bound at termination; within `tol` of the true capacity when converged.
    pub capacity_bits: Bits,
    pub upper_bound_bits: Bits,
    pub input_dist: ProbVector,
    pub iterations: usize,
    pub converged: bool,
}

/// Capacity of the channel over all input distributions, not just the
/// temperature family. Stops once the gap between the standard upper and
/// lower capacity bounds is below `tol` bits.
pub fn blahut_arimoto(
    channel: &SemioticChannel,
    tol: f64,
    max_iter: usize,
) -> Result<BlahutArimotoResult> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::domain(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if max_iter == 0 {
        return Err(Error::domain("max_iter must be at least 1"));
    }
    let w = channel.matrix();
    let (n, k) = (w.messages(), w.interpretations());
    let mut r = vec![1.0 / n as f64; n];
    let mut divergence = vec![0.0; n];
    let (mut lower, mut upper) = (0.0, f64::INFINITY);
    let mut iterations = 0;
    let mut converged = false;

    while iterations < max_iter {
        iterations += 1;
        let mut q = vec![0.0; k];
        for (m, &rm) in r.iter().enumerate() {
            for (qi, &wmi) in q.iter_mut().zip(w.row(m)) {
                *qi += rm * wmi;
            }
        }
        for (m, dm) in divergence.iter_mut().enumerate() {
            *dm = w
                .row(m)
                .iter()
                .zip(&q)
                .filter(|(&wmi, _)| wmi > 0.0)
                .map(|(&wmi, &qi)| wmi * (wmi / qi).ln())
                .sum();
        }
        let dmax = divergence.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = r
            .iter()
            .zip(&divergence)
            .map(|(&rm, &dm)| rm * (dm - dmax).exp())
            .collect();
        let total: f64 = weights.iter().sum();
        lower = (dmax + total.ln()) / std::f64::consts::LN_2;
        upper = dmax / std::f64::consts::LN_2;
        r = weights.into_iter().map(|x| x / total).collect();
        if upper - lower < tol {
            converged = true;
            break;
        }
    }

    Ok(BlahutArimotoResult {
        capacity_bits: Bits::snap(lower.max(0.0)),
        upper_bound_bits: Bits::snap(upper.max(0.0)),
        input_dist: ProbVector::new(r)?,
        iterations,
        converged,
    })
}
