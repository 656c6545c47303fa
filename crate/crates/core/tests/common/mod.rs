//! Brute-force reference computations kept apart from the library's code paths.
#![allow(dead_code)]

use semioscope_core::Scenario;

/// Softmax computed in the naive order with the same max shift.
pub fn softmax(scores: &[f64], lambda: f64) -> Vec<f64> {
    let max = scores.iter().cloned().fold(f64::MIN, f64::max);
    let w: Vec<f64> = scores.iter().map(|s| ((s - max) / lambda).exp()).collect();
    let z: f64 = w.iter().sum();
    w.iter().map(|x| x / z).collect()
}

pub fn entropy(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum()
}

/// (S, D, H(Int|M)) with D summed directly as Σ p(m,i) log2(p(m,i) / (p(m) p(i))).
pub fn dense_measures(scenario: &Scenario, lambda: f64) -> (f64, f64, f64) {
    let p = softmax(scenario.source.base_scores(), lambda);
    let rows = scenario.channel.matrix().to_rows();
    let k = rows[0].len();
    let mut q = vec![0.0; k];
    for (pm, row) in p.iter().zip(&rows) {
        for i in 0..k {
            q[i] += pm * row[i];
        }
    }
    let mut mi = 0.0;
    let mut residual = 0.0;
    for (pm, row) in p.iter().zip(&rows) {
        for i in 0..k {
            let joint = pm * row[i];
            if joint > 0.0 {
                mi += joint * (joint / (pm * q[i])).log2();
                residual -= joint * row[i].log2();
            }
        }
    }
    (entropy(&p), mi, residual)
}

pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64))
        .collect()
}

/// Dense-grid argmax of D: (lambda, D, log-step of the grid).
pub fn dense_argmax(scenario: &Scenario, lo: f64, hi: f64, n: usize) -> (f64, f64, f64) {
    let grid = log_spaced(lo, hi, n);
    let mut best = (grid[0], f64::MIN);
    for &l in &grid {
        let d = dense_measures(scenario, l).1;
        if d > best.1 {
            best = (l, d);
        }
    }
    (best.0, best.1, (hi / lo).ln() / (n - 1) as f64)
}

pub fn h2(p: f64) -> f64 {
    entropy(&[p, 1.0 - p])
}
