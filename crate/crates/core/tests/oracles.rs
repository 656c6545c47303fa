mod common;

use approx::assert_abs_diff_eq;
use rand::{seq::SliceRandom, SeedableRng};
use rand_chacha::ChaCha8Rng;

use semioscope_core::capacity::{blahut_arimoto, lambda_opt, log_grid, profile, ProfileCurve};
use semioscope_core::certify::{classify, Archetype};
use semioscope_core::channel::measures;
use semioscope_core::estimation::{empirical_profile, Estimator, Method};
use semioscope_core::sampling::{sample_interactions, ScenarioSampler};
use semioscope_core::scenario::{builtin, reference_scenario, ScenarioKind};
use semioscope_core::{joint_distribution, message_distribution, Lambda};

fn lambda(l: f64) -> Lambda {
    Lambda::new(l).unwrap()
}

#[test]
fn golden_profile_agrees_with_brute_force() {
    let s = builtin("tiered_default").unwrap();
    let path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/tests/golden/tiered_default_profile.csv"
    );
    let golden = ProfileCurve::read_csv(std::fs::File::open(path).unwrap()).unwrap();
    assert_eq!(golden.points().len(), 64);
    for p in golden.points() {
        let (breadth, mi, residual) = common::dense_measures(&s, p.lambda);
        assert_abs_diff_eq!(p.breadth_bits.get(), breadth, epsilon = 1e-9);
        assert_abs_diff_eq!(p.decipherability_bits.get(), mi, epsilon = 1e-9);
        assert_abs_diff_eq!(p.residual_ambiguity_bits.get(), residual, epsilon = 1e-9);
    }
}

#[test]
fn tiered_measures_at_three_temperatures() {
    let s = builtin("tiered_default").unwrap();
    for l in [0.1, 1.0, 10.0] {
        let m = measures(&s.source, lambda(l), &s.channel).unwrap();
        let (breadth, mi, residual) = common::dense_measures(&s, l);
        assert_abs_diff_eq!(m.breadth.get(), breadth, epsilon = 1e-9);
        assert_abs_diff_eq!(m.decipherability.get(), mi, epsilon = 1e-9);
        assert_abs_diff_eq!(m.residual_ambiguity.get(), residual, epsilon = 1e-9);
    }
}

#[test]
fn tiered_risk_at_high_lambda_matches_ratio() {
    let s = builtin("tiered_default").unwrap();
    let curve = profile(&s.source, &s.channel, &[20.0]).unwrap();
    let (breadth, mi, _) = common::dense_measures(&s, 20.0);
    assert_abs_diff_eq!(curve.points()[0].risk, breadth / mi, epsilon = 1e-9);
    assert!(curve.points()[0].risk > 1.5);
}

#[test]
fn tiered_archetype_is_frozen() {
    let s = builtin("tiered_default").unwrap();
    let curve = profile(&s.source, &s.channel, &log_grid(0.05, 20.0, 64).unwrap()).unwrap();
    let cap = lambda_opt(&s.source, &s.channel, (0.05, 20.0), 33, 1e-4).unwrap();
    assert_eq!(classify(&curve, &cap), Archetype::TightropeWalker);
}

#[test]
fn identity_profile_is_breadth_exactly() {
    let s = builtin("identity4").unwrap();
    for p in profile(&s.source, &s.channel, &log_grid(0.01, 100.0, 50).unwrap())
        .unwrap()
        .points()
    {
        assert_eq!(p.breadth_bits, p.decipherability_bits);
        assert_eq!(p.residual_ambiguity_bits.get(), 0.0);
    }
}

#[test]
fn uniform_bsc_decipherability_is_closed_form() {
    let s = builtin("bsc011").unwrap();
    // scores (0, -1) make the input non-uniform; large λ approaches uniform
    let d = measures(&s.source, lambda(1e3), &s.channel)
        .unwrap()
        .decipherability
        .get();
    assert_abs_diff_eq!(d, 1.0 - common::h2(0.11), epsilon = 1e-6);
    assert_abs_diff_eq!(1.0 - common::h2(0.11), 0.500_084_041_835, epsilon = 1e-11);
}

#[test]
fn permutations_leave_measures_unchanged() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for k in 0..20 {
        let s = reference_scenario(
            ScenarioKind::Random {
                messages: 7,
                interpretations: 5,
            },
            k,
        )
        .unwrap();
        let mut rows: Vec<usize> = (0..7).collect();
        let mut cols: Vec<usize> = (0..5).collect();
        rows.shuffle(&mut rng);
        cols.shuffle(&mut rng);
        let source = s.source.permuted(&rows).unwrap();
        let channel = s
            .channel
            .permute_messages(&rows)
            .unwrap()
            .permute_interpretations(&cols)
            .unwrap();
        for l in [0.2, 1.0, 5.0] {
            let a = measures(&s.source, lambda(l), &s.channel).unwrap();
            let b = measures(&source, lambda(l), &channel).unwrap();
            assert_abs_diff_eq!(a.breadth.get(), b.breadth.get(), epsilon = 1e-12);
            assert_abs_diff_eq!(
                a.decipherability.get(),
                b.decipherability.get(),
                epsilon = 1e-12
            );
            assert_abs_diff_eq!(
                a.residual_ambiguity.get(),
                b.residual_ambiguity.get(),
                epsilon = 1e-12
            );
        }
    }
}

#[test]
fn sampled_pairs_converge_in_total_variation() {
    let s = builtin("tiered_default").unwrap();
    let l = lambda(1.5);
    let joint = joint_distribution(&message_distribution(&s.source, l), &s.channel).unwrap();
    let mut sampler = ScenarioSampler::new(s.source.clone(), s.channel.clone(), 5).unwrap();
    let table = sampler.sample_table(l, 100_000).unwrap();
    let n = table.total() as f64;
    let tv: f64 = table
        .counts()
        .iter()
        .zip(joint.as_slice())
        .map(|(&c, &p)| (c as f64 / n - p).abs())
        .sum::<f64>()
        / 2.0;
    assert!(tv < 0.02, "total variation {tv}");
}

#[test]
fn plugin_error_shrinks_with_sample_size() {
    let s = builtin("bsc025").unwrap();
    let l = lambda(1.0);
    let truth = measures(&s.source, l, &s.channel)
        .unwrap()
        .decipherability
        .get();
    let mean_error = |n: usize| {
        (0..20u64)
            .map(|seed| {
                let mut sampler =
                    ScenarioSampler::new(s.source.clone(), s.channel.clone(), 400 + seed).unwrap();
                let t = sampler.sample_table(l, n).unwrap();
                (Estimator::new(Method::Plugin).mutual_information(&t).get() - truth).abs()
            })
            .sum::<f64>()
            / 20.0
    };
    let errors: Vec<f64> = [1_000, 10_000, 100_000]
        .into_iter()
        .map(mean_error)
        .collect();
    assert!(errors[0] > errors[1] && errors[1] > errors[2], "{errors:?}");
}

#[test]
fn empirical_profile_tracks_analytic_curve() {
    let s = builtin("tiered_default").unwrap();
    let grid = log_grid(0.1, 10.0, 8).unwrap();
    let mut records = Vec::new();
    for (k, &l) in grid.iter().enumerate() {
        records.extend(
            sample_interactions(&s.source, lambda(l), &s.channel, 100_000, 900 + k as u64).unwrap(),
        );
    }
    let tables = semioscope_core::estimation::tabulate(&records).unwrap();
    let empirical = empirical_profile(&tables, Method::Plugin, None).unwrap();
    let analytic = profile(&s.source, &s.channel, &grid).unwrap();
    for (e, a) in empirical.points().iter().zip(analytic.points()) {
        assert_eq!(e.lambda, a.lambda);
        assert_abs_diff_eq!(e.breadth_bits.get(), a.breadth_bits.get(), epsilon = 0.02);
        assert_abs_diff_eq!(
            e.decipherability_bits.get(),
            a.decipherability_bits.get(),
            epsilon = 0.02
        );
    }
}

#[test]
fn capacity_beats_every_coarse_point() {
    for k in 0..10 {
        let s = reference_scenario(
            ScenarioKind::Random {
                messages: 9,
                interpretations: 6,
            },
            50 + k,
        )
        .unwrap();
        let cap = lambda_opt(&s.source, &s.channel, (0.05, 20.0), 33, 1e-6).unwrap();
        for p in profile(&s.source, &s.channel, &log_grid(0.05, 20.0, 33).unwrap())
            .unwrap()
            .points()
        {
            assert!(cap.capacity_bits.get() >= p.decipherability_bits.get() - 1e-12);
        }
    }
}

#[test]
fn blahut_arimoto_ignores_row_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for k in 0..10 {
        let s = reference_scenario(
            ScenarioKind::Random {
                messages: 6,
                interpretations: 4,
            },
            700 + k,
        )
        .unwrap();
        let mut order: Vec<usize> = (0..6).collect();
        order.shuffle(&mut rng);
        let shuffled = s.channel.permute_messages(&order).unwrap();
        let a = blahut_arimoto(&s.channel, 1e-10, 100_000).unwrap();
        let b = blahut_arimoto(&shuffled, 1e-10, 100_000).unwrap();
        assert_abs_diff_eq!(a.capacity_bits.get(), b.capacity_bits.get(), epsilon = 1e-9);
    }
}

#[test]
fn identity_tables_estimate_decipherability_as_breadth() {
    let s = builtin("identity4").unwrap();
    let mut records = Vec::new();
    for (k, l) in [0.3, 1.0, 3.0, 10.0].into_iter().enumerate() {
        records.extend(
            sample_interactions(&s.source, lambda(l), &s.channel, 20_000, 60 + k as u64).unwrap(),
        );
    }
    let tables = semioscope_core::estimation::tabulate(&records).unwrap();
    let curve = empirical_profile(&tables, Method::Plugin, None).unwrap();
    for p in curve.points() {
        assert_abs_diff_eq!(
            p.decipherability_bits.get(),
            p.breadth_bits.get(),
            epsilon = 1e-12
        );
    }
}

#[test]
fn estimated_decipherability_stays_below_breadth() {
    for name in [
        "tiered_default",
        "bsc025",
        "bsc011",
        "constant4",
        "identity4",
    ] {
        let s = builtin(name).unwrap();
        let mut sampler = ScenarioSampler::new(s.source.clone(), s.channel.clone(), 3).unwrap();
        for l in [0.2, 1.0, 5.0] {
            let t = sampler.sample_table(lambda(l), 100_000).unwrap();
            for method in [Method::Plugin, Method::MillerMadow] {
                let e = Estimator::new(method);
                let d = e.mutual_information(&t).get();
                let s_hat = e
                    .entropy(&t, semioscope_core::estimation::Axis::Message)
                    .get();
                assert!(d <= s_hat + 0.02, "{name} at {l}: {d} > {s_hat}");
            }
        }
    }
}
