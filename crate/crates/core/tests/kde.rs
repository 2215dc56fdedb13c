use eigenhist::estimator::EmpiricalPmf;
use eigenhist::kde::{kde_estimate, scott_bandwidth};
use eigenhist::synthetic::Catalog;
use eigenhist::estimate_auto;
use eigenhist_testkit::{l1, rng, untruncated_gaussian_grid};
use proptest::prelude::*;
use rand::Rng;

fn argmax(q: &[f64]) -> usize {
    q.iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap()
        .0
}

#[test]
fn truncation_is_negligible() {
    let mut r = rng(6);
    for _ in 0..10 {
        let samples: Vec<i64> = (0..r.gen_range(2..40)).map(|_| r.gen_range(0..150)).collect();
        let est = kde_estimate(&samples, Some(200)).unwrap();
        let raw: Vec<u64> = samples.iter().map(|&x| x as u64).collect();
        let reference = untruncated_gaussian_grid(&raw, 200, est.bandwidth);
        assert!(l1(&est.q, &reference) < 1e-12);
    }
}

#[test]
fn bell_kde_beats_empirical() {
    let catalog = Catalog::builtin();
    let spec = catalog.get("bell").unwrap();
    let truth = spec.pmf().unwrap();
    let trials = 50;
    let mut wins = 0;
    for seed in 0..trials {
        let batch = spec.sample(5000, seed).unwrap();
        let pmf = EmpiricalPmf::from_samples(&batch.values, Some(spec.support_size)).unwrap();
        let est = kde_estimate(&batch.values, Some(spec.support_size)).unwrap();
        if l1(&est.q, &truth) < l1(pmf.frequencies(), &truth) {
            wins += 1;
        }
    }
    assert!(wins * 2 > trials, "kde won {wins}/{trials}");
}

#[test]
fn spectral_beats_kde_on_spiky_mixture() {
    let catalog = Catalog::builtin();
    let spec = catalog.get("zipf-mixture-3").unwrap();
    let truth = spec.pmf().unwrap();
    let trials = 50;
    let mut wins = 0;
    for seed in 0..trials {
        let batch = spec.sample(500, seed).unwrap();
        let kde = kde_estimate(&batch.values, Some(spec.support_size)).unwrap();
        let spectral = estimate_auto(&batch.values, Some(spec.support_size)).unwrap();
        if l1(&spectral.q, &truth) < l1(&kde.q, &truth) {
            wins += 1;
        }
    }
    assert!(wins * 2 > trials, "spectral won {wins}/{trials}");
}

#[test]
fn bandwidth_follows_scott() {
    let samples = [1i64, 4, 4, 9, 12];
    let pmf = EmpiricalPmf::from_samples(&samples, None).unwrap();
    let mean = 30.0 / 5.0;
    let var = samples.iter().map(|&x| (x as f64 - mean).powi(2)).sum::<f64>() / 4.0;
    let expected = var.sqrt() * 5f64.powf(-0.2);
    assert!((scott_bandwidth(&pmf) - expected).abs() < 1e-14);
}

proptest! {
    #[test]
    fn normalized_and_shift_equivariant(
        base in prop::collection::vec(0i64..60, 1..80),
        shift in 0i64..100,
    ) {
        let support = 300;
        let a = kde_estimate(&base, Some(support)).unwrap();
        prop_assert!(a.q.iter().all(|&x| x >= 0.0));
        prop_assert!((a.q.iter().sum::<f64>() - 1.0).abs() <= 1e-12);

        let shifted: Vec<i64> = base.iter().map(|x| x + shift).collect();
        let b = kde_estimate(&shifted, Some(support)).unwrap();
        prop_assert_eq!(argmax(&b.q), argmax(&a.q) + shift as usize);
    }
}
