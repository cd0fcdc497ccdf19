use std::sync::Arc;

use qsel::features::{FeatureVector, K};
use qsel::gbdt::GbdtModel;
use qsel::guidance::{AdmissionGate, Threshold};
use qsel::term::TermId;

const GOLDEN: &str = include_str!("golden/admission.txt");

fn gate(p: f64, seed: u64, problem: &str) -> AdmissionGate {
    let mut m = GbdtModel::constant(p);
    if p == 0.5 {
        m.base_score = 0.0;
    }
    AdmissionGate::new(Some(Arc::new(m)), Threshold::Random, seed, problem, "s")
}

fn count_admits(g: &mut AdmissionGate, n: usize) -> usize {
    let z = FeatureVector::zeros(K);
    (0..n).filter(|i| g.admit(TermId((i % 7) as u32), &z, &z)).count()
}

fn golden(key: &str) -> usize {
    GOLDEN
        .lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(' ')))
        .unwrap_or_else(|| panic!("no golden entry {key}"))
        .trim()
        .parse()
        .unwrap()
}

#[test]
fn half_score_admits_about_half() {
    let mut g = gate(0.5, 0, "golden");
    let admits = count_admits(&mut g, 10_000);
    assert!((4800..=5200).contains(&admits), "{admits}");
    assert_eq!(g.stats().draws, 10_000);
    assert_eq!(g.stats().predictions, 7);
    assert_eq!(admits, golden("half-seed0"));
    assert_eq!(count_admits(&mut gate(0.5, 1, "golden"), 10_000), golden("half-seed1"));
}

#[test]
fn tiny_score_is_still_admitted_sometimes() {
    let mut g = gate(1e-4, 0, "golden");
    let admits = count_admits(&mut g, 100_000);
    assert!(admits >= 1);
    assert_eq!(admits, golden("tiny-seed0"));
}

#[test]
fn streams_depend_on_problem_and_seed() {
    let a = count_admits(&mut gate(0.5, 3, "a"), 2000);
    assert_eq!(a, count_admits(&mut gate(0.5, 3, "a"), 2000));
    let draws = |seed, problem| {
        let mut g = gate(0.5, seed, problem);
        let z = FeatureVector::zeros(K);
        (0..64).map(|_| g.admit(TermId(0), &z, &z)).collect::<Vec<bool>>()
    };
    assert_ne!(draws(3, "a"), draws(3, "b"));
    assert_ne!(draws(3, "a"), draws(4, "a"));
}

#[test]
fn fixed_threshold_and_open_gate() {
    let z = FeatureVector::zeros(K);
    let m = Arc::new(GbdtModel::constant(0.7));
    let mut g = AdmissionGate::new(Some(m.clone()), Threshold::Fixed(0.5), 0, "p", "s");
    assert!((0..100).all(|i| g.admit(TermId(i), &z, &z)));
    assert_eq!(g.stats().draws, 0);
    let mut g = AdmissionGate::new(Some(m), Threshold::Fixed(0.8), 0, "p", "s");
    assert!((0..100).all(|i| !g.admit(TermId(i), &z, &z)));
    let mut open = AdmissionGate::open();
    assert!((0..100).all(|i| open.admit(TermId(i), &z, &z)));
    assert_eq!((open.stats().draws, open.stats().predictions), (0, 0));
}
