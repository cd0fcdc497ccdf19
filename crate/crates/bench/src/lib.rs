//! Shared inputs for the criterion benchmarks in `benches/`.

use std::time::Duration;

use qsel::gbdt::{hyperparameter_grid, train, GbdtModel, TrainingSet};
use qsel::harness::{builtin_strategies, collect_rows, gen_needle_corpus, CorpusProblem, Strategy};

pub const LEMMA_BUDGET: u64 = 60;

/// Needle problems with `m` distractors each.
pub fn needles(n: usize, m: usize, seed: u64) -> Vec<CorpusProblem> {
    gen_needle_corpus(n, m, seed).into_iter().map(|(p, _)| p).collect()
}

/// The e-matching strategy with a small lemma budget.
pub fn ematch_strategy() -> Strategy {
    let mut s = builtin_strategies().into_iter().find(|s| s.name == "ematch").unwrap();
    s.config.max_lemmas = LEMMA_BUDGET;
    s
}

/// Labelled rows from unguided refutations of `problems`.
pub fn training_set(problems: &[CorpusProblem]) -> TrainingSet {
    let rows = collect_rows(&ematch_strategy(), problems, Duration::from_secs(60)).unwrap();
    TrainingSet { rows }
}

/// A model from the first grid point.
pub fn model(data: &TrainingSet) -> GbdtModel {
    train(data, &hyperparameter_grid(0)[0]).unwrap()
}
