//! Bag-of-kinds features.
//!
//! Layout (v1): a formula vector has width `K = Kind::COUNT`; entry `i` is
//! the number of occurrences of the kind with index `i` in the formula tree.
//! The model input is the context vector of the problem at `[0, K)` followed
//! by the quantifier vector at `[K, 2K)`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::frontend::Problem;
use crate::term::{Kind, TermId, TermStore};

/// Width of a single formula vector.
pub const K: usize = Kind::COUNT;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FeatureError {
    #[error("feature vector width mismatch: expected {expected}, found {found}")]
    WidthMismatch { expected: usize, found: usize },
}

/// Sparse non-negative count vector. Stored entries are always non-zero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct FeatureVector {
    width: usize,
    entries: BTreeMap<usize, u32>,
}

impl fmt::Debug for FeatureVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FeatureVector[{}]{:?}", self.width, self.entries)
    }
}

impl FeatureVector {
    pub fn zeros(width: usize) -> Self {
        FeatureVector {
            width,
            entries: BTreeMap::new(),
        }
    }

    /// Builds a vector from `(index, count)` pairs; zero counts are dropped
    /// and repeated indices summed.
    pub fn from_entries(width: usize, entries: impl IntoIterator<Item = (usize, u32)>) -> Result<Self, FeatureError> {
        let mut v = FeatureVector::zeros(width);
        for (i, c) in entries {
            if i >= width {
                return Err(FeatureError::WidthMismatch {
                    expected: width,
                    found: i + 1,
                });
            }
            v.add(i, c);
        }
        Ok(v)
    }

    pub fn from_dense(counts: &[u32]) -> Self {
        let mut v = FeatureVector::zeros(counts.len());
        for (i, &c) in counts.iter().enumerate() {
            v.add(i, c);
        }
        v
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn get(&self, i: usize) -> u32 {
        self.entries.get(&i).copied().unwrap_or(0)
    }

    /// Adds `c` to entry `i`. Panics when `i` is out of range.
    pub fn add(&mut self, i: usize, c: u32) {
        assert!(i < self.width, "index {i} out of range for width {}", self.width);
        if c > 0 {
            *self.entries.entry(i).or_insert(0) += c;
        }
    }

    /// Non-zero entries in index order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.entries.iter().map(|(&i, &c)| (i, c))
    }

    pub fn total(&self) -> u64 {
        self.entries.values().map(|&c| c as u64).sum()
    }

    pub fn to_dense(&self) -> Vec<u32> {
        let mut d = vec![0; self.width];
        for (&i, &c) in &self.entries {
            d[i] = c;
        }
        d
    }

    /// Pointwise sum.
    pub fn add_vector(&mut self, other: &FeatureVector) -> Result<(), FeatureError> {
        if other.width != self.width {
            return Err(FeatureError::WidthMismatch {
                expected: self.width,
                found: other.width,
            });
        }
        for (i, c) in other.entries() {
            self.add(i, c);
        }
        Ok(())
    }
}

/// Context in `[0, K)`, quantifier in `[K, 2K)`.
pub fn concat_context(ctx: &FeatureVector, q: &FeatureVector) -> Result<FeatureVector, FeatureError> {
    for v in [ctx, q] {
        if v.width != K {
            return Err(FeatureError::WidthMismatch {
                expected: K,
                found: v.width,
            });
        }
    }
    let mut out = FeatureVector::zeros(2 * K);
    out.entries.extend(ctx.entries());
    out.entries.extend(q.entries().map(|(i, c)| (K + i, c)));
    Ok(out)
}

/// Memoising extractor; counts are per tree occurrence, so a shared subterm
/// contributes once for every position it occupies.
#[derive(Clone, Debug, Default)]
pub struct FeatureExtractor {
    memo: HashMap<TermId, [u32; K]>,
}

impl FeatureExtractor {
    pub fn new() -> Self {
        Self::default()
    }

    fn counts(&mut self, store: &TermStore, t: TermId) -> [u32; K] {
        if let Some(c) = self.memo.get(&t) {
            return *c;
        }
        let kind = store.kind(t);
        let children = store.children(t);
        let children = if matches!(kind, Kind::Forall | Kind::Exists) {
            &children[children.len() - 1..]
        } else {
            children
        };
        let mut acc = [0u32; K];
        acc[kind.index()] += 1;
        for &c in children {
            let sub = self.counts(store, c);
            for (a, s) in acc.iter_mut().zip(sub) {
                *a = a.saturating_add(s);
            }
        }
        self.memo.insert(t, acc);
        acc
    }

    pub fn formula_features(&mut self, store: &TermStore, t: TermId) -> FeatureVector {
        FeatureVector::from_dense(&self.counts(store, t))
    }

    /// Sum of the features of every asserted formula.
    pub fn problem_features(&mut self, store: &TermStore, p: &Problem) -> FeatureVector {
        let mut acc = [0u32; K];
        for &t in &p.asserted {
            for (a, s) in acc.iter_mut().zip(self.counts(store, t)) {
                *a = a.saturating_add(s);
            }
        }
        FeatureVector::from_dense(&acc)
    }
}

pub fn formula_features(store: &TermStore, t: TermId) -> FeatureVector {
    FeatureExtractor::new().formula_features(store, t)
}

pub fn problem_features(store: &TermStore, p: &Problem) -> FeatureVector {
    FeatureExtractor::new().problem_features(store, p)
}
