//! Gradient-boosted regression trees for binary classification.
//!
//! Trees are grown leaf-wise with exact splits of the form `x[f] <= θ`, where
//! `θ` ranges over the values present in the data. Leaf values are a single
//! Newton step on the binary log-loss with L2 term [`LAMBDA`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::features::{FeatureVector, K};
use crate::term::Kind;

pub const LAMBDA: f64 = 1e-3;
const HEADER: &str = "QGBDT v1";
const MAX_HALVINGS: u32 = 40;

#[derive(Debug, Error)]
pub enum GbdtError {
    #[error("training set is empty")]
    EmptyData,
    #[error("feature vector width mismatch: expected {expected}, found {found}")]
    WidthMismatch { expected: usize, found: usize },
    #[error("model format error at line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("model was built for a different kind table (file K={file_k} checksum={file_sum:016x}, expected K={k} checksum={sum:016x})")]
    KindChecksumMismatch {
        file_k: usize,
        file_sum: u64,
        k: usize,
        sum: u64,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hyperparams {
    pub num_trees: usize,
    pub max_leaves: usize,
    pub min_samples_leaf: usize,
    pub learning_rate: f64,
    /// Fraction of features considered per tree.
    pub feature_subsample: f64,
    pub seed: u64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            num_trees: 100,
            max_leaves: 31,
            min_samples_leaf: 5,
            learning_rate: 0.1,
            feature_subsample: 1.0,
            seed: 0,
        }
    }
}

/// Candidate settings for model selection.
pub fn hyperparameter_grid(seed: u64) -> Vec<Hyperparams> {
    let mut out = Vec::new();
    for num_trees in [50, 100, 200] {
        for max_leaves in [31, 255, 1600] {
            for learning_rate in [0.1, 0.3] {
                out.push(Hyperparams {
                    num_trees,
                    max_leaves,
                    learning_rate,
                    seed,
                    ..Hyperparams::default()
                });
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainingRow {
    pub features: FeatureVector,
    pub label: bool,
    pub problem: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainingSet {
    pub rows: Vec<TrainingRow>,
}

impl TrainingSet {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn num_positive(&self) -> usize {
        self.rows.iter().filter(|r| r.label).count()
    }

    pub fn problems(&self) -> BTreeSet<&str> {
        self.rows.iter().map(|r| r.problem.as_str()).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Split {
        feature: usize,
        threshold: u32,
        left: usize,
        right: usize,
        gain: f64,
    },
    Leaf {
        value: f64,
    },
}

/// Binary tree stored as a node array rooted at index 0; children always
/// have larger indices than their parent.
#[derive(Clone, Debug, PartialEq)]
pub struct RegressionTree {
    pub nodes: Vec<Node>,
}

impl RegressionTree {
    pub fn leaf(value: f64) -> Self {
        RegressionTree {
            nodes: vec![Node::Leaf { value }],
        }
    }

    /// Index of the leaf reached by `x`.
    pub fn leaf_index(&self, x: &[u32]) -> usize {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { .. } => return i,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => i = if x[feature] <= threshold { left } else { right },
            }
        }
    }

    pub fn value(&self, x: &[u32]) -> f64 {
        match self.nodes[self.leaf_index(x)] {
            Node::Leaf { value } => value,
            Node::Split { .. } => unreachable!(),
        }
    }

    pub fn num_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }

    pub fn num_splits(&self) -> usize {
        self.nodes.len() - self.num_leaves()
    }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Binary log-loss of raw score `s` against `label`.
pub fn logloss(s: f64, label: bool) -> f64 {
    let softplus = if s > 0.0 {
        s + (-s).exp().ln_1p()
    } else {
        s.exp().ln_1p()
    };
    softplus - if label { s } else { 0.0 }
}

/// First and second derivative of [`logloss`] with respect to the score.
pub fn logloss_gradient(s: f64, label: bool) -> (f64, f64) {
    let p = sigmoid(s);
    (p - if label { 1.0 } else { 0.0 }, p * (1.0 - p))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FeatureImportance {
    pub feature: usize,
    pub splits: usize,
    pub gain: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GbdtModel {
    pub num_kinds: usize,
    pub base_score: f64,
    pub learning_rate: f64,
    pub trees: Vec<RegressionTree>,
    pub hyper: Hyperparams,
}

impl GbdtModel {
    /// Model without trees predicting `p` everywhere.
    pub fn constant(p: f64) -> Self {
        let p = p.clamp(1e-6, 1.0 - 1e-6);
        GbdtModel {
            num_kinds: K,
            base_score: (p / (1.0 - p)).ln(),
            learning_rate: 1.0,
            trees: Vec::new(),
            hyper: Hyperparams {
                num_trees: 0,
                ..Hyperparams::default()
            },
        }
    }

    pub fn width(&self) -> usize {
        2 * self.num_kinds
    }

    /// Raw score using only the first `n` trees.
    pub fn raw_score_prefix(&self, x: &[u32], n: usize) -> f64 {
        let sum: f64 = self.trees[..n.min(self.trees.len())].iter().map(|t| t.value(x)).sum();
        self.base_score + self.learning_rate * sum
    }

    pub fn raw_score(&self, x: &[u32]) -> f64 {
        self.raw_score_prefix(x, self.trees.len())
    }

    pub fn predict_dense(&self, x: &[u32]) -> f64 {
        sigmoid(self.raw_score(x))
    }

    pub fn predict(&self, v: &FeatureVector) -> Result<f64, GbdtError> {
        if v.width() != self.width() {
            return Err(GbdtError::WidthMismatch {
                expected: self.width(),
                found: v.width(),
            });
        }
        Ok(self.predict_dense(&v.to_dense()))
    }

    /// Features ranked by total split gain, descending.
    pub fn importance(&self) -> Vec<FeatureImportance> {
        let mut acc: BTreeMap<usize, (usize, f64)> = BTreeMap::new();
        for t in &self.trees {
            for n in &t.nodes {
                if let Node::Split { feature, gain, .. } = *n {
                    let e = acc.entry(feature).or_insert((0, 0.0));
                    e.0 += 1;
                    e.1 += gain;
                }
            }
        }
        let mut out: Vec<FeatureImportance> = acc
            .into_iter()
            .map(|(feature, (splits, gain))| FeatureImportance { feature, splits, gain })
            .collect();
        out.sort_by(|a, b| b.gain.total_cmp(&a.gain).then(a.feature.cmp(&b.feature)));
        out
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let h = &self.hyper;
        writeln!(
            s,
            "{HEADER} K={} checksum={:016x}",
            self.num_kinds,
            Kind::table_checksum()
        )
        .unwrap();
        writeln!(s, "base_score {:.16e}", self.base_score).unwrap();
        writeln!(s, "learning_rate {:.16e}", self.learning_rate).unwrap();
        writeln!(
            s,
            "hyper {} {} {} {:.16e} {:.16e} {}",
            h.num_trees, h.max_leaves, h.min_samples_leaf, h.learning_rate, h.feature_subsample, h.seed
        )
        .unwrap();
        writeln!(s, "trees {}", self.trees.len()).unwrap();
        for t in &self.trees {
            writeln!(s, "tree {}", t.nodes.len()).unwrap();
            for n in &t.nodes {
                match *n {
                    Node::Split {
                        feature,
                        threshold,
                        left,
                        right,
                        gain,
                    } => writeln!(s, "split {feature} {threshold} {left} {right} {gain:.16e}").unwrap(),
                    Node::Leaf { value } => writeln!(s, "leaf {value:.16e}").unwrap(),
                }
            }
        }
        s.push_str("end\n");
        s
    }

    pub fn from_text(text: &str) -> Result<GbdtModel, GbdtError> {
        Parser::new(text).model()
    }

    pub fn save(&self, path: &Path) -> Result<(), GbdtError> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<GbdtModel, GbdtError> {
        GbdtModel::from_text(&std::fs::read_to_string(path)?)
    }
}

struct Parser<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            lines: text.lines().enumerate(),
            line: 0,
        }
    }

    fn err(&self, msg: impl Into<String>) -> GbdtError {
        GbdtError::Format {
            line: self.line,
            msg: msg.into(),
        }
    }

    fn next_fields(&mut self, keyword: &str) -> Result<Vec<&'a str>, GbdtError> {
        let Some((i, l)) = self.lines.next() else {
            self.line += 1;
            return Err(self.err(format!("unexpected end of file, expected `{keyword}`")));
        };
        self.line = i + 1;
        let mut it = l.split_whitespace();
        if it.next() != Some(keyword) {
            return Err(self.err(format!("expected `{keyword}`")));
        }
        Ok(it.collect())
    }

    fn num<T: std::str::FromStr>(&self, s: Option<&&str>) -> Result<T, GbdtError> {
        s.and_then(|s| s.parse().ok())
            .ok_or_else(|| self.err("malformed number"))
    }

    fn finite(&self, s: Option<&&str>) -> Result<f64, GbdtError> {
        let v: f64 = self.num(s)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(self.err("non-finite value"))
        }
    }

    fn model(mut self) -> Result<GbdtModel, GbdtError> {
        let head = self.next_fields("QGBDT")?;
        if head.len() != 3 || head[0] != "v1" {
            return Err(self.err("expected header `QGBDT v1 K=<int> checksum=<hex>`"));
        }
        let file_k: usize = head[1]
            .strip_prefix("K=")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| self.err("malformed K"))?;
        let file_sum = head[2]
            .strip_prefix("checksum=")
            .and_then(|v| u64::from_str_radix(v, 16).ok())
            .ok_or_else(|| self.err("malformed checksum"))?;
        if file_k != K || file_sum != Kind::table_checksum() {
            return Err(GbdtError::KindChecksumMismatch {
                file_k,
                file_sum,
                k: K,
                sum: Kind::table_checksum(),
            });
        }
        let f = self.next_fields("base_score")?;
        let base_score = self.finite(f.first())?;
        let f = self.next_fields("learning_rate")?;
        let learning_rate = self.finite(f.first())?;
        let f = self.next_fields("hyper")?;
        if f.len() != 6 {
            return Err(self.err("expected six hyperparameters"));
        }
        let hyper = Hyperparams {
            num_trees: self.num(f.first())?,
            max_leaves: self.num(f.get(1))?,
            min_samples_leaf: self.num(f.get(2))?,
            learning_rate: self.finite(f.get(3))?,
            feature_subsample: self.finite(f.get(4))?,
            seed: self.num(f.get(5))?,
        };
        let f = self.next_fields("trees")?;
        let n: usize = self.num(f.first())?;
        let mut trees = Vec::with_capacity(n.min(1 << 16));
        for _ in 0..n {
            let f = self.next_fields("tree")?;
            let m: usize = self.num(f.first())?;
            if m == 0 {
                return Err(self.err("empty tree"));
            }
            let mut nodes = Vec::with_capacity(m.min(1 << 16));
            for i in 0..m {
                let Some((li, l)) = self.lines.next() else {
                    self.line += 1;
                    return Err(self.err("unexpected end of file inside a tree"));
                };
                self.line = li + 1;
                let f: Vec<&str> = l.split_whitespace().collect();
                let node = match f.first().copied() {
                    Some("leaf") if f.len() == 2 => Node::Leaf {
                        value: self.finite(f.get(1))?,
                    },
                    Some("split") if f.len() == 6 => {
                        let feature: usize = self.num(f.get(1))?;
                        let left: usize = self.num(f.get(3))?;
                        let right: usize = self.num(f.get(4))?;
                        if feature >= 2 * K {
                            return Err(self.err("feature index out of range"));
                        }
                        if left <= i || right <= i || left >= m || right >= m || left == right {
                            return Err(self.err("invalid child index"));
                        }
                        Node::Split {
                            feature,
                            threshold: self.num(f.get(2))?,
                            left,
                            right,
                            gain: self.finite(f.get(5))?,
                        }
                    }
                    _ => return Err(self.err("expected `leaf <value>` or `split <f> <θ> <l> <r> <gain>`")),
                };
                nodes.push(node);
            }
            trees.push(RegressionTree { nodes });
        }
        self.next_fields("end")?;
        Ok(GbdtModel {
            num_kinds: file_k,
            base_score,
            learning_rate,
            trees,
            hyper,
        })
    }
}

/// Column-major view of the training data with per-feature value bins.
struct Columns {
    /// Sorted distinct values per feature.
    values: Vec<Vec<u32>>,
    /// `bins[f][r]`: index of row `r`'s value in `values[f]`.
    bins: Vec<Vec<u32>>,
}

impl Columns {
    fn new(rows: &[Vec<u32>], width: usize) -> Self {
        let mut values = Vec::with_capacity(width);
        let mut bins = Vec::with_capacity(width);
        for f in 0..width {
            let mut vals: Vec<u32> = rows.iter().map(|r| r[f]).collect();
            vals.sort_unstable();
            vals.dedup();
            let b = rows.iter().map(|r| vals.binary_search(&r[f]).unwrap() as u32).collect();
            values.push(vals);
            bins.push(b);
        }
        Columns { values, bins }
    }
}

#[derive(Clone, Copy, Debug)]
struct SplitChoice {
    gain: f64,
    feature: usize,
    bin: usize,
}

pub(crate) fn split_gain(gl: f64, hl: f64, gr: f64, hr: f64) -> f64 {
    let (g, h) = (gl + gr, hl + hr);
    gl * gl / (hl + LAMBDA) + gr * gr / (hr + LAMBDA) - g * g / (h + LAMBDA)
}

fn best_split(
    cols: &Columns,
    features: &[usize],
    rows: &[usize],
    grad: &[(f64, f64)],
    min_leaf: usize,
) -> Option<SplitChoice> {
    let per_feature = |&f: &usize| -> Option<SplitChoice> {
        let nb = cols.values[f].len();
        if nb < 2 {
            return None;
        }
        let mut hist = vec![(0.0f64, 0.0f64, 0usize); nb];
        for &r in rows {
            let b = cols.bins[f][r] as usize;
            hist[b].0 += grad[r].0;
            hist[b].1 += grad[r].1;
            hist[b].2 += 1;
        }
        let (g, h) = hist.iter().fold((0.0, 0.0), |a, e| (a.0 + e.0, a.1 + e.1));
        let n = rows.len();
        let (mut gl, mut hl, mut nl) = (0.0, 0.0, 0usize);
        let mut best: Option<SplitChoice> = None;
        for (b, e) in hist.iter().enumerate().take(nb - 1) {
            gl += e.0;
            hl += e.1;
            nl += e.2;
            if e.2 == 0 || nl < min_leaf || n - nl < min_leaf {
                continue;
            }
            let gain = split_gain(gl, hl, g - gl, h - hl);
            if gain > best.map_or(0.0, |s| s.gain) {
                best = Some(SplitChoice {
                    gain,
                    feature: f,
                    bin: b,
                });
            }
        }
        best
    };
    let results: Vec<Option<SplitChoice>> = if rows.len() * features.len() >= 1 << 15 {
        features.par_iter().map(per_feature).collect()
    } else {
        features.iter().map(per_feature).collect()
    };
    results
        .into_iter()
        .flatten()
        .fold(None, |acc: Option<SplitChoice>, s| match acc {
            Some(a) if a.gain >= s.gain => Some(a),
            _ => Some(s),
        })
}

struct Growing {
    node: usize,
    rows: Vec<usize>,
    split: Option<SplitChoice>,
}

/// Grows one tree on the gradients; returns it with each row's leaf node.
fn grow_tree(
    cols: &Columns,
    features: &[usize],
    grad: &[(f64, f64)],
    hp: &Hyperparams,
) -> (RegressionTree, Vec<usize>) {
    let n = grad.len();
    let min_leaf = hp.min_samples_leaf.max(1);
    let all: Vec<usize> = (0..n).collect();
    let mut nodes = vec![Node::Leaf { value: 0.0 }];
    let split = best_split(cols, features, &all, grad, min_leaf);
    let mut leaves = vec![Growing {
        node: 0,
        rows: all,
        split,
    }];
    while leaves.len() < hp.max_leaves.max(1) {
        let pick = leaves
            .iter()
            .enumerate()
            .filter_map(|(i, l)| l.split.map(|s| (i, s.gain)))
            .fold(None, |acc: Option<(usize, f64)>, c| match acc {
                Some(a) if a.1 >= c.1 => Some(a),
                _ => Some(c),
            });
        let Some((li, _)) = pick else { break };
        let leaf = leaves.swap_remove(li);
        let s = leaf.split.unwrap();
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = leaf
            .rows
            .iter()
            .partition(|&&r| cols.bins[s.feature][r] as usize <= s.bin);
        let (l, r) = (nodes.len(), nodes.len() + 1);
        nodes.push(Node::Leaf { value: 0.0 });
        nodes.push(Node::Leaf { value: 0.0 });
        nodes[leaf.node] = Node::Split {
            feature: s.feature,
            threshold: cols.values[s.feature][s.bin],
            left: l,
            right: r,
            gain: s.gain,
        };
        for (node, rows) in [(l, left_rows), (r, right_rows)] {
            let split = best_split(cols, features, &rows, grad, min_leaf);
            leaves.push(Growing { node, rows, split });
        }
        // keep a stable order so ties go to the earliest-created leaf
        leaves.sort_by_key(|l| l.node);
    }
    let mut leaf_of = vec![0usize; n];
    for leaf in &leaves {
        let (g, h) = leaf
            .rows
            .iter()
            .fold((0.0, 0.0), |a, &r| (a.0 + grad[r].0, a.1 + grad[r].1));
        nodes[leaf.node] = Node::Leaf {
            value: -g / (h + LAMBDA),
        };
        for &r in &leaf.rows {
            leaf_of[r] = leaf.node;
        }
    }
    (RegressionTree { nodes }, leaf_of)
}

fn mean_loss(scores: &[f64], labels: &[bool]) -> f64 {
    scores.iter().zip(labels).map(|(&s, &y)| logloss(s, y)).sum::<f64>() / scores.len() as f64
}

pub fn train(data: &TrainingSet, hp: &Hyperparams) -> Result<GbdtModel, GbdtError> {
    train_with_history(data, hp).map(|(m, _)| m)
}

/// Trains a model and returns the mean training log-loss before the first
/// tree and after each tree.
pub fn train_with_history(data: &TrainingSet, hp: &Hyperparams) -> Result<(GbdtModel, Vec<f64>), GbdtError> {
    if data.is_empty() {
        return Err(GbdtError::EmptyData);
    }
    let width = 2 * K;
    for r in &data.rows {
        if r.features.width() != width {
            return Err(GbdtError::WidthMismatch {
                expected: width,
                found: r.features.width(),
            });
        }
    }
    let labels: Vec<bool> = data.rows.iter().map(|r| r.label).collect();
    let npos = labels.iter().filter(|&&y| y).count();
    let prior = npos as f64 / labels.len() as f64;
    if npos == 0 || npos == labels.len() {
        log::warn!("training data has a single class; returning a constant model at prior {prior}");
        let m = GbdtModel::constant(prior);
        let loss = mean_loss(&vec![m.base_score; labels.len()], &labels);
        return Ok((m, vec![loss]));
    }
    let dense: Vec<Vec<u32>> = data.rows.iter().map(|r| r.features.to_dense()).collect();
    let cols = Columns::new(&dense, width);
    let base_score = (prior / (1.0 - prior)).ln();
    let mut scores = vec![base_score; labels.len()];
    let mut history = vec![mean_loss(&scores, &labels)];
    let mut rng = ChaCha8Rng::seed_from_u64(hp.seed);
    let mut trees = Vec::with_capacity(hp.num_trees);
    let lr = hp.learning_rate;

    for _ in 0..hp.num_trees {
        let grad: Vec<(f64, f64)> = scores
            .iter()
            .zip(&labels)
            .map(|(&s, &y)| logloss_gradient(s, y))
            .collect();
        let features: Vec<usize> = if hp.feature_subsample < 1.0 {
            let k = ((hp.feature_subsample * width as f64).round() as usize).clamp(1, width);
            let mut f = sample(&mut rng, width, k).into_vec();
            f.sort_unstable();
            f
        } else {
            (0..width).collect()
        };
        let (mut tree, leaf_of) = grow_tree(&cols, &features, &grad, hp);
        let prev = *history.last().unwrap();

        // Step-halving keeps the training loss non-increasing.
        let value_of = |t: &RegressionTree, node: usize| match t.nodes[node] {
            Node::Leaf { value } => value,
            Node::Split { .. } => unreachable!(),
        };
        let mut eta = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial: Vec<f64> = scores
                .iter()
                .zip(&leaf_of)
                .map(|(&s, &node)| s + lr * eta * value_of(&tree, node))
                .collect();
            let loss = mean_loss(&trial, &labels);
            if loss <= prev {
                accepted = Some((trial, loss));
                break;
            }
            eta *= 0.5;
        }
        let (new_scores, loss) = accepted.unwrap_or_else(|| {
            eta = 0.0;
            (scores.clone(), prev)
        });
        if eta != 1.0 {
            for n in tree.nodes.iter_mut() {
                if let Node::Leaf { value } = n {
                    *value *= eta;
                }
            }
        }
        scores = new_scores;
        history.push(loss);
        trees.push(tree);
    }
    let model = GbdtModel {
        num_kinds: K,
        base_score,
        learning_rate: lr,
        trees,
        hyper: *hp,
    };
    Ok((model, history))
}

/// Confusion counts on a labelled set at threshold 0.5.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DevCounts {
    pub true_pos: u64,
    pub positives: u64,
    pub true_neg: u64,
    pub negatives: u64,
}

impl DevCounts {
    pub fn pos_accuracy(&self) -> f64 {
        if self.positives == 0 {
            0.0
        } else {
            self.true_pos as f64 / self.positives as f64
        }
    }

    pub fn neg_accuracy(&self) -> f64 {
        if self.negatives == 0 {
            0.0
        } else {
            self.true_neg as f64 / self.negatives as f64
        }
    }

    /// `2·pos + neg`, as a float.
    pub fn metric(&self) -> f64 {
        2.0 * self.pos_accuracy() + self.neg_accuracy()
    }

    /// `(2·pos + neg) · positives · negatives`, exact.
    fn scaled_metric(&self) -> u128 {
        let p = self.positives.max(1) as u128;
        let n = self.negatives.max(1) as u128;
        2 * self.true_pos as u128 * n + self.true_neg as u128 * p
    }
}

pub fn dev_counts(m: &GbdtModel, dev: &TrainingSet) -> DevCounts {
    let mut c = DevCounts::default();
    for r in &dev.rows {
        let yes = m.predict_dense(&r.features.to_dense()) >= 0.5;
        if r.label {
            c.positives += 1;
            c.true_pos += yes as u64;
        } else {
            c.negatives += 1;
            c.true_neg += !yes as u64;
        }
    }
    c
}

/// Index of the candidate maximising `2·pos + neg` on `dev`; ties go to
/// fewer trees, then to the earlier candidate.
pub fn select_model(candidates: &[GbdtModel], dev: &TrainingSet) -> usize {
    assert!(!candidates.is_empty(), "select_model needs at least one candidate");
    let scored: Vec<(u128, usize)> = candidates
        .iter()
        .map(|m| (dev_counts(m, dev).scaled_metric(), m.trees.len()))
        .collect();
    let mut best = 0;
    for (i, &(metric, trees)) in scored.iter().enumerate().skip(1) {
        let (bm, bt) = scored[best];
        if metric > bm || (metric == bm && trees < bt) {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(x: u32, label: bool) -> TrainingRow {
        TrainingRow {
            features: FeatureVector::from_entries(2 * K, [(3, x)]).unwrap(),
            label,
            problem: format!("p{x}"),
        }
    }

    #[test]
    fn empty_model_predicts_half() {
        let mut m = GbdtModel::constant(0.5);
        m.base_score = 0.0;
        assert_eq!(m.predict(&FeatureVector::zeros(2 * K)).unwrap(), 0.5);
        assert!(matches!(
            m.predict(&FeatureVector::zeros(K)),
            Err(GbdtError::WidthMismatch { .. })
        ));
    }

    #[test]
    fn separable_data_is_learned() {
        let data = TrainingSet {
            rows: (0..12).map(|x| row(x, x > 5)).collect(),
        };
        let hp = Hyperparams {
            num_trees: 10,
            min_samples_leaf: 1,
            ..Hyperparams::default()
        };
        let (m, hist) = train_with_history(&data, &hp).unwrap();
        for r in &data.rows {
            assert_eq!(m.predict(&r.features).unwrap() >= 0.5, r.label);
        }
        assert!(hist.windows(2).all(|w| w[1] <= w[0] + 1e-9));
        let imp = m.importance();
        assert_eq!(imp.len(), 1);
        assert_eq!(imp[0].feature, 3);
        match m.trees[0].nodes[0] {
            Node::Split { threshold, .. } => assert_eq!(threshold, 5),
            _ => panic!("expected a split"),
        }
    }

    #[test]
    fn single_class_gives_constant_model() {
        let data = TrainingSet {
            rows: (0..4).map(|x| row(x, true)).collect(),
        };
        let m = train(&data, &Hyperparams::default()).unwrap();
        assert!(m.trees.is_empty());
        assert!(m.predict(&FeatureVector::zeros(2 * K)).unwrap() > 0.9);
        assert!(m.importance().is_empty());
        assert!(matches!(
            train(&TrainingSet::default(), &Hyperparams::default()),
            Err(GbdtError::EmptyData)
        ));
    }

    #[test]
    fn text_round_trip_and_errors() {
        let data = TrainingSet {
            rows: (0..30).map(|x| row(x % 9, x % 9 > 3 && x % 2 == 0)).collect(),
        };
        let m = train(&data, &Hyperparams::default()).unwrap();
        let text = m.to_text();
        let back = GbdtModel::from_text(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_text(), text);

        let truncated: String = text.lines().take(8).map(|l| format!("{l}\n")).collect();
        assert!(matches!(
            GbdtModel::from_text(&truncated),
            Err(GbdtError::Format { .. })
        ));
        let sum = format!("checksum={:016x}", Kind::table_checksum());
        let other = format!("checksum={:016x}", Kind::table_checksum() ^ 1);
        let wrong = text.replacen(&sum, &other, 1);
        assert!(matches!(
            GbdtModel::from_text(&wrong),
            Err(GbdtError::KindChecksumMismatch { .. })
        ));
    }

    #[test]
    fn grid_shape() {
        let g = hyperparameter_grid(7);
        assert_eq!(g.len(), 18);
        assert!(g
            .iter()
            .any(|h| h.max_leaves == 1600 && h.num_trees == 200 && h.learning_rate == 0.3));
    }
}
