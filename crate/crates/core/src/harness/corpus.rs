use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::HarnessError;

/// A problem in SMT-LIB text form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusProblem {
    pub name: String,
    pub text: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusSplit {
    pub train: Vec<String>,
    pub dev: Vec<String>,
    pub holdout: Vec<String>,
}

pub const MIN_SPLIT_SIZE: usize = 20;

/// Seeded 90:5:5 split with sizes `floor(0.9n)`, `ceil(0.05n)` and the rest.
pub fn split_corpus(ids: &[String], seed: u64) -> Result<CorpusSplit, HarnessError> {
    let n = ids.len();
    if n < MIN_SPLIT_SIZE {
        return Err(HarnessError::TooSmall { n, min: MIN_SPLIT_SIZE });
    }
    let mut ids = ids.to_vec();
    ids.sort();
    ids.dedup();
    if ids.len() != n {
        return Err(HarnessError::Config("problem ids are not unique".into()));
    }
    ids.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_train = n * 9 / 10;
    let n_dev = n.div_ceil(20);
    let holdout = ids.split_off(n_train + n_dev);
    let dev = ids.split_off(n_train);
    Ok(CorpusSplit {
        train: ids,
        dev,
        holdout,
    })
}

/// Reads every `*.smt2` file of a directory, sorted by file name. The
/// problem name is the file stem.
pub fn read_corpus_dir(dir: &Path) -> Result<Vec<CorpusProblem>, HarnessError> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "smt2"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            Ok(CorpusProblem {
                name: p.file_stem().unwrap().to_string_lossy().into_owned(),
                text: std::fs::read_to_string(&p)?,
            })
        })
        .collect()
}

pub fn write_corpus_dir(dir: &Path, problems: &[CorpusProblem]) -> Result<(), HarnessError> {
    std::fs::create_dir_all(dir)?;
    for p in problems {
        std::fs::write(dir.join(format!("{}.smt2", p.name)), &p.text)?;
    }
    Ok(())
}

/// Metadata of a generated needle problem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeedleInfo {
    pub depth: usize,
    pub needles: usize,
    pub distractors: usize,
}

pub const MAX_NEEDLE_DEPTH: usize = 6;

/// Shape of a distractor quantifier over the distractor sort `B`.
#[derive(Clone, Copy, Debug)]
enum Distractor {
    /// forall y. S(y) => S(h(h(y)))
    Double,
    /// forall y. S(y) => S(k(y, y))
    Diagonal,
    /// forall y z. S(y) & S(z) => S(k(y, z))
    Pairing,
    /// forall y. S(y) => S(h(y)) | T(h(h(y)))
    Branching,
}

const DISTRACTORS: [Distractor; 4] = [
    Distractor::Double,
    Distractor::Diagonal,
    Distractor::Pairing,
    Distractor::Branching,
];

fn nest(f: &str, depth: usize, inner: &str) -> String {
    let mut s = inner.to_string();
    for _ in 0..depth {
        s = format!("({f} {s})");
    }
    s
}

/// Generates `n` problems, each refutable through a chain of one or two
/// needle quantifiers over sort `A`, plus `m` distractors over an unrelated
/// sort `B` that keep producing new terms.
pub fn gen_needle_corpus(n: usize, m: usize, seed: u64) -> Vec<(CorpusProblem, NeedleInfo)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = n.max(1).to_string().len();
    (0..n)
        .map(|i| {
            let depth = rng.random_range(1..=MAX_NEEDLE_DEPTH);
            let two = rng.random_bool(0.5);
            let name = format!("needle-{i:0width$}");
            let (text, needles) = needle_problem(&mut rng, depth, two, m);
            (
                CorpusProblem { name, text },
                NeedleInfo {
                    depth,
                    needles,
                    distractors: m,
                },
            )
        })
        .collect()
}

fn needle_problem(rng: &mut ChaCha8Rng, depth: usize, two: bool, m: usize) -> (String, usize) {
    let mut quants: Vec<String> = Vec::new();
    let p = format!("p{}", rng.random_range(0..100));
    let q = format!("q{}", rng.random_range(0..100));
    let g = format!("g{}", rng.random_range(0..100));
    if two {
        quants.push(format!("(forall ((x A)) (=> ({p} x) ({q} ({g} x))))"));
        quants.push(format!("(forall ((x A)) (=> ({q} x) ({p} x)))"));
    } else {
        quants.push(format!("(forall ((x A)) (=> ({p} x) ({p} ({g} x))))"));
    }
    let needles = quants.len();

    // Predicates are shared between distractors, functions are not, so no two
    // distractors coincide.
    let n_preds = rng.random_range(1..=3);
    let mut shapes = Vec::with_capacity(m);
    for j in 0..m {
        let s = format!("s{}", rng.random_range(0..n_preds));
        let t = format!("t{}", rng.random_range(0..n_preds));
        let (h, k) = (format!("h{j}"), format!("k{j}"));
        let shape = DISTRACTORS[rng.random_range(0..DISTRACTORS.len())];
        shapes.push(shape);
        quants.push(match shape {
            Distractor::Double => format!("(forall ((y B)) (=> ({s} y) ({s} ({h} ({h} y)))))"),
            Distractor::Diagonal => format!("(forall ((y B)) (=> ({s} y) ({s} ({k} y y))))"),
            Distractor::Pairing => format!("(forall ((y B) (z B)) (=> (and ({s} y) ({s} z)) ({s} ({k} y z))))"),
            Distractor::Branching => format!("(forall ((y B)) (=> ({s} y) (or ({s} ({h} y)) ({t} ({h} ({h} y))))))"),
        });
    }
    quants.shuffle(rng);

    let mut out = String::new();
    out.push_str("(set-logic UF)\n(declare-sort A 0)\n(declare-sort B 0)\n");
    writeln!(out, "(declare-fun {p} (A) Bool)").unwrap();
    if two {
        writeln!(out, "(declare-fun {q} (A) Bool)").unwrap();
    }
    writeln!(out, "(declare-fun {g} (A) A)").unwrap();
    out.push_str("(declare-const c A)\n(declare-const e B)\n");
    for i in 0..n_preds {
        writeln!(out, "(declare-fun s{i} (B) Bool)\n(declare-fun t{i} (B) Bool)").unwrap();
    }
    for (j, shape) in shapes.iter().enumerate() {
        match shape {
            Distractor::Double | Distractor::Branching => writeln!(out, "(declare-fun h{j} (B) B)").unwrap(),
            Distractor::Diagonal | Distractor::Pairing => writeln!(out, "(declare-fun k{j} (B B) B)").unwrap(),
        }
    }
    writeln!(out, "(assert ({p} c))").unwrap();
    for i in 0..n_preds {
        writeln!(out, "(assert (s{i} e))").unwrap();
    }
    for qt in &quants {
        writeln!(out, "(assert {qt})").unwrap();
    }
    writeln!(out, "(assert (not ({p} {})))", nest(&g, depth, "c")).unwrap();
    out.push_str("(check-sat)\n");
    (out, needles)
}
