//! Quantifier admission gate and training-data generation.

use std::collections::{BTreeSet, HashMap};
use std::fs::OpenOptions;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::features::{concat_context, FeatureVector, K};
use crate::gbdt::{GbdtModel, TrainingRow, TrainingSet};
use crate::term::TermId;

#[derive(Debug, Error)]
pub enum GuidanceError {
    #[error("run did not end in unsat; no training data can be extracted")]
    NotUnsat,
    #[error("{path}:{line}: {msg}")]
    Format { path: PathBuf, line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// How a score is turned into an admission decision.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum Threshold {
    /// Admit when the score is at least a fresh uniform draw from `[0, 1)`.
    #[default]
    Random,
    /// Admit when the score is at least the given constant.
    Fixed(f64),
}

impl std::str::FromStr for Threshold {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "random" {
            return Ok(Threshold::Random);
        }
        match s.strip_prefix("fixed:").map(str::parse::<f64>) {
            Some(Ok(x)) if (0.0..=1.0).contains(&x) => Ok(Threshold::Fixed(x)),
            _ => Err(format!(
                "invalid threshold `{s}` (expected random or fixed:<x> with x in [0,1])"
            )),
        }
    }
}

impl std::fmt::Display for Threshold {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Threshold::Random => f.write_str("random"),
            Threshold::Fixed(x) => write!(f, "fixed:{x}"),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GateStats {
    pub queries: u64,
    pub admits: u64,
    pub predictions: u64,
    pub draws: u64,
}

/// 64-bit FNV-1a.
fn fnv1a(parts: &[&str]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for p in parts {
        for b in p.bytes().chain([0u8]) {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}

/// Decides, per query, whether an instantiation module may process a
/// quantifier.
#[derive(Clone, Debug)]
pub struct AdmissionGate {
    model: Option<Arc<GbdtModel>>,
    threshold: Threshold,
    rng: ChaCha8Rng,
    cache: HashMap<TermId, f64>,
    stats: GateStats,
}

impl AdmissionGate {
    /// Gate whose random stream is selected by `(problem, strategy)` within
    /// the seed, so runs stay reproducible regardless of scheduling.
    pub fn new(model: Option<Arc<GbdtModel>>, threshold: Threshold, seed: u64, problem: &str, strategy: &str) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(fnv1a(&[problem, strategy]));
        AdmissionGate {
            model,
            threshold,
            rng,
            cache: HashMap::new(),
            stats: GateStats::default(),
        }
    }

    /// Gate that admits everything.
    pub fn open() -> Self {
        AdmissionGate::new(None, Threshold::Random, 0, "", "")
    }

    pub fn has_model(&self) -> bool {
        self.model.is_some()
    }

    pub fn stats(&self) -> GateStats {
        self.stats
    }

    pub fn clear_cache(&mut self) {
        self.cache.clear();
    }

    /// Cached model score of quantifier `q`; `None` without a model.
    pub fn score(&mut self, q: TermId, ctx: &FeatureVector, phi_q: &FeatureVector) -> Option<f64> {
        let model = self.model.as_ref()?;
        if let Some(&s) = self.cache.get(&q) {
            return Some(s);
        }
        let v = concat_context(ctx, phi_q).expect("context and quantifier vectors have width K");
        let s = model.predict(&v).expect("model width is 2K");
        self.stats.predictions += 1;
        self.cache.insert(q, s);
        Some(s)
    }

    pub fn admit(&mut self, q: TermId, ctx: &FeatureVector, phi_q: &FeatureVector) -> bool {
        self.stats.queries += 1;
        let ok = match self.score(q, ctx, phi_q) {
            None => true,
            Some(s) => match self.threshold {
                Threshold::Random => {
                    self.stats.draws += 1;
                    s >= self.rng.random::<f64>()
                }
                Threshold::Fixed(x) => s >= x,
            },
        };
        self.stats.admits += ok as u64;
        ok
    }
}

/// What happened to one quantifier during a run.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantRecord {
    pub quantifier: TermId,
    /// Model input `(φ_P, φ_q)`.
    pub features: FeatureVector,
    /// Admitted by at least one module at least once.
    pub processed: bool,
    pub lemmas: Vec<TermId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Status {
    Unsat,
    Sat,
    Unknown,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Unsat => "unsat",
            Status::Sat => "sat",
            Status::Unknown => "unknown",
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunLog {
    pub problem: String,
    pub strategy: String,
    pub records: Vec<QuantRecord>,
    pub outcome: Status,
    /// Lemmas needed for the refutation (empty unless unsat).
    pub used_lemmas: Vec<TermId>,
    /// Whether `used_lemmas` was reduced by deletion.
    pub proof_minimized: bool,
}

/// One example per processed quantifier; positive iff one of its lemmas is
/// used by the refutation.
pub fn label_run(log: &RunLog) -> Result<Vec<(FeatureVector, bool)>, GuidanceError> {
    if log.outcome != Status::Unsat {
        return Err(GuidanceError::NotUnsat);
    }
    if !log.proof_minimized {
        log::warn!("{}: labels come from an unminimised lemma set", log.problem);
    }
    let used: BTreeSet<TermId> = log.used_lemmas.iter().copied().collect();
    Ok(log
        .records
        .iter()
        .filter(|r| r.processed)
        .map(|r| (r.features.clone(), r.lemmas.iter().any(|l| used.contains(l))))
        .collect())
}

/// Labelled rows of a run, tagged with its problem id.
pub fn training_rows(log: &RunLog) -> Result<Vec<TrainingRow>, GuidanceError> {
    Ok(label_run(log)?
        .into_iter()
        .map(|(features, label)| TrainingRow {
            features,
            label,
            problem: log.problem.clone(),
        })
        .collect())
}

fn problem_token(p: &str) -> String {
    p.chars().map(|c| if c.is_whitespace() { '_' } else { c }).collect()
}

/// Renders rows as `label qid:<problem> idx:count ...` lines.
pub fn format_rows(rows: &[TrainingRow]) -> String {
    let mut s = String::new();
    for r in rows {
        s.push_str(if r.label { "1" } else { "0" });
        s.push_str(" qid:");
        s.push_str(&problem_token(&r.problem));
        for (i, c) in r.features.entries() {
            s.push_str(&format!(" {i}:{c}"));
        }
        s.push('\n');
    }
    s
}

/// Appends rows to `path` under an exclusive lock.
pub fn emit_training_file(rows: &[TrainingRow], path: &Path) -> Result<(), GuidanceError> {
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    f.lock()?;
    f.write_all(format_rows(rows).as_bytes())?;
    f.flush()?;
    f.unlock()?;
    Ok(())
}

pub fn parse_rows(text: &str, path: &Path) -> Result<Vec<TrainingRow>, GuidanceError> {
    let err = |line: usize, msg: &str| GuidanceError::Format {
        path: path.to_path_buf(),
        line,
        msg: msg.to_string(),
    };
    let mut rows = Vec::new();
    for (i, l) in text.lines().enumerate() {
        let line = i + 1;
        let mut it = l.split_whitespace();
        let label = match it.next() {
            None => continue,
            Some("1") => true,
            Some("0") => false,
            Some(_) => return Err(err(line, "label must be 0 or 1")),
        };
        let problem = it
            .next()
            .and_then(|t| t.strip_prefix("qid:"))
            .filter(|p| !p.is_empty())
            .ok_or_else(|| err(line, "expected qid:<problem>"))?
            .to_string();
        let mut entries = Vec::new();
        for tok in it {
            let (i, c) = tok.split_once(':').ok_or_else(|| err(line, "expected idx:count"))?;
            let i: usize = i.parse().map_err(|_| err(line, "bad feature index"))?;
            let c: u32 = c.parse().map_err(|_| err(line, "bad feature count"))?;
            entries.push((i, c));
        }
        let features =
            FeatureVector::from_entries(2 * K, entries).map_err(|_| err(line, "feature index out of range"))?;
        rows.push(TrainingRow {
            features,
            label,
            problem,
        });
    }
    Ok(rows)
}

/// Rows of several training files split at the problem level.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Ingested {
    pub train: TrainingSet,
    pub dev: TrainingSet,
}

/// Problem-level split: a seeded shuffle of the distinct problem ids puts
/// `ceil(dev_fraction · n)` of them on the dev side.
pub fn split_rows(rows: Vec<TrainingRow>, dev_fraction: f64, seed: u64) -> Ingested {
    let problems: BTreeSet<String> = rows.iter().map(|r| r.problem.clone()).collect();
    let mut problems: Vec<String> = problems.into_iter().collect();
    problems.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_dev = ((dev_fraction.clamp(0.0, 1.0) * problems.len() as f64).ceil() as usize).min(problems.len());
    let dev: BTreeSet<&String> = problems[..n_dev].iter().collect();
    let mut out = Ingested::default();
    for r in rows {
        if dev.contains(&r.problem) {
            out.dev.rows.push(r);
        } else {
            out.train.rows.push(r);
        }
    }
    out
}

pub fn ingest(paths: &[PathBuf], dev_fraction: f64, seed: u64) -> Result<Ingested, GuidanceError> {
    let mut rows = Vec::new();
    for p in paths {
        rows.extend(parse_rows(&std::fs::read_to_string(p)?, p)?);
    }
    Ok(split_rows(rows, dev_fraction, seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(entries: &[(usize, u32)]) -> FeatureVector {
        FeatureVector::from_entries(K, entries.iter().copied()).unwrap()
    }

    #[test]
    fn open_gate_consumes_no_randomness() {
        let mut g = AdmissionGate::open();
        let before = g.rng.clone();
        for i in 0..10 {
            assert!(g.admit(TermId(i), &v(&[]), &v(&[(1, 1)])));
        }
        assert_eq!(g.rng, before);
        assert_eq!(g.stats().queries, 10);
        assert_eq!(g.stats().draws, 0);
    }

    #[test]
    fn scores_are_cached_draws_are_not() {
        let m = Arc::new(GbdtModel::constant(0.5));
        let mut g = AdmissionGate::new(Some(m), Threshold::Random, 1, "p", "s");
        g.admit(TermId(3), &v(&[]), &v(&[]));
        g.admit(TermId(3), &v(&[]), &v(&[]));
        assert_eq!(g.stats().predictions, 1);
        assert_eq!(g.stats().draws, 2);
        g.admit(TermId(4), &v(&[]), &v(&[]));
        assert_eq!(g.stats().predictions, 2);
        g.clear_cache();
        g.admit(TermId(3), &v(&[]), &v(&[]));
        assert_eq!(g.stats().predictions, 3);
    }

    #[test]
    fn certain_score_always_admits() {
        let m = Arc::new(GbdtModel::constant(1.0 - 1e-6));
        let mut g = AdmissionGate::new(Some(m), Threshold::Random, 9, "p", "s");
        assert!((0..1000).all(|_| g.admit(TermId(0), &v(&[]), &v(&[]))));
    }

    #[test]
    fn threshold_parsing() {
        assert_eq!("random".parse::<Threshold>(), Ok(Threshold::Random));
        assert_eq!("fixed:0.25".parse::<Threshold>(), Ok(Threshold::Fixed(0.25)));
        assert!("fixed:2".parse::<Threshold>().is_err());
        assert!("always".parse::<Threshold>().is_err());
    }

    #[test]
    fn rows_round_trip() {
        let rows = vec![
            TrainingRow {
                features: FeatureVector::from_entries(2 * K, [(0, 3), (K + 2, 1)]).unwrap(),
                label: true,
                problem: "a".into(),
            },
            TrainingRow {
                features: FeatureVector::zeros(2 * K),
                label: false,
                problem: "b".into(),
            },
        ];
        let text = format_rows(&rows);
        assert_eq!(text, format!("1 qid:a 0:3 {}:1\n0 qid:b\n", K + 2));
        assert_eq!(parse_rows(&text, Path::new("x")).unwrap(), rows);
        assert!(parse_rows("2 qid:a\n", Path::new("x")).is_err());
        assert!(parse_rows("1 a 0:1\n", Path::new("x")).is_err());
    }

    #[test]
    fn sat_runs_have_no_labels() {
        let log = RunLog {
            problem: "p".into(),
            strategy: "s".into(),
            records: Vec::new(),
            outcome: Status::Sat,
            used_lemmas: Vec::new(),
            proof_minimized: true,
        };
        assert!(matches!(label_run(&log), Err(GuidanceError::NotUnsat)));
    }
}
