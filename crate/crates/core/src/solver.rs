//! Alternation of ground solving and instantiation rounds.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use crate::features::{concat_context, FeatureExtractor, FeatureVector};
use crate::frontend::{clausify, parse, ClausalProblem, ClausifyError, ParseError};
use crate::ground::{solve_ground_with_stats, GroundClause, GroundConfig, GroundOutcome};
use crate::guidance::{AdmissionGate, GateStats, QuantRecord, RunLog, Status, Threshold};
use crate::inst::{EMatcher, Enumerator, InstContext, InstLemma, TermDb, TriggerOptions};
use crate::term::{Kind, Quantifier, SortId, TermId, TermStore};

pub const DEFAULT_TIMEOUT_SECS: u64 = 60;

/// Reads `QSOLVE_TIMEOUT` (seconds), falling back to the default.
pub fn default_timeout() -> Duration {
    let secs = std::env::var("QSOLVE_TIMEOUT")
        .ok()
        .and_then(|v| v.trim().parse::<f64>().ok())
        .filter(|v| v.is_finite() && *v > 0.0);
    secs.map(Duration::from_secs_f64)
        .unwrap_or(Duration::from_secs(DEFAULT_TIMEOUT_SECS))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveConfig {
    /// Enumerative instantiation.
    pub full_saturate_quant: bool,
    /// E-matching.
    pub ematch: bool,
    pub triggers: TriggerOptions,
    pub ematch_cap: usize,
    pub enum_lemmas_per_round: usize,
    /// Run enumeration in every round, not only when e-matching is idle.
    pub enum_interleave: bool,
    pub max_rounds: u64,
    pub max_lemmas: u64,
    pub timeout: Option<Duration>,
    pub decision_budget: u64,
    /// Deletion-minimise the lemmas of a refutation.
    pub produce_proofs: bool,
    pub threshold: Threshold,
    pub seed: u64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            full_saturate_quant: false,
            ematch: true,
            triggers: TriggerOptions::default(),
            ematch_cap: 4,
            enum_lemmas_per_round: 1,
            enum_interleave: false,
            max_rounds: 10_000,
            max_lemmas: 100_000,
            timeout: Some(default_timeout()),
            decision_budget: 1_000_000,
            produce_proofs: true,
            threshold: Threshold::Random,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Module {
    EMatch,
    Enum,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TraceEntry {
    pub round: u64,
    pub module: Module,
    pub quantifier: usize,
    pub lemma: TermId,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub status: Status,
    /// Instantiation rounds performed.
    pub rounds: u64,
    pub lemmas: u64,
    pub runtime: Duration,
    /// Why the run ended without an answer.
    pub reason: Option<String>,
    pub log: RunLog,
    pub trace: Vec<TraceEntry>,
    pub gate: GateStats,
    pub decisions: u64,
}

impl Verdict {
    pub fn used_lemmas(&self) -> &[TermId] {
        &self.log.used_lemmas
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Clausify(#[from] ClausifyError),
}

/// Parses and clausifies an SMT-LIB problem into a fresh store.
pub fn load_problem(text: &str, name: &str) -> Result<(TermStore, ClausalProblem), LoadError> {
    let mut store = TermStore::new();
    let p = parse(text, name, &mut store)?;
    let cp = clausify(&mut store, &p)?;
    Ok((store, cp))
}

/// Whether a consistent saturated state can be reported as `sat`: no
/// integer-sorted quantified variables and no arithmetic comparison the
/// congruence solver treats as opaque.
fn sat_claimable(store: &TermStore, clauses: &[GroundClause], quants: &[&Quantifier]) -> bool {
    if quants
        .iter()
        .any(|q| q.bound_vars.iter().any(|&v| store.sort(v) == SortId::INT))
    {
        return false;
    }
    let roots = clauses
        .iter()
        .flat_map(|c| c.literals.iter().copied())
        .chain(quants.iter().map(|q| q.term));
    let mut seen = HashSet::new();
    for r in roots {
        for t in store.subterms(r) {
            if seen.insert(t)
                && store.kind(t).is_arith_atom()
                && store.children(t).iter().any(|&c| store.numeral_value(c).is_none())
            {
                return false;
            }
        }
    }
    true
}

/// Solves without a model: every quantifier is always admitted.
pub fn solve(store: &mut TermStore, cp: &ClausalProblem, cfg: &SolveConfig) -> Verdict {
    run_with_gate(store, cp, cfg, &mut AdmissionGate::open(), "default")
}

/// Main loop. Each module asks `gate` before processing a quantifier.
pub fn run_with_gate(
    store: &mut TermStore,
    cp: &ClausalProblem,
    cfg: &SolveConfig,
    gate: &mut AdmissionGate,
    strategy: &str,
) -> Verdict {
    let start = Instant::now();
    let quants: Vec<&Quantifier> = cp.quantified.iter().map(|q| &q.quantifier).collect();
    let mut clauses: Vec<GroundClause> = cp
        .ground_clauses
        .iter()
        .map(|c| GroundClause::input(c.literals.clone()))
        .collect();
    clauses.extend(quants.iter().map(|q| GroundClause::input(vec![q.term])));

    let mut db = TermDb::new();
    for c in &clauses {
        for &l in &c.literals {
            db.insert(store, l);
        }
    }
    if cfg.full_saturate_quant {
        let sorts: Vec<SortId> = quants
            .iter()
            .flat_map(|q| q.bound_vars.iter().map(|&v| store.sort(v)))
            .collect();
        for s in sorts {
            if db.terms_of_sort(s).is_empty() {
                let w = store.fresh_constant("w", s);
                db.insert(store, w);
            }
        }
    }
    let claimable = sat_claimable(store, &clauses, &quants);

    let mut extractor = FeatureExtractor::new();
    let ctx: FeatureVector = extractor.problem_features(store, &cp.problem);
    let mut records: Vec<QuantRecord> = quants
        .iter()
        .map(|q| QuantRecord {
            quantifier: q.term,
            features: concat_context(&ctx, &extractor.formula_features(store, q.term)).expect("width K"),
            processed: false,
            lemmas: Vec::new(),
        })
        .collect();
    let phi_q: Vec<FeatureVector> = quants
        .iter()
        .map(|q| extractor.formula_features(store, q.term))
        .collect();

    let gcfg = GroundConfig {
        decision_budget: cfg.decision_budget,
        minimize_lemmas: cfg.produce_proofs,
    };
    let mut ematcher = EMatcher::new(cfg.triggers, cfg.ematch_cap);
    let mut enumerator = Enumerator::new(cfg.enum_lemmas_per_round);
    let mut known: HashSet<TermId> = HashSet::new();
    let mut trace = Vec::new();
    let mut rounds = 0u64;
    let mut decisions = 0u64;

    let (status, reason, used) = loop {
        if cfg.timeout.is_some_and(|t| start.elapsed() >= t) {
            break (Status::Unknown, Some("timeout".to_string()), Vec::new());
        }
        let (outcome, gstats) = solve_ground_with_stats(store, &clauses, &gcfg);
        decisions += gstats.decisions;
        let model = match outcome {
            GroundOutcome::Unsat { used_lemmas } => break (Status::Unsat, None, used_lemmas),
            GroundOutcome::Unknown => break (Status::Unknown, Some("decision budget".into()), Vec::new()),
            GroundOutcome::Sat(m) => m,
        };
        if quants.is_empty() {
            if claimable {
                break (Status::Sat, None, Vec::new());
            }
            break (Status::Unknown, Some("arithmetic not decided".into()), Vec::new());
        }
        if !cfg.ematch && !cfg.full_saturate_quant {
            break (
                Status::Unknown,
                Some("no instantiation module enabled".into()),
                Vec::new(),
            );
        }
        if rounds >= cfg.max_rounds {
            break (Status::Unknown, Some("round budget".into()), Vec::new());
        }
        if (known.len() as u64) >= cfg.max_lemmas {
            break (Status::Unknown, Some("lemma budget".into()), Vec::new());
        }
        rounds += 1;

        let mut cc = model.cc;
        for &t in db.all_terms() {
            cc.add_term(store, t);
        }
        let mut rejected = false;
        let mut admitted_by = |gate: &mut AdmissionGate, records: &mut Vec<QuantRecord>| {
            let mut out = Vec::new();
            for (i, q) in quants.iter().enumerate() {
                if gate.admit(q.term, &ctx, &phi_q[i]) {
                    records[i].processed = true;
                    out.push((i, *q));
                } else {
                    rejected = true;
                }
            }
            out
        };
        let mut produced: Vec<(Module, InstLemma)> = Vec::new();
        if cfg.ematch {
            let admitted = admitted_by(gate, &mut records);
            let mut ictx = InstContext {
                store,
                db: &db,
                known_lemmas: &known,
            };
            produced.extend(
                ematcher
                    .round(&mut ictx, &cc, &admitted)
                    .into_iter()
                    .map(|l| (Module::EMatch, l)),
            );
        }
        if cfg.full_saturate_quant && (produced.is_empty() || cfg.enum_interleave) {
            let admitted = admitted_by(gate, &mut records);
            let mut seen: HashSet<TermId> = known.clone();
            seen.extend(produced.iter().map(|(_, l)| l.lemma));
            let mut ictx = InstContext {
                store,
                db: &db,
                known_lemmas: &seen,
            };
            produced.extend(
                enumerator
                    .round(&mut ictx, &admitted)
                    .into_iter()
                    .map(|l| (Module::Enum, l)),
            );
        }

        if produced.is_empty() {
            let saturated = cfg.full_saturate_quant && enumerator.is_saturated(store, &db, &quants);
            if saturated && claimable {
                break (Status::Sat, None, Vec::new());
            }
            if saturated || (!rejected && !cfg.full_saturate_quant) {
                break (Status::Unknown, Some("saturated without refutation".into()), Vec::new());
            }
            continue;
        }
        let room = (cfg.max_lemmas - known.len() as u64) as usize;
        produced.truncate(room);
        for (module, l) in produced {
            known.insert(l.lemma);
            clauses.push(GroundClause::from_lemma(store, l.lemma));
            db.insert(store, l.lemma);
            records[l.quantifier].lemmas.push(l.lemma);
            trace.push(TraceEntry {
                round: rounds,
                module,
                quantifier: l.quantifier,
                lemma: l.lemma,
            });
        }
    };

    Verdict {
        status,
        rounds,
        lemmas: known.len() as u64,
        runtime: start.elapsed(),
        reason,
        log: RunLog {
            problem: cp.name().to_string(),
            strategy: strategy.to_string(),
            records,
            outcome: status,
            used_lemmas: used,
            proof_minimized: cfg.produce_proofs,
        },
        trace,
        gate: gate.stats(),
        decisions,
    }
}

/// Whether `lemmas` together with the problem's ground part is unsat.
pub fn replay_is_unsat(store: &mut TermStore, cp: &ClausalProblem, lemmas: &[TermId]) -> bool {
    let mut clauses: Vec<GroundClause> = cp
        .ground_clauses
        .iter()
        .map(|c| GroundClause::input(c.literals.clone()))
        .collect();
    clauses.extend(
        cp.quantified
            .iter()
            .map(|q| GroundClause::input(vec![q.quantifier.term])),
    );
    for &l in lemmas {
        if store.kind(l) != Kind::Implies {
            return false;
        }
        clauses.push(GroundClause::from_lemma(store, l));
    }
    let cfg = GroundConfig {
        minimize_lemmas: false,
        ..GroundConfig::default()
    };
    solve_ground_with_stats(store, &clauses, &cfg).0.is_unsat()
}

#[cfg(test)]
mod tests {
    use super::*;

    const EMATCH_EXAMPLE: &str = "
        (declare-fun p (Int) Bool)
        (declare-fun f (Int) Int)
        (declare-const a Int)
        (assert (p a))
        (assert (= a (f 24)))
        (assert (forall ((x Int)) (=> (p (f x)) (< x 0))))
        (check-sat)";

    const ENUM_EXAMPLE: &str = "
        (declare-sort U 0)
        (declare-fun p (U) Bool)
        (declare-fun q (U) Bool)
        (declare-fun f (U) U)
        (declare-const c U)
        (assert (p c))
        (assert (forall ((x U)) (q (f x))))
        (check-sat)";

    fn cfg() -> SolveConfig {
        SolveConfig {
            timeout: None,
            ..SolveConfig::default()
        }
    }

    #[test]
    fn ematch_example_is_refuted_in_one_round() {
        let (mut s, cp) = load_problem(EMATCH_EXAMPLE, "ematch").unwrap();
        let v = solve(&mut s, &cp, &cfg());
        assert_eq!(v.status, Status::Unsat);
        assert_eq!(v.rounds, 1);
        assert_eq!(v.lemmas, 1);
        assert_eq!(v.used_lemmas().len(), 1);
        let n24 = s.numeral(24);
        assert_eq!(s.lemma_origin(v.used_lemmas()[0]).unwrap().binding, vec![n24]);
        assert!(replay_is_unsat(&mut s, &cp, v.used_lemmas()));
    }

    #[test]
    fn enum_example_grows_terms() {
        let (mut s, cp) = load_problem(ENUM_EXAMPLE, "enum").unwrap();
        let c = SolveConfig {
            full_saturate_quant: true,
            max_rounds: 3,
            ..cfg()
        };
        let v = solve(&mut s, &cp, &c);
        assert_eq!(v.status, Status::Unknown);
        let shown: Vec<String> = v
            .trace
            .iter()
            .map(|e| {
                let ch = s.children(e.lemma);
                s.display(ch[1]).to_string()
            })
            .collect();
        assert_eq!(shown, ["(q (f c))", "(q (f (f c)))", "(q (f (f (f c))))"]);
        assert!(v.trace.iter().all(|e| e.module == Module::Enum));
    }

    #[test]
    fn ground_unsat_needs_no_rounds() {
        let text = "(declare-sort U 0) (declare-const a U) (declare-const b U)
                    (assert (= a b)) (assert (not (= a b)))";
        let (mut s, cp) = load_problem(text, "g").unwrap();
        let v = solve(&mut s, &cp, &cfg());
        assert_eq!((v.status, v.rounds, v.lemmas), (Status::Unsat, 0, 0));
    }

    #[test]
    fn finite_saturation_reports_sat() {
        let text = "(declare-sort U 0) (declare-fun p (U) Bool) (declare-const c U)
                    (assert (forall ((x U)) (p x)))";
        let (mut s, cp) = load_problem(text, "sat").unwrap();
        let c = SolveConfig {
            full_saturate_quant: true,
            ..cfg()
        };
        assert_eq!(solve(&mut s, &cp, &c).status, Status::Sat);
        let (mut s, cp) = load_problem(text, "sat").unwrap();
        assert_eq!(solve(&mut s, &cp, &cfg()).status, Status::Unknown);
    }
}
