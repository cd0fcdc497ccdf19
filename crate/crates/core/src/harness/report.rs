use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::matrix::ResultMatrix;
use super::HarnessError;
use crate::features::K;
use crate::gbdt::FeatureImportance;
use crate::guidance::Status;
use crate::term::Kind;

#[derive(Clone, Debug, PartialEq)]
pub struct CoverRow {
    pub strategy: String,
    /// Problems solved by the strategy alone.
    pub solves: usize,
    /// Problems not solved by any earlier row.
    pub new: usize,
    pub total: usize,
    /// `new` as a fraction of the previous total; `None` on the first row.
    pub adds: Option<f64>,
}

/// Greedy portfolio: repeatedly take the strategy adding the most unsolved
/// problems (ties to the smaller name), for at most `k` rows and while
/// something is added.
pub fn greedy_cover(m: &ResultMatrix, k: usize) -> Vec<CoverRow> {
    let mut names: Vec<&String> = m.strategies.iter().collect();
    names.sort();
    let solved: Vec<(&String, BTreeSet<String>)> = names.into_iter().map(|s| (s, m.solved_by(s))).collect();
    let mut covered: BTreeSet<String> = BTreeSet::new();
    let mut used = vec![false; solved.len()];
    let mut rows: Vec<CoverRow> = Vec::new();
    while rows.len() < k {
        let mut best: Option<(usize, usize)> = None;
        for (i, (_, set)) in solved.iter().enumerate() {
            if used[i] {
                continue;
            }
            let new = set.difference(&covered).count();
            if best.is_none_or(|(_, b)| new > b) {
                best = Some((i, new));
            }
        }
        let Some((i, new)) = best else { break };
        if new == 0 {
            break;
        }
        used[i] = true;
        let prev = covered.len();
        covered.extend(solved[i].1.iter().cloned());
        rows.push(CoverRow {
            strategy: solved[i].0.clone(),
            solves: solved[i].1.len(),
            new,
            total: covered.len(),
            adds: (!rows.is_empty()).then(|| new as f64 / prev as f64),
        });
    }
    rows
}

/// `+5.20%` style percentage; `−` when absent.
pub fn format_adds(adds: Option<f64>) -> String {
    match adds {
        Some(a) => format!("{:+.2}%", 100.0 * a),
        None => "\u{2212}".to_string(),
    }
}

pub fn format_cover_table(rows: &[CoverRow]) -> String {
    let mut s = String::from("| strategy | solves | new | total | adds |\n|---|---:|---:|---:|---:|\n");
    for r in rows {
        writeln!(
            s,
            "| {} | {} | +{} | ={} | {} |",
            r.strategy,
            r.solves,
            r.new,
            r.total,
            format_adds(r.adds)
        )
        .unwrap();
    }
    s
}

/// Relative gain of `ml` over `base`, or `None` when `base` is zero.
pub fn gain(ml: usize, base: usize) -> Option<f64> {
    (base > 0).then(|| (ml as f64 - base as f64) / base as f64)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransferRow {
    pub strategy: String,
    pub base_solves: usize,
    /// `(model, solves, gain)` per model.
    pub models: Vec<(String, usize, Option<f64>)>,
}

/// Per strategy: solves without a model, and solves and gain with each
/// model. Guided cells are looked up as `<strategy>@<model>`.
pub fn transfer_report(
    m: &ResultMatrix,
    strategies: &[String],
    models: &[String],
) -> Result<Vec<TransferRow>, HarnessError> {
    let mut rows = Vec::new();
    for s in strategies {
        let mut names = vec![s.clone()];
        names.extend(models.iter().map(|md| format!("{s}@{md}")));
        for n in &names {
            for p in &m.problems {
                if m.get(n, p).is_none() {
                    return Err(HarnessError::MissingCell {
                        strategy: n.clone(),
                        problem: p.clone(),
                    });
                }
            }
        }
        let base = m.solved_by(s).len();
        let models = models
            .iter()
            .zip(&names[1..])
            .map(|(md, n)| {
                let solves = m.solved_by(n).len();
                (md.clone(), solves, gain(solves, base))
            })
            .collect();
        rows.push(TransferRow {
            strategy: s.clone(),
            base_solves: base,
            models,
        });
    }
    Ok(rows)
}

pub fn format_transfer_table(rows: &[TransferRow]) -> String {
    let Some(first) = rows.first() else {
        return String::new();
    };
    let mut s = String::from("| strategy | w/o ML |");
    for (md, _, _) in &first.models {
        write!(s, " {md} | gain |").unwrap();
    }
    s.push_str("\n|---|---:|");
    for _ in &first.models {
        s.push_str("---:|---:|");
    }
    s.push('\n');
    for r in rows {
        write!(s, "| {} | {} |", r.strategy, r.base_solves).unwrap();
        for (_, solves, g) in &r.models {
            let g = g.map_or("n/a".to_string(), |g| format_adds(Some(g)));
            write!(s, " {solves} | {g} |").unwrap();
        }
        s.push('\n');
    }
    s
}

/// `problem,runtime1,runtime2`; unsolved cells are reported at `timeout`.
pub fn scatter_dump(m: &ResultMatrix, s1: &str, s2: &str, timeout: f64) -> Result<String, HarnessError> {
    let mut out = String::from("problem,runtime1,runtime2\n");
    for p in &m.problems {
        let rt = |s: &str| -> Result<f64, HarnessError> {
            let c = m.get(s, p).ok_or_else(|| HarnessError::MissingCell {
                strategy: s.to_string(),
                problem: p.clone(),
            })?;
            Ok(if c.status == Status::Unsat {
                c.runtime.min(timeout)
            } else {
                timeout
            })
        };
        writeln!(out, "{p},{:.6},{:.6}", rt(s1)?, rt(s2)?).unwrap();
    }
    Ok(out)
}

/// Human-readable name of a model input index.
pub fn feature_name(i: usize) -> String {
    let (part, k) = if i < K { ("ctx", i) } else { ("q", i - K) };
    match Kind::from_index(k) {
        Some(kind) => format!("{part}:{}", kind.name()),
        None => format!("#{i}"),
    }
}

pub fn format_importance(imp: &[FeatureImportance]) -> String {
    let total: f64 = imp.iter().map(|f| f.gain).sum();
    let mut s = String::from("feature,index,splits,gain,share\n");
    for f in imp {
        let share = if total > 0.0 { f.gain / total } else { 0.0 };
        writeln!(
            s,
            "{},{},{},{:.6},{:.4}",
            feature_name(f.feature),
            f.feature,
            f.splits,
            f.gain,
            share
        )
        .unwrap();
    }
    s
}
