use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Duration;

use rayon::prelude::*;

use super::corpus::CorpusProblem;
use super::strategy::Strategy;
use super::HarnessError;
use crate::gbdt::GbdtModel;
use crate::guidance::{AdmissionGate, Status};
use crate::solver::{load_problem, run_with_gate, Verdict};

#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub status: Status,
    pub rounds: u64,
    pub lemmas: u64,
    /// Wall-clock seconds, including model prediction time.
    pub runtime: f64,
    pub reason: Option<String>,
}

/// Outcomes over a (strategy × problem) cross product.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResultMatrix {
    pub strategies: Vec<String>,
    pub problems: Vec<String>,
    cells: HashMap<(String, String), Cell>,
}

impl ResultMatrix {
    pub fn new(strategies: Vec<String>, problems: Vec<String>) -> Self {
        ResultMatrix {
            strategies,
            problems,
            cells: HashMap::new(),
        }
    }

    pub fn insert(&mut self, strategy: &str, problem: &str, cell: Cell) {
        self.cells.insert((strategy.to_string(), problem.to_string()), cell);
    }

    pub fn remove(&mut self, strategy: &str, problem: &str) -> Option<Cell> {
        self.cells.remove(&(strategy.to_string(), problem.to_string()))
    }

    pub fn get(&self, strategy: &str, problem: &str) -> Option<&Cell> {
        self.cells.get(&(strategy.to_string(), problem.to_string()))
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.strategies
            .iter()
            .all(|s| self.problems.iter().all(|p| self.get(s, p).is_some()))
    }

    /// Problems proved unsat by `strategy`.
    pub fn solved_by(&self, strategy: &str) -> BTreeSet<String> {
        self.problems
            .iter()
            .filter(|p| self.get(strategy, p).is_some_and(|c| c.status == Status::Unsat))
            .cloned()
            .collect()
    }

    /// Deterministic columns only: `strategy,problem,status,rounds,lemmas`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("strategy,problem,status,rounds,lemmas\n");
        for st in &self.strategies {
            for p in &self.problems {
                if let Some(c) = self.get(st, p) {
                    writeln!(s, "{st},{p},{},{},{}", c.status, c.rounds, c.lemmas).unwrap();
                }
            }
        }
        s
    }

    /// Wall-clock columns: `strategy,problem,runtime`.
    pub fn timings_csv(&self) -> String {
        let mut s = String::from("strategy,problem,runtime\n");
        for st in &self.strategies {
            for p in &self.problems {
                if let Some(c) = self.get(st, p) {
                    writeln!(s, "{st},{p},{:.6}", c.runtime).unwrap();
                }
            }
        }
        s
    }

    /// Reads a result CSV and, optionally, the matching timings CSV.
    pub fn from_csv(results: &str, timings: Option<&str>) -> Result<ResultMatrix, HarnessError> {
        let mut m = ResultMatrix::default();
        let mut lines = results.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == "strategy,problem,status,rounds,lemmas" => {}
            _ => return Err(csv_err(1, "expected header strategy,problem,status,rounds,lemmas")),
        }
        for (i, l) in lines {
            if l.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 5 {
                return Err(csv_err(i + 1, "expected five fields"));
            }
            let status = match f[2] {
                "unsat" => Status::Unsat,
                "sat" => Status::Sat,
                "unknown" => Status::Unknown,
                _ => return Err(csv_err(i + 1, "bad status")),
            };
            let num = |s: &str| s.parse::<u64>().map_err(|_| csv_err(i + 1, "bad number"));
            let cell = Cell {
                status,
                rounds: num(f[3])?,
                lemmas: num(f[4])?,
                runtime: 0.0,
                reason: None,
            };
            if !m.strategies.iter().any(|s| s == f[0]) {
                m.strategies.push(f[0].to_string());
            }
            if !m.problems.iter().any(|p| p == f[1]) {
                m.problems.push(f[1].to_string());
            }
            m.insert(f[0], f[1], cell);
        }
        if let Some(t) = timings {
            for (i, l) in t.lines().enumerate().skip(1) {
                if l.trim().is_empty() {
                    continue;
                }
                let f: Vec<&str> = l.split(',').collect();
                let rt = f
                    .get(2)
                    .and_then(|v| v.parse::<f64>().ok())
                    .filter(|v| *v >= 0.0)
                    .ok_or_else(|| csv_err(i + 1, "bad timing row"))?;
                match m.cells.get_mut(&(f[0].to_string(), f[1].to_string())) {
                    Some(c) => c.runtime = rt,
                    None => return Err(csv_err(i + 1, "timing for an unknown cell")),
                }
            }
        }
        Ok(m)
    }
}

fn csv_err(line: usize, msg: &str) -> HarnessError {
    HarnessError::Csv {
        line,
        msg: msg.to_string(),
    }
}

/// Loads the model of every strategy that names one.
pub fn load_models(strategies: &[Strategy]) -> Result<HashMap<String, Arc<GbdtModel>>, HarnessError> {
    let mut out = HashMap::new();
    for s in strategies {
        if let Some(p) = &s.model {
            let m = GbdtModel::load(p).map_err(|e| HarnessError::Model(format!("{}: {e}", p.display())))?;
            out.insert(s.name.clone(), Arc::new(m));
        }
    }
    Ok(out)
}

/// Runs one problem under one strategy with its own store and gate.
pub fn run_cell(
    strategy: &Strategy,
    model: Option<Arc<GbdtModel>>,
    problem: &CorpusProblem,
    timeout: Duration,
) -> Result<Verdict, HarnessError> {
    let (mut store, cp) = load_problem(&problem.text, &problem.name)
        .map_err(|e| HarnessError::Problem(problem.name.clone(), e.to_string()))?;
    let mut cfg = strategy.config.clone();
    cfg.timeout = Some(timeout);
    let mut gate = AdmissionGate::new(model, cfg.threshold, cfg.seed, &problem.name, &strategy.name);
    Ok(run_with_gate(&mut store, &cp, &cfg, &mut gate, &strategy.name))
}

fn to_cell(r: Result<Verdict, HarnessError>, timeout: Duration) -> Cell {
    match r {
        Ok(v) => {
            let timed_out = v.reason.as_deref() == Some("timeout");
            Cell {
                status: v.status,
                rounds: v.rounds,
                lemmas: v.lemmas,
                runtime: if timed_out {
                    timeout.as_secs_f64()
                } else {
                    v.runtime.as_secs_f64()
                },
                reason: v.reason,
            }
        }
        Err(e) => Cell {
            status: Status::Unknown,
            rounds: 0,
            lemmas: 0,
            runtime: 0.0,
            reason: Some(e.to_string()),
        },
    }
}

/// Evaluates every (strategy, problem) pair in parallel. Cells are
/// independent, so the result does not depend on scheduling.
pub fn run_matrix(
    strategies: &[Strategy],
    problems: &[CorpusProblem],
    timeout: Duration,
) -> Result<ResultMatrix, HarnessError> {
    let models = load_models(strategies)?;
    let jobs: Vec<(&Strategy, &CorpusProblem)> = strategies
        .iter()
        .flat_map(|s| problems.iter().map(move |p| (s, p)))
        .collect();
    let cells: Vec<Cell> = jobs
        .par_iter()
        .map(|&(s, p)| to_cell(run_cell(s, models.get(&s.name).cloned(), p, timeout), timeout))
        .collect();
    let mut m = ResultMatrix::new(
        strategies.iter().map(|s| s.name.clone()).collect(),
        problems.iter().map(|p| p.name.clone()).collect(),
    );
    for ((s, p), c) in jobs.iter().zip(cells) {
        m.insert(&s.name, &p.name, c);
    }
    Ok(m)
}
