use std::time::Duration;

use rayon::prelude::*;

use super::corpus::CorpusProblem;
use super::matrix::run_cell;
use super::strategy::Strategy;
use super::HarnessError;
use crate::gbdt::{dev_counts, select_model, train, DevCounts, GbdtModel, Hyperparams, TrainingRow, TrainingSet};
use crate::guidance::{training_rows, Status};

/// Runs every problem unguided and labels the refuted ones. Problems that
/// are not refuted contribute nothing. Row order follows `problems`.
pub fn collect_rows(
    strategy: &Strategy,
    problems: &[CorpusProblem],
    timeout: Duration,
) -> Result<Vec<TrainingRow>, HarnessError> {
    let per_problem: Vec<Result<Vec<TrainingRow>, HarnessError>> = problems
        .par_iter()
        .map(|p| {
            let v = run_cell(strategy, None, p, timeout)?;
            if v.status != Status::Unsat {
                return Ok(Vec::new());
            }
            Ok(training_rows(&v.log)?)
        })
        .collect();
    let mut rows = Vec::new();
    for r in per_problem {
        rows.extend(r?);
    }
    Ok(rows)
}

#[derive(Clone, Debug)]
pub struct Selected {
    pub model: GbdtModel,
    /// Position of the winner in the grid.
    pub index: usize,
    pub dev: DevCounts,
    pub candidates: usize,
}

/// Trains one model per grid point in parallel and picks the best on `dev`.
pub fn train_and_select(
    train_set: &TrainingSet,
    dev: &TrainingSet,
    grid: &[Hyperparams],
) -> Result<Selected, HarnessError> {
    if grid.is_empty() {
        return Err(HarnessError::Config("empty hyper-parameter grid".into()));
    }
    let models = grid
        .par_iter()
        .map(|hp| train(train_set, hp))
        .collect::<Result<Vec<_>, _>>()?;
    let index = select_model(&models, dev);
    let model = models[index].clone();
    Ok(Selected {
        dev: dev_counts(&model, dev),
        model,
        index,
        candidates: models.len(),
    })
}
