//! Benchmark harness: strategies, corpora, result matrices, reports and the
//! train-from-runs pipeline.

pub mod corpus;
pub mod matrix;
pub mod report;
pub mod strategy;
pub mod train;

pub use corpus::{
    gen_needle_corpus, read_corpus_dir, split_corpus, write_corpus_dir, CorpusProblem, CorpusSplit, NeedleInfo,
};
pub use matrix::{run_cell, run_matrix, Cell, ResultMatrix};
pub use report::{
    format_cover_table, format_transfer_table, greedy_cover, scatter_dump, transfer_report, CoverRow, TransferRow,
};
pub use strategy::{builtin_strategies, parse_strategies, Strategy};
pub use train::{collect_rows, train_and_select, Selected};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("corpus has {n} problems, at least {min} are needed")]
    TooSmall { n: usize, min: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("config: {0}")]
    Config(String),
    #[error("csv line {line}: {msg}")]
    Csv { line: usize, msg: String },
    #[error("model: {0}")]
    Model(String),
    #[error("problem {0}: {1}")]
    Problem(String, String),
    #[error("no result for strategy `{strategy}` on problem `{problem}`")]
    MissingCell { strategy: String, problem: String },
    #[error(transparent)]
    Guidance(#[from] crate::guidance::GuidanceError),
    #[error(transparent)]
    Gbdt(#[from] crate::gbdt::GbdtError),
}
