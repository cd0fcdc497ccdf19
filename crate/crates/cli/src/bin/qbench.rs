//! Benchmark and training driver: corpus generation and splitting, strategy
//! matrices, cover and transfer reports, labelling and model training.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use qsel::gbdt::{hyperparameter_grid, TrainingSet};
use qsel::guidance::{emit_training_file, ingest, parse_rows};
use qsel::harness::report::format_importance;
use qsel::harness::{
    builtin_strategies, collect_rows, format_cover_table, format_transfer_table, gen_needle_corpus, greedy_cover,
    parse_strategies, read_corpus_dir, run_matrix, scatter_dump, split_corpus, train_and_select, transfer_report,
    write_corpus_dir, CorpusProblem, ResultMatrix, Strategy,
};
use qsel::solver::DEFAULT_TIMEOUT_SECS;

#[derive(Parser, Debug)]
#[command(name = "qbench", version, about = "Strategy evaluation and model training")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(clap::Args, Debug)]
struct CorpusArgs {
    /// Directory of `.smt2` problems.
    #[arg(long)]
    corpus: PathBuf,
    /// File with one problem name per line restricting the corpus.
    #[arg(long)]
    problems: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
struct StrategyArgs {
    /// TOML file of `[[strategy]]` tables; built-in strategies when absent.
    #[arg(long)]
    strategies: Option<PathBuf>,
    /// Only keep these strategies (comma separated).
    #[arg(long, value_delimiter = ',')]
    only: Vec<String>,
    /// Override every strategy's lemma budget.
    #[arg(long)]
    max_lemmas: Option<u64>,
    /// Override every strategy's seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Generate a needle corpus.
    GenNeedle {
        #[arg(long, default_value_t = 300)]
        n: usize,
        /// Distractor quantifiers per problem.
        #[arg(long, default_value_t = 30)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Split a corpus 90:5:5 into train.txt, dev.txt and holdout.txt.
    Split {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every strategy on every problem.
    Run {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        strategies: StrategyArgs,
        /// Add a guided copy of every strategy per model.
        #[arg(long)]
        model: Vec<PathBuf>,
        /// Per-cell wall-clock limit in seconds.
        #[arg(long, env = "QSOLVE_TIMEOUT", default_value_t = DEFAULT_TIMEOUT_SECS as f64)]
        timeout: f64,
        /// Result CSV (deterministic columns).
        #[arg(long)]
        out: PathBuf,
        /// Runtime CSV.
        #[arg(long)]
        timings: Option<PathBuf>,
    },
    /// Greedy strategy cover of a result matrix.
    Cover {
        #[arg(long)]
        results: PathBuf,
        #[arg(long, default_value_t = 10)]
        k: usize,
    },
    /// Solves with and without each model.
    Transfer {
        #[arg(long)]
        results: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        strategies: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        models: Vec<String>,
    },
    /// Per-problem runtimes of two strategies as CSV.
    Scatter {
        #[arg(long)]
        results: PathBuf,
        #[arg(long)]
        timings: PathBuf,
        #[arg(long)]
        s1: String,
        #[arg(long)]
        s2: String,
        #[arg(long, env = "QSOLVE_TIMEOUT", default_value_t = DEFAULT_TIMEOUT_SECS as f64)]
        timeout: f64,
    },
    /// Run unguided and append labelled rows of every refutation.
    Label {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        strategies: StrategyArgs,
        #[arg(long, env = "QSOLVE_TIMEOUT", default_value_t = DEFAULT_TIMEOUT_SECS as f64)]
        timeout: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train the hyper-parameter grid and keep the best model on dev.
    Train {
        /// Training files.
        #[arg(long, required = true)]
        data: Vec<PathBuf>,
        /// Dev files; when absent, a problem-level share of `--data` is held out.
        #[arg(long)]
        dev: Vec<PathBuf>,
        #[arg(long, default_value_t = 0.1)]
        dev_fraction: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Feature-importance CSV.
        #[arg(long)]
        importance: Option<PathBuf>,
    },
}

fn timeout(secs: f64) -> Result<Duration> {
    if !(secs.is_finite() && secs > 0.0) {
        bail!("timeout must be positive");
    }
    Ok(Duration::from_secs_f64(secs))
}

fn load_corpus(a: &CorpusArgs) -> Result<Vec<CorpusProblem>> {
    let all = read_corpus_dir(&a.corpus).with_context(|| format!("reading {}", a.corpus.display()))?;
    let Some(list) = &a.problems else {
        return Ok(all);
    };
    let text = std::fs::read_to_string(list).with_context(|| format!("reading {}", list.display()))?;
    let wanted: BTreeSet<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
    let have: BTreeSet<&str> = all.iter().map(|p| p.name.as_str()).collect();
    if let Some(missing) = wanted.iter().find(|w| !have.contains(*w)) {
        bail!("problem `{missing}` listed in {} is not in the corpus", list.display());
    }
    Ok(all.into_iter().filter(|p| wanted.contains(p.name.as_str())).collect())
}

fn load_strategies(a: &StrategyArgs) -> Result<Vec<Strategy>> {
    let mut list = match &a.strategies {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            let base = p.parent().unwrap_or(Path::new("."));
            parse_strategies(&text, base).with_context(|| p.display().to_string())?
        }
        None => builtin_strategies(),
    };
    if !a.only.is_empty() {
        for o in &a.only {
            if !list.iter().any(|s| &s.name == o) {
                bail!("unknown strategy `{o}`");
            }
        }
        list.retain(|s| a.only.contains(&s.name));
    }
    for s in &mut list {
        if let Some(m) = a.max_lemmas {
            s.config.max_lemmas = m;
        }
        if let Some(seed) = a.seed {
            s.config.seed = seed;
        }
    }
    Ok(list)
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn read_matrix(results: &Path, timings: Option<&Path>) -> Result<ResultMatrix> {
    let r = std::fs::read_to_string(results).with_context(|| format!("reading {}", results.display()))?;
    let t = timings
        .map(|p| std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display())))
        .transpose()?;
    Ok(ResultMatrix::from_csv(&r, t.as_deref())?)
}

fn main() -> Result<()> {
    env_logger::init();
    match Cli::parse().cmd {
        Cmd::GenNeedle { n, m, seed, out } => {
            let problems: Vec<CorpusProblem> = gen_needle_corpus(n, m, seed).into_iter().map(|(p, _)| p).collect();
            write_corpus_dir(&out, &problems)?;
            println!("wrote {} problems to {}", problems.len(), out.display());
        }
        Cmd::Split { corpus, seed, out } => {
            let ids: Vec<String> = load_corpus(&corpus)?.into_iter().map(|p| p.name).collect();
            let split = split_corpus(&ids, seed)?;
            std::fs::create_dir_all(&out)?;
            for (name, list) in [
                ("train", &split.train),
                ("dev", &split.dev),
                ("holdout", &split.holdout),
            ] {
                let mut sorted = list.clone();
                sorted.sort();
                write(&out.join(format!("{name}.txt")), &(sorted.join("\n") + "\n"))?;
            }
            println!(
                "train {} dev {} holdout {}",
                split.train.len(),
                split.dev.len(),
                split.holdout.len()
            );
        }
        Cmd::Run {
            corpus,
            strategies,
            model,
            timeout: t,
            out,
            timings,
        } => {
            let problems = load_corpus(&corpus)?;
            let base = load_strategies(&strategies)?;
            let mut all = base.clone();
            for m in &model {
                all.extend(base.iter().map(|s| s.with_model(m)));
            }
            let matrix = run_matrix(&all, &problems, timeout(t)?)?;
            write(&out, &matrix.to_csv())?;
            if let Some(p) = timings {
                write(&p, &matrix.timings_csv())?;
            }
            for s in &all {
                println!("{}: {} / {}", s.name, matrix.solved_by(&s.name).len(), problems.len());
            }
        }
        Cmd::Cover { results, k } => {
            if k == 0 {
                bail!("k must be at least 1");
            }
            print!(
                "{}",
                format_cover_table(&greedy_cover(&read_matrix(&results, None)?, k))
            );
        }
        Cmd::Transfer {
            results,
            strategies,
            models,
        } => {
            let m = read_matrix(&results, None)?;
            print!("{}", format_transfer_table(&transfer_report(&m, &strategies, &models)?));
        }
        Cmd::Scatter {
            results,
            timings,
            s1,
            s2,
            timeout: t,
        } => {
            let m = read_matrix(&results, Some(&timings))?;
            print!("{}", scatter_dump(&m, &s1, &s2, timeout(t)?.as_secs_f64())?);
        }
        Cmd::Label {
            corpus,
            strategies,
            timeout: t,
            out,
        } => {
            let problems = load_corpus(&corpus)?;
            let mut total = 0;
            for s in load_strategies(&strategies)? {
                let rows = collect_rows(&s, &problems, timeout(t)?)?;
                total += rows.len();
                emit_training_file(&rows, &out)?;
            }
            println!("appended {total} rows to {}", out.display());
        }
        Cmd::Train {
            data,
            dev,
            dev_fraction,
            seed,
            out,
            importance,
        } => {
            let (train_set, dev_set) = if dev.is_empty() {
                let ing = ingest(&data, dev_fraction, seed)?;
                (ing.train, ing.dev)
            } else {
                let read = |paths: &[PathBuf]| -> Result<TrainingSet> {
                    let mut rows = Vec::new();
                    for p in paths {
                        let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                        rows.extend(parse_rows(&text, p)?);
                    }
                    Ok(TrainingSet { rows })
                };
                (read(&data)?, read(&dev)?)
            };
            if train_set.is_empty() {
                bail!("no training rows");
            }
            if dev_set.is_empty() {
                bail!("no dev rows");
            }
            let sel = train_and_select(&train_set, &dev_set, &hyperparameter_grid(seed))?;
            sel.model.save(&out)?;
            if let Some(p) = importance {
                write(&p, &format_importance(&sel.model.importance()))?;
            }
            println!(
                "selected candidate {} of {} ({} trees); dev pos {:.4} neg {:.4}; {} train rows",
                sel.index + 1,
                sel.candidates,
                sel.model.trees.len(),
                sel.dev.pos_accuracy(),
                sel.dev.neg_accuracy(),
                train_set.len()
            );
        }
    }
    Ok(())
}
