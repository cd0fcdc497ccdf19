//! Solve one SMT-LIB problem. Prints `unsat`, `sat` or `unknown` on the first
//! line of stdout; exits 0 on a definite answer and 1 otherwise.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use anyhow::{Context, Result};
use clap::Parser;
use qsel::gbdt::GbdtModel;
use qsel::guidance::{emit_training_file, training_rows};
use qsel::inst::TriggerSel;
use qsel::solver::DEFAULT_TIMEOUT_SECS;
use qsel::{load_problem, run_with_gate, AdmissionGate, SolveConfig, Status, Threshold, Verdict};

#[derive(Parser, Debug)]
#[command(
    name = "qsolve",
    version,
    about = "Instantiation-based solver for quantified EUF problems"
)]
struct Args {
    /// Input problem in SMT-LIB format.
    file: PathBuf,

    /// Enable enumerative instantiation.
    #[arg(long)]
    full_saturate_quant: bool,
    /// Disable e-matching.
    #[arg(long)]
    no_ematch: bool,
    #[arg(long, default_value = "min")]
    trigger_sel: TriggerSel,
    /// Try multi-triggers before single triggers.
    #[arg(long)]
    multi_trigger_priority: bool,
    /// Also use multi-triggers for quantifiers that have a single trigger.
    #[arg(long)]
    multi_trigger_when_single: bool,
    /// Run enumeration in every round instead of only when e-matching is idle.
    #[arg(long)]
    enum_inst_interleave: bool,
    #[arg(long, default_value_t = 1)]
    enum_lemmas_per_round: usize,
    /// New e-matching lemmas per quantifier per round.
    #[arg(long, default_value_t = 4)]
    ematch_cap: usize,

    #[arg(long, default_value_t = 10_000)]
    max_rounds: u64,
    #[arg(long, default_value_t = 100_000)]
    max_lemmas: u64,
    /// Wall-clock limit in seconds.
    #[arg(long, env = "QSOLVE_TIMEOUT", default_value_t = DEFAULT_TIMEOUT_SECS as f64)]
    timeout: f64,
    #[arg(long, default_value_t = 1_000_000)]
    decision_budget: u64,
    /// Deletion-minimise the lemmas of a refutation.
    #[arg(long, num_args = 0..=1, default_value_t = true, default_missing_value = "true")]
    produce_proofs: bool,

    /// Quantifier-admission model.
    #[arg(long)]
    ml_model: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    ml_seed: u64,
    /// `random` or `fixed:<x>`.
    #[arg(long, default_value = "random")]
    threshold: Threshold,
    /// Append labelled training rows for this run (refutations only).
    #[arg(long)]
    dump_instantiations: Option<PathBuf>,
    /// Print a key=value statistics block after the answer.
    #[arg(long)]
    stats: bool,
}

impl Args {
    fn config(&self) -> Result<SolveConfig> {
        anyhow::ensure!(
            self.timeout.is_finite() && self.timeout > 0.0,
            "--timeout must be positive"
        );
        let mut c = SolveConfig {
            full_saturate_quant: self.full_saturate_quant,
            ematch: !self.no_ematch,
            ematch_cap: self.ematch_cap,
            enum_lemmas_per_round: self.enum_lemmas_per_round,
            enum_interleave: self.enum_inst_interleave,
            max_rounds: self.max_rounds,
            max_lemmas: self.max_lemmas,
            timeout: Some(Duration::from_secs_f64(self.timeout)),
            decision_budget: self.decision_budget,
            produce_proofs: self.produce_proofs,
            threshold: self.threshold,
            seed: self.ml_seed,
            ..SolveConfig::default()
        };
        c.triggers.sel = self.trigger_sel;
        c.triggers.multi_priority = self.multi_trigger_priority;
        c.triggers.multi_when_single = self.multi_trigger_when_single;
        Ok(c)
    }
}

fn print_stats(v: &Verdict) {
    let used = v.used_lemmas().len();
    println!("status={}", v.status);
    println!("rounds={}", v.rounds);
    println!("lemmas={}", v.lemmas);
    println!("used_lemmas={used}");
    println!("queries={}", v.gate.queries);
    println!("admits={}", v.gate.admits);
    println!("predictions={}", v.gate.predictions);
    println!("draws={}", v.gate.draws);
    println!("decisions={}", v.decisions);
    println!("runtime_ms={}", v.runtime.as_millis());
    println!("reason={}", v.reason.as_deref().unwrap_or("-"));
}

fn run(args: &Args) -> Result<Verdict> {
    let cfg = args.config()?;
    let text = std::fs::read_to_string(&args.file).with_context(|| format!("reading {}", args.file.display()))?;
    let name = args
        .file
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let model = match &args.ml_model {
        Some(p) => Some(Arc::new(
            GbdtModel::load(p).with_context(|| format!("loading model {}", p.display()))?,
        )),
        None => None,
    };
    let (mut store, cp) = load_problem(&text, &name).with_context(|| args.file.display().to_string())?;
    let mut gate = AdmissionGate::new(model, cfg.threshold, cfg.seed, &name, "qsolve");
    let v = run_with_gate(&mut store, &cp, &cfg, &mut gate, "qsolve");
    if let Some(path) = &args.dump_instantiations {
        if v.status == Status::Unsat {
            emit_training_file(&training_rows(&v.log)?, path).with_context(|| format!("writing {}", path.display()))?;
        }
    }
    Ok(v)
}

fn main() -> ExitCode {
    env_logger::init();
    let args = Args::parse();
    match run(&args) {
        Ok(v) => {
            println!("{}", v.status);
            if args.stats {
                print_stats(&v);
            }
            if v.status == Status::Unknown {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            println!("unknown");
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
