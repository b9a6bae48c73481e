use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use mcboost::harness::{
    emit_degree_map, emit_equivalence, emit_fixture, emit_potential_table, evaluate, run_equivalence, run_experiment,
    Algo, DataSource, ExperimentConfig, FixtureKind, FixtureParams, LearnerKind, LossKind,
};
use mcboost::potentials::LossSpec;

#[derive(Parser)]
#[command(name = "mcboost", version, about = "Multiclass boosting experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct OutArgs {
    /// Output directory
    #[arg(long, env = "MCBOOST_OUT_DIR", default_value = "mcboost-out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Train a booster and write curve.tsv, metrics.tsv, labels.tsv and model.json
    Train(TrainArgs),
    /// Score a CSV with a saved model
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
    },
    /// Potential values at the origin for T = 0..=t_max
    Potentials {
        #[arg(long, default_value_t = 6)]
        k: usize,
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
        #[arg(long, default_value_t = 10)]
        t_max: usize,
        #[arg(long, value_enum, default_value_t = LossKind::Zeroone)]
        loss: LossKind,
        #[arg(long, default_value_t = 0.1)]
        eta: f64,
        /// Also tabulate the minimal-condition potential
        #[arg(long)]
        minimal: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Degree map of the minimal-condition potential for k = 3
    DegreeMap {
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
        #[arg(long, value_enum, default_value_t = LossKind::Exp)]
        loss: LossKind,
        #[arg(long, default_value_t = 0.025)]
        eta: f64,
        #[arg(long, default_value_t = 10)]
        rounds: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Compare AdaBoost.MM with binary AdaBoost on mislabel triples
    EquivalenceCheck {
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 50)]
        rounds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Report on a counterexample fixture
    Fixtures {
        #[arg(long, value_enum)]
        name: FixtureKind,
        #[arg(long, default_value_t = 0.1)]
        gamma: f64,
        #[arg(long, default_value_t = 11)]
        m: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args)]
struct TrainArgs {
    /// CSV file, split at random into train and test
    #[arg(long, conflicts_with_all = ["train_file", "fixture"])]
    data: Option<PathBuf>,
    #[arg(long, requires = "test_file", conflicts_with = "fixture")]
    train_file: Option<PathBuf>,
    #[arg(long, requires = "train_file")]
    test_file: Option<PathBuf>,
    /// Built-in dataset instead of a CSV
    #[arg(long, value_parser = ["window"])]
    fixture: Option<String>,
    #[arg(long, default_value = "class")]
    label_column: String,
    /// Fraction of examples used for training
    #[arg(long, default_value_t = 0.8)]
    split: f64,
    /// Window fixture size
    #[arg(long, default_value_t = 21)]
    m: usize,
    /// Window fixture edge
    #[arg(long, default_value_t = 0.2)]
    gamma_prime: f64,
    #[arg(long, value_enum, default_value_t = Algo::MmApprox)]
    algo: Algo,
    #[arg(long, default_value_t = 100)]
    rounds: usize,
    #[arg(long, default_value_t = 0.1)]
    gamma: f64,
    #[arg(long, default_value_t = 0.1)]
    eta: f64,
    #[arg(long, value_enum, default_value_t = LossKind::Exp)]
    loss: LossKind,
    #[arg(long, value_enum)]
    learner: Option<LearnerKind>,
    #[arg(long, default_value_t = 10)]
    tree_size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutArgs,
}

fn write_out(out: &Path, name: &str, text: &str) -> Result<()> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let path = out.join(name);
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn loss_spec(loss: LossKind, eta: f64) -> LossSpec {
    match loss {
        LossKind::Zeroone => LossSpec::ZeroOne,
        LossKind::Exp => LossSpec::Exp(eta),
    }
}

fn train(a: TrainArgs) -> Result<()> {
    let (source, default_learner) = match (a.data, a.train_file, a.test_file, a.fixture) {
        (Some(path), None, None, None) => {
            (DataSource::Csv { path, label_column: a.label_column, split: a.split }, LearnerKind::Greedy)
        }
        (None, Some(train), Some(test), None) => {
            (DataSource::Files { train, test, label_column: a.label_column }, LearnerKind::Greedy)
        }
        (None, None, None, Some(_)) => (DataSource::Window { m: a.m, gamma_prime: a.gamma_prime }, LearnerKind::BestResponse),
        _ => bail!("give exactly one of --data, --train-file/--test-file or --fixture"),
    };
    let cfg = ExperimentConfig {
        source,
        algo: a.algo,
        rounds: a.rounds,
        gamma: a.gamma,
        eta: a.eta,
        loss: a.loss,
        learner: a.learner.unwrap_or(default_learner),
        tree_size: a.tree_size,
        seed: a.seed,
        out: a.out.out,
    };
    let s = run_experiment(&cfg)?;
    print!("rounds {}  train error {:.6}", s.rounds_run, s.train_error);
    if let Some(e) = s.test_error {
        print!("  test error {e:.6}");
    }
    println!("  loss {:.6e}  flagged {}", s.final_loss, s.flagged_rounds);
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Train(a) => train(a)?,
        Command::Eval { model, data } => {
            let r = evaluate(&model, &data)?;
            println!("m {}  error {:.6}  exp risk {:.6e}", r.m, r.error, r.exp_risk);
        }
        Command::Potentials { k, gamma, t_max, loss, eta, minimal, out } => {
            let text = emit_potential_table(k, gamma, t_max, loss_spec(loss, eta), minimal)?;
            write_out(&out.out, "potentials.tsv", &text)?;
        }
        Command::DegreeMap { gamma, loss, eta, rounds, out } => {
            let text = emit_degree_map(gamma, loss_spec(loss, eta), rounds)?;
            write_out(&out.out, "degree_map.tsv", &text)?;
        }
        Command::EquivalenceCheck { trials, rounds, seed, out } => {
            let reports = run_equivalence(trials, seed, rounds);
            write_out(&out.out, "equivalence.tsv", &emit_equivalence(&reports, rounds))?;
            let failed = reports.iter().filter(|r| !r.agrees(1e-9)).count();
            println!("{} of {} trials agree", trials - failed, trials);
            if failed > 0 {
                bail!("{failed} trials disagree");
            }
        }
        Command::Fixtures { name, gamma, m, k, out } => {
            let text = emit_fixture(name, FixtureParams { gamma, m, k })?;
            write_out(&out.out, "fixture.tsv", &text)?;
        }
    }
    Ok(())
}
