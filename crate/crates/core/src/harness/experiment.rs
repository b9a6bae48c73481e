//! One training run from config to files on disk.

use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::data::{encode, load_csv, load_split_files, random_split, read_raw, Schema};
use super::tsv::{real, Tsv};
use super::HarnessError;
use crate::boosters::{adaboost_mm, drop_factor_exact, os_boost_fixed, BoostRun, StepRule};
use crate::conditions::window_fixture;
use crate::domain::{training_error, Baseline, Dataset, ScoringFunction};
use crate::potentials::LossSpec;
use crate::weaklearners::{Exhaustive, SplitCriterion, TreeLearner, WeakLearner};

/// Slack allowed when re-checking per-round guarantees.
pub const INVARIANT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum Algo {
    MmApprox,
    MmExact,
    Os,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum LearnerKind {
    BestResponse,
    Stump,
    Greedy,
    GreedyInfo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum LossKind {
    Zeroone,
    Exp,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    /// One CSV, split at random into train and test.
    Csv { path: PathBuf, label_column: String, split: f64 },
    /// Explicit train and test CSVs.
    Files { train: PathBuf, test: PathBuf, label_column: String },
    /// The sliding-window fixture; no test set.
    Window { m: usize, gamma_prime: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub source: DataSource,
    pub algo: Algo,
    pub rounds: usize,
    pub gamma: f64,
    pub eta: f64,
    pub loss: LossKind,
    pub learner: LearnerKind,
    pub tree_size: usize,
    pub seed: u64,
    pub out: PathBuf,
}

impl ExperimentConfig {
    pub fn loss_spec(&self) -> LossSpec {
        match self.loss {
            LossKind::Zeroone => LossSpec::ZeroOne,
            LossKind::Exp => LossSpec::Exp(self.eta),
        }
    }

    fn validate(&self) -> Result<(), HarnessError> {
        if let DataSource::Csv { split, .. } = self.source {
            if !(split > 0.0 && split < 1.0) {
                return Err(HarnessError::Config(format!("split must lie in (0, 1), got {split}")));
            }
        }
        if self.algo == Algo::Os && !(0.0..1.0).contains(&self.gamma) {
            return Err(HarnessError::Config(format!("gamma must lie in [0, 1), got {}", self.gamma)));
        }
        if self.algo == Algo::Os && self.loss == LossKind::Exp && (self.eta.is_nan() || self.eta < 0.0) {
            return Err(HarnessError::Config(format!("eta must be non-negative, got {}", self.eta)));
        }
        if matches!(self.learner, LearnerKind::Greedy | LearnerKind::GreedyInfo) && self.tree_size == 0 {
            return Err(HarnessError::Config("tree size must be positive".into()));
        }
        if self.learner == LearnerKind::BestResponse && !matches!(self.source, DataSource::Window { .. }) {
            return Err(HarnessError::Config("the best-response learner needs a finite classifier space (use --fixture window)".into()));
        }
        Ok(())
    }

    fn echo(&self, out: &mut Tsv) {
        match &self.source {
            DataSource::Csv { path, label_column, split } => {
                out.meta("data", path.display()).meta("label_column", label_column).meta("split", real(*split));
            }
            DataSource::Files { train, test, label_column } => {
                out.meta("train", train.display()).meta("test", test.display()).meta("label_column", label_column);
            }
            DataSource::Window { m, gamma_prime } => {
                out.meta("fixture", format!("window(m={m}, gamma'={})", real(*gamma_prime)));
            }
        }
        out.meta("algo", format!("{:?}", self.algo))
            .meta("learner", format!("{:?}", self.learner))
            .meta("rounds", self.rounds)
            .meta("gamma", real(self.gamma))
            .meta("eta", real(self.eta))
            .meta("loss", format!("{:?}", self.loss))
            .meta("tree_size", self.tree_size)
            .meta("seed", self.seed)
            .meta("version", env!("CARGO_PKG_VERSION"));
    }
}

/// What `eval` needs to score new data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub schema: Option<Schema>,
    pub scoring: ScoringFunction,
}

#[derive(Debug, Clone)]
pub struct ExperimentSummary {
    pub rounds_run: usize,
    pub m_train: usize,
    pub m_test: usize,
    pub k: usize,
    pub train_error: f64,
    pub test_error: Option<f64>,
    pub final_loss: f64,
    pub flagged_rounds: usize,
    pub separated: bool,
    pub test_curve: Vec<f64>,
    pub run: BoostRun,
}

/// Re-checks the guarantees every emitted round must satisfy.
pub fn check_invariants(run: &BoostRun, algo: Algo) -> Result<(), HarnessError> {
    let mut prev = run.initial_loss;
    for (j, r) in run.rounds.iter().enumerate() {
        match algo {
            Algo::MmApprox | Algo::MmExact => {
                if !r.clamped && r.alpha > 0.0 {
                    let bound = (1.0 - r.edge * r.edge).max(0.0).sqrt();
                    if r.drop > bound + INVARIANT_TOL {
                        return Err(HarnessError::Invariant { t: r.t, what: format!("drop {} exceeds sqrt(1 - delta^2) = {bound}", r.drop) });
                    }
                    if algo == Algo::MmExact {
                        let exact = drop_factor_exact(r.a_plus, r.a_minus, 1.0, r.edge)?;
                        if (r.drop - exact).abs() > INVARIANT_TOL {
                            return Err(HarnessError::Invariant { t: r.t, what: format!("drop {} differs from exact factor {exact}", r.drop) });
                        }
                    }
                }
                let bound = run.error_bound(j + 1);
                if r.train_error > bound + INVARIANT_TOL {
                    return Err(HarnessError::Invariant { t: r.t, what: format!("training error {} exceeds bound {bound}", r.train_error) });
                }
            }
            Algo::Os => {
                if !r.flagged && r.loss > prev * (1.0 + INVARIANT_TOL) + INVARIANT_TOL {
                    return Err(HarnessError::Invariant { t: r.t, what: format!("average potential rose from {prev} to {}", r.loss) });
                }
            }
        }
        prev = r.loss;
    }
    Ok(())
}

/// Per-round test error of the partial scoring functions.
fn test_curve(scoring: &ScoringFunction, test: &Dataset) -> Vec<f64> {
    let mut scores = Array2::<f64>::zeros((test.m(), scoring.k));
    scoring
        .terms
        .iter()
        .map(|(h, alpha)| {
            for i in 0..test.m() {
                scores[(i, h.predict(test, i))] += alpha;
            }
            training_error(&scores, test.labels())
        })
        .collect()
}

fn write(path: &Path, text: &str) -> Result<(), HarnessError> {
    fs::write(path, text).map_err(|e| HarnessError::Io { path: path.display().to_string(), message: e.to_string() })
}

/// Trains, checks invariants, and writes `curve.tsv`, `metrics.tsv`,
/// `labels.tsv` and `model.json` into `cfg.out`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentSummary, HarnessError> {
    cfg.validate()?;
    let (train, test, schema, space) = match &cfg.source {
        DataSource::Csv { path, label_column, split } => {
            let loaded = load_csv(path, label_column)?;
            let (train, test) = random_split(&loaded.dataset, *split, cfg.seed)?;
            (train, Some(test), Some(loaded.schema), None)
        }
        DataSource::Files { train, test, label_column } => {
            let (loaded, test) = load_split_files(train, test, label_column)?;
            (loaded.dataset, Some(test), Some(loaded.schema), None)
        }
        DataSource::Window { m, gamma_prime } => {
            let (d, space, _) = window_fixture(*m, *gamma_prime)?;
            (d, None, None, Some(space))
        }
    };

    let mut learner: Box<dyn WeakLearner + '_> = match cfg.learner {
        LearnerKind::BestResponse => Box::new(Exhaustive::new(space.clone().expect("checked in validate"))),
        LearnerKind::Stump => Box::new(TreeLearner::stump(&train)),
        LearnerKind::Greedy => Box::new(TreeLearner::new(&train, cfg.tree_size, SplitCriterion::Cost)),
        LearnerKind::GreedyInfo => Box::new(TreeLearner::new(&train, cfg.tree_size, SplitCriterion::InfoGain)),
    };
    let run = match cfg.algo {
        Algo::MmApprox => adaboost_mm(&train, cfg.rounds, learner.as_mut(), StepRule::Approx),
        Algo::MmExact => adaboost_mm(&train, cfg.rounds, learner.as_mut(), StepRule::Exact),
        Algo::Os => {
            let b = Baseline::uniform(train.labels(), train.k(), cfg.gamma);
            os_boost_fixed(&train, &b, cfg.loss_spec(), cfg.rounds, learner.as_mut())?
        }
    };
    drop(learner);
    check_invariants(&run, cfg.algo)?;

    let curve_test = test.as_ref().map(|t| test_curve(&run.scoring, t)).unwrap_or_default();
    let test_error = test.as_ref().map(|t| run.scoring.training_error(t));
    let label_names: Vec<String> = match &schema {
        Some(s) => s.labels.clone(),
        None => (0..train.k()).map(|l| l.to_string()).collect(),
    };

    fs::create_dir_all(&cfg.out).map_err(|e| HarnessError::Io { path: cfg.out.display().to_string(), message: e.to_string() })?;

    let mut curve = Tsv::new();
    cfg.echo(&mut curve);
    curve.meta("labels", label_names.iter().enumerate().map(|(i, n)| format!("{i}={n}")).collect::<Vec<_>>().join(" "));
    if let Some(s) = &schema {
        let kinds: Vec<String> = s.features.iter().map(|f| format!("{}={:?}", f.name, f.kind)).collect();
        curve.meta("columns", kinds.join(" "));
    }
    curve.header(&["t", "edge", "alpha", "loss", "train_error", "test_error", "flagged"]);
    for (j, r) in run.rounds.iter().enumerate() {
        curve.row(&[
            r.t.to_string(),
            real(r.edge),
            real(r.alpha),
            real(r.loss),
            real(r.train_error),
            curve_test.get(j).map_or_else(|| "NaN".to_string(), |&e| real(e)),
            u8::from(r.flagged).to_string(),
        ]);
    }
    write(&cfg.out.join("curve.tsv"), &curve.finish())?;

    let final_loss = run.rounds.last().map_or(run.initial_loss, |r| r.loss);
    let summary = ExperimentSummary {
        rounds_run: run.rounds.len(),
        m_train: train.m(),
        m_test: test.as_ref().map_or(0, Dataset::m),
        k: train.k(),
        train_error: run.training_error(),
        test_error,
        final_loss,
        flagged_rounds: run.rounds.iter().filter(|r| r.flagged).count(),
        separated: run.separated,
        test_curve: curve_test,
        run,
    };

    let mut metrics = Tsv::new();
    cfg.echo(&mut metrics);
    metrics.header(&["key", "value"]);
    metrics
        .row(&["rounds_run".into(), summary.rounds_run.to_string()])
        .row(&["m_train".into(), summary.m_train.to_string()])
        .row(&["m_test".into(), summary.m_test.to_string()])
        .row(&["k".into(), summary.k.to_string()])
        .row(&["train_error".into(), real(summary.train_error)])
        .row(&["test_error".into(), summary.test_error.map_or_else(|| "NaN".into(), real)])
        .row(&["final_loss".into(), real(summary.final_loss)])
        .row(&["flagged_rounds".into(), summary.flagged_rounds.to_string()])
        .row(&["separated".into(), summary.separated.to_string()]);
    write(&cfg.out.join("metrics.tsv"), &metrics.finish())?;

    let mut labels = Tsv::new();
    labels.header(&["index", "label"]);
    for (i, n) in label_names.iter().enumerate() {
        labels.row(&[i.to_string(), n.clone()]);
    }
    write(&cfg.out.join("labels.tsv"), &labels.finish())?;

    let model = Model { schema, scoring: summary.run.scoring.clone() };
    let json = serde_json::to_string_pretty(&model).map_err(|e| HarnessError::Config(e.to_string()))?;
    write(&cfg.out.join("model.json"), &json)?;
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub m: usize,
    pub error: f64,
    pub exp_risk: f64,
}

/// Scores a CSV with a saved model.
pub fn evaluate(model_path: &Path, data_path: &Path) -> Result<EvalReport, HarnessError> {
    let text = fs::read_to_string(model_path).map_err(|e| HarnessError::Io { path: model_path.display().to_string(), message: e.to_string() })?;
    let model: Model = serde_json::from_str(&text).map_err(|e| HarnessError::Config(format!("{}: {e}", model_path.display())))?;
    let schema = model.schema.ok_or_else(|| HarnessError::Config("model was trained on a fixture and cannot score CSV data".into()))?;
    let d = encode(&read_raw(data_path)?, &schema, data_path)?;
    Ok(EvalReport { m: d.m(), error: model.scoring.training_error(&d), exp_risk: model.scoring.exp_risk(&d) })
}
