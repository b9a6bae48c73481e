use std::collections::HashMap;

use ndarray::Array2;

use super::{digest, BoostError, BoostRun, RoundRecord};
use crate::conditions::validate_eor_baseline;
use crate::domain::{training_error, Baseline, Dataset, ScoringFunction, StateMatrix};
use crate::potentials::{potential_fixed, EorDistribution, LossSpec};
use crate::weaklearners::WeakLearner;

/// Reorders a row so the true label comes first.
fn true_first<T: Copy>(row: &[T], y: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(row.len());
    out.push(row[y]);
    out.extend(row.iter().enumerate().filter(|&(l, _)| l != y).map(|(_, &v)| v));
    out
}

struct PotentialCache {
    loss: LossSpec,
    rows: Vec<EorDistribution>,
    memo: HashMap<(usize, usize, Vec<i64>), f64>,
    /// Rows with identical distributions share an id.
    ids: Vec<usize>,
}

impl PotentialCache {
    fn new(b: &Baseline, labels: &[usize], loss: LossSpec) -> Result<Self, BoostError> {
        let mut rows: Vec<EorDistribution> = Vec::new();
        let mut ids = Vec::with_capacity(labels.len());
        for (i, &y) in labels.iter().enumerate() {
            let row: Vec<f64> = b.entries().row(i).to_vec();
            let dist = EorDistribution::new(true_first(&row, y), b.gamma())?;
            match rows.iter().position(|r| r == &dist) {
                Some(id) => ids.push(id),
                None => {
                    ids.push(rows.len());
                    rows.push(dist);
                }
            }
        }
        Ok(PotentialCache { loss, rows, memo: HashMap::new(), ids })
    }

    /// `φ^{b_i}_t(s)` with `s` in true-label-first order.
    fn get(&mut self, i: usize, t: usize, s: Vec<i64>) -> Result<f64, BoostError> {
        let id = self.ids[i];
        if let Some(&v) = self.memo.get(&(id, t, s.clone())) {
            return Ok(v);
        }
        let v = potential_fixed(&self.rows[id], self.loss, t, &s)?;
        self.memo.insert((id, t, s), v);
        Ok(v)
    }

    fn average(&mut self, state: &StateMatrix, labels: &[usize], t: usize) -> Result<f64, BoostError> {
        let mut total = 0.0;
        for (i, &y) in labels.iter().enumerate() {
            total += self.get(i, t, true_first(&state.votes_of(i), y))?;
        }
        Ok(total / labels.len() as f64)
    }
}

/// The OS booster for the fixed condition `(C^eor, B)`.
///
/// Round `t` (0-based) uses `C_t(i, l) = φ^{b_i}_{T−t−1}(s_t(i) + e_l)`.
/// Weights are 1 for the 0-1 loss and `η` for the exponential loss. A
/// round whose classifier costs more than the baseline is flagged; the
/// run continues.
pub fn os_boost_fixed(
    d: &Dataset,
    b: &Baseline,
    loss: LossSpec,
    rounds: usize,
    learner: &mut dyn WeakLearner,
) -> Result<BoostRun, BoostError> {
    let (m, k) = (d.m(), d.k());
    let labels = d.labels();
    if b.entries().dim() != (m, k) {
        return Err(BoostError::Shape { expected: (m, k), found: b.entries().dim() });
    }
    validate_eor_baseline(b.entries(), labels, b.gamma())?;
    loss.validate()?;
    let alpha = match loss {
        LossSpec::ZeroOne => 1.0,
        LossSpec::Exp(eta) => eta,
    };
    let mut cache = PotentialCache::new(b, labels, loss)?;
    let mut state = StateMatrix::new(m, k);
    let mut scoring = ScoringFunction::new(k);
    let mut records = Vec::with_capacity(rounds);
    let initial_loss = cache.average(&state, labels, rounds)?;
    let mut prev = initial_loss;

    for t in 0..rounds {
        let remaining = rounds - t - 1;
        let mut cost = Array2::zeros((m, k));
        for (i, &y) in labels.iter().enumerate() {
            let votes = state.votes_of(i);
            for l in 0..k {
                let mut next = votes.clone();
                next[l] += 1;
                cost[(i, l)] = cache.get(i, remaining, true_first(&next, y))?;
            }
        }
        let learned = learner.learn(&cost);
        let h = &learned.predictions;
        let baseline_cost = (&cost * b.entries()).sum();
        let h_cost: f64 = h.iter().enumerate().map(|(i, &p)| cost[(i, p)]).sum();
        let edge = baseline_cost - h_cost;

        state.record(h, alpha);
        scoring.push(learned.classifier.clone(), alpha);
        let avg = cache.average(&state, labels, remaining)?;
        records.push(RoundRecord {
            t: t + 1,
            index: learned.index,
            cost_digest: digest(&cost),
            edge,
            alpha,
            loss: avg,
            log_loss: avg.ln(),
            drop: if prev > 0.0 { avg / prev } else { 1.0 },
            c: f64::NAN,
            a_plus: f64::NAN,
            a_minus: f64::NAN,
            flagged: edge < -1e-12 * (m as f64),
            clamped: false,
            train_error: training_error(&state.weighted, labels),
        });
        prev = avg;
    }
    Ok(BoostRun {
        rounds: records,
        scoring,
        scores: state.weighted,
        labels: labels.to_vec(),
        initial_loss,
        separated: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weaklearners::Exhaustive;

    #[test]
    fn zero_rounds_leave_the_trivial_scorer() {
        let d = Dataset::indexed(vec![0, 1, 2], 3).unwrap();
        let b = Baseline::uniform(d.labels(), 3, 0.1);
        let run = os_boost_fixed(&d, &b, LossSpec::ZeroOne, 0, &mut Exhaustive::new(vec![vec![0, 0, 0]])).unwrap();
        assert!(run.rounds.is_empty());
        assert_eq!(run.training_error(), 1.0);
        assert_eq!(run.initial_loss, 1.0);
    }

    #[test]
    fn average_potential_never_rises_with_a_good_learner() {
        let labels: Vec<usize> = (0..9).map(|i| i % 3).collect();
        let d = Dataset::indexed(labels.clone(), 3).unwrap();
        let b = Baseline::uniform(&labels, 3, 0.2);
        let space = vec![labels.clone(), vec![0; 9], vec![1; 9], vec![2; 9]];
        for loss in [LossSpec::ZeroOne, LossSpec::Exp(0.2f64.ln_1p())] {
            let run = os_boost_fixed(&d, &b, loss, 6, &mut Exhaustive::new(space.clone())).unwrap();
            let mut prev = run.initial_loss;
            for r in &run.rounds {
                assert!(!r.flagged);
                assert!(r.loss <= prev + 1e-12);
                prev = r.loss;
            }
            assert!(run.training_error() <= run.initial_loss + 1e-12);
        }
    }

    #[test]
    fn rejects_non_eor_baseline() {
        let d = Dataset::indexed(vec![0, 1], 3).unwrap();
        let b = Baseline::mh(d.labels(), 3, 0.1);
        let err = os_boost_fixed(&d, &b, LossSpec::ZeroOne, 2, &mut Exhaustive::new(vec![vec![0, 1]]));
        assert!(err.is_err());
    }
}
