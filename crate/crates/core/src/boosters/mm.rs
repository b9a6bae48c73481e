use ndarray::Array2;

use super::{digest, BoostError, BoostRun, RoundRecord, ALPHA_MAX};
use crate::domain::{training_error, Dataset, ScoringFunction, StateMatrix};
use crate::weaklearners::WeakLearner;

/// How AdaBoost.MM picks `α_t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepRule {
    /// `½ ln((1 + δ) / (1 − δ))`.
    Approx,
    /// `½ ln(A_+ / A_−)`.
    Exact,
}

/// Shifted exponentials `e^{f(i,l) − f(i,y_i) − shift}` for `l ≠ y_i`
/// (zero at `y_i`) and the shift, the largest exponent.
fn shifted_weights(f: &Array2<f64>, labels: &[usize]) -> (Array2<f64>, f64) {
    let mut shift = f64::NEG_INFINITY;
    for (i, &y) in labels.iter().enumerate() {
        for l in 0..f.ncols() {
            if l != y {
                shift = shift.max(f[(i, l)] - f[(i, y)]);
            }
        }
    }
    let mut w = Array2::zeros(f.dim());
    for (i, &y) in labels.iter().enumerate() {
        for l in 0..f.ncols() {
            if l != y {
                w[(i, l)] = (f[(i, l)] - f[(i, y)] - shift).exp();
            }
        }
    }
    (w, shift)
}

fn log_total_loss(f: &Array2<f64>, labels: &[usize]) -> f64 {
    let (w, shift) = shifted_weights(f, labels);
    shift + w.sum().ln()
}

/// The adaptive cost matrix: `e^{f(i,l) − f(i,y_i)}` off the true label and
/// minus the row sum on it.
fn adaptive_cost(w: &Array2<f64>, labels: &[usize]) -> Array2<f64> {
    let mut c = w.clone();
    for (i, &y) in labels.iter().enumerate() {
        c[(i, y)] = -w.row(i).sum();
    }
    c
}

/// `δ = −C • 1_h / Z` for the adaptive cost matrix of state `f`.
pub fn edge_minimal(f: &Array2<f64>, labels: &[usize], predictions: &[usize]) -> f64 {
    let (w, _) = shifted_weights(f, labels);
    let z = w.sum();
    if z.is_nan() || z <= 0.0 {
        return 0.0;
    }
    let c = adaptive_cost(&w, labels);
    let cost: f64 = predictions.iter().enumerate().map(|(i, &p)| c[(i, p)]).sum();
    (-cost / z).clamp(-1.0, 1.0)
}

/// Exact per-round loss ratio `Z_t / Z_{t−1}` under the exact step,
/// `(1 − c) + √(c² − δ²)` with `c = (A_+ + A_−) / Z_{t−1}`.
pub fn drop_factor_exact(a_plus: f64, a_minus: f64, z_prev: f64, delta: f64) -> Result<f64, BoostError> {
    let domain = BoostError::DropFactorDomain { a_plus, a_minus, z_prev, delta };
    let tol = 1e-12 * z_prev.abs().max(1.0);
    if !(a_minus >= 0.0 && a_minus <= a_plus + tol && a_plus + a_minus <= z_prev + tol && z_prev > 0.0) {
        return Err(domain);
    }
    if ((a_plus - a_minus) / z_prev - delta).abs() > 1e-9 {
        return Err(domain);
    }
    let c = ((a_plus + a_minus) / z_prev).min(1.0);
    Ok((1.0 - c) + (c * c - delta * delta).max(0.0).sqrt())
}

/// AdaBoost.MM on the original labels.
pub fn adaboost_mm(d: &Dataset, rounds: usize, learner: &mut dyn WeakLearner, rule: StepRule) -> BoostRun {
    let (m, k) = (d.m(), d.k());
    let labels = d.labels();
    let mut state = StateMatrix::new(m, k);
    let mut scoring = ScoringFunction::new(k);
    let mut records = Vec::with_capacity(rounds);
    let mut log_z = ((m * (k - 1)) as f64).ln();
    let initial_loss = log_z.exp();
    let mut separated = false;

    for t in 1..=rounds {
        let (w, _) = shifted_weights(&state.weighted, labels);
        let z = w.sum();
        let cost = adaptive_cost(&w, labels);
        let learned = learner.learn(&cost);
        let h = &learned.predictions;

        let mut a_plus = 0.0;
        let mut a_minus = 0.0;
        let mut all_correct = true;
        for (i, &y) in labels.iter().enumerate() {
            if h[i] == y {
                a_plus += w.row(i).sum();
            } else {
                a_minus += w[(i, h[i])];
                all_correct = false;
            }
        }
        let hcost: f64 = h.iter().enumerate().map(|(i, &p)| cost[(i, p)]).sum();
        let delta = (-hcost / z).clamp(-1.0, 1.0);

        let mut flagged = false;
        let mut clamped = false;
        let mut alpha = if all_correct {
            clamped = true;
            ALPHA_MAX
        } else if delta <= 0.0 {
            flagged = true;
            0.0
        } else {
            match rule {
                StepRule::Approx => 0.5 * ((1.0 + delta) / (1.0 - delta)).ln(),
                StepRule::Exact => 0.5 * (a_plus / a_minus).ln(),
            }
        };
        if alpha > ALPHA_MAX || alpha.is_nan() {
            alpha = ALPHA_MAX;
            clamped = true;
        }
        if alpha < 0.0 {
            alpha = 0.0;
            flagged = true;
        }

        state.record(h, alpha);
        scoring.push(learned.classifier.clone(), alpha);
        let new_log_z = log_total_loss(&state.weighted, labels);
        records.push(RoundRecord {
            t,
            index: learned.index,
            cost_digest: digest(&cost),
            edge: delta,
            alpha,
            loss: new_log_z.exp(),
            log_loss: new_log_z,
            drop: (new_log_z - log_z).exp(),
            c: (a_plus + a_minus) / z,
            a_plus: a_plus / z,
            a_minus: a_minus / z,
            flagged,
            clamped,
            train_error: training_error(&state.weighted, labels),
        });
        log_z = new_log_z;
        if all_correct {
            separated = true;
            break;
        }
    }
    BoostRun {
        rounds: records,
        scoring,
        scores: state.weighted,
        labels: labels.to_vec(),
        initial_loss,
        separated,
    }
}
