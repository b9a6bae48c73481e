//! Approximate solutions of the games `min_λ max_C C • (H_λ − B)`.
//!
//! Each cost family is a product of per-row cones. After scaling cost
//! matrices to total ℓ1 norm one, the feasible set is the convex hull of
//! single-row matrices built from the generators of each row cone, so the
//! game becomes a finite matrix game between classifiers and
//! `(row, generator)` pairs. Both players run optimistic multiplicative
//! weights; the averaged strategies give exact upper and lower bounds on
//! the value.

use itertools::Itertools;
use ndarray::Array2;

use super::{Condition, ConditionError, ConditionName};
use crate::domain::{CostMatrix, Family};

/// Outcome of a game solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Some mixture of classifiers keeps every admissible cost at or below
    /// the baseline: the upper bound is `<= 0`.
    Satisfied,
    /// Some admissible cost beats every classifier: the lower bound is `> 0`.
    Violated,
    /// Bounds straddle zero at this iteration budget.
    Undetermined,
}

#[derive(Debug, Clone)]
pub struct GameValueReport {
    /// Midpoint of the certified bounds.
    pub value: f64,
    pub upper: f64,
    pub lower: f64,
    /// `upper − lower`.
    pub gap: f64,
    /// Mixture over the classifier space achieving `upper`.
    pub lambda: Vec<f64>,
    /// Normalized cost matrix achieving `lower`.
    pub cost: CostMatrix,
    pub iterations: usize,
    pub verdict: Verdict,
}

impl GameValueReport {
    pub fn converged(&self, threshold: f64) -> bool {
        self.gap < threshold
    }
}

/// A single-row cost generator with payoff
/// `Σ_l dir_l 1[h(row) = l] − offset`.
#[derive(Debug, Clone)]
struct Generator {
    row: usize,
    dir: Vec<(usize, f64)>,
    offset: f64,
}

fn generators(cond: &Condition) -> Vec<Generator> {
    let k = cond.k;
    let kf = k as f64;
    let mut out = Vec::new();
    for (row, &y) in cond.labels.iter().enumerate() {
        let wrong: Vec<usize> = (0..k).filter(|&l| l != y).collect();
        let dirs: Vec<Vec<(usize, f64)>> = match (cond.name, cond.family) {
            (ConditionName::Minimal, _) | (_, Family::Mr) => {
                wrong.iter().map(|&l| vec![(l, 0.5), (y, -0.5)]).collect()
            }
            (_, Family::Sam) => vec![wrong.iter().map(|&l| (l, 1.0 / (kf - 1.0))).collect()],
            (_, Family::M1) => {
                let mut d: Vec<(usize, f64)> = wrong.iter().map(|&l| (l, 1.0 / kf)).collect();
                d.push((y, -1.0 / kf));
                vec![d]
            }
            (_, Family::Mh) => {
                let mut d: Vec<Vec<(usize, f64)>> = vec![vec![(y, -1.0)]];
                d.extend(wrong.iter().map(|&l| vec![(l, 1.0)]));
                d
            }
            (_, Family::Eor) => wrong.iter().map(|&l| vec![(l, 1.0)]).collect(),
            (_, Family::Unconstrained) => (0..k).flat_map(|l| [vec![(l, 1.0)], vec![(l, -1.0)]]).collect(),
        };
        for dir in dirs {
            let offset = match &cond.baseline {
                Some(b) => dir.iter().map(|&(l, w)| w * b.entries()[(row, l)]).sum(),
                // pair direction against B^MR_γ: (−γ/2 − γ/2) / 2
                None => -cond.gamma / 2.0,
            };
            out.push(Generator { row, dir, offset });
        }
    }
    out
}

fn payoff_matrix(space: &[Vec<usize>], gens: &[Generator]) -> Vec<Vec<f64>> {
    space
        .iter()
        .map(|h| {
            gens.iter()
                .map(|g| g.dir.iter().filter(|&&(l, _)| h[g.row] == l).map(|&(_, w)| w).sum::<f64>() - g.offset)
                .collect()
        })
        .collect()
}

fn softmax(scores: &[f64], sign: f64, eta: f64) -> Vec<f64> {
    let top = scores.iter().map(|&s| sign * eta * s).fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = scores.iter().map(|&s| (sign * eta * s - top).exp()).collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|v| v / z).collect()
}

fn check_space(space: &[Vec<usize>], m: usize, k: usize) -> Result<(), ConditionError> {
    if space.is_empty() {
        return Err(ConditionError::EmptySpace);
    }
    for (index, h) in space.iter().enumerate() {
        if h.len() != m || h.iter().any(|&l| l >= k) {
            return Err(ConditionError::BadClassifier { index });
        }
    }
    Ok(())
}

/// Solves the condition's game over a finite classifier space by
/// optimistic multiplicative-weights self-play.
pub fn solve_game(space: &[Vec<usize>], cond: &Condition, iters: usize) -> Result<GameValueReport, ConditionError> {
    let (m, k) = (cond.labels.len(), cond.k);
    check_space(space, m, k)?;
    let gens = generators(cond);
    let pay = payoff_matrix(space, &gens);
    let (nh, ng) = (space.len(), gens.len());
    let range = pay.iter().flatten().fold(1e-12f64, |a, v| a.max(v.abs()));
    let eta = 0.25 / range;

    let mut cum_h = vec![0.0; nh];
    let mut cum_g = vec![0.0; ng];
    let mut last_h = vec![0.0; nh];
    let mut last_g = vec![0.0; ng];
    let mut avg_h = vec![0.0; nh];
    let mut avg_g = vec![0.0; ng];
    let mut best_upper = (f64::INFINITY, vec![1.0 / nh as f64; nh]);
    let mut best_lower = (f64::NEG_INFINITY, vec![1.0 / ng as f64; ng]);
    let mut used = 0;

    for it in 0..iters.max(1) {
        used = it + 1;
        let hint_h: Vec<f64> = cum_h.iter().zip(&last_h).map(|(c, l)| c + l).collect();
        let hint_g: Vec<f64> = cum_g.iter().zip(&last_g).map(|(c, l)| c + l).collect();
        let x = softmax(&hint_h, -1.0, eta);
        let q = softmax(&hint_g, 1.0, eta);
        for h in 0..nh {
            last_h[h] = (0..ng).map(|j| pay[h][j] * q[j]).sum();
        }
        for j in 0..ng {
            last_g[j] = (0..nh).map(|h| x[h] * pay[h][j]).sum();
        }
        for h in 0..nh {
            cum_h[h] += last_h[h];
            avg_h[h] += x[h];
        }
        for j in 0..ng {
            cum_g[j] += last_g[j];
            avg_g[j] += q[j];
        }
        let n = used as f64;
        let lam: Vec<f64> = avg_h.iter().map(|v| v / n).collect();
        let mix: Vec<f64> = avg_g.iter().map(|v| v / n).collect();
        let upper = (0..ng).map(|j| (0..nh).map(|h| lam[h] * pay[h][j]).sum::<f64>()).fold(f64::NEG_INFINITY, f64::max);
        let lower = (0..nh).map(|h| (0..ng).map(|j| pay[h][j] * mix[j]).sum::<f64>()).fold(f64::INFINITY, f64::min);
        if upper < best_upper.0 {
            best_upper = (upper, lam);
        }
        if lower > best_lower.0 {
            best_lower = (lower, mix);
        }
        if best_upper.0 - best_lower.0 < 1e-13 {
            break;
        }
    }

    let mut cost = Array2::zeros((m, k));
    for (g, &w) in gens.iter().zip(&best_lower.1) {
        for &(l, v) in &g.dir {
            cost[(g.row, l)] += w * v;
        }
    }
    let family = if cond.name == ConditionName::Minimal { Family::Mr } else { cond.family };
    let cost = CostMatrix::new(cost.clone(), family, &cond.labels).unwrap_or_else(|_| CostMatrix::unconstrained(cost));

    let (upper, lower) = (best_upper.0, best_lower.0);
    let verdict = if upper <= 0.0 {
        Verdict::Satisfied
    } else if lower > 0.0 {
        Verdict::Violated
    } else {
        Verdict::Undetermined
    };
    Ok(GameValueReport {
        value: (upper + lower) / 2.0,
        upper,
        lower,
        gap: (upper - lower).max(0.0),
        lambda: best_upper.1,
        cost,
        iterations: used,
        verdict,
    })
}

/// Result of the separation test.
#[derive(Debug, Clone)]
pub enum Boostability {
    /// `lambda` labels every example correctly with the given margin.
    Yes { margin: f64, lambda: Vec<f64> },
    /// Every classifier has non-negative cost on `certificate` while every
    /// `B^MR_γ` baseline, `γ > 0`, has negative cost.
    No { certificate: CostMatrix },
    Undetermined { lower: f64, upper: f64 },
}

impl Boostability {
    pub fn is_yes(&self) -> bool {
        matches!(self, Boostability::Yes { .. })
    }

    pub fn is_no(&self) -> bool {
        matches!(self, Boostability::No { .. })
    }
}

/// `min_i [H_λ(i, y_i) − max_{l≠y_i} H_λ(i, l)]`.
pub fn margin(space: &[Vec<usize>], lambda: &[f64], labels: &[usize], k: usize) -> f64 {
    labels
        .iter()
        .enumerate()
        .map(|(i, &y)| {
            let mut votes = vec![0.0; k];
            for (h, &w) in space.iter().zip(lambda) {
                votes[h[i]] += w;
            }
            let best_wrong = (0..k).filter(|&l| l != y).map(|l| votes[l]).fold(f64::NEG_INFINITY, f64::max);
            votes[y] - best_wrong
        })
        .fold(f64::INFINITY, f64::min)
}

const SUBSET_BUDGET: usize = 200_000;

/// Decides whether some mixture of `space` separates the data with
/// positive margin.
///
/// Multiplicative weights run over `(example, wrong label)` pairs against
/// best-responding classifiers. When their bounds do not settle the sign, small
/// uniform mixtures of classifiers and of pairs are enumerated exactly.
pub fn is_boostable(space: &[Vec<usize>], labels: &[usize], k: usize, iters: usize) -> Result<Boostability, ConditionError> {
    check_space(space, labels.len(), k)?;
    let pairs: Vec<(usize, usize)> =
        labels.iter().enumerate().flat_map(|(i, &y)| (0..k).filter(move |&l| l != y).map(move |l| (i, l))).collect();
    // a[h][p] = 1[h(i) = y_i] − 1[h(i) = l]
    let a: Vec<Vec<i32>> = space
        .iter()
        .map(|h| pairs.iter().map(|&(i, l)| i32::from(h[i] == labels[i]) - i32::from(h[i] == l)).collect())
        .collect();
    let np = pairs.len();
    let iters = iters.max(1);
    let eta = (8.0 * (np as f64).ln().max(1.0) / iters as f64).sqrt() / 2.0;

    let mut q = vec![1.0 / np as f64; np];
    let mut counts = vec![0usize; space.len()];
    let mut best_upper = (f64::INFINITY, q.clone());
    for _ in 0..iters {
        let scores: Vec<f64> = a.iter().map(|row| row.iter().zip(&q).map(|(&v, w)| v as f64 * w).sum()).collect();
        let (hbest, &upper) = scores
            .iter()
            .enumerate()
            .fold((0, &f64::NEG_INFINITY), |acc, (h, s)| if *s > *acc.1 { (h, s) } else { acc });
        if upper < best_upper.0 {
            best_upper = (upper, q.clone());
        }
        counts[hbest] += 1;
        for (p, w) in q.iter_mut().enumerate() {
            *w *= (-eta * a[hbest][p] as f64).exp();
        }
        let z: f64 = q.iter().sum();
        q.iter_mut().for_each(|w| *w /= z);
    }
    let lambda: Vec<f64> = counts.iter().map(|&c| c as f64 / iters as f64).collect();
    let lower = margin(space, &lambda, labels, k);

    let certificate = |weights: &[f64]| {
        let mut c = Array2::zeros((labels.len(), k));
        for (&(i, l), &w) in pairs.iter().zip(weights) {
            c[(i, l)] += w;
            c[(i, labels[i])] -= w;
        }
        CostMatrix::new(c.clone(), Family::Mr, labels).unwrap_or_else(|_| CostMatrix::unconstrained(c))
    };

    if lower > 0.0 {
        return Ok(Boostability::Yes { margin: lower, lambda });
    }
    if best_upper.0 <= 0.0 {
        return Ok(Boostability::No { certificate: certificate(&best_upper.1) });
    }

    // uniform mixtures over subsets of classifiers
    for size in 1..=space.len() {
        if binomial(space.len(), size) > SUBSET_BUDGET {
            break;
        }
        for subset in (0..space.len()).combinations(size) {
            let mut lam = vec![0.0; space.len()];
            subset.iter().for_each(|&h| lam[h] = 1.0 / size as f64);
            let mg = margin(space, &lam, labels, k);
            if mg > 0.0 {
                return Ok(Boostability::Yes { margin: mg, lambda: lam });
            }
        }
    }
    // uniform mixtures over small sets of pairs
    for size in 1..=4.min(np) {
        if binomial(np, size) > SUBSET_BUDGET {
            break;
        }
        for subset in (0..np).combinations(size) {
            if a.iter().all(|row| subset.iter().map(|&p| row[p]).sum::<i32>() <= 0) {
                let mut w = vec![0.0; np];
                subset.iter().for_each(|&p| w[p] = 1.0 / size as f64);
                return Ok(Boostability::No { certificate: certificate(&w) });
            }
        }
    }
    Ok(Boostability::Undetermined { lower, upper: best_upper.0 })
}

fn binomial(n: usize, r: usize) -> usize {
    (0..r).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}
