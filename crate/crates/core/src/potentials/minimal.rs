//! Potentials for the minimal weak-learning condition.
//!
//! `φ_t(s) = max_{2<=a<=k} E_{l~b^π_a}[φ_{t−1}(s + e_l)]` where `b^π_a`
//! is the γ-biased uniform distribution on the true label and the `a − 1`
//! wrong labels whose successor states have the largest potential.

use std::collections::HashMap;

use serde::Serialize;

use super::{dp::potential_zeroone_dp, EorDistribution, LossSpec, PotentialError};

/// Default bound on memoized states.
pub const STATE_CAP: usize = 5_000_000;

const DEGREE_TIE_TOL: f64 = 1e-12;

/// Memoized minimal-condition potentials keyed by remaining rounds and
/// the sorted vector of differences `s_l − s_0`.
#[derive(Debug, Clone)]
pub struct PotentialTable {
    pub loss: LossSpec,
    pub gamma: f64,
    pub k: usize,
    entries: HashMap<(usize, Vec<i64>), (f64, usize)>,
}

impl PotentialTable {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Evaluates `φ_t(s)` and the maximizing degree with memoization.
#[derive(Debug, Clone)]
pub struct MinimalSolver {
    table: PotentialTable,
    cap: usize,
}

impl MinimalSolver {
    pub fn new(k: usize, gamma: f64, loss: LossSpec) -> Result<Self, PotentialError> {
        Self::with_cap(k, gamma, loss, STATE_CAP)
    }

    pub fn with_cap(k: usize, gamma: f64, loss: LossSpec, cap: usize) -> Result<Self, PotentialError> {
        if k < 2 {
            return Err(PotentialError::TooFewClasses(k));
        }
        if !(0.0..1.0).contains(&gamma) {
            return Err(PotentialError::Gamma(gamma));
        }
        loss.validate()?;
        Ok(MinimalSolver {
            table: PotentialTable { loss, gamma, k, entries: HashMap::new() },
            cap,
        })
    }

    pub fn table(&self) -> &PotentialTable {
        &self.table
    }

    /// `(φ_t(s), degree)`. At `t = 0` the degree is reported as `k`.
    pub fn value(&mut self, t: usize, s: &[i64]) -> Result<(f64, usize), PotentialError> {
        if s.len() != self.table.k {
            return Err(PotentialError::StateLength { found: s.len(), expected: self.table.k });
        }
        let mut diffs: Vec<i64> = s[1..].iter().map(|&v| v - s[0]).collect();
        diffs.sort_unstable_by(|a, b| b.cmp(a));
        self.eval(t, diffs)
    }

    fn loss_of(&self, diffs: &[i64]) -> f64 {
        let mut s = Vec::with_capacity(diffs.len() + 1);
        s.push(0);
        s.extend_from_slice(diffs);
        self.table.loss.eval(&s)
    }

    fn eval(&mut self, t: usize, diffs: Vec<i64>) -> Result<(f64, usize), PotentialError> {
        let k = self.table.k;
        if t == 0 {
            return Ok((self.loss_of(&diffs), k));
        }
        let key = (t, diffs);
        if let Some(&hit) = self.table.entries.get(&key) {
            return Ok(hit);
        }
        let diffs = key.1.clone();
        let gamma = self.table.gamma;

        let down: Vec<i64> = diffs.iter().map(|d| d - 1).collect();
        let (true_child, _) = self.eval(t - 1, canonical(down))?;
        let mut wrong = Vec::with_capacity(k - 1);
        for j in 0..diffs.len() {
            let mut child = diffs.clone();
            child[j] += 1;
            wrong.push(self.eval(t - 1, canonical(child))?.0);
        }
        // stable: equal potentials keep label order
        let mut order: Vec<usize> = (0..wrong.len()).collect();
        order.sort_by(|&a, &b| wrong[b].partial_cmp(&wrong[a]).unwrap_or(std::cmp::Ordering::Equal));

        let mut candidates = Vec::with_capacity(k - 1);
        let mut top_sum = 0.0;
        for a in 2..=k {
            top_sum += wrong[order[a - 2]];
            let share = (1.0 - gamma) / a as f64;
            candidates.push((a, (share + gamma) * true_child + share * top_sum));
        }
        let best = candidates.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
        let tol = DEGREE_TIE_TOL * best.abs().max(1.0);
        let degree = candidates.iter().rev().find(|c| c.1 >= best - tol).map(|c| c.0).unwrap_or(k);

        if self.table.entries.len() >= self.cap {
            return Err(PotentialError::StateCap { cap: self.cap });
        }
        self.table.entries.insert(key, (best, degree));
        Ok((best, degree))
    }
}

fn canonical(mut diffs: Vec<i64>) -> Vec<i64> {
    diffs.sort_unstable_by(|a, b| b.cmp(a));
    diffs
}

/// One-shot evaluation of the minimal-condition potential.
pub fn potential_minimal(gamma: f64, loss: LossSpec, t: usize, s: &[i64]) -> Result<(f64, usize), PotentialError> {
    MinimalSolver::new(s.len(), gamma, loss)?.value(t, s)
}

/// A degree-map pixel for `k = 3`: `u = s_1 − s_0`, `v = s_2 − s_0`,
/// `t` rounds remaining.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DegreeCell {
    pub t: usize,
    pub u: i64,
    pub v: i64,
    pub degree: usize,
    pub value: f64,
}

/// Degrees of every state reachable from the origin after `T − t` rounds,
/// for each `t = T, …, 1`.
pub fn degree_map(gamma: f64, loss: LossSpec, horizon: usize, k: usize) -> Result<Vec<DegreeCell>, PotentialError> {
    if k != 3 {
        return Err(PotentialError::DegreeMapDimension(k));
    }
    let mut solver = MinimalSolver::new(3, gamma, loss)?;
    let mut cells = Vec::new();
    for t in (1..=horizon).rev() {
        let played = (horizon - t) as i64;
        let mut layer = Vec::new();
        for s0 in 0..=played {
            for s1 in 0..=(played - s0) {
                let s2 = played - s0 - s1;
                let (value, degree) = solver.value(t, &[s0, s1, s2])?;
                layer.push(DegreeCell { t, u: s1 - s0, v: s2 - s0, degree, value });
            }
        }
        layer.sort_by_key(|c| (c.u, c.v));
        cells.extend(layer);
    }
    Ok(cells)
}

/// `(φ_T(0), φ^u_T(0))` for the 0-1 loss, with `u` the γ-biased uniform
/// distribution.
pub fn minimal_vs_fixed_gap(gamma: f64, horizon: usize, k: usize) -> Result<(f64, f64), PotentialError> {
    let zero = vec![0i64; k];
    let (minimal, _) = MinimalSolver::new(k, gamma, LossSpec::ZeroOne)?.value(horizon, &zero)?;
    let fixed = potential_zeroone_dp(&EorDistribution::biased_uniform(k, gamma), horizon, &zero)?;
    Ok((minimal, fixed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::potential_fixed;

    #[test]
    fn zero_rounds_reports_loss_and_k() {
        let (v, a) = potential_minimal(0.1, LossSpec::ZeroOne, 0, &[1, 0, 0, 2]).unwrap();
        assert_eq!(v, 1.0);
        assert_eq!(a, 4);
    }

    #[test]
    fn two_classes_match_fixed_condition() {
        for gamma in [0.0, 0.2, 0.5] {
            let b = EorDistribution::biased_uniform(2, gamma);
            for loss in [LossSpec::ZeroOne, LossSpec::Exp(0.3)] {
                for t in 0..7 {
                    for s in [[0, 0], [2, 1], [0, 3]] {
                        let (v, a) = potential_minimal(gamma, loss, t, &s).unwrap();
                        let want = potential_fixed(&b, loss, t, &s).unwrap();
                        assert!((v - want).abs() < 1e-12, "{gamma} {loss:?} {t} {s:?}");
                        assert_eq!(a, 2);
                    }
                }
            }
        }
    }

    #[test]
    fn state_cap_is_enforced() {
        let mut solver = MinimalSolver::with_cap(4, 0.0, LossSpec::ZeroOne, 10).unwrap();
        assert_eq!(solver.value(8, &[0; 4]), Err(PotentialError::StateCap { cap: 10 }));
    }

    #[test]
    fn degree_map_rejects_other_k() {
        assert_eq!(degree_map(0.1, LossSpec::ZeroOne, 3, 4), Err(PotentialError::DegreeMapDimension(4)));
    }

    #[test]
    fn degree_map_covers_reachable_states() {
        let cells = degree_map(0.0, LossSpec::Exp(0.1), 4, 3).unwrap();
        // layer with n rounds played has (n+1)(n+2)/2 states
        let expected: usize = (0..4).map(|n| (n + 1) * (n + 2) / 2).sum();
        assert_eq!(cells.len(), expected);
        assert!(cells.iter().all(|c| (2..=3).contains(&c.degree)));
    }
}
