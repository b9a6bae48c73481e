//! Counterexample fixtures: two constant classifiers that satisfy SAMME
//! without being boostable, sliding windows that are boostable yet fail a
//! fixed edge-over-random condition, and subset classifiers that satisfy
//! `(C^eor, U_γ)` while failing the MH condition.

use itertools::Itertools;
use ndarray::{array, Array2};

use super::ConditionError;
use crate::domain::{Baseline, CostMatrix, Dataset, Family};

/// Two examples with labels 0 and 1 (k = 3), classifiers `h ≡ 0` and
/// `h ≡ 1`, and the cost matrix under which both lose to `U_γ`.
pub fn figure1_fixture() -> (Dataset, Vec<Vec<usize>>, CostMatrix) {
    let d = Dataset::indexed(vec![0, 1], 3).expect("valid fixture");
    let space = vec![vec![0, 0], vec![1, 1]];
    let c = CostMatrix::new(array![[-1.0, 1.0, 0.0], [1.0, -1.0, 0.0]], Family::Eor, d.labels()).expect("EOR rows");
    (d, space, c)
}

/// Window fixture with `k = 3`, labels `i mod 3` and target baseline `U_γ`.
pub fn window_fixture(m: usize, gamma_prime: f64) -> Result<(Dataset, Vec<Vec<usize>>, CostMatrix), ConditionError> {
    let labels: Vec<usize> = (0..m).map(|i| i % 3).collect();
    let gamma = (3.0 * gamma_prime).min(0.99);
    let b = Baseline::uniform(&labels, 3, gamma);
    window_fixture_with(labels, 3, &b, gamma_prime)
}

/// `m` classifiers, classifier `j` correct exactly on the wrap-around window
/// of length `⌊m(1/2 + γ')⌋` starting at `j`. Elsewhere it predicts
/// `ŷ_i = argmin_{l≠y_i} B(i, l)` (lowest label on ties), and the returned
/// cost matrix charges 1 for predicting `ŷ_i`.
pub fn window_fixture_with(
    labels: Vec<usize>,
    k: usize,
    b: &Baseline,
    gamma_prime: f64,
) -> Result<(Dataset, Vec<Vec<usize>>, CostMatrix), ConditionError> {
    let m = labels.len();
    if m as f64 * gamma_prime <= 1.0 {
        return Err(ConditionError::WindowTooShort { m, gamma_prime });
    }
    let d = Dataset::indexed(labels, k)?;
    let width = (m as f64 * (0.5 + gamma_prime) + 1e-9).floor() as usize;
    let yhat: Vec<usize> = d
        .labels()
        .iter()
        .enumerate()
        .map(|(i, &y)| {
            (0..k)
                .filter(|&l| l != y)
                .fold(None, |best: Option<usize>, l| match best {
                    Some(bl) if b.entries()[(i, bl)] <= b.entries()[(i, l)] => Some(bl),
                    _ => Some(l),
                })
                .expect("k >= 2")
        })
        .collect();
    let space = (0..m)
        .map(|j| {
            (0..m)
                .map(|i| if (i + m - j) % m < width { d.labels()[i] } else { yhat[i] })
                .collect()
        })
        .collect();
    let mut c = Array2::zeros((m, k));
    for (i, &l) in yhat.iter().enumerate() {
        c[(i, l)] = 1.0;
    }
    let cost = CostMatrix::new(c, Family::Eor, d.labels())?;
    Ok((d, space, cost))
}

/// How subset classifiers predict outside their subset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WrongLabelRule {
    /// Always `y_i + 1 (mod k)`.
    Fixed,
    /// One classifier per shift `r = 1..k−1`, predicting `y_i + r (mod k)`.
    AllShifts,
}

/// For every `(1/k + γ) m`-element subset of the examples, classifiers
/// correct exactly on that subset. Labels are `i mod k`.
pub fn mh_overdemand_fixture(
    k: usize,
    gamma: f64,
    m: usize,
    rule: WrongLabelRule,
) -> Result<(Dataset, Vec<Vec<usize>>), ConditionError> {
    let size = (1.0 / k as f64 + gamma) * m as f64;
    let rounded = size.round();
    if (size - rounded).abs() > 1e-9 || rounded < 0.0 || rounded > m as f64 {
        return Err(ConditionError::NonIntegralSubset(size));
    }
    let d = Dataset::indexed((0..m).map(|i| i % k).collect(), k)?;
    let shifts: Vec<usize> = match rule {
        WrongLabelRule::Fixed => vec![1],
        WrongLabelRule::AllShifts => (1..k).collect(),
    };
    let mut space = Vec::new();
    for subset in (0..m).combinations(rounded as usize) {
        for &r in &shifts {
            let h = (0..m)
                .map(|i| {
                    let y = d.labels()[i];
                    if subset.contains(&i) {
                        y
                    } else {
                        (y + r) % k
                    }
                })
                .collect();
            space.push(h);
        }
    }
    Ok((d, space))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_of_five() {
        let (d, space, c) = window_fixture(5, 0.3).unwrap();
        assert_eq!(space.len(), 5);
        for h in &space {
            let correct = h.iter().zip(d.labels()).filter(|(p, y)| p == y).count();
            assert_eq!(correct, 4);
            assert_eq!(c.cost_of(h), 1.0);
        }
    }

    #[test]
    fn window_coverage_and_cost() {
        for (m, gp) in [(11, 0.1), (21, 0.1), (11, 0.2), (21, 0.2), (40, 0.05)] {
            let (d, space, c) = window_fixture(m, gp).unwrap();
            let width = (m as f64 * (0.5 + gp) + 1e-9).floor() as usize;
            let dearth = (m as f64 * (0.5 - gp) - 1e-9).ceil();
            for i in 0..m {
                let covering = space.iter().filter(|h| h[i] == d.labels()[i]).count();
                assert_eq!(covering, width);
            }
            for h in &space {
                assert_eq!(c.cost_of(h), dearth);
            }
        }
    }

    #[test]
    fn window_rejects_short_sets() {
        assert!(matches!(window_fixture(10, 0.1), Err(ConditionError::WindowTooShort { .. })));
    }

    #[test]
    fn subset_space_sizes() {
        let (_, space) = mh_overdemand_fixture(3, 0.0, 3, WrongLabelRule::Fixed).unwrap();
        assert_eq!(space.len(), 3);
        let (_, space) = mh_overdemand_fixture(3, 0.0, 6, WrongLabelRule::AllShifts).unwrap();
        assert_eq!(space.len(), 15 * 2);
        assert!(matches!(
            mh_overdemand_fixture(3, 0.1, 4, WrongLabelRule::Fixed),
            Err(ConditionError::NonIntegralSubset(_))
        ));
    }
}
