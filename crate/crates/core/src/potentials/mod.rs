//! Drifting-game potential functions.
//!
//! Inside this module a state is a vote vector `s` whose coordinate 0 is the
//! true label. Fixed edge-over-random conditions use a closed form (exponential
//! loss) or a dynamic program (0-1 loss); [`potential_oracle_bruteforce`]
//! enumerates random-walk paths as an independent check. The minimal
//! condition is handled by [`minimal::MinimalSolver`].

mod dp;
pub mod minimal;
mod oracle;

pub use dp::potential_zeroone_dp;
pub use minimal::{degree_map, minimal_vs_fixed_gap, potential_minimal, DegreeCell, MinimalSolver};
pub use oracle::potential_oracle_bruteforce;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PotentialError {
    #[error("distribution must be non-negative and sum to one")]
    NotADistribution,
    #[error("distribution does not put exactly gamma = {gamma} more mass on the true label than on the best wrong label")]
    NotEdgeOverRandom { gamma: f64 },
    #[error("need k >= 2, got {0}")]
    TooFewClasses(usize),
    #[error("state has {found} coordinates, expected {expected}")]
    StateLength { found: usize, expected: usize },
    #[error("path enumeration needs t <= 8 and k <= 5, got t = {t}, k = {k}")]
    EnumerationBound { t: usize, k: usize },
    #[error("more than {cap} memoized states required")]
    StateCap { cap: usize },
    #[error("degree maps are only defined for k = 3, got k = {0}")]
    DegreeMapDimension(usize),
    #[error("gamma must lie in [0, 1), got {0}")]
    Gamma(f64),
    #[error("eta must be non-negative, got {0}")]
    Eta(f64),
}

/// Terminal loss of the drifting game.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LossSpec {
    /// `1[s_0 <= max_{l>0} s_l]`.
    ZeroOne,
    /// `Σ_{l>0} exp(η (s_l − s_0))`.
    Exp(f64),
}

impl LossSpec {
    pub fn eval(&self, s: &[i64]) -> f64 {
        match *self {
            LossSpec::ZeroOne => {
                if s[1..].iter().any(|&v| v >= s[0]) {
                    1.0
                } else {
                    0.0
                }
            }
            LossSpec::Exp(eta) => s[1..].iter().map(|&v| (eta * (v - s[0]) as f64).exp()).sum(),
        }
    }

    pub fn validate(&self) -> Result<(), PotentialError> {
        match *self {
            LossSpec::Exp(eta) if eta.is_nan() || eta < 0.0 => Err(PotentialError::Eta(eta)),
            _ => Ok(()),
        }
    }
}

/// A distribution in `Δ_γ^k` with coordinate 0 as the true label.
#[derive(Debug, Clone, PartialEq)]
pub struct EorDistribution {
    b: Vec<f64>,
    gamma: f64,
}

const DIST_TOL: f64 = 1e-9;

impl EorDistribution {
    /// Validates `b` against `Δ_γ^k`.
    pub fn new(b: Vec<f64>, gamma: f64) -> Result<Self, PotentialError> {
        if b.len() < 2 {
            return Err(PotentialError::TooFewClasses(b.len()));
        }
        if b.iter().any(|&v| v < -DIST_TOL) || (b.iter().sum::<f64>() - 1.0).abs() > DIST_TOL {
            return Err(PotentialError::NotADistribution);
        }
        let best_wrong = b[1..].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if (b[0] - gamma - best_wrong).abs() > DIST_TOL {
            return Err(PotentialError::NotEdgeOverRandom { gamma });
        }
        Ok(EorDistribution { b, gamma })
    }

    /// The γ-biased uniform distribution `u_γ`.
    pub fn biased_uniform(k: usize, gamma: f64) -> Self {
        let base = (1.0 - gamma) / k as f64;
        let mut b = vec![base; k];
        b[0] += gamma;
        EorDistribution { b, gamma }
    }

    /// Reads γ off a distribution as `b_0 − max_{l>0} b_l`.
    pub fn from_probabilities(b: Vec<f64>) -> Result<Self, PotentialError> {
        if b.len() < 2 {
            return Err(PotentialError::TooFewClasses(b.len()));
        }
        let best_wrong = b[1..].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let gamma = b[0] - best_wrong;
        Self::new(b, gamma)
    }

    pub fn probs(&self) -> &[f64] {
        &self.b
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn k(&self) -> usize {
        self.b.len()
    }
}

fn check_state(b: &EorDistribution, s: &[i64]) -> Result<(), PotentialError> {
    if s.len() != b.k() {
        return Err(PotentialError::StateLength { found: s.len(), expected: b.k() });
    }
    Ok(())
}

/// `φ^b_t(s)` for a fixed edge-over-random distribution.
pub fn potential_fixed(b: &EorDistribution, loss: LossSpec, t: usize, s: &[i64]) -> Result<f64, PotentialError> {
    loss.validate()?;
    match loss {
        LossSpec::Exp(eta) => potential_exp_closed(b, eta, t, s),
        LossSpec::ZeroOne => potential_zeroone_dp(b, t, s),
    }
}

/// `Σ_{l>0} a_l^t exp(η (s_l − s_0))` with
/// `a_l = 1 − (b_0 + b_l) + e^η b_l + e^{−η} b_0`.
pub fn potential_exp_closed(b: &EorDistribution, eta: f64, t: usize, s: &[i64]) -> Result<f64, PotentialError> {
    check_state(b, s)?;
    LossSpec::Exp(eta).validate()?;
    let p = b.probs();
    let (up, down) = (eta.exp(), (-eta).exp());
    let value = (1..p.len())
        .map(|l| {
            let a = 1.0 - (p[0] + p[l]) + up * p[l] + down * p[0];
            a.powi(t as i32) * (eta * (s[l] - s[0]) as f64).exp()
        })
        .sum();
    Ok(value)
}

/// `κ(γ, η) = 1 + ((1−γ)/k)(e^η + e^{−η} − 2) − (1 − e^{−η}) γ`.
pub fn kappa(gamma: f64, eta: f64, k: usize) -> f64 {
    1.0 + ((1.0 - gamma) / k as f64) * (eta.exp() + (-eta).exp() - 2.0) - (1.0 - (-eta).exp()) * gamma
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn losses_on_simple_states() {
        assert_eq!(LossSpec::ZeroOne.eval(&[0, 0, 0]), 1.0);
        assert_eq!(LossSpec::ZeroOne.eval(&[2, 1, 1]), 0.0);
        assert_eq!(LossSpec::ZeroOne.eval(&[1, 1, 0]), 1.0);
        let v = LossSpec::Exp(0.5).eval(&[1, 0, 3]);
        assert!((v - ((-0.5f64).exp() + 1.0f64.exp())).abs() < 1e-15);
    }

    #[test]
    fn eor_distribution_validation() {
        let b = EorDistribution::new(vec![7.0 / 15.0, 4.0 / 15.0, 4.0 / 15.0], 0.2);
        assert!(b.is_ok());
        assert_eq!(
            EorDistribution::new(vec![0.5, 0.35, 0.15], 0.2),
            Err(PotentialError::NotEdgeOverRandom { gamma: 0.2 })
        );
        assert!(EorDistribution::new(vec![0.5, 0.3, 0.2], 0.2).is_ok());
        assert_eq!(EorDistribution::new(vec![0.6, 0.6, -0.2], 0.0), Err(PotentialError::NotADistribution));
        let u = EorDistribution::biased_uniform(4, 0.2);
        assert!(EorDistribution::new(u.probs().to_vec(), 0.2).is_ok());
    }

    #[test]
    fn closed_form_boundaries() {
        let b = EorDistribution::biased_uniform(3, 0.1);
        let s = [1, 3, 0];
        let l0 = LossSpec::Exp(0.3).eval(&s);
        assert!((potential_exp_closed(&b, 0.3, 0, &s).unwrap() - l0).abs() < 1e-15);
        assert!((potential_exp_closed(&b, 0.0, 7, &[0, 0, 0]).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn kappa_limits() {
        assert!((kappa(0.3, 0.0, 4) - 1.0).abs() < 1e-15);
        let eta: f64 = 0.7;
        let want = 1.0 + (eta.exp() + (-eta).exp() - 2.0) / 5.0;
        assert!((kappa(0.0, eta, 5) - want).abs() < 1e-15);
        assert!(kappa(0.0, eta, 5) >= 1.0);
    }

    #[test]
    fn state_length_is_checked() {
        let b = EorDistribution::biased_uniform(3, 0.0);
        assert!(matches!(potential_fixed(&b, LossSpec::ZeroOne, 1, &[0, 0]), Err(PotentialError::StateLength { .. })));
    }
}
