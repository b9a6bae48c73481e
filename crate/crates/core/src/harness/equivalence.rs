//! Side-by-side runs of AdaBoost.MM and binary AdaBoost over mislabel
//! triples on random finite classifier spaces.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::tsv::{real, Tsv};
use crate::boosters::{adaboost_binary, adaboost_mm, transform_mislabel, BinaryExhaustive, StepRule};
use crate::domain::Dataset;
use crate::weaklearners::Exhaustive;

/// Random labels and prediction tables with `m ≤ max_m`, `2 ≤ k ≤ max_k`.
pub fn random_instance(seed: u64, max_m: usize, max_k: usize, max_space: usize) -> (Dataset, Vec<Vec<usize>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.gen_range(2..=max_m.max(2));
    let k = rng.gen_range(2..=max_k.max(2));
    let labels: Vec<usize> = (0..m).map(|_| rng.gen_range(0..k)).collect();
    let n = rng.gen_range(1..=max_space.max(1));
    let space = (0..n).map(|_| (0..m).map(|_| rng.gen_range(0..k)).collect()).collect();
    (Dataset::indexed(labels, k).expect("k >= 2, m >= 2"), space)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub seed: u64,
    pub m: usize,
    pub k: usize,
    pub rounds: usize,
    pub same_length: bool,
    pub same_choices: bool,
    pub max_weight_diff: f64,
    pub max_alpha_diff: f64,
}

impl EquivalenceReport {
    pub fn agrees(&self, tol: f64) -> bool {
        self.same_length && self.same_choices && self.max_weight_diff <= tol
    }
}

/// Normalized `e^{f(i,l) − f(i,y_i)}` over the mislabel triples, `f` built
/// from `(classifier, weight)` steps on the multiclass side.
fn mm_weights(d: &Dataset, space: &[Vec<usize>], steps: &[(usize, f64)]) -> Vec<f64> {
    let mut f = vec![vec![0.0; d.k()]; d.m()];
    for &(j, a) in steps {
        for (i, &p) in space[j].iter().enumerate() {
            f[i][p] += a;
        }
    }
    let mut w = Vec::new();
    for (i, &y) in d.labels().iter().enumerate() {
        for l in (0..d.k()).filter(|&l| l != y) {
            w.push(f[i][l] - f[i][y]);
        }
    }
    softmax(&w)
}

/// Normalized `e^{F̃}` with `F̃` built from binary steps.
fn binary_weights(transformed: &[Vec<i8>], n: usize, steps: &[(usize, f64)]) -> Vec<f64> {
    let mut margins = vec![0.0; n];
    for &(j, a) in steps {
        for (p, &v) in transformed[j].iter().enumerate() {
            margins[p] += a * v as f64;
        }
    }
    softmax(&margins)
}

fn softmax(v: &[f64]) -> Vec<f64> {
    let top = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = v.iter().map(|x| (x - top).exp()).collect();
    let z: f64 = e.iter().sum();
    e.iter().map(|x| x / z).collect()
}

/// Runs both boosters for `rounds` rounds and compares them round by round.
pub fn compare_runs(d: &Dataset, space: &[Vec<usize>], rounds: usize, seed: u64) -> EquivalenceReport {
    let mm = adaboost_mm(d, rounds, &mut Exhaustive::new(space.to_vec()), StepRule::Approx);
    let (binary_set, transformed) = transform_mislabel(d, space);
    let bin = adaboost_binary(&binary_set, rounds, &mut BinaryExhaustive::new(transformed.clone()));

    let mm_steps: Vec<(usize, f64)> = mm.rounds.iter().map(|r| (r.index.expect("finite space"), r.alpha)).collect();
    let bin_steps: Vec<(usize, f64)> = bin.rounds.iter().map(|r| (r.index.expect("finite space"), r.alpha)).collect();
    let same_length = mm_steps.len() == bin_steps.len();
    let same_choices = same_length && mm_steps.iter().zip(&bin_steps).all(|(a, b)| a.0 == b.0);
    let mut max_weight_diff: f64 = 0.0;
    let mut max_alpha_diff: f64 = 0.0;
    for t in 0..mm_steps.len().min(bin_steps.len()) {
        let wm = mm_weights(d, space, &mm_steps[..t]);
        let wb = binary_weights(&transformed, binary_set.len(), &bin_steps[..t]);
        for (a, b) in wm.iter().zip(&wb) {
            max_weight_diff = max_weight_diff.max((a - b).abs());
        }
        max_alpha_diff = max_alpha_diff.max((mm_steps[t].1 - bin_steps[t].1).abs());
    }
    EquivalenceReport {
        seed,
        m: d.m(),
        k: d.k(),
        rounds: mm_steps.len(),
        same_length,
        same_choices,
        max_weight_diff,
        max_alpha_diff,
    }
}

/// `trials` independent comparisons, run in parallel; results are in trial
/// order regardless of the thread count.
pub fn run_equivalence(trials: usize, seed: u64, rounds: usize) -> Vec<EquivalenceReport> {
    (0..trials as u64)
        .into_par_iter()
        .map(|j| {
            let s = seed.wrapping_add(j);
            let (d, space) = random_instance(s, 20, 4, 8);
            compare_runs(&d, &space, rounds, s)
        })
        .collect()
}

pub fn emit_equivalence(reports: &[EquivalenceReport], rounds: usize) -> String {
    let mut out = Tsv::new();
    out.meta("rounds", rounds).meta("trials", reports.len());
    out.header(&["seed", "m", "k", "rounds_run", "same_choices", "max_weight_diff", "max_alpha_diff"]);
    for r in reports {
        out.row(&[
            r.seed.to_string(),
            r.m.to_string(),
            r.k.to_string(),
            r.rounds.to_string(),
            r.same_choices.to_string(),
            real(r.max_weight_diff),
            real(r.max_alpha_diff),
        ]);
    }
    out.finish()
}
