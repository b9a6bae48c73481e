use ndarray::Array2;
use proptest::prelude::*;

use mcboost::boosters::{adaboost_mm, transform_mislabel, StepRule};
use mcboost::conditions::validate_eor_baseline;
use mcboost::domain::{exp_risk, plurality_predict, training_error, Baseline, Dataset, Feature};
use mcboost::potentials::{potential_fixed, potential_minimal, potential_oracle_bruteforce, EorDistribution, LossSpec};
use mcboost::weaklearners::{best_response, cost_of, greedy_tree, Exhaustive, SplitCriterion};

/// An edge-over-random distribution on `k` labels built from raw weights.
fn eor(raw: &[f64], lift: f64) -> EorDistribution {
    let top = raw[1..].iter().cloned().fold(0.0, f64::max);
    let mut b = raw.to_vec();
    b[0] = top + lift;
    let sum: f64 = b.iter().sum();
    EorDistribution::from_probabilities(b.into_iter().map(|v| v / sum).collect()).unwrap()
}

fn labels_and_space(max_m: usize, max_k: usize) -> impl Strategy<Value = (usize, Vec<usize>, Vec<Vec<usize>>)> {
    (2..=max_m, 2..=max_k).prop_flat_map(|(m, k)| {
        (Just(k), prop::collection::vec(0..k, m), prop::collection::vec(prop::collection::vec(0..k, m), 1..6))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fixed_potential_follows_its_recursion(
        raw in prop::collection::vec(0.05f64..1.0, 3..=4),
        lift in 0.0f64..0.8,
        s in prop::collection::vec(-3i64..=3, 4),
        t in 1usize..6,
        eta in 0.0f64..1.5,
        zero_one in any::<bool>(),
    ) {
        let b = eor(&raw, lift);
        let s = &s[..b.k()];
        let loss = if zero_one { LossSpec::ZeroOne } else { LossSpec::Exp(eta) };
        let here = potential_fixed(&b, loss, t, s).unwrap();
        let mut next = 0.0;
        for (l, &p) in b.probs().iter().enumerate() {
            let mut succ = s.to_vec();
            succ[l] += 1;
            next += p * potential_fixed(&b, loss, t - 1, &succ).unwrap();
        }
        prop_assert!((here - next).abs() <= 1e-10 * here.abs().max(1.0));
        if zero_one {
            prop_assert!((0.0..=1.0).contains(&here));
        }
    }

    #[test]
    fn fast_potentials_match_enumeration(
        raw in prop::collection::vec(0.05f64..1.0, 2..=5),
        lift in 0.0f64..0.8,
        s in prop::collection::vec(-2i64..=2, 5),
        t in 0usize..=5,
        eta in 0.0f64..1.0,
    ) {
        let b = eor(&raw, lift);
        let s = &s[..b.k()];
        for loss in [LossSpec::ZeroOne, LossSpec::Exp(eta)] {
            let fast = potential_fixed(&b, loss, t, s).unwrap();
            let slow = potential_oracle_bruteforce(&b, loss, t, s).unwrap();
            prop_assert!((fast - slow).abs() <= 1e-10 * slow.abs().max(1.0));
        }
    }

    #[test]
    fn minimal_potential_dominates_every_fixed_baseline(
        raw in prop::collection::vec(0.05f64..1.0, 3),
        gamma in 0.0f64..0.5,
        s in prop::collection::vec(-2i64..=2, 3),
        t in 0usize..=4,
        zero_one in any::<bool>(),
    ) {
        // rescale the wrong labels so the edge is exactly gamma
        let wrong_total: f64 = raw[1..].iter().sum();
        let top = raw[1..].iter().cloned().fold(0.0, f64::max);
        let scale = (1.0 - gamma) / (wrong_total + top);
        let mut b = vec![top * scale + gamma];
        b.extend(raw[1..].iter().map(|v| v * scale));
        let b = EorDistribution::new(b, gamma).unwrap();
        let loss = if zero_one { LossSpec::ZeroOne } else { LossSpec::Exp(0.4) };
        let fixed = potential_fixed(&b, loss, t, &s).unwrap();
        let (minimal, degree) = potential_minimal(gamma, loss, t, &s).unwrap();
        prop_assert!(minimal >= fixed - 1e-10 * fixed.abs().max(1.0));
        prop_assert!((1..=3).contains(&degree));
    }

    #[test]
    fn best_response_is_cheapest_and_lowest((k, labels, space) in labels_and_space(8, 4), seed in any::<u64>()) {
        let m = labels.len();
        let mut cost = Array2::zeros((m, k));
        let mut x = seed;
        for v in cost.iter_mut() {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            *v = ((x >> 40) % 7) as f64 - 3.0;
        }
        let j = best_response(&space, &cost);
        let best = cost_of(&cost, &space[j]);
        for (i, h) in space.iter().enumerate() {
            let c = cost_of(&cost, h);
            prop_assert!(best <= c + 1e-9);
            if i < j {
                prop_assert!(c > best);
            }
        }
    }

    #[test]
    fn tree_cost_does_not_grow_with_the_cap(
        xs in prop::collection::vec((0.0f64..1.0, 0u32..3), 4..30),
        costs in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 3), 30),
    ) {
        let m = xs.len();
        let rows = xs.iter().map(|&(x, c)| vec![Feature::Num(x), Feature::Cat(c)]).collect();
        let d = Dataset::new(rows, (0..m).map(|i| i % 3).collect(), 3).unwrap();
        let cost = Array2::from_shape_fn((m, 3), |(i, l)| costs[i][l]);
        let mut prev = f64::INFINITY;
        for cap in [1, 3, 5, 7, 11, 21] {
            let tree = greedy_tree(&d, &cost, cap, SplitCriterion::Cost);
            prop_assert!(tree.size() <= cap && tree.size() % 2 == 1);
            let preds: Vec<usize> = d.rows().iter().map(|r| tree.predict(r)).collect();
            let c = cost_of(&cost, &preds);
            prop_assert!(c <= prev + 1e-9);
            prev = c;
        }
        let info = greedy_tree(&d, &cost, 7, SplitCriterion::InfoGain);
        prop_assert!(info.size() <= 7);
    }

    #[test]
    fn mm_error_stays_under_its_bound((k, labels, space) in labels_and_space(12, 4), exact in any::<bool>()) {
        let d = Dataset::indexed(labels, k).unwrap();
        let rule = if exact { StepRule::Exact } else { StepRule::Approx };
        let run = adaboost_mm(&d, 30, &mut Exhaustive::new(space), rule);
        for (j, r) in run.rounds.iter().enumerate() {
            prop_assert!(r.train_error <= run.error_bound(j + 1) + 1e-9);
            prop_assert!(r.loss > 0.0 || r.clamped);
        }
        prop_assert!(exp_risk(&run.scores, d.labels()) >= run.training_error() - 1e-12);
    }

    #[test]
    fn mislabel_risk_is_a_rescaling(
        (k, labels, _) in labels_and_space(10, 5),
        f in prop::collection::vec(-3.0f64..3.0, 50),
    ) {
        let d = Dataset::indexed(labels, k).unwrap();
        let scores = Array2::from_shape_fn((d.m(), k), |(i, l)| f[(i * k + l) % f.len()]);
        let (triples, _) = transform_mislabel(&d, &[]);
        let binary = triples.risk(&triples.transform_scores(&scores));
        let multi = exp_risk(&scores, d.labels());
        prop_assert!((binary * (k - 1) as f64 - multi).abs() <= 1e-10 * multi.max(1.0));
    }

    #[test]
    fn standard_baselines_are_edge_over_random((k, labels, _) in labels_and_space(10, 6), gamma in 0.0f64..0.99) {
        let u = Baseline::uniform(&labels, k, gamma);
        prop_assert!(validate_eor_baseline(u.entries(), &labels, gamma).is_ok());
        let zero = Array2::<f64>::zeros((labels.len(), k));
        prop_assert_eq!(training_error(&zero, &labels), 1.0);
    }

    #[test]
    fn plurality_breaks_ties_low(v in prop::collection::vec(-2i32..=2, 2..6)) {
        let row = ndarray::Array1::from(v.iter().map(|&x| x as f64).collect::<Vec<_>>());
        let p = plurality_predict(row.view());
        let top = v.iter().max().unwrap();
        prop_assert_eq!(p, v.iter().position(|x| x == top).unwrap());
    }
}
