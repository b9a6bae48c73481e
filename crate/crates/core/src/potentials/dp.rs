use super::{check_state, EorDistribution, PotentialError};

/// `ln n!` for `n = 0..=t`.
fn ln_factorials(t: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(t + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for n in 1..=t {
        acc += (n as f64).ln();
        out.push(acc);
    }
    out
}

/// Binomial probability `P[Bin(n, p) = x]`.
fn binom_pmf(lnf: &[f64], n: usize, x: usize, p: f64) -> f64 {
    if p <= 0.0 {
        return if x == 0 { 1.0 } else { 0.0 };
    }
    if p >= 1.0 {
        return if x == n { 1.0 } else { 0.0 };
    }
    let ln = lnf[n] - lnf[x] - lnf[n - x] + x as f64 * p.ln() + (n - x) as f64 * (1.0 - p).ln();
    ln.exp()
}

/// 0-1 loss potential `φ^b_t(s)` by dynamic programming.
///
/// Computes `1 − P[s_0 + x_0 > s_l + x_l for all l > 0]` where
/// `x ~ Multinomial(t, b)`. The multinomial is unrolled into a chain of
/// binomials: first the votes `x_0` for the true label, then each wrong
/// coordinate takes a binomial share of what remains. For every `x_0` the
/// chain over the wrong coordinates is a DP over votes still unassigned,
/// so the total cost is `O(t³ k)`.
pub fn potential_zeroone_dp(b: &EorDistribution, t: usize, s: &[i64]) -> Result<f64, PotentialError> {
    check_state(b, s)?;
    let p = b.probs();
    let k = p.len();
    let lnf = ln_factorials(t);
    let mut correct = 0.0;
    for x0 in 0..=t {
        let w0 = binom_pmf(&lnf, t, x0, p[0]);
        if w0 == 0.0 {
            continue;
        }
        let lead = s[0] + x0 as i64;
        // dist[r] = probability that r votes are still unassigned
        let mut dist = vec![0.0; t + 1];
        dist[t - x0] = 1.0;
        let mut tail = 1.0 - p[0];
        for l in 1..k {
            // x_l must stay strictly below lead − s_l
            let room = lead - s[l] - 1;
            if room < 0 {
                dist.iter_mut().for_each(|v| *v = 0.0);
                break;
            }
            let room = room as usize;
            let mut next = vec![0.0; t + 1];
            if l == k - 1 {
                for (r, &w) in dist.iter().enumerate() {
                    if w != 0.0 && r <= room {
                        next[0] += w;
                    }
                }
            } else {
                let q = if tail > 0.0 { (p[l] / tail).clamp(0.0, 1.0) } else { 0.0 };
                for (r, &w) in dist.iter().enumerate() {
                    if w == 0.0 {
                        continue;
                    }
                    for x in 0..=r.min(room) {
                        next[r - x] += w * binom_pmf(&lnf, r, x, q);
                    }
                }
            }
            tail -= p[l];
            dist = next;
        }
        correct += w0 * dist[0];
    }
    Ok((1.0 - correct).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::LossSpec;

    #[test]
    fn zero_rounds_is_the_loss() {
        let b = EorDistribution::biased_uniform(4, 0.2);
        for s in [[0, 0, 0, 0], [2, 1, 0, 1], [1, 1, 0, 0], [0, -1, -2, -1]] {
            assert_eq!(potential_zeroone_dp(&b, 0, &s).unwrap(), LossSpec::ZeroOne.eval(&s));
        }
    }

    #[test]
    fn first_rounds_at_six_classes() {
        let b = EorDistribution::biased_uniform(6, 0.0);
        let one = potential_zeroone_dp(&b, 1, &[0; 6]).unwrap();
        assert!((one - 5.0 / 6.0).abs() < 1e-14);
        let two = potential_zeroone_dp(&b, 2, &[0; 6]).unwrap();
        assert!((two - 35.0 / 36.0).abs() < 1e-14);
    }

    #[test]
    fn unassailable_lead_has_zero_potential() {
        let b = EorDistribution::biased_uniform(3, 0.0);
        assert!(potential_zeroone_dp(&b, 4, &[9, 4, 3]).unwrap() < 1e-14);
    }

    #[test]
    fn point_mass_on_true_label() {
        let b = EorDistribution::new(vec![1.0, 0.0, 0.0], 1.0).unwrap();
        assert_eq!(potential_zeroone_dp(&b, 3, &[0, 2, 0]).unwrap(), 0.0);
        assert_eq!(potential_zeroone_dp(&b, 2, &[0, 2, 0]).unwrap(), 1.0);
    }
}
