use super::{check_state, EorDistribution, LossSpec, PotentialError};

const MAX_T: usize = 8;
const MAX_K: usize = 5;

/// `E[L(s + X)]` over all `k^t` step sequences of the random walk driven by
/// `b`, each weighted by the product of its step probabilities.
pub fn potential_oracle_bruteforce(b: &EorDistribution, loss: LossSpec, t: usize, s: &[i64]) -> Result<f64, PotentialError> {
    check_state(b, s)?;
    loss.validate()?;
    let k = b.k();
    if t > MAX_T || k > MAX_K {
        return Err(PotentialError::EnumerationBound { t, k });
    }
    let p = b.probs();
    let mut path = vec![0usize; t];
    let mut total = 0.0;
    let mut end = s.to_vec();
    loop {
        end.copy_from_slice(s);
        let mut weight = 1.0;
        for &step in &path {
            end[step] += 1;
            weight *= p[step];
        }
        total += weight * loss.eval(&end);
        // odometer increment
        let mut pos = 0;
        while pos < t {
            path[pos] += 1;
            if path[pos] < k {
                break;
            }
            path[pos] = 0;
            pos += 1;
        }
        if pos == t {
            break;
        }
    }
    Ok(total)
}
