//! Potential tables and degree maps as TSV text.

use super::tsv::{real, Tsv};
use crate::potentials::{degree_map, potential_fixed, EorDistribution, LossSpec, MinimalSolver, PotentialError};

fn loss_name(loss: LossSpec) -> String {
    match loss {
        LossSpec::ZeroOne => "zeroone".into(),
        LossSpec::Exp(eta) => format!("exp(eta={})", real(eta)),
    }
}

/// Rows `(T, φ^u_T(0))` for `T = 0..=t_max`, `u` the γ-biased uniform
/// distribution, plus `φ_T(0)` under the minimal condition when asked.
pub fn emit_potential_table(k: usize, gamma: f64, t_max: usize, loss: LossSpec, minimal: bool) -> Result<String, PotentialError> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(PotentialError::Gamma(gamma));
    }
    if k < 2 {
        return Err(PotentialError::TooFewClasses(k));
    }
    let b = EorDistribution::biased_uniform(k, gamma);
    let zero = vec![0i64; k];
    let mut solver = if minimal { Some(MinimalSolver::new(k, gamma, loss)?) } else { None };
    let mut out = Tsv::new();
    out.meta("k", k).meta("gamma", real(gamma)).meta("loss", loss_name(loss));
    if minimal {
        out.header(&["T", "phi_fixed", "phi_minimal", "degree"]);
    } else {
        out.header(&["T", "phi_fixed"]);
    }
    for t in 0..=t_max {
        let fixed = potential_fixed(&b, loss, t, &zero)?;
        let mut row = vec![t.to_string(), real(fixed)];
        if let Some(s) = solver.as_mut() {
            let (value, degree) = s.value(t, &zero)?;
            row.push(real(value));
            row.push(degree.to_string());
        }
        out.row(&row);
    }
    Ok(out.finish())
}

/// The `k = 3` degree map over `t = T..1` rounds remaining, one row per
/// reachable state `(u, v) = (s_1 − s_0, s_2 − s_0)`.
pub fn emit_degree_map(gamma: f64, loss: LossSpec, horizon: usize) -> Result<String, PotentialError> {
    let cells = degree_map(gamma, loss, horizon, 3)?;
    let mut out = Tsv::new();
    out.meta("k", 3).meta("gamma", real(gamma)).meta("loss", loss_name(loss)).meta("horizon", horizon);
    out.header(&["t", "u", "v", "degree", "value"]);
    for c in cells {
        out.row(&[c.t.to_string(), c.u.to_string(), c.v.to_string(), c.degree.to_string(), real(c.value)]);
    }
    Ok(out.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::tsv::parse;

    #[test]
    fn zero_rounds_is_one_for_every_k() {
        for k in 2..7 {
            let text = emit_potential_table(k, 0.1, 0, LossSpec::ZeroOne, false).unwrap();
            let (_, _, rows) = parse(&text);
            assert_eq!(rows.len(), 1);
            assert_eq!(rows[0][1].parse::<f64>().unwrap(), 1.0);
        }
    }

    #[test]
    fn minimal_column_is_at_least_fixed() {
        let text = emit_potential_table(3, 0.1, 6, LossSpec::ZeroOne, true).unwrap();
        let (_, header, rows) = parse(&text);
        assert_eq!(header.len(), 4);
        for r in rows {
            let (fixed, minimal): (f64, f64) = (r[1].parse().unwrap(), r[2].parse().unwrap());
            assert!(minimal >= fixed - 1e-12);
        }
    }

    #[test]
    fn degree_map_rows_cover_reachable_states() {
        let text = emit_degree_map(0.0, LossSpec::Exp(0.025), 4).unwrap();
        let (_, _, rows) = parse(&text);
        // layer with t remaining has C(T − t + 2, 2) states
        let want: usize = (1..=4).map(|t| (4 - t + 1) * (4 - t + 2) / 2).sum();
        assert_eq!(rows.len(), want);
    }
}
