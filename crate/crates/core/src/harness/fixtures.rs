//! Text reports for the counterexample fixtures.

use clap::ValueEnum;

use super::tsv::{real, Tsv};
use super::HarnessError;
use crate::conditions::{
    edge, figure1_fixture, is_boostable, make_condition, mh_overdemand_fixture, solve_game, window_fixture, Boostability,
    ConditionName, GameValueReport, WrongLabelRule,
};
use crate::domain::{Baseline, Dataset};

pub const GAME_ITERS: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FixtureKind {
    Figure1,
    Window,
    MhOverdemand,
    MhOverdemandShifts,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixtureParams {
    pub gamma: f64,
    pub m: usize,
    pub k: usize,
}

fn game_meta(out: &mut Tsv, key: &str, r: &GameValueReport) {
    out.meta(key, format!("{:?} (lower {}, upper {})", r.verdict, real(r.lower), real(r.upper)));
}

fn boost_meta(out: &mut Tsv, b: &Boostability) {
    let text = match b {
        Boostability::Yes { margin, .. } => format!("yes (margin {})", real(*margin)),
        Boostability::No { .. } => "no".to_string(),
        Boostability::Undetermined { lower, upper } => format!("undetermined ({}, {})", real(*lower), real(*upper)),
    };
    out.meta("boostable", text);
}

fn table(out: &mut Tsv, d: &Dataset, space: &[Vec<usize>]) {
    out.meta("labels", d.labels().iter().map(usize::to_string).collect::<Vec<_>>().join(","));
    out.header(&["h", "predictions"]);
    for (j, h) in space.iter().enumerate() {
        out.row(&[j.to_string(), h.iter().map(usize::to_string).collect::<Vec<_>>().join(",")]);
    }
}

/// Verdicts of the relevant games plus the classifier tables.
pub fn emit_fixture(kind: FixtureKind, p: FixtureParams) -> Result<String, HarnessError> {
    let mut out = Tsv::new();
    out.meta("fixture", format!("{kind:?}"));
    match kind {
        FixtureKind::Figure1 => {
            let (d, space, c) = figure1_fixture();
            let u = Baseline::uniform(d.labels(), d.k(), p.gamma);
            let samme = make_condition(ConditionName::Samme, p.gamma, &d, None)?;
            out.meta("gamma", real(p.gamma));
            game_meta(&mut out, "samme", &solve_game(&space, &samme, GAME_ITERS)?);
            boost_meta(&mut out, &is_boostable(&space, d.labels(), d.k(), GAME_ITERS)?);
            let edges: Vec<String> = space.iter().map(|h| real(edge(&c, h, &u))).collect();
            out.meta("edges_vs_uniform", edges.join(","));
            table(&mut out, &d, &space);
        }
        FixtureKind::Window => {
            let (d, space, c) = window_fixture(p.m, p.gamma)?;
            let u = Baseline::uniform(d.labels(), d.k(), (3.0 * p.gamma).min(0.99));
            out.meta("m", p.m).meta("gamma_prime", real(p.gamma));
            boost_meta(&mut out, &is_boostable(&space, d.labels(), d.k(), GAME_ITERS)?);
            let worst = space.iter().map(|h| edge(&c, h, &u)).fold(f64::NEG_INFINITY, f64::max);
            out.meta("best_edge_vs_uniform", real(worst));
            table(&mut out, &d, &space);
        }
        FixtureKind::MhOverdemand | FixtureKind::MhOverdemandShifts => {
            let rule = if kind == FixtureKind::MhOverdemand { WrongLabelRule::Fixed } else { WrongLabelRule::AllShifts };
            let (d, space) = mh_overdemand_fixture(p.k, p.gamma, p.m, rule)?;
            let mh = make_condition(ConditionName::Mh, p.gamma, &d, None)?;
            let eor = make_condition(ConditionName::EorFixed, p.gamma, &d, Some(Baseline::uniform(d.labels(), d.k(), p.gamma)))?;
            out.meta("k", p.k).meta("m", p.m).meta("gamma", real(p.gamma));
            game_meta(&mut out, "mh", &solve_game(&space, &mh, GAME_ITERS)?);
            game_meta(&mut out, "eor_uniform", &solve_game(&space, &eor, GAME_ITERS)?);
            table(&mut out, &d, &space);
        }
    }
    Ok(out.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::tsv::parse;

    #[test]
    fn figure_one_report() {
        let text = emit_fixture(FixtureKind::Figure1, FixtureParams { gamma: 0.1, m: 0, k: 0 }).unwrap();
        let (meta, _, rows) = parse(&text);
        let get = |k: &str| meta.iter().find(|(a, _)| a == k).unwrap().1.clone();
        assert!(get("samme").starts_with("Satisfied"));
        assert_eq!(get("boostable"), "no");
        assert_eq!(rows.len(), 2);
    }
}
