//! Runs a formula through the whole reduction and compares the SAT answer
//! with the recognition answers on the colored graph.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::budget::Budget;
use crate::cnf::{brute_force_sat, is_satisfiable, to_restricted, CnfFormula, BRUTE_FORCE_MAX_VARS};
use crate::error::{Error, Result};
use crate::graph::ColoredGraph;
use crate::order::{colored_profile, recognize_unit_d_order, OrderConfig};
use crate::reduction::{build_reduction_graph, SizeStats};
use crate::split::{recognize_with, EnumerateOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Answer {
    Yes,
    No,
    BudgetExhausted,
    OverCapacity,
    NotRun,
}

impl Answer {
    pub fn decided(self) -> Option<bool> {
        match self {
            Answer::Yes => Some(true),
            Answer::No => Some(false),
            _ => None,
        }
    }

    fn of(b: bool) -> Self {
        if b {
            Answer::Yes
        } else {
            Answer::No
        }
    }

    fn of_result<T>(r: Result<Option<T>>) -> Result<Self> {
        match r {
            Ok(found) => Ok(Answer::of(found.is_some())),
            Err(Error::Budget { .. }) => Ok(Answer::BudgetExhausted),
            Err(Error::Capacity(_)) => Ok(Answer::OverCapacity),
            Err(e) => Err(e),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleChoice {
    Splits,
    Order,
    Both,
}

impl OracleChoice {
    pub fn splits(self) -> bool {
        matches!(self, OracleChoice::Splits | OracleChoice::Both)
    }

    pub fn order(self) -> bool {
        matches!(self, OracleChoice::Order | OracleChoice::Both)
    }
}

#[derive(Clone, Debug)]
pub struct CheckOptions {
    pub oracles: OracleChoice,
    /// Wall-clock limit for each recognition oracle.
    pub budget: Option<Duration>,
    pub order: OrderConfig,
    pub splits: EnumerateOptions,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            oracles: OracleChoice::Both,
            budget: None,
            order: OrderConfig::default(),
            splits: EnumerateOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Timings {
    pub sat_ms: u128,
    pub order_ms: u128,
    pub splits_ms: u128,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    /// Exhaustive answer on the input formula.
    pub sat: Answer,
    pub restricted_sat: Answer,
    pub restricted_vars: usize,
    pub restricted_clauses: usize,
    pub size_stats: SizeStats,
    pub order: Answer,
    pub splits: Answer,
    /// All decided answers coincide.
    pub agree: bool,
    /// No oracle that was asked to run stopped early.
    pub complete: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

fn ms(t: Instant) -> u128 {
    t.elapsed().as_millis()
}

/// Colored recognition by the requested oracles, run side by side.
pub fn recognize_colored(cg: &ColoredGraph, opts: &CheckOptions) -> Result<(Answer, Answer, u128, u128)> {
    let budget = || opts.budget.map(Budget::time).unwrap_or_default();
    let run_order = || -> Result<(Answer, u128)> {
        if !opts.oracles.order() {
            return Ok((Answer::NotRun, 0));
        }
        let t = Instant::now();
        let r = recognize_unit_d_order(&cg.graph, &colored_profile(cg), &opts.order, &mut budget()).map(|(o, _)| o);
        Ok((Answer::of_result(r)?, ms(t)))
    };
    let run_splits = || -> Result<(Answer, u128)> {
        if !opts.oracles.splits() {
            return Ok((Answer::NotRun, 0));
        }
        let t = Instant::now();
        let r = recognize_with(cg, &opts.splits, &mut budget());
        Ok((Answer::of_result(r)?, ms(t)))
    };
    let (o, s) = rayon::join(run_order, run_splits);
    let ((order, order_ms), (splits, splits_ms)) = (o?, s?);
    Ok((order, splits, order_ms, splits_ms))
}

/// SAT by brute force on `f`, SAT on its restricted form, and colored
/// recognition of the reduction graph. Budget and capacity limits end up as
/// answers in the report, not as errors.
pub fn end_to_end_check(f: &CnfFormula, opts: &CheckOptions) -> Result<CheckReport> {
    let t = Instant::now();
    let sat = if f.num_vars <= BRUTE_FORCE_MAX_VARS {
        Answer::of(brute_force_sat(f)?.is_some())
    } else {
        Answer::OverCapacity
    };
    let r = to_restricted(f)?;
    let restricted_sat = Answer::of(is_satisfiable(&r.formula));
    let sat_ms = ms(t);
    let trace = build_reduction_graph(&r)?;
    let (order, splits, order_ms, splits_ms) = recognize_colored(&trace.graph, opts)?;
    let answers = [sat, restricted_sat, order, splits];
    let decided: Vec<bool> = answers.iter().filter_map(|a| a.decided()).collect();
    let agree = decided.windows(2).all(|w| w[0] == w[1]);
    let complete = answers
        .iter()
        .all(|a| !matches!(a, Answer::BudgetExhausted | Answer::OverCapacity));
    Ok(CheckReport {
        sat,
        restricted_sat,
        restricted_vars: r.num_vars(),
        restricted_clauses: r.formula.num_clauses(),
        size_stats: trace.size_stats,
        order,
        splits,
        agree,
        complete,
        timings: Some(Timings {
            sat_ms,
            order_ms,
            splits_ms,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::{padding_block, restricted_instances, RestrictedForm};

    #[test]
    fn padding_block_agrees() {
        let r = end_to_end_check(&padding_block(), &CheckOptions::default()).unwrap();
        assert_eq!((r.sat, r.restricted_sat, r.order), (Answer::Yes, Answer::Yes, Answer::Yes));
        // 51 edges is past the split engine's soft bound
        assert_eq!(r.splits, Answer::OverCapacity);
        assert!(r.agree && !r.complete);
        let trace = build_reduction_graph(&RestrictedForm::new(padding_block()).unwrap()).unwrap();
        assert_eq!(r.size_stats, trace.size_stats);
    }

    #[test]
    fn an_unsatisfiable_instance_is_rejected() {
        let f = restricted_instances(2)
            .into_iter()
            .find(|f| brute_force_sat(f).unwrap().is_none())
            .unwrap();
        let opts = CheckOptions {
            oracles: OracleChoice::Order,
            order: OrderConfig::unbounded(),
            ..CheckOptions::default()
        };
        let r = end_to_end_check(&f, &opts).unwrap();
        assert_eq!((r.sat, r.order, r.splits), (Answer::No, Answer::No, Answer::NotRun));
        assert!(r.agree && r.complete);
    }

    #[test]
    fn tiny_budget_is_reported() {
        let f = restricted_instances(2)
            .into_iter()
            .find(|f| brute_force_sat(f).unwrap().is_none())
            .unwrap();
        let opts = CheckOptions {
            oracles: OracleChoice::Order,
            order: OrderConfig::unbounded(),
            budget: Some(Duration::ZERO),
            ..CheckOptions::default()
        };
        let r = end_to_end_check(&f, &opts).unwrap();
        assert_eq!(r.order, Answer::BudgetExhausted);
        assert!(r.agree && !r.complete);
    }
}
