//! Seeded batch runs of the end-to-end check over random formulas.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cnf::{parse_dimacs, random_exactly3, to_restricted, CnfFormula};
use crate::e2e::{end_to_end_check, Answer, CheckOptions, CheckReport};
use crate::error::{Error, Result};
use crate::reduction::{build_reduction_graph, decolorize};

#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub seed: u64,
    /// Number of random exactly-3 formulas.
    pub instances: usize,
    pub max_vars: usize,
    pub max_clauses: usize,
    /// Named formulas checked after the random ones.
    pub extra: Vec<(String, CnfFormula)>,
    pub check: CheckOptions,
    pub jobs: usize,
    /// Timings make the report differ between runs, so they are opt-in.
    pub timings: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            instances: 50,
            max_vars: 4,
            max_clauses: 4,
            extra: Vec::new(),
            check: CheckOptions::default(),
            jobs: 1,
            timings: false,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DecolorizedSize {
    pub vertices: usize,
    pub edges: usize,
    pub max_degree: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct InstanceRecord {
    pub id: String,
    pub num_vars: usize,
    pub num_clauses: usize,
    /// The DIMACS text parses back to the same formula.
    pub dimacs_round_trip: bool,
    pub equisatisfiable: bool,
    pub check: Option<CheckReport>,
    pub decolorized: Option<DecolorizedSize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub pass: bool,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Summary {
    pub instances: usize,
    pub passed: usize,
    pub failed: usize,
    pub budget_exhaustions: usize,
    pub over_capacity: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineReport {
    pub seed: u64,
    pub records: Vec<InstanceRecord>,
    pub summary: Summary,
}

fn generate(cfg: &PipelineConfig) -> Vec<(String, CnfFormula)> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out: Vec<(String, CnfFormula)> = (0..cfg.instances)
        .map(|i| {
            let n = rng.gen_range(3..=cfg.max_vars.max(3));
            let m = rng.gen_range(1..=cfg.max_clauses.max(1));
            (format!("random-{i:04}"), random_exactly3(&mut rng, n, m))
        })
        .collect();
    out.extend(cfg.extra.iter().cloned());
    out
}

fn run_one(id: String, f: &CnfFormula, cfg: &PipelineConfig) -> InstanceRecord {
    let dimacs_round_trip = parse_dimacs(&f.to_dimacs()).is_ok_and(|g| g == *f);
    let mut rec = InstanceRecord {
        id,
        num_vars: f.num_vars,
        num_clauses: f.num_clauses(),
        dimacs_round_trip,
        equisatisfiable: false,
        check: None,
        decolorized: None,
        error: None,
        pass: false,
    };
    let result = end_to_end_check(f, &cfg.check).and_then(|report| {
        let trace = build_reduction_graph(&to_restricted(f)?)?;
        let d = decolorize(&trace.graph)?.graph;
        Ok((report, DecolorizedSize {
            vertices: d.n(),
            edges: d.m(),
            max_degree: d.max_degree(),
        }))
    });
    match result {
        Ok((mut report, size)) => {
            if !cfg.timings {
                report.timings = None;
            }
            rec.equisatisfiable = report.sat.decided().is_none() || report.sat == report.restricted_sat;
            rec.pass = dimacs_round_trip && rec.equisatisfiable && report.agree;
            rec.check = Some(report);
            rec.decolorized = Some(size);
        }
        Err(e) => rec.error = Some(e.to_string()),
    }
    rec
}

/// Generates the formulas from `seed`, checks them on up to `jobs` threads
/// and assembles the records in generation order.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineReport> {
    let formulas = generate(cfg);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.max(1))
        .build()
        .map_err(|e| Error::Input(format!("cannot start {} worker threads: {e}", cfg.jobs)))?;
    let records: Vec<InstanceRecord> = pool.install(|| {
        formulas
            .into_par_iter()
            .map(|(id, f)| run_one(id, &f, cfg))
            .collect()
    });
    let mut summary = Summary {
        instances: records.len(),
        ..Summary::default()
    };
    for r in &records {
        if r.pass {
            summary.passed += 1;
        } else {
            summary.failed += 1;
        }
        if let Some(c) = &r.check {
            for a in [c.order, c.splits] {
                match a {
                    Answer::BudgetExhausted => summary.budget_exhaustions += 1,
                    Answer::OverCapacity => summary.over_capacity += 1,
                    _ => {}
                }
            }
        }
    }
    Ok(PipelineReport {
        seed: cfg.seed,
        records,
        summary,
    })
}
