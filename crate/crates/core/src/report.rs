//! Machine-readable reports shared by the command line and the bindings.
//! Output is deterministic: maps are ordered and no timestamps are taken.

use serde::Serialize;

use crate::computads::{Computad, DimensionSummary};
use crate::error::Result;
use crate::freecat::{AuditReport, Bounds, CellInfo, Term, Verdict};
use crate::operads::{Presentation, RegularityVerdict};
use crate::pasting::enumerate_trees;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct Report<T: Serialize> {
    pub schema_version: u32,
    pub command: String,
    pub bounds: Bounds,
    pub seed: u64,
    pub result: T,
}

impl<T: Serialize> Report<T> {
    pub fn new(command: &str, bounds: Bounds, seed: u64, result: T) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            bounds,
            seed,
            result,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FreeReport {
    pub dimensions: Vec<DimensionSummary>,
    pub cells: Vec<CellInfo>,
    pub cells_shown: usize,
    pub audit: AuditReport,
}

/// Per-dimension summary and up to `cell_limit` cells per dimension.
pub fn free_report(c: &Computad, cell_limit: usize) -> FreeReport {
    let e = c.free_algebra();
    let cells: Vec<CellInfo> = (0..=c.dim()).flat_map(|d| e.cells(d).into_iter().take(cell_limit)).collect();
    FreeReport {
        dimensions: c.free_summary(),
        cells_shown: cells.len(),
        cells,
        audit: e.audit(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RegularReport {
    pub label: &'static str,
    pub verdict: RegularityVerdict,
    pub note: &'static str,
}

pub fn regular_report(p: &Presentation) -> RegularReport {
    let verdict = p.is_strongly_regular();
    RegularReport {
        label: if verdict.strongly_regular { "STRONGLY-REGULAR" } else { "NOT-STRONGLY-REGULAR" },
        verdict,
        note: "verdict about this presentation; another presentation of the theory may differ",
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TreesReport {
    pub max_height: usize,
    pub max_width: usize,
    pub count: usize,
    pub by_height: Vec<usize>,
    pub trees: Vec<String>,
}

pub fn trees_report(max_height: usize, max_width: usize) -> TreesReport {
    let trees = enumerate_trees(max_height, max_width);
    let mut by_height = vec![0; max_height + 1];
    for t in &trees {
        by_height[t.height()] += 1;
    }
    TreesReport {
        max_height,
        max_width,
        count: trees.len(),
        by_height,
        trees: trees.iter().map(|t| t.serialize()).collect(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub term: String,
    pub dim: usize,
    pub class: Option<u32>,
    pub representative: Option<String>,
    pub compared_with: Option<String>,
    pub verdict: Option<String>,
    pub certificate_steps: Option<usize>,
    pub certificate_replayed: Option<bool>,
    pub detail: Option<String>,
}

/// Evaluates a term in the free algebra, and compares it with a second
/// term if one is given.
pub fn eval_report(c: &Computad, term: &str, other: Option<&str>) -> Result<EvalReport> {
    let e = c.free_algebra();
    let t: Term = e.parse_term(term)?;
    let class = e.eval(&t)?;
    let mut r = EvalReport {
        term: t.serialize(),
        dim: t.dim(),
        class,
        representative: class.map(|k| e.representative(t.dim(), k).serialize()),
        compared_with: None,
        verdict: None,
        certificate_steps: None,
        certificate_replayed: None,
        detail: None,
    };
    if let Some(o) = other {
        let u = e.parse_term(o)?;
        r.compared_with = Some(u.serialize());
        let v = e.equal_cells(&t, &u)?;
        r.verdict = Some(v.label().to_string());
        match v {
            Verdict::Equal(cert) => {
                r.certificate_steps = Some(cert.len());
                let replay = cert.replay(e);
                r.certificate_replayed = Some(replay.is_ok());
                r.detail = replay.err();
            }
            Verdict::Distinct(reason) => r.detail = Some(format!("{reason:?}")),
            Verdict::Unknown(why) => r.detail = Some(why),
        }
    }
    Ok(r)
}
