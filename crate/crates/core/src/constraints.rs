//! Plan feasibility: per-area stream sufficiency, per-cell broadcast budget,
//! neighborhood (interference) budget, the area-count cap and contiguity.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::model::{
    AreaId, AreaState, Budget, CellId, ContentCatalog, ModelError, Plan, Topology,
    STANDARD_AREA_LIMIT,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ConstraintId {
    StreamMin,
    CellBudget,
    NeighborBudget,
    AreaCount,
    Contiguity,
}

impl fmt::Display for ConstraintId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConstraintId::StreamMin => "STREAM_MIN",
            ConstraintId::CellBudget => "CELL_BUDGET",
            ConstraintId::NeighborBudget => "NEIGHBOR_BUDGET",
            ConstraintId::AreaCount => "AREA_COUNT",
            ConstraintId::Contiguity => "CONTIGUITY",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Subject {
    Cell(CellId),
    Area(AreaId),
    Plan,
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Cell(c) => write!(f, "{c}"),
            Subject::Area(a) => write!(f, "{a}"),
            Subject::Plan => f.write_str("plan"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub constraint: ConstraintId,
    pub subject: Subject,
    pub measured: u64,
    pub bound: u64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.constraint {
            ConstraintId::StreamMin => write!(
                f,
                "{} at {}: usage {} below required {}",
                self.constraint, self.subject, self.measured, self.bound
            ),
            ConstraintId::Contiguity => write!(
                f,
                "{} at {}: {} members in {} connected pieces",
                self.constraint, self.subject, self.bound, self.measured
            ),
            _ => write!(
                f,
                "{} at {}: {} exceeds {}",
                self.constraint, self.subject, self.measured, self.bound
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct FeasibilityReport {
    pub violations: Vec<Violation>,
}

impl FeasibilityReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, id: ConstraintId) -> usize {
        self.violations
            .iter()
            .filter(|v| v.constraint == id)
            .count()
    }

    fn extend(&mut self, other: FeasibilityReport) {
        self.violations.extend(other.violations);
    }
}

/// Which areas load a cell's neighborhood.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum InterferenceRule {
    /// An area counts for cell `c` when at least one of its members lies in
    /// the closed neighborhood of `c`.
    #[default]
    AnyNeighbor,
    /// An area counts only when exactly one of its members lies in the closed
    /// neighborhood of `c`.
    ExactlyOne,
}

/// Cells whose neighborhood budget is charged by an area with `members`
/// (sorted).
pub fn touched_cells(
    topology: &Topology,
    members: &[CellId],
    rule: InterferenceRule,
) -> Vec<CellId> {
    match rule {
        InterferenceRule::AnyNeighbor => topology.neighborhood_of_set(members),
        InterferenceRule::ExactlyOne => {
            let mut hits = vec![0u32; topology.num_cells()];
            for &m in members {
                // c ∈ N^m  <=>  m ∈ N^c
                for &c in topology.closed(m) {
                    hits[c.index()] += 1;
                }
            }
            hits.iter()
                .enumerate()
                .filter(|(_, &h)| h == 1)
                .map(|(i, _)| CellId(i as u32))
                .collect()
        }
    }
}

/// Every active area uses at least the demand of its content in each member.
pub fn check_stream_min(
    plan: &Plan,
    catalog: &ContentCatalog,
) -> Result<FeasibilityReport, ModelError> {
    if let Some(a) = plan.areas.iter().find(|a| a.state == AreaState::Unassigned) {
        return Err(ModelError::MissingContent(a.id));
    }
    Ok(stream_min(plan, catalog))
}

fn stream_min(plan: &Plan, catalog: &ContentCatalog) -> FeasibilityReport {
    let mut report = FeasibilityReport::default();
    for area in &plan.areas {
        let AreaState::Active { content, usage } = area.state else {
            continue;
        };
        for &c in area.members() {
            let need = catalog.demand(c, content);
            if usage < need {
                report.violations.push(Violation {
                    constraint: ConstraintId::StreamMin,
                    subject: Subject::Cell(c),
                    measured: usage as u64,
                    bound: need as u64,
                });
            }
        }
    }
    report
}

/// For each cell, the usage of the areas containing it fits the broadcast cap.
pub fn check_cell_budget(plan: &Plan, budget: &Budget) -> FeasibilityReport {
    let mut load: BTreeMap<CellId, u64> = BTreeMap::new();
    for area in plan.active_areas() {
        for &c in area.members() {
            *load.entry(c).or_default() += area.usage() as u64;
        }
    }
    over_cap(load, budget, ConstraintId::CellBudget)
}

/// For each cell, the usage of the areas reaching its closed neighborhood
/// fits the broadcast cap.
pub fn check_neighbor_budget(
    topology: &Topology,
    plan: &Plan,
    budget: &Budget,
) -> FeasibilityReport {
    check_neighbor_budget_with(topology, plan, budget, InterferenceRule::default())
}

pub fn check_neighbor_budget_with(
    topology: &Topology,
    plan: &Plan,
    budget: &Budget,
    rule: InterferenceRule,
) -> FeasibilityReport {
    let mut load: BTreeMap<CellId, u64> = BTreeMap::new();
    for area in plan.active_areas() {
        for c in touched_cells(topology, area.members(), rule) {
            *load.entry(c).or_default() += area.usage() as u64;
        }
    }
    over_cap(load, budget, ConstraintId::NeighborBudget)
}

fn over_cap(load: BTreeMap<CellId, u64>, budget: &Budget, id: ConstraintId) -> FeasibilityReport {
    let cap = budget.broadcast_cap as u64;
    FeasibilityReport {
        violations: load
            .into_iter()
            .filter(|&(_, l)| l > cap)
            .map(|(c, l)| Violation {
                constraint: id,
                subject: Subject::Cell(c),
                measured: l,
                bound: cap,
            })
            .collect(),
    }
}

/// All checks together. Unassigned and inactive areas count toward the area
/// cap and contiguity but not toward resource constraints.
pub fn check_plan(
    topology: &Topology,
    plan: &Plan,
    catalog: &ContentCatalog,
    budget: &Budget,
) -> Result<FeasibilityReport, ModelError> {
    plan.validate_ids(topology, catalog)?;
    let mut report = stream_min(plan, catalog);
    report.extend(check_cell_budget(plan, budget));
    report.extend(check_neighbor_budget(topology, plan, budget));
    let cap = budget.max_areas.min(STANDARD_AREA_LIMIT) as u64;
    if plan.areas.len() as u64 > cap {
        report.violations.push(Violation {
            constraint: ConstraintId::AreaCount,
            subject: Subject::Plan,
            measured: plan.areas.len() as u64,
            bound: cap,
        });
    }
    for area in &plan.areas {
        if !topology.is_connected(area.members()) {
            let sub = Topology::new(
                area.members().iter().map(|_| 0).collect(),
                topology.edges().iter().filter_map(|&(a, b)| {
                    let ia = area.members().binary_search(&a).ok()?;
                    let ib = area.members().binary_search(&b).ok()?;
                    Some((CellId(ia as u32), CellId(ib as u32)))
                }),
            )
            .expect("induced subgraph is well formed");
            report.violations.push(Violation {
                constraint: ConstraintId::Contiguity,
                subject: Subject::Area(area.id),
                measured: sub.component_count() as u64,
                bound: area.len() as u64,
            });
        }
    }
    Ok(report)
}
