//! Per-cell satisfied-user score and plan-level reports.
//!
//! A cell's score counts the users served by broadcast in that cell plus the
//! unicast share of everyone else. The unicast share depends on the resource
//! blocks left after every active area touching the cell's closed
//! neighborhood has taken its usage.

use serde::{Deserialize, Serialize};

use crate::constraints::{touched_cells, InterferenceRule};
use crate::model::{
    uncovered_cells, AreaState, Budget, CellId, ContentCatalog, ContentId, Instance, ModelError,
    Plan, Topology,
};

/// Comparison tolerance for floating-point scores.
pub const SCORE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoreMode {
    /// Leftover-over-required ratio added as is; can exceed the remaining
    /// user count.
    Literal,
    /// Ratio clamped at 1 and scaled by the users still waiting for unicast,
    /// so a cell never scores above its population.
    #[default]
    Normalized,
}

impl ScoreMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ScoreMode::Literal => "literal",
            ScoreMode::Normalized => "normalized",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct PlanStats {
    /// Areas in the plan, including inactive ones.
    pub num_areas: usize,
    pub active_areas: usize,
    pub mean_area_size: f64,
    pub uncovered_cells: usize,
}

impl PlanStats {
    pub fn of(plan: &Plan, topology: &Topology) -> Self {
        let num_areas = plan.areas.len();
        let cells: usize = plan.areas.iter().map(|a| a.len()).sum();
        Self {
            num_areas,
            active_areas: plan.active_areas().count(),
            mean_area_size: if num_areas == 0 {
                0.0
            } else {
                cells as f64 / num_areas as f64
            },
            uncovered_cells: uncovered_cells(plan, topology).len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreReport {
    pub mode: ScoreMode,
    pub per_cell: Vec<f64>,
    pub total: f64,
    pub baseline_total: f64,
    pub improvement_abs: f64,
    /// Percent of the baseline; zero when the baseline is zero.
    pub improvement_pct: f64,
    pub stats: PlanStats,
}

/// Running per-cell resource usage and broadcast coverage of a set of active
/// areas.
#[derive(Debug, Clone)]
pub(crate) struct Occupancy<'a> {
    pub topology: &'a Topology,
    pub catalog: &'a ContentCatalog,
    pub budget: &'a Budget,
    used: Vec<u64>,
    // [cell * contents + content]: active areas containing the cell that
    // broadcast the content
    served: Vec<u32>,
}

impl<'a> Occupancy<'a> {
    pub fn new(topology: &'a Topology, catalog: &'a ContentCatalog, budget: &'a Budget) -> Self {
        let n = topology.num_cells();
        Self {
            topology,
            catalog,
            budget,
            used: vec![0; n],
            served: vec![0; n * catalog.num_contents()],
        }
    }

    pub fn for_instance(inst: &'a Instance) -> Self {
        Self::new(&inst.topology, &inst.catalog, &inst.budget)
    }

    /// Occupancy of the active areas of `plan`. Fails on unassigned areas.
    pub fn from_plan(
        topology: &'a Topology,
        catalog: &'a ContentCatalog,
        budget: &'a Budget,
        plan: &Plan,
        rule: InterferenceRule,
    ) -> Result<Self, ModelError> {
        plan.validate_ids(topology, catalog)?;
        let mut occ = Self::new(topology, catalog, budget);
        for area in &plan.areas {
            match area.state {
                AreaState::Unassigned => return Err(ModelError::MissingContent(area.id)),
                AreaState::Inactive => {}
                AreaState::Active { content, usage } => {
                    let touched = touched_cells(topology, area.members(), rule);
                    occ.add(area.members(), &touched, content, usage);
                }
            }
        }
        Ok(occ)
    }

    #[inline]
    pub fn is_served(&self, c: CellId, m: ContentId) -> bool {
        self.served[c.index() * self.catalog.num_contents() + m.index()] > 0
    }

    pub fn add(&mut self, members: &[CellId], touched: &[CellId], content: ContentId, usage: u32) {
        for &c in touched {
            self.used[c.index()] += usage as u64;
        }
        let k = self.catalog.num_contents();
        for &c in members {
            self.served[c.index() * k + content.index()] += 1;
        }
    }

    pub fn remove(
        &mut self,
        members: &[CellId],
        touched: &[CellId],
        content: ContentId,
        usage: u32,
    ) {
        for &c in touched {
            self.used[c.index()] -= usage as u64;
        }
        let k = self.catalog.num_contents();
        for &c in members {
            self.served[c.index() * k + content.index()] -= 1;
        }
    }

    /// Whether every touched cell stays within the broadcast cap after adding
    /// `usage`.
    pub fn fits(&self, touched: &[CellId], usage: u32) -> bool {
        let cap = self.budget.broadcast_cap as u64;
        touched
            .iter()
            .all(|&c| self.used[c.index()] + usage as u64 <= cap)
    }

    pub fn cell_value(&self, c: CellId, mode: ScoreMode) -> f64 {
        let k = self.catalog.num_contents();
        let base = c.index() * k;
        let mut broadcast = 0u64;
        let mut need = 0.0f64;
        let mut waiting = self.catalog.unicast_users(c) as u64;
        for (m, (&pop, &dem)) in self
            .catalog
            .popularity_row(c)
            .iter()
            .zip(self.catalog.demand_row(c))
            .enumerate()
        {
            if self.served[base + m] > 0 {
                broadcast += pop as u64;
            } else {
                need += pop as f64 * dem as f64;
                waiting += pop as u64;
            }
        }
        need += self.catalog.unicast_users(c) as f64 * self.catalog.unicast_demand(c);
        let avail = (self.budget.total as f64 - self.used[c.index()] as f64).max(0.0);
        let unicast = match mode {
            ScoreMode::Literal => {
                if need > 0.0 {
                    avail / need
                } else {
                    0.0
                }
            }
            ScoreMode::Normalized => {
                if need > 0.0 {
                    (avail / need).min(1.0) * waiting as f64
                } else {
                    waiting as f64
                }
            }
        };
        broadcast as f64 + unicast
    }

    pub fn per_cell(&self, mode: ScoreMode) -> Vec<f64> {
        self.topology
            .cells()
            .map(|c| self.cell_value(c, mode))
            .collect()
    }

    /// Sum of cell values in canonical cell order.
    pub fn total(&self, mode: ScoreMode) -> f64 {
        self.topology
            .cells()
            .map(|c| self.cell_value(c, mode))
            .sum()
    }
}

pub fn cell_score(
    topology: &Topology,
    plan: &Plan,
    catalog: &ContentCatalog,
    budget: &Budget,
    c: CellId,
    mode: ScoreMode,
) -> Result<f64, ModelError> {
    cell_score_with(
        topology,
        plan,
        catalog,
        budget,
        c,
        mode,
        InterferenceRule::default(),
    )
}

pub fn cell_score_with(
    topology: &Topology,
    plan: &Plan,
    catalog: &ContentCatalog,
    budget: &Budget,
    c: CellId,
    mode: ScoreMode,
    rule: InterferenceRule,
) -> Result<f64, ModelError> {
    if !topology.contains(c) {
        return Err(ModelError::UnknownCell(c));
    }
    let occ = Occupancy::from_plan(topology, catalog, budget, plan, rule)?;
    Ok(occ.cell_value(c, mode))
}

pub fn total_score(
    topology: &Topology,
    plan: &Plan,
    catalog: &ContentCatalog,
    budget: &Budget,
    mode: ScoreMode,
) -> Result<ScoreReport, ModelError> {
    total_score_with(
        topology,
        plan,
        catalog,
        budget,
        mode,
        InterferenceRule::default(),
    )
}

pub fn total_score_with(
    topology: &Topology,
    plan: &Plan,
    catalog: &ContentCatalog,
    budget: &Budget,
    mode: ScoreMode,
    rule: InterferenceRule,
) -> Result<ScoreReport, ModelError> {
    let occ = Occupancy::from_plan(topology, catalog, budget, plan, rule)?;
    let per_cell = occ.per_cell(mode);
    let total: f64 = per_cell.iter().sum();
    let baseline_total = baseline_total(topology, catalog, budget, mode);
    let improvement_abs = total - baseline_total;
    let improvement_pct = if baseline_total > 0.0 {
        100.0 * improvement_abs / baseline_total
    } else {
        0.0
    };
    Ok(ScoreReport {
        mode,
        per_cell,
        total,
        baseline_total,
        improvement_abs,
        improvement_pct,
        stats: PlanStats::of(plan, topology),
    })
}

/// Score of the no-broadcast plan.
pub fn baseline_total(
    topology: &Topology,
    catalog: &ContentCatalog,
    budget: &Budget,
    mode: ScoreMode,
) -> f64 {
    Occupancy::new(topology, catalog, budget).total(mode)
}

/// Convenience wrapper over [`total_score`] for an [`Instance`].
pub fn score_plan(
    inst: &Instance,
    plan: &Plan,
    mode: ScoreMode,
) -> Result<ScoreReport, ModelError> {
    total_score(&inst.topology, plan, &inst.catalog, &inst.budget, mode)
}
