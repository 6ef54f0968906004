//! Greedy content selection for a fixed cell-to-area membership.
//!
//! Areas are visited from the most to the least interested audience. Each
//! one takes the viable item (one whose tight usage keeps every touched
//! neighborhood within the broadcast cap, given the areas already fixed)
//! that maximizes the total score; an area with no viable item is left
//! inactive. Decisions are never revisited.

use crate::constraints::{touched_cells, InterferenceRule};
use crate::metric::{Occupancy, ScoreMode, SCORE_EPS};
use crate::model::{AreaId, AreaState, Budget, CellId, ContentCatalog, Plan, Topology};

/// How areas are ranked before content is assigned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InterestRanking {
    /// Users interested in any broadcastable item, summed over members.
    #[default]
    TotalInterest,
    /// Users interested in each member's single most popular item.
    TopItem,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AssignOptions {
    pub mode: ScoreMode,
    pub ranking: InterestRanking,
    pub rule: InterferenceRule,
}

impl AssignOptions {
    pub fn with_mode(mode: ScoreMode) -> Self {
        Self {
            mode,
            ..Self::default()
        }
    }
}

/// Outcome of one greedy pass: a state per input area (input order) and the
/// resulting total score.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Assignment {
    pub states: Vec<AreaState>,
    pub total: f64,
}

impl Assignment {
    pub fn all_active(&self) -> bool {
        self.states
            .iter()
            .all(|s| matches!(s, AreaState::Active { .. }))
    }
}

/// Runs the greedy pass over `(id, members)` pairs with sorted members.
pub(crate) fn assign_members(
    topology: &Topology,
    catalog: &ContentCatalog,
    budget: &Budget,
    areas: &[(AreaId, &[CellId])],
    opts: &AssignOptions,
) -> Assignment {
    let interest = |members: &[CellId]| -> u64 {
        members
            .iter()
            .map(|&c| match opts.ranking {
                InterestRanking::TotalInterest => catalog.broadcast_interest(c),
                InterestRanking::TopItem => {
                    catalog.popularity_row(c).iter().copied().max().unwrap_or(0) as u64
                }
            })
            .sum()
    };
    let mut order: Vec<(u64, AreaId, usize)> = areas
        .iter()
        .enumerate()
        .map(|(i, (id, members))| (interest(members), *id, i))
        .collect();
    order.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let mut occ = Occupancy::new(topology, catalog, budget);
    let mut states = vec![AreaState::Inactive; areas.len()];
    for &(_, _, idx) in &order {
        let members = areas[idx].1;
        if members.is_empty() {
            continue;
        }
        let touched = touched_cells(topology, members, opts.rule);
        let affected = union_sorted(&touched, members);
        let before: f64 = affected.iter().map(|&c| occ.cell_value(c, opts.mode)).sum();
        let mut best: Option<(crate::model::ContentId, u32, f64)> = None;
        for m in catalog.contents() {
            let usage = catalog.tight_usage(members, m);
            if !occ.fits(&touched, usage) {
                continue;
            }
            occ.add(members, &touched, m, usage);
            let after: f64 = affected.iter().map(|&c| occ.cell_value(c, opts.mode)).sum();
            occ.remove(members, &touched, m, usage);
            let delta = after - before;
            if best.is_none_or(|(_, _, b)| delta > b + SCORE_EPS) {
                best = Some((m, usage, delta));
            }
        }
        if let Some((content, usage, _)) = best {
            occ.add(members, &touched, content, usage);
            states[idx] = AreaState::Active { content, usage };
        }
    }
    Assignment {
        states,
        total: occ.total(opts.mode),
    }
}

fn union_sorted(a: &[CellId], b: &[CellId]) -> Vec<CellId> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    out.extend_from_slice(a);
    out.extend_from_slice(b);
    out.sort_unstable();
    out.dedup();
    out
}

/// Assigns content to every area of `plan` (any existing assignment is
/// discarded). Areas keep their input order in the returned plan.
pub fn assign_content(
    topology: &Topology,
    plan: &Plan,
    catalog: &ContentCatalog,
    budget: &Budget,
    mode: ScoreMode,
) -> Plan {
    assign_content_with(
        topology,
        plan,
        catalog,
        budget,
        &AssignOptions::with_mode(mode),
    )
}

pub fn assign_content_with(
    topology: &Topology,
    plan: &Plan,
    catalog: &ContentCatalog,
    budget: &Budget,
    opts: &AssignOptions,
) -> Plan {
    let pairs: Vec<(AreaId, &[CellId])> = plan.areas.iter().map(|a| (a.id, a.members())).collect();
    let result = assign_members(topology, catalog, budget, &pairs, opts);
    let mut out = plan.clone();
    for (area, state) in out.areas.iter_mut().zip(result.states) {
        area.state = state;
    }
    out
}
