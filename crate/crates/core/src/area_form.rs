//! Broadcast area formation.
//!
//! Two greedy builders are provided. [`merge_plan`] starts from one area per
//! cell and repeatedly unites the most profitable pair of adjacent areas;
//! its output partitions the cells. [`grow_plan`] seeds an area at the most
//! profitable cell, extends it cell by cell while the next addition pays off,
//! then seeds the next one; areas may overlap and cells may stay uncovered.
//! Both finish with greedy content assignment over the final membership.
//!
//! Profits come in two kinds. Demand profits look only at popularity.
//! Holistic profits apply the candidate action to a copy of the membership,
//! rerun content assignment and report the change in total score. Either way
//! an action whose new area cannot carry any content within the broadcast
//! cap is given a profit of negative infinity.

use std::collections::BTreeSet;

use log::debug;
use thiserror::Error;

use crate::constraints::{touched_cells, InterferenceRule};
use crate::content_assign::{assign_content_with, assign_members, AssignOptions, InterestRanking};
use crate::exec::Exec;
use crate::metric::{Occupancy, ScoreMode, SCORE_EPS};
use crate::model::{
    Area, AreaId, CellId, ContentCatalog, ContentId, Instance, ModelError, Plan, Topology,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProfitKind {
    #[default]
    Demand,
    Holistic,
}

impl ProfitKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProfitKind::Demand => "demand",
            ProfitKind::Holistic => "holistic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    #[default]
    Merge,
    Grow,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Merge => "merge",
            Method::Grow => "grow",
        }
    }
}

/// Demand-based merge profit variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MergeProfit {
    /// Alignment of the union minus the user-weighted alignment of the two
    /// parts. Never positive; zero when both parts favour the same item. A
    /// merge is accepted while this is not negative.
    #[default]
    Dilution,
    /// Alignment of the union alone. Always non-negative, so merging only
    /// stops at areas nobody is interested in.
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Merge(AreaId, AreaId),
    Create(CellId),
    Add(CellId, AreaId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PlanOptions {
    pub profit: ProfitKind,
    pub mode: ScoreMode,
    pub ranking: InterestRanking,
    pub rule: InterferenceRule,
    pub merge_profit: MergeProfit,
    pub exec: Exec,
}

impl PlanOptions {
    pub fn new(profit: ProfitKind) -> Self {
        Self {
            profit,
            ..Self::default()
        }
    }

    fn assign(&self) -> AssignOptions {
        AssignOptions {
            mode: self.mode,
            ranking: self.ranking,
            rule: self.rule,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlanError {
    #[error(
        "cannot partition {components} disconnected components into at most {max_areas} areas"
    )]
    Disconnected { components: usize, max_areas: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Merge alignment: users of the union interested in its single
/// most popular item, over the users of both areas. Zero users give zero.
pub fn pr_merge_demand(topology: &Topology, a1: &Area, a2: &Area, catalog: &ContentCatalog) -> f64 {
    let union: BTreeSet<CellId> = a1.members().iter().chain(a2.members()).copied().collect();
    let users = a1.users(topology) + a2.users(topology);
    if users == 0 {
        return 0.0;
    }
    best_item_users(catalog, union.iter().copied()) as f64 / users as f64
}

/// Dilution-adjusted merge profit: [`pr_merge_demand`] minus the
/// user-weighted mean of each area's own alignment.
pub fn merge_gain_demand(
    topology: &Topology,
    a1: &Area,
    a2: &Area,
    catalog: &ContentCatalog,
) -> f64 {
    let union: BTreeSet<CellId> = a1.members().iter().chain(a2.members()).copied().collect();
    let users = a1.users(topology) + a2.users(topology);
    if users == 0 {
        return 0.0;
    }
    let joint = best_item_users(catalog, union.iter().copied()) as i64;
    let parts = best_item_users(catalog, a1.members().iter().copied()) as i64
        + best_item_users(catalog, a2.members().iter().copied()) as i64;
    (joint - parts) as f64 / users as f64
}

fn best_item_users(catalog: &ContentCatalog, cells: impl Iterator<Item = CellId> + Clone) -> u64 {
    catalog
        .contents()
        .map(|m| {
            cells
                .clone()
                .map(|c| catalog.popularity(c, m) as u64)
                .sum::<u64>()
        })
        .max()
        .unwrap_or(0)
}

/// Most popular item in `c` not yet broadcast there by an active area of
/// `plan_so_far`; zero once every demanded item is covered.
pub fn pr_create_demand(c: CellId, catalog: &ContentCatalog, plan_so_far: &Plan) -> u32 {
    residual_best(c, catalog, |m| {
        plan_so_far
            .active_areas()
            .any(|a| a.content() == Some(m) && a.contains(c))
    })
    .map_or(0, |(_, p)| p)
}

fn residual_best(
    c: CellId,
    catalog: &ContentCatalog,
    served: impl Fn(ContentId) -> bool,
) -> Option<(ContentId, u32)> {
    let mut best: Option<(ContentId, u32)> = None;
    for m in catalog.contents() {
        if served(m) {
            continue;
        }
        let p = catalog.popularity(c, m);
        if best.is_none_or(|(_, b)| p > b) {
            best = Some((m, p));
        }
    }
    best
}

/// Popularity in `c` of the content `area` broadcasts.
pub fn pr_add_demand(c: CellId, area: &Area, catalog: &ContentCatalog) -> Result<u32, ModelError> {
    let m = area.content().ok_or(ModelError::MissingContent(area.id))?;
    Ok(catalog.popularity(c, m))
}

/// Score change from applying `action` to the membership of `plan` and
/// rerunning content assignment. Negative infinity when the resulting
/// membership breaks the area cap or contiguity.
pub fn pr_holistic(
    action: Action,
    inst: &Instance,
    plan: &Plan,
    opts: &PlanOptions,
) -> Result<f64, ModelError> {
    plan.validate_ids(&inst.topology, &inst.catalog)?;
    let mut areas: Vec<(AreaId, Vec<CellId>)> = plan
        .areas
        .iter()
        .map(|a| (a.id, a.members().to_vec()))
        .collect();
    let before = total_of(inst, &areas, opts).total;
    let position = |areas: &[(AreaId, Vec<CellId>)], id: AreaId| {
        areas
            .iter()
            .position(|(a, _)| *a == id)
            .ok_or(ModelError::UnknownArea(id))
    };
    match action {
        Action::Merge(a1, a2) => {
            let i = position(&areas, a1)?;
            let j = position(&areas, a2)?;
            if i != j {
                let taken = areas[j].1.clone();
                areas[i].1 = union_sorted(&areas[i].1, &taken);
                areas.remove(j);
            }
        }
        Action::Create(c) => {
            if !inst.topology.contains(c) {
                return Err(ModelError::UnknownCell(c));
            }
            let next = areas.iter().map(|(id, _)| id.0 + 1).max().unwrap_or(0);
            areas.push((AreaId(next), vec![c]));
        }
        Action::Add(c, a) => {
            if !inst.topology.contains(c) {
                return Err(ModelError::UnknownCell(c));
            }
            let i = position(&areas, a)?;
            areas[i].1 = union_sorted(&areas[i].1, &[c]);
        }
    }
    if areas.len() > inst.budget.area_cap()
        || areas.iter().any(|(_, m)| !inst.topology.is_connected(m))
    {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(total_of(inst, &areas, opts).total - before)
}

fn total_of(
    inst: &Instance,
    areas: &[(AreaId, Vec<CellId>)],
    opts: &PlanOptions,
) -> crate::content_assign::Assignment {
    let pairs: Vec<(AreaId, &[CellId])> = areas.iter().map(|(id, m)| (*id, m.as_slice())).collect();
    assign_members(
        &inst.topology,
        &inst.catalog,
        &inst.budget,
        &pairs,
        &opts.assign(),
    )
}

fn union_sorted(a: &[CellId], b: &[CellId]) -> Vec<CellId> {
    let mut v: Vec<CellId> = a.iter().chain(b).copied().collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// Index of the first maximum, treating values within [`SCORE_EPS`] as
/// equal so earlier candidates win ties.
fn argmax(profits: &[f64]) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &p) in profits.iter().enumerate() {
        if best.is_none_or(|(_, b)| p > b + SCORE_EPS) {
            best = Some((i, p));
        }
    }
    best
}

/// Some item fits the broadcast cap over `members` by itself.
fn standalone_feasible(catalog: &ContentCatalog, members: &[CellId], cap: u32) -> bool {
    catalog
        .contents()
        .any(|m| catalog.tight_usage(members, m) <= cap)
}

struct MergeArea {
    members: Vec<CellId>,
    // users per content summed over members
    interest: Vec<u64>,
    users: u64,
}

impl MergeArea {
    fn best(&self) -> u64 {
        self.interest.iter().copied().max().unwrap_or(0)
    }
}

/// Agglomerative merge of adjacent areas, starting from singletons.
pub fn merge_plan(inst: &Instance, opts: &PlanOptions) -> Result<Plan, PlanError> {
    let topo = &inst.topology;
    let cat = &inst.catalog;
    let cap = inst.budget.area_cap();
    let components = topo.component_count();
    if components > cap {
        return Err(PlanError::Disconnected {
            components,
            max_areas: cap,
        });
    }

    let mut areas: Vec<Option<MergeArea>> = topo
        .cells()
        .map(|c| {
            Some(MergeArea {
                members: vec![c],
                interest: cat.popularity_row(c).iter().map(|&p| p as u64).collect(),
                users: topo.users(c) as u64,
            })
        })
        .collect();
    let mut owner: Vec<usize> = (0..topo.num_cells()).collect();
    let mut live = topo.num_cells();

    loop {
        let pairs: Vec<(usize, usize)> = topo
            .edges()
            .iter()
            .filter_map(|&(u, v)| {
                let (a, b) = (owner[u.index()], owner[v.index()]);
                (a != b).then(|| (a.min(b), a.max(b)))
            })
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        if pairs.is_empty() {
            break;
        }

        let profits = match opts.profit {
            ProfitKind::Demand => opts.exec.map(&pairs, |&(i, j)| {
                let (a, b) = (areas[i].as_ref().unwrap(), areas[j].as_ref().unwrap());
                let merged = union_sorted(&a.members, &b.members);
                if !standalone_feasible(cat, &merged, inst.budget.broadcast_cap) {
                    return f64::NEG_INFINITY;
                }
                let users = a.users + b.users;
                if users == 0 {
                    return 0.0;
                }
                let joint = a
                    .interest
                    .iter()
                    .zip(&b.interest)
                    .map(|(x, y)| x + y)
                    .max()
                    .unwrap_or(0);
                match opts.merge_profit {
                    MergeProfit::Raw => joint as f64 / users as f64,
                    MergeProfit::Dilution => {
                        (joint as i64 - a.best() as i64 - b.best() as i64) as f64 / users as f64
                    }
                }
            }),
            ProfitKind::Holistic => {
                let current: Vec<(AreaId, &[CellId])> = areas
                    .iter()
                    .enumerate()
                    .filter_map(|(i, a)| {
                        a.as_ref().map(|a| (AreaId(i as u32), a.members.as_slice()))
                    })
                    .collect();
                let base = assign_members(topo, cat, &inst.budget, &current, &opts.assign()).total;
                opts.exec.map(&pairs, |&(i, j)| {
                    let merged = union_sorted(
                        &areas[i].as_ref().unwrap().members,
                        &areas[j].as_ref().unwrap().members,
                    );
                    if !standalone_feasible(cat, &merged, inst.budget.broadcast_cap) {
                        return f64::NEG_INFINITY;
                    }
                    let probe: Vec<(AreaId, &[CellId])> = current
                        .iter()
                        .filter(|(id, _)| id.index() != j)
                        .map(|&(id, m)| {
                            if id.index() == i {
                                (id, merged.as_slice())
                            } else {
                                (id, m)
                            }
                        })
                        .collect();
                    assign_members(topo, cat, &inst.budget, &probe, &opts.assign()).total - base
                })
            }
        };

        let (k, profit) = argmax(&profits).expect("pairs is non-empty");
        let accept = match (opts.profit, opts.merge_profit) {
            (ProfitKind::Demand, MergeProfit::Dilution) => profit >= -SCORE_EPS,
            _ => profit > SCORE_EPS,
        };
        if live <= cap && !accept {
            break;
        }
        let (i, j) = pairs[k];
        debug!("merge a{i} + a{j} (profit {profit:.6}, {live} areas)");
        let b = areas[j].take().unwrap();
        let a = areas[i].as_mut().unwrap();
        for &c in &b.members {
            owner[c.index()] = i;
        }
        a.members = union_sorted(&a.members, &b.members);
        for (x, y) in a.interest.iter_mut().zip(&b.interest) {
            *x += y;
        }
        a.users += b.users;
        live -= 1;
    }

    if live > cap {
        return Err(PlanError::Disconnected {
            components,
            max_areas: cap,
        });
    }
    let membership = Plan::new(
        areas
            .into_iter()
            .flatten()
            .enumerate()
            .map(|(i, a)| Area::new(AreaId(i as u32), a.members))
            .collect(),
    );
    Ok(assign_content_with(
        topo,
        &membership,
        cat,
        &inst.budget,
        &opts.assign(),
    ))
}

struct GrowArea {
    members: Vec<CellId>,
    provisional: Option<ContentId>,
}

/// Seed-and-extend area formation.
pub fn grow_plan(inst: &Instance, opts: &PlanOptions) -> Result<Plan, PlanError> {
    let topo = &inst.topology;
    let cat = &inst.catalog;
    let cap = inst.budget.area_cap();
    let n = topo.num_cells();
    let cells: Vec<CellId> = topo.cells().collect();

    let mut done: Vec<GrowArea> = Vec::new();
    // provisional occupancy of completed areas, demand profits only
    let mut occ = Occupancy::for_instance(inst);

    while done.len() < cap {
        let (seed, content) = match opts.profit {
            ProfitKind::Demand => {
                let scored = opts.exec.map(&cells, |&c| {
                    let touched = touched_cells(topo, &[c], opts.rule);
                    let mut best: Option<(ContentId, f64)> = None;
                    for m in cat.contents() {
                        if occ.is_served(c, m) {
                            continue;
                        }
                        let p = if occ.fits(&touched, cat.demand(c, m)) {
                            cat.popularity(c, m) as f64
                        } else {
                            f64::NEG_INFINITY
                        };
                        if best.is_none_or(|(_, b)| p > b) {
                            best = Some((m, p));
                        }
                    }
                    best
                });
                let profits: Vec<f64> = scored
                    .iter()
                    .map(|b| b.map_or(f64::NEG_INFINITY, |(_, p)| p))
                    .collect();
                match argmax(&profits) {
                    Some((i, p)) if p > 0.0 => (cells[i], scored[i].map(|(m, _)| m)),
                    _ => break,
                }
            }
            ProfitKind::Holistic => {
                let base = holistic_total(inst, &done, None, opts);
                let next = AreaId(done.len() as u32);
                let profits = opts.exec.map(&cells, |&c| {
                    holistic_probe(inst, &done, Some((next, &[c])), opts)
                        .map_or(f64::NEG_INFINITY, |t| t - base)
                });
                match argmax(&profits) {
                    Some((i, p)) if p > SCORE_EPS => (cells[i], None),
                    _ => break,
                }
            }
        };
        debug!("grow: seed {seed} with {content:?}");

        let mut area = GrowArea {
            members: vec![seed],
            provisional: content,
        };
        let id = AreaId(done.len() as u32);
        while area.members.len() < n {
            let frontier: Vec<CellId> = topo
                .neighborhood_of_set(&area.members)
                .into_iter()
                .filter(|c| area.members.binary_search(c).is_err())
                .collect();
            if frontier.is_empty() {
                break;
            }
            let profits = match opts.profit {
                ProfitKind::Demand => {
                    let m = area.provisional.expect("demand seeds carry content");
                    opts.exec.map(&frontier, |&c| {
                        let grown = union_sorted(&area.members, &[c]);
                        let touched = touched_cells(topo, &grown, opts.rule);
                        if occ.fits(&touched, cat.tight_usage(&grown, m)) {
                            cat.popularity(c, m) as f64
                        } else {
                            f64::NEG_INFINITY
                        }
                    })
                }
                ProfitKind::Holistic => {
                    let base = holistic_total(inst, &done, Some((id, &area.members)), opts);
                    opts.exec.map(&frontier, |&c| {
                        let grown = union_sorted(&area.members, &[c]);
                        holistic_probe(inst, &done, Some((id, &grown)), opts)
                            .map_or(f64::NEG_INFINITY, |t| t - base)
                    })
                }
            };
            let accept = match argmax(&profits) {
                Some((i, p)) if p > SCORE_EPS => Some(frontier[i]),
                _ => None,
            };
            let Some(c) = accept else { break };
            area.members = union_sorted(&area.members, &[c]);
        }

        if let Some(m) = area.provisional {
            let touched = touched_cells(topo, &area.members, opts.rule);
            occ.add(
                &area.members,
                &touched,
                m,
                cat.tight_usage(&area.members, m),
            );
        }
        debug!("grow: area {id} with {} cells", area.members.len());
        done.push(area);
    }

    let membership = Plan::new(
        done.into_iter()
            .enumerate()
            .map(|(i, a)| Area::new(AreaId(i as u32), a.members))
            .collect(),
    );
    Ok(assign_content_with(
        topo,
        &membership,
        cat,
        &inst.budget,
        &opts.assign(),
    ))
}

fn holistic_total(
    inst: &Instance,
    done: &[GrowArea],
    extra: Option<(AreaId, &[CellId])>,
    opts: &PlanOptions,
) -> f64 {
    let mut pairs: Vec<(AreaId, &[CellId])> = done
        .iter()
        .enumerate()
        .map(|(i, a)| (AreaId(i as u32), a.members.as_slice()))
        .collect();
    pairs.extend(extra);
    assign_members(
        &inst.topology,
        &inst.catalog,
        &inst.budget,
        &pairs,
        &opts.assign(),
    )
    .total
}

/// Total score after adding `extra`, or `None` when content assignment can
/// no longer keep every area active.
fn holistic_probe(
    inst: &Instance,
    done: &[GrowArea],
    extra: Option<(AreaId, &[CellId])>,
    opts: &PlanOptions,
) -> Option<f64> {
    let mut pairs: Vec<(AreaId, &[CellId])> = done
        .iter()
        .enumerate()
        .map(|(i, a)| (AreaId(i as u32), a.members.as_slice()))
        .collect();
    pairs.extend(extra);
    let result = assign_members(
        &inst.topology,
        &inst.catalog,
        &inst.budget,
        &pairs,
        &opts.assign(),
    );
    result.all_active().then_some(result.total)
}

/// Runs the chosen builder.
pub fn build_plan(inst: &Instance, method: Method, opts: &PlanOptions) -> Result<Plan, PlanError> {
    match method {
        Method::Merge => merge_plan(inst, opts),
        Method::Grow => grow_plan(inst, opts),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::check_plan;
    use crate::model::{AreaState, Budget, ContentItem, ContentKind};

    fn items(k: usize) -> Vec<ContentItem> {
        (0..k)
            .map(|i| ContentItem {
                name: format!("m{i}"),
                kind: ContentKind::Streaming,
            })
            .collect()
    }

    fn path_instance(pop: Vec<Vec<u32>>, demand: u32, cap: u32, max_areas: u32) -> Instance {
        let n = pop.len();
        let k = pop[0].len();
        let users = pop.iter().map(|r| r.iter().sum()).collect();
        let topo = Topology::new(users, (1..n as u32).map(|i| (CellId(i - 1), CellId(i)))).unwrap();
        let cat = ContentCatalog::new(
            items(k),
            pop,
            vec![vec![demand; k]; n],
            vec![0; n],
            vec![0.0; n],
        )
        .unwrap();
        Instance::new(topo, cat, Budget::new(500, cap, max_areas).unwrap()).unwrap()
    }

    fn area(id: u32, members: &[u32]) -> Area {
        Area::new(AreaId(id), members.iter().map(|&c| CellId(c)))
    }

    #[test]
    fn merge_profit_values() {
        let same = path_instance(vec![vec![60, 0], vec![60, 0]], 120, 300, 2);
        let p = pr_merge_demand(
            &same.topology,
            &area(0, &[0]),
            &area(1, &[1]),
            &same.catalog,
        );
        assert_eq!(p, 1.0);
        assert_eq!(
            merge_gain_demand(
                &same.topology,
                &area(0, &[0]),
                &area(1, &[1]),
                &same.catalog
            ),
            0.0
        );
        let apart = path_instance(vec![vec![60, 0], vec![0, 60]], 120, 300, 2);
        let p = pr_merge_demand(
            &apart.topology,
            &area(0, &[0]),
            &area(1, &[1]),
            &apart.catalog,
        );
        assert_eq!(p, 0.5);
        assert_eq!(
            merge_gain_demand(
                &apart.topology,
                &area(0, &[0]),
                &area(1, &[1]),
                &apart.catalog
            ),
            -0.5
        );
    }

    #[test]
    fn create_profit_is_residual() {
        let inst = path_instance(vec![vec![48, 12]], 120, 300, 2);
        let c = CellId(0);
        assert_eq!(pr_create_demand(c, &inst.catalog, &Plan::empty()), 48);
        let covered_top = Plan::new(vec![area(0, &[0]).with_content(ContentId(0), 120)]);
        assert_eq!(pr_create_demand(c, &inst.catalog, &covered_top), 12);
        let mut both = covered_top.clone();
        both.areas
            .push(area(1, &[0]).with_content(ContentId(1), 120));
        assert_eq!(pr_create_demand(c, &inst.catalog, &both), 0);
    }

    #[test]
    fn add_profit_requires_content() {
        let inst = path_instance(vec![vec![48, 12], vec![0, 60]], 120, 300, 2);
        let a = area(0, &[0]).with_content(ContentId(0), 120);
        assert_eq!(pr_add_demand(CellId(0), &a, &inst.catalog), Ok(48));
        assert_eq!(pr_add_demand(CellId(1), &a, &inst.catalog), Ok(0));
        assert_eq!(
            pr_add_demand(CellId(1), &area(3, &[0]), &inst.catalog),
            Err(ModelError::MissingContent(AreaId(3)))
        );
    }

    #[test]
    fn holistic_profit_cases() {
        let inst = path_instance(vec![vec![60, 0], vec![60, 0]], 120, 300, 4);
        let opts = PlanOptions::new(ProfitKind::Holistic);
        let first = pr_holistic(Action::Create(CellId(0)), &inst, &Plan::empty(), &opts).unwrap();
        assert!(first > 0.0);
        let plan = Plan::new(vec![area(0, &[0]), area(1, &[1])]);
        assert_eq!(
            pr_holistic(Action::Merge(AreaId(0), AreaId(0)), &inst, &plan, &opts),
            Ok(0.0)
        );
        let gap = Plan::new(vec![area(0, &[0])]);
        let three = path_instance(vec![vec![60, 0]; 3], 120, 300, 4);
        let far = pr_holistic(Action::Add(CellId(2), AreaId(0)), &three, &gap, &opts).unwrap();
        assert_eq!(far, f64::NEG_INFINITY);
    }

    #[test]
    fn merge_keeps_disjoint_interests_apart() {
        let inst = path_instance(vec![vec![60, 0], vec![0, 60]], 120, 300, 2);
        let plan = merge_plan(&inst, &PlanOptions::default()).unwrap();
        assert_eq!(plan.areas.len(), 2);
        assert_eq!(plan.areas[0].content(), Some(ContentId(0)));
        assert_eq!(plan.areas[1].content(), Some(ContentId(1)));
    }

    #[test]
    fn merge_joins_uniform_demand_and_stays_feasible() {
        let inst = path_instance(vec![vec![48, 12]; 4], 120, 300, 4);
        let plan = merge_plan(&inst, &PlanOptions::default()).unwrap();
        assert!(plan.areas.len() < 4);
        let r = check_plan(&inst.topology, &plan, &inst.catalog, &inst.budget).unwrap();
        assert!(r.ok(), "{:?}", r.violations);
    }

    #[test]
    fn merge_reports_too_many_components() {
        let topo = Topology::new(vec![1; 3], []).unwrap();
        let cat = ContentCatalog::new(
            items(1),
            vec![vec![1]; 3],
            vec![vec![10]; 3],
            vec![0; 3],
            vec![0.0; 3],
        )
        .unwrap();
        let inst = Instance::new(topo, cat, Budget::new(500, 300, 2).unwrap()).unwrap();
        assert_eq!(
            merge_plan(&inst, &PlanOptions::default()),
            Err(PlanError::Disconnected {
                components: 3,
                max_areas: 2
            })
        );
    }

    #[test]
    fn grow_single_cell() {
        let inst = path_instance(vec![vec![10, 50]], 120, 300, 3);
        let plan = grow_plan(&inst, &PlanOptions::default()).unwrap();
        assert_eq!(plan.areas[0].members(), &[CellId(0)]);
        assert_eq!(plan.areas[0].content(), Some(ContentId(1)));
    }

    #[test]
    fn grow_path_trace() {
        // ends want m1, the middle wants m0, all equally strong
        let inst = path_instance(vec![vec![0, 30], vec![30, 0], vec![0, 30]], 120, 300, 3);
        let plan = grow_plan(&inst, &PlanOptions::default()).unwrap();
        let members: Vec<Vec<u32>> = plan
            .areas
            .iter()
            .map(|a| a.members().iter().map(|c| c.0).collect())
            .collect();
        // seeds at the first end and stops at the middle (no interest in m1
        // there), then seeds at the middle; a third area on the far end would
        // put three areas on the middle neighborhood
        assert_eq!(members, vec![vec![0], vec![1]]);
        assert_eq!(plan.areas[0].content(), Some(ContentId(1)));
        assert_eq!(plan.areas[1].content(), Some(ContentId(0)));
        assert!(plan.areas.iter().all(|a| a.state != AreaState::Unassigned));
    }
}
