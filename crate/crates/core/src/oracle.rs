//! Exhaustive reference optimizer for desk-scale instances.
//!
//! A plan is a multiset of (connected member set, content, usage) items.
//! Items are listed once in a canonical order and multisets are walked as
//! non-decreasing index sequences, so relabelling areas never produces a
//! second copy of the same plan. Extending an infeasible plan only adds
//! usage, so the walk prunes as soon as a neighborhood overflows.

use thiserror::Error;

use crate::constraints::{touched_cells, InterferenceRule};
use crate::exec::Exec;
use crate::metric::{Occupancy, ScoreMode};
use crate::model::{
    Area, AreaId, AreaState, CellId, ContentId, Instance, ModelError, Plan, Topology,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_cells: usize,
    pub max_content: usize,
    pub max_areas: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self {
            max_cells: 6,
            max_content: 3,
            max_areas: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleOptions {
    pub limits: OracleLimits,
    pub mode: ScoreMode,
    pub rule: InterferenceRule,
    /// Usage levels tried per area, as offsets above the tight value.
    pub usage_offsets: Vec<u32>,
    pub exec: Exec,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            limits: OracleLimits::default(),
            mode: ScoreMode::Normalized,
            rule: InterferenceRule::default(),
            usage_offsets: vec![0],
            exec: Exec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error(
        "instance too large for exhaustive search ({cells} cells, {contents} items, {areas} areas; \
         about {estimate:.3e} candidate plans)"
    )]
    TooLarge {
        cells: usize,
        contents: usize,
        areas: usize,
        estimate: f64,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub plan: Plan,
    pub score: f64,
    /// Feasible plans scored during the search.
    pub evaluated: u64,
}

/// Connected member sets in canonical order (by size, then members).
pub fn connected_subsets(topology: &Topology) -> Vec<Vec<CellId>> {
    let n = topology.num_cells();
    assert!(
        n <= 64,
        "connected subset enumeration is limited to 64 cells"
    );
    let adj: Vec<u64> = topology
        .cells()
        .map(|c| topology.neighbors(c).iter().fold(0u64, |m, n| m | 1 << n.0))
        .collect();
    let mut masks = Vec::new();
    for v in 0..n {
        let higher = |mask: u64| mask & !((1u64 << v) | ((1u64 << v) - 1));
        expand(
            &adj,
            1 << v,
            higher(adj[v]),
            adj[v] | 1 << v,
            &higher,
            &mut masks,
        );
    }
    let mut sets: Vec<Vec<CellId>> = masks
        .into_iter()
        .map(|m| {
            (0..n as u32)
                .filter(|i| m >> i & 1 == 1)
                .map(CellId)
                .collect()
        })
        .collect();
    sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    sets
}

// Each connected set is reached once: from its lowest cell, adding only
// cells that are new to the closed neighborhood of the set grown so far.
fn expand(
    adj: &[u64],
    set: u64,
    mut extension: u64,
    reach: u64,
    higher: &dyn Fn(u64) -> u64,
    out: &mut Vec<u64>,
) {
    out.push(set);
    while extension != 0 {
        let w = extension.trailing_zeros() as usize;
        extension &= extension - 1;
        let fresh = higher(adj[w] & !reach);
        expand(
            adj,
            set | 1 << w,
            extension | fresh,
            reach | adj[w],
            higher,
            out,
        );
    }
}

/// Membership structures (multisets of connected sets, up to `max_areas`
/// of them, the empty plan included) in enumeration order.
pub fn membership_structures(topology: &Topology, max_areas: usize) -> Vec<Vec<Vec<CellId>>> {
    let subsets = connected_subsets(topology);
    let mut out = Vec::new();
    let mut stack = Vec::new();
    fn walk(
        subsets: &[Vec<CellId>],
        from: usize,
        left: usize,
        stack: &mut Vec<usize>,
        out: &mut Vec<Vec<Vec<CellId>>>,
    ) {
        out.push(stack.iter().map(|&i| subsets[i].clone()).collect());
        if left == 0 {
            return;
        }
        for i in from..subsets.len() {
            stack.push(i);
            walk(subsets, i, left - 1, stack, out);
            stack.pop();
        }
    }
    walk(&subsets, 0, max_areas, &mut stack, &mut out);
    out
}

/// Number of multisets of size at most `k` over `items` kinds.
pub fn multiset_count(items: u128, k: usize) -> u128 {
    // C(items + j - 1, j) for j = 0..=k
    let mut total = 1u128;
    let mut term = 1u128;
    for j in 1..=k as u128 {
        term = term.saturating_mul(items + j - 1) / j;
        total = total.saturating_add(term);
    }
    total
}

fn multiset_estimate(items: f64, k: usize) -> f64 {
    let mut total = 0.0;
    let mut term = 1.0;
    for j in 0..=k {
        if j > 0 {
            term *= (items + j as f64 - 1.0) / j as f64;
        }
        total += term;
    }
    total
}

#[derive(Debug, Clone)]
struct Item {
    members: Vec<CellId>,
    touched: Vec<CellId>,
    content: ContentId,
    usage: u32,
}

/// Best feasible plan over every multiset of at most `Â` connected areas,
/// every content choice and every listed usage offset.
pub fn exhaustive_optimum(
    inst: &Instance,
    opts: &OracleOptions,
) -> Result<OracleResult, OracleError> {
    let topo = &inst.topology;
    let cat = &inst.catalog;
    let areas = inst.budget.area_cap();
    let lim = opts.limits;
    if topo.num_cells() > lim.max_cells.min(64)
        || cat.num_contents() > lim.max_content
        || areas > lim.max_areas
    {
        // every cell subset stands in for the connected ones
        let kinds = (2f64.powi(topo.num_cells() as i32) - 1.0)
            * cat.num_contents() as f64
            * opts.usage_offsets.len().max(1) as f64;
        return Err(OracleError::TooLarge {
            cells: topo.num_cells(),
            contents: cat.num_contents(),
            areas,
            estimate: multiset_estimate(kinds, areas),
        });
    }

    let cap = inst.budget.broadcast_cap;
    let mut items = Vec::new();
    for members in connected_subsets(topo) {
        let touched = touched_cells(topo, &members, opts.rule);
        for m in cat.contents() {
            let tight = cat.tight_usage(&members, m);
            for &off in &opts.usage_offsets {
                let usage = tight + off;
                // cannot appear in any feasible plan
                if usage > cap {
                    continue;
                }
                items.push(Item {
                    members: members.clone(),
                    touched: touched.clone(),
                    content: m,
                    usage,
                });
            }
        }
    }

    let empty = Occupancy::for_instance(inst);
    let mut best = Best {
        score: empty.total(opts.mode),
        picks: Vec::new(),
        evaluated: 1,
    };
    if areas > 0 {
        let firsts: Vec<usize> = (0..items.len()).collect();
        let branches = opts.exec.map(&firsts, |&i| {
            let mut occ = Occupancy::for_instance(inst);
            let mut local = Best {
                score: f64::NEG_INFINITY,
                picks: Vec::new(),
                evaluated: 0,
            };
            let item = &items[i];
            if occ.fits(&item.touched, item.usage) {
                occ.add(&item.members, &item.touched, item.content, item.usage);
                let mut stack = vec![i];
                search(
                    &items,
                    &mut occ,
                    &mut stack,
                    areas - 1,
                    opts.mode,
                    &mut local,
                );
            }
            local
        });
        for b in branches {
            best.evaluated += b.evaluated;
            if b.score > best.score {
                best.score = b.score;
                best.picks = b.picks;
            }
        }
    }

    let plan = Plan::new(
        best.picks
            .iter()
            .enumerate()
            .map(|(k, &i)| {
                let it = &items[i];
                Area::new(AreaId(k as u32), it.members.iter().copied())
                    .with_content(it.content, it.usage)
            })
            .collect(),
    );
    Ok(OracleResult {
        plan,
        score: best.score,
        evaluated: best.evaluated,
    })
}

struct Best {
    score: f64,
    picks: Vec<usize>,
    evaluated: u64,
}

fn search(
    items: &[Item],
    occ: &mut Occupancy<'_>,
    stack: &mut Vec<usize>,
    left: usize,
    mode: ScoreMode,
    best: &mut Best,
) {
    let score = occ.total(mode);
    best.evaluated += 1;
    if score > best.score {
        best.score = score;
        best.picks = stack.clone();
    }
    if left == 0 {
        return;
    }
    let from = *stack.last().expect("search starts from a chosen item");
    for i in from..items.len() {
        let it = &items[i];
        if !occ.fits(&it.touched, it.usage) {
            continue;
        }
        occ.add(&it.members, &it.touched, it.content, it.usage);
        stack.push(i);
        search(items, occ, stack, left - 1, mode, best);
        stack.pop();
        occ.remove(&it.members, &it.touched, it.content, it.usage);
    }
}

/// Largest number of content combinations [`exhaustive_content`] accepts.
pub const CONTENT_SEARCH_LIMIT: u128 = 1_000_000;

/// Best feasible content choice (each area gets an item with tight usage or
/// stays inactive) for a fixed membership.
pub fn exhaustive_content(
    inst: &Instance,
    membership: &Plan,
    mode: ScoreMode,
) -> Result<(Plan, f64), OracleError> {
    membership.validate_ids(&inst.topology, &inst.catalog)?;
    let k = inst.catalog.num_contents();
    let n = membership.areas.len();
    let combos = ((k + 1) as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if combos > CONTENT_SEARCH_LIMIT {
        return Err(OracleError::TooLarge {
            cells: inst.topology.num_cells(),
            contents: k,
            areas: n,
            estimate: combos as f64,
        });
    }
    let rule = InterferenceRule::default();
    let touched: Vec<Vec<CellId>> = membership
        .areas
        .iter()
        .map(|a| touched_cells(&inst.topology, a.members(), rule))
        .collect();
    let mut occ = Occupancy::for_instance(inst);
    let mut choice = vec![k; n];
    let mut best = (f64::NEG_INFINITY, choice.clone());

    #[allow(clippy::too_many_arguments)]
    fn walk(
        inst: &Instance,
        membership: &Plan,
        touched: &[Vec<CellId>],
        occ: &mut Occupancy<'_>,
        choice: &mut Vec<usize>,
        idx: usize,
        mode: ScoreMode,
        best: &mut (f64, Vec<usize>),
    ) {
        let k = inst.catalog.num_contents();
        if idx == choice.len() {
            let s = occ.total(mode);
            if s > best.0 {
                *best = (s, choice.clone());
            }
            return;
        }
        let members = membership.areas[idx].members();
        for option in 0..=k {
            choice[idx] = option;
            if option == k {
                walk(inst, membership, touched, occ, choice, idx + 1, mode, best);
                continue;
            }
            let m = ContentId(option as u32);
            let usage = inst.catalog.tight_usage(members, m);
            if !occ.fits(&touched[idx], usage) {
                continue;
            }
            occ.add(members, &touched[idx], m, usage);
            walk(inst, membership, touched, occ, choice, idx + 1, mode, best);
            occ.remove(members, &touched[idx], m, usage);
        }
    }
    walk(
        inst,
        membership,
        &touched,
        &mut occ,
        &mut choice,
        0,
        mode,
        &mut best,
    );

    let mut plan = membership.clone();
    for (area, &option) in plan.areas.iter_mut().zip(&best.1) {
        area.state = if option == k {
            AreaState::Inactive
        } else {
            let m = ContentId(option as u32);
            AreaState::Active {
                content: m,
                usage: inst.catalog.tight_usage(area.members(), m),
            }
        };
    }
    Ok((plan, best.0))
}
