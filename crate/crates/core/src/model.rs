//! Domain types: cells and their adjacency, the content catalog, resource
//! budget, and broadcast areas grouped into a plan.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Hard cap on the number of broadcast areas per geographical region.
pub const STANDARD_AREA_LIMIT: u32 = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("unknown cell {0}")]
    UnknownCell(CellId),
    #[error("unknown content {0}")]
    UnknownContent(ContentId),
    #[error("self-loop on cell {0}")]
    SelfLoop(CellId),
    #[error("unknown area {0}")]
    UnknownArea(AreaId),
    #[error("area {0} has no member cells")]
    EmptyArea(AreaId),
    #[error("area {0} has no content assigned")]
    MissingContent(AreaId),
    #[error("invalid budget: {0}")]
    InvalidBudget(String),
    #[error("invalid catalog: {0}")]
    InvalidCatalog(String),
}

macro_rules! id_type {
    ($name:ident, $prefix:literal) => {
        #[derive(
            Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
        )]
        #[serde(transparent)]
        pub struct $name(pub u32);

        impl $name {
            #[inline]
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($prefix, "{}"), self.0)
            }
        }
    };
}

id_type!(CellId, "c");
id_type!(ContentId, "m");
id_type!(AreaId, "a");

/// Cells, their (symmetric, loop-free) adjacency and the users in each cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    users: Vec<u32>,
    edges: Vec<(CellId, CellId)>,
    adjacent: Vec<Vec<CellId>>,
    // closed neighborhood, sorted, always contains the cell itself
    closed: Vec<Vec<CellId>>,
}

impl Topology {
    /// Builds a topology over cells `0..users.len()`. Edges may be given in
    /// either orientation and may repeat; they are stored once as `(lo, hi)`.
    pub fn new<I>(users: Vec<u32>, edges: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = (CellId, CellId)>,
    {
        let n = users.len();
        let mut canonical = BTreeSet::new();
        for (a, b) in edges {
            for c in [a, b] {
                if c.index() >= n {
                    return Err(ModelError::UnknownCell(c));
                }
            }
            if a == b {
                return Err(ModelError::SelfLoop(a));
            }
            canonical.insert((a.min(b), a.max(b)));
        }
        let edges: Vec<_> = canonical.into_iter().collect();
        let mut adjacent = vec![Vec::new(); n];
        for &(a, b) in &edges {
            adjacent[a.index()].push(b);
            adjacent[b.index()].push(a);
        }
        for list in &mut adjacent {
            list.sort_unstable();
        }
        let closed = adjacent
            .iter()
            .enumerate()
            .map(|(i, list)| {
                let mut v = list.clone();
                v.push(CellId(i as u32));
                v.sort_unstable();
                v
            })
            .collect();
        Ok(Self {
            users,
            edges,
            adjacent,
            closed,
        })
    }

    pub fn num_cells(&self) -> usize {
        self.users.len()
    }

    pub fn cells(&self) -> impl Iterator<Item = CellId> + '_ {
        (0..self.users.len() as u32).map(CellId)
    }

    pub fn contains(&self, c: CellId) -> bool {
        c.index() < self.users.len()
    }

    pub fn users(&self, c: CellId) -> u32 {
        self.users[c.index()]
    }

    pub fn users_per_cell(&self) -> &[u32] {
        &self.users
    }

    pub fn total_users(&self) -> u64 {
        self.users.iter().map(|&u| u as u64).sum()
    }

    /// Canonical edge list, each pair stored once with the lower id first.
    pub fn edges(&self) -> &[(CellId, CellId)] {
        &self.edges
    }

    /// Adjacent cells, excluding `c` itself.
    pub fn neighbors(&self, c: CellId) -> &[CellId] {
        &self.adjacent[c.index()]
    }

    pub fn degree(&self, c: CellId) -> usize {
        self.adjacent[c.index()].len()
    }

    pub fn are_adjacent(&self, a: CellId, b: CellId) -> bool {
        self.adjacent[a.index()].binary_search(&b).is_ok()
    }

    /// `{c}` plus every cell adjacent to `c`, sorted.
    pub fn closed_neighborhood(&self, c: CellId) -> Result<&[CellId], ModelError> {
        self.closed
            .get(c.index())
            .map(Vec::as_slice)
            .ok_or(ModelError::UnknownCell(c))
    }

    #[inline]
    pub(crate) fn closed(&self, c: CellId) -> &[CellId] {
        &self.closed[c.index()]
    }

    /// True when `members` induce a connected subgraph. The empty set is not
    /// connected.
    pub fn is_connected(&self, members: &[CellId]) -> bool {
        let Some(&start) = members.first() else {
            return false;
        };
        let inside: BTreeSet<CellId> = members.iter().copied().collect();
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(c) = queue.pop_front() {
            for &n in self.neighbors(c) {
                if inside.contains(&n) && seen.insert(n) {
                    queue.push_back(n);
                }
            }
        }
        seen.len() == inside.len()
    }

    /// Number of connected components of the whole cell graph.
    pub fn component_count(&self) -> usize {
        let n = self.num_cells();
        let mut label = vec![false; n];
        let mut count = 0;
        for s in 0..n {
            if label[s] {
                continue;
            }
            count += 1;
            label[s] = true;
            let mut stack = vec![s];
            while let Some(c) = stack.pop() {
                for &nb in &self.adjacent[c] {
                    if !label[nb.index()] {
                        label[nb.index()] = true;
                        stack.push(nb.index());
                    }
                }
            }
        }
        count
    }

    /// Cells whose closed neighborhood intersects `members`, i.e. the closed
    /// neighborhood of the member set. Sorted.
    pub fn neighborhood_of_set(&self, members: &[CellId]) -> Vec<CellId> {
        let mut mark = vec![false; self.num_cells()];
        for &m in members {
            for &n in self.closed(m) {
                mark[n.index()] = true;
            }
        }
        mark.iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| CellId(i as u32))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContentKind {
    Streaming,
    Update,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContentItem {
    pub name: String,
    pub kind: ContentKind,
}

/// Broadcastable items with per-cell popularity and resource demand, plus the
/// per-cell unicast background load.
#[derive(Debug, Clone, PartialEq)]
pub struct ContentCatalog {
    items: Vec<ContentItem>,
    num_cells: usize,
    // row-major [cell][content]
    popularity: Vec<u32>,
    demand: Vec<u32>,
    unicast_users: Vec<u32>,
    unicast_demand: Vec<f64>,
}

impl ContentCatalog {
    /// `popularity` and `demand` are indexed `[cell][content]`. Every demand
    /// entry must be positive.
    pub fn new(
        items: Vec<ContentItem>,
        popularity: Vec<Vec<u32>>,
        demand: Vec<Vec<u32>>,
        unicast_users: Vec<u32>,
        unicast_demand: Vec<f64>,
    ) -> Result<Self, ModelError> {
        let n = popularity.len();
        let k = items.len();
        if demand.len() != n || unicast_users.len() != n || unicast_demand.len() != n {
            return Err(ModelError::InvalidCatalog(format!(
                "per-cell tables disagree on cell count (popularity {n}, demand {}, unicast {}/{})",
                demand.len(),
                unicast_users.len(),
                unicast_demand.len()
            )));
        }
        for (c, (p, d)) in popularity.iter().zip(&demand).enumerate() {
            if p.len() != k || d.len() != k {
                return Err(ModelError::InvalidCatalog(format!(
                    "cell {c}: expected {k} entries per row"
                )));
            }
            if let Some(m) = d.iter().position(|&x| x == 0) {
                return Err(ModelError::InvalidCatalog(format!(
                    "cell {c}: zero demand for content {m}"
                )));
            }
        }
        if let Some(c) = unicast_demand
            .iter()
            .position(|&x| !(x >= 0.0 && x.is_finite()))
        {
            return Err(ModelError::InvalidCatalog(format!(
                "cell {c}: unicast demand must be a finite non-negative number"
            )));
        }
        Ok(Self {
            items,
            num_cells: n,
            popularity: popularity.into_iter().flatten().collect(),
            demand: demand.into_iter().flatten().collect(),
            unicast_users,
            unicast_demand,
        })
    }

    pub fn items(&self) -> &[ContentItem] {
        &self.items
    }

    pub fn num_contents(&self) -> usize {
        self.items.len()
    }

    pub fn num_cells(&self) -> usize {
        self.num_cells
    }

    pub fn contents(&self) -> impl Iterator<Item = ContentId> {
        (0..self.items.len() as u32).map(ContentId)
    }

    #[inline]
    pub fn popularity(&self, c: CellId, m: ContentId) -> u32 {
        self.popularity[c.index() * self.items.len() + m.index()]
    }

    #[inline]
    pub fn demand(&self, c: CellId, m: ContentId) -> u32 {
        self.demand[c.index() * self.items.len() + m.index()]
    }

    pub fn popularity_row(&self, c: CellId) -> &[u32] {
        let k = self.items.len();
        &self.popularity[c.index() * k..(c.index() + 1) * k]
    }

    pub fn demand_row(&self, c: CellId) -> &[u32] {
        let k = self.items.len();
        &self.demand[c.index() * k..(c.index() + 1) * k]
    }

    pub fn unicast_users(&self, c: CellId) -> u32 {
        self.unicast_users[c.index()]
    }

    pub fn unicast_demand(&self, c: CellId) -> f64 {
        self.unicast_demand[c.index()]
    }

    /// Users in `c` interested in any broadcastable item.
    pub fn broadcast_interest(&self, c: CellId) -> u64 {
        self.popularity_row(c).iter().map(|&p| p as u64).sum()
    }

    /// Minimum usage letting `content` reach every member: the largest
    /// per-cell demand over the members.
    pub fn tight_usage(&self, members: &[CellId], content: ContentId) -> u32 {
        members
            .iter()
            .map(|&c| self.demand(c, content))
            .max()
            .unwrap_or(0)
    }
}

/// Resource blocks per frame, the broadcast share of them, and the area cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub total: u32,
    pub broadcast_cap: u32,
    pub max_areas: u32,
}

impl Budget {
    pub fn new(total: u32, broadcast_cap: u32, max_areas: u32) -> Result<Self, ModelError> {
        let b = Self {
            total,
            broadcast_cap,
            max_areas,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.total == 0 || self.broadcast_cap == 0 || self.max_areas == 0 {
            return Err(ModelError::InvalidBudget(
                "total, broadcast_cap and max_areas must be positive".into(),
            ));
        }
        if self.broadcast_cap > self.total {
            return Err(ModelError::InvalidBudget(format!(
                "broadcast_cap {} exceeds total {}",
                self.broadcast_cap, self.total
            )));
        }
        if self.max_areas > STANDARD_AREA_LIMIT {
            return Err(ModelError::InvalidBudget(format!(
                "max_areas {} exceeds the limit of {STANDARD_AREA_LIMIT}",
                self.max_areas
            )));
        }
        Ok(())
    }

    pub fn with_max_areas(self, max_areas: u32) -> Result<Self, ModelError> {
        Self::new(self.total, self.broadcast_cap, max_areas)
    }

    pub fn with_broadcast_cap(self, broadcast_cap: u32) -> Result<Self, ModelError> {
        Self::new(self.total, broadcast_cap, self.max_areas)
    }

    /// `min(max_areas, 256)`.
    pub fn area_cap(&self) -> usize {
        self.max_areas.min(STANDARD_AREA_LIMIT) as usize
    }
}

/// What an area broadcasts. `Inactive` areas were left without viable content
/// and take no part in constraints or scoring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AreaState {
    Unassigned,
    Active { content: ContentId, usage: u32 },
    Inactive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Area {
    pub id: AreaId,
    members: Vec<CellId>,
    pub state: AreaState,
}

impl Area {
    /// Members are sorted and deduplicated.
    pub fn new(id: AreaId, members: impl IntoIterator<Item = CellId>) -> Self {
        let mut members: Vec<CellId> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        Self {
            id,
            members,
            state: AreaState::Unassigned,
        }
    }

    pub fn with_content(mut self, content: ContentId, usage: u32) -> Self {
        self.state = AreaState::Active { content, usage };
        self
    }

    pub fn members(&self) -> &[CellId] {
        &self.members
    }

    pub fn contains(&self, c: CellId) -> bool {
        self.members.binary_search(&c).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn content(&self) -> Option<ContentId> {
        match self.state {
            AreaState::Active { content, .. } => Some(content),
            _ => None,
        }
    }

    /// Resource blocks in use; zero unless active.
    pub fn usage(&self) -> u32 {
        match self.state {
            AreaState::Active { usage, .. } => usage,
            _ => 0,
        }
    }

    pub fn is_active(&self) -> bool {
        matches!(self.state, AreaState::Active { .. })
    }

    /// Total users over member cells.
    pub fn users(&self, topology: &Topology) -> u64 {
        self.members.iter().map(|&c| topology.users(c) as u64).sum()
    }
}

/// A set of broadcast areas bound to one scenario.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Plan {
    pub areas: Vec<Area>,
    /// Fingerprint of the scenario the plan was computed for; empty when
    /// unbound.
    pub binding: String,
}

impl Plan {
    pub fn new(areas: Vec<Area>) -> Self {
        Self {
            areas,
            binding: String::new(),
        }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn active_areas(&self) -> impl Iterator<Item = &Area> {
        self.areas.iter().filter(|a| a.is_active())
    }

    pub fn area(&self, id: AreaId) -> Option<&Area> {
        self.areas.iter().find(|a| a.id == id)
    }

    /// Every member cell exists in `topology` and every content id in
    /// `catalog`.
    pub fn validate_ids(
        &self,
        topology: &Topology,
        catalog: &ContentCatalog,
    ) -> Result<(), ModelError> {
        for area in &self.areas {
            if area.is_empty() {
                return Err(ModelError::EmptyArea(area.id));
            }
            if let Some(&c) = area.members().iter().find(|&&c| !topology.contains(c)) {
                return Err(ModelError::UnknownCell(c));
            }
            if let Some(m) = area.content() {
                if m.index() >= catalog.num_contents() {
                    return Err(ModelError::UnknownContent(m));
                }
            }
        }
        Ok(())
    }
}

/// The inputs of one planning problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub topology: Topology,
    pub catalog: ContentCatalog,
    pub budget: Budget,
}

impl Instance {
    pub fn new(
        topology: Topology,
        catalog: ContentCatalog,
        budget: Budget,
    ) -> Result<Self, ModelError> {
        if topology.num_cells() != catalog.num_cells() {
            return Err(ModelError::InvalidCatalog(format!(
                "catalog covers {} cells, topology has {}",
                catalog.num_cells(),
                topology.num_cells()
            )));
        }
        budget.validate()?;
        Ok(Self {
            topology,
            catalog,
            budget,
        })
    }

    pub fn with_budget(&self, budget: Budget) -> Self {
        Self {
            topology: self.topology.clone(),
            catalog: self.catalog.clone(),
            budget,
        }
    }
}

pub fn closed_neighborhood(topology: &Topology, c: CellId) -> Result<BTreeSet<CellId>, ModelError> {
    Ok(topology.closed_neighborhood(c)?.iter().copied().collect())
}

/// True when the areas share a cell or some member of one is adjacent to
/// some member of the other.
pub fn areas_adjacent(topology: &Topology, a1: &Area, a2: &Area) -> Result<bool, ModelError> {
    for area in [a1, a2] {
        if let Some(&c) = area.members().iter().find(|&&c| !topology.contains(c)) {
            return Err(ModelError::UnknownCell(c));
        }
    }
    Ok(members_adjacent(topology, a1.members(), a2.members()))
}

pub(crate) fn members_adjacent(topology: &Topology, a: &[CellId], b: &[CellId]) -> bool {
    a.iter().any(|&c| {
        topology
            .closed(c)
            .iter()
            .any(|n| b.binary_search(n).is_ok())
    })
}

pub fn covered_cells(plan: &Plan) -> BTreeSet<CellId> {
    plan.areas
        .iter()
        .flat_map(|a| a.members().iter().copied())
        .collect()
}

pub fn uncovered_cells(plan: &Plan, topology: &Topology) -> BTreeSet<CellId> {
    let covered = covered_cells(plan);
    topology.cells().filter(|c| !covered.contains(c)).collect()
}
