//! Scenario generation and the on-disk formats for scenarios and plans.
//!
//! Both files are pretty-printed JSON with a fixed field order, so saving
//! the same value always yields the same bytes. The schema is documented in
//! the repository README.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::model::{
    Area, AreaId, AreaState, Budget, CellId, ContentCatalog, ContentId, ContentItem, ContentKind,
    Instance, ModelError, Plan, Topology,
};

pub const SCENARIO_VERSION: u32 = 1;
pub const PLAN_VERSION: u32 = 1;

pub const REFERENCE_SITES: usize = 19;
pub const SECTORS_PER_SITE: usize = 3;
pub const REFERENCE_CELLS: usize = REFERENCE_SITES * SECTORS_PER_SITE;
/// Service area of the reference layout in square meters.
pub const REFERENCE_AREA_M2: f64 = 12.34e6;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("unsupported schema version {found} (expected {expected})")]
    Version { found: u32, expected: u32 },
    #[error("malformed file: {0}")]
    Malformed(String),
    #[error("dangling id: {0}")]
    DanglingId(String),
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("invalid override: {0}")]
    Override(String),
}

impl From<ModelError> for ScenarioError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::UnknownCell(_)
            | ModelError::UnknownContent(_)
            | ModelError::UnknownArea(_) => ScenarioError::DanglingId(e.to_string()),
            other => ScenarioError::Invalid(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellRecord {
    pub id: CellId,
    pub x: f64,
    pub y: f64,
    pub users: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyRecord {
    pub cells: Vec<CellRecord>,
    pub edges: Vec<(CellId, CellId)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogRecord {
    pub items: Vec<ContentItem>,
    /// `[cell][content]` interested users.
    pub popularity: Vec<Vec<u32>>,
    /// `[cell][content]` resource blocks needed to broadcast.
    pub demand: Vec<Vec<u32>>,
    pub unicast_users: Vec<u32>,
    pub unicast_demand: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetRecord {
    pub total: u32,
    pub broadcast_cap: u32,
    pub max_areas: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub version: u32,
    pub seed: u64,
    pub population: u64,
    pub budget: BudgetRecord,
    pub topology: TopologyRecord,
    pub catalog: CatalogRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region_assignment: Option<BTreeMap<CellId, ContentId>>,
}

impl ScenarioFile {
    /// Checks every invariant and builds the in-memory instance.
    pub fn instance(&self) -> Result<Instance, ScenarioError> {
        if self.version != SCENARIO_VERSION {
            return Err(ScenarioError::Version {
                found: self.version,
                expected: SCENARIO_VERSION,
            });
        }
        let n = self.topology.cells.len();
        for (i, cell) in self.topology.cells.iter().enumerate() {
            if cell.id.index() != i {
                return Err(ScenarioError::Invalid(format!(
                    "cell records must be listed in id order (found {} at position {i})",
                    cell.id
                )));
            }
        }
        for &(a, b) in &self.topology.edges {
            for c in [a, b] {
                if c.index() >= n {
                    return Err(ScenarioError::DanglingId(format!("edge references {c}")));
                }
            }
        }
        let users: Vec<u32> = self.topology.cells.iter().map(|c| c.users).collect();
        let total: u64 = users.iter().map(|&u| u as u64).sum();
        if total != self.population {
            return Err(ScenarioError::Invalid(format!(
                "cells hold {total} users but the population is {}",
                self.population
            )));
        }
        let cat = &self.catalog;
        for (c, row) in cat.popularity.iter().enumerate() {
            let interested: u64 = row.iter().map(|&p| p as u64).sum::<u64>()
                + cat.unicast_users.get(c).copied().unwrap_or(0) as u64;
            if interested > users.get(c).copied().unwrap_or(0) as u64 {
                return Err(ScenarioError::Invalid(format!(
                    "cell c{c} has more interested users than users"
                )));
            }
        }
        if let Some(regions) = &self.region_assignment {
            for (&c, &m) in regions {
                if c.index() >= n {
                    return Err(ScenarioError::DanglingId(format!("region of {c}")));
                }
                if m.index() >= cat.items.len() {
                    return Err(ScenarioError::DanglingId(format!("region item {m}")));
                }
            }
        }
        let topology = Topology::new(users, self.topology.edges.iter().copied())?;
        let catalog = ContentCatalog::new(
            cat.items.clone(),
            cat.popularity.clone(),
            cat.demand.clone(),
            cat.unicast_users.clone(),
            cat.unicast_demand.clone(),
        )?;
        let b = self.budget;
        let budget = Budget::new(b.total, b.broadcast_cap, b.max_areas)?;
        Ok(Instance::new(topology, catalog, budget)?)
    }

    /// Hex SHA-256 of the canonical encoding.
    pub fn fingerprint(&self) -> String {
        let bytes = self.to_canonical_string();
        format!("{:x}", Sha256::digest(bytes.as_bytes()))
    }

    pub fn to_canonical_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scenario serializes");
        s.push('\n');
        s
    }

    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| ScenarioError::Malformed(e.to_string()))?;
        check_version(&value, SCENARIO_VERSION)?;
        let file: ScenarioFile =
            serde_json::from_value(value).map_err(|e| ScenarioError::Malformed(e.to_string()))?;
        file.instance()?;
        Ok(file)
    }

    pub fn with_max_areas(mut self, max_areas: u32) -> Self {
        self.budget.max_areas = max_areas;
        self
    }
}

fn check_version(value: &serde_json::Value, expected: u32) -> Result<(), ScenarioError> {
    match value.get("version").and_then(|v| v.as_u64()) {
        Some(v) if v == expected as u64 => Ok(()),
        Some(v) => Err(ScenarioError::Version {
            found: v.min(u32::MAX as u64) as u32,
            expected,
        }),
        None => Err(ScenarioError::Malformed("missing version".into())),
    }
}

fn read(path: &Path) -> Result<String, ScenarioError> {
    fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), ScenarioError> {
    fs::write(path, text).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<ScenarioFile, ScenarioError> {
    ScenarioFile::parse(&read(path.as_ref())?)
}

pub fn save_scenario(scenario: &ScenarioFile, path: impl AsRef<Path>) -> Result<(), ScenarioError> {
    write(path.as_ref(), &scenario.to_canonical_string())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AreaRecord {
    pub id: AreaId,
    pub members: Vec<CellId>,
    /// `active`, `inactive` or `unassigned`.
    pub state: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub content: Option<ContentId>,
    #[serde(default)]
    pub usage: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanFile {
    pub version: u32,
    /// Fingerprint of the scenario the plan was built for.
    pub scenario: String,
    pub method: String,
    pub profit: String,
    pub max_areas: u32,
    pub areas: Vec<AreaRecord>,
}

impl PlanFile {
    pub fn from_plan(plan: &Plan, method: &str, profit: &str, max_areas: u32) -> Self {
        Self {
            version: PLAN_VERSION,
            scenario: plan.binding.clone(),
            method: method.to_string(),
            profit: profit.to_string(),
            max_areas,
            areas: plan
                .areas
                .iter()
                .map(|a| {
                    let (state, content, usage) = match a.state {
                        AreaState::Active { content, usage } => ("active", Some(content), usage),
                        AreaState::Inactive => ("inactive", None, 0),
                        AreaState::Unassigned => ("unassigned", None, 0),
                    };
                    AreaRecord {
                        id: a.id,
                        members: a.members().to_vec(),
                        state: state.to_string(),
                        content,
                        usage,
                    }
                })
                .collect(),
        }
    }

    /// Rebuilds the plan, checking that every id exists in `inst`.
    pub fn to_plan(&self, inst: &Instance) -> Result<Plan, ScenarioError> {
        let mut areas = Vec::with_capacity(self.areas.len());
        let mut seen = std::collections::BTreeSet::new();
        for rec in &self.areas {
            if !seen.insert(rec.id) {
                return Err(ScenarioError::Invalid(format!("duplicate area {}", rec.id)));
            }
            let state = match (rec.state.as_str(), rec.content) {
                ("active", Some(content)) => AreaState::Active {
                    content,
                    usage: rec.usage,
                },
                ("inactive", None) => AreaState::Inactive,
                ("unassigned", None) => AreaState::Unassigned,
                (s, _) => {
                    return Err(ScenarioError::Malformed(format!(
                        "area {} has state {s:?} with content {:?}",
                        rec.id, rec.content
                    )))
                }
            };
            let mut area = Area::new(rec.id, rec.members.iter().copied());
            if area.len() != rec.members.len() {
                return Err(ScenarioError::Invalid(format!(
                    "area {} lists a member twice",
                    rec.id
                )));
            }
            area.state = state;
            areas.push(area);
        }
        let mut plan = Plan::new(areas);
        plan.binding = self.scenario.clone();
        plan.validate_ids(&inst.topology, &inst.catalog)?;
        Ok(plan)
    }

    pub fn to_canonical_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plan serializes");
        s.push('\n');
        s
    }

    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| ScenarioError::Malformed(e.to_string()))?;
        check_version(&value, PLAN_VERSION)?;
        serde_json::from_value(value).map_err(|e| ScenarioError::Malformed(e.to_string()))
    }
}

pub fn save_plan(plan: &PlanFile, path: impl AsRef<Path>) -> Result<(), ScenarioError> {
    write(path.as_ref(), &plan.to_canonical_string())
}

pub fn load_plan(path: impl AsRef<Path>) -> Result<PlanFile, ScenarioError> {
    PlanFile::parse(&read(path.as_ref())?)
}

/// Adjustable parameters of the reference scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceOverrides {
    pub population: u64,
    /// Probability that a user wants the update item instead of streaming.
    pub update_prob: f64,
    /// Use the expected split in every cell instead of sampling.
    pub deterministic_split: bool,
    pub streaming_demand: u32,
    pub update_demand: u32,
    pub total_resources: u32,
    pub broadcast_cap: u32,
    pub max_areas: u32,
}

impl Default for ReferenceOverrides {
    fn default() -> Self {
        Self {
            population: 3420,
            update_prob: 0.2,
            deterministic_split: false,
            streaming_demand: 120,
            update_demand: 80,
            total_resources: 500,
            broadcast_cap: 300,
            max_areas: 30,
        }
    }
}

impl ReferenceOverrides {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        if !(0.0..=1.0).contains(&self.update_prob) {
            return Err(ScenarioError::Override(format!(
                "update probability {} is outside [0, 1]",
                self.update_prob
            )));
        }
        if self.streaming_demand == 0 || self.update_demand == 0 {
            return Err(ScenarioError::Override("demands must be positive".into()));
        }
        if self.population > u32::MAX as u64 * REFERENCE_CELLS as u64 {
            return Err(ScenarioError::Override("population too large".into()));
        }
        Budget::new(self.total_resources, self.broadcast_cap, self.max_areas)
            .map_err(|e| ScenarioError::Override(e.to_string()))?;
        Ok(())
    }
}

/// Radius of one sector hexagon such that the layout covers the reference
/// service area.
pub fn sector_radius() -> f64 {
    let cell_area = REFERENCE_AREA_M2 / REFERENCE_CELLS as f64;
    (2.0 * cell_area / (3.0 * 3f64.sqrt())).sqrt()
}

/// Site grid positions (axial hex coordinates) within two rings of the
/// center, ordered by ring and then counter-clockwise from the +x axis.
fn site_coordinates() -> Vec<(i32, i32)> {
    let mut sites = Vec::new();
    for q in -2i32..=2 {
        for r in -2i32..=2 {
            if hex_ring(q, r) <= 2 {
                sites.push((q, r));
            }
        }
    }
    let angle = |&(q, r): &(i32, i32)| {
        let (x, y) = site_position(q, r, 1.0);
        let a = y.atan2(x);
        if a < 0.0 {
            a + 2.0 * PI
        } else {
            a
        }
    };
    sites.sort_by(|a, b| {
        hex_ring(a.0, a.1)
            .cmp(&hex_ring(b.0, b.1))
            .then(angle(a).total_cmp(&angle(b)))
    });
    sites
}

fn hex_ring(q: i32, r: i32) -> i32 {
    (q.abs() + r.abs() + (q + r).abs()) / 2
}

fn site_position(q: i32, r: i32, radius: f64) -> (f64, f64) {
    // basis vectors 3ρ·(cos 30°, sin 30°) and 3ρ·(0, 1)
    let s = 3.0 * radius;
    let x = s * q as f64 * (PI / 6.0).cos();
    let y = s * (q as f64 * (PI / 6.0).sin() + r as f64);
    (x, y)
}

/// Sector orientations in degrees.
const SECTOR_AZIMUTHS: [f64; 3] = [30.0, 150.0, 270.0];

/// Cell centers of the 19-site tri-sector layout, cell `3·site + sector`.
pub fn reference_layout() -> Vec<(f64, f64)> {
    let rho = sector_radius();
    let mut out = Vec::with_capacity(REFERENCE_CELLS);
    for (q, r) in site_coordinates() {
        let (sx, sy) = site_position(q, r, rho);
        for az in SECTOR_AZIMUTHS {
            let t = az.to_radians();
            out.push((sx + rho * t.cos(), sy + rho * t.sin()));
        }
    }
    out
}

/// Two sectors are adjacent when their hexagons share an edge, i.e. their
/// centers are one sector spacing (√3·ρ) apart. This covers both sectors of
/// the same site and facing sectors of neighbouring sites.
pub fn hex_adjacency(centers: &[(f64, f64)], radius: f64) -> Vec<(CellId, CellId)> {
    let spacing = 3f64.sqrt() * radius;
    let mut edges = Vec::new();
    for i in 0..centers.len() {
        for j in i + 1..centers.len() {
            let d = (centers[i].0 - centers[j].0).hypot(centers[i].1 - centers[j].1);
            if (d - spacing).abs() <= 0.01 * spacing {
                edges.push((CellId(i as u32), CellId(j as u32)));
            }
        }
    }
    edges
}

fn round_mm(v: f64) -> f64 {
    let r = (v * 1000.0).round() / 1000.0;
    // avoid a signed zero in the file
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// The 57-cell reference scenario: three streaming items whose audiences
/// form three contiguous regions, plus an update item wanted by a share of
/// users in every cell.
pub fn generate_reference(
    seed: u64,
    ov: &ReferenceOverrides,
) -> Result<ScenarioFile, ScenarioError> {
    ov.validate()?;
    let rho = sector_radius();
    let centers = reference_layout();
    let edges = hex_adjacency(&centers, rho);
    let n = centers.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // three region seeds at half the layout radius, 120° apart
    let extent = centers
        .iter()
        .map(|&(x, y)| x.hypot(y))
        .fold(0.0f64, f64::max);
    let theta0 = rng.gen::<f64>() * 2.0 * PI;
    let seeds: Vec<(f64, f64)> = (0..3)
        .map(|k| {
            let t = theta0 + k as f64 * 2.0 * PI / 3.0;
            (0.5 * extent * t.cos(), 0.5 * extent * t.sin())
        })
        .collect();
    let region: Vec<usize> = centers
        .iter()
        .map(|&(x, y)| {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (k, &(sx, sy)) in seeds.iter().enumerate() {
                let d = (x - sx).hypot(y - sy);
                if d < best_d {
                    best = k;
                    best_d = d;
                }
            }
            best
        })
        .collect();

    let base = (ov.population / n as u64) as u32;
    let extra = (ov.population % n as u64) as usize;
    let users: Vec<u32> = (0..n).map(|i| base + u32::from(i < extra)).collect();

    let mut popularity = Vec::with_capacity(n);
    for c in 0..n {
        let u = users[c];
        let update = if ov.deterministic_split {
            (u as f64 * ov.update_prob).round() as u32
        } else {
            (0..u).filter(|_| rng.gen_bool(ov.update_prob)).count() as u32
        };
        let mut row = vec![0u32; 4];
        row[region[c]] = u - update;
        row[3] = update;
        popularity.push(row);
    }

    let mut items: Vec<ContentItem> = (1..=3)
        .map(|k| ContentItem {
            name: format!("streaming{k}"),
            kind: ContentKind::Streaming,
        })
        .collect();
    items.push(ContentItem {
        name: "update".into(),
        kind: ContentKind::Update,
    });
    let demand_row = vec![
        ov.streaming_demand,
        ov.streaming_demand,
        ov.streaming_demand,
        ov.update_demand,
    ];

    let file = ScenarioFile {
        version: SCENARIO_VERSION,
        seed,
        population: ov.population,
        budget: BudgetRecord {
            total: ov.total_resources,
            broadcast_cap: ov.broadcast_cap,
            max_areas: ov.max_areas,
        },
        topology: TopologyRecord {
            cells: centers
                .iter()
                .enumerate()
                .map(|(i, &(x, y))| CellRecord {
                    id: CellId(i as u32),
                    x: round_mm(x),
                    y: round_mm(y),
                    users: users[i],
                })
                .collect(),
            edges,
        },
        catalog: CatalogRecord {
            items,
            popularity,
            demand: vec![demand_row; n],
            unicast_users: vec![0; n],
            unicast_demand: vec![0.0; n],
        },
        region_assignment: Some(
            region
                .iter()
                .enumerate()
                .map(|(c, &k)| (CellId(c as u32), ContentId(k as u32)))
                .collect(),
        ),
    };
    file.instance()?;
    Ok(file)
}

/// Shape of a small random instance used by test corpora.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomSpec {
    pub max_cells: usize,
    pub max_content: usize,
    pub max_areas: u32,
}

impl Default for RandomSpec {
    fn default() -> Self {
        Self {
            max_cells: 5,
            max_content: 3,
            max_areas: 3,
        }
    }
}

/// A small connected instance with random users, interests, demands,
/// broadcast cap and unicast load. Pure function of `(seed, spec)`.
pub fn generate_random(seed: u64, spec: RandomSpec) -> ScenarioFile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=spec.max_cells.max(1));
    let k = rng.gen_range(1..=spec.max_content.max(1));

    // random spanning tree plus a few chords
    let mut edges = Vec::new();
    for i in 1..n {
        let j = rng.gen_range(0..i);
        edges.push((CellId(j as u32), CellId(i as u32)));
    }
    for i in 0..n {
        for j in i + 1..n {
            let e = (CellId(i as u32), CellId(j as u32));
            if !edges.contains(&e) && rng.gen_bool(0.25) {
                edges.push(e);
            }
        }
    }
    edges.sort();

    let mut users = Vec::with_capacity(n);
    let mut popularity = Vec::with_capacity(n);
    let mut demand = Vec::with_capacity(n);
    let mut unicast_users = Vec::with_capacity(n);
    let mut unicast_demand = Vec::with_capacity(n);
    for _ in 0..n {
        let row: Vec<u32> = (0..k).map(|_| rng.gen_range(0..=40)).collect();
        let uni = rng.gen_range(0..=10);
        users.push(row.iter().sum::<u32>() + uni);
        popularity.push(row);
        demand.push(
            (0..k)
                .map(|_| rng.gen_range(4..=30u32) * 10)
                .collect::<Vec<_>>(),
        );
        unicast_users.push(uni);
        unicast_demand.push(if uni == 0 {
            0.0
        } else {
            rng.gen_range(0..=200u32) as f64
        });
    }
    let total = 500;
    let cap = rng.gen_range(10..=40u32) * 10;
    let max_areas = rng.gen_range(1..=spec.max_areas.max(1));

    ScenarioFile {
        version: SCENARIO_VERSION,
        seed,
        population: users.iter().map(|&u| u as u64).sum(),
        budget: BudgetRecord {
            total,
            broadcast_cap: cap,
            max_areas,
        },
        topology: TopologyRecord {
            cells: users
                .iter()
                .enumerate()
                .map(|(i, &u)| CellRecord {
                    id: CellId(i as u32),
                    x: i as f64,
                    y: 0.0,
                    users: u,
                })
                .collect(),
            edges,
        },
        catalog: CatalogRecord {
            items: (0..k)
                .map(|i| ContentItem {
                    name: format!("item{i}"),
                    kind: ContentKind::Streaming,
                })
                .collect(),
            popularity,
            demand,
            unicast_users,
            unicast_demand,
        },
        region_assignment: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_layout_has_57_distinct_cells() {
        let c = reference_layout();
        assert_eq!(c.len(), 57);
        let rho = sector_radius();
        for i in 0..c.len() {
            for j in i + 1..c.len() {
                let d = (c[i].0 - c[j].0).hypot(c[i].1 - c[j].1);
                assert!(d > 0.5 * rho, "cells {i} and {j} coincide");
            }
        }
    }

    #[test]
    fn same_site_sectors_are_adjacent() {
        let s = generate_reference(1, &ReferenceOverrides::default()).unwrap();
        let inst = s.instance().unwrap();
        for site in 0..19u32 {
            let b = site * 3;
            assert!(inst.topology.are_adjacent(CellId(b), CellId(b + 1)));
            assert!(inst.topology.are_adjacent(CellId(b), CellId(b + 2)));
            assert!(inst.topology.are_adjacent(CellId(b + 1), CellId(b + 2)));
        }
        assert!(inst.topology.cells().all(|c| inst.topology.degree(c) <= 6));
        assert_eq!(inst.topology.component_count(), 1);
    }

    #[test]
    fn default_reference_population() {
        let s = generate_reference(1, &ReferenceOverrides::default()).unwrap();
        assert_eq!(s.topology.cells.len(), 57);
        assert_eq!(s.population, 3420);
        assert!(s.topology.cells.iter().all(|c| c.users == 60));
        for row in &s.catalog.popularity {
            assert_eq!(row[..3].iter().filter(|&&p| p > 0).count(), 1);
            assert_eq!(row.iter().sum::<u32>(), 60);
        }
    }

    #[test]
    fn deterministic_split_is_exact() {
        let ov = ReferenceOverrides {
            deterministic_split: true,
            ..ReferenceOverrides::default()
        };
        let s = generate_reference(7, &ov).unwrap();
        for row in &s.catalog.popularity {
            assert_eq!(row[3], 12);
            assert_eq!(row[..3].iter().sum::<u32>(), 48);
        }
    }

    #[test]
    fn bad_probability_is_rejected() {
        let ov = ReferenceOverrides {
            update_prob: 1.5,
            ..ReferenceOverrides::default()
        };
        assert!(matches!(
            generate_reference(1, &ov),
            Err(ScenarioError::Override(_))
        ));
    }

    #[test]
    fn dangling_edge_is_reported() {
        let mut s = generate_random(3, RandomSpec::default());
        let n = s.topology.cells.len() as u32;
        s.topology.edges.push((CellId(0), CellId(n + 4)));
        let text = s.to_canonical_string();
        assert!(matches!(
            ScenarioFile::parse(&text),
            Err(ScenarioError::DanglingId(_))
        ));
    }

    #[test]
    fn version_mismatch_is_reported() {
        let mut s = generate_random(3, RandomSpec::default());
        s.version = 2;
        let text = s.to_canonical_string();
        assert!(matches!(
            ScenarioFile::parse(&text),
            Err(ScenarioError::Version {
                found: 2,
                expected: 1
            })
        ));
        assert!(matches!(
            ScenarioFile::parse("{"),
            Err(ScenarioError::Malformed(_))
        ));
    }

    #[test]
    fn plan_with_absent_content_is_dangling() {
        let s = generate_random(5, RandomSpec::default());
        let inst = s.instance().unwrap();
        let k = inst.catalog.num_contents() as u32;
        let plan = Plan::new(vec![
            Area::new(AreaId(0), [CellId(0)]).with_content(ContentId(k), 10)
        ]);
        let file = PlanFile::from_plan(&plan, "merge", "demand", 3);
        let back = PlanFile::parse(&file.to_canonical_string()).unwrap();
        assert!(matches!(
            back.to_plan(&inst),
            Err(ScenarioError::DanglingId(_))
        ));
    }
}
