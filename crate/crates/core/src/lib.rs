//! Planning of broadcast single-frequency-network areas over a cellular
//! network: which contiguous groups of cells broadcast which content item so
//! that the number of satisfied users is maximized under per-cell and
//! neighborhood resource budgets.
//!
//! Two heuristics build plans (`merge` joins adjacent areas bottom-up,
//! `grow` seeds areas and expands them), each with a demand-based or a
//! holistic profit. An exhaustive oracle checks them on small instances.

pub mod area_form;
pub mod constraints;
pub mod content_assign;
pub mod exec;
pub mod metric;
pub mod model;
pub mod oracle;
pub mod scenario_io;

pub use area_form::{
    build_plan, grow_plan, merge_plan, Method, PlanError, PlanOptions, ProfitKind,
};
pub use constraints::{check_plan, FeasibilityReport, InterferenceRule, Violation};
pub use content_assign::{assign_content, AssignOptions};
pub use exec::Exec;
pub use metric::{score_plan, total_score, ScoreMode, ScoreReport};
pub use model::{
    Area, AreaId, AreaState, Budget, CellId, ContentCatalog, ContentId, Instance, ModelError, Plan,
    Topology,
};
pub use oracle::{exhaustive_content, exhaustive_optimum, OracleError, OracleOptions};
pub use scenario_io::{generate_reference, ReferenceOverrides, ScenarioError, ScenarioFile};
