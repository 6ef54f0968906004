//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use mbsfn_core::area_form::{build_plan, Method, PlanOptions, ProfitKind};
use mbsfn_core::constraints::check_plan;
use mbsfn_core::content_assign::assign_content;
use mbsfn_core::metric::{score_plan, ScoreMode, ScoreReport};
use mbsfn_core::model::{Area, AreaId, Instance, Plan};
use mbsfn_core::oracle::{
    connected_subsets, exhaustive_content, exhaustive_optimum, OracleOptions,
};
use mbsfn_core::scenario_io::{
    generate_random, generate_reference, RandomSpec, ReferenceOverrides,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GRID: [u32; 6] = [5, 10, 15, 20, 25, 30];
const METHODS: [Method; 2] = [Method::Merge, Method::Grow];
const PROFITS: [ProfitKind; 2] = [ProfitKind::Demand, ProfitKind::Holistic];
const EPS: f64 = 1e-9;
const REFERENCE_USERS: f64 = 3420.0;

struct Outcome {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn reference(cap: u32, max_areas: u32) -> Instance {
    let inst = generate_reference(1, &ReferenceOverrides::default())
        .unwrap()
        .instance()
        .unwrap();
    let budget = inst
        .budget
        .with_broadcast_cap(cap)
        .unwrap()
        .with_max_areas(max_areas)
        .unwrap();
    inst.with_budget(budget)
}

struct Run {
    method: Method,
    profit: ProfitKind,
    max_areas: u32,
    report: ScoreReport,
    violations: Vec<String>,
}

fn sweep(cap: u32) -> Vec<Run> {
    let mut runs = Vec::new();
    for method in METHODS {
        for profit in PROFITS {
            for a in GRID {
                let inst = reference(cap, a);
                let plan = build_plan(&inst, method, &PlanOptions::new(profit)).unwrap();
                let check = check_plan(&inst.topology, &plan, &inst.catalog, &inst.budget).unwrap();
                runs.push(Run {
                    method,
                    profit,
                    max_areas: a,
                    report: score_plan(&inst, &plan, ScoreMode::Normalized).unwrap(),
                    violations: check.violations.iter().map(|v| v.to_string()).collect(),
                });
            }
        }
    }
    runs
}

fn find(runs: &[Run], method: Method, profit: ProfitKind, a: u32) -> &Run {
    runs.iter()
        .find(|r| r.method == method && r.profit == profit && r.max_areas == a)
        .unwrap()
}

fn feasibility(runs: &[Run], secs: f64) -> Outcome {
    let violations: usize = runs.iter().map(|r| r.violations.len()).sum();
    let mut detail = format!("{} plans, {violations} violations, {secs:.2} s", runs.len());
    for r in runs.iter().filter(|r| !r.violations.is_empty()) {
        detail += &format!(
            "\n      {}/{} A={}: {}",
            r.method.as_str(),
            r.profit.as_str(),
            r.max_areas,
            r.violations.join("; ")
        );
    }
    Outcome {
        id: 1,
        name: "feasibility suite",
        pass: violations == 0 && secs < 60.0,
        detail,
    }
}

fn corpus() -> Vec<Instance> {
    (0..200u64)
        .map(|seed| {
            generate_random(
                seed,
                RandomSpec {
                    max_cells: 5,
                    max_content: 3,
                    max_areas: 3,
                },
            )
            .instance()
            .unwrap()
        })
        .collect()
}

fn oracle_dominance(corpus: &[Instance]) -> Outcome {
    let mut violations = 0;
    let mut worst = 0.0f64;
    for inst in corpus {
        let best = exhaustive_optimum(inst, &OracleOptions::default()).unwrap();
        for method in METHODS {
            for profit in PROFITS {
                let plan = build_plan(inst, method, &PlanOptions::new(profit)).unwrap();
                let s = score_plan(inst, &plan, ScoreMode::Normalized)
                    .unwrap()
                    .total;
                if s > best.score + EPS {
                    violations += 1;
                    worst = worst.max(s - best.score);
                }
            }
        }
    }
    Outcome {
        id: 2,
        name: "oracle dominance",
        pass: violations == 0,
        detail: format!(
            "{} instances x 4 heuristics, {violations} violations (worst excess {worst:.3e})",
            corpus.len()
        ),
    }
}

fn tight_usage(corpus: &[Instance]) -> Outcome {
    let mut mismatches = 0;
    let mut worst = 0.0f64;
    for inst in corpus {
        let tight = exhaustive_optimum(inst, &OracleOptions::default()).unwrap();
        let grid = exhaustive_optimum(
            inst,
            &OracleOptions {
                usage_offsets: vec![0, 10, 20],
                ..OracleOptions::default()
            },
        )
        .unwrap();
        let d = (tight.score - grid.score).abs();
        worst = worst.max(d);
        if d > EPS {
            mismatches += 1;
        }
    }
    Outcome {
        id: 3,
        name: "tight-usage reduction",
        pass: mismatches == 0,
        detail: format!(
            "{} instances, {mismatches} mismatches (max difference {worst:.3e})",
            corpus.len()
        ),
    }
}

fn trend(runs: &[Run]) -> Outcome {
    let mut held = 0;
    let mut parts = Vec::new();
    for a in GRID {
        let g = find(runs, Method::Grow, ProfitKind::Demand, a).report.total;
        let m = find(runs, Method::Merge, ProfitKind::Demand, a)
            .report
            .total;
        if g >= m - EPS {
            held += 1;
        }
        parts.push(format!("A={a}: {g:.1} vs {m:.1}"));
    }
    Outcome {
        id: 4,
        name: "grow beats merge (demand)",
        pass: held == GRID.len(),
        detail: format!("{held}/{} hold; {}", GRID.len(), parts.join(", ")),
    }
}

fn structure(runs: &[Run]) -> Outcome {
    let mut failures = Vec::new();
    for r in runs.iter().filter(|r| r.method == Method::Merge) {
        if r.report.stats.uncovered_cells != 0 {
            failures.push(format!(
                "merge/{} A={} leaves {} cells uncovered",
                r.profit.as_str(),
                r.max_areas,
                r.report.stats.uncovered_cells
            ));
        }
    }
    for r in runs
        .iter()
        .filter(|r| r.method == Method::Grow && r.max_areas <= 10)
    {
        if r.report.stats.uncovered_cells == 0 {
            failures.push(format!(
                "grow/{} A={} covers every cell",
                r.profit.as_str(),
                r.max_areas
            ));
        }
    }
    let mut sizes = Vec::new();
    for profit in PROFITS {
        for a in GRID {
            let g = find(runs, Method::Grow, profit, a)
                .report
                .stats
                .mean_area_size;
            let m = find(runs, Method::Merge, profit, a)
                .report
                .stats
                .mean_area_size;
            if g >= m {
                failures.push(format!(
                    "{} A={a}: grow mean size {g:.2} not below merge {m:.2}",
                    profit.as_str()
                ));
            }
            if a == 10 {
                sizes.push(format!(
                    "{} A=10 grow {g:.2} / merge {m:.2}",
                    profit.as_str()
                ));
            }
        }
    }
    let mut detail = format!("{} failed checks; {}", failures.len(), sizes.join(", "));
    for f in &failures {
        detail += &format!("\n      {f}");
    }
    Outcome {
        id: 5,
        name: "structure reproduction",
        pass: failures.is_empty(),
        detail,
    }
}

fn metric_range(runs: &[Run]) -> Outcome {
    let out_of_range = runs
        .iter()
        .filter(|r| !(0.0..=REFERENCE_USERS).contains(&r.report.total))
        .count();
    let baseline = runs[0].report.baseline_total;
    let (lo, hi) = runs.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), r| {
        (lo.min(r.report.total), hi.max(r.report.total))
    });
    Outcome {
        id: 6,
        name: "metric range",
        pass: out_of_range == 0 && baseline > 0.0,
        detail: format!(
            "{} plans, totals in [{lo:.1}, {hi:.1}], {out_of_range} out of range, baseline {baseline:.3}",
            runs.len()
        ),
    }
}

fn monotone_resources() -> Outcome {
    let mut held = 0;
    let mut parts = Vec::new();
    for a in [10, 30] {
        let total = |cap| {
            let inst = reference(cap, a);
            let plan =
                build_plan(&inst, Method::Grow, &PlanOptions::new(ProfitKind::Holistic)).unwrap();
            score_plan(&inst, &plan, ScoreMode::Normalized)
                .unwrap()
                .total
        };
        let (low, high) = (total(300), total(360));
        if high >= low - EPS {
            held += 1;
        }
        parts.push(format!("A={a}: {low:.1} -> {high:.1}"));
    }
    Outcome {
        id: 7,
        name: "monotone broadcast cap",
        pass: held == 2,
        detail: format!("{held}/2 hold; {}", parts.join(", ")),
    }
}

fn run_bin(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_mbsfn"))
        .args(args)
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

fn determinism(dir: &Path) -> Outcome {
    let p = |name: &str| dir.join(name).to_str().unwrap().to_string();
    let mut mismatches = Vec::new();
    let mut compared = 0;
    for run in ["a", "b"] {
        run_bin(&[
            "generate",
            "--seed",
            "1",
            "--out",
            &p(&format!("scn_{run}.json")),
        ]);
    }
    let scn = p("scn_a.json");
    for run in ["a", "b"] {
        for method in ["merge", "grow"] {
            for profit in ["demand", "holistic"] {
                run_bin(&[
                    "plan",
                    "--scenario",
                    &scn,
                    "--method",
                    method,
                    "--profit",
                    profit,
                    "--max-areas",
                    "10",
                    "--out",
                    &p(&format!("plan_{method}_{profit}_{run}.json")),
                ]);
            }
        }
        run_bin(&[
            "sweep",
            "--scenario",
            &scn,
            "--out",
            &p(&format!("sweep_{run}.csv")),
        ]);
    }
    let mut pairs = vec![("scn_a.json".to_string(), "scn_b.json".to_string())];
    for method in ["merge", "grow"] {
        for profit in ["demand", "holistic"] {
            pairs.push((
                format!("plan_{method}_{profit}_a.json"),
                format!("plan_{method}_{profit}_b.json"),
            ));
        }
    }
    pairs.push(("sweep_a.csv".into(), "sweep_b.csv".into()));
    for (a, b) in &pairs {
        compared += 1;
        if std::fs::read(dir.join(a)).unwrap() != std::fs::read(dir.join(b)).unwrap() {
            mismatches.push(a.clone());
        }
    }
    Outcome {
        id: 8,
        name: "determinism",
        pass: mismatches.is_empty(),
        detail: format!("{compared} file pairs compared, differing: {mismatches:?}"),
    }
}

/// Random membership: one to three connected areas, possibly overlapping.
fn random_membership(inst: &Instance, rng: &mut ChaCha8Rng) -> Plan {
    let subsets = connected_subsets(&inst.topology);
    let k = rng.gen_range(1..=3);
    Plan::new(
        (0..k)
            .map(|i| {
                let s = &subsets[rng.gen_range(0..subsets.len())];
                Area::new(AreaId(i), s.iter().copied())
            })
            .collect(),
    )
}

fn content_gap_audit() -> Outcome {
    let mut gaps = Vec::new();
    for seed in 0..100u64 {
        let inst = generate_random(
            seed,
            RandomSpec {
                max_cells: 5,
                max_content: 3,
                max_areas: 3,
            },
        )
        .instance()
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
        let membership = random_membership(&inst, &mut rng);
        let (_, best) = exhaustive_content(&inst, &membership, ScoreMode::Normalized).unwrap();
        let greedy = assign_content(
            &inst.topology,
            &membership,
            &inst.catalog,
            &inst.budget,
            ScoreMode::Normalized,
        );
        let g = score_plan(&inst, &greedy, ScoreMode::Normalized)
            .unwrap()
            .total;
        gaps.push(if best > 0.0 { (best - g) / best } else { 0.0 });
    }
    let negative = gaps.iter().filter(|&&g| g < -EPS).count();
    let nonzero = gaps.iter().filter(|&&g| g > EPS).count();
    let mut sorted = gaps.clone();
    sorted.sort_by(f64::total_cmp);
    let median = (sorted[49] + sorted[50]) / 2.0;
    let max = sorted[99];
    let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
    Outcome {
        id: 9,
        name: "content assignment gap audit",
        pass: negative == 0 && median <= 0.05,
        detail: format!(
            "100 memberships, median gap {:.3}%, mean {:.3}%, max {:.3}%, {nonzero} non-zero, {negative} negative",
            100.0 * median,
            100.0 * mean,
            100.0 * max
        ),
    }
}

fn main() -> ExitCode {
    let dir = tempfile::tempdir().unwrap();
    let started = Instant::now();
    let runs = sweep(300);
    let sweep_secs = started.elapsed().as_secs_f64();
    let corpus = corpus();

    let outcomes = vec![
        feasibility(&runs, sweep_secs),
        oracle_dominance(&corpus),
        tight_usage(&corpus),
        trend(&runs),
        structure(&runs),
        metric_range(&runs),
        monotone_resources(),
        determinism(dir.path()),
        content_gap_audit(),
    ];

    let mut failed = 0;
    for o in &outcomes {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failed += 1;
        }
        println!("{tag} [{}] {}: {}", o.id, o.name, o.detail);
    }
    println!(
        "acceptance: {}/{} criteria passed in {:.1} s",
        outcomes.len() - failed,
        outcomes.len(),
        started.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
