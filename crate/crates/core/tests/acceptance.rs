//! Acceptance harness: runs every primary criterion at its stated tolerance
//! and runtime budget, printing one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p goldsand-core --test acceptance`. The process
//! exits non-zero when any criterion fails.

mod common;

use std::collections::HashMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use goldsand_core::coloring::{random_stream, Painter};
use goldsand_core::oracles::{
    best_remover_line, minimax_discrete, panchromatic_fail_probability, DiscreteState, MinimaxSolver, Winner,
};
use goldsand_core::solver::{classify_degeneracy, constants, solve_value};
use goldsand_core::strategy::{play, remover_respond, EndReason, PusherPolicy, RemoverPolicy, StrategyConfig};
use goldsand_core::weights::{h, panchromatic_weight, weight, Gradient};
use goldsand_core::{apply_move, Arrangement, Cell, GameKind, Label, Mode, MoveSplit, ParamPoint, Path};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

use common::*;

const TOL: f64 = 1e-10;

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Result<String, String>,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "solver exactness", limit: Duration::from_secs(1), run: solver_exactness },
        Criterion { id: 2, name: "remover cap", limit: Duration::from_secs(30), run: remover_cap },
        Criterion { id: 3, name: "duel sandwich", limit: Duration::from_secs(120), run: duel_sandwich },
        Criterion { id: 4, name: "degenerate exactness", limit: Duration::from_secs(10), run: degenerate_exactness },
        Criterion { id: 5, name: "adversarial remover search", limit: Duration::from_secs(300), run: remover_search },
        Criterion { id: 6, name: "panchromatic oracle equivalence", limit: Duration::from_secs(30), run: panchromatic },
        Criterion { id: 7, name: "painter guarantees", limit: Duration::from_secs(60), run: painter_guarantees },
        Criterion { id: 8, name: "discrete-continuous soundness", limit: Duration::from_secs(300), run: soundness },
        Criterion { id: 9, name: "property suites", limit: Duration::from_secs(120), run: property_suites },
    ];
    let filter: Option<u32> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut failed = 0;
    for c in criteria.iter().filter(|c| filter.is_none_or(|f| f == c.id)) {
        let start = Instant::now();
        let result = (c.run)();
        let elapsed = start.elapsed();
        let (ok, detail) = match result {
            Ok(detail) if elapsed <= c.limit => (true, detail),
            Ok(detail) => (false, format!("{detail}; over the time budget")),
            Err(detail) => (false, detail),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "[{}] criterion {} {}: {} ({:.2} s, budget {} s)",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            detail,
            elapsed.as_secs_f64(),
            c.limit.as_secs()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}

fn check(failures: &[String], total: usize, summary: String) -> Result<String, String> {
    if failures.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{} of {total} cases failed; first: {}", failures.len(), failures[0]))
    }
}

fn column(kind: GameKind, k: u32, m: f64) -> Arrangement {
    Arrangement::fitted(system(kind), Mode::Continuous, [(k, Path(0), m)]).unwrap()
}

fn solver_exactness() -> Result<String, String> {
    let mut failures = Vec::new();
    let (mut worst_e, mut worst_p, mut total) = (0.0f64, 0.0f64, 0);
    for k in 1..=12u32 {
        for m in [1.0, 4.0, 100.0] {
            let mut cases = vec![(GameKind::PropertyB, 2.0)];
            cases.extend((2..=4u8).map(|r| (GameKind::Proper(r), r as f64)));
            for (kind, r) in cases {
                total += 1;
                let v = solve_value(&column(kind, k, m), TOL).map_err(|e| e.to_string())?;
                let expected = m * r.powi(1 - k as i32);
                let de = (v.e - expected).abs();
                worst_e = worst_e.max(de);
                if de > 1e-9 {
                    failures.push(format!("{kind} k={k} m={m}: e={} expected {expected}", v.e));
                }
                if kind == GameKind::PropertyB {
                    let dp = (v.p_star.first() - 0.5).abs();
                    worst_p = worst_p.max(dp);
                    if dp > 1e-6 {
                        failures.push(format!("{kind} k={k} m={m}: p*={}", v.p_star.first()));
                    }
                }
            }
        }
    }
    check(&failures, total, format!("{total} columns, max |Δe| {worst_e:.1e}, max |p* − 1/2| {worst_p:.1e}"))
}

const MIXED_KINDS: [GameKind; 4] =
    [GameKind::PropertyB, GameKind::ListColoring, GameKind::Proper(3), GameKind::Panchromatic(3)];

fn remover_cap() -> Result<String, String> {
    let policies = [PusherPolicy::OptimalAdaptive, PusherPolicy::AllRun, PusherPolicy::RandomSplit, PusherPolicy::GreedyHarvest];
    let mut rng = rng(2);
    let mut failures = Vec::new();
    let mut games = 0;
    let mut worst = f64::NEG_INFINITY;
    for i in 0..200 {
        let kind = MIXED_KINDS[i % MIXED_KINDS.len()];
        let x = random_arrangement(&mut rng, kind, 6, 6, Mode::Continuous);
        for policy in policies {
            games += 1;
            let cfg = StrategyConfig { seed: i as u64, ..StrategyConfig::default() };
            let mut pusher = policy.agent(&cfg);
            let mut remover = RemoverPolicy::Optimal.agent(&cfg);
            let t = play(&x, &mut pusher, &mut remover, &cfg).map_err(|e| e.to_string())?;
            if t.end_reason == EndReason::PolicyError {
                failures.push(format!("{kind} {policy}: {}", t.error.unwrap_or_default()));
                continue;
            }
            let e0 = t.e0.unwrap();
            let excess = (t.total_harvested - e0) / x.l1();
            worst = worst.max(excess);
            if t.total_harvested > e0 + 1e-7 * x.l1() {
                failures.push(format!("{kind} {policy}: harvest {} > e0 {e0}", t.total_harvested));
            }
        }
    }
    check(&failures, games, format!("{games} games, max (harvest − e0)/‖x0‖ {worst:.1e}"))
}

fn duel_sandwich() -> Result<String, String> {
    let eps = 0.01;
    let cfg = StrategyConfig::with_epsilon(eps);
    let mut rng = rng(3);
    let mut failures = Vec::new();
    let (mut rounds, mut slack_used) = (0, 0.0f64);
    for _ in 0..100 {
        let x = random_regular(&mut rng, GameKind::PropertyB, 5, 5, eps);
        let mut pusher = PusherPolicy::OptimalAdaptive.agent(&cfg);
        let mut remover = RemoverPolicy::Optimal.agent(&cfg);
        let t = play(&x, &mut pusher, &mut remover, &cfg).map_err(|e| e.to_string())?;
        rounds += t.rounds.len();
        let e0 = t.e0.unwrap();
        let bound = 2.0 * x.max_level() as f64 * eps * x.l1();
        slack_used = slack_used.max((e0 - t.total_harvested) / bound);
        if t.total_harvested < e0 - bound {
            failures.push(format!("{}: harvest {} < e0 {e0} − {bound}", x.to_json(), t.total_harvested));
        }
        if let Some(r) = t.first_failed_audit() {
            failures.push(format!("{}: round {} audit {:?}", x.to_json(), r.round, r.audit));
        }
        if matches!(t.end_reason, EndReason::PolicyError | EndReason::RoundLimit) {
            failures.push(format!("{}: ended by {:?}", x.to_json(), t.end_reason));
        }
    }
    check(&failures, 100, format!("100 duels, {rounds} audited rounds, max shortfall {:.0}% of 2Nε‖x0‖", slack_used * 100.0))
}

fn degenerate_exactness() -> Result<String, String> {
    let cfg = StrategyConfig::default();
    let mut rng = rng(4);
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for i in 0..100 {
        let kind = if i % 4 == 3 { GameKind::ListColoring } else { GameKind::PropertyB };
        let x = random_degenerate(&mut rng, kind, 5, 6);
        if !classify_degeneracy(&x).is_degenerate() {
            failures.push(format!("{}: generator produced a regular arrangement", x.to_json()));
            continue;
        }
        let mut pusher = PusherPolicy::OptimalAdaptive.agent(&cfg);
        let mut remover = RemoverPolicy::Optimal.agent(&cfg);
        let t = play(&x, &mut pusher, &mut remover, &cfg).map_err(|e| e.to_string())?;
        let gap = (t.total_harvested - t.e0.unwrap()).abs();
        worst = worst.max(gap);
        if gap > 1e-9 * x.l1().max(1.0) {
            failures.push(format!("{}: harvest {} vs e0 {}", x.to_json(), t.total_harvested, t.e0.unwrap()));
        }
    }
    check(&failures, 100, format!("100 degenerate games, max |harvest − e0| {worst:.1e}"))
}

fn remover_search() -> Result<String, String> {
    let cfg = StrategyConfig::default();
    let mut rng = rng(5);
    let mut failures = Vec::new();
    let mut leaves = 0;
    for _ in 0..20 {
        let x = random_arrangement(&mut rng, GameKind::PropertyB, 3, 3, Mode::Continuous);
        let e0 = solve_value(&x, TOL).map_err(|e| e.to_string())?.e;
        let pusher = PusherPolicy::OptimalAdaptive.agent(&cfg);
        let line = best_remover_line(&x, &pusher, 10, &cfg).map_err(|e| e.to_string())?;
        leaves += line.leaves;
        let bound = e0 - 2.0 * x.max_level() as f64 * cfg.epsilon * x.l1();
        if line.min_harvest < bound {
            failures.push(format!("{}: line {:?} holds harvest to {} < {bound}", x.to_json(), line.labels, line.min_harvest));
        }
    }
    check(&failures, 20, format!("20 instances, {leaves} Remover lines of depth ≤ 10"))
}

fn panchromatic() -> Result<String, String> {
    let mut rng = rng(6);
    let mut failures = Vec::new();
    let mut compared = 0;
    for r in 2..=4usize {
        for _ in 0..20 {
            let raw: Vec<i64> = (0..r).map(|_| rng.random_range(1..=30)).collect();
            let total: i64 = raw.iter().sum();
            let p: Vec<BigRational> = raw.iter().map(|&a| BigRational::new(BigInt::from(a), BigInt::from(total))).collect();
            for mask in 0..(1u32 << r) {
                for i in 0..=6u32 {
                    compared += 1;
                    let closed = panchromatic_weight(mask, i, &p);
                    let exact = panchromatic_fail_probability(mask, i, &p, r).map_err(|e| e.to_string())?;
                    if closed != exact {
                        failures.push(format!("r={r} mask={mask:b} i={i} p={raw:?}/{total}: {closed} ≠ {exact}"));
                    }
                }
            }
        }
    }
    check(&failures, compared, format!("{compared} exact rational comparisons"))
}

/// Edges whose vertices all got one color, checked from the raw coloring.
fn monochromatic_edges(stream: &goldsand_core::coloring::Stream, colors: &HashMap<String, Label>) -> usize {
    stream
        .hypergraph()
        .edges
        .iter()
        .filter(|e| {
            let first = colors[&e.vertices[0]];
            e.vertices.iter().all(|v| colors[v] == first)
        })
        .count()
}

fn painter_guarantees() -> Result<String, String> {
    let cfg = StrategyConfig::default();
    let mut rng = rng(7);
    let mut failures = Vec::new();
    let mut cases: Vec<(GameKind, u32, usize)> = (3..=8).map(|k| (GameKind::PropertyB, k, (1usize << (k - 1)) - 1)).collect();
    cases.push((GameKind::Proper(3), 4, 26));
    let mut vertices = 0;
    for &(kind, k, m) in &cases {
        for _ in 0..100 {
            let stream = random_stream(kind, k, m, &mut rng);
            let mut painter = Painter::new(&stream.header, RemoverPolicy::Optimal, &cfg).map_err(|e| e.to_string())?;
            let mut colors = HashMap::new();
            for ev in &stream.events {
                colors.insert(ev.id.clone(), painter.on_vertex(ev).map_err(|e| e.to_string())?);
            }
            vertices += colors.len();
            let bad = monochromatic_edges(&stream, &colors);
            if bad > 0 || !painter.violations().is_empty() {
                failures.push(format!("{kind} k={k} m={m}: {bad} monochromatic edges"));
            }
        }
    }
    check(&failures, cases.len() * 100, format!("{} streams, {vertices} vertices colored, no monochromatic edge", cases.len() * 100))
}

/// Every chip multiset over `cells` of size at most `max_chips` whose value
/// is below `1 − 1e-6`. Values only grow when chips are added, so the
/// search stops extending a multiset once it reaches the threshold.
struct Enumeration<'a> {
    kind: GameKind,
    cells: &'a [Cell],
    max_chips: usize,
    solver: MinimaxSolver,
    checked: usize,
    failures: Vec<String>,
}

impl Enumeration<'_> {
    fn visit(&mut self, chips: &mut Vec<Cell>, from: usize) -> Result<(), String> {
        if !chips.is_empty() {
            let x = Arrangement::from_cells(
                system(self.kind),
                goldsand_core::oracles::MAX_LEVEL,
                Mode::Discrete,
                chips.iter().map(|c| (c.level, c.path, 1.0)),
            )
            .map_err(|e| e.to_string())?;
            let e = solve_value(&x, TOL).map_err(|e| e.to_string())?.e;
            if e >= 1.0 - 1e-6 {
                return Ok(());
            }
            self.checked += 1;
            let state = DiscreteState::from_arrangement(&x).map_err(|e| e.to_string())?;
            if self.solver.solve(&state).map_err(|e| e.to_string())? != Winner::RemoverWins {
                self.failures.push(format!("{} chips {chips:?}: e = {e} but Pusher wins", self.kind));
            }
        }
        if chips.len() == self.max_chips {
            return Ok(());
        }
        for i in from..self.cells.len() {
            chips.push(self.cells[i]);
            self.visit(chips, i)?;
            chips.pop();
        }
        Ok(())
    }
}

fn soundness() -> Result<String, String> {
    let bounds = [
        (GameKind::PropertyB, 8usize),
        (GameKind::ListColoring, 8),
        (GameKind::Proper(2), 8),
        (GameKind::Panchromatic(2), 8),
        (GameKind::Proper(3), 5),
        (GameKind::Panchromatic(3), 4),
    ];
    let mut failures = Vec::new();
    let mut parts = Vec::new();
    let mut total = 0;
    for (kind, max_chips) in bounds {
        let sys = system(kind);
        let cells: Vec<Cell> = (1..=goldsand_core::oracles::MAX_LEVEL)
            .flat_map(|level| sys.live_paths().map(move |p| Cell::new(level, p)).collect::<Vec<_>>())
            .collect();
        let mut en = Enumeration {
            kind,
            cells: &cells,
            max_chips,
            solver: MinimaxSolver::new(sys.clone(), usize::MAX),
            checked: 0,
            failures: Vec::new(),
        };
        en.visit(&mut Vec::new(), 0)?;
        total += en.checked;
        parts.push(format!("{kind} ≤{max_chips} chips: {}", en.checked));
        failures.extend(en.failures);
    }
    // A position just over the threshold that Pusher does win, as a sanity anchor.
    let anchor = DiscreteState::new(system(GameKind::PropertyB), vec![Cell::new(1, Path(1)), Cell::new(1, Path(2))])
        .map_err(|e| e.to_string())?;
    if minimax_discrete(&anchor, 1000).map_err(|e| e.to_string())? != Winner::PusherWins {
        failures.push("anchor position {(1,1),(1,2)} should be a Pusher win".into());
    }
    check(&failures, total, format!("{total} states with e < 1 − 1e-6 all Remover wins ({})", parts.join(", ")))
}

// ---------------------------------------------------------------------------
// Criterion 9: property suites, 1000 randomized cases each.
// ---------------------------------------------------------------------------

const CASES: usize = 1000;

/// One randomized case: `Ok(Some(msg))` is a counterexample.
type Suite = fn(&mut Rng8, usize) -> Result<Option<String>, String>;

fn property_suites() -> Result<String, String> {
    let suites: [(&str, Suite); 9] = [
        ("lipschitz", lipschitz_case),
        ("e-monotone", monotone_case),
        ("martingale", martingale_case),
        ("decomposition", decomposition_case),
        ("p* interiority", interiority_case),
        ("regularity bounds", regularity_case),
        ("stability", stability_case),
        ("second order", second_order_case),
        ("finite difference", finite_difference_case),
    ];
    let mut failures = Vec::new();
    for (s, (name, case)) in suites.iter().enumerate() {
        let mut rng = rng(900 + s as u64);
        let mut failed = 0;
        let mut first = None;
        for i in 0..CASES {
            if let Some(msg) = case(&mut rng, i)? {
                failed += 1;
                first.get_or_insert(msg);
            }
        }
        if failed > 0 {
            failures.push(format!("{name}: {failed} failures, first {}", first.unwrap()));
        }
    }
    if failures.is_empty() {
        Ok(format!("{} suites × {CASES} cases, zero failures", suites.len()))
    } else {
        Err(failures.join("; "))
    }
}

fn e_of(x: &Arrangement) -> Result<f64, String> {
    if x.is_empty() {
        return Ok(0.0);
    }
    solve_value(x, TOL).map(|v| v.e).map_err(|e| e.to_string())
}

fn lipschitz_case(rng: &mut Rng8, i: usize) -> Result<Option<String>, String> {
    let kind = MIXED_KINDS[i % MIXED_KINDS.len()];
    let x = random_arrangement(rng, kind, 5, 5, Mode::Continuous);
    let y = if i & 1 == 0 {
        perturbed(rng, &x, 0.5)
    } else {
        let other = random_arrangement(rng, kind, x.max_level(), 5, Mode::Continuous);
        Arrangement::from_cells(x.shared_system(), x.max_level(), Mode::Continuous, other.cells().map(|(c, a)| (c.level, c.path, a)))
            .map_err(|e| e.to_string())?
    };
    let (ex, ey) = (e_of(&x)?, e_of(&y)?);
    let slack = 2.0 * TOL * x.l1().max(y.l1()).max(1.0);
    Ok((!le((ex - ey).abs(), x.l1_distance(&y), slack)).then(|| format!("{}: |{ex} − {ey}| > {}", x.to_json(), x.l1_distance(&y))))
}

fn monotone_case(rng: &mut Rng8, i: usize) -> Result<Option<String>, String> {
    let kind = MIXED_KINDS[i % MIXED_KINDS.len()];
    let x = random_arrangement(rng, kind, 5, 5, Mode::Continuous);
    let mut split = MoveSplit::new();
    for (c, a) in x.cells() {
        if rng.random_bool(0.7) {
            split.add(c, a * rng.random_range(0.0..=1.0));
        }
    }
    let cfg = StrategyConfig::default();
    let tau = remover_respond(&x, &split, &cfg).map_err(|e| e.to_string())?;
    let out = apply_move(&x, &split, tau).map_err(|e| e.to_string())?;
    let (before, after) = (e_of(&x)?, e_of(&out.next)?);
    let slack = 1e-9 * x.l1().max(1.0);
    Ok((!le(after + out.harvested, before, slack)).then(|| format!("{}: {after} + {} > {before}", x.to_json(), out.harvested)))
}

const ALL_KINDS: [GameKind; 12] = [
    GameKind::PropertyB,
    GameKind::ListColoring,
    GameKind::Proper(2),
    GameKind::Proper(3),
    GameKind::Proper(4),
    GameKind::Proper(5),
    GameKind::Proper(6),
    GameKind::Panchromatic(2),
    GameKind::Panchromatic(3),
    GameKind::Panchromatic(4),
    GameKind::Panchromatic(5),
    GameKind::Panchromatic(6),
];

fn random_point(rng: &mut Rng8, kind: GameKind) -> ParamPoint {
    match kind.colors() {
        None => ParamPoint::scalar(rng.random_range(0.0..=1.0)).unwrap(),
        Some(r) => ParamPoint::simplex(random_simplex(rng, r as usize)).unwrap(),
    }
}

fn martingale_case(rng: &mut Rng8, i: usize) -> Result<Option<String>, String> {
    let kind = ALL_KINDS[i % ALL_KINDS.len()];
    let sys = system(kind);
    let p = random_point(rng, kind);
    let probs = p.label_probabilities();
    let level = rng.random_range(1..=10u32);
    for path in sys.live_paths() {
        let w = weight(kind, &p, level, path).map_err(|e| e.to_string())?;
        let mut next = 0.0;
        for label in sys.labels() {
            next += probs[label.index()] * weight(kind, &p, level - 1, sys.step(label, path)).map_err(|e| e.to_string())?;
        }
        let direct = survival_probability(kind, &probs, level, path);
        if (w - next).abs() > 1e-12 || (w - direct).abs() > 1e-12 {
            return Ok(Some(format!("{kind} level {level} path {}: w={w} step={next} direct={direct}", sys.name(path))));
        }
    }
    Ok(None)
}

fn decomposition_case(rng: &mut Rng8, _: usize) -> Result<Option<String>, String> {
    let p = ParamPoint::scalar(rng.random_range(0.0..=1.0)).unwrap();
    let level = rng.random_range(0..=12u32);
    let w = |path| weight(GameKind::PropertyB, &p, level, Path(path)).unwrap();
    let gap = w(0) - (w(1) + w(2));
    // The identity fails at level 0, where every live path weighs 1.
    let ok = if level == 0 { (gap + 1.0).abs() < 1e-15 } else { gap.abs() <= 1e-14 };
    Ok((!ok).then(|| format!("level {level} p={}: gap {gap}", p.first())))
}

const REGULAR_EPS: f64 = 0.05;

fn interiority_case(rng: &mut Rng8, _: usize) -> Result<Option<String>, String> {
    let x = random_regular(rng, GameKind::PropertyB, 5, 6, REGULAR_EPS);
    let c = constants(REGULAR_EPS, x.max_level()).map_err(|e| e.to_string())?;
    let p = solve_value(&x, TOL).map_err(|e| e.to_string())?.p_star.first();
    Ok((!(p > c.q && p < 1.0 - c.q)).then(|| format!("{}: p* = {p}, Q = {}", x.to_json(), c.q)))
}

fn regularity_case(rng: &mut Rng8, _: usize) -> Result<Option<String>, String> {
    let x = random_regular(rng, GameKind::PropertyB, 5, 6, REGULAR_EPS);
    let bound = REGULAR_EPS * x.l1();
    let mass = |paths: &[u16]| -> f64 { x.cells().filter(|(c, _)| paths.contains(&c.path.0)).map(|(_, a)| a).sum() };
    let deep: f64 = x.cells().filter(|(c, _)| c.level >= 2).map(|(_, a)| a).sum();
    let (side_one, side_two) = (mass(&[0, 1]), mass(&[0, 2]));
    let ok = deep >= bound && side_one >= bound && side_two >= bound;
    Ok((!ok).then(|| format!("{}: semi12 {deep}, sides {side_one}/{side_two}, ε‖x‖ {bound}", x.to_json())))
}

/// A regular pair `(x, y)` with `‖x‖/2 ≤ ‖y‖ ≤ ‖x‖`.
fn regular_pair(rng: &mut Rng8) -> (Arrangement, Arrangement) {
    loop {
        let x = random_regular(rng, GameKind::PropertyB, 4, 5, REGULAR_EPS);
        let cells: Vec<_> = x.cells().map(|(c, a)| (c.level, c.path, a * rng.random_range(0.6..=1.0))).collect();
        let y = Arrangement::from_cells(x.shared_system(), x.max_level(), Mode::Continuous, cells).unwrap();
        if !goldsand_core::solver::is_eps_degenerate(&y, REGULAR_EPS).unwrap() {
            return (x, y);
        }
    }
}

fn stability_case(rng: &mut Rng8, _: usize) -> Result<Option<String>, String> {
    let (x, y) = regular_pair(rng);
    let c = constants(REGULAR_EPS, x.max_level()).map_err(|e| e.to_string())?;
    let px = solve_value(&x, TOL).map_err(|e| e.to_string())?.p_star.first();
    let py = solve_value(&y, TOL).map_err(|e| e.to_string())?.p_star.first();
    let bound = c.p * x.l1_distance(&y) / x.l1().min(y.l1());
    Ok((!le((px - py).abs(), bound, 1e-9)).then(|| format!("{}: |{px} − {py}| > {bound}", x.to_json())))
}

fn second_order_case(rng: &mut Rng8, _: usize) -> Result<Option<String>, String> {
    let (x, y) = regular_pair(rng);
    let c = constants(REGULAR_EPS, x.max_level()).map_err(|e| e.to_string())?;
    let px = solve_value(&x, TOL).map_err(|e| e.to_string())?.p_star;
    let gap = reference_potential(&y, &px.label_probabilities()) - e_of(&y)?;
    let d = x.l1_distance(&y);
    let bound = c.c * d * d / x.l1();
    Ok((!le(gap, bound, 1e-9 * x.l1())).then(|| format!("{}: gap {gap} > {bound}", x.to_json())))
}

/// Compares `h` with centered differences of the reference potential along
/// every direction `e_j − e_k` tangent to the parameter simplex.
fn finite_difference_case(rng: &mut Rng8, i: usize) -> Result<Option<String>, String> {
    let kind = MIXED_KINDS[i % MIXED_KINDS.len()];
    let x = random_arrangement(rng, kind, 6, 5, Mode::Continuous);
    let step = 1e-6;
    let (probs, grad) = match kind.colors() {
        None => {
            let p = ParamPoint::scalar(rng.random_range(0.02..0.98)).unwrap();
            let g = h(&x, &p).map_err(|e| e.to_string())?.scalar().unwrap();
            // d/dp along probabilities (p, 1 − p) is the direction e_1 − e_2.
            (p.label_probabilities(), vec![g, 0.0])
        }
        Some(r) => {
            let p = ParamPoint::simplex(random_simplex(rng, r as usize)).unwrap();
            let Gradient::Vector(g) = h(&x, &p).map_err(|e| e.to_string())? else {
                return Err("simplex kinds return a vector gradient".into());
            };
            (p.values().to_vec(), g)
        }
    };
    let tol = 1e-6 * x.l1().max(1.0);
    for j in 0..probs.len() {
        for k in 0..probs.len() {
            if j == k || (kind.colors().is_none() && (j, k) != (0, 1)) {
                continue;
            }
            let mut up = probs.clone();
            let mut down = probs.clone();
            up[j] += step;
            up[k] -= step;
            down[j] -= step;
            down[k] += step;
            let numeric = (reference_potential(&x, &up) - reference_potential(&x, &down)) / (2.0 * step);
            let analytic = grad[j] - grad[k];
            if (numeric - analytic).abs() > tol {
                return Ok(Some(format!("{} direction e{j}−e{k}: h gives {analytic}, differences {numeric}", x.to_json())));
            }
        }
    }
    Ok(None)
}
