//! Subcommand implementations. Each returns the JSON (or text) it prints so
//! the binary stays a thin dispatcher and the logic is testable.

use std::collections::HashMap;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use goldsand_core::coloring::{presenter_adversary, random_stream, verify_coloring, Painter, Stream};
use goldsand_core::oracles::{
    best_remover_line, panchromatic_fail_probability, DiscreteState, MinimaxSolver, MAX_ORACLE_COLORS, MAX_ORACLE_LEVEL,
};
use goldsand_core::solver::{solve_value, value};
use goldsand_core::strategy::{play, PusherMode, PusherPolicy, RemoverPolicy, StrategyConfig};
use goldsand_core::weights::panchromatic_weight;
use goldsand_core::{game::mask_name, Arrangement, Error, GameKind};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

/// Failure of a command: `Domain` maps to exit code 1, `Usage` to 2.
#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    #[error(transparent)]
    Domain(#[from] Error),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Usage(String),
}

impl CommandError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CommandError::Domain(_) | CommandError::Io(_) => 1,
            CommandError::Usage(_) => 2,
        }
    }
}

pub type CommandResult<T> = Result<T, CommandError>;

/// Reads a file, or standard input for `-`.
pub fn read_input(path: &Path) -> CommandResult<String> {
    let mut text = String::new();
    if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text).map_err(|e| CommandError::Io(format!("reading stdin: {e}")))?;
    } else {
        text = std::fs::read_to_string(path).map_err(|e| CommandError::Io(format!("reading {}: {e}", path.display())))?;
    }
    Ok(text)
}

pub fn read_arrangement(path: &Path) -> CommandResult<Arrangement> {
    Ok(Arrangement::from_json(&read_input(path)?)?)
}

pub fn value_cmd(x: &Arrangement, tol: f64) -> CommandResult<Value> {
    let v = solve_value(x, tol)?;
    Ok(serde_json::to_value(v).expect("value result serializes"))
}

pub struct SimulateArgs {
    pub pusher: PusherPolicy,
    pub remover: RemoverPolicy,
    pub eps: f64,
    pub mode: Option<PusherMode>,
    pub seed: u64,
    pub max_rounds: usize,
    pub trace: Option<PathBuf>,
}

pub fn simulate_cmd(x: &Arrangement, args: &SimulateArgs) -> CommandResult<Value> {
    let pusher = match (args.pusher, args.mode) {
        (PusherPolicy::OptimalAdaptive | PusherPolicy::OptimalProof, Some(PusherMode::Proof)) => PusherPolicy::OptimalProof,
        (PusherPolicy::OptimalAdaptive | PusherPolicy::OptimalProof, Some(PusherMode::Adaptive)) => {
            PusherPolicy::OptimalAdaptive
        }
        (p, _) => p,
    };
    let cfg = StrategyConfig { seed: args.seed, max_rounds: args.max_rounds, ..StrategyConfig::with_epsilon(args.eps) };
    let trace = play(x, &mut pusher.agent(&cfg), &mut args.remover.agent(&cfg), &cfg)?;
    if let Some(path) = &args.trace {
        std::fs::write(path, trace.to_jsonl()).map_err(|e| CommandError::Io(format!("writing {}: {e}", path.display())))?;
    }
    Ok(json!({
        "pusher": pusher.name(),
        "remover": args.remover.to_string(),
        "e0": trace.e0,
        "totalHarvested": trace.total_harvested,
        "rounds": trace.rounds.len(),
        "endReason": trace.end_reason,
        "auditsPass": trace.audits_pass(),
        "error": trace.error,
    }))
}

pub fn duel_cmd(x: &Arrangement, eps: f64) -> CommandResult<Value> {
    let cfg = StrategyConfig::with_epsilon(eps);
    let trace = play(x, &mut PusherPolicy::OptimalAdaptive.agent(&cfg), &mut RemoverPolicy::Optimal.agent(&cfg), &cfg)?;
    let e = trace.e0.unwrap_or(0.0);
    let bound = 2.0 * x.max_level() as f64 * eps * x.l1();
    Ok(json!({
        "harvest": trace.total_harvested,
        "e": e,
        "gap": e - trace.total_harvested,
        "bound": bound,
        "withinBound": trace.total_harvested >= e - bound,
        "rounds": trace.rounds.len(),
        "auditsPass": trace.audits_pass(),
        "endReason": trace.end_reason,
    }))
}

pub fn minimax_cmd(x: &Arrangement, budget: usize) -> CommandResult<Value> {
    let state = DiscreteState::from_arrangement(x)?;
    let mut solver = MinimaxSolver::new(x.shared_system(), budget);
    let winner = solver.solve(&state)?;
    let split = solver.winning_split(&state)?;
    let e = value(x)?;
    Ok(json!({
        "winner": winner,
        "e": e,
        "expanded": solver.expanded(),
        "winningSplit": split.map(|s| s
            .into_iter()
            .map(|(c, n)| json!({ "level": c.level, "path": x.system().name(c.path), "count": n }))
            .collect::<Vec<_>>()),
    }))
}

/// Parses `a/b`, an integer or a finite decimal into an exact rational.
pub fn parse_rational(text: &str) -> CommandResult<BigRational> {
    let bad = || CommandError::Usage(format!("cannot read {text:?} as a rational number"));
    let text = text.trim();
    if text.contains('/') {
        return BigRational::from_str(text).map_err(|_| bad());
    }
    let (whole, frac) = text.split_once('.').unwrap_or((text, ""));
    if !frac.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = BigInt::from_str(&format!("{whole}{frac}")).map_err(|_| bad())?;
    let scale = BigInt::from(10).pow(u32::try_from(frac.len()).map_err(|_| bad())?);
    Ok(BigRational::new(digits, scale))
}

pub fn panchromatic_cmd(r: usize, i: u32, p_csv: &str) -> CommandResult<Value> {
    if !(2..=MAX_ORACLE_COLORS).contains(&r) || i > MAX_ORACLE_LEVEL {
        return Err(CommandError::Usage(format!(
            "the oracle covers 2 ≤ r ≤ {MAX_ORACLE_COLORS} and i ≤ {MAX_ORACLE_LEVEL}"
        )));
    }
    let p: Vec<BigRational> = p_csv.split(',').map(parse_rational).collect::<CommandResult<_>>()?;
    if p.len() != r {
        return Err(CommandError::Usage(format!("expected {r} probabilities, got {}", p.len())));
    }
    let mut masks = Vec::new();
    let mut all_equal = true;
    for mask in 0..(1u32 << r) {
        let exact = panchromatic_fail_probability(mask, i, &p, r)?;
        let closed = panchromatic_weight(mask, i, &p);
        all_equal &= exact == closed;
        masks.push(json!({
            "mask": mask_name(mask, r),
            "enumerated": exact.to_string(),
            "closedForm": closed.to_string(),
            "equal": exact == closed,
        }));
    }
    Ok(json!({ "r": r, "i": i, "p": p.iter().map(|v| v.to_string()).collect::<Vec<_>>(), "allEqual": all_equal, "masks": masks }))
}

pub fn remover_line_cmd(x: &Arrangement, pusher: PusherPolicy, horizon: u32, eps: f64) -> CommandResult<Value> {
    let cfg = StrategyConfig::with_epsilon(eps);
    let line = best_remover_line(x, &pusher.agent(&cfg), horizon, &cfg)?;
    let e = value(x)?;
    let bound = e - 2.0 * x.max_level() as f64 * eps * x.l1();
    Ok(json!({
        "e": e,
        "minHarvest": line.min_harvest,
        "labels": line.labels,
        "leaves": line.leaves,
        "lowerBound": bound,
        "withinBound": line.min_harvest >= bound,
    }))
}

/// Colors a stream on-line. Returns the `color <label>` lines followed by
/// a JSON violation report.
pub fn color_cmd(text: &str, kind: Option<GameKind>, painter: RemoverPolicy) -> CommandResult<(Vec<String>, Value)> {
    let stream = Stream::parse(text, kind)?;
    let mut state = Painter::new(&stream.header, painter, &StrategyConfig::default())?;
    let mut lines = Vec::with_capacity(stream.events.len());
    let mut colors = HashMap::new();
    for ev in &stream.events {
        let label = state.on_vertex(ev)?;
        lines.push(format!("color {}", label.number()));
        colors.insert(ev.id.clone(), label);
    }
    let open = state.edges().iter().filter(|e| e.remaining > 0).count();
    let verified = if open == 0 { Some(verify_coloring(&stream.hypergraph(), &colors)?) } else { None };
    let report = json!({
        "kind": stream.header.kind,
        "edges": stream.header.edges.len(),
        "vertices": stream.events.len(),
        "openEdges": open,
        "violations": state.violations(),
        "verifiedViolations": verified,
    });
    Ok((lines, report))
}

/// Edge count just below the on-line threshold: `r^{k−1} − 1` edges of size `k`.
pub fn threshold_edges(kind: GameKind, k: u32) -> CommandResult<usize> {
    let r = match kind {
        GameKind::PropertyB => 2u64,
        GameKind::Proper(r) => r as u64,
        _ => return Err(CommandError::Usage(format!("thresholds cover property_b and proper kinds, not {kind}"))),
    };
    if k == 0 || k > 12 {
        return Err(CommandError::Usage("k must lie in 1..=12".into()));
    }
    let m = r.checked_pow(k - 1).filter(|&m| m <= 1 << 16).ok_or_else(|| CommandError::Usage("too many edges".into()))?;
    Ok((m - 1) as usize)
}

pub fn thresholds_cmd(kind: GameKind, k: u32, streams: usize, seed: u64) -> CommandResult<Value> {
    let m = threshold_edges(kind, k)?;
    let cfg = StrategyConfig { seed, ..StrategyConfig::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0;
    let mut vertices = 0;
    for _ in 0..streams {
        let stream = random_stream(kind, k, m, &mut rng);
        let mut painter = Painter::new(&stream.header, RemoverPolicy::Optimal, &cfg)?;
        for ev in &stream.events {
            painter.on_vertex(ev)?;
        }
        vertices += stream.events.len();
        violations += painter.violations().len();
    }
    let adversary = presenter_adversary(kind, k, m, RemoverPolicy::Optimal, &cfg)?;
    let initial = Arrangement::fitted(
        std::sync::Arc::new(goldsand_core::PathSystem::build(kind)?),
        goldsand_core::Mode::Discrete,
        [(k, goldsand_core::Path(0), m as f64)],
    );
    let e = match initial {
        Ok(x) if m > 0 => value(&x)?,
        _ => 0.0,
    };
    Ok(json!({
        "kind": kind,
        "k": k,
        "edges": m,
        "e": e,
        "streams": streams,
        "vertices": vertices,
        "violations": violations,
        "adversary": {
            "defeated": adversary.defeated,
            "experimental": adversary.experimental,
            "vertices": adversary.stream.events.len(),
        },
        "holds": violations == 0 && !adversary.defeated,
    }))
}
