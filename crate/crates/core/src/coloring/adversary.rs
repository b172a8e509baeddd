//! Presenter: builds a stream on-line against a Painter, choosing which
//! open edges each new vertex joins.
//!
//! Inside the exact-search bounds the Presenter plays a winning running set
//! whenever one exists. Elsewhere it falls back to the optimal Pusher on the
//! chip arrangement, which is experimental for discrete positions. Edges left
//! open when the Presenter stops are completed with one fresh vertex each.

use serde::Serialize;

use super::painter::{Painter, Violation};
use super::stream::{EdgeDecl, Stream, StreamHeader, VertexEvent};
use crate::error::{Error, Result};
use crate::game::{Cell, GameKind};
use crate::oracles::{DiscreteState, MinimaxSolver};
use crate::strategy::{PusherPolicy, RemoverPolicy, StrategyConfig};

/// Positions the exact search may expand per Presenter move.
pub const ADVERSARY_BUDGET: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AdversaryReport {
    pub stream: Stream,
    /// Whether the Painter's coloring violates some edge.
    pub defeated: bool,
    pub violations: Vec<Violation>,
    /// Whether some Presenter move was made outside the exact-search bounds.
    pub experimental: bool,
}

/// What the exact search says about the current position.
enum Exact {
    /// A running set that forces a violation.
    Wins(Vec<(Cell, u32)>),
    /// The Painter survives every Presenter move.
    Loses,
    /// Outside the search bounds or budget.
    Unknown,
}

fn exact_split(solver: &mut Option<MinimaxSolver>, painter: &Painter) -> Result<Exact> {
    let x = painter.arrangement();
    let Ok(state) = DiscreteState::from_arrangement(&x) else {
        return Ok(Exact::Unknown);
    };
    let solver = solver.get_or_insert_with(|| MinimaxSolver::new(x.shared_system(), ADVERSARY_BUDGET));
    match solver.winning_split(&state) {
        Ok(Some(split)) => Ok(Exact::Wins(split)),
        Ok(None) => Ok(Exact::Loses),
        Err(Error::Inconclusive(_)) => Ok(Exact::Unknown),
        Err(e) => Err(e),
    }
}

/// Picks `count` distinct open edges sitting at `cell`, skipping `taken`.
fn edges_at(painter: &Painter, cell: Cell, count: u32, taken: &mut Vec<usize>) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for (i, e) in painter.edges().iter().enumerate() {
        if out.len() == count as usize {
            break;
        }
        if e.remaining == cell.level && e.path == cell.path && !taken.contains(&i) {
            taken.push(i);
            out.push(e.id.clone());
        }
    }
    if out.len() < count as usize {
        return Err(Error::Stream(format!("only {} open edges at level {} path {}", out.len(), cell.level, cell.path.0)));
    }
    Ok(out)
}

/// Plays a Presenter revealing `m` edges of cardinality `k` against a
/// Painter following `painter_policy`.
pub fn presenter_adversary(
    kind: GameKind,
    k: u32,
    m: usize,
    painter_policy: RemoverPolicy,
    cfg: &StrategyConfig,
) -> Result<AdversaryReport> {
    if k == 0 {
        return Err(Error::Config("edges need at least one vertex".into()));
    }
    let edges: Vec<EdgeDecl> = (1..=m).map(|i| EdgeDecl { id: format!("e{i}"), size: k, path: None }).collect();
    let header = StreamHeader { kind, edges };
    let mut painter = Painter::new(&header, painter_policy, cfg)?;
    let mut fallback = PusherPolicy::OptimalAdaptive.agent(cfg);
    let mut solver = None;
    let mut events = Vec::new();
    let mut experimental = false;

    loop {
        let x = painter.arrangement();
        if x.is_empty() || !painter.violations().is_empty() {
            break;
        }
        let exact = exact_split(&mut solver, &painter)?;
        let run: Vec<(Cell, u32)> = match exact {
            Exact::Wins(run) => run,
            Exact::Loses | Exact::Unknown => {
                experimental |= matches!(exact, Exact::Unknown);
                let mv = fallback.respond(&x)?;
                mv.split.cells().map(|(c, a)| (c, a.floor() as u32)).filter(|&(_, n)| n > 0).collect()
            }
        };
        if run.is_empty() {
            break;
        }
        let mut taken = Vec::new();
        let mut incident = Vec::new();
        for (cell, count) in run {
            incident.extend(edges_at(&painter, cell, count, &mut taken)?);
        }
        let event = VertexEvent { id: format!("v{}", events.len() + 1), edges: incident };
        painter.on_vertex(&event)?;
        events.push(event);
    }

    // Complete every edge that still misses vertices.
    let open: Vec<(String, u32)> =
        painter.edges().iter().filter(|e| e.remaining > 0).map(|e| (e.id.clone(), e.remaining)).collect();
    for (id, remaining) in open {
        for _ in 0..remaining {
            let event = VertexEvent { id: format!("v{}", events.len() + 1), edges: vec![id.clone()] };
            painter.on_vertex(&event)?;
            events.push(event);
        }
    }

    let violations = painter.violations().to_vec();
    Ok(AdversaryReport {
        stream: Stream { header, events },
        defeated: !violations.is_empty(),
        violations,
        experimental,
    })
}
