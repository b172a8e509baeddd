//! Pusher's ε-optimal strategy for the two-color families.
//!
//! While the arrangement is ε-regular Pusher runs a multiple of the balanced
//! direction `d_{k,j} = (k/N)·x_{k,j}`; each such move loses at most
//! `ε·(q(x) − q(y))` of value. Once the arrangement is ε-degenerate Pusher
//! commits to the nearest degenerate arrangement `y ≤ x`, lets the
//! difference stand forever and plays the exact one-sided endgame on `y`.
//! When `q` has dropped below `ε·q(x₀)` the remaining value is negligible and
//! Pusher only cashes in level-1 sand.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{PusherMode, StrategyConfig};
use crate::error::{Error, Result};
use crate::game::{apply_move, Arrangement, Cell, Mode, MoveSplit, Path};
use crate::solver::{
    classify_degeneracy, constants, project_to_degenerate, solve_value, Degeneracy, Side, TwoSidedSums,
};

/// Smallest step multiplier tried for the experimental simplex-family moves.
const EXPERIMENTAL_MIN_LAMBDA: f64 = 1.0 / (1u64 << 20) as f64;

/// `s = ∑_{i≥1} (x_{i,j} + x_{i,0})` and `d = ∑ i·(x_{i,j} + x_{i,0})` for the
/// harvested side `j` of a degenerate endgame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndgameScalars {
    pub s: f64,
    pub d: f64,
}

/// What kind of move Pusher made.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "phase", rename_all = "snake_case")]
pub enum Phase {
    /// `λ·d` on an ε-regular arrangement.
    Regular { lambda: f64 },
    /// One-sided endgame on the committed degenerate arrangement.
    Degenerate {
        side: Side,
        #[serde(flatten)]
        scalars: EndgameScalars,
        /// Sand left standing for good when the endgame was committed.
        sacrificed: f64,
    },
    /// `q(x) ≤ ε·q(x₀)`: only level-1 sand is run.
    Closing,
    /// Moves outside the proven regime (simplex families, chip rounding).
    Experimental {
        #[serde(skip_serializing_if = "Option::is_none")]
        lambda: Option<f64>,
    },
    /// Pusher runs nothing; the game is over.
    Pass,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PusherMove {
    pub split: MoveSplit,
    pub phase: Phase,
}

impl PusherMove {
    fn pass() -> PusherMove {
        PusherMove { split: MoveSplit::new(), phase: Phase::Pass }
    }
}

fn require_two_sided(x: &Arrangement) -> Result<TwoSidedSums> {
    TwoSidedSums::of(x).ok_or_else(|| {
        Error::UnsupportedKind(format!("the proven Pusher strategy covers two-color kinds, not {}", x.kind()))
    })
}

/// The balanced direction `d_{k,j} = (k/N)·x_{k,j}` on a regular arrangement.
pub fn pusher_direction(x: &Arrangement) -> Result<MoveSplit> {
    require_two_sided(x)?;
    if classify_degeneracy(x).is_degenerate() {
        return Err(Error::Precondition("the balanced direction needs a regular arrangement".into()));
    }
    Ok(direction(x))
}

fn direction(x: &Arrangement) -> MoveSplit {
    let n = x.max_level() as f64;
    let mut d = MoveSplit::new();
    for (cell, amount) in x.cells().filter(|(c, _)| c.level >= 1) {
        d.add(cell, cell.level as f64 / n * amount);
    }
    d
}

/// `true` when every reply to `split` satisfies `e(x) − e(y) ≤ ε(q(x) − q(y))`,
/// with `e(y)` counting this round's harvest.
fn passes_value_check(x: &Arrangement, e_x: f64, split: &MoveSplit, cfg: &StrategyConfig, slack: f64) -> Result<bool> {
    let q_x = x.norms().q;
    for tau in x.system().labels() {
        let out = apply_move(x, split, tau)?;
        let e_y = if out.next.is_empty() { 0.0 } else { solve_value(&out.next, cfg.solver_tol)?.e };
        let q_y = out.next.norms().q;
        if e_x - (e_y + out.harvested) > cfg.epsilon * (q_x - q_y) + slack {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Halves `λ` from `start` until the split `λ·d` passes the value check or
/// `λ` drops below `floor`. Returns the accepted `λ`, if any.
fn line_search(
    x: &Arrangement,
    d: &MoveSplit,
    start: f64,
    floor: f64,
    cfg: &StrategyConfig,
    round: impl Fn(MoveSplit) -> MoveSplit,
) -> Result<Option<(f64, MoveSplit)>> {
    let e_x = solve_value(x, cfg.solver_tol)?.e;
    let slack = 0.5 * cfg.audit_tol * x.l1().max(1.0);
    let mut lambda = start;
    while lambda >= floor {
        let split = round(d.scaled(lambda));
        if !split.is_empty() && passes_value_check(x, e_x, &split, cfg, slack)? {
            return Ok(Some((lambda, split)));
        }
        lambda *= 0.5;
    }
    Ok(None)
}

/// One regular move on an ε-regular arrangement. Returns the split and `λ`.
pub fn pusher_move_regular(x: &Arrangement, cfg: &StrategyConfig) -> Result<(MoveSplit, f64)> {
    require_two_sided(x)?;
    cfg.validate()?;
    let projection = project_to_degenerate(x)?;
    if projection.distance <= cfg.epsilon * x.l1() {
        return Err(Error::Precondition(format!(
            "arrangement is {}-degenerate; the regular move needs an ε-regular one",
            cfg.epsilon
        )));
    }
    regular_move(x, cfg, 1.0)
}

fn regular_move(x: &Arrangement, cfg: &StrategyConfig, start: f64) -> Result<(MoveSplit, f64)> {
    let d = direction(x);
    let mu = constants(cfg.epsilon, x.max_level())?.mu;
    match cfg.pusher_mode {
        PusherMode::Proof => Ok((d.scaled(mu), mu)),
        PusherMode::Adaptive => {
            let start = start.clamp(mu, 1.0);
            match line_search(x, &d, start, mu, cfg, |s| s)? {
                Some(found) => Ok((found.1, found.0)),
                // The analysis guarantees the μ-step; use it when rounding
                // made every tried candidate miss by a hair.
                None => Ok((d.scaled(mu), mu)),
            }
        }
    }
}

fn side_for(sums: &TwoSidedSums, degeneracy: Degeneracy) -> Side {
    match degeneracy {
        Degeneracy::NegativelyDegenerate => Side::Negative,
        Degeneracy::PositivelyDegenerate => Side::Positive,
        _ => {
            if sums.side_one_mass() <= sums.side_two_mass() {
                Side::Positive
            } else {
                Side::Negative
            }
        }
    }
}

/// The one-sided endgame move on a degenerate arrangement: on the positive
/// side run all of paths 0 and 1 plus `s − x_{1,0}` from `(1, path 2)`;
/// the negative side is the mirror image.
fn degenerate_split(y: &Arrangement, side: Side) -> (MoveSplit, EndgameScalars) {
    let roles = y.system().two_sided().expect("two-sided kind");
    let (mine, other) = match side {
        Side::Positive => (roles.one, roles.two),
        Side::Negative => (roles.two, roles.one),
    };
    let both = roles.both;
    let mut split = MoveSplit::new();
    let mut s = 0.0;
    let mut d = 0.0;
    for (cell, amount) in y.cells().filter(|(c, _)| c.level >= 1) {
        if cell.path == mine || Some(cell.path) == both {
            split.add(cell, amount);
            s += amount;
            d += cell.level as f64 * amount;
        }
    }
    let level_one_both = both.map_or(0.0, |b| y.amount(1, b));
    let extra = (s - level_one_both).max(0.0).min(y.amount(1, other));
    if extra > 0.0 {
        split.add(Cell::new(1, other), extra);
    }
    (split, EndgameScalars { s, d })
}

/// The exact endgame move on a degenerate arrangement (flat ones pick the
/// lighter side).
pub fn pusher_move_degenerate(x: &Arrangement) -> Result<(MoveSplit, Side)> {
    let sums = require_two_sided(x)?;
    let degeneracy = classify_degeneracy(x);
    if !degeneracy.is_degenerate() {
        return Err(Error::Precondition("the endgame move needs a degenerate arrangement".into()));
    }
    let side = side_for(&sums, degeneracy);
    Ok((degenerate_split(x, side).0, side))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct CommittedEndgame {
    side: Side,
    /// `(level, path index, amount)` of the sand left standing for good.
    sacrificial: Vec<(u32, u16, f64)>,
}

impl CommittedEndgame {
    fn sacrificed(&self) -> f64 {
        self.sacrificial.iter().map(|c| c.2).sum()
    }

    fn live_part(&self, x: &Arrangement) -> Arrangement {
        let z: BTreeMap<Cell, f64> =
            self.sacrificial.iter().map(|&(level, path, a)| (Cell::new(level, Path(path)), a)).collect();
        let z = Arrangement::from_parts(x.shared_system(), x.max_level(), Mode::Continuous, z);
        x.saturating_sub(&z)
    }
}

/// The stateful ε-optimal Pusher. It remembers `q(x₀)` and, once committed,
/// the endgame side and the sacrificed sand, so a game is replayed exactly
/// from a serialized snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OptimalPusher {
    pub config: StrategyConfig,
    initial_q: Option<f64>,
    endgame: Option<CommittedEndgame>,
    last_lambda: Option<f64>,
}

impl OptimalPusher {
    pub fn new(config: StrategyConfig) -> OptimalPusher {
        OptimalPusher { config, initial_q: None, endgame: None, last_lambda: None }
    }

    /// Whether the degenerate endgame has been committed.
    pub fn in_endgame(&self) -> bool {
        self.endgame.is_some()
    }

    /// Pusher's next move on `x`.
    pub fn respond(&mut self, x: &Arrangement) -> Result<PusherMove> {
        self.config.validate()?;
        if x.cells().all(|(c, _)| c.level == 0) {
            return Ok(PusherMove::pass());
        }
        let q = x.norms().q;
        let q0 = *self.initial_q.get_or_insert(q);
        if !x.kind().is_builtin() {
            return Ok(PusherMove { split: MoveSplit::all(x), phase: Phase::Experimental { lambda: None } });
        }
        let Some(_) = x.system().two_sided() else {
            return self.experimental(x, q0);
        };

        if let Some(endgame) = &self.endgame {
            let y = endgame.live_part(x);
            let (split, scalars) = degenerate_split(&y, endgame.side);
            if split.is_empty() {
                return Ok(PusherMove::pass());
            }
            let phase = Phase::Degenerate { side: endgame.side, scalars, sacrificed: endgame.sacrificed() };
            return Ok(PusherMove { split, phase });
        }

        if q <= self.config.epsilon * q0 {
            return Ok(closing_move(x));
        }

        let projection = project_to_degenerate(x)?;
        if projection.distance <= self.config.epsilon * x.l1() {
            let y = projection.target;
            let side = match projection.side {
                Some(side) => side,
                None => side_for(&TwoSidedSums::of(&y).expect("two-sided"), Degeneracy::Flat),
            };
            let sacrificial: Vec<(u32, u16, f64)> =
                x.saturating_sub(&y).cells().map(|(c, a)| (c.level, c.path.0, a)).collect();
            let endgame = CommittedEndgame { side, sacrificial };
            let (split, scalars) = degenerate_split(&y, side);
            let phase = Phase::Degenerate { side, scalars, sacrificed: endgame.sacrificed() };
            self.endgame = Some(endgame);
            if split.is_empty() {
                return Ok(PusherMove::pass());
            }
            return Ok(PusherMove { split, phase });
        }

        if x.mode() == Mode::Discrete {
            return self.experimental(x, q0);
        }
        // Warm start: the accepted step rarely grows by more than a factor 2.
        let start = self.last_lambda.map_or(1.0, |l| (2.0 * l).min(1.0));
        let (split, lambda) = regular_move(x, &self.config, start)?;
        self.last_lambda = Some(lambda);
        Ok(PusherMove { split, phase: Phase::Regular { lambda } })
    }

    /// Balanced-direction moves outside the proven regime: the simplex
    /// families and chip games. Falls back to running everything.
    fn experimental(&mut self, x: &Arrangement, q0: f64) -> Result<PusherMove> {
        if x.norms().q <= self.config.epsilon * q0 {
            return Ok(closing_move(x));
        }
        let discrete = x.mode() == Mode::Discrete;
        let round = |s: MoveSplit| if discrete { floor_split(&s) } else { s };
        let d = direction(x);
        let found = line_search(x, &d, 1.0, EXPERIMENTAL_MIN_LAMBDA, &self.config, round)?;
        Ok(match found {
            Some((lambda, split)) => PusherMove { split, phase: Phase::Experimental { lambda: Some(lambda) } },
            None => PusherMove { split: MoveSplit::all(x), phase: Phase::Experimental { lambda: None } },
        })
    }
}

fn floor_split(s: &MoveSplit) -> MoveSplit {
    let mut out = MoveSplit::new();
    for (cell, a) in s.cells() {
        // Absorb rounding so that `k/N·x` with integer results stays exact.
        let v = (a + 1e-9).floor();
        if v > 0.0 {
            out.add(cell, v);
        }
    }
    out
}

fn closing_move(x: &Arrangement) -> PusherMove {
    let mut split = MoveSplit::new();
    for (cell, a) in x.cells().filter(|(c, _)| c.level == 1) {
        split.add(cell, a);
    }
    if split.is_empty() {
        PusherMove::pass()
    } else {
        PusherMove { split, phase: Phase::Closing }
    }
}
