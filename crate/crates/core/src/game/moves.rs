//! One round of the game: Pusher's split, Remover's transition, the shift.

use std::collections::BTreeMap;

use serde::Serialize;

use super::arrangement::{Arrangement, Cell, Mode, SandCell};
use super::paths::{Label, PathSystem};
use crate::error::{Error, Result};

/// Amounts below this fraction of the pre-move total are flushed after a move.
pub const DUST: f64 = 1e-15;

/// Relative slack allowed when a running part equals the cell's sand up to rounding.
const SPLIT_SLACK: f64 = 1e-12;

/// Pusher's running part: how much of each cell moves this round.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MoveSplit {
    running: BTreeMap<Cell, f64>,
}

impl MoveSplit {
    pub fn new() -> MoveSplit {
        MoveSplit::default()
    }

    /// Runs every cell of `x` at level ≥ 1 in full.
    pub fn all(x: &Arrangement) -> MoveSplit {
        let running = x.cells().filter(|(c, _)| c.level >= 1).collect();
        MoveSplit { running }
    }

    /// Adds `amount` to the running part of `cell`.
    pub fn add(&mut self, cell: Cell, amount: f64) {
        if amount != 0.0 {
            *self.running.entry(cell).or_insert(0.0) += amount;
        }
    }

    pub fn set(&mut self, cell: Cell, amount: f64) {
        if amount == 0.0 {
            self.running.remove(&cell);
        } else {
            self.running.insert(cell, amount);
        }
    }

    pub fn get(&self, cell: Cell) -> f64 {
        self.running.get(&cell).copied().unwrap_or(0.0)
    }

    pub fn cells(&self) -> impl Iterator<Item = (Cell, f64)> + '_ {
        self.running.iter().map(|(&c, &a)| (c, a))
    }

    pub fn is_empty(&self) -> bool {
        self.running.values().all(|&a| a == 0.0)
    }

    pub fn l1(&self) -> f64 {
        self.running.values().sum()
    }

    pub fn scaled(&self, factor: f64) -> MoveSplit {
        MoveSplit {
            running: self
                .running
                .iter()
                .filter_map(|(&c, &a)| {
                    let v = a * factor;
                    (v > 0.0).then_some((c, v))
                })
                .collect(),
        }
    }

    /// The running part as an arrangement on `x`'s path system.
    pub fn as_arrangement(&self, x: &Arrangement) -> Arrangement {
        let sand = self.running.iter().filter(|(_, &a)| a > 0.0).map(|(&c, &a)| (c, a)).collect();
        Arrangement::from_parts(x.shared_system(), x.max_level(), Mode::Continuous, sand)
    }

    /// Checks `0 ≤ running ≤ sand` cellwise and clamps rounding excess.
    pub fn validated(&self, x: &Arrangement) -> Result<MoveSplit> {
        let mut out = MoveSplit::new();
        for (cell, run) in self.cells() {
            if !run.is_finite() || run < 0.0 {
                return Err(Error::InvalidMove(format!("running amount {run} is negative or not finite")));
            }
            if run == 0.0 {
                continue;
            }
            if cell.level == 0 {
                return Err(Error::InvalidMove("sand at level 0 cannot run".into()));
            }
            let have = x.amount(cell.level, cell.path);
            if run > have * (1.0 + SPLIT_SLACK) {
                return Err(Error::InvalidMove(format!(
                    "running {run} exceeds the {have} available at level {} path {}",
                    cell.level,
                    x.system().name(cell.path)
                )));
            }
            if x.mode() == Mode::Discrete && run.fract() != 0.0 {
                return Err(Error::InvalidMove(format!("fractional split {run} in a chip game")));
            }
            out.running.insert(cell, run.min(have));
        }
        Ok(out)
    }

    pub fn to_cells(&self, sys: &PathSystem) -> Vec<SandCell> {
        self.cells()
            .map(|(c, amount)| SandCell { level: c.level, path: sys.name(c.path).to_string(), amount })
            .collect()
    }

    pub fn from_cells(sys: &PathSystem, cells: &[SandCell]) -> Result<MoveSplit> {
        let mut split = MoveSplit::new();
        for c in cells {
            let path = sys.path_named(&c.path).map_err(|e| Error::InvalidMove(e.to_string()))?;
            split.add(Cell::new(c.level, path), c.amount);
        }
        Ok(split)
    }
}

/// Result of one round.
#[derive(Debug, Clone, PartialEq)]
pub struct MoveOutcome {
    pub next: Arrangement,
    /// Sand that reached a winning cell (level 0, live path).
    pub harvested: f64,
    /// Sand that reached the dead path, plus flushed dust.
    pub destroyed: f64,
    pub tau: Label,
}

#[derive(Serialize)]
struct OutcomeView<'a> {
    harvested: f64,
    destroyed: f64,
    tau: u32,
    next: &'a Arrangement,
}

impl Serialize for MoveOutcome {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OutcomeView { harvested: self.harvested, destroyed: self.destroyed, tau: self.tau.number(), next: &self.next }
            .serialize(s)
    }
}

/// Plays one round: standing sand stays, running sand at `(n, m)` moves to
/// `(n−1, τ(m))`. Sand reaching the dead path is destroyed, sand reaching
/// level 0 is harvested. Sand already sitting at level 0 is harvested too.
pub fn apply_move(x: &Arrangement, split: &MoveSplit, tau: Label) -> Result<MoveOutcome> {
    let sys = x.system();
    if !sys.has_label(tau) {
        return Err(Error::InvalidMove(format!("{tau} is not a transition of {}", sys.kind())));
    }
    let split = split.validated(x)?;
    let dead = sys.dead();
    let mut next: BTreeMap<Cell, f64> = BTreeMap::new();
    let mut harvested = 0.0;
    let mut destroyed = 0.0;
    let mut total = 0.0;

    for (cell, amount) in x.cells() {
        total += amount;
        let run = split.get(cell);
        let stand = if run >= amount { 0.0 } else { amount - run };
        if cell.level == 0 {
            harvested += amount;
            continue;
        }
        if stand > 0.0 {
            *next.entry(cell).or_insert(0.0) += stand;
        }
        if run > 0.0 {
            let target = sys.step(tau, cell.path);
            if target == dead {
                destroyed += run;
            } else if cell.level == 1 {
                harvested += run;
            } else {
                *next.entry(Cell::new(cell.level - 1, target)).or_insert(0.0) += run;
            }
        }
    }

    let threshold = DUST * total;
    next.retain(|_, v| {
        if *v < threshold || *v <= 0.0 {
            destroyed += *v;
            false
        } else {
            true
        }
    });

    Ok(MoveOutcome {
        next: Arrangement::from_parts(x.shared_system(), x.max_level(), x.mode(), next),
        harvested,
        destroyed,
        tau,
    })
}
