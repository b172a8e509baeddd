//! Exact solution of small chip games by memoized alternating search.
//!
//! Every nonempty running set moves each runner down one level (or onto the
//! dead path), so the level-weighted mass strictly decreases and the game
//! graph is acyclic once passing is excluded. Passing never helps Pusher:
//! a repeated position with Pusher to move is scored as a Remover win.

use std::sync::Arc;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Arrangement, Cell, Label, Mode, Path, PathSystem};

pub const MAX_CHIPS: usize = 8;
pub const MAX_LEVEL: u32 = 5;
pub const MAX_LABELS: usize = 3;
/// Path indices must fit the 4-bit field of the packed state key.
const MAX_PATHS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Winner {
    PusherWins,
    RemoverWins,
}

/// A chip position: a sorted multiset of `(level, path)` cells.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteState {
    system: Arc<PathSystem>,
    chips: Vec<Cell>,
}

impl DiscreteState {
    pub fn new(system: Arc<PathSystem>, mut chips: Vec<Cell>) -> Result<DiscreteState> {
        if chips.len() > MAX_CHIPS {
            return Err(Error::Config(format!("{} chips exceed the search bound of {MAX_CHIPS}", chips.len())));
        }
        if system.label_count() > MAX_LABELS {
            return Err(Error::Config(format!(
                "{} transitions exceed the search bound of {MAX_LABELS}",
                system.label_count()
            )));
        }
        if system.path_count() > MAX_PATHS {
            return Err(Error::Config(format!("{} paths exceed the search bound of {MAX_PATHS}", system.path_count())));
        }
        for c in &chips {
            if c.level > MAX_LEVEL {
                return Err(Error::Config(format!("chip at level {} exceeds the search bound of {MAX_LEVEL}", c.level)));
            }
            if !system.contains(c.path) || c.path == system.dead() {
                return Err(Error::Config(format!("chip on invalid path index {}", c.path.0)));
            }
        }
        chips.sort();
        Ok(DiscreteState { system, chips })
    }

    /// One chip per unit of sand of a discrete arrangement.
    pub fn from_arrangement(x: &Arrangement) -> Result<DiscreteState> {
        if x.mode() != Mode::Discrete && x.cells().any(|(_, a)| a.fract() != 0.0) {
            return Err(Error::Config("chip positions need integer amounts".into()));
        }
        let mut chips = Vec::new();
        for (cell, a) in x.cells() {
            if a > MAX_CHIPS as f64 {
                return Err(Error::Config(format!("{a} chips exceed the search bound of {MAX_CHIPS}")));
            }
            chips.extend(std::iter::repeat_n(cell, a as usize));
        }
        DiscreteState::new(x.shared_system(), chips)
    }

    pub fn chips(&self) -> &[Cell] {
        &self.chips
    }

    pub fn system(&self) -> &PathSystem {
        &self.system
    }

    /// Same position with two paths swapped (used for symmetry checks).
    pub fn relabeled(&self, a: Path, b: Path) -> DiscreteState {
        let swap = |p: Path| if p == a { b } else if p == b { a } else { p };
        let chips = self.chips.iter().map(|c| Cell::new(c.level, swap(c.path))).collect();
        DiscreteState::new(self.system.clone(), chips).expect("relabeling keeps bounds")
    }
}

fn code(c: Cell) -> u8 {
    ((c.level as u8) << 4) | c.path.0 as u8
}

fn decode(code: u8) -> Cell {
    Cell::new((code >> 4) as u32, Path((code & 0x0f) as u16))
}

/// Sorted nonzero codes packed into a `u64`; level ≥ 1 keeps every code nonzero.
fn key(codes: &[u8]) -> u64 {
    codes.iter().fold(0u64, |k, &c| (k << 8) | c as u64)
}

/// Reusable memoized solver for one path system.
pub struct MinimaxSolver {
    system: Arc<PathSystem>,
    memo: FxHashMap<u64, bool>,
    budget: usize,
    expanded: usize,
}

impl MinimaxSolver {
    pub fn new(system: Arc<PathSystem>, budget: usize) -> MinimaxSolver {
        MinimaxSolver { system, memo: FxHashMap::default(), budget, expanded: 0 }
    }

    /// Positions expanded so far (cache misses).
    pub fn expanded(&self) -> usize {
        self.expanded
    }

    pub fn solve(&mut self, state: &DiscreteState) -> Result<Winner> {
        if *state.system != *self.system {
            return Err(Error::Config("state belongs to a different path system".into()));
        }
        let codes: Vec<u8> = state.chips.iter().map(|&c| code(c)).collect();
        if state.chips.iter().any(|c| c.level == 0) {
            return Ok(Winner::PusherWins);
        }
        Ok(if self.pusher_wins(&codes)? { Winner::PusherWins } else { Winner::RemoverWins })
    }

    /// A running set (as `(cell, count)`) that wins for Pusher, if one exists.
    pub fn winning_split(&mut self, state: &DiscreteState) -> Result<Option<Vec<(Cell, u32)>>> {
        let codes: Vec<u8> = state.chips.iter().map(|&c| code(c)).collect();
        let groups = group(&codes);
        let mut found = None;
        self.for_each_split(&groups, &mut |solver, run| {
            if solver.split_wins(&groups, run)? {
                found = Some(groups.iter().zip(run).filter(|(_, &k)| k > 0).map(|(g, &k)| (decode(g.0), k)).collect());
                return Ok(true);
            }
            Ok(false)
        })?;
        Ok(found)
    }

    fn pusher_wins(&mut self, codes: &[u8]) -> Result<bool> {
        if codes.is_empty() {
            return Ok(false);
        }
        let k = key(codes);
        if let Some(&w) = self.memo.get(&k) {
            return Ok(w);
        }
        self.expanded += 1;
        if self.expanded > self.budget {
            return Err(Error::Inconclusive(format!("search budget of {} positions exceeded", self.budget)));
        }
        let groups = group(codes);
        let wins = self.for_each_split(&groups, &mut |solver, run| solver.split_wins(&groups, run))?;
        self.memo.insert(k, wins);
        Ok(wins)
    }

    /// Calls `f` on every nonempty running vector until it returns `true`.
    fn for_each_split(
        &mut self,
        groups: &[(u8, u32)],
        f: &mut dyn FnMut(&mut MinimaxSolver, &[u32]) -> Result<bool>,
    ) -> Result<bool> {
        let mut run = vec![0u32; groups.len()];
        loop {
            // Odometer increment over 0..=count per group.
            let mut i = 0;
            loop {
                if i == groups.len() {
                    return Ok(false);
                }
                if run[i] < groups[i].1 {
                    run[i] += 1;
                    break;
                }
                run[i] = 0;
                i += 1;
            }
            if f(self, &run)? {
                return Ok(true);
            }
        }
    }

    /// Whether Pusher wins against every reply to running `run` of `groups`.
    fn split_wins(&mut self, groups: &[(u8, u32)], run: &[u32]) -> Result<bool> {
        let dead = self.system.dead();
        let mut successors = Vec::with_capacity(self.system.label_count());
        for label in self.system.labels() {
            let mut next = Vec::with_capacity(MAX_CHIPS);
            let mut reached = false;
            for (&(c, count), &k) in groups.iter().zip(run) {
                next.extend(std::iter::repeat_n(c, (count - k) as usize));
                if k == 0 {
                    continue;
                }
                let cell = decode(c);
                let target = self.system.step(label, cell.path);
                if target == dead {
                    continue;
                }
                if cell.level == 1 {
                    reached = true;
                    break;
                }
                next.extend(std::iter::repeat_n(code(Cell::new(cell.level - 1, target)), k as usize));
            }
            if !reached {
                next.sort_unstable();
                successors.push(next);
            }
        }
        // Cheap refutations first: a reply leaving no chips wins for Remover.
        if successors.iter().any(|s| s.is_empty()) {
            return Ok(false);
        }
        for s in successors {
            if !self.pusher_wins(&s)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn group(codes: &[u8]) -> Vec<(u8, u32)> {
    let mut groups: Vec<(u8, u32)> = Vec::new();
    for &c in codes {
        match groups.last_mut() {
            Some(g) if g.0 == c => g.1 += 1,
            _ => groups.push((c, 1)),
        }
    }
    groups
}

/// Exact winner of the chip game from `state`, expanding at most `budget` positions.
pub fn minimax_discrete(state: &DiscreteState, budget: usize) -> Result<Winner> {
    MinimaxSolver::new(state.system.clone(), budget).solve(state)
}

/// The label Remover should answer in a won position so that the successor
/// stays won for Remover; `None` when every reply loses.
pub fn minimax_remover_reply(
    solver: &mut MinimaxSolver,
    state: &DiscreteState,
    run: &[(Cell, u32)],
) -> Result<Option<Label>> {
    let sys = state.system.clone();
    for label in sys.labels() {
        let mut next = Vec::new();
        let mut reached = false;
        let mut remaining: Vec<Cell> = state.chips.clone();
        for &(cell, k) in run {
            for _ in 0..k {
                let pos = remaining
                    .iter()
                    .position(|c| *c == cell)
                    .ok_or_else(|| Error::InvalidMove("running chip not in position".into()))?;
                remaining.remove(pos);
            }
            let target = sys.step(label, cell.path);
            if target == sys.dead() {
                continue;
            }
            if cell.level == 1 {
                reached = true;
            } else {
                next.extend(std::iter::repeat_n(Cell::new(cell.level - 1, target), k as usize));
            }
        }
        if reached {
            continue;
        }
        next.extend(remaining);
        let succ = DiscreteState::new(sys.clone(), next)?;
        if solver.solve(&succ)? == Winner::RemoverWins {
            return Ok(Some(label));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::GameKind;

    fn state(kind: GameKind, chips: &[(u32, &str)]) -> DiscreteState {
        let sys = Arc::new(PathSystem::build(kind).unwrap());
        let chips = chips.iter().map(|&(l, p)| Cell::new(l, sys.path_named(p).unwrap())).collect();
        DiscreteState::new(sys, chips).unwrap()
    }

    #[test]
    fn small_examples() {
        let budget = 1_000_000;
        assert_eq!(minimax_discrete(&state(GameKind::PropertyB, &[(2, "1"), (2, "2")]), budget).unwrap(), Winner::RemoverWins);
        assert_eq!(minimax_discrete(&state(GameKind::PropertyB, &[(1, "1"), (1, "2")]), budget).unwrap(), Winner::PusherWins);
        assert_eq!(minimax_discrete(&state(GameKind::PropertyB, &[(1, "0")]), budget).unwrap(), Winner::PusherWins);
        assert_eq!(minimax_discrete(&state(GameKind::PropertyB, &[]), budget).unwrap(), Winner::RemoverWins);
    }

    #[test]
    fn relabeling_sides_keeps_winner() {
        let cases: [&[(u32, &str)]; 3] =
            [&[(2, "1"), (1, "2"), (3, "0")], &[(1, "1"), (2, "2"), (2, "2")], &[(3, "0"), (3, "0"), (2, "1"), (1, "2")]];
        for chips in cases {
            let s = state(GameKind::PropertyB, chips);
            let w = minimax_discrete(&s, 1_000_000).unwrap();
            assert_eq!(minimax_discrete(&s.relabeled(Path(1), Path(2)), 1_000_000).unwrap(), w);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let s = state(GameKind::PropertyB, &[(5, "0"), (5, "0"), (5, "0"), (5, "0"), (4, "1"), (4, "2")]);
        assert!(matches!(minimax_discrete(&s, 3), Err(Error::Inconclusive(_))));
    }

    #[test]
    fn bounds_are_enforced() {
        let sys = Arc::new(PathSystem::build(GameKind::PropertyB).unwrap());
        assert!(DiscreteState::new(sys.clone(), vec![Cell::new(6, Path(0))]).is_err());
        assert!(DiscreteState::new(sys.clone(), vec![Cell::new(1, Path(0)); 9]).is_err());
        let sys = Arc::new(PathSystem::build(GameKind::Proper(4)).unwrap());
        assert!(DiscreteState::new(sys, vec![Cell::new(1, Path(0))]).is_err());
    }

    #[test]
    fn winning_split_and_reply() {
        let s = state(GameKind::PropertyB, &[(1, "1"), (1, "2")]);
        let mut solver = MinimaxSolver::new(s.system.clone(), 1000);
        let split = solver.winning_split(&s).unwrap().unwrap();
        assert_eq!(split.len(), 2);
        let s = state(GameKind::PropertyB, &[(2, "1"), (2, "2")]);
        assert!(solver.winning_split(&s).unwrap().is_none());
        let run = vec![(Cell::new(2, Path(1)), 1)];
        assert!(minimax_remover_reply(&mut solver, &s, &run).unwrap().is_some());
    }
}
