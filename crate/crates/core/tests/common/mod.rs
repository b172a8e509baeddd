//! Random instance generators and independent reference formulas shared by
//! the integration tests.

#![allow(dead_code)]

use std::sync::Arc;

use goldsand_core::solver::{is_eps_degenerate, project_to_degenerate};
use goldsand_core::{Arrangement, Cell, GameKind, Mode, Path, PathSystem};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn system(kind: GameKind) -> Arc<PathSystem> {
    Arc::new(PathSystem::build(kind).unwrap())
}

/// Up to `max_cells` cells at levels `1..=max_n` on random live paths, with
/// amounts drawn from `(0.05, 3)` (continuous) or `1..=3` (discrete).
pub fn random_arrangement<R: Rng>(rng: &mut R, kind: GameKind, max_n: u32, max_cells: usize, mode: Mode) -> Arrangement {
    let sys = system(kind);
    let live: Vec<Path> = sys.live_paths().collect();
    let count = rng.random_range(1..=max_cells);
    let cells: Vec<(u32, Path, f64)> = (0..count)
        .map(|_| {
            let level = rng.random_range(1..=max_n);
            let path = live[rng.random_range(0..live.len())];
            let amount = match mode {
                Mode::Continuous => rng.random_range(0.05..3.0),
                Mode::Discrete => rng.random_range(1..=3) as f64,
            };
            (level, path, amount)
        })
        .collect();
    Arrangement::fitted(sys, mode, cells).unwrap()
}

/// A random arrangement that is not ε-degenerate.
pub fn random_regular<R: Rng>(rng: &mut R, kind: GameKind, max_n: u32, max_cells: usize, eps: f64) -> Arrangement {
    loop {
        let x = random_arrangement(rng, kind, max_n.max(2), max_cells.max(2), Mode::Continuous);
        if !is_eps_degenerate(&x, eps).unwrap() {
            return x;
        }
    }
}

/// A random degenerate arrangement: the nearest degenerate point of a random one.
pub fn random_degenerate<R: Rng>(rng: &mut R, kind: GameKind, max_n: u32, max_cells: usize) -> Arrangement {
    loop {
        let x = random_arrangement(rng, kind, max_n, max_cells, Mode::Continuous);
        let target = project_to_degenerate(&x).unwrap().target;
        if !target.is_empty() {
            return target;
        }
    }
}

/// `y` with every cell of `x` rescaled by a factor in `[1 − spread, 1 + spread]`.
pub fn perturbed<R: Rng>(rng: &mut R, x: &Arrangement, spread: f64) -> Arrangement {
    let cells: Vec<(u32, Path, f64)> =
        x.cells().map(|(c, a)| (c.level, c.path, a * rng.random_range(1.0 - spread..=1.0 + spread))).collect();
    Arrangement::from_cells(x.shared_system(), x.max_level(), x.mode(), cells).unwrap()
}

/// A random point of the open probability simplex with `r` coordinates.
pub fn random_simplex<R: Rng>(rng: &mut R, r: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..r).map(|_| rng.random_range(0.02..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / total).collect()
}

/// Probability that `level` independent colors drawn from `p` leave a chip
/// on path `path` alive, computed from the color semantics of each kind
/// rather than the weight formulas.
pub fn survival_probability(kind: GameKind, p: &[f64], level: u32, path: Path) -> f64 {
    let i = level as i32;
    match kind {
        // path 0: nothing yet; path 1: all color 1 so far; path 2: all color 2 so far.
        GameKind::PropertyB => match path.0 {
            0 => p[0].powi(i) + p[1].powi(i),
            1 => p[0].powi(i),
            2 => p[1].powi(i),
            _ => 0.0,
        },
        // Alive while every vertex gets the edge's own forbidden color.
        GameKind::ListColoring => match path.0 {
            0 => p[0].powi(i),
            1 => p[1].powi(i),
            _ => 0.0,
        },
        // path 0: nothing yet; path j: all color j so far.
        GameKind::Proper(r) => {
            let r = r as usize;
            match path.0 as usize {
                0 => p.iter().map(|v| v.powi(i)).sum(),
                j if j <= r => p[j - 1].powi(i),
                _ => 0.0,
            }
        }
        // Alive while some color stays missing: inclusion–exclusion over the
        // colors still absent after `level` more draws.
        GameKind::Panchromatic(r) => {
            let r = r as usize;
            let mask = path.0 as usize;
            let missing: Vec<usize> = (0..r).filter(|b| mask >> b & 1 == 0).collect();
            if missing.is_empty() {
                return 0.0;
            }
            let mut fail = 0.0;
            for sub in 1u32..(1 << missing.len()) {
                let avoided: f64 = missing
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| sub >> k & 1 == 1)
                    .map(|(_, &b)| p[b])
                    .sum();
                let sign = if sub.count_ones() % 2 == 1 { 1.0 } else { -1.0 };
                fail += sign * (1.0 - avoided).powi(i);
            }
            fail
        }
        GameKind::Custom => unreachable!("no weights for custom systems"),
    }
}

/// `x·w(p)` from [`survival_probability`].
pub fn reference_potential(x: &Arrangement, p: &[f64]) -> f64 {
    x.cells().map(|(c, a)| a * survival_probability(x.kind(), p, c.level, c.path)).sum()
}

/// Color probabilities in label order for a scalar `p`.
pub fn scalar_probabilities(p: f64) -> Vec<f64> {
    vec![p, 1.0 - p]
}

/// Whether `a ≤ b` within `slack`.
pub fn le(a: f64, b: f64, slack: f64) -> bool {
    a <= b + slack
}

pub fn cell(level: u32, path: u16) -> Cell {
    Cell::new(level, Path(path))
}

pub type Rng8 = ChaCha8Rng;
