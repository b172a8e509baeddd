//! Arrangements of sand (or chips) over the cells `(level, path)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::paths::{GameKind, Path, PathSystem};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub level: u32,
    pub path: Path,
}

impl Cell {
    pub fn new(level: u32, path: Path) -> Cell {
        Cell { level, path }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Continuous,
    Discrete,
}

/// The three norms used throughout the analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Norms {
    /// Total sand.
    pub l1: f64,
    /// Level-weighted mass `∑ i·x_i`.
    pub q: f64,
    /// Sand at levels ≥ 2.
    pub semi12: f64,
}

/// Nonnegative sand amounts indexed by `(level, path)`, stored sparsely.
///
/// `max_level` is the ambient depth `N`; it stays fixed while the game is
/// played so that every constant derived from it stays fixed too.
#[derive(Debug, Clone)]
pub struct Arrangement {
    system: Arc<PathSystem>,
    max_level: u32,
    mode: Mode,
    sand: BTreeMap<Cell, f64>,
}

impl PartialEq for Arrangement {
    fn eq(&self, other: &Self) -> bool {
        *self.system == *other.system
            && self.max_level == other.max_level
            && self.mode == other.mode
            && self.sand == other.sand
    }
}

impl Arrangement {
    /// An empty arrangement of depth `max_level`.
    pub fn empty(system: Arc<PathSystem>, max_level: u32, mode: Mode) -> Result<Arrangement> {
        if max_level == 0 {
            return Err(Error::Config("maxLevel must be at least 1".into()));
        }
        Ok(Arrangement { system, max_level, mode, sand: BTreeMap::new() })
    }

    /// Builds an arrangement from `(level, path, amount)` triples.
    /// Repeated cells accumulate; zero amounts are dropped.
    pub fn from_cells<I>(system: Arc<PathSystem>, max_level: u32, mode: Mode, cells: I) -> Result<Arrangement>
    where
        I: IntoIterator<Item = (u32, Path, f64)>,
    {
        let mut x = Arrangement::empty(system, max_level, mode)?;
        for (level, path, amount) in cells {
            x.add(Cell::new(level, path), amount)?;
        }
        Ok(x)
    }

    /// Like [`Arrangement::from_cells`] with `N` set to the deepest occupied level.
    pub fn fitted<I>(system: Arc<PathSystem>, mode: Mode, cells: I) -> Result<Arrangement>
    where
        I: IntoIterator<Item = (u32, Path, f64)>,
    {
        let cells: Vec<_> = cells.into_iter().collect();
        let depth = cells.iter().map(|c| c.0).max().unwrap_or(1).max(1);
        Arrangement::from_cells(system, depth, mode, cells)
    }

    /// Convenience constructor for a built-in kind with cells named by path.
    pub fn of_kind(kind: GameKind, cells: &[(u32, &str, f64)]) -> Result<Arrangement> {
        let system = Arc::new(PathSystem::build(kind)?);
        let named = cells
            .iter()
            .map(|&(level, name, amount)| Ok((level, system.path_named(name)?, amount)))
            .collect::<Result<Vec<_>>>()?;
        Arrangement::fitted(system, Mode::Continuous, named)
    }

    fn add(&mut self, cell: Cell, amount: f64) -> Result<()> {
        if !amount.is_finite() || amount < 0.0 {
            return Err(Error::Config(format!("sand amount {amount} is not a nonnegative number")));
        }
        if !self.system.contains(cell.path) {
            return Err(Error::Config(format!("path index {} out of range", cell.path.0)));
        }
        if cell.level > self.max_level {
            return Err(Error::Config(format!(
                "level {} exceeds maxLevel {}",
                cell.level, self.max_level
            )));
        }
        if self.mode == Mode::Discrete && amount.fract() != 0.0 {
            return Err(Error::Config(format!("discrete arrangement holds fractional amount {amount}")));
        }
        if amount == 0.0 {
            return Ok(());
        }
        if cell.path == self.system.dead() {
            return Err(Error::Config("sand on the dead path".into()));
        }
        *self.sand.entry(cell).or_insert(0.0) += amount;
        Ok(())
    }

    pub fn system(&self) -> &PathSystem {
        &self.system
    }

    pub fn shared_system(&self) -> Arc<PathSystem> {
        Arc::clone(&self.system)
    }

    pub fn kind(&self) -> GameKind {
        self.system.kind()
    }

    pub fn max_level(&self) -> u32 {
        self.max_level
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn amount(&self, level: u32, path: Path) -> f64 {
        self.sand.get(&Cell::new(level, path)).copied().unwrap_or(0.0)
    }

    /// Nonzero cells in `(level, path)` order.
    pub fn cells(&self) -> impl Iterator<Item = (Cell, f64)> + '_ {
        self.sand.iter().map(|(&c, &a)| (c, a))
    }

    pub fn cell_count(&self) -> usize {
        self.sand.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sand.is_empty()
    }

    /// Deepest occupied level (0 for an empty arrangement).
    pub fn depth(&self) -> u32 {
        self.sand.keys().map(|c| c.level).max().unwrap_or(0)
    }

    pub fn norms(&self) -> Norms {
        let mut n = Norms { l1: 0.0, q: 0.0, semi12: 0.0 };
        for (cell, amount) in self.cells() {
            n.l1 += amount;
            n.q += cell.level as f64 * amount;
            if cell.level >= 2 {
                n.semi12 += amount;
            }
        }
        n
    }

    pub fn l1(&self) -> f64 {
        self.sand.values().sum()
    }

    /// Same arrangement with a different depth `N` (must cover every cell).
    pub fn with_max_level(&self, max_level: u32) -> Result<Arrangement> {
        if max_level == 0 || max_level < self.depth() {
            return Err(Error::Config(format!("maxLevel {max_level} does not cover the arrangement")));
        }
        Ok(Arrangement { max_level, ..self.clone() })
    }

    /// Componentwise `self − other`, clamped at zero.
    pub fn saturating_sub(&self, other: &Arrangement) -> Arrangement {
        let mut out = self.clone();
        for (cell, amount) in other.cells() {
            if let Some(v) = out.sand.get_mut(&cell) {
                *v -= amount;
                if *v <= 0.0 {
                    out.sand.remove(&cell);
                }
            }
        }
        out
    }

    /// Drops every cell holding less than `threshold`; returns the dropped amount.
    pub fn flush_below(&mut self, threshold: f64) -> f64 {
        let mut dropped = 0.0;
        self.sand.retain(|_, v| {
            let keep = *v >= threshold;
            if !keep {
                dropped += *v;
            }
            keep
        });
        dropped
    }

    /// ℓ1 distance between two arrangements on the same path system.
    pub fn l1_distance(&self, other: &Arrangement) -> f64 {
        let mut d = 0.0;
        for (cell, a) in self.cells() {
            d += (a - other.sand.get(&cell).copied().unwrap_or(0.0)).abs();
        }
        for (cell, b) in other.cells() {
            if !self.sand.contains_key(&cell) {
                d += b;
            }
        }
        d
    }

    /// Scaled copy; the mode becomes continuous unless `factor` keeps integers.
    pub fn scaled(&self, factor: f64) -> Arrangement {
        let mut out = self.clone();
        out.mode = Mode::Continuous;
        out.sand = self
            .sand
            .iter()
            .filter_map(|(&c, &a)| {
                let v = a * factor;
                (v > 0.0).then_some((c, v))
            })
            .collect();
        out
    }

    pub(crate) fn from_parts(
        system: Arc<PathSystem>,
        max_level: u32,
        mode: Mode,
        sand: BTreeMap<Cell, f64>,
    ) -> Arrangement {
        Arrangement { system, max_level, mode, sand }
    }
}

/// One cell of the arrangement file format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandCell {
    pub level: u32,
    pub path: String,
    pub amount: f64,
}

/// The arrangement file format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ArrangementDoc {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<u8>,
    pub max_level: u32,
    #[serde(default = "default_mode")]
    pub mode: Mode,
    #[serde(default)]
    pub sand: Vec<SandCell>,
}

fn default_mode() -> Mode {
    Mode::Continuous
}

impl ArrangementDoc {
    pub fn into_arrangement(self) -> Result<Arrangement> {
        let kind = GameKind::from_tag(&self.kind, self.r)?;
        let system = Arc::new(PathSystem::build(kind)?);
        let cells = self
            .sand
            .iter()
            .map(|c| Ok((c.level, system.path_named(&c.path)?, c.amount)))
            .collect::<Result<Vec<_>>>()?;
        Arrangement::from_cells(system, self.max_level, self.mode, cells)
    }
}

impl From<&Arrangement> for ArrangementDoc {
    fn from(x: &Arrangement) -> Self {
        let sys = x.system();
        ArrangementDoc {
            kind: x.kind().tag().to_string(),
            r: x.kind().colors(),
            max_level: x.max_level,
            mode: x.mode,
            sand: x
                .cells()
                .map(|(c, amount)| SandCell { level: c.level, path: sys.name(c.path).to_string(), amount })
                .collect(),
        }
    }
}

impl Serialize for Arrangement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ArrangementDoc::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Arrangement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        ArrangementDoc::deserialize(d)?.into_arrangement().map_err(serde::de::Error::custom)
    }
}

impl Arrangement {
    /// Canonical JSON text (cells sorted by level, then path).
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("arrangement serializes")
    }

    pub fn from_json(text: &str) -> Result<Arrangement> {
        let doc: ArrangementDoc = serde_json::from_str(text)?;
        doc.into_arrangement()
    }
}
