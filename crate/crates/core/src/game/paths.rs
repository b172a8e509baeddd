//! Path systems: the finite path set, the dead path and one total
//! transition map per move label.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest color count accepted for the `Proper` and `Panchromatic` families.
pub const MAX_COLORS: u8 = 12;

/// Index of a path inside its [`PathSystem`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Path(pub u16);

impl Path {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A move label (a transition chosen by Remover, a color chosen by Painter).
///
/// Stored zero-based; [`Label::number`] gives the one-based number used in
/// every external format (`tau: 1` is the first transition).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(pub u8);

impl Label {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn number(self) -> u32 {
        self.0 as u32 + 1
    }

    pub fn from_number(n: u32) -> Result<Label> {
        if n == 0 || n > 255 {
            return Err(Error::InvalidMove(format!("label {n} out of range")));
        }
        Ok(Label((n - 1) as u8))
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "τ{}", self.number())
    }
}

/// Game family tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GameKind {
    PropertyB,
    Proper(u8),
    Panchromatic(u8),
    ListColoring,
    Custom,
}

impl GameKind {
    /// Tag used by the arrangement file format.
    pub fn tag(self) -> &'static str {
        match self {
            GameKind::PropertyB => "property_b",
            GameKind::Proper(_) => "proper",
            GameKind::Panchromatic(_) => "panchromatic",
            GameKind::ListColoring => "list",
            GameKind::Custom => "custom",
        }
    }

    /// Color count for the simplex families.
    pub fn colors(self) -> Option<u8> {
        match self {
            GameKind::Proper(r) | GameKind::Panchromatic(r) => Some(r),
            _ => None,
        }
    }

    pub fn from_tag(tag: &str, r: Option<u8>) -> Result<GameKind> {
        let need_r = |name: &str| {
            r.ok_or_else(|| Error::Config(format!("kind {name} requires a color count r")))
        };
        match tag {
            "property_b" | "property-b" | "propertyb" => Ok(GameKind::PropertyB),
            "proper" => Ok(GameKind::Proper(need_r("proper")?)),
            "panchromatic" => Ok(GameKind::Panchromatic(need_r("panchromatic")?)),
            "list" | "list_coloring" => Ok(GameKind::ListColoring),
            other => Err(Error::Config(format!("unknown game kind {other:?}"))),
        }
    }

    /// Whether the value solver knows the weight family of this kind.
    pub fn is_builtin(self) -> bool {
        !matches!(self, GameKind::Custom)
    }

    /// One-parameter families (p ∈ [0,1]) as opposed to simplex families.
    pub fn is_scalar(self) -> bool {
        matches!(self, GameKind::PropertyB | GameKind::ListColoring)
    }
}

impl fmt::Display for GameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GameKind::Proper(r) | GameKind::Panchromatic(r) => write!(f, "{}({r})", self.tag()),
            _ => f.write_str(self.tag()),
        }
    }
}

impl std::str::FromStr for GameKind {
    type Err = Error;

    /// Parses the display form: `property_b`, `list`, `proper(3)` (also `proper:3`).
    fn from_str(s: &str) -> Result<GameKind> {
        let s = s.trim();
        let (tag, r) = match s.find(['(', ':']) {
            Some(i) => {
                let digits = s[i + 1..].trim_end_matches(')');
                let r = digits.parse::<u8>().map_err(|_| Error::Config(format!("bad color count in {s:?}")))?;
                (&s[..i], Some(r))
            }
            None => (s, None),
        };
        GameKind::from_tag(tag, r)
    }
}

impl Serialize for GameKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GameKind {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// The three roles a path plays in the two-color families: the path that
/// both colors keep alive (`path 0`, absent for list coloring) and the two
/// one-sided paths killed by the opposite color.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwoSided {
    pub both: Option<Path>,
    pub one: Path,
    pub two: Path,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSystem {
    kind: GameKind,
    names: Vec<String>,
    dead: Path,
    start: Path,
    /// `transitions[label][path]`
    transitions: Vec<Vec<Path>>,
}

impl PathSystem {
    /// Builds the path system of a built-in family.
    pub fn build(kind: GameKind) -> Result<PathSystem> {
        let check_r = |r: u8| {
            if (2..=MAX_COLORS).contains(&r) {
                Ok(r as usize)
            } else {
                Err(Error::Config(format!("color count {r} outside 2..={MAX_COLORS}")))
            }
        };
        let sys = match kind {
            GameKind::PropertyB => {
                let names = ["0", "1", "2", "dead"].map(String::from).to_vec();
                let (p0, p1, p2, dead) = (Path(0), Path(1), Path(2), Path(3));
                PathSystem {
                    kind,
                    names,
                    dead,
                    start: p0,
                    transitions: vec![vec![p1, p1, dead, dead], vec![p2, dead, p2, dead]],
                }
            }
            GameKind::ListColoring => {
                let names = ["1", "2", "dead"].map(String::from).to_vec();
                let (p1, p2, dead) = (Path(0), Path(1), Path(2));
                PathSystem {
                    kind,
                    names,
                    dead,
                    start: p1,
                    transitions: vec![vec![p1, dead, dead], vec![dead, p2, dead]],
                }
            }
            GameKind::Proper(r) => {
                let r = check_r(r)?;
                let mut names: Vec<String> = (0..=r).map(|i| i.to_string()).collect();
                names.push("dead".into());
                let dead = Path((r + 1) as u16);
                let transitions = (1..=r)
                    .map(|color| {
                        (0..=r + 1)
                            .map(|m| {
                                if m == 0 || m == color {
                                    Path(color as u16)
                                } else {
                                    dead
                                }
                            })
                            .collect()
                    })
                    .collect();
                PathSystem { kind, names, dead, start: Path(0), transitions }
            }
            GameKind::Panchromatic(r) => {
                let r = check_r(r)?;
                let size = 1usize << r;
                let names = (0..size).map(|mask| mask_name(mask as u32, r)).collect();
                let transitions = (0..r)
                    .map(|bit| (0..size).map(|m| Path((m | (1 << bit)) as u16)).collect())
                    .collect();
                PathSystem {
                    kind,
                    names,
                    dead: Path((size - 1) as u16),
                    start: Path(0),
                    transitions,
                }
            }
            GameKind::Custom => {
                return Err(Error::Config(
                    "custom path systems are built with PathSystem::custom".into(),
                ))
            }
        };
        Ok(sys)
    }

    /// A user-defined path system. `transitions[label][path]` must be total
    /// and fix the dead path.
    pub fn custom(
        names: Vec<String>,
        dead: usize,
        start: usize,
        transitions: Vec<Vec<usize>>,
    ) -> Result<PathSystem> {
        let n = names.len();
        if n < 2 || n > u16::MAX as usize {
            return Err(Error::Config("a path system needs a live path and the dead path".into()));
        }
        if dead >= n || start >= n || start == dead {
            return Err(Error::Config("dead/start path index out of range".into()));
        }
        if transitions.is_empty() || transitions.len() > 255 {
            return Err(Error::Config("between 1 and 255 transitions required".into()));
        }
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != n {
            return Err(Error::Config("path names must be unique".into()));
        }
        let mut table = Vec::with_capacity(transitions.len());
        for (label, map) in transitions.iter().enumerate() {
            if map.len() != n || map.iter().any(|&t| t >= n) {
                return Err(Error::Config(format!("transition {} is not total", label + 1)));
            }
            if map[dead] != dead {
                return Err(Error::Config(format!("transition {} revives the dead path", label + 1)));
            }
            table.push(map.iter().map(|&t| Path(t as u16)).collect());
        }
        Ok(PathSystem {
            kind: GameKind::Custom,
            names,
            dead: Path(dead as u16),
            start: Path(start as u16),
            transitions: table,
        })
    }

    pub fn kind(&self) -> GameKind {
        self.kind
    }

    pub fn dead(&self) -> Path {
        self.dead
    }

    /// Path on which a fresh (uncolored) edge starts.
    pub fn start(&self) -> Path {
        self.start
    }

    pub fn path_count(&self) -> usize {
        self.names.len()
    }

    pub fn paths(&self) -> impl Iterator<Item = Path> + '_ {
        (0..self.names.len()).map(|i| Path(i as u16))
    }

    pub fn live_paths(&self) -> impl Iterator<Item = Path> + '_ {
        let dead = self.dead;
        self.paths().filter(move |&p| p != dead)
    }

    pub fn label_count(&self) -> usize {
        self.transitions.len()
    }

    pub fn labels(&self) -> impl Iterator<Item = Label> {
        (0..self.transitions.len()).map(|i| Label(i as u8))
    }

    pub fn has_label(&self, label: Label) -> bool {
        label.index() < self.transitions.len()
    }

    /// Image of `path` under the transition `label`.
    pub fn step(&self, label: Label, path: Path) -> Path {
        self.transitions[label.index()][path.index()]
    }

    pub fn contains(&self, path: Path) -> bool {
        path.index() < self.names.len()
    }

    pub fn name(&self, path: Path) -> &str {
        &self.names[path.index()]
    }

    pub fn path_named(&self, name: &str) -> Result<Path> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| Path(i as u16))
            .ok_or_else(|| Error::Parse(format!("unknown path {name:?} for kind {}", self.kind)))
    }

    /// Role assignment for the two-color families, `None` otherwise.
    pub fn two_sided(&self) -> Option<TwoSided> {
        match self.kind {
            GameKind::PropertyB => Some(TwoSided { both: Some(Path(0)), one: Path(1), two: Path(2) }),
            GameKind::ListColoring => Some(TwoSided { both: None, one: Path(0), two: Path(1) }),
            _ => None,
        }
    }
}

/// Bitstring name of a panchromatic path: character `k` is `1` iff color
/// `k+1` has already been used.
pub fn mask_name(mask: u32, r: usize) -> String {
    (0..r).map(|bit| if mask >> bit & 1 == 1 { '1' } else { '0' }).collect()
}
