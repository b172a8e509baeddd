//! Painter driven by a Remover policy through the edge ↔ chip bijection.
//!
//! An edge with `i` uncolored vertices whose colored vertices put it on
//! path `m` is a chip at `(i, m)`. A new vertex runs exactly the chips of
//! its incident edges, and the color Painter gives it is the label Remover
//! answers. Chips reaching the dead path are satisfied edges; a chip
//! reaching level 0 on a live path is a violated edge.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::stream::{Hypergraph, StreamHeader, VertexEvent};
use crate::error::{Error, Result};
use crate::game::{Arrangement, Cell, GameKind, Label, Mode, MoveSplit, Path, PathSystem};
use crate::strategy::{RemoverAgent, RemoverPolicy, StrategyConfig};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub edge: String,
    pub reason: String,
}

fn violation_reason(kind: GameKind) -> &'static str {
    match kind {
        GameKind::PropertyB | GameKind::Proper(_) => "monochromatic",
        GameKind::Panchromatic(_) => "missing a color",
        GameKind::ListColoring | GameKind::Custom => "all vertices got the forbidden color",
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EdgeState {
    pub id: String,
    /// Uncolored vertices left.
    pub remaining: u32,
    pub path: Path,
}

fn start_path(sys: &PathSystem, name: Option<&str>) -> Result<Path> {
    match name {
        None => Ok(sys.start()),
        Some(n) => {
            let p = sys.path_named(n).map_err(|e| Error::Parse(e.to_string()))?;
            if p == sys.dead() {
                return Err(Error::Parse("an edge cannot start on the dead path".into()));
            }
            Ok(p)
        }
    }
}

/// On-line Painter state for one stream.
#[derive(Debug, Clone)]
pub struct Painter {
    system: Arc<PathSystem>,
    max_level: u32,
    edges: Vec<EdgeState>,
    index: HashMap<String, usize>,
    remover: RemoverAgent,
    violations: Vec<Violation>,
    colors: Vec<(String, Label)>,
}

impl Painter {
    /// One chip at `(cardinality, start path)` per declared edge.
    pub fn new(header: &StreamHeader, policy: RemoverPolicy, cfg: &StrategyConfig) -> Result<Painter> {
        header.validate()?;
        let system = Arc::new(PathSystem::build(header.kind)?);
        let mut edges = Vec::with_capacity(header.edges.len());
        let mut index = HashMap::new();
        for e in &header.edges {
            index.insert(e.id.clone(), edges.len());
            edges.push(EdgeState {
                id: e.id.clone(),
                remaining: e.size,
                path: start_path(&system, e.path.as_deref())?,
            });
        }
        let max_level = header.edges.iter().map(|e| e.size).max().unwrap_or(1).max(1);
        Ok(Painter {
            system,
            max_level,
            edges,
            index,
            remover: policy.agent(cfg),
            violations: Vec::new(),
            colors: Vec::new(),
        })
    }

    /// The chip arrangement mirroring the open edges.
    pub fn arrangement(&self) -> Arrangement {
        let dead = self.system.dead();
        let mut counts: HashMap<Cell, f64> = HashMap::new();
        for e in self.edges.iter().filter(|e| e.remaining > 0 && e.path != dead) {
            *counts.entry(Cell::new(e.remaining, e.path)).or_insert(0.0) += 1.0;
        }
        Arrangement::from_cells(
            self.system.clone(),
            self.max_level,
            Mode::Discrete,
            counts.into_iter().map(|(c, n)| (c.level, c.path, n)),
        )
        .expect("edge states form a valid arrangement")
    }

    pub fn edges(&self) -> &[EdgeState] {
        &self.edges
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    pub fn colors(&self) -> &[(String, Label)] {
        &self.colors
    }

    pub fn system(&self) -> &PathSystem {
        &self.system
    }

    /// The running part a vertex on `incident` edges represents.
    pub fn running_part(&self, event: &VertexEvent) -> Result<(Vec<usize>, MoveSplit)> {
        let dead = self.system.dead();
        let mut seen = HashSet::new();
        let mut ids = Vec::with_capacity(event.edges.len());
        let mut split = MoveSplit::new();
        for e in &event.edges {
            let &i = self.index.get(e).ok_or_else(|| Error::Stream(format!("vertex {} names unknown edge {e}", event.id)))?;
            if !seen.insert(i) {
                return Err(Error::Stream(format!("vertex {} lists edge {e} twice", event.id)));
            }
            let edge = &self.edges[i];
            if edge.remaining == 0 {
                return Err(Error::Stream(format!("vertex {} joins edge {e}, which is already complete", event.id)));
            }
            if edge.path != dead {
                split.add(Cell::new(edge.remaining, edge.path), 1.0);
            }
            ids.push(i);
        }
        Ok((ids, split))
    }

    /// Colors the next vertex.
    pub fn on_vertex(&mut self, event: &VertexEvent) -> Result<Label> {
        let (ids, split) = self.running_part(event)?;
        let label = if split.is_empty() { Label(0) } else { self.remover.respond(&self.arrangement(), &split)? };
        let dead = self.system.dead();
        for i in ids {
            let edge = &mut self.edges[i];
            edge.remaining -= 1;
            if edge.path != dead {
                edge.path = self.system.step(label, edge.path);
            }
            if edge.remaining == 0 && edge.path != dead {
                self.violations.push(Violation {
                    edge: edge.id.clone(),
                    reason: violation_reason(self.system.kind()).into(),
                });
            }
        }
        self.colors.push((event.id.clone(), label));
        Ok(label)
    }
}

/// Lists every edge the coloring fails: edges whose color sequence keeps
/// them on a live path to the end (monochromatic edges for the proper
/// families, edges missing a color for the panchromatic family).
pub fn verify_coloring(graph: &Hypergraph, colors: &HashMap<String, Label>) -> Result<Vec<Violation>> {
    let sys = PathSystem::build(graph.kind)?;
    let mut out = Vec::new();
    for e in &graph.edges {
        let mut path = start_path(&sys, e.path.as_deref())?;
        for v in &e.vertices {
            let label = *colors.get(v).ok_or_else(|| Error::IncompleteColoring(v.clone()))?;
            if !sys.has_label(label) {
                return Err(Error::InvalidMove(format!("vertex {v} has color {} outside the palette", label.number())));
            }
            path = sys.step(label, path);
        }
        if path != sys.dead() {
            out.push(Violation { edge: e.id.clone(), reason: violation_reason(graph.kind).into() });
        }
    }
    Ok(out)
}
