//! The line-based on-line coloring stream format.
//!
//! ```text
//! kind property_b          (optional; r follows for proper/panchromatic)
//! edge e1 3                (id, cardinality, optional starting path)
//! vertex v1 e1 e2          (id, incident edge ids)
//! end
//! ```

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::GameKind;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeDecl {
    pub id: String,
    pub size: u32,
    /// Starting path name; the kind's start path when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamHeader {
    pub kind: GameKind,
    pub edges: Vec<EdgeDecl>,
}

impl StreamHeader {
    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for e in &self.edges {
            if e.size == 0 {
                return Err(Error::Parse(format!("edge {} has cardinality 0", e.id)));
            }
            if !seen.insert(e.id.as_str()) {
                return Err(Error::Parse(format!("edge {} declared twice", e.id)));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexEvent {
    pub id: String,
    pub edges: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stream {
    pub header: StreamHeader,
    pub events: Vec<VertexEvent>,
}

fn parse_kind(tokens: &[&str]) -> Result<GameKind> {
    let r = match tokens.get(1) {
        Some(r) => Some(r.parse::<u8>().map_err(|_| Error::Parse(format!("bad color count {r:?}")))?),
        None => None,
    };
    GameKind::from_tag(tokens[0], r).map_err(|e| Error::Parse(e.to_string()))
}

impl Stream {
    /// Parses a stream. `kind` is used when the text has no `kind` line; a
    /// `kind` line that disagrees with a given `kind` is an error.
    pub fn parse(text: &str, kind: Option<GameKind>) -> Result<Stream> {
        let mut declared_kind = None;
        let mut edges = Vec::new();
        let mut events = Vec::new();
        let mut ended = false;
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if ended {
                return Err(Error::Parse(format!("line {}: content after end", n + 1)));
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            match tokens[0] {
                "kind" if tokens.len() >= 2 && edges.is_empty() && events.is_empty() => {
                    declared_kind = Some(parse_kind(&tokens[1..])?);
                }
                "edge" if events.is_empty() => {
                    if !(3..=4).contains(&tokens.len()) {
                        return Err(Error::Parse(format!("line {}: expected `edge <id> <size> [path]`", n + 1)));
                    }
                    let size = tokens[2]
                        .parse::<u32>()
                        .map_err(|_| Error::Parse(format!("line {}: bad cardinality {:?}", n + 1, tokens[2])))?;
                    edges.push(EdgeDecl {
                        id: tokens[1].to_string(),
                        size,
                        path: tokens.get(3).map(|p| p.to_string()),
                    });
                }
                "vertex" if tokens.len() >= 2 => events.push(VertexEvent {
                    id: tokens[1].to_string(),
                    edges: tokens[2..].iter().map(|t| t.to_string()).collect(),
                }),
                "end" if tokens.len() == 1 => ended = true,
                _ => return Err(Error::Parse(format!("line {}: unexpected {line:?}", n + 1))),
            }
        }
        let kind = match (declared_kind, kind) {
            (Some(a), Some(b)) if a != b => {
                return Err(Error::Parse(format!("stream declares kind {a} but {b} was requested")))
            }
            (Some(k), _) | (None, Some(k)) => k,
            (None, None) => return Err(Error::Parse("stream does not name its kind".into())),
        };
        let header = StreamHeader { kind, edges };
        header.validate()?;
        Ok(Stream { header, events })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let kind = self.header.kind;
        match kind.colors() {
            Some(r) => writeln!(out, "kind {} {r}", kind.tag()),
            None => writeln!(out, "kind {}", kind.tag()),
        }
        .expect("writing to a string");
        for e in &self.header.edges {
            match &e.path {
                Some(p) => writeln!(out, "edge {} {} {p}", e.id, e.size),
                None => writeln!(out, "edge {} {}", e.id, e.size),
            }
            .expect("writing to a string");
        }
        for v in &self.events {
            let mut line = format!("vertex {}", v.id);
            for e in &v.edges {
                line.push(' ');
                line.push_str(e);
            }
            out.push_str(&line);
            out.push('\n');
        }
        out.push_str("end\n");
        out
    }

    /// The hypergraph the stream describes: each edge's vertices in arrival order.
    pub fn hypergraph(&self) -> Hypergraph {
        let mut members: HashMap<&str, Vec<String>> = HashMap::new();
        for v in &self.events {
            for e in &v.edges {
                members.entry(e.as_str()).or_default().push(v.id.clone());
            }
        }
        Hypergraph {
            kind: self.header.kind,
            edges: self
                .header
                .edges
                .iter()
                .map(|e| HyperEdge {
                    id: e.id.clone(),
                    path: e.path.clone(),
                    vertices: members.remove(e.id.as_str()).unwrap_or_default(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperEdge {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    pub vertices: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypergraph {
    pub kind: GameKind,
    pub edges: Vec<HyperEdge>,
}

/// `m` edges of cardinality `k` revealed in random order: every vertex joins
/// a random nonempty subset of the edges that still miss vertices.
pub fn random_stream<R: Rng>(kind: GameKind, k: u32, m: usize, rng: &mut R) -> Stream {
    let edges: Vec<EdgeDecl> =
        (1..=m).map(|i| EdgeDecl { id: format!("e{i}"), size: k, path: None }).collect();
    let mut remaining = vec![k; m];
    let mut events = Vec::new();
    while remaining.iter().any(|&r| r > 0) {
        let open: Vec<usize> = (0..m).filter(|&i| remaining[i] > 0).collect();
        let mut chosen: Vec<usize> = open.iter().copied().filter(|_| rng.random_bool(0.5)).collect();
        if chosen.is_empty() {
            chosen.push(open[rng.random_range(0..open.len())]);
        }
        for &i in &chosen {
            remaining[i] -= 1;
        }
        events.push(VertexEvent {
            id: format!("v{}", events.len() + 1),
            edges: chosen.iter().map(|&i| edges[i].id.clone()).collect(),
        });
    }
    Stream { header: StreamHeader { kind, edges }, events }
}
