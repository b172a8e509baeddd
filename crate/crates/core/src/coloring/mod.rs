//! On-line hypergraph coloring through the chip game: stream format,
//! Painter, coloring verifier and a Presenter adversary.

mod adversary;
mod painter;
mod stream;

pub use adversary::{presenter_adversary, AdversaryReport, ADVERSARY_BUDGET};
pub use painter::{verify_coloring, EdgeState, Painter, Violation};
pub use stream::{random_stream, EdgeDecl, HyperEdge, Hypergraph, Stream, StreamHeader, VertexEvent};
