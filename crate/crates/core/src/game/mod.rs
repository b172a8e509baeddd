//! Path systems, arrangements and the single-round move semantics.

mod arrangement;
mod moves;
mod paths;

pub use arrangement::{Arrangement, ArrangementDoc, Cell, Mode, Norms, SandCell};
pub use moves::{apply_move, MoveOutcome, MoveSplit, DUST};
pub use paths::{mask_name, GameKind, Label, Path, PathSystem, TwoSided, MAX_COLORS};
