//! Gold sand and chip game engine: path systems and moves, weight families,
//! exact game values, both players' strategies, verification oracles and the
//! on-line hypergraph coloring adapter.

pub mod coloring;
pub mod error;
pub mod game;
pub mod oracles;
pub mod solver;
pub mod strategy;
pub mod weights;

pub use error::{Error, Result};
pub use game::{
    apply_move, Arrangement, ArrangementDoc, Cell, GameKind, Label, Mode, MoveOutcome, MoveSplit, Norms, Path,
    PathSystem, SandCell,
};
pub use solver::{solve_value, Constants, Degeneracy, ValueResult};
pub use weights::{ParamPoint, WeightFamily};
