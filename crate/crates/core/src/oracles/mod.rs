//! Independent checkers: exact chip-game search, exact panchromatic
//! enumeration, adversarial Remover search and finite differences.

mod finite_diff;
mod minimax;
mod panchromatic;
mod remover_line;

pub use finite_diff::{finite_difference_check, FiniteDifference};
pub use minimax::{
    minimax_discrete, minimax_remover_reply, DiscreteState, MinimaxSolver, Winner, MAX_CHIPS, MAX_LABELS, MAX_LEVEL,
};
pub use panchromatic::{panchromatic_fail_probability, ratio, MAX_ORACLE_COLORS, MAX_ORACLE_LEVEL};
pub use remover_line::{best_remover_line, RemoverLine, MAX_LINES};
