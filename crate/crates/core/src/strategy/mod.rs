//! Both players' strategies, pluggable policies and the audited round loop.

mod play;
mod policy;
mod pusher;
mod remover;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use play::{play, EndReason, RoundAudit, RoundRecord, Trace};
pub use policy::{PusherAgent, PusherPolicy, RemoverAgent, RemoverPolicy};
pub use pusher::{
    pusher_direction, pusher_move_degenerate, pusher_move_regular, EndgameScalars, OptimalPusher, Phase, PusherMove,
};
pub use remover::{remover_respond, remover_reply, RemoverReply};

/// How the optimal Pusher sizes its regular moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum PusherMode {
    /// Exactly `μ·d`, the step the analysis guarantees.
    Proof,
    /// The largest `λ·d`, `λ ∈ {1, 1/2, …} ∩ [μ, 1]`, passing the per-move check.
    #[default]
    Adaptive,
}

impl std::str::FromStr for PusherMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<PusherMode> {
        match s {
            "proof" => Ok(PusherMode::Proof),
            "adaptive" => Ok(PusherMode::Adaptive),
            other => Err(Error::Config(format!("unknown pusher mode {other:?} (expected adaptive or proof)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct StrategyConfig {
    pub epsilon: f64,
    pub pusher_mode: PusherMode,
    /// Relative tolerance handed to the value solver.
    pub solver_tol: f64,
    /// Audit slack, relative to `‖x₀‖₁` (absolute when `‖x₀‖₁ < 1`).
    pub audit_tol: f64,
    pub max_rounds: usize,
    /// Seed for the randomized policies.
    pub seed: u64,
}

impl Default for StrategyConfig {
    fn default() -> Self {
        StrategyConfig {
            epsilon: 0.01,
            pusher_mode: PusherMode::Adaptive,
            solver_tol: 1e-10,
            audit_tol: 1e-9,
            max_rounds: 10_000,
            seed: 0,
        }
    }
}

impl StrategyConfig {
    pub fn with_epsilon(epsilon: f64) -> StrategyConfig {
        StrategyConfig { epsilon, ..StrategyConfig::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Config(format!("epsilon {} outside (0,1)", self.epsilon)));
        }
        if !(self.solver_tol > 0.0 && self.solver_tol <= 1e-3) {
            return Err(Error::Config(format!("solver tolerance {} outside (0, 1e-3]", self.solver_tol)));
        }
        if self.audit_tol.is_nan() || self.audit_tol <= 0.0 {
            return Err(Error::Config("audit tolerance must be positive".into()));
        }
        if self.max_rounds == 0 {
            return Err(Error::Config("maxRounds must be positive".into()));
        }
        Ok(())
    }

    /// Absolute audit slack for a game started from total mass `l1`.
    pub fn audit_slack(&self, l1: f64) -> f64 {
        self.audit_tol * l1.max(1.0)
    }
}
