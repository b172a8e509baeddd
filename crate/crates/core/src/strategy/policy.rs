//! Policy plug-ins for both players.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::pusher::{OptimalPusher, Phase, PusherMove};
use super::remover::remover_respond;
use super::{PusherMode, StrategyConfig};
use crate::error::{Error, Result};
use crate::game::{Arrangement, Label, Mode, MoveSplit};

/// Named Pusher policies.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PusherPolicy {
    #[default]
    OptimalAdaptive,
    OptimalProof,
    AllRun,
    RandomSplit,
    GreedyHarvest,
}

impl PusherPolicy {
    pub const ALL: [PusherPolicy; 5] = [
        PusherPolicy::OptimalAdaptive,
        PusherPolicy::OptimalProof,
        PusherPolicy::AllRun,
        PusherPolicy::RandomSplit,
        PusherPolicy::GreedyHarvest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PusherPolicy::OptimalAdaptive => "optimal-adaptive",
            PusherPolicy::OptimalProof => "optimal-proof",
            PusherPolicy::AllRun => "all-run",
            PusherPolicy::RandomSplit => "random-split",
            PusherPolicy::GreedyHarvest => "greedy-harvest",
        }
    }

    pub fn agent(self, cfg: &StrategyConfig) -> PusherAgent {
        match self {
            PusherPolicy::OptimalAdaptive => {
                PusherAgent::Optimal(OptimalPusher::new(StrategyConfig { pusher_mode: PusherMode::Adaptive, ..*cfg }))
            }
            PusherPolicy::OptimalProof => {
                PusherAgent::Optimal(OptimalPusher::new(StrategyConfig { pusher_mode: PusherMode::Proof, ..*cfg }))
            }
            PusherPolicy::AllRun => PusherAgent::AllRun,
            PusherPolicy::RandomSplit => PusherAgent::RandomSplit(ChaCha8Rng::seed_from_u64(cfg.seed)),
            PusherPolicy::GreedyHarvest => PusherAgent::GreedyHarvest,
        }
    }
}

impl fmt::Display for PusherPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PusherPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<PusherPolicy> {
        PusherPolicy::ALL
            .into_iter()
            .find(|p| p.name() == s || (s == "optimal" && *p == PusherPolicy::OptimalAdaptive))
            .ok_or_else(|| Error::Config(format!("unknown pusher policy {s:?}")))
    }
}

/// A playing Pusher.
#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)] // one agent per game; boxing buys nothing
pub enum PusherAgent {
    Optimal(OptimalPusher),
    /// Runs every cell at level ≥ 1 in full.
    AllRun,
    /// Runs a uniformly random fraction of each cell (a random count of chips).
    RandomSplit(ChaCha8Rng),
    /// Runs all level-1 sand when there is some, otherwise the lowest occupied level.
    GreedyHarvest,
}

impl PusherAgent {
    pub fn respond(&mut self, x: &Arrangement) -> Result<PusherMove> {
        let experimental = |split: MoveSplit| {
            let phase = if split.is_empty() { Phase::Pass } else { Phase::Experimental { lambda: None } };
            PusherMove { split, phase }
        };
        match self {
            PusherAgent::Optimal(p) => p.respond(x),
            PusherAgent::AllRun => Ok(experimental(MoveSplit::all(x))),
            PusherAgent::RandomSplit(rng) => {
                let mut split = MoveSplit::new();
                for (cell, a) in x.cells().filter(|(c, _)| c.level >= 1) {
                    let run = match x.mode() {
                        Mode::Discrete => rng.random_range(0..=a as u64) as f64,
                        Mode::Continuous => a * rng.random::<f64>(),
                    };
                    split.add(cell, run);
                }
                Ok(experimental(split))
            }
            PusherAgent::GreedyHarvest => {
                let mut split = MoveSplit::new();
                if let Some(level) = x.cells().map(|(c, _)| c.level).filter(|&l| l >= 1).min() {
                    for (cell, a) in x.cells().filter(|(c, _)| c.level == level) {
                        split.add(cell, a);
                    }
                }
                Ok(experimental(split))
            }
        }
    }

    pub fn is_optimal(&self) -> bool {
        matches!(self, PusherAgent::Optimal(_))
    }
}

/// Named Remover policies. `FixedLabel` always answers the given label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RemoverPolicy {
    Optimal,
    UniformRandom,
    FixedLabel(#[serde(with = "label_number")] Label),
}

mod label_number {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::game::Label;

    pub fn serialize<S: Serializer>(label: &Label, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u32(label.number())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Label, D::Error> {
        Label::from_number(u32::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

impl RemoverPolicy {
    pub fn agent(self, cfg: &StrategyConfig) -> RemoverAgent {
        match self {
            RemoverPolicy::Optimal => RemoverAgent::Optimal(*cfg),
            RemoverPolicy::UniformRandom => RemoverAgent::UniformRandom(ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed)),
            RemoverPolicy::FixedLabel(label) => RemoverAgent::FixedLabel(label),
        }
    }
}

impl fmt::Display for RemoverPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RemoverPolicy::Optimal => f.write_str("optimal"),
            RemoverPolicy::UniformRandom => f.write_str("uniform-random"),
            RemoverPolicy::FixedLabel(label) => write!(f, "fixed-label:{}", label.number()),
        }
    }
}

impl FromStr for RemoverPolicy {
    type Err = Error;

    /// Accepts `optimal`, `uniform-random`, `fixed-label` (label 1) and `fixed-label:<n>`.
    fn from_str(s: &str) -> Result<RemoverPolicy> {
        match s {
            "optimal" => Ok(RemoverPolicy::Optimal),
            "uniform-random" => Ok(RemoverPolicy::UniformRandom),
            "fixed-label" => Ok(RemoverPolicy::FixedLabel(Label(0))),
            _ => {
                let n = s
                    .strip_prefix("fixed-label:")
                    .and_then(|n| n.parse::<u32>().ok())
                    .ok_or_else(|| Error::Config(format!("unknown remover policy {s:?}")))?;
                Ok(RemoverPolicy::FixedLabel(Label::from_number(n).map_err(|e| Error::Config(e.to_string()))?))
            }
        }
    }
}

/// A playing Remover.
#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum RemoverAgent {
    Optimal(StrategyConfig),
    UniformRandom(ChaCha8Rng),
    FixedLabel(Label),
}

impl RemoverAgent {
    pub fn respond(&mut self, x: &Arrangement, split: &MoveSplit) -> Result<Label> {
        match self {
            RemoverAgent::Optimal(cfg) => remover_respond(x, split, cfg),
            RemoverAgent::UniformRandom(rng) => Ok(Label(rng.random_range(0..x.system().label_count()) as u8)),
            RemoverAgent::FixedLabel(label) => {
                if x.system().has_label(*label) {
                    Ok(*label)
                } else {
                    Err(Error::InvalidMove(format!("{label} is not a transition of {}", x.kind())))
                }
            }
        }
    }

    pub fn is_optimal(&self) -> bool {
        matches!(self, RemoverAgent::Optimal(_))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policy_names_round_trip() {
        for p in PusherPolicy::ALL {
            assert_eq!(p.name().parse::<PusherPolicy>().unwrap(), p);
        }
        for r in [RemoverPolicy::Optimal, RemoverPolicy::UniformRandom, RemoverPolicy::FixedLabel(Label(1))] {
            assert_eq!(r.to_string().parse::<RemoverPolicy>().unwrap(), r);
        }
        assert!("sneaky".parse::<PusherPolicy>().is_err());
        assert!("fixed-label:0".parse::<RemoverPolicy>().is_err());
    }
}
