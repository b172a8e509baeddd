//! Exhaustive search over Remover's opening replies against a fixed Pusher.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{apply_move, Arrangement, Label, DUST};
use crate::strategy::{remover_respond, PusherAgent, StrategyConfig};

/// Largest number of label sequences the search will enumerate.
pub const MAX_LINES: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RemoverLine {
    /// Smallest total harvest over all opening sequences.
    pub min_harvest: f64,
    /// Opening labels (one-based) reaching it.
    pub labels: Vec<u32>,
    /// Number of leaves continued with the optimal Remover.
    pub leaves: usize,
}

/// Minimum total harvest over every Remover label sequence of length at
/// most `horizon` against the deterministic `pusher`, each line finished by
/// the optimal Remover.
pub fn best_remover_line(x: &Arrangement, pusher: &PusherAgent, horizon: u32, cfg: &StrategyConfig) -> Result<RemoverLine> {
    cfg.validate()?;
    if matches!(pusher, PusherAgent::RandomSplit(_)) {
        return Err(Error::Config("the search needs a deterministic Pusher".into()));
    }
    let labels = x.system().label_count() as u64;
    if labels.checked_pow(horizon).is_none_or(|n| n > MAX_LINES) {
        return Err(Error::Inconclusive(format!("{labels}^{horizon} lines exceed the bound of {MAX_LINES}")));
    }
    let level_zero: f64 = x.cells().filter(|(c, _)| c.level == 0).map(|(_, a)| a).sum();
    let mut search = Search { cfg, leaves: 0, dust: DUST * x.l1() };
    let mut path = Vec::new();
    let (best, line) = search.descend(x.clone(), pusher.clone(), horizon, &mut path)?;
    Ok(RemoverLine { min_harvest: best + level_zero, labels: line, leaves: search.leaves })
}

struct Search<'a> {
    cfg: &'a StrategyConfig,
    leaves: usize,
    dust: f64,
}

impl Search<'_> {
    fn descend(
        &mut self,
        x: Arrangement,
        mut pusher: PusherAgent,
        depth: u32,
        path: &mut Vec<u32>,
    ) -> Result<(f64, Vec<u32>)> {
        if depth == 0 {
            self.leaves += 1;
            return Ok((self.finish(x, pusher)?, path.clone()));
        }
        let mv = pusher.respond(&x)?;
        if mv.split.is_empty() || x.is_empty() {
            self.leaves += 1;
            return Ok((0.0, path.clone()));
        }
        let mut best: Option<(f64, Vec<u32>)> = None;
        for label in x.system().labels() {
            let mut out = apply_move(&x, &mv.split, label)?;
            out.next.flush_below(self.dust);
            path.push(label.number());
            let (rest, line) = self.descend(out.next, pusher.clone(), depth - 1, path)?;
            path.pop();
            let total = out.harvested + rest;
            if best.as_ref().is_none_or(|b| total < b.0) {
                best = Some((total, line));
            }
        }
        Ok(best.expect("at least one label"))
    }

    /// Harvest of the rest of the game against the optimal Remover.
    fn finish(&mut self, mut x: Arrangement, mut pusher: PusherAgent) -> Result<f64> {
        let mut total = 0.0;
        for _ in 0..self.cfg.max_rounds {
            if x.is_empty() {
                break;
            }
            let mv = pusher.respond(&x)?;
            if mv.split.is_empty() {
                break;
            }
            let tau: Label = remover_respond(&x, &mv.split, self.cfg)?;
            let mut out = apply_move(&x, &mv.split, tau)?;
            out.next.flush_below(self.dust);
            total += out.harvested;
            x = out.next;
        }
        Ok(total)
    }
}
