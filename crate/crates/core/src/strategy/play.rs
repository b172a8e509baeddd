//! The round loop with per-round auditing, and its serializable trace.

use serde::{Deserialize, Serialize, Serializer};

use super::policy::{PusherAgent, RemoverAgent};
use super::pusher::Phase;
use super::remover::remover_reply;
use super::StrategyConfig;
use crate::error::{Error, Result};
use crate::game::{apply_move, Arrangement, Cell, Label, SandCell, DUST};
use crate::solver::{constants, solve_value};
use crate::weights::ParamPoint;

pub(crate) fn label_number<S: Serializer>(label: &Label, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_u32(label.number())
}

/// Outcome of each per-round check; `None` when the check does not apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RoundAudit {
    /// `e(after) + harvested ≤ e(before)` (optimal Remover).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e_monotone: Option<bool>,
    /// `r⃗(τ)·w(p*) ≤ r·w(p*)` (optimal Remover).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observation1: Option<bool>,
    /// `e(x) − e(y) ≤ ε(q(x) − q(y))` (regular Pusher move).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eq8: Option<bool>,
    /// `q(y) ≤ (1 − δ)·q(x)` (regular Pusher move).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eq9: Option<bool>,
}

impl RoundAudit {
    pub fn passed(&self) -> bool {
        [self.e_monotone, self.observation1, self.eq8, self.eq9].iter().all(|c| c.unwrap_or(true))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RoundRecord {
    pub round: usize,
    pub before: Arrangement,
    pub split: Vec<SandCell>,
    #[serde(serialize_with = "label_number")]
    pub tau: Label,
    pub harvested: f64,
    pub destroyed: f64,
    /// `e` of the arrangement before the round (built-in kinds only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_star: Option<ParamPoint>,
    pub q: f64,
    pub pusher: Phase,
    pub audit: RoundAudit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndReason {
    /// Pusher ran nothing.
    Pass,
    /// No sand left in play.
    Exhausted,
    /// The configured round cap was reached.
    RoundLimit,
    /// A policy produced an invalid move.
    PolicyError,
}

/// Full log of one game.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Trace {
    pub initial: Arrangement,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e0: Option<f64>,
    /// Sand that already sat on a winning cell in the initial arrangement.
    pub initial_harvest: f64,
    pub rounds: Vec<RoundRecord>,
    pub total_harvested: f64,
    pub final_arrangement: Arrangement,
    pub end_reason: EndReason,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Trace {
    /// Whether every applicable audit passed in every round.
    pub fn audits_pass(&self) -> bool {
        self.rounds.iter().all(|r| r.audit.passed())
    }

    /// First round whose audit failed.
    pub fn first_failed_audit(&self) -> Option<&RoundRecord> {
        self.rounds.iter().find(|r| !r.audit.passed())
    }

    /// One JSON object per round, newline-terminated.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.rounds {
            out.push_str(&serde_json::to_string(r).expect("round serializes"));
            out.push('\n');
        }
        out
    }
}

fn value_of(x: &Arrangement, cfg: &StrategyConfig) -> Result<Option<(f64, ParamPoint)>> {
    if !x.kind().is_builtin() {
        return Ok(None);
    }
    if x.is_empty() {
        return Ok(Some((0.0, ParamPoint::center(x.kind()))));
    }
    let v = solve_value(x, cfg.solver_tol)?;
    Ok(Some((v.e, v.p_star)))
}

fn strip_level_zero(x: &Arrangement) -> (Arrangement, f64) {
    let level_zero: std::collections::BTreeMap<Cell, f64> = x.cells().filter(|(c, _)| c.level == 0).collect();
    if level_zero.is_empty() {
        return (x.clone(), 0.0);
    }
    let amount = level_zero.values().sum();
    let level_zero = Arrangement::from_parts(x.shared_system(), x.max_level(), x.mode(), level_zero);
    (x.saturating_sub(&level_zero), amount)
}

/// Plays `pusher` against `remover` from `x0`, auditing every round.
///
/// Sand already at level 0 is harvested up front, and cells that shrink
/// below `DUST·‖x0‖₁` are flushed as destroyed. The game ends when
/// Pusher passes, the sand runs out or `cfg.max_rounds` is reached. A policy
/// error ends the game and is recorded in the trace.
pub fn play(x0: &Arrangement, pusher: &mut PusherAgent, remover: &mut RemoverAgent, cfg: &StrategyConfig) -> Result<Trace> {
    cfg.validate()?;
    if x0.is_empty() {
        return Err(Error::EmptyArrangement);
    }
    let slack = cfg.audit_slack(x0.l1());
    // Cells shrunk below this fraction of the initial sand are flushed, so
    // continuous play cannot shrink a cell forever.
    let dust = DUST * x0.l1();
    let delta = if x0.kind().is_builtin() { constants(cfg.epsilon, x0.max_level())?.delta } else { 0.0 };
    let e0 = value_of(x0, cfg)?.map(|v| v.0);
    let (mut x, initial_harvest) = strip_level_zero(x0);
    let mut trace = Trace {
        initial: x0.clone(),
        e0,
        initial_harvest,
        rounds: Vec::new(),
        total_harvested: initial_harvest,
        final_arrangement: x.clone(),
        end_reason: EndReason::Exhausted,
        error: None,
    };
    let mut current = value_of(&x, cfg)?;

    loop {
        if x.is_empty() {
            trace.end_reason = EndReason::Exhausted;
            break;
        }
        if trace.rounds.len() >= cfg.max_rounds {
            trace.end_reason = EndReason::RoundLimit;
            break;
        }
        let mv = match pusher.respond(&x).and_then(|mv| Ok((mv.split.validated(&x)?, mv.phase))) {
            Ok(mv) => mv,
            Err(err) => {
                trace.end_reason = EndReason::PolicyError;
                trace.error = Some(format!("pusher: {err}"));
                break;
            }
        };
        let (split, phase) = mv;
        if split.is_empty() {
            trace.end_reason = EndReason::Pass;
            break;
        }
        let mut audit = RoundAudit::default();
        let tau = if remover.is_optimal() {
            match remover_reply(&x, &split, cfg) {
                Ok(reply) => {
                    audit.observation1 = Some(reply.shifted[reply.tau.index()] <= reply.running_potential + slack);
                    Ok(reply.tau)
                }
                Err(err) => Err(err),
            }
        } else {
            remover.respond(&x, &split)
        };
        let tau = match tau {
            Ok(t) => t,
            Err(err) => {
                trace.end_reason = EndReason::PolicyError;
                trace.error = Some(format!("remover: {err}"));
                break;
            }
        };
        let mut outcome = apply_move(&x, &split, tau)?;
        outcome.destroyed += outcome.next.flush_below(dust);
        let next_value = value_of(&outcome.next, cfg)?;
        let q_before = x.norms().q;
        let q_after = outcome.next.norms().q;
        if let (Some((e_before, _)), Some((e_after, _))) = (&current, &next_value) {
            if remover.is_optimal() {
                audit.e_monotone = Some(e_after + outcome.harvested <= e_before + slack);
            }
            if matches!(phase, Phase::Regular { .. }) {
                audit.eq8 = Some(e_before - (e_after + outcome.harvested) <= cfg.epsilon * (q_before - q_after) + slack);
                audit.eq9 = Some(q_after <= (1.0 - delta) * q_before + slack);
            }
        }
        trace.total_harvested += outcome.harvested;
        trace.rounds.push(RoundRecord {
            round: trace.rounds.len() + 1,
            before: x.clone(),
            split: split.to_cells(x.system()),
            tau,
            harvested: outcome.harvested,
            destroyed: outcome.destroyed,
            e: current.as_ref().map(|v| v.0),
            p_star: current.as_ref().map(|v| v.1.clone()),
            q: q_before,
            pusher: phase,
            audit,
        });
        x = outcome.next;
        current = next_value;
    }
    trace.final_arrangement = x;
    Ok(trace)
}
