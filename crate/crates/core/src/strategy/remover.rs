//! Remover's optimal strategy: answer with the transition that does not
//! raise the potential of the running part at `p*` of the current arrangement.

use serde::Serialize;

use super::StrategyConfig;
use crate::error::Result;
use crate::game::{Arrangement, Label, MoveSplit};
use crate::solver::solve_value;
use crate::weights::{potential, shifted_potential, ParamPoint};

/// Relative margin under which two shifted potentials count as tied.
const TIE_MARGIN: f64 = 1e-12;

/// The optimal reply together with the quantities that justify it.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RemoverReply {
    #[serde(serialize_with = "crate::strategy::play::label_number")]
    pub tau: Label,
    pub p_star: ParamPoint,
    /// `r·w(p*)` for the running part `r`.
    pub running_potential: f64,
    /// `r⃗(τ)·w(p*)` for every label, in label order.
    pub shifted: Vec<f64>,
}

/// Computes the optimal reply to `split` on `x`.
///
/// For the scalar families an endpoint minimizer fixes the reply (`p* = 0`
/// answers τ2, `p* = 1` answers τ1). Otherwise the label with the smallest
/// shifted potential at `p*` wins, ties going to the smallest label.
pub fn remover_reply(x: &Arrangement, split: &MoveSplit, cfg: &StrategyConfig) -> Result<RemoverReply> {
    let split = split.validated(x)?;
    let running = split.as_arrangement(x);
    let p_star = if x.is_empty() {
        ParamPoint::center(x.kind())
    } else {
        solve_value(x, cfg.solver_tol)?.p_star
    };
    let running_potential = potential(&running, &p_star)?;
    let shifted = x
        .system()
        .labels()
        .map(|tau| shifted_potential(&running, tau, &p_star))
        .collect::<Result<Vec<_>>>()?;

    let tau = if p_star.is_scalar() && p_star.first() == 0.0 {
        Label(1)
    } else if p_star.is_scalar() && p_star.first() == 1.0 {
        Label(0)
    } else {
        let margin = TIE_MARGIN * running.l1().max(1.0);
        let mut best = 0;
        for (k, v) in shifted.iter().enumerate().skip(1) {
            if *v < shifted[best] - margin {
                best = k;
            }
        }
        Label(best as u8)
    };
    Ok(RemoverReply { tau, p_star, running_potential, shifted })
}

/// The optimal Remover's label for `split` on `x`.
pub fn remover_respond(x: &Arrangement, split: &MoveSplit, cfg: &StrategyConfig) -> Result<Label> {
    Ok(remover_reply(x, split, cfg)?.tau)
}
