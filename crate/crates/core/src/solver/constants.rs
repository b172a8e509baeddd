use serde::Serialize;

use crate::error::{Error, Result};

/// Constants of the ε-optimal Pusher argument for a given `(ε, N)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Constants {
    pub epsilon: f64,
    pub n: u32,
    /// Margin keeping `p*` away from the endpoints on ε-regular arrangements.
    pub q: f64,
    /// Lipschitz constant of `x ↦ p*_x` on ε-regular arrangements.
    pub p: f64,
    /// Second-order constant: `y·w(p*_x) − e(y) ≤ C‖x−y‖²/‖x‖`.
    pub c: f64,
    /// Guaranteed step multiplier.
    pub mu: f64,
    /// Guaranteed relative decrease of `q` per regular move.
    pub delta: f64,
}

fn margin(eps: f64, n: f64) -> f64 {
    eps / (2.0 * n * n)
}

fn lipschitz(eps: f64, n: f64) -> f64 {
    3f64.sqrt() * n.powf(1.5) * margin(eps, n).powf(2.0 - n) / eps
}

fn second_order(eps: f64, n: f64) -> f64 {
    let p = lipschitz(eps, n);
    n * n * p * p
}

pub fn constants(eps: f64, n: u32) -> Result<Constants> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Config(format!("epsilon {eps} outside (0,1)")));
    }
    if n == 0 {
        return Err(Error::Config("N must be at least 1".into()));
    }
    let nf = n as f64;
    let mu = (eps / 4.0).min(eps / (4.0 * second_order(eps / 2.0, nf)));
    Ok(Constants {
        epsilon: eps,
        n,
        q: margin(eps, nf),
        p: lipschitz(eps, nf),
        c: second_order(eps, nf),
        mu,
        delta: mu / (nf * nf),
    })
}
