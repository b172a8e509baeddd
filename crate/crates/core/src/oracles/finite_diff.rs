//! Finite-difference cross-check of the analytic derivative `h(x, p)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::Arrangement;
use crate::solver::profile::Profile;
use crate::weights::{h, Gradient, ParamPoint};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FiniteDifference {
    /// Largest `|h − centered difference|` over the coordinates of `p`.
    pub deviation: f64,
    /// `f(p+s) − 2f(p) + f(p−s)` for the scalar families (convexity check).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub second_difference: Option<f64>,
}

/// Compares `h(x, p)` with centered differences of the potential at `p`.
/// For simplex families every coordinate is perturbed on its own, matching
/// the Euclidean gradient that `h` returns.
pub fn finite_difference_check(x: &Arrangement, p: &ParamPoint, step: f64) -> Result<FiniteDifference> {
    if !(1e-8..=1e-4).contains(&step) {
        return Err(Error::Config(format!("step {step} outside [1e-8, 1e-4]")));
    }
    if p.values().iter().any(|&v| v - step < 0.0 || v + step > 1.0) {
        return Err(Error::Precondition("p must lie at least one step inside the parameter range".into()));
    }
    let analytic = match h(x, p)? {
        Gradient::Scalar(v) => vec![v],
        Gradient::Vector(v) => v,
    };
    let profile = Profile::of(x);
    let base = p.values().to_vec();
    let mut deviation: f64 = 0.0;
    let mut probe = base.clone();
    for (k, g) in analytic.iter().enumerate() {
        probe[k] = base[k] + step;
        let up = profile.value(&probe);
        probe[k] = base[k] - step;
        let down = profile.value(&probe);
        probe[k] = base[k];
        deviation = deviation.max((g - (up - down) / (2.0 * step)).abs());
    }
    let second_difference = p.is_scalar().then(|| {
        profile.value(&[base[0] + step]) - 2.0 * profile.value(&base) + profile.value(&[base[0] - step])
    });
    Ok(FiniteDifference { deviation, second_difference })
}
