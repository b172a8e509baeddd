//! Game values `e(x) = min_p x·w(p)`, the minimizer `p*`, the degeneracy
//! geometry of the two-color families and the strategy constants.

mod constants;
mod degenerate;
pub(crate) mod profile;
mod simplex;

use serde::{Deserialize, Serialize};

pub use constants::{constants, Constants};
pub use degenerate::{
    classify_degeneracy, distance_to_degenerate, is_eps_degenerate, project_to_degenerate, Degeneracy, Projection,
    Side,
};
pub use profile::TwoSidedSums;
pub use simplex::GRID_MAX_COLORS;

use crate::error::{Error, Result};
use crate::game::{Arrangement, GameKind};
use crate::weights::ParamPoint;
use profile::Profile;

/// Width of the bracketing interval at which the scalar search stops.
const SCALAR_BRACKET: f64 = 1e-12;
const MAX_SCALAR_STEPS: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ValueResult {
    pub e: f64,
    pub p_star: ParamPoint,
    pub degeneracy: Degeneracy,
    pub iterations: usize,
}

/// Computes `e(x)` and `p*_x` with `|e − min| ≤ tol·‖x‖₁`.
pub fn solve_value(x: &Arrangement, tol: f64) -> Result<ValueResult> {
    if !(tol > 0.0 && tol <= 1e-3) {
        return Err(Error::Config(format!("tolerance {tol} outside (0, 1e-3]")));
    }
    if !x.kind().is_builtin() {
        return Err(Error::UnsupportedKind(format!("no weight family for {} systems", x.kind())));
    }
    if x.is_empty() {
        return Err(Error::EmptyArrangement);
    }
    let profile = Profile::of(x);
    let degeneracy = classify_degeneracy(x);
    match x.kind() {
        GameKind::PropertyB | GameKind::ListColoring => Ok(solve_scalar(&profile, degeneracy)),
        _ => Ok(solve_simplex(&profile, degeneracy, tol * x.l1())),
    }
}

fn scalar_result(profile: &Profile, p: f64, degeneracy: Degeneracy, iterations: usize) -> ValueResult {
    let e = profile.value(&[p]).max(0.0);
    ValueResult { e, p_star: ParamPoint::raw(vec![p]), degeneracy, iterations }
}

fn solve_scalar(profile: &Profile, degeneracy: Degeneracy) -> ValueResult {
    let mut g = [0.0];
    match degeneracy {
        Degeneracy::NegativelyDegenerate => scalar_result(profile, 0.0, degeneracy, 0),
        Degeneracy::PositivelyDegenerate => scalar_result(profile, 1.0, degeneracy, 0),
        Degeneracy::Flat => {
            // Affine in p: slope h is constant. A constant potential reports
            // the midpoint, which is also the symmetric minimizer.
            profile.gradient(&[0.5], &mut g);
            let p = if g[0] > 0.0 {
                0.0
            } else if g[0] < 0.0 {
                1.0
            } else {
                0.5
            };
            scalar_result(profile, p, degeneracy, 0)
        }
        Degeneracy::Regular => {
            // h(0) < 0 < h(1) and h is strictly increasing: safeguarded Newton.
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            let mut p = 0.5;
            let mut steps = 0;
            while hi - lo > SCALAR_BRACKET && steps < MAX_SCALAR_STEPS {
                steps += 1;
                profile.gradient(&[p], &mut g);
                let hp = g[0];
                if hp == 0.0 {
                    break;
                }
                if hp < 0.0 {
                    lo = p;
                } else {
                    hi = p;
                }
                let curv = profile.curvature(p);
                let newton = if curv > 0.0 { p - hp / curv } else { f64::NAN };
                if newton > lo && newton < hi {
                    let converged = (newton - p).abs() <= SCALAR_BRACKET * 1e-3;
                    p = newton;
                    if converged {
                        break;
                    }
                } else {
                    p = 0.5 * (lo + hi);
                }
            }
            scalar_result(profile, p.clamp(0.0, 1.0), degeneracy, steps)
        }
    }
}

fn solve_simplex(profile: &Profile, degeneracy: Degeneracy, tol_abs: f64) -> ValueResult {
    let r = profile.dimension();
    if degeneracy == Degeneracy::Flat {
        // Affine objective: minimized at the vertex of the smallest gradient
        // entry; the uniform point when all entries agree.
        let mut g = vec![0.0; r];
        profile.gradient(&vec![1.0 / r as f64; r], &mut g);
        let gmin = g.iter().copied().fold(f64::INFINITY, f64::min);
        let gmax = g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let p = if gmax - gmin <= tol_abs {
            vec![1.0 / r as f64; r]
        } else {
            let k = g.iter().position(|v| *v == gmin).expect("nonempty");
            let mut p = vec![0.0; r];
            p[k] = 1.0;
            p
        };
        let e = profile.value(&p).max(0.0);
        return ValueResult { e, p_star: ParamPoint::raw(p), degeneracy, iterations: 0 };
    }
    let best = simplex::minimize(profile, tol_abs);
    ValueResult {
        e: best.value.max(0.0),
        p_star: ParamPoint::raw(best.point),
        degeneracy,
        iterations: best.iterations,
    }
}

/// Value with the default tolerance used by the strategies.
pub fn value(x: &Arrangement) -> Result<f64> {
    if x.is_empty() {
        return Ok(0.0);
    }
    Ok(solve_value(x, DEFAULT_TOL)?.e)
}

pub const DEFAULT_TOL: f64 = 1e-10;
