//! Degenerate arrangements of the two-color families and the exact ℓ1
//! distance to them.
//!
//! `D₋ = {x_{1,1} + x_{1,0} ≥ ∑ i(x_{i,2} + x_{i,0})}` (argmin `p = 0`),
//! `D₊` is its mirror image (argmin `p = 1`), and the flat set has no sand
//! at levels ≥ 2.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::profile::TwoSidedSums;
use crate::error::{Error, Result};
use crate::game::{Arrangement, Cell, Path};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Degeneracy {
    Regular,
    PositivelyDegenerate,
    NegativelyDegenerate,
    Flat,
}

impl Degeneracy {
    pub fn is_degenerate(self) -> bool {
        self != Degeneracy::Regular
    }
}

/// Which endgame applies on a degenerate arrangement: `Positive` harvests
/// side one (`p* = 1`), `Negative` harvests side two (`p* = 0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Positive,
    Negative,
}

/// Classification by the two linear inequalities; non-two-sided kinds are
/// reported as `Flat` or `Regular` only.
pub fn classify_degeneracy(x: &Arrangement) -> Degeneracy {
    let Some(s) = TwoSidedSums::of(x) else {
        let deep = x.cells().any(|(c, _)| c.level >= 2);
        return if deep { Degeneracy::Regular } else { Degeneracy::Flat };
    };
    classify_sums(&s)
}

const CLASSIFY_SLACK: f64 = 1e-13;

pub(crate) fn classify_sums(s: &TwoSidedSums) -> Degeneracy {
    if !s.has_deep_sand() {
        return Degeneracy::Flat;
    }
    // Relative slack absorbs rounding in projected arrangements.
    let slack = CLASSIFY_SLACK * (s.side_one_moment() + s.side_two_moment());
    if s.one[1] + s.both[1] + slack >= s.side_two_moment() {
        Degeneracy::NegativelyDegenerate
    } else if s.two[1] + s.both[1] + slack >= s.side_one_moment() {
        Degeneracy::PositivelyDegenerate
    } else {
        Degeneracy::Regular
    }
}

/// Nearest degenerate arrangement and its distance.
#[derive(Debug, Clone)]
pub struct Projection {
    pub distance: f64,
    pub target: Arrangement,
    /// `None` when the nearest point is flat (either endgame applies).
    pub side: Option<Side>,
}

/// Removes sand from the cells with the largest coefficients first until the
/// halfspace inequality holds. With a single linear constraint and unit ℓ1
/// costs this greedy order is optimal, and removals alone always suffice
/// because zeroing every removable cell satisfies the inequality.
fn halfspace_projection(x: &Arrangement, s: &TwoSidedSums, side: Side) -> (f64, BTreeMap<Cell, f64>) {
    let roles = x.system().two_sided().expect("two-sided kind");
    // Side::Negative targets D₋: shrink side-two moment toward x_{1,1} + x_{1,0}.
    let (light, slack) = match side {
        Side::Negative => (roles.two, s.one[1] + s.both[1]),
        Side::Positive => (roles.one, s.two[1] + s.both[1]),
    };
    let moment = match side {
        Side::Negative => s.side_two_moment(),
        Side::Positive => s.side_one_moment(),
    };
    let mut violation = moment - slack;
    let mut removed = BTreeMap::new();
    let mut cost = 0.0;
    if violation <= 0.0 {
        return (0.0, removed);
    }
    // Coefficient of x_{i,light} is i; of x_{i,0} is i for i ≥ 2 and 0 at level 1.
    let mut candidates: Vec<(u32, Path)> = Vec::new();
    for level in (1..=s.depth() as u32).rev() {
        candidates.push((level, light));
        if level >= 2 {
            if let Some(both) = roles.both {
                candidates.push((level, both));
            }
        }
    }
    for (level, path) in candidates {
        if violation <= 0.0 {
            break;
        }
        let have = x.amount(level, path);
        if have <= 0.0 {
            continue;
        }
        let coef = level as f64;
        let take = have.min(violation / coef);
        cost += take;
        violation -= coef * take;
        removed.insert(Cell::new(level, path), take);
    }
    (cost, removed)
}

fn flat_projection(x: &Arrangement) -> (f64, BTreeMap<Cell, f64>) {
    let removed: BTreeMap<Cell, f64> = x.cells().filter(|(c, _)| c.level >= 2).collect();
    (removed.values().sum(), removed)
}

/// The ℓ1-nearest degenerate arrangement (two-color families only).
pub fn project_to_degenerate(x: &Arrangement) -> Result<Projection> {
    let s = TwoSidedSums::of(x).ok_or_else(|| {
        Error::UnsupportedKind(format!("degenerate geometry is defined for two-color kinds, not {}", x.kind()))
    })?;
    let candidates = [
        (Some(Side::Negative), halfspace_projection(x, &s, Side::Negative)),
        (Some(Side::Positive), halfspace_projection(x, &s, Side::Positive)),
        (None, flat_projection(x)),
    ];
    let (side, (distance, removed)) = candidates
        .into_iter()
        .min_by(|a, b| a.1 .0.total_cmp(&b.1 .0))
        .expect("three candidates");
    let mut sand: BTreeMap<Cell, f64> = x.cells().collect();
    for (cell, take) in removed {
        if let Some(v) = sand.get_mut(&cell) {
            *v -= take;
            if *v <= 0.0 {
                sand.remove(&cell);
            }
        }
    }
    let target = Arrangement::from_parts(x.shared_system(), x.max_level(), x.mode(), sand);
    Ok(Projection { distance, target, side })
}

/// `ρ(x, D)`: ℓ1 distance to the nearest degenerate arrangement.
pub fn distance_to_degenerate(x: &Arrangement) -> Result<f64> {
    Ok(project_to_degenerate(x)?.distance)
}

/// `ρ(x, D) ≤ ε‖x‖₁`.
pub fn is_eps_degenerate(x: &Arrangement, eps: f64) -> Result<bool> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Config(format!("epsilon {eps} outside (0,1)")));
    }
    Ok(distance_to_degenerate(x)? <= eps * x.l1())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::GameKind;

    fn pb(cells: &[(u32, &str, f64)]) -> Arrangement {
        Arrangement::of_kind(GameKind::PropertyB, cells).unwrap()
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify_degeneracy(&pb(&[(1, "1", 5.0), (2, "2", 1.0)])), Degeneracy::NegativelyDegenerate);
        assert_eq!(classify_degeneracy(&pb(&[(2, "1", 1.0), (2, "2", 1.0)])), Degeneracy::Regular);
        assert_eq!(classify_degeneracy(&pb(&[(1, "1", 1.0), (1, "2", 1.0)])), Degeneracy::Flat);
        assert_eq!(classify_degeneracy(&pb(&[(1, "2", 5.0), (2, "1", 1.0)])), Degeneracy::PositivelyDegenerate);
    }

    #[test]
    fn other_kinds_report_flat_or_regular() {
        let x = Arrangement::of_kind(GameKind::Proper(3), &[(1, "1", 5.0), (2, "2", 1.0)]).unwrap();
        assert_eq!(classify_degeneracy(&x), Degeneracy::Regular);
        let x = Arrangement::of_kind(GameKind::Proper(3), &[(1, "1", 5.0)]).unwrap();
        assert_eq!(classify_degeneracy(&x), Degeneracy::Flat);
        assert!(distance_to_degenerate(&x).is_err());
    }

    #[test]
    fn distance_examples() {
        let x = pb(&[(2, "1", 1.0), (2, "2", 1.0)]);
        assert!((distance_to_degenerate(&x).unwrap() - 1.0).abs() < 1e-15);
        assert!(is_eps_degenerate(&x, 0.6).unwrap());
        assert!(!is_eps_degenerate(&x, 0.4).unwrap());

        // Removing the whole level-3 column fixes D₋ at cost 4 (12 / 3).
        let x = pb(&[(3, "0", 4.0)]);
        assert!((distance_to_degenerate(&x).unwrap() - 4.0).abs() < 1e-15);

        let x = pb(&[(1, "1", 5.0), (2, "2", 1.0)]);
        assert_eq!(distance_to_degenerate(&x).unwrap(), 0.0);
        assert!(is_eps_degenerate(&x, 1e-6).unwrap());
    }

    #[test]
    fn projection_is_degenerate_and_below_x() {
        let x = pb(&[(2, "1", 1.0), (3, "2", 0.7), (1, "1", 0.2), (2, "0", 0.4)]);
        let proj = project_to_degenerate(&x).unwrap();
        assert!(classify_degeneracy(&proj.target).is_degenerate());
        assert!((x.l1_distance(&proj.target) - proj.distance).abs() < 1e-12);
        for (cell, a) in proj.target.cells() {
            assert!(a <= x.amount(cell.level, cell.path));
        }
    }
}
