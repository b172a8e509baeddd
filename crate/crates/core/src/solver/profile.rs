//! Arrangements compiled into polynomial objectives in `p`.
//!
//! These evaluate the same potential as [`crate::weights::potential`] but
//! aggregate the sand by level first, so one evaluation costs `O(N)` for the
//! two-sided and proper families and `O(N·2^r)` for the panchromatic family.

use crate::game::{Arrangement, GameKind};

/// Per-level sums for the two-color families: `ones[i] = x_{i,1} + x_{i,0}`
/// and `twos[i] = x_{i,2} + x_{i,0}`; the raw columns are kept for the
/// degeneracy geometry.
#[derive(Debug, Clone)]
pub struct TwoSidedSums {
    pub both: Vec<f64>,
    pub one: Vec<f64>,
    pub two: Vec<f64>,
    pub level_zero: f64,
}

impl TwoSidedSums {
    pub fn of(x: &Arrangement) -> Option<TwoSidedSums> {
        let roles = x.system().two_sided()?;
        let n = x.max_level() as usize;
        let mut sums =
            TwoSidedSums { both: vec![0.0; n + 1], one: vec![0.0; n + 1], two: vec![0.0; n + 1], level_zero: 0.0 };
        for (cell, a) in x.cells() {
            if cell.level == 0 {
                sums.level_zero += a;
                continue;
            }
            let i = cell.level as usize;
            if Some(cell.path) == roles.both {
                sums.both[i] += a;
            } else if cell.path == roles.one {
                sums.one[i] += a;
            } else if cell.path == roles.two {
                sums.two[i] += a;
            }
        }
        Some(sums)
    }

    pub fn depth(&self) -> usize {
        self.one.len() - 1
    }

    /// `∑ (x_{i,1} + x_{i,0})` over levels ≥ 1.
    pub fn side_one_mass(&self) -> f64 {
        (1..=self.depth()).map(|i| self.one[i] + self.both[i]).sum()
    }

    pub fn side_two_mass(&self) -> f64 {
        (1..=self.depth()).map(|i| self.two[i] + self.both[i]).sum()
    }

    /// `∑ i·(x_{i,1} + x_{i,0})`.
    pub fn side_one_moment(&self) -> f64 {
        (1..=self.depth()).map(|i| i as f64 * (self.one[i] + self.both[i])).sum()
    }

    pub fn side_two_moment(&self) -> f64 {
        (1..=self.depth()).map(|i| i as f64 * (self.two[i] + self.both[i])).sum()
    }

    pub fn has_deep_sand(&self) -> bool {
        (2..=self.depth()).any(|i| self.one[i] > 0.0 || self.two[i] > 0.0 || self.both[i] > 0.0)
    }
}

#[derive(Debug, Clone)]
pub(crate) enum Profile {
    /// `base + ∑_{i≥1} a_i p^i + b_i (1−p)^i`
    TwoSided { base: f64, a: Vec<f64>, b: Vec<f64> },
    /// `base + ∑_k ∑_{i≥1} c_{k,i} p_k^i`
    Proper { base: f64, coef: Vec<Vec<f64>> },
    /// `base + ∑_M sign(M) ∑_{i≥1} c_{M,i} S(M)^i` over masks `M ≠ full`.
    Panchromatic { base: f64, r: usize, terms: Vec<(u32, f64, Vec<f64>)> },
}

fn poly(coef: &[f64], t: f64) -> f64 {
    // coef[0] is unused (level 0 lives in `base`).
    let mut acc = 0.0;
    for c in coef[1..].iter().rev() {
        acc = acc * t + c;
    }
    acc * t
}

fn poly_deriv(coef: &[f64], t: f64) -> f64 {
    let mut acc = 0.0;
    for (i, c) in coef.iter().enumerate().skip(1).rev() {
        acc = acc * t + i as f64 * c;
    }
    acc
}

fn poly_second(coef: &[f64], t: f64) -> f64 {
    let mut acc = 0.0;
    for (i, c) in coef.iter().enumerate().skip(2).rev() {
        acc = acc * t + (i * (i - 1)) as f64 * c;
    }
    acc
}

impl Profile {
    pub fn of(x: &Arrangement) -> Profile {
        let n = x.max_level() as usize;
        match x.kind() {
            GameKind::PropertyB | GameKind::ListColoring => {
                let s = TwoSidedSums::of(x).expect("two-sided kind");
                let a = (0..=n).map(|i| s.one[i] + s.both[i]).collect();
                let b = (0..=n).map(|i| s.two[i] + s.both[i]).collect();
                Profile::TwoSided { base: s.level_zero, a, b }
            }
            GameKind::Proper(r) => {
                let r = r as usize;
                let mut coef = vec![vec![0.0; n + 1]; r];
                let mut base = 0.0;
                for (cell, amount) in x.cells() {
                    let i = cell.level as usize;
                    if i == 0 {
                        base += amount;
                    } else if cell.path.0 == 0 {
                        coef.iter_mut().for_each(|c| c[i] += amount);
                    } else {
                        coef[cell.path.index() - 1][i] += amount;
                    }
                }
                Profile::Proper { base, coef }
            }
            GameKind::Panchromatic(r) => {
                let r = r as usize;
                let size = 1usize << r;
                let full = (size - 1) as u32;
                let mut base = 0.0;
                // table[mask][level]: sand on exactly `mask`, then superset sums.
                let mut table = vec![vec![0.0; n + 1]; size];
                for (cell, amount) in x.cells() {
                    if cell.level == 0 {
                        base += amount;
                    } else {
                        table[cell.path.index()][cell.level as usize] += amount;
                    }
                }
                for bit in 0..r {
                    for m in 0..size {
                        if m >> bit & 1 == 1 {
                            let (lo, hi) = table.split_at_mut(m);
                            let sub = &lo[m ^ (1 << bit)];
                            for (t, s) in hi[0].iter_mut().zip(sub) {
                                *t += s;
                            }
                        }
                    }
                }
                let terms = table
                    .into_iter()
                    .enumerate()
                    .filter(|(m, c)| *m as u32 != full && c.iter().any(|v| *v != 0.0))
                    .map(|(m, c)| {
                        let sign = if (r - (m as u32).count_ones() as usize - 1) & 1 == 0 { 1.0 } else { -1.0 };
                        (m as u32, sign, c)
                    })
                    .collect();
                Profile::Panchromatic { base, r, terms }
            }
            GameKind::Custom => unreachable!("solver rejects custom kinds"),
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            Profile::TwoSided { .. } => 1,
            Profile::Proper { coef, .. } => coef.len(),
            Profile::Panchromatic { r, .. } => *r,
        }
    }

    pub fn value(&self, p: &[f64]) -> f64 {
        match self {
            Profile::TwoSided { base, a, b } => base + poly(a, p[0]) + poly(b, 1.0 - p[0]),
            Profile::Proper { base, coef } => base + coef.iter().zip(p).map(|(c, pk)| poly(c, *pk)).sum::<f64>(),
            Profile::Panchromatic { base, r, terms } => {
                base + terms.iter().map(|(m, sign, c)| sign * poly(c, mask_sum(*m, *r, p))).sum::<f64>()
            }
        }
    }

    /// Gradient in `p` (a single entry for the two-sided family).
    pub fn gradient(&self, p: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|g| *g = 0.0);
        match self {
            Profile::TwoSided { a, b, .. } => out[0] = poly_deriv(a, p[0]) - poly_deriv(b, 1.0 - p[0]),
            Profile::Proper { coef, .. } => {
                for (k, c) in coef.iter().enumerate() {
                    out[k] = poly_deriv(c, p[k]);
                }
            }
            Profile::Panchromatic { r, terms, .. } => {
                for (m, sign, c) in terms {
                    let d = sign * poly_deriv(c, mask_sum(*m, *r, p));
                    for (bit, slot) in out.iter_mut().enumerate().take(*r) {
                        if m >> bit & 1 == 1 {
                            *slot += d;
                        }
                    }
                }
            }
        }
    }

    /// `∂h/∂p` for the two-sided family.
    pub fn curvature(&self, p: f64) -> f64 {
        match self {
            Profile::TwoSided { a, b, .. } => poly_second(a, p) + poly_second(b, 1.0 - p),
            _ => unreachable!("curvature is defined for the scalar family only"),
        }
    }
}

fn mask_sum(m: u32, r: usize, p: &[f64]) -> f64 {
    (0..r).filter(|b| m >> b & 1 == 1).map(|b| p[b]).sum()
}
