//! Weight vectors `w(p)`, the potential `x·w(p)`, its derivative in `p` and
//! the potential of the shifted arrangement.
//!
//! Every family gives weight 1 to level-0 cells and weight 0 to the dead
//! path, so the potential of an arrangement counts both the sand still in
//! play and the sand already harvested.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Arrangement, GameKind, Label, Path};

/// Tolerance on `∑ p_i = 1` for simplex points.
pub const SIMPLEX_SLACK: f64 = 1e-12;

/// The parameter `p` of a weight family: a scalar in `[0,1]` for property B
/// and list coloring, a point of the probability simplex otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamPoint {
    values: Vec<f64>,
}

impl ParamPoint {
    pub fn scalar(p: f64) -> Result<ParamPoint> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Config(format!("parameter {p} outside [0,1]")));
        }
        Ok(ParamPoint { values: vec![p] })
    }

    pub fn simplex(values: Vec<f64>) -> Result<ParamPoint> {
        if values.len() < 2 {
            return Err(Error::Config("a simplex point needs at least two coordinates".into()));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Config("simplex coordinates must be nonnegative".into()));
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_SLACK {
            return Err(Error::Config(format!("simplex coordinates sum to {sum}, not 1")));
        }
        Ok(ParamPoint { values })
    }

    pub fn uniform(r: usize) -> ParamPoint {
        ParamPoint { values: vec![1.0 / r as f64; r] }
    }

    /// The natural starting point for `kind`: `1/2` or the uniform distribution.
    pub fn center(kind: GameKind) -> ParamPoint {
        match kind.colors() {
            Some(r) => ParamPoint::uniform(r as usize),
            None => ParamPoint { values: vec![0.5] },
        }
    }

    pub(crate) fn raw(values: Vec<f64>) -> ParamPoint {
        ParamPoint { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_scalar(&self) -> bool {
        self.values.len() == 1
    }

    /// The scalar parameter; for simplex points the first coordinate.
    pub fn first(&self) -> f64 {
        self.values[0]
    }

    /// Probability attached to each move label: `(p, 1−p)` for scalar
    /// families, the coordinates themselves otherwise.
    pub fn label_probabilities(&self) -> Vec<f64> {
        if self.is_scalar() {
            vec![self.values[0], 1.0 - self.values[0]]
        } else {
            self.values.clone()
        }
    }

    fn check(&self, kind: GameKind) -> Result<()> {
        let ok = match kind {
            GameKind::PropertyB | GameKind::ListColoring => self.is_scalar(),
            GameKind::Proper(r) | GameKind::Panchromatic(r) => self.values.len() == r as usize,
            GameKind::Custom => false,
        };
        if ok {
            Ok(())
        } else if kind == GameKind::Custom {
            Err(Error::UnsupportedKind("custom path systems have no weight family".into()))
        } else {
            Err(Error::Config(format!(
                "parameter of dimension {} does not fit kind {kind}",
                self.values.len()
            )))
        }
    }
}

impl fmt::Display for ParamPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_scalar() {
            write!(f, "{}", self.values[0])
        } else {
            write!(f, "{:?}", self.values)
        }
    }
}

impl Serialize for ParamPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_scalar() {
            self.values[0].serialize(s)
        } else {
            self.values.serialize(s)
        }
    }
}

impl<'de> Deserialize<'de> for ParamPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Scalar(f64),
            Vector(Vec<f64>),
        }
        match Repr::deserialize(d)? {
            Repr::Scalar(p) => ParamPoint::scalar(p),
            Repr::Vector(v) => ParamPoint::simplex(v),
        }
        .map_err(serde::de::Error::custom)
    }
}

/// Derivative of the potential with respect to the parameter.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Gradient {
    Scalar(f64),
    /// Euclidean gradient in `(p_1, …, p_r)`; consumers project it onto the
    /// tangent space of the simplex.
    Vector(Vec<f64>),
}

impl Gradient {
    pub fn scalar(&self) -> Option<f64> {
        match self {
            Gradient::Scalar(v) => Some(*v),
            Gradient::Vector(_) => None,
        }
    }
}

/// The weight family of a built-in game kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeightFamily {
    kind: GameKind,
}

impl WeightFamily {
    pub fn new(kind: GameKind) -> Result<WeightFamily> {
        if !kind.is_builtin() {
            return Err(Error::UnsupportedKind("custom path systems have no weight family".into()));
        }
        Ok(WeightFamily { kind })
    }

    pub fn kind(self) -> GameKind {
        self.kind
    }

    fn dead(self) -> Path {
        match self.kind {
            GameKind::PropertyB => Path(3),
            GameKind::ListColoring => Path(2),
            GameKind::Proper(r) => Path(r as u16 + 1),
            GameKind::Panchromatic(r) => Path(((1u32 << r) - 1) as u16),
            GameKind::Custom => unreachable!("rejected by WeightFamily::new"),
        }
    }

    /// `w(p)` at `(level, path)`. The dead path weighs 0, level 0 weighs 1.
    pub fn weight(self, p: &ParamPoint, level: u32, path: Path) -> f64 {
        if path == self.dead() {
            return 0.0;
        }
        if level == 0 {
            return 1.0;
        }
        let i = level as i32;
        let v = p.values();
        match self.kind {
            GameKind::PropertyB => {
                let (a, b) = (v[0], 1.0 - v[0]);
                match path.0 {
                    0 => a.powi(i) + b.powi(i),
                    1 => a.powi(i),
                    _ => b.powi(i),
                }
            }
            GameKind::ListColoring => match path.0 {
                0 => v[0].powi(i),
                _ => (1.0 - v[0]).powi(i),
            },
            GameKind::Proper(_) => match path.0 {
                0 => v.iter().map(|pj| pj.powi(i)).sum(),
                j => v[j as usize - 1].powi(i),
            },
            GameKind::Panchromatic(_) => panchromatic_weight(path.0 as u32, level, v),
            GameKind::Custom => unreachable!(),
        }
    }

    /// `∂w(p)/∂p` at `(level, path)`: a scalar for the one-parameter
    /// families, the Euclidean gradient otherwise (written into `out`).
    fn weight_derivative(self, p: &ParamPoint, level: u32, path: Path, out: &mut [f64]) {
        if path == self.dead() || level == 0 {
            return;
        }
        let i = level as i32;
        let fi = level as f64;
        let v = p.values();
        match self.kind {
            GameKind::PropertyB => {
                let (a, b) = (v[0], 1.0 - v[0]);
                out[0] += match path.0 {
                    0 => fi * (a.powi(i - 1) - b.powi(i - 1)),
                    1 => fi * a.powi(i - 1),
                    _ => -fi * b.powi(i - 1),
                };
            }
            GameKind::ListColoring => {
                out[0] += match path.0 {
                    0 => fi * v[0].powi(i - 1),
                    _ => -fi * (1.0 - v[0]).powi(i - 1),
                };
            }
            GameKind::Proper(_) => match path.0 {
                0 => {
                    for (k, pk) in v.iter().enumerate() {
                        out[k] += fi * pk.powi(i - 1);
                    }
                }
                j => out[j as usize - 1] += fi * v[j as usize - 1].powi(i - 1),
            },
            GameKind::Panchromatic(r) => {
                let r = r as usize;
                let full = (1u32 << r) - 1;
                let mask = path.0 as u32;
                let free = full & !mask;
                let mut extra = free;
                loop {
                    let m = mask | extra;
                    if m != full {
                        let s: f64 = (0..r).filter(|b| m >> b & 1 == 1).map(|b| v[b]).sum();
                        let sign = if (r - m.count_ones() as usize - 1) & 1 == 0 { 1.0 } else { -1.0 };
                        let d = sign * fi * s.powi(i - 1);
                        for (b, slot) in out.iter_mut().enumerate().take(r) {
                            if m >> b & 1 == 1 {
                                *slot += d;
                            }
                        }
                    }
                    if extra == 0 {
                        break;
                    }
                    extra = (extra - 1) & free;
                }
            }
            GameKind::Custom => unreachable!(),
        }
    }
}

/// Panchromatic weight of the path with color mask `mask`: the signed sum of
/// `S(M)^level` over masks `mask ⊆ M ⊊ full`, with `S(M) = ∑_{i∈M} p_i` and
/// sign `(−1)^{r−|M|−1}`. Generic so the same expansion runs in `f64` and in
/// exact rationals.
pub fn panchromatic_weight<T>(mask: u32, level: u32, p: &[T]) -> T
where
    T: Clone + Zero + One + Add<Output = T> + Sub<Output = T> + Mul<Output = T>,
{
    let r = p.len();
    let full = (1u32 << r) - 1;
    if mask & full == full {
        return T::zero();
    }
    if level == 0 {
        return T::one();
    }
    let free = full & !mask;
    let mut plus = T::zero();
    let mut minus = T::zero();
    let mut extra = free;
    loop {
        let m = mask | extra;
        if m != full {
            let s = (0..r).filter(|b| m >> b & 1 == 1).fold(T::zero(), |acc, b| acc + p[b].clone());
            let term = num_traits::pow(s, level as usize);
            if (r - m.count_ones() as usize - 1) & 1 == 0 {
                plus = plus + term;
            } else {
                minus = minus + term;
            }
        }
        if extra == 0 {
            break;
        }
        extra = (extra - 1) & free;
    }
    plus - minus
}

/// Weight of `(level, path)` for `kind` at `p`.
pub fn weight(kind: GameKind, p: &ParamPoint, level: u32, path: Path) -> Result<f64> {
    p.check(kind)?;
    Ok(WeightFamily::new(kind)?.weight(p, level, path))
}

/// The potential `x·w(p)`.
pub fn potential(x: &Arrangement, p: &ParamPoint) -> Result<f64> {
    let family = WeightFamily::new(x.kind())?;
    p.check(x.kind())?;
    Ok(x.cells().map(|(c, a)| a * family.weight(p, c.level, c.path)).sum())
}

/// `h(x,p) = w'(p)·x`, the derivative of the potential in `p`.
pub fn h(x: &Arrangement, p: &ParamPoint) -> Result<Gradient> {
    let family = WeightFamily::new(x.kind())?;
    p.check(x.kind())?;
    let mut grad = vec![0.0; p.values().len()];
    let mut cell_grad = vec![0.0; grad.len()];
    for (c, a) in x.cells() {
        cell_grad.iter_mut().for_each(|g| *g = 0.0);
        family.weight_derivative(p, c.level, c.path, &mut cell_grad);
        for (g, cg) in grad.iter_mut().zip(&cell_grad) {
            *g += a * cg;
        }
    }
    Ok(if p.is_scalar() { Gradient::Scalar(grad[0]) } else { Gradient::Vector(grad) })
}

/// Potential of the shifted arrangement `x⃗(τ)`: every cell at level
/// `n ≥ 1` is moved to `(n−1, τ(m))`. Level-0 cells do not move and are left out.
pub fn shifted_potential(x: &Arrangement, tau: Label, p: &ParamPoint) -> Result<f64> {
    let family = WeightFamily::new(x.kind())?;
    p.check(x.kind())?;
    let sys = x.system();
    if !sys.has_label(tau) {
        return Err(Error::InvalidMove(format!("{tau} is not a transition of {}", sys.kind())));
    }
    Ok(x
        .cells()
        .filter(|(c, _)| c.level >= 1)
        .map(|(c, a)| a * family.weight(p, c.level - 1, sys.step(tau, c.path)))
        .sum())
}
