//! Exact enumeration of the panchromatic failure probability.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub const MAX_ORACLE_COLORS: usize = 4;
pub const MAX_ORACLE_LEVEL: u32 = 6;

/// Probability that `i` independent colors drawn from `p`, together with
/// the colors already in `mask`, miss at least one of the `r` colors.
///
/// Sums the probability of every one of the `r^i` color sequences, in exact
/// rational arithmetic.
pub fn panchromatic_fail_probability(mask: u32, i: u32, p: &[BigRational], r: usize) -> Result<BigRational> {
    if !(2..=MAX_ORACLE_COLORS).contains(&r) {
        return Err(Error::Config(format!("enumeration supports 2..={MAX_ORACLE_COLORS} colors, not {r}")));
    }
    if i > MAX_ORACLE_LEVEL {
        return Err(Error::Config(format!("enumeration supports levels up to {MAX_ORACLE_LEVEL}, not {i}")));
    }
    if p.len() != r {
        return Err(Error::Config(format!("parameter has {} coordinates, expected {r}", p.len())));
    }
    if p.iter().any(|v| *v < BigRational::zero()) || p.iter().sum::<BigRational>() != BigRational::one() {
        return Err(Error::Config("parameter is not a probability vector".into()));
    }
    let full = (1u32 << r) - 1;
    if mask > full {
        return Err(Error::Config(format!("mask {mask:#b} has bits beyond {r} colors")));
    }
    let total = (r as u64).pow(i);
    let mut fail = BigRational::zero();
    for seq in 0..total {
        let mut seen = mask;
        let mut prob = BigRational::one();
        let mut rest = seq;
        for _ in 0..i {
            let color = (rest % r as u64) as usize;
            rest /= r as u64;
            seen |= 1 << color;
            prob *= &p[color];
        }
        if seen != full {
            fail += prob;
        }
    }
    Ok(fail)
}

/// `a/b` as an exact rational.
pub fn ratio(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}
