//! Exact non-negative rationals over `u128`, stored in lowest terms.
//!
//! Comparison widens the cross products to 256 bits, so ordering is exact for
//! every representable value; arithmetic is overflow-checked and never wraps.

use alloc::format;
use core::cmp::Ordering;
use core::fmt;

use crate::error::Error;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    num: u128,
    den: u128,
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Full 256-bit product of two u128 values as (hi, lo) limbs.
fn mul_wide(a: u128, b: u128) -> (u128, u128) {
    const MASK: u128 = (1u128 << 64) - 1;
    let (a_hi, a_lo) = (a >> 64, a & MASK);
    let (b_hi, b_lo) = (b >> 64, b & MASK);
    let ll = a_lo * b_lo;
    let lh = a_lo * b_hi;
    let hl = a_hi * b_lo;
    let hh = a_hi * b_hi;
    let mid = (ll >> 64) + (lh & MASK) + (hl & MASK);
    let lo = (mid << 64) | (ll & MASK);
    let hi = hh + (lh >> 64) + (hl >> 64) + (mid >> 64);
    (hi, lo)
}

impl Rational {
    pub const ONE: Rational = Rational { num: 1, den: 1 };

    pub fn new(num: u128, den: u128) -> Result<Self> {
        if den == 0 {
            return Err(Error::Domain(format!("zero denominator in {num}/0")));
        }
        let g = gcd(num.max(1), den);
        Ok(Rational {
            num: num / g,
            den: den / g,
        })
    }

    pub fn from_integer(n: u128) -> Self {
        Rational { num: n, den: 1 }
    }

    pub fn numerator(&self) -> u128 {
        self.num
    }

    pub fn denominator(&self) -> u128 {
        self.den
    }

    pub fn checked_mul(&self, other: &Rational) -> Result<Rational> {
        // Cross-reduce first so in-range products stay far from overflow.
        let g1 = gcd(self.num.max(1), other.den);
        let g2 = gcd(other.num.max(1), self.den);
        let num = (self.num / g1)
            .checked_mul(other.num / g2)
            .ok_or_else(|| Error::Capacity(format!("rational product overflows: {self} * {other}")))?;
        let den = (self.den / g2)
            .checked_mul(other.den / g1)
            .ok_or_else(|| Error::Capacity(format!("rational product overflows: {self} * {other}")))?;
        Rational::new(num, den)
    }

    pub fn checked_pow(&self, exp: u32) -> Result<Rational> {
        let mut acc = Rational::ONE;
        for _ in 0..exp {
            acc = acc.checked_mul(self)?;
        }
        Ok(acc)
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        mul_wide(self.num, other.den).cmp(&mul_wide(other.num, self.den))
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_to_lowest_terms() {
        let r = Rational::new(92160, 22275).unwrap();
        assert_eq!((r.numerator(), r.denominator()), (2048, 495));
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(matches!(Rational::new(1, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn ordering_is_exact_for_huge_values() {
        // Differ only in the last unit, far beyond f64 resolution.
        let big = u128::MAX / 3;
        let a = Rational::new(big, big - 1).unwrap();
        let b = Rational::new(big + 1, big).unwrap();
        assert_eq!(a.to_f64(), b.to_f64());
        assert!(a > b);
    }

    #[test]
    fn pow_and_mul_agree() {
        let r = Rational::new(4, 3).unwrap();
        let cube = r.checked_mul(&r).unwrap().checked_mul(&r).unwrap();
        assert_eq!(r.checked_pow(3).unwrap(), cube);
        assert_eq!(cube, Rational::new(64, 27).unwrap());
    }

    #[test]
    fn overflow_is_reported() {
        let r = Rational::new(u128::MAX, 1).unwrap();
        assert!(matches!(r.checked_mul(&r), Err(Error::Capacity(_))));
    }
}
