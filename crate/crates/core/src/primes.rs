//! Prime generation, primality, and factorization.
//!
//! Primes are produced by a segmented bit sieve over odd numbers. Segments
//! default to 2^18 odd slots (32 KiB of marks) so the inner loops stay in
//! cache; any segment is computable independently of the others, which the
//! census module exploits and the tests verify (the emitted primes do not
//! depend on the segment size).

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::Result;

/// Hard ceiling for sieving; larger limits are rejected, never best-effort.
pub const SIEVE_LIMIT_MAX: u64 = 1_000_000_000;

/// Ceiling for trial-division factorization (about 1e6 candidate divisors).
pub const FACTORIZE_MAX: u64 = 1_000_000_000_000;

/// Default odd slots per segment.
pub const DEFAULT_SEGMENT_BITS: usize = 1 << 18;

pub fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut x = crate::math::sqrt(n as f64) as u64;
    while x > 0 && x.checked_mul(x).map_or(true, |sq| sq > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).map_or(false, |sq| sq <= n) {
        x += 1;
    }
    x
}

/// Simple odd-only sieve used for base primes; returns odd primes `<= n`.
fn odd_primes_below(n: u64) -> Vec<u32> {
    if n < 3 {
        return Vec::new();
    }
    let slots = ((n - 3) / 2 + 1) as usize;
    let mut composite = vec![false; slots];
    let mut p = 3u64;
    while p * p <= n {
        let idx = ((p - 3) / 2) as usize;
        if !composite[idx] {
            let mut m = p * p;
            while m <= n {
                composite[((m - 3) / 2) as usize] = true;
                m += 2 * p;
            }
        }
        p += 2;
    }
    composite
        .iter()
        .enumerate()
        .filter(|(_, &c)| !c)
        .map(|(i, _)| (3 + 2 * i as u64) as u32)
        .collect()
}

/// Mark composites among the odd numbers `lo, lo+2, ..` (`slots` of them).
/// `lo` must be odd and `base` must contain every odd prime `<= sqrt` of the
/// last covered value. Bit i set means `lo + 2i` is composite.
pub(crate) fn sieve_segment(base: &[u32], lo: u64, slots: usize) -> Vec<u64> {
    debug_assert!(lo % 2 == 1);
    let mut words = vec![0u64; slots.div_ceil(64)];
    let hi = lo + 2 * slots as u64;
    for &p in base {
        let p = p as u64;
        if p * p >= hi {
            break;
        }
        let mut m = lo.div_ceil(p) * p;
        if m % 2 == 0 {
            m += p;
        }
        if m < p * p {
            m = p * p;
        }
        let mut bit = ((m - lo) / 2) as usize;
        while bit < slots {
            words[bit / 64] |= 1u64 << (bit % 64);
            bit += p as usize;
        }
    }
    // 1 is not prime; mask it out if the segment starts there.
    if lo == 1 {
        words[0] |= 1;
    }
    words
}

/// Segmented sieve enumerating the primes up to a fixed limit.
#[derive(Debug, Clone)]
pub struct PrimeSieve {
    limit: u64,
    segment_slots: usize,
    base: Vec<u32>,
}

impl PrimeSieve {
    pub fn new(limit: u64) -> Result<Self> {
        Self::with_segment_size(limit, DEFAULT_SEGMENT_BITS)
    }

    /// Same primes, explicit segment size (odd slots per segment).
    pub fn with_segment_size(limit: u64, segment_slots: usize) -> Result<Self> {
        if limit > SIEVE_LIMIT_MAX {
            return Err(Error::Capacity(format!(
                "sieve limit {limit} exceeds ceiling {SIEVE_LIMIT_MAX}"
            )));
        }
        if segment_slots == 0 {
            return Err(Error::Domain("segment size must be positive".into()));
        }
        let base = odd_primes_below(isqrt(limit));
        Ok(PrimeSieve {
            limit,
            segment_slots,
            base,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Iterate the primes `<= limit` in increasing order.
    pub fn iter(&self) -> Primes<'_> {
        Primes {
            sieve: self,
            emitted_two: false,
            seg_lo: 3,
            words: Vec::new(),
            seg_slots: 0,
            bit: 0,
        }
    }
}

impl<'a> IntoIterator for &'a PrimeSieve {
    type Item = u64;
    type IntoIter = Primes<'a>;
    fn into_iter(self) -> Primes<'a> {
        self.iter()
    }
}

pub struct Primes<'a> {
    sieve: &'a PrimeSieve,
    emitted_two: bool,
    seg_lo: u64,
    words: Vec<u64>,
    seg_slots: usize,
    bit: usize,
}

impl Iterator for Primes<'_> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if !self.emitted_two {
            self.emitted_two = true;
            if self.sieve.limit >= 2 {
                return Some(2);
            }
            return None;
        }
        loop {
            while self.bit < self.seg_slots {
                let w = self.words[self.bit / 64];
                if w == u64::MAX {
                    // whole word composite: jump to its end
                    self.bit = (self.bit / 64 + 1) * 64;
                    continue;
                }
                if w >> (self.bit % 64) & 1 == 0 {
                    let p = self.seg_lo + 2 * self.bit as u64;
                    self.bit += 1;
                    return Some(p);
                }
                self.bit += 1;
            }
            // advance to the next segment
            let next_lo = self.seg_lo + 2 * self.seg_slots as u64;
            if self.seg_slots != 0 {
                self.seg_lo = next_lo;
            }
            if self.seg_lo > self.sieve.limit {
                return None;
            }
            let remaining = (self.sieve.limit - self.seg_lo) / 2 + 1;
            self.seg_slots = self.sieve.segment_slots.min(remaining as usize);
            if self.seg_slots == 0 {
                return None;
            }
            self.words = sieve_segment(&self.sieve.base, self.seg_lo, self.seg_slots);
            self.bit = 0;
        }
    }
}

/// All primes `<= limit` as a vector. Limits below 2 give an empty vector,
/// limits above [`SIEVE_LIMIT_MAX`] are rejected.
pub fn primes_up_to(limit: u64) -> Result<Vec<u64>> {
    Ok(PrimeSieve::new(limit)?.iter().collect())
}

/// Canonical factorization with primes in increasing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub n: u64,
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// Distinct primes dividing `n`.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn reconstruct(&self) -> u64 {
        self.factors
            .iter()
            .fold(1u64, |acc, &(p, e)| acc * p.pow(e))
    }
}

/// Trial-division factorization; `factorize(1)` has an empty factor list.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::Domain("cannot factorize 0".into()));
    }
    if n > FACTORIZE_MAX {
        return Err(Error::Capacity(format!(
            "factorization input {n} exceeds ceiling {FACTORIZE_MAX}"
        )));
    }
    let mut factors = Vec::new();
    let mut m = n;
    let mut push = |p: u64, m: &mut u64| {
        let mut e = 0;
        while *m % p == 0 {
            *m /= p;
            e += 1;
        }
        if e > 0 {
            factors.push((p, e));
        }
    };
    push(2, &mut m);
    push(3, &mut m);
    let mut d = 5u64;
    while d * d <= m {
        push(d, &mut m);
        push(d + 2, &mut m);
        d += 6;
    }
    if m > 1 {
        factors.push((m, 1));
    }
    Ok(Factorization { n, factors })
}

/// Trial-division primality test for moderate values.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 || n % 3 == 0 {
        return false;
    }
    let mut d = 5u64;
    while d * d <= n {
        if n % d == 0 || n % (d + 2) == 0 {
            return false;
        }
        d += 6;
    }
    true
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime_after(n: u64) -> u64 {
    let mut c = n + 1;
    if c <= 2 {
        return 2;
    }
    if c % 2 == 0 {
        c += 1;
    }
    while !is_prime(c) {
        c += 2;
    }
    c
}

/// The n-th prime with `p_1 = 2`.
pub fn nth_prime(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::Domain("prime indices start at 1".into()));
    }
    let bound = if n < 6 {
        13
    } else {
        let x = n as f64;
        let ln = crate::math::ln(x);
        (x * (ln + crate::math::ln(ln))) as u64 + 2
    };
    if bound > SIEVE_LIMIT_MAX {
        return Err(Error::Capacity(format!(
            "nth_prime({n}) needs a sieve past the {SIEVE_LIMIT_MAX} ceiling"
        )));
    }
    PrimeSieve::new(bound)?
        .iter()
        .nth(n as usize - 1)
        .ok_or_else(|| Error::Capacity(format!("prime bound estimate too small for n = {n}")))
}

/// Product of the first `n` primes. Overflow is rejected, never wrapped.
pub fn primorial(n: u64) -> Result<u64> {
    if n > 20 {
        return Err(Error::Capacity(format!("primorial({n}) overflows u64")));
    }
    let sieve = PrimeSieve::new(100)?;
    let mut acc: u64 = 1;
    for (i, p) in sieve.iter().enumerate() {
        if i as u64 == n {
            break;
        }
        acc = acc
            .checked_mul(p)
            .ok_or_else(|| Error::Capacity(format!("primorial({n}) overflows u64")))?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Plain sieve of Eratosthenes over all integers, kept deliberately
    /// independent of the segmented implementation.
    fn naive_primes(limit: u64) -> Vec<u64> {
        if limit < 2 {
            return Vec::new();
        }
        let mut is_comp = vec![false; limit as usize + 1];
        let mut out = Vec::new();
        for n in 2..=limit {
            if !is_comp[n as usize] {
                out.push(n);
                let mut m = n * n;
                while m <= limit {
                    is_comp[m as usize] = true;
                    m += n;
                }
            }
        }
        out
    }

    #[test]
    fn small_limits() {
        assert_eq!(primes_up_to(10).unwrap(), vec![2, 3, 5, 7]);
        assert_eq!(primes_up_to(2).unwrap(), vec![2]);
        assert_eq!(primes_up_to(1).unwrap(), Vec::<u64>::new());
        assert_eq!(primes_up_to(0).unwrap(), Vec::<u64>::new());
    }

    #[test]
    fn limit_ceiling_enforced() {
        assert!(matches!(
            primes_up_to(SIEVE_LIMIT_MAX + 1),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn matches_naive_sieve_up_to_1e5() {
        let expected = naive_primes(100_000);
        assert_eq!(primes_up_to(100_000).unwrap(), expected);
    }

    #[test]
    fn segment_size_does_not_change_output() {
        let reference = primes_up_to(65_537).unwrap();
        for slots in [1 << 10, 1 << 16, 1 << 20] {
            let sieve = PrimeSieve::with_segment_size(65_537, slots).unwrap();
            assert_eq!(sieve.iter().collect::<Vec<_>>(), reference);
        }
    }

    #[test]
    fn prime_count_at_1e6() {
        let expected = naive_primes(1_000_000).len();
        assert_eq!(expected, 78_498);
        assert_eq!(PrimeSieve::new(1_000_000).unwrap().iter().count(), 78_498);
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(1).unwrap().factors, vec![]);
        assert_eq!(factorize(240).unwrap().factors, vec![(2, 4), (3, 1), (5, 1)]);
        assert_eq!(
            factorize(255_255).unwrap().factors,
            vec![(3, 1), (5, 1), (7, 1), (11, 1), (13, 1), (17, 1)]
        );
        assert!(matches!(factorize(0), Err(Error::Domain(_))));
    }

    #[test]
    fn factorize_reconstructs_random_inputs() {
        let mut state = 0x9e3779b97f4a7c15u64;
        for _ in 0..10_000 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let n = state % 1_000_000 + 1;
            let f = factorize(n).unwrap();
            assert_eq!(f.reconstruct(), n);
            for w in f.factors.windows(2) {
                assert!(w[0].0 < w[1].0);
            }
        }
    }

    #[test]
    fn primes_are_exactly_single_factor_exponent_one() {
        let primes: Vec<u64> = primes_up_to(2000).unwrap();
        let by_factorization: Vec<u64> = (1..=2000u64)
            .filter(|&n| {
                let f = factorize(n).unwrap();
                f.factors.len() == 1 && f.factors[0].1 == 1
            })
            .collect();
        assert_eq!(primes, by_factorization);
    }

    #[test]
    fn nth_prime_examples() {
        assert_eq!(nth_prime(1).unwrap(), 2);
        assert_eq!(nth_prime(5).unwrap(), 11);
        assert_eq!(nth_prime(1000).unwrap(), 7919);
        assert!(matches!(nth_prime(0), Err(Error::Domain(_))));
    }

    #[test]
    fn primorial_examples() {
        assert_eq!(primorial(0).unwrap(), 1);
        assert_eq!(primorial(1).unwrap(), 2);
        assert_eq!(primorial(4).unwrap(), 210);
        assert_eq!(primorial(9).unwrap(), 223_092_870);
        assert_eq!(primorial(15).unwrap(), 614_889_782_588_491_410);
        assert!(matches!(primorial(16), Err(Error::Capacity(_))));
    }

    #[test]
    fn next_prime_after_examples() {
        assert_eq!(next_prime_after(0), 2);
        assert_eq!(next_prime_after(2), 3);
        assert_eq!(next_prime_after(240), 241);
        assert_eq!(next_prime_after(8), 11);
    }
}
