//! Evaluation of the singular series
//! `S(H) = prod_p (1 - nu_p(H)/p) * (1 - 1/p)^(-k)`
//! as a truncated Euler product with a rigorous relative tail bound, plus the
//! exact closed form for pair patterns `{0, d}`.
//!
//! The product is accumulated in log space with compensated summation: the
//! values reached by long symmetric patterns are near 1e8 and naive
//! multiplication loses digits. Beyond the truncation prime `P` every factor
//! is in the generic regime `nu_p = k`, where
//!
//! `ln[(1 - k/p)(1 - 1/p)^-k] = -sum_{j>=2} (k^j - k)/j * p^-j`,
//!
//! so the omitted tail is `-(k^2-k)/2 * T2 - (k^3-k)/3 * T3 - ...` with
//! `T_j = sum_{p>P} p^-j`. The engine applies the j = 2 and j = 3 terms
//! exactly (prime zeta references minus compensated partial sums) and bounds
//! the rest; for the default `P = 1e6` and `k <= 20` the reported relative
//! bound stays below 1e-9.

use alloc::format;
use alloc::vec::Vec;

use crate::constants::{PRIME_ZETA_2, PRIME_ZETA_3, TWIN_PRIME_C2, TWO_C2};
use crate::error::Error;
use crate::math::{self, adaptive_simpson, Kahan};
use crate::patterns::{distinct_residues, Pattern};
use crate::primes::{factorize, next_prime_after, PrimeSieve};
use crate::rational::Rational;
use crate::Result;

/// Default truncation prime for the generic product.
pub const DEFAULT_TRUNCATION: u64 = 1_000_000;

/// Engines materialize their prime list; cap it well below the sieve ceiling.
pub const ENGINE_TRUNCATION_MAX: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    GenericProduct,
    K2ClosedForm,
}

#[derive(Debug, Clone, Copy)]
pub struct SingularSeriesValue {
    pub value: f64,
    /// Largest prime included in the finite product; 0 for the closed form,
    /// which carries no truncation.
    pub truncation_prime: u64,
    /// Rigorous relative bound on everything beyond the finite product and
    /// its applied tail correction.
    pub tail_bound: f64,
    pub method: Method,
    /// `false` means some prime's residue classes are fully covered and the
    /// reported value is exactly 0.
    pub admissible: bool,
}

/// Reusable evaluator: one sieve, shared tail sums, any number of patterns.
#[derive(Debug, Clone)]
pub struct SingularEngine {
    truncation: u64,
    primes: Vec<u32>,
    tail2: f64,
    tail3: f64,
}

/// Prefix sums of the generic-regime log factors for one fixed pattern
/// length; makes repeated evaluations O(primes below the diameter).
#[derive(Debug, Clone)]
pub struct KProfile {
    k: u64,
    prefix: Vec<f64>,
}

impl SingularEngine {
    pub fn new(truncation_prime: u64) -> Result<Self> {
        if truncation_prime < 2 {
            return Err(Error::Domain(format!(
                "truncation prime must be at least 2, got {truncation_prime}"
            )));
        }
        if truncation_prime > ENGINE_TRUNCATION_MAX {
            return Err(Error::Capacity(format!(
                "truncation {truncation_prime} exceeds engine ceiling {ENGINE_TRUNCATION_MAX}"
            )));
        }
        let sieve = PrimeSieve::new(truncation_prime)?;
        let mut primes = Vec::new();
        let mut inv2 = Kahan::default();
        let mut inv3 = Kahan::default();
        for p in sieve.iter() {
            let x = 1.0 / p as f64;
            inv2.add(x * x);
            inv3.add(x * x * x);
            primes.push(p as u32);
        }
        Ok(SingularEngine {
            truncation: truncation_prime,
            primes,
            tail2: (PRIME_ZETA_2 - inv2.value()).max(0.0),
            tail3: (PRIME_ZETA_3 - inv3.value()).max(0.0),
        })
    }

    /// Engine with the default truncation for the pattern:
    /// `max(1e6, smallest prime above the diameter)`.
    pub fn for_pattern(pattern: &Pattern) -> Result<Self> {
        Self::new(DEFAULT_TRUNCATION.max(next_prime_after(pattern.diameter())))
    }

    pub fn truncation(&self) -> u64 {
        self.truncation
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    /// `sum_{p > truncation} 1/p^2`, reference-backed.
    pub fn tail_inverse_squares(&self) -> f64 {
        self.tail2
    }

    /// `sum_{p > truncation} 1/p^3`, reference-backed.
    pub fn tail_inverse_cubes(&self) -> f64 {
        self.tail3
    }

    /// Applied log-space tail correction for a length-k pattern.
    fn tail_log(&self, k: u64) -> f64 {
        let kf = k as f64;
        -(kf * kf - kf) / 2.0 * self.tail2 - (kf * kf * kf - kf) / 3.0 * self.tail3
    }

    /// Relative bound on what the tail correction leaves out: the j >= 4
    /// series terms plus slack for the stored references and the compensated
    /// partial sums.
    fn tail_error_bound(&self, k: u64) -> f64 {
        let kf = k as f64;
        let p = self.truncation as f64;
        let t4 = 1.0 / (3.0 * p * p * p);
        let series = t4 * kf * kf * kf * kf / 4.0 / (1.0 - kf / p);
        series + kf * kf * 1e-15 + 5e-13
    }

    /// Log of the truncated product for the given offsets (need not be
    /// normalized; residue counts are shift-invariant). Returns the covering
    /// prime instead if the offsets are inadmissible.
    fn finite_log_sum(&self, offsets: &[u64]) -> core::result::Result<f64, u64> {
        let k = offsets.len() as u64;
        let kf = k as f64;
        let spread = spread_of(offsets);
        let mut sum = Kahan::default();
        for &p32 in &self.primes {
            let p = p32 as u64;
            let pf = p as f64;
            if p <= spread {
                let nu = distinct_residues(offsets, p);
                if nu == p {
                    return Err(p);
                }
                sum.add(math::ln_1p(-(nu as f64) / pf) - kf * math::ln_1p(-1.0 / pf));
            } else {
                // beyond the spread all residues are distinct: nu = k
                if p == k {
                    return Err(p);
                }
                sum.add(math::ln_1p(-kf / pf) - kf * math::ln_1p(-1.0 / pf));
            }
        }
        Ok(sum.value())
    }

    fn check_diameter(&self, diameter: u64) -> Result<()> {
        if diameter > self.truncation {
            return Err(Error::Domain(format!(
                "truncation prime {} is below the pattern diameter {diameter}",
                self.truncation
            )));
        }
        Ok(())
    }

    /// Singular series of an admissible pattern; inadmissible patterns are
    /// an error carrying the covering prime.
    pub fn singular_series(&self, pattern: &Pattern) -> Result<SingularSeriesValue> {
        self.check_diameter(pattern.diameter())?;
        match self.finite_log_sum(pattern.offsets()) {
            Ok(log) => Ok(self.build_value(log, pattern.len() as u64)),
            Err(witness) => Err(Error::Inadmissible { witness }),
        }
    }

    /// Batch-friendly variant: inadmissible patterns yield value 0 with the
    /// `admissible` flag cleared instead of an error.
    pub fn singular_series_or_zero(&self, pattern: &Pattern) -> SingularSeriesValue {
        if pattern.diameter() > self.truncation {
            // keep the contract simple for scans: treat like inadmissible
            return SingularSeriesValue {
                value: 0.0,
                truncation_prime: self.truncation,
                tail_bound: 0.0,
                method: Method::GenericProduct,
                admissible: false,
            };
        }
        match self.finite_log_sum(pattern.offsets()) {
            Ok(log) => self.build_value(log, pattern.len() as u64),
            Err(_) => SingularSeriesValue {
                value: 0.0,
                truncation_prime: self.truncation,
                tail_bound: 0.0,
                method: Method::GenericProduct,
                admissible: false,
            },
        }
    }

    fn build_value(&self, finite_log: f64, k: u64) -> SingularSeriesValue {
        SingularSeriesValue {
            value: math::exp(finite_log + self.tail_log(k)),
            truncation_prime: self.truncation,
            tail_bound: self.tail_error_bound(k),
            method: Method::GenericProduct,
            admissible: true,
        }
    }

    /// Precompute generic-regime prefix sums for pattern length `k`.
    pub fn k_profile(&self, k: u64) -> KProfile {
        let kf = k as f64;
        let mut prefix = Vec::with_capacity(self.primes.len() + 1);
        let mut acc = Kahan::default();
        prefix.push(0.0);
        for &p32 in &self.primes {
            let p = p32 as u64;
            let pf = p as f64;
            if p > k {
                acc.add(math::ln_1p(-kf / pf) - kf * math::ln_1p(-1.0 / pf));
            }
            // p <= k only matters for k = 1, where the factor is exactly 1
            prefix.push(acc.value());
        }
        KProfile { k, prefix }
    }

    /// Fast evaluation for repeated use, e.g. subpattern sweeps. The offsets
    /// must describe an admissible pattern of length `profile.k` (offsets of
    /// any shift; subpatterns of admissible patterns always qualify).
    pub fn singular_with_profile(&self, offsets: &[u64], profile: &KProfile) -> SingularSeriesValue {
        debug_assert_eq!(offsets.len() as u64, profile.k);
        let k = profile.k;
        let kf = k as f64;
        let spread = spread_of(offsets);
        debug_assert!(spread <= self.truncation);
        let cut = self.primes.partition_point(|&p| (p as u64) <= spread);
        let mut sum = Kahan::default();
        for &p32 in &self.primes[..cut] {
            let p = p32 as u64;
            let pf = p as f64;
            let nu = distinct_residues(offsets, p);
            debug_assert!(nu < p, "profile evaluation requires admissible offsets");
            sum.add(math::ln_1p(-(nu as f64) / pf) - kf * math::ln_1p(-1.0 / pf));
        }
        let generic = profile.prefix[self.primes.len()] - profile.prefix[cut];
        self.build_value(sum.value() + generic, k)
    }
}

fn spread_of(offsets: &[u64]) -> u64 {
    let mut min = u64::MAX;
    let mut max = 0;
    for &h in offsets {
        min = min.min(h);
        max = max.max(h);
    }
    max - min
}

/// Exact closed form for the pair pattern `{0, d}` with even `d`:
/// `2*C2 * prod_{p | d, p > 2} (p-1)/(p-2)`, the odd-prime product held as
/// an exact rational. The error budget is the stored precision of `C2`.
pub fn twin_constant_for(d: u64) -> Result<SingularSeriesValue> {
    if d == 0 {
        return Err(Error::Domain("pair diameter must be positive".into()));
    }
    if d % 2 == 1 {
        return Err(Error::Inadmissible { witness: 2 });
    }
    let ratio = odd_prime_ratio(d)?;
    Ok(SingularSeriesValue {
        value: TWO_C2 * ratio.to_f64(),
        truncation_prime: 0,
        tail_bound: 1e-15,
        method: Method::K2ClosedForm,
        admissible: true,
    })
}

/// `prod_{p | n, p > 2} (p-1)/(p-2)` as an exact rational.
pub(crate) fn odd_prime_ratio(n: u64) -> Result<Rational> {
    let f = factorize(n)?;
    let mut acc = Rational::ONE;
    for p in f.primes().filter(|&p| p > 2) {
        acc = acc.checked_mul(&Rational::new((p - 1) as u128, (p - 2) as u128)?)?;
    }
    Ok(acc)
}

/// Independence-model prediction `x / (ln x)^k`.
pub fn cramer_prediction(x: f64, k: u32) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain("tuple length must be at least 1".into()));
    }
    if !(x > core::f64::consts::E) {
        return Err(Error::Domain(format!(
            "prediction needs x > e, got {x}"
        )));
    }
    Ok(x / math::powi(math::ln(x), k))
}

/// Parity-corrected prediction `2^(k-1) * x / (ln x)^k`.
pub fn parity_prediction(x: f64, k: u32) -> Result<f64> {
    Ok(math::powi(2.0, k - 1) * cramer_prediction(x, k)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictionForm {
    /// `S(H) * x / (ln x)^k`
    Ratio,
    /// `S(H) * integral_2^x dt / (ln t)^k`
    Integral,
}

impl SingularEngine {
    pub fn hl_prediction(&self, pattern: &Pattern, x: f64, form: PredictionForm) -> Result<f64> {
        if !(x >= 3.0) {
            return Err(Error::Domain(format!("prediction needs x >= 3, got {x}")));
        }
        let s = self.singular_series(pattern)?;
        let k = pattern.len() as u32;
        Ok(match form {
            PredictionForm::Ratio => s.value * x / math::powi(math::ln(x), k),
            PredictionForm::Integral => s.value * log_power_integral(x, k),
        })
    }
}

/// `integral_2^x dt / (ln t)^k`, computed as `integral e^u / u^k du` over
/// `u in [ln 2, ln x]` by adaptive quadrature.
pub fn log_power_integral(x: f64, k: u32) -> f64 {
    if x <= 2.0 {
        return 0.0;
    }
    let f = move |u: f64| math::exp(u) / math::powi(u, k);
    let a = math::ln(2.0);
    let b = math::ln(x);
    // scale the absolute tolerance to the crude size of the integral
    let rough = math::abs(f(b)) * (b - a);
    adaptive_simpson(&f, a, b, rough * 1e-11 + 1e-12)
}

/// Reference twin-prime constant with the number of significant digits that
/// a direct truncated product (tail-corrected) reproduces.
#[derive(Debug, Clone, Copy)]
pub struct TwinConstant {
    pub c2: f64,
    pub verified_digits: u32,
}

/// Direct product `prod_{2<p<=limit} (1 - 1/(p-1)^2)` with the second-order
/// tail correction `exp(-(T2 + 2*T3))`.
pub fn twin_constant_product(limit: u64) -> Result<f64> {
    if limit < 3 {
        return Err(Error::Domain("product needs limit >= 3".into()));
    }
    let sieve = PrimeSieve::new(limit)?;
    let mut log_sum = Kahan::default();
    let mut inv2 = Kahan::default();
    let mut inv3 = Kahan::default();
    for p in sieve.iter() {
        let pf = p as f64;
        let x = 1.0 / pf;
        inv2.add(x * x);
        inv3.add(x * x * x);
        if p > 2 {
            let q = 1.0 / (pf - 1.0);
            log_sum.add(math::ln_1p(-q * q));
        }
    }
    let t2 = (PRIME_ZETA_2 - inv2.value()).max(0.0);
    let t3 = (PRIME_ZETA_3 - inv3.value()).max(0.0);
    Ok(math::exp(log_sum.value() - t2 - 2.0 * t3))
}

/// Verify the stored `C2` against the direct product truncated at `limit`.
pub fn verify_twin_constant(limit: u64) -> Result<TwinConstant> {
    let computed = twin_constant_product(limit)?;
    let rel = math::abs(computed - TWIN_PRIME_C2) / TWIN_PRIME_C2;
    let digits = if rel == 0.0 {
        17
    } else {
        (-math::ln(rel) / core::f64::consts::LN_10) as u32
    };
    Ok(TwinConstant {
        c2: TWIN_PRIME_C2,
        verified_digits: digits,
    })
}
