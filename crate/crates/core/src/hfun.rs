//! The multiplicative correction factor
//! `h(n) = prod_{p | n, p > 2} (p-1)/(p-2)`
//! (`h(1) = 1`, and powers of two contribute nothing), with
//!
//! - exact rational point values and the pair-constant form `f(d) = 2*C2 *
//!   h(odd part of d)`;
//! - theoretical moments as Euler products, empirical moments by exhaustive
//!   scan, and the variances derived from them;
//! - extreme-value scans (the maximum is attained on products of the
//!   smallest odd primes);
//! - the limiting-distribution apparatus: exact frequency tables, the
//!   convergence test series over primes, and the characteristic-function
//!   product next to its empirical counterpart.
//!
//! Bulk scans factor a whole block at once: every multiple of each base
//! prime receives its factor and divides the prime out of a cofactor array,
//! so the leftover cofactor is 1 or a single large prime. Products over
//! distinct primes of n stay below n, hence well inside u64.
//!
//! Scans are split into fixed absolute chunks ([`scan_chunks`]); every chunk
//! is independently computable and results are merged in chunk order, so a
//! parallel driver reproduces the sequential output bit for bit.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::constants::{PRIME_ZETA_2, PRIME_ZETA_3, TWIN_PRIME_C2, TWO_C2};
use crate::error::Error;
use crate::math::{self, Complex, Kahan};
use crate::primes::{factorize, isqrt, primes_up_to, PrimeSieve};
use crate::rational::Rational;
use crate::singular::odd_prime_ratio;
use crate::Result;

/// Fixed chunk span for bulk scans; merges happen in chunk order.
pub const SCAN_CHUNK: u64 = 1 << 20;

/// Ceiling for exhaustive max scans.
pub const MAX_SCAN_LIMIT: u64 = 100_000_000;

/// Ceiling for full frequency snapshots.
pub const SNAPSHOT_LIMIT: u64 = 10_000_000;

/// Truncation prime for the moment Euler products.
pub const MOMENT_TRUNCATION: u64 = 10_000_000;

/// Largest supported moment order.
pub const MOMENT_MAX_ORDER: u32 = 8;

/// Exact value of `h(n)`.
pub fn h(n: u64) -> Result<Rational> {
    if n == 0 {
        return Err(Error::Domain("h is defined for n >= 1".into()));
    }
    let f = factorize(n)?;
    let mut acc = Rational::ONE;
    for p in f.primes().filter(|&p| p > 2) {
        acc = acc.checked_mul(&Rational::new((p - 1) as u128, (p - 2) as u128)?)?;
    }
    Ok(acc)
}

/// Pair constant as a function of the diameter: `f(d) = 2*C2 * h(odd part
/// of d)` for even `d`. Since halving an even `d` removes no odd prime,
/// this equals `2*C2 * h(d/2)` for every even `d`.
pub fn f_even(d: u64) -> Result<f64> {
    if d == 0 || d % 2 == 1 {
        return Err(Error::Domain(format!("f is defined for even d >= 2, got {d}")));
    }
    Ok(TWO_C2 * odd_prime_ratio(d)?.to_f64())
}

// ---------------------------------------------------------------------------
// theoretical moments
// ---------------------------------------------------------------------------

/// Euler products `prod_p (1 - 1/p + h(p)^k / p)` for several orders in one
/// prime stream. The p = 2 factor is exactly 1. Beyond the truncation the
/// log factor is `k/p^2 + (2k + k(k-1)/2)/p^3 + O(p^-4)`, applied from the
/// prime zeta references.
fn moment_products(orders: &[u32], limit: u64) -> Result<Vec<f64>> {
    let sieve = PrimeSieve::new(limit)?;
    let mut logs = vec![Kahan::default(); orders.len()];
    let mut inv2 = Kahan::default();
    let mut inv3 = Kahan::default();
    for p in sieve.iter() {
        let pf = p as f64;
        let x = 1.0 / pf;
        inv2.add(x * x);
        inv3.add(x * x * x);
        if p == 2 {
            continue;
        }
        let hp = (pf - 1.0) / (pf - 2.0);
        for (i, &k) in orders.iter().enumerate() {
            let hk = math::powi(hp, k);
            logs[i].add(math::ln(1.0 - x + hk * x));
        }
    }
    let t2 = (PRIME_ZETA_2 - inv2.value()).max(0.0);
    let t3 = (PRIME_ZETA_3 - inv3.value()).max(0.0);
    Ok(orders
        .iter()
        .zip(&logs)
        .map(|(&k, log)| {
            let kf = k as f64;
            let tail = kf * t2 + (2.0 * kf + kf * (kf - 1.0) / 2.0) * t3;
            math::exp(log.value() + tail)
        })
        .collect())
}

/// k-th moment of `h` as an Euler product. Order 0 is trivially 1; orders
/// above [`MOMENT_MAX_ORDER`] are rejected rather than returned at unknown
/// precision.
pub fn moment_product(k: u32) -> Result<f64> {
    if k == 0 {
        return Ok(1.0);
    }
    if k > MOMENT_MAX_ORDER {
        return Err(Error::Domain(format!(
            "moment order {k} above supported maximum {MOMENT_MAX_ORDER}"
        )));
    }
    Ok(moment_products(&[k], MOMENT_TRUNCATION)?[0])
}

/// Mean value of `h`; equals `1/C2`.
pub fn wintner_mean() -> f64 {
    moment_product(1).expect("order 1 is always valid")
}

/// `D(h) = M2 - M1^2`.
pub fn variance_h() -> f64 {
    let m = moment_products(&[1, 2], MOMENT_TRUNCATION).expect("fixed valid input");
    m[1] - m[0] * m[0]
}

/// Mean of `f`: `2*C2 * M1`, which collapses to 2.
pub fn mean_f() -> f64 {
    TWO_C2 * moment_product(1).expect("order 1 is always valid")
}

/// `D(f) = 4*C2^2*M2 - (2*C2*M1)^2`.
pub fn variance_f() -> f64 {
    let m = moment_products(&[1, 2], MOMENT_TRUNCATION).expect("fixed valid input");
    4.0 * TWIN_PRIME_C2 * TWIN_PRIME_C2 * m[1] - (TWO_C2 * m[0]) * (TWO_C2 * m[0])
}

// ---------------------------------------------------------------------------
// bulk scans
// ---------------------------------------------------------------------------

/// Fixed absolute chunking of `[1, n_max]`; independent of any thread count.
pub fn scan_chunks(n_max: u64) -> Vec<(u64, u64)> {
    let mut chunks = Vec::new();
    let mut lo = 1u64;
    while lo <= n_max {
        let next = ((lo / SCAN_CHUNK) + 1) * SCAN_CHUNK;
        let hi = next.min(n_max + 1);
        chunks.push((lo, hi));
        lo = hi;
    }
    chunks
}

/// Visit `(n, numerator, denominator)` of `h(n)` for every `n` in
/// `[lo, hi)`. The rational is not reduced; both parts are below `n`.
pub fn for_each_h(lo: u64, hi: u64, mut visit: impl FnMut(u64, u64, u64)) {
    debug_assert!(lo >= 1);
    if hi <= lo {
        return;
    }
    let span = (hi - lo) as usize;
    let mut cof: Vec<u64> = (lo..hi).collect();
    let mut num = vec![1u64; span];
    let mut den = vec![1u64; span];
    for c in cof.iter_mut() {
        *c >>= c.trailing_zeros();
    }
    let base = primes_up_to(isqrt(hi - 1)).expect("scan roots stay below the sieve ceiling");
    for &p in base.iter().skip(1) {
        let mut m = lo.div_ceil(p) * p;
        while m < hi {
            let i = (m - lo) as usize;
            num[i] *= p - 1;
            den[i] *= p - 2;
            while cof[i] % p == 0 {
                cof[i] /= p;
            }
            m += p;
        }
    }
    for i in 0..span {
        let c = cof[i];
        let (mut nn, mut dd) = (num[i], den[i]);
        if c > 1 {
            // leftover cofactor is a single odd prime above the root
            nn *= c - 1;
            dd *= c - 2;
        }
        visit(lo + i as u64, nn, dd);
    }
}

/// Sum of `h(n)^k` over one chunk, compensated.
pub fn empirical_moment_chunk(k: u32, lo: u64, hi: u64) -> f64 {
    let mut sum = Kahan::default();
    for_each_h(lo, hi, |_, num, den| {
        sum.add(math::powi(num as f64 / den as f64, k));
    });
    sum.value()
}

/// Moment scan report: the Euler-product value next to the finite average.
#[derive(Debug, Clone, Copy)]
pub struct MomentReport {
    pub order: u32,
    pub theoretical: f64,
    pub empirical: f64,
    pub n_max: u64,
    /// `|empirical - theoretical| / theoretical`
    pub gap: f64,
}

/// Merge per-chunk sums (in chunk order) into the final report.
pub fn assemble_moment(k: u32, n_max: u64, chunk_sums: &[f64]) -> Result<MomentReport> {
    let theoretical = moment_product(k)?;
    let mut total = 0.0;
    for &s in chunk_sums {
        total += s;
    }
    let empirical = total / n_max as f64;
    Ok(MomentReport {
        order: k,
        theoretical,
        empirical,
        n_max,
        gap: math::abs(empirical - theoretical) / theoretical,
    })
}

/// `(1/N) * sum_{n<=N} h(n)^k` against the Euler product.
pub fn empirical_moment(k: u32, n_max: u64) -> Result<MomentReport> {
    if n_max < 1_000 {
        return Err(Error::Domain(format!("moment scans need N >= 1000, got {n_max}")));
    }
    if n_max > MAX_SCAN_LIMIT {
        return Err(Error::Capacity(format!(
            "moment scan ceiling is {MAX_SCAN_LIMIT}, got {n_max}"
        )));
    }
    let sums: Vec<f64> = scan_chunks(n_max)
        .into_iter()
        .map(|(lo, hi)| empirical_moment_chunk(k, lo, hi))
        .collect();
    assemble_moment(k, n_max, &sums)
}

// ---------------------------------------------------------------------------
// extreme values
// ---------------------------------------------------------------------------

/// Chunk-level maximum: value as an unreduced pair plus its smallest
/// argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChunkMax {
    pub argmax: u64,
    pub num: u64,
    pub den: u64,
}

pub fn max_scan_chunk(lo: u64, hi: u64) -> ChunkMax {
    let mut best = ChunkMax { argmax: lo, num: 0, den: 1 };
    for_each_h(lo, hi, |n, num, den| {
        // exact cross comparison; ties keep the earlier (smaller) n
        if (num as u128) * best.den as u128 > (best.num as u128) * den as u128 {
            best = ChunkMax { argmax: n, num, den };
        }
    });
    best
}

#[derive(Debug, Clone)]
pub struct MaxScanResult {
    pub limit: u64,
    pub argmax: u64,
    pub value: Rational,
    pub value_f64: f64,
    /// `ln ln limit`, the scale the maximum is expected to track.
    pub loglog_limit: f64,
    /// `max / ln ln limit`, reported for inspection, never asserted.
    pub ratio_to_loglog: f64,
}

pub fn assemble_max(limit: u64, chunk_maxes: &[ChunkMax]) -> MaxScanResult {
    let mut best = ChunkMax { argmax: 1, num: 1, den: 1 };
    for &c in chunk_maxes {
        let lhs = (c.num as u128) * best.den as u128;
        let rhs = (best.num as u128) * c.den as u128;
        if lhs > rhs || (lhs == rhs && c.argmax < best.argmax) {
            best = c;
        }
    }
    let value = Rational::new(best.num as u128, best.den as u128).expect("den >= 1");
    let value_f64 = value.to_f64();
    let loglog = math::ln(math::ln(limit as f64));
    MaxScanResult {
        limit,
        argmax: best.argmax,
        value,
        value_f64,
        loglog_limit: loglog,
        ratio_to_loglog: value_f64 / loglog,
    }
}

/// Exhaustive maximum of `h(n)` for `n <= limit`, exact arithmetic, smallest
/// argmax on ties. Limits below 3 degenerate to `(1, 1)`.
pub fn max_scan(limit: u64) -> Result<MaxScanResult> {
    if limit > MAX_SCAN_LIMIT {
        return Err(Error::Capacity(format!(
            "max scan ceiling is {MAX_SCAN_LIMIT}, got {limit}"
        )));
    }
    if limit < 3 {
        return Ok(assemble_max(limit.max(1), &[]));
    }
    let maxes: Vec<ChunkMax> = scan_chunks(limit)
        .into_iter()
        .map(|(lo, hi)| max_scan_chunk(lo, hi))
        .collect();
    Ok(assemble_max(limit, &maxes))
}

// ---------------------------------------------------------------------------
// distribution snapshots
// ---------------------------------------------------------------------------

/// Frequency table of one chunk, keyed by the reduced rational value.
pub fn distribution_chunk(lo: u64, hi: u64) -> BTreeMap<(u64, u64), u64> {
    let mut map = BTreeMap::new();
    for_each_h(lo, hi, |_, num, den| {
        let g = gcd_u64(num, den);
        *map.entry((num / g, den / g)).or_insert(0u64) += 1;
    });
    map
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn merge_distribution(into: &mut BTreeMap<(u64, u64), u64>, from: BTreeMap<(u64, u64), u64>) {
    for (key, count) in from {
        *into.entry(key).or_insert(0) += count;
    }
}

/// Exact distribution of `h(n)` over `n <= n_max`: support values with
/// frequencies, sorted by value, with an evaluable empirical CDF.
#[derive(Debug, Clone)]
pub struct DistributionSnapshot {
    pub n_max: u64,
    /// `(value, frequency)`, strictly increasing in value.
    pub entries: Vec<(Rational, u64)>,
    cumulative: Vec<u64>,
}

pub fn assemble_distribution(n_max: u64, merged: BTreeMap<(u64, u64), u64>) -> DistributionSnapshot {
    let mut entries: Vec<(Rational, u64)> = merged
        .into_iter()
        .map(|((num, den), c)| (Rational::new(num as u128, den as u128).expect("den >= 1"), c))
        .collect();
    entries.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    let mut cumulative = Vec::with_capacity(entries.len());
    let mut acc = 0u64;
    for &(_, c) in &entries {
        acc += c;
        cumulative.push(acc);
    }
    DistributionSnapshot {
        n_max,
        entries,
        cumulative,
    }
}

pub fn distribution_snapshot(n_max: u64) -> Result<DistributionSnapshot> {
    if n_max == 0 {
        return Err(Error::Domain("snapshot needs N >= 1".into()));
    }
    if n_max > SNAPSHOT_LIMIT {
        return Err(Error::Capacity(format!(
            "snapshot ceiling is {SNAPSHOT_LIMIT}, got {n_max}"
        )));
    }
    let mut merged = BTreeMap::new();
    for (lo, hi) in scan_chunks(n_max) {
        merge_distribution(&mut merged, distribution_chunk(lo, hi));
    }
    Ok(assemble_distribution(n_max, merged))
}

impl DistributionSnapshot {
    pub fn total(&self) -> u64 {
        self.cumulative.last().copied().unwrap_or(0)
    }

    /// Empirical CDF at a real threshold.
    pub fn cdf(&self, t: f64) -> f64 {
        let idx = self.entries.partition_point(|(v, _)| v.to_f64() <= t);
        if idx == 0 {
            0.0
        } else {
            self.cumulative[idx - 1] as f64 / self.n_max as f64
        }
    }

    pub fn frequency(&self, value: &Rational) -> u64 {
        match self.entries.binary_search_by(|(v, _)| v.cmp(value)) {
            Ok(idx) => self.entries[idx].1,
            Err(_) => 0,
        }
    }

    /// Lower median: smallest support value with cumulative count at least
    /// half the total.
    pub fn median(&self) -> Rational {
        let half = self.total().div_ceil(2);
        let idx = self.cumulative.partition_point(|&c| c < half);
        self.entries[idx].0
    }

    pub fn mean(&self) -> f64 {
        let mut sum = Kahan::default();
        for &(v, c) in &self.entries {
            sum.add(v.to_f64() * c as f64);
        }
        sum.value() / self.n_max as f64
    }
}

/// Exact Kolmogorov distance between two empirical distributions, taking the
/// supremum over every support atom of either side.
pub fn kolmogorov_distance(a: &DistributionSnapshot, b: &DistributionSnapshot) -> f64 {
    let (na, nb) = (a.n_max as f64, b.n_max as f64);
    let mut best = 0.0f64;
    let mut i = 0;
    let mut j = 0;
    let mut ca = 0u64;
    let mut cb = 0u64;
    while i < a.entries.len() || j < b.entries.len() {
        let take_a = match (a.entries.get(i), b.entries.get(j)) {
            (Some((va, _)), Some((vb, _))) => va <= vb,
            (Some(_), None) => true,
            (None, _) => false,
        };
        if take_a {
            let v = a.entries[i].0;
            ca = a.cumulative[i];
            i += 1;
            if j < b.entries.len() && b.entries[j].0 == v {
                cb = b.cumulative[j];
                j += 1;
            }
        } else {
            cb = b.cumulative[j];
            j += 1;
        }
        let d = math::abs(ca as f64 / na - cb as f64 / nb);
        if d > best {
            best = d;
        }
    }
    best
}

// ---------------------------------------------------------------------------
// limiting-distribution apparatus
// ---------------------------------------------------------------------------

/// Partial sum of a prime series with a bracketed tail.
#[derive(Debug, Clone, Copy)]
pub struct SeriesEstimate {
    pub truncation: u64,
    pub partial: f64,
    pub tail_low: f64,
    pub tail_high: f64,
}

/// The three convergence-test series for `ln h(n)`, evaluated over primes up
/// to the truncation. The values `ln h(p) = ln((p-1)/(p-2))` never exceed
/// ln 2, so the large-value series has no terms at all; the other two have
/// `1/p^2`-regime tails bracketed through the prime zeta references.
#[derive(Debug, Clone, Copy)]
pub struct ErdosWintnerSeries {
    /// over primes with `|ln h(p)| > 1`: identically empty
    pub large_values: SeriesEstimate,
    /// `sum ln h(p) / p`
    pub linear: SeriesEstimate,
    /// `sum (ln h(p))^2 / p`
    pub quadratic: SeriesEstimate,
}

pub fn erdos_wintner_series(limit: u64) -> Result<ErdosWintnerSeries> {
    if limit < 1_000 {
        return Err(Error::Domain(format!("series need a truncation >= 1000, got {limit}")));
    }
    let sieve = PrimeSieve::new(limit)?;
    let mut linear = Kahan::default();
    let mut quadratic = Kahan::default();
    let mut inv2 = Kahan::default();
    let mut inv3 = Kahan::default();
    for p in sieve.iter() {
        let pf = p as f64;
        let x = 1.0 / pf;
        inv2.add(x * x);
        inv3.add(x * x * x);
        if p == 2 {
            continue;
        }
        let theta = math::ln_1p(1.0 / (pf - 2.0));
        linear.add(theta / pf);
        quadratic.add(theta * theta / pf);
    }
    let t2 = (PRIME_ZETA_2 - inv2.value()).max(0.0);
    let t3 = (PRIME_ZETA_3 - inv3.value()).max(0.0);
    let pf = limit as f64;
    // 1/(p-1) <= ln h(p) <= 1/(p-2) brackets both tails
    let stretch = 1.0 / (1.0 - 2.0 / pf);
    Ok(ErdosWintnerSeries {
        large_values: SeriesEstimate {
            truncation: limit,
            partial: 0.0,
            tail_low: 0.0,
            tail_high: 0.0,
        },
        linear: SeriesEstimate {
            truncation: limit,
            partial: linear.value(),
            tail_low: t2,
            tail_high: t2 * stretch + 1e-15,
        },
        quadratic: SeriesEstimate {
            truncation: limit,
            partial: quadratic.value(),
            tail_low: t3,
            tail_high: t3 * stretch * stretch + 1e-15,
        },
    })
}

/// Limit characteristic function of `ln h(n)` as a truncated product over
/// primes. The factor at `p` closes to `((p-1) + e^{i t ln h(p)}) / p`,
/// which is exactly 1 at `t = 0`; the `p = 2` factor is exactly 1.
pub fn char_function(t: f64, limit: u64) -> Result<Complex> {
    if limit < 1_000 {
        return Err(Error::Domain(format!("product needs a truncation >= 1000, got {limit}")));
    }
    let sieve = PrimeSieve::new(limit)?;
    let mut acc = Complex::ONE;
    for p in sieve.iter().skip(1) {
        let pf = p as f64;
        let theta = math::ln_1p(1.0 / (pf - 2.0));
        let factor = Complex::new(
            (pf - 1.0 + math::cos(t * theta)) / pf,
            math::sin(t * theta) / pf,
        );
        acc = acc.mul(factor);
    }
    Ok(acc)
}

/// One chunk of the empirical characteristic function sum
/// `sum_n e^{i t ln h(n)}`.
pub fn empirical_char_chunk(t: f64, lo: u64, hi: u64) -> (f64, f64) {
    let mut re = Kahan::default();
    let mut im = Kahan::default();
    for_each_h(lo, hi, |_, num, den| {
        let arg = t * math::ln(num as f64 / den as f64);
        re.add(math::cos(arg));
        im.add(math::sin(arg));
    });
    (re.value(), im.value())
}

pub fn assemble_char(n_max: u64, parts: &[(f64, f64)]) -> Complex {
    let mut re = 0.0;
    let mut im = 0.0;
    for &(r, i) in parts {
        re += r;
        im += i;
    }
    Complex::new(re / n_max as f64, im / n_max as f64)
}

/// `(1/N) sum_{n<=N} e^{i t ln h(n)}`.
pub fn empirical_char_function(t: f64, n_max: u64) -> Result<Complex> {
    if n_max == 0 || n_max > MAX_SCAN_LIMIT {
        return Err(Error::Capacity(format!(
            "empirical scan needs 1 <= N <= {MAX_SCAN_LIMIT}, got {n_max}"
        )));
    }
    let parts: Vec<(f64, f64)> = scan_chunks(n_max)
        .into_iter()
        .map(|(lo, hi)| empirical_char_chunk(t, lo, hi))
        .collect();
    Ok(assemble_char(n_max, &parts))
}
