//! Numerical study of `L(q) = prod_{2<p<=q} (p-1)/(p-2)`: its growth against
//! `ln q`, the series decomposition of its logarithm, and pair-constant
//! scans `C(0, d(n))` along structured diameter sequences.
//!
//! Two candidate growth constants are carried side by side everywhere:
//! `e^gamma / (2*C2) = 1.348966...`, which follows from the third Mertens
//! theorem via `(p-1)/(p-2) = (1-1/p) / [(1-1/(p-1)^2)(1-1/p)^2]`, and the
//! twin-pair value `2*C2 = 1.320324...` that is sometimes quoted in its
//! place. The measured ratio `L(q)/ln q` settles on the first; reports flag
//! the ~2% gap to the second rather than asserting either silently.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::constants::{EULER_GAMMA, MEISSEL_MERTENS, PRIME_ZETA_2, PRIME_ZETA_3, TWO_C2};
use crate::error::Error;
use crate::hfun::{self, SeriesEstimate};
use crate::math::{self, Kahan};
use crate::primes::PrimeSieve;
use crate::Result;

/// Ceiling for streamed products and growth checkpoints.
pub const GROWTH_LIMIT_MAX: u64 = 100_000_000;

/// Ceiling for sequence scan lengths.
pub const SEQUENCE_N_MAX: u64 = 1_000_000;

/// Mertens-derived growth constant `e^gamma / (2*C2)`.
pub fn mertens_growth_constant() -> f64 {
    math::exp(EULER_GAMMA) / TWO_C2
}

/// `L(q) = prod_{2<p<=q} (p-1)/(p-2)`, log-space compensated. Values of `q`
/// below 3 give the empty product 1.
pub fn ratio_product(q: u64) -> Result<f64> {
    if q < 3 {
        return Ok(1.0);
    }
    if q > GROWTH_LIMIT_MAX {
        return Err(Error::Capacity(format!(
            "product limit {q} exceeds ceiling {GROWTH_LIMIT_MAX}"
        )));
    }
    let mut sum = Kahan::default();
    for p in PrimeSieve::new(q)?.iter().skip(1) {
        let pf = p as f64;
        sum.add(math::ln_1p(1.0 / (pf - 2.0)));
    }
    Ok(math::exp(sum.value()))
}

#[derive(Debug, Clone, Copy)]
pub struct GrowthPoint {
    pub q: u64,
    pub product: f64,
    pub ratio_to_ln: f64,
}

/// `L(q)/ln q` at several checkpoints, with a stability metric and the two
/// candidate constants.
#[derive(Debug, Clone)]
pub struct GrowthReport {
    pub points: Vec<GrowthPoint>,
    /// Max pairwise relative difference over the last (up to) three points.
    pub stability: f64,
    pub mertens_candidate: f64,
    pub pair_constant_candidate: f64,
    /// Relative deviation of the last ratio from each candidate.
    pub deviation_from_mertens: f64,
    pub deviation_from_pair_constant: f64,
}

pub fn growth_report(q_points: &[u64]) -> Result<GrowthReport> {
    if q_points.len() < 2 {
        return Err(Error::Domain("growth report needs at least two checkpoints".into()));
    }
    for w in q_points.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::Domain("checkpoints must be strictly increasing".into()));
        }
    }
    let max_q = *q_points.last().expect("nonempty");
    if max_q > GROWTH_LIMIT_MAX {
        return Err(Error::Capacity(format!(
            "checkpoint {max_q} exceeds ceiling {GROWTH_LIMIT_MAX}"
        )));
    }
    if q_points[0] < 3 {
        return Err(Error::Domain("checkpoints must be at least 3".into()));
    }
    let mut points = Vec::with_capacity(q_points.len());
    let mut sum = Kahan::default();
    let mut idx = 0;
    for p in PrimeSieve::new(max_q)?.iter() {
        while idx < q_points.len() && p > q_points[idx] {
            let q = q_points[idx];
            let product = math::exp(sum.value());
            points.push(GrowthPoint {
                q,
                product,
                ratio_to_ln: product / math::ln(q as f64),
            });
            idx += 1;
        }
        if p > 2 {
            let pf = p as f64;
            sum.add(math::ln_1p(1.0 / (pf - 2.0)));
        }
    }
    while idx < q_points.len() {
        let q = q_points[idx];
        let product = math::exp(sum.value());
        points.push(GrowthPoint {
            q,
            product,
            ratio_to_ln: product / math::ln(q as f64),
        });
        idx += 1;
    }
    let tail = &points[points.len().saturating_sub(3)..];
    let mut stability = 0.0f64;
    for (i, a) in tail.iter().enumerate() {
        for b in &tail[i + 1..] {
            let rel = math::abs(a.ratio_to_ln - b.ratio_to_ln) / b.ratio_to_ln;
            stability = stability.max(rel);
        }
    }
    let last = points.last().expect("at least two points").ratio_to_ln;
    let mertens = mertens_growth_constant();
    Ok(GrowthReport {
        points,
        stability,
        mertens_candidate: mertens,
        pair_constant_candidate: TWO_C2,
        deviation_from_mertens: math::abs(last - mertens) / mertens,
        deviation_from_pair_constant: math::abs(last - TWO_C2) / TWO_C2,
    })
}

/// Series decomposition of `ln L(q) = sum_{2<p<=q} ln(1 + 1/(p-2))`:
/// partial sums of `1/(p-2)^m`, the cross sum `sum 2/(p(p-2))`, and the
/// bracketed constant `K` with `L(q) ~ e^K ln q`.
#[derive(Debug, Clone)]
pub struct DecompositionReport {
    pub q: u64,
    /// `sum 1/(p-2)`; divergent, reported as a bare partial.
    pub shifted_reciprocal: SeriesEstimate,
    pub shifted_squares: SeriesEstimate,
    pub shifted_cubes: SeriesEstimate,
    /// `sum_{p>2} 2/(p(p-2))`, convergent.
    pub cross_sum: SeriesEstimate,
    /// `S1(q) - ln ln q`; stabilizes at `B - 1/2 + cross_sum`.
    pub s1_minus_loglog: f64,
    pub meissel_mertens: f64,
    /// Bracket for `K`, dominated by the alternating remainder bound.
    pub log_constant_low: f64,
    pub log_constant_high: f64,
    /// `e^K` bracket.
    pub growth_low: f64,
    pub growth_high: f64,
    pub mertens_candidate: f64,
    pub pair_constant_candidate: f64,
}

struct DecompositionSums {
    s: [Kahan; 6], // sum 1/(p-2)^m for m = 1..=6
    m7: Kahan,
    cross: Kahan,
    inv2: Kahan,
    inv3: Kahan,
}

fn decomposition_sums(q: u64) -> Result<DecompositionSums> {
    let mut acc = DecompositionSums {
        s: [Kahan::default(); 6],
        m7: Kahan::default(),
        cross: Kahan::default(),
        inv2: Kahan::default(),
        inv3: Kahan::default(),
    };
    for p in PrimeSieve::new(q)?.iter() {
        let pf = p as f64;
        let x = 1.0 / pf;
        acc.inv2.add(x * x);
        acc.inv3.add(x * x * x);
        if p == 2 {
            continue;
        }
        let sh = 1.0 / (pf - 2.0);
        let mut pw = 1.0;
        for s in &mut acc.s {
            pw *= sh;
            s.add(pw);
        }
        acc.m7.add(pw * sh);
        acc.cross.add(2.0 / (pf * (pf - 2.0)));
    }
    Ok(acc)
}

pub fn log_decomposition(q: u64) -> Result<DecompositionReport> {
    if q < 1_000 {
        return Err(Error::Domain(format!("decomposition needs q >= 1000, got {q}")));
    }
    if q > GROWTH_LIMIT_MAX {
        return Err(Error::Capacity(format!(
            "decomposition limit {q} exceeds ceiling {GROWTH_LIMIT_MAX}"
        )));
    }
    let sums = decomposition_sums(q)?;
    let qf = q as f64;
    let t2 = (PRIME_ZETA_2 - sums.inv2.value()).max(0.0);
    let t3 = (PRIME_ZETA_3 - sums.inv3.value()).max(0.0);
    let stretch = 1.0 / (1.0 - 2.0 / qf);
    // 1/(p-2)^m = p^-m / (1-2/p)^m brackets the convergent tails
    let tail_m = |m: u32, t_ref: f64| -> (f64, f64) {
        (t_ref, t_ref * math::powi(stretch, m) + 1e-15)
    };
    let (s2lo, s2hi) = tail_m(2, t2);
    let (s3lo, s3hi) = tail_m(3, t3);
    let crosslo = 2.0 * t2;
    let crosshi = 2.0 * t2 * stretch + 1e-15;
    // sum_{p>q} 1/(p-2)^m <= sum_{n>q-2} n^-m for m >= 4
    let trivial_tail = |m: u32| 1.0 / ((m as f64 - 1.0) * math::powi(qf - 2.0, m - 1));

    let s1 = sums.s[0].value();
    let s2 = sums.s[1].value();
    let s3 = sums.s[2].value();
    let m4 = sums.s[3].value();
    let m5 = sums.s[4].value();
    let m6 = sums.s[5].value();
    let m7 = sums.m7.value();
    let cross = sums.cross.value();

    let base = MEISSEL_MERTENS - 0.5;
    // ln L(q) = sum ln(1 + 1/(p-2)) alternates through the shifted power
    // sums; stopping after -M6/6 leaves a remainder in [0, M7/7]
    let low = base + (cross + crosslo) - (s2 + s2hi) / 2.0 + (s3 + s3lo) / 3.0
        - (m4 + trivial_tail(4)) / 4.0
        + m5 / 5.0
        - (m6 + trivial_tail(6)) / 6.0;
    let high = base + (cross + crosshi) - (s2 + s2lo) / 2.0 + (s3 + s3hi) / 3.0 - m4 / 4.0
        + (m5 + trivial_tail(5)) / 5.0
        - m6 / 6.0
        + (m7 + trivial_tail(7)) / 7.0;

    Ok(DecompositionReport {
        q,
        shifted_reciprocal: SeriesEstimate {
            truncation: q,
            partial: s1,
            tail_low: f64::INFINITY,
            tail_high: f64::INFINITY,
        },
        shifted_squares: SeriesEstimate {
            truncation: q,
            partial: s2,
            tail_low: s2lo,
            tail_high: s2hi,
        },
        shifted_cubes: SeriesEstimate {
            truncation: q,
            partial: s3,
            tail_low: s3lo,
            tail_high: s3hi,
        },
        cross_sum: SeriesEstimate {
            truncation: q,
            partial: cross,
            tail_low: crosslo,
            tail_high: crosshi,
        },
        s1_minus_loglog: s1 - math::ln(math::ln(qf)),
        meissel_mertens: MEISSEL_MERTENS,
        log_constant_low: low,
        log_constant_high: high,
        growth_low: math::exp(low),
        growth_high: math::exp(high),
        mertens_candidate: mertens_growth_constant(),
        pair_constant_candidate: TWO_C2,
    })
}

// ---------------------------------------------------------------------------
// diameter sequences
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SequenceKind {
    /// `d(n) = 2^n`: the constant never moves from `2*C2`.
    PowerOfTwo,
    /// `d(n) = p_n`: decreasing to `2*C2` once past `p_1 = 2`.
    NthPrime,
    /// `d(n) = primorial(n)`: grows like `e^gamma * ln q_n`.
    Primorial,
    /// `d(n) = 2n`: no limit; oscillates with the divisor structure.
    Linear,
}

impl SequenceKind {
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "power_of_two" => Ok(SequenceKind::PowerOfTwo),
            "nth_prime" => Ok(SequenceKind::NthPrime),
            "primorial" => Ok(SequenceKind::Primorial),
            "linear" => Ok(SequenceKind::Linear),
            other => Err(Error::Parse {
                position: 0,
                message: format!(
                    "unknown sequence '{other}' (expected power_of_two, nth_prime, primorial, linear)"
                ),
            }),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SequenceKind::PowerOfTwo => "power_of_two",
            SequenceKind::NthPrime => "nth_prime",
            SequenceKind::Primorial => "primorial",
            SequenceKind::Linear => "linear",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScanPoint {
    pub index: u64,
    /// Display form of the diameter; always present even when the integer
    /// value would overflow.
    pub d_description: String,
    /// The diameter as an integer, when it fits u64.
    pub d: Option<u64>,
    pub constant: f64,
}

#[derive(Debug, Clone)]
pub struct SequenceScan {
    pub kind: SequenceKind,
    pub points: Vec<ScanPoint>,
    /// Set when the scan stopped early because the diameter left u64 range.
    pub truncated: bool,
    /// Least-squares slope of the constant against `ln q_n`; primorial only.
    pub slope_vs_log: Option<f64>,
}

impl SequenceScan {
    /// `(max - min, mean, (max - min)/mean)` over the trailing decile.
    pub fn trailing_decile_spread(&self) -> Option<(f64, f64, f64)> {
        if self.points.is_empty() {
            return None;
        }
        let start = self.points.len() - self.points.len().div_ceil(10);
        let tail = &self.points[start..];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut sum = Kahan::default();
        for p in tail {
            lo = lo.min(p.constant);
            hi = hi.max(p.constant);
            sum.add(p.constant);
        }
        let mean = sum.value() / tail.len() as f64;
        Some((hi - lo, mean, (hi - lo) / mean))
    }
}

pub fn sequence_scan(kind: SequenceKind, n_max: u64) -> Result<SequenceScan> {
    if n_max == 0 {
        return Err(Error::Domain("scan needs n_max >= 1".into()));
    }
    if n_max > SEQUENCE_N_MAX {
        return Err(Error::Capacity(format!(
            "scan ceiling is {SEQUENCE_N_MAX} points, got {n_max}"
        )));
    }
    let mut points = Vec::new();
    let mut truncated = false;
    let mut slope = None;
    match kind {
        SequenceKind::PowerOfTwo => {
            // no odd prime ever divides 2^n: every point is exactly 2*C2
            let last = n_max.min(63);
            truncated = n_max > 63;
            for n in 1..=last {
                let d = 1u64 << n;
                points.push(ScanPoint {
                    index: n,
                    d_description: format!("{d}"),
                    d: Some(d),
                    constant: TWO_C2,
                });
            }
        }
        SequenceKind::NthPrime => {
            let bound = nth_prime_bound(n_max);
            let sieve = PrimeSieve::new(bound)?;
            for (i, p) in sieve.iter().enumerate() {
                let n = i as u64 + 1;
                if n > n_max {
                    break;
                }
                let pf = p as f64;
                let constant = if p == 2 { TWO_C2 } else { TWO_C2 * (pf - 1.0) / (pf - 2.0) };
                points.push(ScanPoint {
                    index: n,
                    d_description: format!("{p}"),
                    d: Some(p),
                    constant,
                });
            }
        }
        SequenceKind::Primorial => {
            let bound = nth_prime_bound(n_max);
            let sieve = PrimeSieve::new(bound)?;
            let mut log_sum = Kahan::default();
            let mut d_int: Option<u64> = Some(1);
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for (i, p) in sieve.iter().enumerate() {
                let n = i as u64 + 1;
                if n > n_max {
                    break;
                }
                if p > 2 {
                    log_sum.add(math::ln_1p(1.0 / (p as f64 - 2.0)));
                }
                d_int = d_int.and_then(|d| d.checked_mul(p));
                let constant = TWO_C2 * math::exp(log_sum.value());
                points.push(ScanPoint {
                    index: n,
                    d_description: match d_int {
                        Some(d) => format!("{d}"),
                        None => format!("primorial({n})"),
                    },
                    d: d_int,
                    constant,
                });
                xs.push(math::ln(p as f64));
                ys.push(constant);
            }
            slope = least_squares_slope(&xs, &ys);
        }
        SequenceKind::Linear => {
            // C(0, 2n) = 2*C2 * h(n): the factor of two contributes nothing
            hfun::for_each_h(1, n_max + 1, |n, num, den| {
                let d = 2 * n;
                points.push(ScanPoint {
                    index: n,
                    d_description: format!("{d}"),
                    d: Some(d),
                    constant: TWO_C2 * (num as f64 / den as f64),
                });
            });
        }
    }
    Ok(SequenceScan {
        kind,
        points,
        truncated,
        slope_vs_log: slope,
    })
}

fn nth_prime_bound(n: u64) -> u64 {
    if n < 6 {
        13
    } else {
        let x = n as f64;
        let ln = math::ln(x);
        (x * (ln + math::ln(ln))) as u64 + 2
    }
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}
