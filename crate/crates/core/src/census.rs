//! Exact counts of prime tuples by segmented sieve, with the independence,
//! parity-corrected, and singular-series predictions attached.
//!
//! A tuple with pattern offsets `H` is counted at its start `n` when every
//! `n + h` is prime. "Up to x" is ambiguous between `n <= x` and
//! `n + diameter <= x`; both conventions are supported and differ by
//! O(diameter) counts.
//!
//! Counting runs over fixed absolute segments, each sieved independently
//! (the segment plus a diameter of lookahead), so any execution order gives
//! identical totals.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::patterns::Pattern;
use crate::primes::{self, is_prime, isqrt};
use crate::singular::{
    cramer_prediction, log_power_integral, parity_prediction, SingularEngine, SingularSeriesValue,
};
use crate::Result;

/// Ceiling for census runs.
pub const CENSUS_LIMIT_MAX: u64 = 100_000_000;

/// Integers per census segment.
pub const CENSUS_SEGMENT: u64 = 1 << 21;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountMode {
    /// Count tuples whose start satisfies `n <= x`.
    StartWithin,
    /// Count tuples entirely below the bound: `n + diameter <= x`.
    WholeWithin,
}

impl CountMode {
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "start" => Ok(CountMode::StartWithin),
            "whole" => Ok(CountMode::WholeWithin),
            other => Err(Error::Parse {
                position: 0,
                message: format!("unknown count mode '{other}' (expected start or whole)"),
            }),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CountMode::StartWithin => "start",
            CountMode::WholeWithin => "whole",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Checkpoint {
    pub x: u64,
    pub observed: u64,
    pub cramer: f64,
    pub parity: f64,
    pub hl_ratio: f64,
    pub hl_integral: f64,
}

#[derive(Debug, Clone)]
pub struct TupleCensus {
    pub pattern: Pattern,
    pub mode: CountMode,
    pub singular: SingularSeriesValue,
    pub checkpoints: Vec<Checkpoint>,
}

/// Fixed absolute segmentation of the start range `[2, limit]`.
pub fn census_chunks(limit: u64) -> Vec<(u64, u64)> {
    let mut chunks = Vec::new();
    let mut lo = 2u64;
    while lo <= limit {
        let next = ((lo / CENSUS_SEGMENT) + 1) * CENSUS_SEGMENT;
        let hi = next.min(limit + 1);
        chunks.push((lo, hi));
        lo = hi;
    }
    chunks
}

/// Count tuple starts within `[lo, hi)`, bucketed per checkpoint bound:
/// entry `i` counts starts `n` with `n <= bounds[i]`. `bounds` must be
/// sorted. The segment sieves its own window plus a diameter of lookahead.
pub fn count_chunk(pattern: &Pattern, lo: u64, hi: u64, bounds: &[u64]) -> Vec<u64> {
    let mut deltas = vec![0u64; bounds.len() + 1];
    if hi <= lo {
        return vec![0; bounds.len()];
    }
    let offsets = pattern.offsets();
    let diameter = pattern.diameter();
    let window_hi = (hi - 1) + diameter; // largest value that must be testable
    let wlo = if lo % 2 == 0 { lo + 1 } else { lo }.max(3);
    let slots = if window_hi < wlo {
        0
    } else {
        ((window_hi - wlo) / 2 + 1) as usize
    };
    let base = primes::primes_up_to(isqrt(window_hi))
        .expect("census windows stay within the sieve ceiling");
    let odd_base: Vec<u32> = base.iter().skip(1).map(|&p| p as u32).collect();
    let words = crate::primes::sieve_segment(&odd_base, wlo, slots);
    let composite = |n: u64| -> bool {
        debug_assert!(n >= wlo && n % 2 == 1);
        let bit = ((n - wlo) / 2) as usize;
        words[bit / 64] >> (bit % 64) & 1 == 1
    };

    let mut record = |n: u64| {
        let idx = bounds.partition_point(|&b| b < n);
        deltas[idx] += 1;
    };

    // the only even start that can head a tuple is n = 2 itself
    if lo <= 2 && 2 < hi && offsets.iter().all(|&h| is_prime(2 + h)) {
        record(2);
    }
    let mut n = wlo;
    while n < hi {
        if !composite(n) {
            let hit = offsets[1..].iter().all(|&h| !composite(n + h));
            if hit {
                record(n);
            }
        }
        n += 2;
    }

    // prefix over the buckets: count at bound i includes every earlier delta
    let mut counts = vec![0u64; bounds.len()];
    let mut acc = 0u64;
    for i in 0..bounds.len() {
        acc += deltas[i];
        counts[i] = acc;
    }
    counts
}

/// Validated census inputs plus the fixed chunk layout: the raw material a
/// driver (sequential or parallel) feeds through [`count_chunk`] and then
/// into [`assemble_census`].
#[derive(Debug, Clone)]
pub struct CensusPlan {
    pub pattern: Pattern,
    pub mode: CountMode,
    /// Checkpoint values as reported.
    pub xs: Vec<u64>,
    /// Mode-adjusted start bounds fed to the chunks.
    pub bounds: Vec<u64>,
    pub chunks: Vec<(u64, u64)>,
}

pub fn census_plan(
    pattern: &Pattern,
    x: u64,
    checkpoints: &[u64],
    mode: CountMode,
) -> Result<CensusPlan> {
    if let Some(witness) = pattern.admissibility_witness() {
        return Err(Error::Inadmissible { witness });
    }
    if x > CENSUS_LIMIT_MAX {
        return Err(Error::Capacity(format!(
            "census ceiling is {CENSUS_LIMIT_MAX}, got {x}"
        )));
    }
    if x < 3 {
        return Err(Error::Domain(format!("census needs x >= 3, got {x}")));
    }
    let mut xs: Vec<u64> = checkpoints.to_vec();
    if !xs.contains(&x) {
        xs.push(x);
    }
    for w in xs.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::Domain("checkpoints must be strictly increasing".into()));
        }
    }
    if xs[0] < 3 || *xs.last().expect("nonempty") > x {
        return Err(Error::Domain(format!("checkpoints must lie in [3, {x}]")));
    }
    let diameter = pattern.diameter();
    let bounds: Vec<u64> = match mode {
        CountMode::StartWithin => xs.clone(),
        CountMode::WholeWithin => xs.iter().map(|&c| c.saturating_sub(diameter)).collect(),
    };
    let start_limit = *bounds.last().expect("nonempty");
    let chunks = if start_limit >= 2 {
        census_chunks(start_limit)
    } else {
        Vec::new()
    };
    Ok(CensusPlan {
        pattern: pattern.clone(),
        mode,
        xs,
        bounds,
        chunks,
    })
}

/// Fold per-chunk bucket counts (one vector per chunk, in any order) and
/// attach the predictions.
pub fn assemble_census(
    engine: &SingularEngine,
    plan: &CensusPlan,
    chunk_counts: &[Vec<u64>],
) -> Result<TupleCensus> {
    let mut totals = vec![0u64; plan.bounds.len()];
    for counts in chunk_counts {
        for (t, c) in totals.iter_mut().zip(counts) {
            *t += c;
        }
    }
    let singular = engine.singular_series(&plan.pattern)?;
    let k = plan.pattern.len() as u32;
    let rows = plan
        .xs
        .iter()
        .zip(&totals)
        .map(|(&c, &observed)| {
            let xf = c as f64;
            let cram = cramer_prediction(xf, k)?;
            Ok(Checkpoint {
                x: c,
                observed,
                cramer: cram,
                parity: parity_prediction(xf, k)?,
                hl_ratio: singular.value * cram,
                hl_integral: singular.value * log_power_integral(xf, k),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TupleCensus {
        pattern: plan.pattern.clone(),
        mode: plan.mode,
        singular,
        checkpoints: rows,
    })
}

/// Exact census with predictions at each checkpoint. Checkpoints must be
/// strictly increasing and at least 3; the final bound `x` is appended when
/// absent. Counts at a checkpoint `c` follow the mode: starts `n <= c`, or
/// whole tuples `n + diameter <= c`.
pub fn count_tuples(
    engine: &SingularEngine,
    pattern: &Pattern,
    x: u64,
    checkpoints: &[u64],
    mode: CountMode,
) -> Result<TupleCensus> {
    let plan = census_plan(pattern, x, checkpoints, mode)?;
    let counts: Vec<Vec<u64>> = plan
        .chunks
        .iter()
        .map(|&(lo, hi)| count_chunk(&plan.pattern, lo, hi, &plan.bounds))
        .collect();
    assemble_census(engine, &plan, &counts)
}

#[derive(Debug, Clone, Copy)]
pub struct DeviationRow {
    pub x: u64,
    pub observed: u64,
    pub ratio_cramer: f64,
    pub ratio_parity: f64,
    pub ratio_hl_ratio: f64,
    pub ratio_hl_integral: f64,
}

/// Observed-over-predicted ratios for the three models at each checkpoint.
pub fn deviation_report(census: &TupleCensus) -> Vec<DeviationRow> {
    census
        .checkpoints
        .iter()
        .map(|c| DeviationRow {
            x: c.x,
            observed: c.observed,
            ratio_cramer: c.observed as f64 / c.cramer,
            ratio_parity: c.observed as f64 / c.parity,
            ratio_hl_ratio: c.observed as f64 / c.hl_ratio,
            ratio_hl_integral: c.observed as f64 / c.hl_integral,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math;
    use crate::singular::DEFAULT_TRUNCATION;

    fn pat(offsets: &[u64]) -> Pattern {
        Pattern::new(offsets.to_vec()).unwrap()
    }

    fn engine() -> SingularEngine {
        SingularEngine::new(DEFAULT_TRUNCATION).unwrap()
    }

    /// Trial-division census, independent of the sieve path.
    fn oracle_count(offsets: &[u64], start_limit: u64) -> u64 {
        (2..=start_limit)
            .filter(|&n| offsets.iter().all(|&h| is_prime(n + h)))
            .count() as u64
    }

    #[test]
    fn twin_starts_up_to_ten() {
        let e = engine();
        let census = count_tuples(&e, &pat(&[0, 2]), 10, &[], CountMode::StartWithin).unwrap();
        assert_eq!(census.checkpoints.len(), 1);
        assert_eq!(census.checkpoints[0].observed, 2); // n = 3, 5
    }

    #[test]
    fn mode_changes_counts_by_boundary_tuples() {
        let e = engine();
        let start = count_tuples(&e, &pat(&[0, 2]), 12, &[], CountMode::StartWithin).unwrap();
        assert_eq!(start.checkpoints[0].observed, 3); // 3, 5, 11
        let whole = count_tuples(&e, &pat(&[0, 2]), 12, &[], CountMode::WholeWithin).unwrap();
        assert_eq!(whole.checkpoints[0].observed, 2); // (3,5), (5,7); (11,13) exceeds 12
    }

    #[test]
    fn matches_trial_division_oracle_at_1e5() {
        let e = engine();
        for offsets in [vec![0u64, 2], vec![0, 2, 6, 8]] {
            let p = pat(&offsets);
            let census = count_tuples(&e, &p, 100_000, &[], CountMode::StartWithin).unwrap();
            let expect = oracle_count(&offsets, 100_000);
            assert_eq!(census.checkpoints[0].observed, expect, "{offsets:?}");
        }
    }

    #[test]
    fn singleton_census_is_prime_count() {
        let e = engine();
        let census = count_tuples(&e, &pat(&[0]), 1_000_000, &[10, 100], CountMode::StartWithin)
            .unwrap();
        let observed: Vec<u64> = census.checkpoints.iter().map(|c| c.observed).collect();
        assert_eq!(observed, vec![4, 25, 78_498]);
    }

    #[test]
    fn checkpoint_counts_are_cumulative_and_non_decreasing() {
        let e = engine();
        let census = count_tuples(
            &e,
            &pat(&[0, 2]),
            200_000,
            &[10_000, 50_000, 100_000],
            CountMode::StartWithin,
        )
        .unwrap();
        let obs: Vec<u64> = census.checkpoints.iter().map(|c| c.observed).collect();
        assert_eq!(obs[0], oracle_count(&[0, 2], 10_000));
        for w in obs.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn segmentation_does_not_change_totals() {
        let p = pat(&[0, 2, 6, 8]);
        let bounds = [50_000u64];
        let whole: u64 = count_chunk(&p, 2, 50_001, &bounds)[0];
        for span in [1_000u64, 4_096, 30_000] {
            let mut total = 0;
            let mut lo = 2;
            while lo <= 50_000 {
                let hi = (lo + span).min(50_001);
                total += count_chunk(&p, lo, hi, &bounds)[0];
                lo = hi;
            }
            assert_eq!(total, whole, "span {span}");
        }
    }

    #[test]
    fn tuple_headed_by_two_is_counted() {
        // {0} is the only admissible pattern a tuple at n = 2 can satisfy
        let e = engine();
        let census = count_tuples(&e, &pat(&[0]), 10, &[], CountMode::StartWithin).unwrap();
        assert_eq!(census.checkpoints[0].observed, 4); // 2, 3, 5, 7
    }

    #[test]
    fn inadmissible_and_invalid_inputs() {
        let e = engine();
        assert!(matches!(
            count_tuples(&e, &pat(&[0, 1]), 100, &[], CountMode::StartWithin),
            Err(Error::Inadmissible { witness: 2 })
        ));
        assert!(count_tuples(&e, &pat(&[0, 2]), CENSUS_LIMIT_MAX + 1, &[], CountMode::StartWithin)
            .is_err());
        assert!(count_tuples(&e, &pat(&[0, 2]), 100, &[50, 50], CountMode::StartWithin).is_err());
        assert!(count_tuples(&e, &pat(&[0, 2]), 100, &[200], CountMode::StartWithin).is_err());
    }

    #[test]
    fn deviation_prefers_integral_form_for_twins() {
        let e = engine();
        let census =
            count_tuples(&e, &pat(&[0, 2]), 1_000_000, &[], CountMode::StartWithin).unwrap();
        let rows = deviation_report(&census);
        let row = rows.last().unwrap();
        let d_int = math::abs(row.ratio_hl_integral - 1.0);
        assert!(d_int < math::abs(row.ratio_cramer - 1.0));
        assert!(d_int < math::abs(row.ratio_parity - 1.0));
        assert!(d_int < math::abs(row.ratio_hl_ratio - 1.0));
        // independence model undercounts, parity overcounts
        assert!(row.ratio_cramer > 1.0);
        assert!(row.ratio_parity < 1.0);
    }

    #[test]
    fn symmetric_table_pattern_census_lands_near_prediction() {
        // 5-offset mirror pattern of diameter 240; counts at 1e6 are small
        // but should sit within a factor of two of the integral prediction
        let e = engine();
        let census = count_tuples(
            &e,
            &pat(&[0, 114, 120, 126, 240]),
            1_000_000,
            &[],
            CountMode::StartWithin,
        )
        .unwrap();
        let row = &deviation_report(&census)[0];
        assert!(row.observed > 0);
        assert!(
            row.ratio_hl_integral > 0.5 && row.ratio_hl_integral < 2.0,
            "ratio {}",
            row.ratio_hl_integral
        );
    }

    #[test]
    fn count_mode_parsing() {
        assert_eq!(CountMode::parse("start").unwrap(), CountMode::StartWithin);
        assert_eq!(CountMode::parse("whole").unwrap(), CountMode::WholeWithin);
        assert!(CountMode::parse("all").is_err());
    }
}
