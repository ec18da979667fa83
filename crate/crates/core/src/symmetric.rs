//! Subpattern machinery for symmetric patterns: the multiplicative split of
//! `S(H')/S(H)` at a threshold prime, strict-monotonicity audits over all
//! proper subpatterns, and reduction chains that delete mirror pairs.
//!
//! For `p0` above the diameter the ratio factors exactly as
//!
//! `S(H')/S(H) = prod_{p<p0} B_p * prod_{p>=p0} A_p`,
//!
//! with `B_p = (p - nu_p(H'))/(p - nu_p(H)) * (1-1/p)^(k-k')` and
//! `A_p = (p - k')/(p - k) * (1-1/p)^(k-k')`. Subpattern residue counts are
//! taken on the un-shifted offsets so both patterns sit in one residue
//! frame; shifting changes nothing (counts are translation invariant,
//! verified in tests).
//!
//! The strict inequality `S(H') < S(H)` and the bound `P_small < 1` are
//! checked instance by instance and violations are reported verbatim; the
//! uniform product bound `prod_{3<=p<p0}(1 - 1/p)` is evaluated for
//! comparison only, since factors `B_p` can individually exceed 1.

use alloc::format;
use alloc::vec::Vec;

use crate::error::Error;
use crate::math::{self, Kahan};
use crate::patterns::{distinct_residues, Pattern};
use crate::primes::{is_prime, next_prime_after};
use crate::singular::{KProfile, SingularEngine};
use crate::Result;

/// Deterministic generator for property sweeps (splitmix64).
#[derive(Debug, Clone)]
pub struct Lcg {
    state: u64,
}

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Lcg { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, bound: u64) -> u64 {
        self.next_u64() % bound
    }
}

/// The two factors of the ratio split, their product against the ratio
/// computed independently, and the tail excess `delta = P_big - 1`.
#[derive(Debug, Clone)]
pub struct RatioDecomposition {
    pub p0: u64,
    pub p_small: f64,
    pub p_big: f64,
    pub ratio: f64,
    /// `|p_small * p_big - ratio| / ratio`
    pub identity_gap: f64,
    pub delta: f64,
}

fn validate_subset(full: &Pattern, sub_offsets: &[u64]) -> Result<()> {
    if sub_offsets.is_empty() {
        return Err(Error::Domain("subpattern must be nonempty".into()));
    }
    for w in sub_offsets.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::Domain("subpattern offsets must be strictly increasing".into()));
        }
    }
    for h in sub_offsets {
        if !full.offsets().contains(h) {
            return Err(Error::Domain(format!("offset {h} is not in the pattern")));
        }
    }
    Ok(())
}

/// `P_small = prod_{p < p0} B_p` on the shared residue frame.
fn p_small_product(engine: &SingularEngine, full: &[u64], sub: &[u64], p0: u64) -> f64 {
    let exp_gap = (full.len() - sub.len()) as u32;
    let mut log_sum = Kahan::default();
    for &p32 in engine.primes() {
        let p = p32 as u64;
        if p >= p0 {
            break;
        }
        let pf = p as f64;
        let nu_full = distinct_residues(full, p);
        let nu_sub = distinct_residues(sub, p);
        log_sum.add(
            math::ln((pf - nu_sub as f64) / (pf - nu_full as f64))
                + exp_gap as f64 * math::ln_1p(-1.0 / pf),
        );
    }
    math::exp(log_sum.value())
}

/// `P_big = prod_{p0 <= p <= P} A_p`, tail-corrected the same way the
/// singular series itself is, so the split identity holds to roundoff.
fn p_big_product(engine: &SingularEngine, k: u64, k_sub: u64, p0: u64) -> f64 {
    let kf = k as f64;
    let kf_sub = k_sub as f64;
    let exp_gap = kf - kf_sub;
    let mut log_sum = Kahan::default();
    for &p32 in engine.primes() {
        let p = p32 as u64;
        if p < p0 {
            continue;
        }
        let pf = p as f64;
        log_sum.add(
            math::ln((pf - kf_sub) / (pf - kf)) + exp_gap * math::ln_1p(-1.0 / pf),
        );
    }
    let t2 = engine.tail_inverse_squares();
    let t3 = engine.tail_inverse_cubes();
    let tail = -(kf_sub * kf_sub - kf_sub - (kf * kf - kf)) / 2.0 * t2
        - (kf_sub * kf_sub * kf_sub - kf_sub - (kf * kf * kf - kf)) / 3.0 * t3;
    math::exp(log_sum.value() + tail)
}

/// Split `S(H_sub)/S(H)` at `p0`. The ratio itself is evaluated through two
/// independent singular-series computations; the reported gap is how far
/// `p_small * p_big` lands from it.
pub fn ratio_decomposition(
    engine: &SingularEngine,
    full: &Pattern,
    sub_offsets: &[u64],
    p0: u64,
) -> Result<RatioDecomposition> {
    if let Some(witness) = full.admissibility_witness() {
        return Err(Error::Inadmissible { witness });
    }
    validate_subset(full, sub_offsets)?;
    if !is_prime(p0) {
        return Err(Error::Domain(format!("threshold {p0} is not prime")));
    }
    if p0 <= full.diameter() {
        return Err(Error::Domain(format!(
            "threshold {p0} must exceed the diameter {}",
            full.diameter()
        )));
    }
    if p0 > engine.truncation() {
        return Err(Error::Domain(format!(
            "threshold {p0} exceeds the engine truncation {}",
            engine.truncation()
        )));
    }
    let p_small = p_small_product(engine, full.offsets(), sub_offsets, p0);
    let p_big = p_big_product(engine, full.len() as u64, sub_offsets.len() as u64, p0);
    let full_value = engine.singular_series(full)?.value;
    let min = *sub_offsets.first().expect("nonempty");
    let normalized: Vec<u64> = sub_offsets.iter().map(|&h| h - min).collect();
    let sub_value = engine.singular_series(&Pattern::new(normalized)?)?.value;
    let ratio = sub_value / full_value;
    Ok(RatioDecomposition {
        p0,
        p_small,
        p_big,
        ratio,
        identity_gap: math::abs(p_small * p_big - ratio) / ratio,
        delta: p_big - 1.0,
    })
}

/// A subpattern breaking the strict inequality, reported verbatim.
#[derive(Debug, Clone)]
pub struct Counterexample {
    pub sub_offsets: Vec<u64>,
    pub sub_value: f64,
    pub full_value: f64,
}

/// Per-subpattern audit of a symmetric admissible pattern: the strict
/// inequality, the split identity, and the `P_small < 1` bound, across all
/// proper nonempty subpatterns (or a seeded sample when there are more than
/// `sample_cap`).
#[derive(Debug, Clone)]
pub struct SubpatternAudit {
    pub p0: u64,
    pub full_value: f64,
    pub checked: u64,
    pub sampled: bool,
    pub strict_violations: Vec<Counterexample>,
    pub max_identity_gap: f64,
    pub max_p_small: f64,
    pub max_p_small_offsets: Vec<u64>,
    /// `prod_{3<=p<p0} (1 - 1/p)`, the uniform bound candidate.
    pub candidate_bound: f64,
    pub p_small_all_below_one: bool,
    pub p_small_all_below_candidate: bool,
}

pub fn subpattern_audit(
    engine: &SingularEngine,
    pattern: &Pattern,
    p0: Option<u64>,
    sample_cap: u64,
    seed: u64,
) -> Result<SubpatternAudit> {
    if let Some(witness) = pattern.admissibility_witness() {
        return Err(Error::Inadmissible { witness });
    }
    if !pattern.is_symmetric() {
        return Err(Error::Domain("audit requires a symmetric pattern".into()));
    }
    let k = pattern.len();
    if k < 2 {
        return Err(Error::Domain("audit needs at least two offsets".into()));
    }
    let p0 = match p0 {
        Some(p) => {
            if !is_prime(p) || p <= pattern.diameter() {
                return Err(Error::Domain(format!(
                    "threshold {p} must be a prime above the diameter {}",
                    pattern.diameter()
                )));
            }
            p
        }
        None => next_prime_after(pattern.diameter()),
    };
    if p0 > engine.truncation() {
        return Err(Error::Domain(format!(
            "threshold {p0} exceeds the engine truncation {}",
            engine.truncation()
        )));
    }

    let offsets = pattern.offsets();
    let full_value = engine.singular_series(pattern)?.value;
    let profiles: Vec<KProfile> = (1..k as u64).map(|k_sub| engine.k_profile(k_sub)).collect();
    // P_big depends only on the subpattern length
    let p_bigs: Vec<f64> = (1..k as u64)
        .map(|k_sub| p_big_product(engine, k as u64, k_sub, p0))
        .collect();
    let candidate_bound = {
        let mut prod = 1.0;
        for &p32 in engine.primes() {
            let p = p32 as u64;
            if p >= p0 {
                break;
            }
            if p > 2 {
                prod *= 1.0 - 1.0 / p as f64;
            }
        }
        prod
    };

    let full_mask: u128 = if k == 64 { u128::MAX >> 64 } else { (1u128 << k) - 1 };
    let total = full_mask as u128 - 1; // proper nonempty subsets
    let sampled = total > sample_cap as u128;

    let mut audit = SubpatternAudit {
        p0,
        full_value,
        checked: 0,
        sampled,
        strict_violations: Vec::new(),
        max_identity_gap: 0.0,
        max_p_small: 0.0,
        max_p_small_offsets: Vec::new(),
        candidate_bound,
        p_small_all_below_one: true,
        p_small_all_below_candidate: true,
    };

    let mut buf = Vec::with_capacity(k);
    let mut check_mask = |mask: u64, audit: &mut SubpatternAudit| {
        buf.clear();
        for (i, &h) in offsets.iter().enumerate() {
            if mask >> i & 1 == 1 {
                buf.push(h);
            }
        }
        let k_sub = buf.len();
        let sub_value = engine.singular_with_profile(&buf, &profiles[k_sub - 1]).value;
        if sub_value >= full_value {
            audit.strict_violations.push(Counterexample {
                sub_offsets: buf.clone(),
                sub_value,
                full_value,
            });
        }
        let p_small = p_small_product(engine, offsets, &buf, p0);
        let gap = math::abs(p_small * p_bigs[k_sub - 1] - sub_value / full_value)
            / (sub_value / full_value);
        if gap > audit.max_identity_gap {
            audit.max_identity_gap = gap;
        }
        if p_small > audit.max_p_small {
            audit.max_p_small = p_small;
            audit.max_p_small_offsets = buf.clone();
        }
        if p_small >= 1.0 {
            audit.p_small_all_below_one = false;
        }
        if p_small > candidate_bound {
            audit.p_small_all_below_candidate = false;
        }
        audit.checked += 1;
    };

    if !sampled {
        for mask in 1..full_mask as u64 {
            check_mask(mask, &mut audit);
        }
    } else {
        let mut rng = Lcg::new(seed);
        let mut seen = alloc::collections::BTreeSet::new();
        while (seen.len() as u64) < sample_cap {
            let mask = 1 + rng.below(full_mask as u64 - 1);
            if seen.insert(mask) {
                check_mask(mask, &mut audit);
            }
        }
    }
    Ok(audit)
}

/// Strict-monotonicity report over proper subpatterns.
#[derive(Debug, Clone)]
pub struct MonotonicityReport {
    pub full_value: f64,
    pub checked: u64,
    pub satisfied: u64,
    pub counterexamples: Vec<Counterexample>,
    pub sampled: bool,
}

/// Check `S(H') < S(H)` over proper subpatterns of a symmetric admissible
/// pattern; counterexamples, if any exist, are returned rather than hidden.
pub fn verify_strict_monotonicity(
    engine: &SingularEngine,
    pattern: &Pattern,
    sample_cap: u64,
    seed: u64,
) -> Result<MonotonicityReport> {
    let audit = subpattern_audit(engine, pattern, None, sample_cap, seed)?;
    Ok(MonotonicityReport {
        full_value: audit.full_value,
        checked: audit.checked,
        satisfied: audit.checked - audit.strict_violations.len() as u64,
        counterexamples: audit.strict_violations,
        sampled: audit.sampled,
    })
}

/// Max of `P_small` over proper subpatterns, against 1 and the uniform
/// product bound.
#[derive(Debug, Clone)]
pub struct LemmaReport {
    pub p0: u64,
    pub max_p_small: f64,
    pub max_p_small_offsets: Vec<u64>,
    pub candidate_bound: f64,
    pub all_below_one: bool,
    pub all_below_candidate: bool,
    pub checked: u64,
    pub sampled: bool,
}

pub fn lemma_bound_check(
    engine: &SingularEngine,
    pattern: &Pattern,
    p0: u64,
) -> Result<LemmaReport> {
    let audit = subpattern_audit(engine, pattern, Some(p0), 100_000, 0x5eed)?;
    Ok(LemmaReport {
        p0: audit.p0,
        max_p_small: audit.max_p_small,
        max_p_small_offsets: audit.max_p_small_offsets,
        candidate_bound: audit.candidate_bound,
        all_below_one: audit.p_small_all_below_one,
        all_below_candidate: audit.p_small_all_below_candidate,
        checked: audit.checked,
        sampled: audit.sampled,
    })
}

/// One step of a reduction chain.
#[derive(Debug, Clone)]
pub struct ChainStep {
    pub pattern: Pattern,
    pub constant: f64,
    pub ratio_to_previous: Option<f64>,
    pub removed_center: bool,
}

#[derive(Debug, Clone)]
pub struct ReductionChain {
    pub steps: Vec<ChainStep>,
}

/// Delete mirror pairs (or the lone center, when the named offset is the
/// center) in the given order, recording the constant at every stage.
pub fn reduction_chain(
    engine: &SingularEngine,
    start: &Pattern,
    removals: &[u64],
) -> Result<ReductionChain> {
    if !start.is_symmetric() {
        return Err(Error::Domain("reduction chains start from a symmetric pattern".into()));
    }
    let mut steps = Vec::with_capacity(removals.len() + 1);
    let mut current = start.clone();
    let first = engine.singular_series(&current)?.value;
    steps.push(ChainStep {
        pattern: current.clone(),
        constant: first,
        ratio_to_previous: None,
        removed_center: false,
    });
    for (i, &h) in removals.iter().enumerate() {
        let is_center = 2 * h == current.diameter();
        // bad steps carry their 1-based position in the removal list so the
        // command line can point at the offending entry
        let step_error = |e: Error| Error::Parse {
            position: i + 1,
            message: format!("removal step {} (offset {h}): {e}", i + 1),
        };
        let next = if is_center {
            if current.offsets().binary_search(&h).is_err() {
                return Err(step_error(Error::Domain("center is not present".into())));
            }
            current.remove_center()
        } else {
            current.remove_symmetric_pair(h)
        }
        .map_err(step_error)?;
        let value = engine.singular_series(&next)?.value;
        let previous = steps.last().expect("nonempty").constant;
        steps.push(ChainStep {
            pattern: next.clone(),
            constant: value,
            ratio_to_previous: Some(value / previous),
            removed_center: is_center,
        });
        current = next;
    }
    Ok(ReductionChain { steps })
}

/// Random symmetric admissible pattern with `2 <= k <= max_k` offsets and
/// even diameter at most `max_d`: mirror pairs around the outer pair
/// `{0, d}`, plus the center when the length budget has room.
pub fn random_symmetric_admissible(rng: &mut Lcg, max_k: usize, max_d: u64) -> Pattern {
    assert!(max_k >= 2 && max_d >= 2);
    loop {
        let d = 2 * (1 + rng.below(max_d / 2));
        let mut offsets = alloc::vec![0u64, d];
        let pair_budget = (max_k / 2).saturating_sub(1);
        if d >= 6 && pair_budget > 0 {
            let extra = rng.below(pair_budget as u64 + 1);
            let mut tries = 0;
            while (offsets.len() - 2) / 2 < extra as usize && tries < 32 {
                tries += 1;
                let half = d / 2;
                let h = 2 * (1 + rng.below((half - 1) / 2 + 1));
                if h < half && !offsets.contains(&h) {
                    offsets.push(h);
                    offsets.push(d - h);
                }
            }
        }
        if d % 4 == 0 && offsets.len() + 1 <= max_k && rng.below(2) == 1 {
            offsets.push(d / 2);
        }
        offsets.sort_unstable();
        let pattern = Pattern::new(offsets).expect("constructed sorted with leading zero");
        if pattern.is_admissible() {
            return pattern;
        }
    }
}
