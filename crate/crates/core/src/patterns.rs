//! Tuple pattern algebra: residue counts, admissibility, symmetry, and
//! subpattern construction.
//!
//! A pattern is a strictly increasing list of offsets starting at 0; the
//! tuple it describes is `{n + h : h in offsets}`. Offsets of mixed parity
//! are representable on purpose: they come out inadmissible through the
//! residue count mod 2, which keeps admissibility logic in one place.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::error::Error;
use crate::primes::is_prime;
use crate::Result;

pub const MAX_PATTERN_LEN: usize = 64;
pub const MAX_DIAMETER: u64 = 1_000_000;

/// Primes up to [`MAX_PATTERN_LEN`]; admissibility only needs these.
const SMALL_PRIMES: [u64; 18] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61,
];

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pattern {
    offsets: Vec<u64>,
}

impl Pattern {
    /// Build a pattern from strictly increasing offsets starting at 0.
    pub fn new(offsets: Vec<u64>) -> Result<Self> {
        if offsets.is_empty() {
            return Err(Error::Domain("pattern must contain at least one offset".into()));
        }
        if offsets[0] != 0 {
            return Err(Error::Domain(format!(
                "pattern must start at offset 0, got {}",
                offsets[0]
            )));
        }
        if offsets.len() > MAX_PATTERN_LEN {
            return Err(Error::Capacity(format!(
                "pattern length {} exceeds supported maximum {MAX_PATTERN_LEN}",
                offsets.len()
            )));
        }
        for w in offsets.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::Domain(format!(
                    "offsets must be strictly increasing, got {} after {}",
                    w[1], w[0]
                )));
            }
        }
        let diameter = offsets[offsets.len() - 1];
        if diameter > MAX_DIAMETER {
            return Err(Error::Capacity(format!(
                "pattern diameter {diameter} exceeds supported maximum {MAX_DIAMETER}"
            )));
        }
        Ok(Pattern { offsets })
    }

    /// Build from sorted distinct offsets, shifting so the smallest becomes 0.
    pub fn from_sorted(offsets: &[u64]) -> Result<Self> {
        let min = *offsets
            .first()
            .ok_or_else(|| Error::Domain("pattern must contain at least one offset".into()))?;
        Pattern::new(offsets.iter().map(|&h| h - min).collect())
    }

    /// Parse the comma-separated text form, e.g. `"0, 2, 6, 8"`. Whitespace
    /// is tolerated; unsorted or duplicate offsets are rejected with the
    /// byte position of the offending token.
    pub fn parse(text: &str) -> Result<Self> {
        let mut offsets = Vec::new();
        let mut pos = 0usize;
        for piece in text.split(',') {
            let trimmed = piece.trim();
            let token_pos = pos + (piece.len() - piece.trim_start().len());
            if trimmed.is_empty() {
                return Err(Error::Parse {
                    position: token_pos,
                    message: "empty offset".into(),
                });
            }
            let value: u64 = trimmed.parse().map_err(|_| Error::Parse {
                position: token_pos,
                message: format!("invalid offset '{trimmed}'"),
            })?;
            if let Some(&prev) = offsets.last() {
                if value == prev {
                    return Err(Error::Parse {
                        position: token_pos,
                        message: format!("duplicate offset {value}"),
                    });
                }
                if value < prev {
                    return Err(Error::Parse {
                        position: token_pos,
                        message: format!("offsets not sorted: {value} after {prev}"),
                    });
                }
            }
            offsets.push(value);
            pos += piece.len() + 1;
        }
        Pattern::from_sorted(&offsets).map_err(|e| match e {
            Error::Parse { .. } => e,
            other => Error::Parse {
                position: 0,
                message: format!("{other}"),
            },
        })
    }

    pub fn offsets(&self) -> &[u64] {
        &self.offsets
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        false // patterns always hold at least offset 0
    }

    pub fn diameter(&self) -> u64 {
        self.offsets[self.offsets.len() - 1]
    }

    /// Number of distinct residues of the offsets modulo the prime `p`.
    pub fn residue_count(&self, p: u64) -> Result<u64> {
        if !is_prime(p) {
            return Err(Error::Domain(format!("{p} is not prime")));
        }
        Ok(distinct_residues(&self.offsets, p))
    }

    /// True iff no prime has every residue class covered.
    ///
    /// Only primes `p <= k` can be covered, since the count of distinct
    /// residues is at most `k`.
    pub fn is_admissible(&self) -> bool {
        self.admissibility_witness().is_none()
    }

    /// Smallest prime whose residue classes the pattern covers completely.
    pub fn admissibility_witness(&self) -> Option<u64> {
        let k = self.offsets.len() as u64;
        SMALL_PRIMES
            .iter()
            .copied()
            .take_while(|&p| p <= k)
            .find(|&p| distinct_residues(&self.offsets, p) == p)
    }

    /// True iff the offsets are mirror-symmetric about `diameter / 2`.
    pub fn is_symmetric(&self) -> bool {
        let d = self.diameter();
        let k = self.offsets.len();
        (0..k / 2 + 1).all(|i| self.offsets[i] + self.offsets[k - 1 - i] == d)
    }

    /// Remove the mirror pair `{h, diameter - h}` from a symmetric pattern.
    /// The outer pair `{0, diameter}` is not removable (the diameter would
    /// change), and the center of an odd-length pattern needs
    /// [`Pattern::remove_center`].
    pub fn remove_symmetric_pair(&self, h: u64) -> Result<Pattern> {
        if !self.is_symmetric() {
            return Err(Error::Domain("pattern is not symmetric".into()));
        }
        let d = self.diameter();
        let mate = d - h.min(d);
        if h == 0 || h == d {
            return Err(Error::Domain(
                "removing the outer pair {0, diameter} would change the diameter".into(),
            ));
        }
        if 2 * h == d {
            return Err(Error::Domain(
                "offset is the center, not a pair; use remove_center".into(),
            ));
        }
        if !self.offsets.contains(&h) {
            return Err(Error::Domain(format!("offset {h} is not in the pattern")));
        }
        debug_assert!(self.offsets.contains(&mate), "symmetry guarantees the mate");
        Pattern::new(
            self.offsets
                .iter()
                .copied()
                .filter(|&o| o != h && o != mate)
                .collect(),
        )
    }

    /// Remove the lone center element of an odd-length symmetric pattern.
    pub fn remove_center(&self) -> Result<Pattern> {
        if !self.is_symmetric() {
            return Err(Error::Domain("pattern is not symmetric".into()));
        }
        if self.offsets.len() % 2 == 0 {
            return Err(Error::Domain(
                "even-length symmetric pattern has no center element".into(),
            ));
        }
        if self.offsets.len() == 1 {
            return Err(Error::Domain("cannot remove the only offset".into()));
        }
        let center = self.offsets[self.offsets.len() / 2];
        Pattern::new(
            self.offsets
                .iter()
                .copied()
                .filter(|&o| o != center)
                .collect(),
        )
    }

    /// All subpatterns of the given length, normalized to start at 0.
    /// Residue counts are shift-invariant, so normalization does not change
    /// any singular-series value.
    pub fn subpatterns(&self, length: usize) -> Result<Subpatterns<'_>> {
        if length == 0 || length >= self.offsets.len() {
            return Err(Error::Domain(format!(
                "subpattern length must lie in 1..{}, got {length}",
                self.offsets.len()
            )));
        }
        Ok(Subpatterns {
            pattern: self,
            indices: (0..length).collect(),
            done: false,
        })
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for &h in &self.offsets {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{h}")?;
            first = false;
        }
        Ok(())
    }
}

/// Count of distinct residues of `offsets` modulo `p`. Shared with the
/// singular-series hot loop, so it avoids heap allocation: a bitmask for
/// small `p`, an insertion-sorted stack buffer otherwise.
pub(crate) fn distinct_residues(offsets: &[u64], p: u64) -> u64 {
    if p <= 64 {
        let mut mask = 0u64;
        for &h in offsets {
            mask |= 1 << (h % p);
        }
        return mask.count_ones() as u64;
    }
    let mut buf = [0u64; MAX_PATTERN_LEN];
    let mut len = 0;
    for &h in offsets {
        let r = h % p;
        let idx = buf[..len].partition_point(|&x| x < r);
        if idx == len || buf[idx] != r {
            buf.copy_within(idx..len, idx + 1);
            buf[idx] = r;
            len += 1;
        }
    }
    len as u64
}

pub struct Subpatterns<'a> {
    pattern: &'a Pattern,
    indices: Vec<usize>,
    done: bool,
}

impl Iterator for Subpatterns<'_> {
    type Item = Pattern;

    fn next(&mut self) -> Option<Pattern> {
        if self.done {
            return None;
        }
        let offsets = self.pattern.offsets();
        let picked: Vec<u64> = self.indices.iter().map(|&i| offsets[i]).collect();
        // advance to the next combination in lexicographic order
        let k = self.indices.len();
        let n = offsets.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.indices[i] != i + n - k {
                self.indices[i] += 1;
                for j in i + 1..k {
                    self.indices[j] = self.indices[j - 1] + 1;
                }
                break;
            }
        }
        Some(Pattern::from_sorted(&picked).expect("subset of a valid pattern is valid"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn pat(offsets: &[u64]) -> Pattern {
        Pattern::new(offsets.to_vec()).unwrap()
    }

    #[test]
    fn construction_rules() {
        assert!(Pattern::new(vec![]).is_err());
        assert!(Pattern::new(vec![2, 4]).is_err());
        assert!(Pattern::new(vec![0, 4, 2]).is_err());
        assert!(Pattern::new(vec![0, 2, 2]).is_err());
        assert!(Pattern::new(vec![0, MAX_DIAMETER + 2]).is_err());
        assert_eq!(pat(&[0, 2, 6, 8]).diameter(), 8);
        assert_eq!(pat(&[0]).diameter(), 0);
    }

    #[test]
    fn parse_accepts_whitespace_and_shifts() {
        assert_eq!(Pattern::parse("0, 2, 6, 8").unwrap(), pat(&[0, 2, 6, 8]));
        assert_eq!(Pattern::parse("2,4").unwrap(), pat(&[0, 2]));
        assert_eq!(Pattern::parse(" 0 ").unwrap(), pat(&[0]));
    }

    #[test]
    fn parse_reports_positions() {
        match Pattern::parse("0,2,x") {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 4),
            other => panic!("expected parse error, got {other:?}"),
        }
        match Pattern::parse("0,8,2") {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 4),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(Pattern::parse("0,,2").is_err());
        assert!(Pattern::parse("0,2,2").is_err());
    }

    #[test]
    fn residue_count_examples() {
        assert_eq!(pat(&[0, 2]).residue_count(2).unwrap(), 1);
        // p | d with p > 2: both offsets land on residue 0
        assert_eq!(pat(&[0, 15]).residue_count(3).unwrap(), 1);
        assert_eq!(pat(&[0, 15]).residue_count(5).unwrap(), 1);
        assert_eq!(pat(&[0, 2, 6, 8]).residue_count(5).unwrap(), 4);
        assert!(pat(&[0, 2]).residue_count(4).is_err());
        assert!(pat(&[0, 2]).residue_count(1).is_err());
    }

    #[test]
    fn residue_count_is_length_beyond_diameter() {
        let p = pat(&[0, 6, 24, 36, 66, 84, 90, 114, 120, 126, 150, 156, 174, 204, 216, 234, 240]);
        for prime in [241u64, 251, 257, 1009] {
            assert_eq!(p.residue_count(prime).unwrap(), p.len() as u64);
        }
    }

    #[test]
    fn admissibility_examples() {
        assert!(pat(&[0, 2]).is_admissible());
        assert!(!pat(&[0, 1]).is_admissible());
        assert_eq!(pat(&[0, 1]).admissibility_witness(), Some(2));
        assert!(!pat(&[0, 2, 4]).is_admissible());
        assert_eq!(pat(&[0, 2, 4]).admissibility_witness(), Some(3));
        assert!(pat(&[0]).is_admissible());
        assert!(pat(&[0, 2, 6, 8]).is_admissible());
    }

    #[test]
    fn mixed_parity_is_inadmissible() {
        assert_eq!(pat(&[0, 3]).admissibility_witness(), Some(2));
        assert_eq!(pat(&[0, 2, 7]).admissibility_witness(), Some(2));
    }

    /// Brute-force oracle: mark residues in a table for every prime <= k.
    fn admissible_oracle(offsets: &[u64]) -> bool {
        for p in 2..=offsets.len() as u64 {
            if !is_prime(p) {
                continue;
            }
            let mut seen = vec![false; p as usize];
            for &h in offsets {
                seen[(h % p) as usize] = true;
            }
            if seen.iter().all(|&s| s) {
                return false;
            }
        }
        true
    }

    #[test]
    fn admissibility_matches_oracle_on_random_patterns() {
        let mut state = 0x243f6a8885a308d3u64;
        let mut rand = move |bound: u64| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) % bound
        };
        for _ in 0..1000 {
            let k = 1 + rand(10) as usize;
            let mut offsets = vec![0u64];
            while offsets.len() < k {
                let candidate = 1 + rand(200);
                if !offsets.contains(&candidate) {
                    offsets.push(candidate);
                }
            }
            offsets.sort_unstable();
            let p = Pattern::new(offsets.clone()).unwrap();
            assert_eq!(p.is_admissible(), admissible_oracle(&offsets), "offsets {offsets:?}");
        }
    }

    #[test]
    fn every_even_pair_pattern_is_admissible() {
        for d in (2..=10_000u64).step_by(2) {
            assert!(pat(&[0, d]).is_admissible(), "pair (0,{d})");
        }
    }

    #[test]
    fn symmetry_examples() {
        assert!(pat(&[0, 2, 6, 8]).is_symmetric());
        assert!(!pat(&[0, 2, 6]).is_symmetric());
        assert!(pat(&[0]).is_symmetric());
        assert!(pat(&[0, 240]).is_symmetric());
        let table17 = pat(&[
            0, 6, 24, 36, 66, 84, 90, 114, 120, 126, 150, 156, 174, 204, 216, 234, 240,
        ]);
        assert!(table17.is_symmetric());
    }

    #[test]
    fn remove_symmetric_pair_examples() {
        let table17 = pat(&[
            0, 6, 24, 36, 66, 84, 90, 114, 120, 126, 150, 156, 174, 204, 216, 234, 240,
        ]);
        let reduced = table17.remove_symmetric_pair(6).unwrap();
        assert_eq!(
            reduced,
            pat(&[0, 24, 36, 66, 84, 90, 114, 120, 126, 150, 156, 174, 204, 216, 240])
        );
        assert!(reduced.is_symmetric());
        assert_eq!(reduced.diameter(), 240);

        assert_eq!(pat(&[0, 2, 6, 8]).remove_symmetric_pair(2).unwrap(), pat(&[0, 8]));
        assert!(pat(&[0, 2, 6, 8]).remove_symmetric_pair(3).is_err());
        assert!(pat(&[0, 2, 6, 8]).remove_symmetric_pair(0).is_err());
        assert!(pat(&[0, 120, 240]).remove_symmetric_pair(120).is_err());
    }

    #[test]
    fn remove_center_examples() {
        assert_eq!(pat(&[0, 120, 240]).remove_center().unwrap(), pat(&[0, 240]));
        assert!(pat(&[0, 240]).remove_center().is_err());
        assert!(pat(&[0]).remove_center().is_err());
    }

    #[test]
    fn pair_removal_preserves_symmetry_and_diameter() {
        let mut state = 0x13198a2e03707344u64;
        let mut rand = move |bound: u64| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) % bound
        };
        for _ in 0..200 {
            let d = 2 * (2 + rand(40));
            let mut offsets = vec![0, d];
            for _ in 0..3 {
                let h = 1 + rand(d / 2 - 1);
                if !offsets.contains(&h) && 2 * h != d {
                    offsets.push(h);
                    offsets.push(d - h);
                }
            }
            offsets.sort_unstable();
            let p = Pattern::new(offsets).unwrap();
            assert!(p.is_symmetric());
            let inner: Vec<u64> = p
                .offsets()
                .iter()
                .copied()
                .filter(|&h| h != 0 && h != d && 2 * h != d)
                .collect();
            if let Some(&h) = inner.first() {
                let q = p.remove_symmetric_pair(h).unwrap();
                assert!(q.is_symmetric());
                assert_eq!(q.diameter(), d);
                assert_eq!(q.len(), p.len() - 2);
            }
        }
    }

    #[test]
    fn subpattern_examples() {
        let subs: Vec<Pattern> = pat(&[0, 2, 6]).subpatterns(2).unwrap().collect();
        assert_eq!(subs, vec![pat(&[0, 2]), pat(&[0, 6]), pat(&[0, 4])]);

        let singletons: Vec<Pattern> = pat(&[0, 2]).subpatterns(1).unwrap().collect();
        assert_eq!(singletons, vec![pat(&[0]), pat(&[0])]);

        assert_eq!(pat(&[0, 2, 6, 8]).subpatterns(3).unwrap().count(), 4);
        assert!(pat(&[0, 2]).subpatterns(2).is_err());
        assert!(pat(&[0, 2]).subpatterns(0).is_err());
    }
}
