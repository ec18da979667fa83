//! Independent re-derivations of every stored reference constant, so a typo
//! in a literal cannot survive the suite.
//!
//! Routes used:
//! - prime zeta values through the Moebius/zeta series
//!   `P(s) = sum_n mu(n)/n * ln zeta(ns)` with Euler-Maclaurin zeta;
//! - the same values again through a sieve partial sum plus an integral
//!   bracket from explicit prime-counting bounds;
//! - Euler's constant through the Euler-Maclaurin form of harmonic numbers;
//! - the Meissel-Mertens constant through
//!   `B = gamma + sum_p [ln(1 - 1/p) + 1/p]`.

use hlc_core::constants::{EULER_GAMMA, MEISSEL_MERTENS, PRIME_ZETA_2, PRIME_ZETA_3};
use hlc_core::math::{adaptive_simpson, Kahan};
use hlc_core::primes::{factorize, PrimeSieve};

/// zeta(s) for s >= 2 by Euler-Maclaurin at the cutoff J = 200.
fn zeta(s: f64) -> f64 {
    let j_max = 200u32;
    let mut sum = Kahan::default();
    for j in 1..=j_max {
        sum.add((j as f64).powf(-s));
    }
    let j = j_max as f64;
    sum.value() + j.powf(1.0 - s) / (s - 1.0) - 0.5 * j.powf(-s) + s / 12.0 * j.powf(-s - 1.0)
        - s * (s + 1.0) * (s + 2.0) / 720.0 * j.powf(-s - 3.0)
}

fn mobius(n: u64) -> i32 {
    let f = factorize(n).unwrap();
    if f.factors.iter().any(|&(_, e)| e > 1) {
        return 0;
    }
    if f.factors.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `P(s) = sum_{n>=1} mu(n)/n * ln zeta(ns)`; terms vanish like 2^(-ns).
fn prime_zeta(s: f64) -> f64 {
    let mut sum = 0.0;
    for n in 1..=40u64 {
        let mu = mobius(n);
        if mu != 0 {
            sum += mu as f64 / n as f64 * zeta(s * n as f64).ln();
        }
    }
    sum
}

#[test]
fn prime_zeta_constants_match_zeta_route() {
    assert!((prime_zeta(2.0) - PRIME_ZETA_2).abs() < 1e-13);
    assert!((prime_zeta(3.0) - PRIME_ZETA_3).abs() < 1e-13);
}

#[test]
fn prime_zeta_2_sits_inside_sieve_bracket() {
    // partial sum to 1e7, tail bracketed by pi(t) >= t/(ln t - 1) and
    // pi(t) <= t/(ln t - 1.1), both valid far below 1e7
    let q = 10_000_000u64;
    let mut partial = Kahan::default();
    let mut count = 0u64;
    for p in PrimeSieve::new(q).unwrap().iter() {
        let x = 1.0 / p as f64;
        partial.add(x * x);
        count += 1;
    }
    // sum_{p>Q} p^-2 = 2 * integral_Q^inf pi(t) t^-3 dt - pi(Q)/Q^2
    let tail_integral = |c: f64| {
        // with u = ln t the integrand becomes e^-u / (u - c)
        let f = move |u: f64| (-u).exp() / (u - c);
        adaptive_simpson(&f, (q as f64).ln(), 60.0, 1e-18)
    };
    let base = count as f64 / (q as f64 * q as f64);
    let tail_low = 2.0 * tail_integral(1.0) - base;
    let tail_high = 2.0 * tail_integral(1.1) - base;
    assert!(tail_low <= tail_high);
    let low = partial.value() + tail_low - 1e-12;
    let high = partial.value() + tail_high + 1e-12;
    assert!(
        low <= PRIME_ZETA_2 && PRIME_ZETA_2 <= high,
        "stored {PRIME_ZETA_2} outside [{low}, {high}]"
    );
}

#[test]
fn euler_gamma_matches_harmonic_route() {
    let n = 500u64;
    let mut harmonic = Kahan::default();
    for j in 1..=n {
        harmonic.add(1.0 / j as f64);
    }
    let nf = n as f64;
    let gamma = harmonic.value() - nf.ln() - 0.5 / nf + 1.0 / (12.0 * nf * nf)
        - 1.0 / (120.0 * nf.powi(4))
        + 1.0 / (252.0 * nf.powi(6));
    assert!((gamma - EULER_GAMMA).abs() < 1e-13, "gamma route gave {gamma}");
}

#[test]
fn meissel_mertens_matches_gamma_route() {
    // B = gamma + sum_p [ln(1 - 1/p) + 1/p]; the tail of the sum is
    // -T2/2 - T3/3 - O(T4)
    let q = 1_000_000u64;
    let mut sum = Kahan::default();
    let mut inv2 = Kahan::default();
    let mut inv3 = Kahan::default();
    for p in PrimeSieve::new(q).unwrap().iter() {
        let x = 1.0 / p as f64;
        inv2.add(x * x);
        inv3.add(x * x * x);
        sum.add((-x).ln_1p() + x);
    }
    let t2 = PRIME_ZETA_2 - inv2.value();
    let t3 = PRIME_ZETA_3 - inv3.value();
    let b = EULER_GAMMA + sum.value() - t2 / 2.0 - t3 / 3.0;
    assert!((b - MEISSEL_MERTENS).abs() < 1e-12, "route gave {b}");
}
