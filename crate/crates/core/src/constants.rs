//! Stored reference constants. Each one is cross-checked by the test suite
//! against an independent computation (direct Euler products with bracketed
//! tails, or zeta-based series), so a typo here cannot survive `cargo test`.

/// Twin prime constant `C2 = prod_{p>2} (1 - 1/(p-1)^2)`.
pub const TWIN_PRIME_C2: f64 = 0.660_161_815_846_869_573_927_812_110_014_555_778;

/// `2 * C2`, the pair-pattern constant for diameters with no odd prime factor.
pub const TWO_C2: f64 = 2.0 * TWIN_PRIME_C2;

/// Prime zeta value `P(2) = sum_p 1/p^2`.
pub const PRIME_ZETA_2: f64 = 0.452_247_420_041_065_498_506_543_364_832_247_934;

/// Prime zeta value `P(3) = sum_p 1/p^3`.
pub const PRIME_ZETA_3: f64 = 0.174_762_639_299_443_536_423_113_314_665_706_701;

/// Meissel-Mertens constant `lim_q (sum_{p<=q} 1/p - ln ln q)`.
pub const MEISSEL_MERTENS: f64 = 0.261_497_212_847_642_783_755_426_838_608_695_859;

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082_402_431;
