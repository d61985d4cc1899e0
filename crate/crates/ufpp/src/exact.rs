//! Exact rational arithmetic helpers: constructors, powers of two, and
//! certified enclosures of square roots of rationals. All comparisons in
//! the crate that involve thresholds go through exact rationals; floats
//! appear only in log output.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// `BigRational` from an integer.
pub fn rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// `BigRational` from a numerator and denominator.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// `2^e` for a possibly negative exponent.
pub fn pow2(e: i32) -> BigRational {
    let mag = BigInt::one() << e.unsigned_abs() as usize;
    if e >= 0 {
        BigRational::from_integer(mag)
    } else {
        BigRational::new(BigInt::one(), mag)
    }
}

/// Floor of log2 of a positive integer.
pub fn floor_log2(v: i64) -> u32 {
    assert!(v >= 1, "floor_log2 needs a positive value");
    63 - (v as u64).leading_zeros()
}

/// Ceiling of `num / den` for positive `den`.
pub fn ceil_div(num: i64, den: i64) -> i64 {
    assert!(den > 0);
    num.div_euclid(den) + if num.rem_euclid(den) > 0 { 1 } else { 0 }
}

/// Integer square root: largest `r` with `r * r <= v`. Panics on negative
/// input.
pub fn isqrt_big(v: &BigInt) -> BigInt {
    assert!(!v.is_negative(), "isqrt of a negative value");
    v.sqrt()
}

/// A certified enclosure `lo <= sqrt(x) <= hi` with `hi - lo <= width`.
#[derive(Debug, Clone)]
pub struct SqrtBounds {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl SqrtBounds {
    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    /// True when the enclosure is a single point (the input was a perfect
    /// square of a rational).
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }
}

/// Encloses `sqrt(x)` for a nonnegative rational `x` inside an interval of
/// width at most `2^-precision_bits`. When `x` is the square of a rational
/// the enclosure collapses to that exact value.
///
/// Uses `sqrt(p/q) = sqrt(p*q)/q` and integer square roots of `p*q`
/// scaled by `4^B`, so both bounds are exact rationals.
pub fn sqrt_bounds(x: &BigRational, precision_bits: u32) -> SqrtBounds {
    assert!(!x.is_negative(), "sqrt of a negative rational");
    if x.is_zero() {
        return SqrtBounds { lo: BigRational::zero(), hi: BigRational::zero() };
    }
    let p = x.numer();
    let q = x.denom();
    let pq = p * q;
    // exact case: p*q a perfect square makes sqrt(x) = sqrt(p*q)/q rational
    let root = isqrt_big(&pq);
    if &root * &root == pq {
        let exact = BigRational::new(root, q.clone());
        return SqrtBounds { lo: exact.clone(), hi: exact };
    }
    // scale by N^2 = 4^B so floor(sqrt(pq * N^2)) / (q * N) is within 1/(q*N)
    let mut bits = precision_bits;
    loop {
        let n = BigInt::one() << bits as usize;
        let scaled = &pq * &n * &n;
        let r = isqrt_big(&scaled);
        let den = q * &n;
        let lo = BigRational::new(r.clone(), den.clone());
        let hi = BigRational::new(r + BigInt::one(), den);
        let bounds = SqrtBounds { lo, hi };
        if bounds.width() <= pow2(-(precision_bits as i32)) {
            return bounds;
        }
        bits += 16;
    }
}
