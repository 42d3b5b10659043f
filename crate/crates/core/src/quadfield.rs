//! Exact arithmetic in Q(√5).
//!
//! Everything here is exact: the identity and nonvanishing checks that the
//! reduction relies on are decided without any floating approximation.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::sequences::{fib, lucas};

/// `a + b√5` with rational `a`, `b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadRat {
    a: BigRational,
    b: BigRational,
}

impl QuadRat {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        QuadRat { a, b }
    }

    pub fn from_int(a: impl Into<BigInt>) -> Self {
        QuadRat::new(BigRational::from_integer(a.into()), BigRational::zero())
    }

    pub fn from_ratios(an: i64, ad: i64, bn: i64, bd: i64) -> Self {
        QuadRat::new(
            BigRational::new(an.into(), ad.into()),
            BigRational::new(bn.into(), bd.into()),
        )
    }

    pub fn zero() -> Self {
        QuadRat::from_int(0)
    }

    pub fn one() -> Self {
        QuadRat::from_int(1)
    }

    pub fn sqrt5() -> Self {
        QuadRat::new(BigRational::zero(), BigRational::one())
    }

    /// The golden ratio (1 + √5)/2.
    pub fn alpha() -> Self {
        QuadRat::from_ratios(1, 2, 1, 2)
    }

    /// (1 − √5)/2.
    pub fn beta() -> Self {
        QuadRat::from_ratios(1, 2, -1, 2)
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn surd_part(&self) -> &BigRational {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Galois conjugate: `a + b√5 ↦ a − b√5`.
    pub fn conj(&self) -> Self {
        QuadRat::new(self.a.clone(), -&self.b)
    }

    /// Field norm `a² − 5b²`.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - BigRational::from_integer(5.into()) * &self.b * &self.b
    }

    pub fn inv(&self) -> Result<Self> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::InversionOfZero);
        }
        Ok(QuadRat::new(&self.a / &n, -&self.b / &n))
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        QuadRat::new(&self.a * r, &self.b * r)
    }

    pub fn checked_div(&self, rhs: &QuadRat) -> Result<Self> {
        Ok(self * &rhs.inv()?)
    }

    pub fn pow(&self, e: u64) -> Self {
        let mut acc = QuadRat::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }
}

impl fmt::Display for QuadRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) + ({})√5", self.a, self.b)
    }
}

impl Add for &QuadRat {
    type Output = QuadRat;
    fn add(self, rhs: &QuadRat) -> QuadRat {
        QuadRat::new(&self.a + &rhs.a, &self.b + &rhs.b)
    }
}

impl Sub for &QuadRat {
    type Output = QuadRat;
    fn sub(self, rhs: &QuadRat) -> QuadRat {
        QuadRat::new(&self.a - &rhs.a, &self.b - &rhs.b)
    }
}

impl Mul for &QuadRat {
    type Output = QuadRat;
    fn mul(self, rhs: &QuadRat) -> QuadRat {
        let five = BigRational::from_integer(5.into());
        QuadRat::new(
            &self.a * &rhs.a + five * &self.b * &rhs.b,
            &self.a * &rhs.b + &self.b * &rhs.a,
        )
    }
}

impl Neg for &QuadRat {
    type Output = QuadRat;
    fn neg(self) -> QuadRat {
        QuadRat::new(-&self.a, -&self.b)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for QuadRat {
            type Output = QuadRat;
            fn $m(self, rhs: QuadRat) -> QuadRat {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for QuadRat {
    type Output = QuadRat;
    fn neg(self) -> QuadRat {
        -&self
    }
}

fn big_ratio(n: BigInt, d: BigInt) -> BigRational {
    BigRational::new(n, d)
}

/// α^k. Non-negative powers come straight from the Binet forms
/// `α^k = (L_k + F_k √5)/2`; negative powers are inverses.
pub fn alpha_pow(k: i64) -> QuadRat {
    let e = k.unsigned_abs() as usize;
    let two = BigInt::from(2);
    let pos = QuadRat::new(
        big_ratio(BigInt::from(lucas(e)), two.clone()),
        big_ratio(BigInt::from(fib(e)), two),
    );
    if k >= 0 {
        pos
    } else {
        // α^e has norm (−1)^e, so it is never zero
        pos.inv().expect("unit")
    }
}

/// (α^k − 1)/√5.
pub fn eta1_case1(k: u64) -> QuadRat {
    let num = &alpha_pow(k as i64) - &QuadRat::one();
    num.checked_div(&QuadRat::sqrt5()).expect("√5 is nonzero")
}

/// (α^k − 1)/(√5(2^l − 1)).
pub fn eta1_combined(k: u64, l: u64) -> QuadRat {
    let d = (BigInt::one() << l) - BigInt::one();
    eta1_case1(k).scale(&big_ratio(BigInt::one(), d))
}

/// √5 (2^l − 1), the Case-2 multiplicand.
pub fn eta1_case2(l: u64) -> QuadRat {
    let d = (BigInt::one() << l) - BigInt::one();
    QuadRat::sqrt5().scale(&BigRational::from_integer(d))
}

/// Does `5η² − 5F_kη − ((−1)^k + 1 − L_k)` vanish at η = (α^k − 1)/√5?
pub fn minimal_poly_check(k: u64) -> bool {
    let eta = eta1_case1(k);
    let (c2, c1, c0) = eta1_case1_poly(k);
    let val = &(&eta * &eta).scale(&BigRational::from_integer(c2))
        + &(&eta.scale(&BigRational::from_integer(c1)) + &QuadRat::from_int(c0));
    val.is_zero()
}

/// Integer coefficients `(c2, c1, c0)` of `5X² − 5F_k X − ((−1)^k + 1 − L_k)`.
pub fn eta1_case1_poly(k: u64) -> (BigInt, BigInt, BigInt) {
    let f = BigInt::from(fib(k as usize));
    let l = BigInt::from(lucas(k as usize));
    let sign = if k % 2 == 0 {
        BigInt::one()
    } else {
        -BigInt::one()
    };
    (
        BigInt::from(5),
        -BigInt::from(5) * f,
        -(sign + BigInt::one() - l),
    )
}

/// If `η = 2^s α^t` for some `s ∈ [s_min, s_max]`, `t ∈ [0, t_max]`, return `(s, t)`.
///
/// The norm of `2^s α^t` is `±4^s`, so candidates whose norm is not a signed
/// power of four are rejected before the exhaustive scan over `t`.
pub fn match_power_product(
    eta: &QuadRat,
    t_max: u64,
    s_min: i64,
    s_max: i64,
) -> Option<(i64, u64)> {
    if eta.is_zero() {
        return None;
    }
    let norm = eta.norm().abs();
    let s_norm = signed_log4(&norm)?;
    if s_norm < s_min || s_norm > s_max {
        return None;
    }
    let two_s = pow2_rational(s_norm);
    for t in 0..=t_max {
        let cand = alpha_pow(t as i64).scale(&two_s);
        if &cand == eta {
            return Some((s_norm, t));
        }
    }
    None
}

fn pow2_rational(s: i64) -> BigRational {
    if s >= 0 {
        BigRational::from_integer(BigInt::one() << s as u64)
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << s.unsigned_abs())
    }
}

// s with r = 4^s, if any
fn signed_log4(r: &BigRational) -> Option<i64> {
    let (n, d) = (r.numer(), r.denom());
    let one = BigInt::one();
    if d == &one {
        exact_log4(n.magnitude()).map(|e| e as i64)
    } else if n == &one {
        exact_log4(d.magnitude()).map(|e| -(e as i64))
    } else {
        None
    }
}

fn exact_log4(x: &BigUint) -> Option<u64> {
    if x.is_zero() {
        return None;
    }
    let tz = x.trailing_zeros().unwrap_or(0);
    if (x >> tz) != BigUint::one() || tz % 2 != 0 {
        return None;
    }
    Some(tz / 2)
}

/// `(s, t)` with `(α^k − 1)/(√5(2^l − 1)) = 2^s α^t`, searched over
/// `t ∈ [0, k]`, `s ∈ [−(l + 2), k]`.
pub fn detect_special_form(k: u64, l: u64) -> Option<(i64, u64)> {
    // N(η) = ((−1)^k + 1 − L_k) / (−5 (2^l − 1)²), checked before building η
    let sign = if k % 2 == 0 { 1 } else { -1 };
    let num = BigInt::from(sign + 1) - BigInt::from(lucas(k as usize));
    let d = (BigInt::one() << l) - BigInt::one();
    let den = BigInt::from(-5) * &d * &d;
    signed_log4(&BigRational::new(num, den).abs())?;
    let eta = eta1_combined(k, l);
    match_power_product(&eta, k, -(l as i64 + 2), k as i64)
}

/// Λ₃ witness: is `(α^k − 1)α^{n1} − √5(2^{m1+l} − 2^{m1})` nonzero?
pub fn lambda3_nonzero_check(k: u64, n1: u64, m1: u64, l: u64) -> bool {
    let left = &(&alpha_pow(k as i64) - &QuadRat::one()) * &alpha_pow(n1 as i64);
    let diff = (BigInt::one() << (m1 + l)) - (BigInt::one() << m1);
    let right = QuadRat::sqrt5().scale(&BigRational::from_integer(diff));
    !(&left - &right).is_zero()
}
