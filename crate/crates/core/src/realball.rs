//! Midpoint–radius real arithmetic with outward rounding.
//!
//! A [`RealBall`] is a dyadic midpoint and a dyadic radius; the exact value it
//! stands for always lies in `[mid − rad, mid + rad]`. Every operation folds
//! its own rounding error into the radius, so enclosures compose.
//!
//! Only what the reduction needs is provided: field operations, square root,
//! natural logarithm, distance to the nearest integer and certified
//! sign/floor decisions.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, Sign as BigSign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use parking_lot::Mutex;

use crate::error::{Error, Result};
use crate::quadfield::QuadRat;

/// Working precision used unless a caller asks for something else.
pub const DEFAULT_PREC: u32 = 768;
/// Precision escalation stops here.
pub const PREC_CAP: u32 = 16384;
/// Lowest precision accepted by the constructors that take one.
pub const MIN_PREC: u32 = 64;

// mantissa width kept for radii
const RAD_BITS: u64 = 30;

/// Rounding direction for dyadic truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    Floor,
    Ceil,
}

/// An exact dyadic rational `man · 2^exp`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    man: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn new(man: BigInt, exp: i64) -> Self {
        if man.is_zero() {
            return Dyadic::zero();
        }
        let tz = man.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            Dyadic {
                man: man >> tz,
                exp: exp + tz as i64,
            }
        } else {
            Dyadic { man, exp }
        }
    }

    pub fn zero() -> Self {
        Dyadic {
            man: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn from_int(i: impl Into<BigInt>) -> Self {
        Dyadic::new(i.into(), 0)
    }

    /// `2^e`.
    pub fn pow2(e: i64) -> Self {
        Dyadic {
            man: BigInt::one(),
            exp: e,
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.man
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.man.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.man.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.man.is_positive()
    }

    pub fn signum(&self) -> i32 {
        match self.man.sign() {
            BigSign::Minus => -1,
            BigSign::NoSign => 0,
            BigSign::Plus => 1,
        }
    }

    pub fn bits(&self) -> u64 {
        self.man.bits()
    }

    /// `⌊log2 |x|⌋` for nonzero `x`.
    pub fn msb(&self) -> i64 {
        self.exp + self.man.bits() as i64 - 1
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            man: self.man.abs(),
            exp: self.exp,
        }
    }

    pub fn shl(&self, k: i64) -> Self {
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic {
            man: self.man.clone(),
            exp: self.exp + k,
        }
    }

    pub fn add(&self, o: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(o.exp);
        let a = &self.man << (self.exp - e) as u64;
        let b = &o.man << (o.exp - e) as u64;
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, o: &Dyadic) -> Dyadic {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic {
            man: -&self.man,
            exp: self.exp,
        }
    }

    pub fn mul(&self, o: &Dyadic) -> Dyadic {
        if self.is_zero() || o.is_zero() {
            return Dyadic::zero();
        }
        Dyadic::new(&self.man * &o.man, self.exp + o.exp)
    }

    /// Truncate to at most `prec` mantissa bits in the given direction.
    pub fn round(&self, prec: u64, dir: Round) -> Dyadic {
        let bits = self.bits();
        if bits <= prec {
            return self.clone();
        }
        let shift = bits - prec;
        let man = match dir {
            Round::Floor => &self.man >> shift,
            Round::Ceil => -((-&self.man) >> shift),
        };
        Dyadic::new(man, self.exp + shift as i64)
    }

    pub fn floor_int(&self) -> BigInt {
        if self.exp >= 0 {
            &self.man << self.exp as u64
        } else {
            &self.man >> (-self.exp) as u64
        }
    }

    pub fn ceil_int(&self) -> BigInt {
        -(self.neg().floor_int())
    }

    /// Nearest integer, ties rounded up.
    pub fn round_int(&self) -> BigInt {
        self.add(&Dyadic::pow2(-1)).floor_int()
    }

    pub fn to_ratio(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.man << self.exp as u64)
        } else {
            BigRational::new(self.man.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    /// Nearest-ish `f64`; for display and diagnostics only.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.bits();
        let (m, e) = if bits > 60 {
            let s = bits - 60;
            (
                (&self.man >> s).to_f64().unwrap_or(0.0),
                self.exp + s as i64,
            )
        } else {
            (self.man.to_f64().unwrap_or(0.0), self.exp)
        };
        m * 2f64.powi(e.clamp(-2000, 2000) as i32)
    }

    /// `a / b` truncated to `prec` bits, plus an upper bound on the truncation
    /// error.
    pub fn div(a: &Dyadic, b: &Dyadic, prec: u64, dir: Round) -> Result<(Dyadic, Dyadic)> {
        if b.is_zero() {
            return Err(Error::InversionOfZero);
        }
        if a.is_zero() {
            return Ok((Dyadic::zero(), Dyadic::zero()));
        }
        let shift = prec as i64 + b.bits() as i64 - a.bits() as i64 + 1;
        let (num, den) = if shift >= 0 {
            (&a.man << shift as u64, b.man.clone())
        } else {
            (a.man.clone(), &b.man << (-shift) as u64)
        };
        let (q, r) = num.div_mod_floor(&den);
        let exp = a.exp - b.exp - shift;
        let exact = r.is_zero();
        let q = if dir == Round::Ceil && !exact {
            q + 1
        } else {
            q
        };
        let err = if exact {
            Dyadic::zero()
        } else {
            Dyadic::pow2(exp)
        };
        Ok((Dyadic::new(q, exp), err))
    }

    /// `√a` truncated to roughly `prec` bits, plus an error bound.
    pub fn sqrt(a: &Dyadic, prec: u64, dir: Round) -> Result<(Dyadic, Dyadic)> {
        if a.is_negative() {
            return Err(Error::Domain("square root of a negative number".into()));
        }
        if a.is_zero() {
            return Ok((Dyadic::zero(), Dyadic::zero()));
        }
        // scale so the radicand has ~2·prec bits and an even exponent
        let mut t = 2 * prec as i64 + 2 - a.bits() as i64;
        if t < 0 {
            t = 0;
        }
        if (a.exp - t).rem_euclid(2) != 0 {
            t += 1;
        }
        let n: BigUint = (a.man.magnitude()) << t as u64;
        let s = n.sqrt();
        let exact = &s * &s == n;
        let s = if dir == Round::Ceil && !exact {
            s + 1u32
        } else {
            s
        };
        let exp = (a.exp - t) / 2;
        let err = if exact {
            Dyadic::zero()
        } else {
            Dyadic::pow2(exp)
        };
        Ok((Dyadic::new(BigInt::from(s), exp), err))
    }

    /// Decimal scientific notation with `digits` significant digits, rounded
    /// in the given direction.
    pub fn to_sci(&self, digits: u32, dir: Round) -> String {
        ratio_to_sci(&self.to_ratio(), digits, dir)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sub(other).signum().cmp(&0)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sci(20, Round::Floor))
    }
}

fn pow10(e: u32) -> BigInt {
    num_traits::pow(BigInt::from(10), e as usize)
}

/// Format a rational as `d.ddd…e±x`, rounding in direction `dir`.
pub fn ratio_to_sci(r: &BigRational, digits: u32, dir: Round) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    let digits = digits.max(1);
    let neg = r.is_negative();
    let mag = r.abs();
    // decimal exponent estimate, then fix up
    let num_digits = mag.numer().to_string().len() as i64;
    let den_digits = mag.denom().to_string().len() as i64;
    let mut e10 = num_digits - den_digits;
    let scaled = |e10: i64| -> BigRational {
        let shift = digits as i64 - 1 - e10;
        if shift >= 0 {
            &mag * BigRational::from_integer(pow10(shift as u32))
        } else {
            &mag / BigRational::from_integer(pow10((-shift) as u32))
        }
    };
    let lo = BigRational::from_integer(pow10(digits - 1));
    let hi = BigRational::from_integer(pow10(digits));
    let mut s = scaled(e10);
    while s >= hi {
        e10 += 1;
        s = scaled(e10);
    }
    while s < lo {
        e10 -= 1;
        s = scaled(e10);
    }
    // rounding direction applies to the signed value
    let away = matches!((dir, neg), (Round::Ceil, false) | (Round::Floor, true));
    let mut int = if away {
        s.ceil().to_integer()
    } else {
        s.floor().to_integer()
    };
    if int == hi.to_integer() {
        int = lo.to_integer();
        e10 += 1;
    }
    let ds = int.to_string();
    let (head, tail) = ds.split_at(1);
    let sign = if neg { "-" } else { "" };
    if tail.is_empty() {
        format!("{sign}{head}e{e10}")
    } else {
        format!("{sign}{head}.{tail}e{e10}")
    }
}

/// Parse a plain or scientific decimal string into an exact rational.
pub fn parse_decimal(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().ok()?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (ip, fp) = match mant.find('.') {
        Some(i) => (&mant[..i], &mant[i + 1..]),
        None => (mant, ""),
    };
    if ip.is_empty() && fp.is_empty() {
        return None;
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("0{ip}{fp}").parse().ok()?;
    let e = exp - fp.len() as i64;
    let mut r = if e >= 0 {
        BigRational::from_integer(digits * pow10(e as u32))
    } else {
        BigRational::new(digits, pow10((-e) as u32))
    };
    if neg {
        r = -r;
    }
    Some(r)
}

fn up(x: &Dyadic) -> Dyadic {
    x.round(RAD_BITS, Round::Ceil)
}

fn down(x: &Dyadic) -> Dyadic {
    x.round(RAD_BITS, Round::Floor)
}

/// Certified sign of a ball.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertSign {
    Negative,
    Positive,
    Undetermined,
}

/// A certified enclosure `[mid − rad, mid + rad]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealBall {
    mid: Dyadic,
    rad: Dyadic,
    prec: u32,
}

impl RealBall {
    /// Ball around `mid` with radius `rad`, after rounding `mid` to `prec` bits.
    pub fn with_radius(mid: Dyadic, rad: Dyadic, prec: u32) -> RealBall {
        debug_assert!(!rad.is_negative());
        let rounded = mid.round(prec as u64, Round::Floor);
        let err = mid.sub(&rounded);
        RealBall {
            mid: rounded,
            rad: up(&rad.add(&err)),
            prec,
        }
    }

    pub fn exact(x: Dyadic, prec: u32) -> RealBall {
        RealBall::with_radius(x, Dyadic::zero(), prec)
    }

    pub fn from_int(i: impl Into<BigInt>, prec: u32) -> RealBall {
        RealBall::exact(Dyadic::from_int(i), prec)
    }

    pub fn from_ratio(r: &BigRational, prec: u32) -> RealBall {
        let n = Dyadic::from_int(r.numer().clone());
        let d = Dyadic::from_int(r.denom().clone());
        let (q, err) =
            Dyadic::div(&n, &d, prec as u64, Round::Floor).expect("denominator is positive");
        RealBall::with_radius(q, err, prec)
    }

    /// Ball exactly covering `[lo, hi]`.
    pub fn from_bounds(lo: &Dyadic, hi: &Dyadic, prec: u32) -> RealBall {
        debug_assert!(lo <= hi);
        let mid = lo.add(hi).shl(-1);
        let rad = hi.sub(lo).shl(-1);
        RealBall::with_radius(mid, rad, prec)
    }

    pub fn mid(&self) -> &Dyadic {
        &self.mid
    }

    pub fn rad(&self) -> &Dyadic {
        &self.rad
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn lower(&self) -> Dyadic {
        self.mid.sub(&self.rad)
    }

    pub fn upper(&self) -> Dyadic {
        self.mid.add(&self.rad)
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        self.mid.to_f64()
    }

    /// Same enclosure, re-tagged (and if needed rounded) at `prec`.
    pub fn with_prec(&self, prec: u32) -> RealBall {
        RealBall::with_radius(self.mid.clone(), self.rad.clone(), prec)
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        &self.lower() <= x && x <= &self.upper()
    }

    pub fn contains_ratio(&self, x: &BigRational) -> bool {
        self.lower().to_ratio() <= *x && *x <= self.upper().to_ratio()
    }

    pub fn overlaps(&self, o: &RealBall) -> bool {
        self.lower() <= o.upper() && o.lower() <= self.upper()
    }

    /// Is every point of `self` inside `o`?
    pub fn within(&self, o: &RealBall) -> bool {
        o.lower() <= self.lower() && self.upper() <= o.upper()
    }

    pub fn sign_certain(&self) -> CertSign {
        if self.lower().is_positive() {
            CertSign::Positive
        } else if self.upper().is_negative() {
            CertSign::Negative
        } else {
            CertSign::Undetermined
        }
    }

    pub fn certainly_lt(&self, o: &RealBall) -> bool {
        self.upper() < o.lower()
    }

    pub fn certainly_le(&self, o: &RealBall) -> bool {
        self.upper() <= o.lower()
    }

    /// `⌊x⌋` if the whole enclosure shares it.
    pub fn floor_certain(&self) -> Option<BigInt> {
        let f = self.lower().floor_int();
        (self.upper().floor_int() == f).then_some(f)
    }

    /// `⌈upper⌉ − 1`, the largest integer strictly below the upper bound.
    pub fn largest_int_below_upper(&self) -> BigInt {
        self.upper().ceil_int() - 1
    }

    pub fn abs(&self) -> RealBall {
        if self.mid.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    fn res_prec(&self, o: &RealBall) -> u32 {
        self.prec.max(o.prec)
    }

    pub fn mul_int(&self, k: &BigInt) -> RealBall {
        self * &RealBall::from_int(k.clone(), self.prec)
    }

    pub fn inv(&self) -> Result<RealBall> {
        let m = self.mid.abs();
        let lo = m.sub(&self.rad);
        if !lo.is_positive() {
            return Err(Error::InversionOfZero);
        }
        let (q, err) = Dyadic::div(
            &Dyadic::from_int(1),
            &self.mid,
            self.prec as u64,
            Round::Floor,
        )?;
        let den = down(&down(&lo).mul(&down(&m)));
        let (r, _) = Dyadic::div(&self.rad, &den, RAD_BITS, Round::Ceil)?;
        Ok(RealBall::with_radius(q, r.add(&err), self.prec))
    }

    pub fn div(&self, o: &RealBall) -> Result<RealBall> {
        Ok(self * &o.inv()?)
    }

    pub fn sqrt(&self) -> Result<RealBall> {
        if self.lower().is_negative() || !self.mid.is_positive() {
            return Err(Error::Domain(
                "square root of a ball reaching below zero".into(),
            ));
        }
        let (s, err) = Dyadic::sqrt(&self.mid, self.prec as u64, Round::Floor)?;
        let rad = if self.rad.is_zero() {
            err
        } else {
            let (r, _) = Dyadic::div(&self.rad, &down(&s), RAD_BITS, Round::Ceil)?;
            r.add(&err)
        };
        Ok(RealBall::with_radius(s, rad, self.prec))
    }

    /// Natural logarithm.
    pub fn ln(&self) -> Result<RealBall> {
        let lo = self.lower();
        if !lo.is_positive() {
            return Err(Error::Domain("logarithm of a ball touching (−∞, 0]".into()));
        }
        let core = ln_dyadic(&self.mid, self.prec)?;
        if self.rad.is_zero() {
            return Ok(core);
        }
        // |ln x − ln mid| ≤ rad / lo on the enclosure
        let (widen, _) = Dyadic::div(&self.rad, &down(&lo), RAD_BITS, Round::Ceil)?;
        Ok(RealBall::with_radius(
            core.mid,
            core.rad.add(&widen),
            core.prec,
        ))
    }

    /// Enclosure of `‖x‖`, the distance to the nearest integer.
    pub fn dist_to_int(&self) -> Result<RealBall> {
        if self.rad >= Dyadic::pow2(-2) {
            return Err(Error::PrecisionInsufficient(format!(
                "radius {} too wide for a nearest-integer distance",
                self.rad
            )));
        }
        // ‖·‖ is 1-Lipschitz, so ‖mid‖ ± rad encloses it (clipped to [0, 1/2])
        let k = self.mid.round_int();
        let d = self.mid.sub(&Dyadic::from_int(k)).abs();
        let lo = d.sub(&self.rad).max(Dyadic::zero());
        let hi = d.add(&self.rad).min(Dyadic::pow2(-1));
        Ok(RealBall::from_bounds(&lo, &hi, self.prec))
    }

    /// Enclosure of `max(self, o)`.
    pub fn max(&self, o: &RealBall) -> RealBall {
        let lo = self.lower().max(o.lower());
        let hi = self.upper().max(o.upper());
        RealBall::from_bounds(&lo, &hi, self.res_prec(o))
    }

    pub fn powi(&self, e: u32) -> RealBall {
        let mut acc = RealBall::from_int(1, self.prec);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// `x = a + b√5` at `prec` bits.
    pub fn from_quadrat(x: &QuadRat, prec: u32) -> RealBall {
        let a = RealBall::from_ratio(x.rational_part(), prec);
        if x.is_rational() {
            return a;
        }
        let b = RealBall::from_ratio(x.surd_part(), prec);
        &a + &(&b * &sqrt5(prec))
    }

    /// Mid and radius as decimal strings; the decimal ball contains `self`.
    pub fn to_decimal_parts(&self, digits: u32) -> (String, String) {
        let mid_s = self.mid.to_sci(digits, Round::Floor);
        let mid_r = parse_decimal(&mid_s).expect("own output parses");
        let slack = (self.mid.to_ratio() - &mid_r).abs();
        let rad_r = self.rad.to_ratio() + slack;
        (mid_s, ratio_to_sci(&rad_r, 6, Round::Ceil))
    }

    /// Rebuild a ball from decimal parts; the result contains the decimal ball.
    pub fn from_decimal_parts(mid: &str, rad: &str, prec: u32) -> Option<RealBall> {
        let m = parse_decimal(mid)?;
        let r = parse_decimal(rad)?;
        if r.is_negative() {
            return None;
        }
        let mb = RealBall::from_ratio(&m, prec);
        let rb = RealBall::from_ratio(&r, prec);
        let rad = up(&rb.upper());
        Some(RealBall::with_radius(
            mb.mid.clone(),
            mb.rad.add(&rad),
            prec,
        ))
    }
}

impl fmt::Display for RealBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (m, r) = self.to_decimal_parts(20);
        write!(f, "[{m} ± {r}]")
    }
}

impl Add for &RealBall {
    type Output = RealBall;
    fn add(self, o: &RealBall) -> RealBall {
        let s = self.mid.add(&o.mid);
        RealBall::with_radius(s, self.rad.add(&o.rad), self.res_prec(o))
    }
}

impl Sub for &RealBall {
    type Output = RealBall;
    fn sub(self, o: &RealBall) -> RealBall {
        let s = self.mid.sub(&o.mid);
        RealBall::with_radius(s, self.rad.add(&o.rad), self.res_prec(o))
    }
}

impl Mul for &RealBall {
    type Output = RealBall;
    fn mul(self, o: &RealBall) -> RealBall {
        let p = self.mid.mul(&o.mid);
        let mut rad = Dyadic::zero();
        if !o.rad.is_zero() {
            rad = rad.add(&up(&self.mid.abs()).mul(&o.rad));
        }
        if !self.rad.is_zero() {
            rad = rad.add(&up(&o.mid.abs()).mul(&self.rad));
            rad = rad.add(&self.rad.mul(&o.rad));
        }
        RealBall::with_radius(p, rad, self.res_prec(o))
    }
}

impl Neg for &RealBall {
    type Output = RealBall;
    fn neg(self) -> RealBall {
        RealBall {
            mid: self.mid.neg(),
            rad: self.rad.clone(),
            prec: self.prec,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RealBall {
            type Output = RealBall;
            fn $m(self, o: RealBall) -> RealBall {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for RealBall {
    type Output = RealBall;
    fn neg(self) -> RealBall {
        -&self
    }
}

/// `√5` at `prec` bits.
pub fn sqrt5(prec: u32) -> RealBall {
    let (s, err) =
        Dyadic::sqrt(&Dyadic::from_int(5), prec as u64 + 2, Round::Floor).expect("5 > 0");
    RealBall::with_radius(s, err, prec)
}

/// `ln 2` at `prec` bits, memoized per precision.
pub fn ln2(prec: u32) -> RealBall {
    static CACHE: OnceLock<Mutex<HashMap<u32, RealBall>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(b) = cache.lock().get(&prec) {
        return b.clone();
    }
    let b = ln2_series(prec);
    cache.lock().insert(prec, b.clone());
    b
}

// ln 2 = Σ_{k≥1} 1/(k 2^k), in fixed point with 2^-w units
fn ln2_series(prec: u32) -> RealBall {
    let w = prec as u64 + 24;
    let n = w;
    let mut sum = BigInt::zero();
    for k in 1..=n {
        sum += (BigInt::one() << (w - k)) / BigInt::from(k);
    }
    // each floor loses < 1 unit; the tail past n is below 2^-n
    let mid = Dyadic::new(sum, -(w as i64));
    let rad = Dyadic::from_int(n)
        .shl(-(w as i64))
        .add(&Dyadic::pow2(-(n as i64)));
    RealBall::with_radius(mid, rad, prec)
}

/// Natural log of an exact positive dyadic.
fn ln_dyadic(x: &Dyadic, prec: u32) -> Result<RealBall> {
    if !x.is_positive() {
        return Err(Error::Domain("logarithm of a non-positive number".into()));
    }
    // x = 2^e · y with y in (3/4, 3/2]
    let mut e = x.msb();
    let mut y = x.shl(-e);
    if y > Dyadic::new(BigInt::from(3), -1) {
        y = y.shl(-1);
        e += 1;
    }
    let reductions = ((prec as f64).sqrt() / 2.5).ceil() as u32 + 2;
    let wp = prec + 40 + reductions;
    let log_two = ln2(wp);
    let tail_part = if y == Dyadic::from_int(1) {
        RealBall::from_int(0, wp)
    } else {
        ln_near_one(&y, wp, reductions)?
    };
    let res = &tail_part + &log_two.mul_int(&BigInt::from(e));
    Ok(res.with_prec(prec))
}

// ln y for y near 1 via repeated square roots and the atanh series
fn ln_near_one(y: &Dyadic, wp: u32, reductions: u32) -> Result<RealBall> {
    let mut w = RealBall::exact(y.clone(), wp);
    for _ in 0..reductions {
        w = w.sqrt()?;
    }
    let one = RealBall::from_int(1, wp);
    let z = (&w - &one).div(&(&w + &one))?;
    let z2 = &z * &z;
    let eps = Dyadic::pow2(-(wp as i64) - 4);
    let mut term = z.clone();
    let mut sum = z.clone();
    let mut i: u64 = 1;
    loop {
        term = &term * &z2;
        let t = term.div(&RealBall::from_int(2 * i + 1, wp))?;
        sum = &sum + &t;
        i += 1;
        if term.abs().upper() < eps {
            break;
        }
        if i > 100_000 {
            return Err(Error::PrecisionInsufficient(
                "log series failed to converge".into(),
            ));
        }
    }
    // remainder ≤ |z|^{2i+1}/(1 − z²) ≤ 2|term|·z² for z² ≤ 1/2
    let tail = term.abs().upper().mul(&z2.upper()).shl(1);
    let sum = RealBall::with_radius(sum.mid().clone(), sum.rad().add(&up(&tail)), wp);
    let scale = RealBall::exact(Dyadic::pow2(reductions as i64 + 1), wp);
    Ok(&sum * &scale)
}

/// τ = ln α / ln 2.
pub fn const_tau(prec: u32) -> RealBall {
    let alpha = RealBall::from_quadrat(&QuadRat::alpha(), prec + 16);
    let t = alpha
        .ln()
        .expect("α > 1")
        .div(&ln2(prec + 16))
        .expect("ln 2 > 0");
    t.with_prec(prec)
}

/// ln α.
pub fn ln_alpha(prec: u32) -> RealBall {
    RealBall::from_quadrat(&QuadRat::alpha(), prec)
        .ln()
        .expect("α > 1")
}

/// A real number that can be enclosed at any requested precision.
pub trait BallSource: Sync {
    fn ball(&self, prec: u32) -> Result<RealBall>;
}

impl<F> BallSource for F
where
    F: Fn(u32) -> Result<RealBall> + Sync,
{
    fn ball(&self, prec: u32) -> Result<RealBall> {
        self(prec)
    }
}

/// Run `attempt` at `start`, then doubling precisions up to `cap`, until it
/// yields a value.
pub fn escalate<T>(
    start: u32,
    cap: u32,
    what: &str,
    mut attempt: impl FnMut(u32) -> Result<Option<T>>,
) -> Result<T> {
    let mut prec = start.max(MIN_PREC);
    loop {
        if let Some(v) = attempt(prec)? {
            return Ok(v);
        }
        if prec >= cap {
            return Err(Error::PrecisionExhausted {
                cap,
                what: what.to_string(),
            });
        }
        prec = (prec * 2).min(cap);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dec(s: &str) -> BigRational {
        parse_decimal(s).unwrap()
    }

    fn ball(s: &str) -> RealBall {
        RealBall::from_ratio(&dec(s), 128)
    }

    // does `b` agree with the truncated decimal `s` to its last printed digit?
    fn near(b: &RealBall, s: &str) -> bool {
        let frac = s.split('.').nth(1).map_or(0, |f| f.len()) as i32;
        let r = format!("1e-{}", frac - 1);
        let reference = RealBall::from_decimal_parts(s, &r, b.prec()).unwrap();
        b.overlaps(&reference)
    }

    #[test]
    fn dyadic_rounding_directions() {
        let x = Dyadic::new(BigInt::from(-0b1011), 0);
        assert_eq!(x.round(2, Round::Floor), Dyadic::from_int(-12));
        assert_eq!(x.round(2, Round::Ceil), Dyadic::from_int(-8));
        assert_eq!(
            Dyadic::new(BigInt::from(7), -1).floor_int(),
            BigInt::from(3)
        );
        assert_eq!(
            Dyadic::new(BigInt::from(-7), -1).floor_int(),
            BigInt::from(-4)
        );
        assert_eq!(
            Dyadic::new(BigInt::from(-7), -1).ceil_int(),
            BigInt::from(-3)
        );
    }

    #[test]
    fn decimal_round_trip() {
        let r = dec("-1.25e-3");
        assert_eq!(r, BigRational::new(BigInt::from(-1), BigInt::from(800)));
        assert_eq!(ratio_to_sci(&dec("1234.5"), 3, Round::Floor), "1.23e3");
        assert_eq!(ratio_to_sci(&dec("1234.5"), 3, Round::Ceil), "1.24e3");
        assert_eq!(ratio_to_sci(&dec("9.99"), 2, Round::Ceil), "1.0e1");
        assert_eq!(ratio_to_sci(&dec("-0.5"), 1, Round::Floor), "-5e-1");
        assert!(parse_decimal("1.2.3").is_none());
    }

    #[test]
    fn sqrt5_and_alpha() {
        let a = RealBall::from_quadrat(&QuadRat::alpha(), 64);
        assert!(near(&a, "1.6180339887498948482"));
        // α² − α − 1 = 0
        assert!((&(&a * &a) - &(&a + &RealBall::from_int(1, 64))).contains(&Dyadic::zero()));
        let b = RealBall::from_quadrat(&QuadRat::beta(), 64);
        assert!((b.to_f64() + 0.618_033_988_749_895).abs() < 1e-15);
        // β = 1 − α as balls
        assert!(b.overlaps(&(&RealBall::from_int(1, 64) - &a)));
        let one = RealBall::from_quadrat(&QuadRat::one(), 64);
        assert!(one.is_exact());
        assert_eq!(one.mid(), &Dyadic::from_int(1));
        let s = sqrt5(256);
        // s² encloses 5
        assert!((&s * &s).contains(&Dyadic::from_int(5)));
    }

    #[test]
    fn logarithms() {
        let zero = RealBall::from_int(1, 128).ln().unwrap();
        assert!(zero.contains(&Dyadic::zero()));
        assert!(zero.rad() < &Dyadic::pow2(-120));
        let l2 = RealBall::from_int(2, 128).ln().unwrap();
        assert!(near(
            &l2,
            "0.6931471805599453094172321214581765680755001343602552541206800094933936"
        ));
        let la = ln_alpha(128);
        assert!(near(
            &la,
            "0.4812118250596034474977589134243684231351843343856605196610181688401639"
        ));
        assert!(la.rad() < &Dyadic::pow2(-120));
        let l10 = RealBall::from_int(10, 200).ln().unwrap();
        assert!(near(
            &l10,
            "2.302585092994045684017991454684364207601101488628772976033327900967573"
        ));
        assert!(matches!(
            RealBall::from_int(0, 64).ln(),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            RealBall::from_int(-3, 64).ln(),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn small_and_large_logs() {
        let tiny = RealBall::exact(Dyadic::pow2(-300), 256).ln().unwrap();
        let expect = &ln2(256).mul_int(&BigInt::from(-300)) + &RealBall::from_int(0, 256);
        assert!(tiny.overlaps(&expect));
        let near = RealBall::from_ratio(&dec("1.000000001"), 256).ln().unwrap();
        assert!(self::near(
            &near,
            "0.0000000009999999995000000003333333330833333335333333331666666668"
        ));
    }

    #[test]
    fn tau_constant() {
        let t = const_tau(128);
        assert!(near(&t, "0.6942419136306173017387902668985952234635"));
        let c1 = t.inv().unwrap();
        assert!(near(&c1, "1.4404200904125564790175514995878638024586"));
    }

    #[test]
    fn tau_is_not_a_small_rational() {
        for prec in [64u32, 128, 256] {
            let t = const_tau(prec);
            for q in 1i64..500 {
                let p = (t.to_f64() * q as f64).round() as i64;
                assert!(!t.contains_ratio(&BigRational::new(p.into(), q.into())));
            }
        }
    }

    #[test]
    fn distance_to_integer() {
        let d = ball("2.25").dist_to_int().unwrap();
        assert!(d.contains_ratio(&dec("0.25")));
        let d = ball("-0.1").dist_to_int().unwrap();
        assert!(d.contains_ratio(&dec("0.1")));
        assert!((d.to_f64() - 0.1).abs() < 1e-12);
        let d = ball("3.5").dist_to_int().unwrap();
        assert!(d.contains_ratio(&dec("0.5")));
        assert!(d.upper() <= Dyadic::pow2(-1));
        let wide = RealBall::with_radius(Dyadic::from_int(3), Dyadic::pow2(-1), 64);
        assert!(matches!(
            wide.dist_to_int(),
            Err(Error::PrecisionInsufficient(_))
        ));
    }

    #[test]
    fn signs() {
        let b = RealBall::with_radius(Dyadic::from_int(9).shl(-7), Dyadic::pow2(-10), 64);
        assert_eq!(b.sign_certain(), CertSign::Positive);
        let b = RealBall::with_radius(Dyadic::zero(), Dyadic::from_int(1), 64);
        assert_eq!(b.sign_certain(), CertSign::Undetermined);
        let b = RealBall::with_radius(Dyadic::from_int(-2), Dyadic::pow2(-1), 64);
        assert_eq!(b.sign_certain(), CertSign::Negative);
    }

    #[test]
    fn inverse_and_sqrt_errors() {
        let z = RealBall::with_radius(Dyadic::zero(), Dyadic::pow2(-4), 64);
        assert!(matches!(z.inv(), Err(Error::InversionOfZero)));
        assert!(RealBall::from_int(-1, 64).sqrt().is_err());
        let third = RealBall::from_int(3, 128).inv().unwrap();
        assert!(third.contains_ratio(&BigRational::new(1.into(), 3.into())));
    }

    #[test]
    fn refinement_with_precision() {
        let mut prev = const_tau(64);
        for prec in [128u32, 256, 512, 1024] {
            let t = const_tau(prec);
            assert!(t.rad() <= prev.rad());
            assert!(t.overlaps(&prev));
            prev = t;
        }
    }

    #[test]
    fn escalation_doubles_until_success() {
        let mut seen = Vec::new();
        let v = escalate(64, 1024, "test", |p| {
            seen.push(p);
            Ok((p >= 256).then_some(p))
        })
        .unwrap();
        assert_eq!(v, 256);
        assert_eq!(seen, vec![64, 128, 256]);
        let e = escalate::<()>(64, 128, "never", |_| Ok(None));
        assert!(matches!(e, Err(Error::PrecisionExhausted { cap: 128, .. })));
    }

    #[test]
    fn decimal_parts_contain_the_ball() {
        let t = const_tau(256);
        let (m, r) = t.to_decimal_parts(25);
        let back = RealBall::from_decimal_parts(&m, &r, 256).unwrap();
        assert!(t.within(&back));
    }
}

#[cfg(test)]
mod containment {
    //! Composite expressions over exact rationals must contain the exact value.
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    proptest! {
        #[test]
        fn field_ops_contain_exact(a in -1000i64..1000, b in 1i64..1000, c in -1000i64..1000, d in 1i64..1000) {
            let x = r(a, b);
            let y = r(c, d);
            let bx = RealBall::from_ratio(&x, 96);
            let by = RealBall::from_ratio(&y, 96);
            let expr = &(&bx * &by) + &(&bx - &by);
            prop_assert!(expr.contains_ratio(&(&x * &y + &x - &y)));
            if !y.is_zero() {
                let q = bx.div(&by).unwrap();
                prop_assert!(q.contains_ratio(&(&x / &y)));
            }
        }

        #[test]
        fn log_matches_doubled_precision(n in 1i64..100_000, d in 1i64..1000) {
            let x = r(n, d);
            let lo = RealBall::from_ratio(&x, 128).ln().unwrap();
            let hi = RealBall::from_ratio(&x, 256).ln().unwrap();
            prop_assert!(hi.overlaps(&lo));
            prop_assert!(hi.rad() <= lo.rad());
        }

        #[test]
        fn log_of_product_is_sum(a in 1i64..10_000, b in 1i64..10_000) {
            let la = RealBall::from_int(a, 160).ln().unwrap();
            let lb = RealBall::from_int(b, 160).ln().unwrap();
            let lab = RealBall::from_int(a * b, 160).ln().unwrap();
            prop_assert!(lab.overlaps(&(&la + &lb)));
        }
    }
}
