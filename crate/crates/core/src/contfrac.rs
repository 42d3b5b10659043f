//! Certified continued-fraction expansion of a real given by a [`BallSource`].
//!
//! Digits are read off the two rational endpoints of an enclosure by running
//! the Gauss map exactly on both. The set of reals sharing a prefix of partial
//! quotients is an interval, so a prefix common to both endpoints is a prefix
//! of every point in between. If the requested depth is not reached the
//! enclosure is recomputed at twice the precision.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::realball::{escalate, BallSource, RealBall, PREC_CAP};

pub const DEFAULT_DEPTH: usize = 200;

/// Partial quotients `a_0..=a_K` with their convergents `p_k/q_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CFExpansion {
    a: Vec<BigInt>,
    p: Vec<BigInt>,
    q: Vec<BigInt>,
    prec: u32,
}

impl CFExpansion {
    /// Build from certified partial quotients.
    pub fn from_quotients(a: Vec<BigInt>, prec: u32) -> Self {
        let (mut p, mut q) = (Vec::with_capacity(a.len()), Vec::with_capacity(a.len()));
        // p_{-1} = 1, p_{-2} = 0, q_{-1} = 0, q_{-2} = 1
        let (mut p1, mut p2) = (BigInt::one(), BigInt::zero());
        let (mut q1, mut q2) = (BigInt::zero(), BigInt::one());
        for ak in &a {
            let pk = ak * &p1 + &p2;
            let qk = ak * &q1 + &q2;
            p2 = std::mem::replace(&mut p1, pk.clone());
            q2 = std::mem::replace(&mut q1, qk.clone());
            p.push(pk);
            q.push(qk);
        }
        CFExpansion { a, p, q, prec }
    }

    /// Index `K` of the last certified partial quotient.
    pub fn depth(&self) -> usize {
        self.a.len() - 1
    }

    pub fn partial_quotients(&self) -> &[BigInt] {
        &self.a
    }

    pub fn p(&self, k: usize) -> &BigInt {
        &self.p[k]
    }

    pub fn q(&self, k: usize) -> &BigInt {
        &self.q[k]
    }

    /// Precision at which the digits were certified.
    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn convergents(&self) -> impl Iterator<Item = (&BigInt, &BigInt)> {
        self.p.iter().zip(self.q.iter())
    }
}

/// Gauss-map digits shared by the rationals `n1/d1` and `n2/d2` (`d > 0`).
fn common_digits(
    mut n1: BigInt,
    mut d1: BigInt,
    mut n2: BigInt,
    mut d2: BigInt,
    want: usize,
) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(want);
    while out.len() < want {
        let (a1, r1) = n1.div_mod_floor(&d1);
        let (a2, r2) = n2.div_mod_floor(&d2);
        if a1 != a2 {
            break;
        }
        out.push(a1);
        // a terminating endpoint pins nothing past this digit
        if r1.is_zero() || r2.is_zero() {
            break;
        }
        (n1, d1) = (d1, r1);
        (n2, d2) = (d2, r2);
    }
    out
}

fn endpoints(ball: &RealBall) -> (BigInt, BigInt, BigInt, BigInt) {
    let lo = ball.lower().to_ratio();
    let hi = ball.upper().to_ratio();
    (
        lo.numer().clone(),
        lo.denom().clone(),
        hi.numer().clone(),
        hi.denom().clone(),
    )
}

/// Expand `x` to depth `depth` (digits `a_0..=a_depth`), starting at
/// `start_prec` bits.
pub fn expand(x: &dyn BallSource, depth: usize, start_prec: u32) -> Result<CFExpansion> {
    if depth < 1 {
        return Err(Error::DepthInsufficient {
            depth,
            what: "depth must be at least 1".into(),
        });
    }
    let want = depth + 1;
    escalate(start_prec, PREC_CAP, "continued fraction digits", |prec| {
        let ball = x.ball(prec)?;
        let (n1, d1, n2, d2) = endpoints(&ball);
        let digits = common_digits(n1, d1, n2, d2, want);
        Ok((digits.len() >= want).then(|| CFExpansion::from_quotients(digits, prec)))
    })
}

/// Smallest `k` with `q_k > bound`.
pub fn first_denominator_exceeding<'a>(
    cf: &'a CFExpansion,
    bound: &BigInt,
) -> Result<(usize, &'a BigInt, &'a BigInt)> {
    cf.q.iter()
        .position(|q| q > bound)
        .map(|k| (k, &cf.p[k], &cf.q[k]))
        .ok_or_else(|| Error::DepthInsufficient {
            depth: cf.depth(),
            what: format!("no convergent denominator exceeds {bound}"),
        })
}

/// `max(a_0, …, a_upto)`.
pub fn max_partial_quotient(cf: &CFExpansion, upto: usize) -> Result<BigInt> {
    if upto > cf.depth() {
        return Err(Error::DepthInsufficient {
            depth: cf.depth(),
            what: format!("quotient index {upto}"),
        });
    }
    Ok(cf.a[..=upto].iter().max().cloned().expect("nonempty"))
}

/// Largest integer `x` with `B^x ≤ A · (amax + 2) · Q`.
///
/// Computed as `⌊ln(A(amax + 2)Q)/ln B⌋` on the upper end of the enclosure,
/// which can only overshoot the true answer.
pub fn legendre_bound(a: &RealBall, b: &RealBall, amax: &BigInt, q: &BigInt) -> Result<BigInt> {
    if !b.lower().sub(&crate::Dyadic::from_int(1)).is_positive() {
        return Err(Error::Domain("Legendre bound needs B > 1".into()));
    }
    if !a.lower().is_positive() || !q.is_positive() {
        return Err(Error::Domain("Legendre bound needs A, Q > 0".into()));
    }
    let factor = RealBall::from_int(amax + 2, a.prec()).mul_int(q);
    let rhs = &factor * a;
    let x = rhs.ln()?.div(&b.ln()?)?;
    Ok(x.upper().floor_int())
}
