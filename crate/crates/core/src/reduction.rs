//! Dujella–Pethő reduction in its two-sided form.
//!
//! For a convergent denominator `q` and `|m| ≤ M`,
//! `q·|mτ − n + μ| ≥ ‖qμ‖ − M‖qτ‖ = ε`, so `|mτ − n + μ| < A·B^{−k}` with
//! `ε > 0` forces `B^k < Aq/ε`.

use std::collections::BTreeSet;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;

use crate::contfrac::{
    first_denominator_exceeding, legendre_bound, max_partial_quotient, CFExpansion,
};
use crate::error::{Error, Result};
use crate::realball::{BallSource, CertSign, Dyadic, RealBall, Round, PREC_CAP};

/// Precision of the final `ln(Aq/ε)/ln B` evaluation.
pub const LOG_PREC: u32 = 128;
/// Further convergents tried after the first admissible one.
pub const CONVERGENT_RETRIES: usize = 2;
/// `|τ-coefficient| ≤ M + LEGENDRE_PAD` in the fallback.
pub const LEGENDRE_PAD: u64 = 10;

/// One instance `|mτ − n + μ| < A·B^{−k}`, `|m| ≤ M`.
pub struct ReductionProblem<'a> {
    pub label: String,
    pub tau: &'a dyn BallSource,
    pub mu: &'a dyn BallSource,
    pub a: RealBall,
    pub b: RealBall,
    pub m: BigInt,
    /// also require `q > q_floor`
    pub q_floor: Option<BigInt>,
}

#[derive(Clone, Debug)]
pub struct Bounded {
    /// no solution has `k > k_max`
    pub k_max: i64,
    pub q_used: BigInt,
    pub convergent_index: usize,
    pub epsilon: RealBall,
    /// `epsilon.lower()` rounded down to [`LOG_PREC`] bits
    pub epsilon_lb: Dyadic,
    pub prec: u32,
}

#[derive(Clone, Debug)]
pub enum ReductionResult {
    Bounded(Bounded),
    Degenerate {
        special: Option<(i64, u64)>,
        detail: String,
    },
}

impl ReductionResult {
    pub fn bounded(&self) -> Option<&Bounded> {
        match self {
            ReductionResult::Bounded(b) => Some(b),
            ReductionResult::Degenerate { .. } => None,
        }
    }
}

#[derive(Clone, Debug)]
struct Candidate {
    index: usize,
    q: BigInt,
    tau_dist: RealBall,
}

/// Convergent data shared by every instance with the same `τ` and `M`.
pub struct Reducer<'a> {
    tau: &'a dyn BallSource,
    m: BigInt,
    prec: u32,
    candidates: Vec<Candidate>,
}

impl<'a> Reducer<'a> {
    pub fn new(
        tau: &'a dyn BallSource,
        cf: &CFExpansion,
        m: &BigInt,
        q_floor: Option<&BigInt>,
        prec: u32,
    ) -> Result<Self> {
        if !m.is_positive() {
            return Err(Error::Domain("reduction needs M ≥ 1".into()));
        }
        let mut floor: BigInt = m * 6;
        if let Some(f) = q_floor {
            floor = floor.max(f.clone());
        }
        let (first, _, _) = first_denominator_exceeding(cf, &floor)?;
        let last = (first + CONVERGENT_RETRIES).min(cf.depth());
        let tau_ball = tau.ball(prec)?;
        let candidates = (first..=last)
            .map(|index| {
                let q = cf.q(index).clone();
                let tau_dist = tau_ball.mul_int(&q).dist_to_int()?;
                Ok(Candidate { index, q, tau_dist })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Reducer {
            tau,
            m: m.clone(),
            prec,
            candidates,
        })
    }

    pub fn m(&self) -> &BigInt {
        &self.m
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// `(index, q)` of the convergents that will be tried, in order.
    pub fn candidates(&self) -> impl Iterator<Item = (usize, &BigInt)> {
        self.candidates.iter().map(|c| (c.index, &c.q))
    }

    fn tau_dist(&self, c: &Candidate, prec: u32) -> Result<RealBall> {
        if prec == self.prec {
            return Ok(c.tau_dist.clone());
        }
        self.tau.ball(prec)?.mul_int(&c.q).dist_to_int()
    }

    /// `‖μq‖ − M‖τq‖` at `prec`.
    pub fn epsilon_at(&self, q: &BigInt, mu: &RealBall, prec: u32) -> Result<RealBall> {
        let c = self
            .candidates
            .iter()
            .find(|c| &c.q == q)
            .ok_or_else(|| Error::Domain(format!("{q} is not a candidate convergent")))?;
        self.epsilon(c, mu, prec)
    }

    fn epsilon(&self, c: &Candidate, mu: &RealBall, prec: u32) -> Result<RealBall> {
        let mu_q = mu.mul_int(&c.q).dist_to_int()?;
        Ok(&mu_q - &self.tau_dist(c, prec)?.mul_int(&self.m))
    }

    /// One [`LogScale`] per candidate convergent.
    pub fn scales(&self, a: &RealBall, b: &RealBall) -> Result<Vec<LogScale>> {
        self.candidates
            .iter()
            .map(|c| LogScale::new(a, b, &c.q))
            .collect()
    }

    /// Reduce one instance with this reducer's convergents.
    pub fn reduce(
        &self,
        mu: &dyn BallSource,
        a: &RealBall,
        b: &RealBall,
    ) -> Result<ReductionResult> {
        self.reduce_scaled(mu, &self.scales(a, b)?)
    }

    /// As [`Reducer::reduce`] with precomputed [`Reducer::scales`].
    pub fn reduce_scaled(
        &self,
        mu: &dyn BallSource,
        scales: &[LogScale],
    ) -> Result<ReductionResult> {
        let mut exhausted = false;
        for (c, scale) in self.candidates.iter().zip(scales) {
            let mut prec = self.prec;
            loop {
                let eps = match self.epsilon(c, &mu.ball(prec)?, prec) {
                    Ok(e) => e,
                    Err(Error::PrecisionInsufficient(_)) => {
                        RealBall::from_bounds(&Dyadic::from_int(-1), &Dyadic::from_int(1), prec)
                    }
                    Err(e) => return Err(e),
                };
                match eps.sign_certain() {
                    CertSign::Positive => {
                        return bounded(c, eps, prec, scale).map(ReductionResult::Bounded)
                    }
                    CertSign::Negative => break,
                    CertSign::Undetermined if prec >= PREC_CAP => {
                        exhausted = true;
                        break;
                    }
                    CertSign::Undetermined => prec = (prec * 2).min(PREC_CAP),
                }
            }
        }
        if exhausted {
            return Err(Error::PrecisionExhausted {
                cap: PREC_CAP,
                what: "sign of ε".into(),
            });
        }
        let tried: Vec<String> = self
            .candidates
            .iter()
            .map(|c| c.index.to_string())
            .collect();
        Ok(ReductionResult::Degenerate {
            special: None,
            detail: format!("ε ≤ 0 at convergents {}", tried.join(", ")),
        })
    }
}

/// `ln(Aq)` and `ln B` for one convergent, at [`LOG_PREC`].
#[derive(Clone, Debug)]
pub struct LogScale {
    ln_aq: RealBall,
    ln_b: RealBall,
}

impl LogScale {
    pub fn new(a: &RealBall, b: &RealBall, q: &BigInt) -> Result<Self> {
        let ln_aq = a.with_prec(LOG_PREC).mul_int(q).ln()?;
        Ok(LogScale {
            ln_aq,
            ln_b: b.with_prec(LOG_PREC).ln()?,
        })
    }

    /// `⌈(ln(Aq) − ln ε_lb)/ln B⌉ − 1`.
    pub fn k_bound(&self, epsilon_lb: &Dyadic) -> Result<i64> {
        if !epsilon_lb.is_positive() {
            return Err(Error::Domain("ε lower bound must be positive".into()));
        }
        let ln_eps = RealBall::exact(epsilon_lb.clone(), LOG_PREC).ln()?;
        let x = (&self.ln_aq - &ln_eps).div(&self.ln_b)?;
        x.largest_int_below_upper()
            .to_i64()
            .ok_or_else(|| Error::Domain("reduced bound out of range".into()))
    }
}

/// `⌈ln(Aq/ε_lb)/ln B⌉ − 1`.
pub fn k_bound(a: &RealBall, b: &RealBall, q: &BigInt, epsilon_lb: &Dyadic) -> Result<i64> {
    LogScale::new(a, b, q)?.k_bound(epsilon_lb)
}

fn bounded(c: &Candidate, eps: RealBall, prec: u32, scale: &LogScale) -> Result<Bounded> {
    let epsilon_lb = eps.lower().round(LOG_PREC as u64, Round::Floor);
    let k_max = scale.k_bound(&epsilon_lb)?;
    Ok(Bounded {
        k_max,
        q_used: c.q.clone(),
        convergent_index: c.index,
        epsilon: eps,
        epsilon_lb,
        prec,
    })
}

fn check_problem(p: &ReductionProblem<'_>) -> Result<()> {
    if p.a.sign_certain() != CertSign::Positive {
        return Err(Error::Domain(format!("{}: A must be positive", p.label)));
    }
    if !(p.b.lower() > Dyadic::from_int(1)) {
        return Err(Error::Domain(format!("{}: B must exceed 1", p.label)));
    }
    Ok(())
}

/// Reduce a single instance, choosing the first convergent with `q > 6M`
/// (and `q > q_floor`).
pub fn dujella_petho(problem: &ReductionProblem<'_>, cf: &CFExpansion) -> Result<ReductionResult> {
    check_problem(problem)?;
    let prec = cf.precision().max(problem.a.prec());
    let r = Reducer::new(problem.tau, cf, &problem.m, problem.q_floor.as_ref(), prec)?;
    r.reduce(problem.mu, &problem.a, &problem.b)
}

/// A family `μ_i` of instances sharing `A`, `B`, `τ` and `M`.
pub struct Family<'f, I> {
    pub label: String,
    pub indices: Vec<I>,
    pub mu: &'f (dyn Fn(&I, u32) -> Result<RealBall> + Sync),
    /// `(s, t)` with `μ_i = s + tτ`, if any
    pub detect: &'f (dyn Fn(&I) -> Option<(i64, u64)> + Sync),
    pub expected_skip: Option<BTreeSet<I>>,
}

#[derive(Clone, Debug)]
pub struct FamilyResult<I> {
    pub label: String,
    pub k_max: i64,
    pub k_max_at: I,
    pub min_epsilon_at: I,
    pub degenerate: Vec<(I, (i64, u64))>,
    pub records: Vec<(I, ReductionResult)>,
}

impl<I: PartialEq> FamilyResult<I> {
    pub fn record(&self, idx: &I) -> Option<&ReductionResult> {
        self.records.iter().find(|(i, _)| i == idx).map(|(_, r)| r)
    }

    pub fn min_epsilon(&self) -> &Bounded {
        self.record(&self.min_epsilon_at)
            .and_then(|r| r.bounded())
            .expect("recorded")
    }

    pub fn k_max_record(&self) -> &Bounded {
        self.record(&self.k_max_at)
            .and_then(|r| r.bounded())
            .expect("recorded")
    }

    pub fn bounded_count(&self) -> usize {
        self.records
            .iter()
            .filter(|(_, r)| r.bounded().is_some())
            .count()
    }
}

/// Run every index of `family` in parallel and merge.
///
/// A degenerate index must be explained by `family.detect`, and if an
/// expected skip set is given the degenerate indices must equal it.
pub fn reduce_family<I>(
    reducer: &Reducer<'_>,
    family: &Family<'_, I>,
    a: &RealBall,
    b: &RealBall,
) -> Result<FamilyResult<I>>
where
    I: Clone + Ord + Debug + Send + Sync,
{
    let scales = reducer.scales(a, b)?;
    let records: Vec<(I, ReductionResult)> = family
        .indices
        .par_iter()
        .map(|idx| {
            let src = |prec: u32| (family.mu)(idx, prec);
            let tag = |e: Error| e.in_stage(&format!("{} {idx:?}", family.label));
            let r = reducer.reduce_scaled(&src, &scales).map_err(tag)?;
            let r = match r {
                ReductionResult::Degenerate { detail, .. } => match (family.detect)(idx) {
                    Some(st) => ReductionResult::Degenerate {
                        special: Some(st),
                        detail,
                    },
                    None => {
                        return Err(Error::UnexplainedDegenerate {
                            family: family.label.clone(),
                            index: format!("{idx:?}"),
                        })
                    }
                },
                ok => ok,
            };
            Ok((idx.clone(), r))
        })
        .collect::<Result<_>>()?;

    let mut degenerate = Vec::new();
    let mut best: Option<(&I, &Bounded)> = None;
    let mut smallest: Option<(&I, &Bounded)> = None;
    for (idx, r) in &records {
        match r {
            ReductionResult::Degenerate { special, .. } => {
                degenerate.push((idx.clone(), special.expect("checked")))
            }
            ReductionResult::Bounded(bd) => {
                if best.map_or(true, |(_, b0)| bd.k_max > b0.k_max) {
                    best = Some((idx, bd));
                }
                if smallest.map_or(true, |(_, b0)| bd.epsilon_lb < b0.epsilon_lb) {
                    smallest = Some((idx, bd));
                }
            }
        }
    }
    if let Some(expected) = &family.expected_skip {
        let found: BTreeSet<I> = degenerate.iter().map(|(i, _)| i.clone()).collect();
        if &found != expected {
            return Err(Error::UnexplainedDegenerate {
                family: family.label.clone(),
                index: format!("found {found:?}, expected {expected:?}"),
            });
        }
    }
    let (Some((k_at, bd)), Some((e_at, _))) = (best, smallest) else {
        return Err(Error::NonClosing(format!(
            "{}: no instance was bounded",
            family.label
        )));
    };
    let (k_max, k_max_at, min_epsilon_at) = (bd.k_max, k_at.clone(), e_at.clone());
    Ok(FamilyResult {
        label: family.label.clone(),
        k_max,
        k_max_at,
        min_epsilon_at,
        degenerate,
        records,
    })
}

/// Outcome of the Legendre-criterion argument for a degenerate instance.
#[derive(Clone, Debug)]
pub struct Fallback {
    pub special: (i64, u64),
    /// no solution has `k > bound`
    pub bound: BigInt,
    pub legendre: BigInt,
    /// smallest `x` with `B^x > 2A·M_pad`, where Legendre applies
    pub threshold: BigInt,
    pub amax: BigInt,
    pub amax_upto: usize,
    pub m_pad: BigInt,
}

/// With `μ = s + tτ` the instance reads `|(m + t)τ − (n − s)| < A·B^{−k}`.
///
/// For `B^k > 2A·M_pad` Legendre makes `(n − s)/(m + t)` a convergent
/// `p_j/q_j` with `q_j ≤ M_pad`, and `1/((a_{j+1} + 2)q_j²) < |τ − p_j/q_j|`
/// then gives `B^k < A(amax + 2)M_pad`.
pub fn degenerate_fallback(
    special: (i64, u64),
    a: &RealBall,
    b: &RealBall,
    m: &BigInt,
    cf: &CFExpansion,
) -> Result<Fallback> {
    if special.1 > LEGENDRE_PAD {
        return Err(Error::Domain(format!(
            "shift t = {} exceeds the pad {LEGENDRE_PAD}",
            special.1
        )));
    }
    let m_pad = m + LEGENDRE_PAD;
    let (amax_upto, _, _) = first_denominator_exceeding(cf, &m_pad)?;
    let amax = max_partial_quotient(cf, amax_upto)?;
    let legendre = legendre_bound(a, b, &amax, &m_pad)?;
    let two_a = a.mul_int(&BigInt::from(2)).with_prec(LOG_PREC);
    let x = two_a
        .mul_int(&m_pad)
        .ln()?
        .div(&b.with_prec(LOG_PREC).ln()?)?;
    let threshold = x.upper().floor_int() + 1;
    let bound = legendre.clone().max(&threshold - 1);
    Ok(Fallback {
        special,
        bound,
        legendre,
        threshold,
        amax,
        amax_upto,
        m_pad,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contfrac::expand;
    use crate::quadfield::QuadRat;
    use crate::realball::{const_tau, ln2, sqrt5, DEFAULT_PREC};

    fn tau_src(p: u32) -> Result<RealBall> {
        Ok(const_tau(p))
    }

    fn alpha(p: u32) -> RealBall {
        RealBall::from_quadrat(&QuadRat::alpha(), p)
    }

    fn big(s: &str) -> BigInt {
        s.parse().unwrap()
    }

    // μ = ln(1/√5)/ln 2
    fn mu_gamma(p: u32) -> Result<RealBall> {
        let l = sqrt5(p + 16).ln()?;
        Ok((-&l).div(&ln2(p + 16))?.with_prec(p))
    }

    fn toy_mu(p: u32) -> Result<RealBall> {
        let l3 = RealBall::from_int(3, p + 16).ln()?;
        let one = RealBall::from_int(1, p + 16);
        Ok((&l3.div(&ln2(p + 16))? - &one).with_prec(p))
    }

    #[test]
    fn toy_soundness_oracle() {
        let cf = expand(&tau_src, 60, 256).unwrap();
        let m = BigInt::from(1000);
        let a = RealBall::from_int(10, 256);
        let b = RealBall::from_int(2, 256);
        let prob = ReductionProblem {
            label: "toy".into(),
            tau: &tau_src,
            mu: &toy_mu,
            a: a.clone(),
            b: b.clone(),
            m: m.clone(),
            q_floor: None,
        };
        let res = dujella_petho(&prob, &cf).unwrap();
        let bd = res.bounded().expect("toy instance is not degenerate");
        assert!(bd.q_used > BigInt::from(6000));
        // every m ≤ M: largest k with |mτ − n + μ| < 10·2^{−k} must be ≤ k_max
        let (tau, mu) = (const_tau(256), toy_mu(256).unwrap());
        let mut worst = i64::MIN;
        for mm in 0..=1000i64 {
            let v = &tau.mul_int(&BigInt::from(mm)) + &mu;
            let d = v.dist_to_int().unwrap();
            assert!(d.sign_certain() == CertSign::Positive);
            // k* = ⌈log2(10/d)⌉ − 1, taken generously from the upper end
            let x = a
                .div(&d)
                .unwrap()
                .ln()
                .unwrap()
                .div(&b.ln().unwrap())
                .unwrap();
            let kstar = x.upper().ceil_int().to_i64().unwrap() - 1;
            worst = worst.max(kstar);
        }
        assert!(worst <= bd.k_max, "oracle {worst} > k_max {}", bd.k_max);
        // the bound is not vacuous
        assert!(bd.k_max < 40, "{}", bd.k_max);
    }

    #[test]
    fn zero_shift_is_degenerate() {
        let cf = expand(&tau_src, 160, DEFAULT_PREC).unwrap();
        let zero = |p: u32| -> Result<RealBall> { Ok(RealBall::from_int(0, p)) };
        let prob = ReductionProblem {
            label: "μ = 0".into(),
            tau: &tau_src,
            mu: &zero,
            a: RealBall::from_int(6, DEFAULT_PREC),
            b: RealBall::from_int(2, DEFAULT_PREC),
            m: big("7000000000000000000000000000000000000000000"),
            q_floor: None,
        };
        assert!(matches!(
            dujella_petho(&prob, &cf).unwrap(),
            ReductionResult::Degenerate { .. }
        ));
    }

    fn gamma(a: i64, b: RealBall) -> Bounded {
        let cf = expand(&tau_src, 200, DEFAULT_PREC).unwrap();
        let prob = ReductionProblem {
            label: "Γ".into(),
            tau: &tau_src,
            mu: &mu_gamma,
            a: RealBall::from_int(a, DEFAULT_PREC),
            b,
            m: big("7000000000000000000000000000000000000000000"),
            q_floor: Some(num_traits::pow(BigInt::from(10), 74)),
        };
        dujella_petho(&prob, &cf)
            .unwrap()
            .bounded()
            .unwrap()
            .clone()
    }

    #[test]
    fn gamma_instances() {
        let p149 =
            big("75583009274523299909961213530369339183941874844471761873846700783141852920");
        let q149 =
            big("108871285052861946543251595260369738218462010383323482629611084407107090003");
        let g = gamma(68, alpha(DEFAULT_PREC));
        assert_eq!(g.convergent_index, 149);
        assert_eq!(g.q_used, q149);
        let cf = expand(&tau_src, 150, DEFAULT_PREC).unwrap();
        assert_eq!(cf.p(149), &p149);
        assert!(g.epsilon_lb.to_f64() >= 0.09, "{}", g.epsilon);
        assert!((g.k_max - 368).abs() <= 2, "{}", g.k_max);
        let g2 = gamma(6, RealBall::from_int(2, DEFAULT_PREC));
        assert!((g2.k_max - 252).abs() <= 2, "{}", g2.k_max);
    }

    #[test]
    fn epsilon_reproducible_at_double_precision() {
        let g = gamma(68, alpha(DEFAULT_PREC));
        let cf = expand(&tau_src, 200, 2 * DEFAULT_PREC).unwrap();
        let m = big("7000000000000000000000000000000000000000000");
        let r = Reducer::new(
            &tau_src,
            &cf,
            &m,
            Some(&num_traits::pow(BigInt::from(10), 74)),
            2 * DEFAULT_PREC,
        )
        .unwrap();
        let eps = r
            .epsilon_at(
                &g.q_used,
                &mu_gamma(2 * DEFAULT_PREC).unwrap(),
                2 * DEFAULT_PREC,
            )
            .unwrap();
        assert!(eps.overlaps(&g.epsilon));
        assert!(eps.rad() <= g.epsilon.rad());
    }

    #[test]
    fn family_with_planted_degenerates() {
        // μ_i = i·τ for i ∈ {0, 3} and irrational shifts otherwise
        let cf = expand(&tau_src, 200, DEFAULT_PREC).unwrap();
        let m = BigInt::from(10u64.pow(12));
        let r = Reducer::new(&tau_src, &cf, &m, None, DEFAULT_PREC).unwrap();
        let mu = |i: &u64, p: u32| -> Result<RealBall> {
            if i % 3 == 0 {
                Ok(const_tau(p).mul_int(&BigInt::from(*i)))
            } else {
                Ok(RealBall::from_int(*i as i64 + 1, p).ln()?)
            }
        };
        let detect = |i: &u64| (i % 3 == 0).then_some((0, *i));
        let fam = Family {
            label: "planted".into(),
            indices: (1..=10).collect(),
            mu: &mu,
            detect: &detect,
            expected_skip: Some([3, 6, 9].into_iter().collect()),
        };
        let a = RealBall::from_int(6, DEFAULT_PREC);
        let b = RealBall::from_int(2, DEFAULT_PREC);
        let res = reduce_family(&r, &fam, &a, &b).unwrap();
        assert_eq!(res.degenerate.len(), 3);
        assert_eq!(res.bounded_count(), 7);
        assert!(res.min_epsilon().epsilon_lb <= res.k_max_record().epsilon_lb);

        let wrong = Family {
            expected_skip: Some([3].into_iter().collect()),
            ..fam
        };
        assert!(matches!(
            reduce_family(&r, &wrong, &a, &b),
            Err(Error::UnexplainedDegenerate { .. })
        ));
        let no_detect = |_: &u64| None;
        let blind = Family {
            detect: &no_detect,
            expected_skip: None,
            ..wrong
        };
        assert!(reduce_family(&r, &blind, &a, &b).is_err());
    }

    #[test]
    fn fallback_examples() {
        let cf = expand(&tau_src, 200, DEFAULT_PREC).unwrap();
        let m = big("7000000000000000000000000000000000000000000");
        let two = RealBall::from_int(2, DEFAULT_PREC);
        let f = degenerate_fallback((0, 2), &RealBall::from_int(4, DEFAULT_PREC), &two, &m, &cf)
            .unwrap();
        assert_eq!(f.bound, BigInt::from(151));
        assert_eq!(f.amax, BigInt::from(134));
        assert!(f.amax_upto <= 99);
        let f12 = degenerate_fallback((3, 6), &RealBall::from_int(4, DEFAULT_PREC), &two, &m, &cf)
            .unwrap();
        assert_eq!(f12.bound, BigInt::from(151));
        let f8 = degenerate_fallback(
            (0, 4),
            &RealBall::from_int(13, DEFAULT_PREC),
            &alpha(DEFAULT_PREC),
            &m,
            &cf,
        )
        .unwrap();
        assert_eq!(f8.bound, BigInt::from(220));
        assert!(f8.threshold <= f8.legendre);
        assert!(degenerate_fallback((0, 11), &two, &two, &m, &cf).is_err());
    }

    #[test]
    fn invalid_problems() {
        let cf = expand(&tau_src, 60, 256).unwrap();
        let mk = |a: i64, b: i64, m: i64| ReductionProblem {
            label: "bad".into(),
            tau: &tau_src,
            mu: &toy_mu,
            a: RealBall::from_int(a, 256),
            b: RealBall::from_int(b, 256),
            m: BigInt::from(m),
            q_floor: None,
        };
        assert!(dujella_petho(&mk(0, 2, 10), &cf).is_err());
        assert!(dujella_petho(&mk(1, 1, 10), &cf).is_err());
        assert!(dujella_petho(&mk(1, 2, 0), &cf).is_err());
        let huge = num_traits::pow(BigInt::from(10), 200);
        let p = ReductionProblem {
            m: huge,
            ..mk(1, 2, 1)
        };
        assert!(matches!(
            dujella_petho(&p, &cf),
            Err(Error::DepthInsufficient { .. })
        ));
    }
}
