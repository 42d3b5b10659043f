//! Matveev's lower bound for linear forms in three logarithms, the height
//! estimates feeding it, and the absolute bound on `n` they imply.
//!
//! Coefficients that grow with `n` are carried symbolically as
//! `c · (1 + ln n)^p`; see [`Symbolic`].

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::realball::{ln2, ln_alpha, sqrt5, CertSign, Dyadic, RealBall};

/// `coeff · (1 + ln n)^log_power`.
#[derive(Clone, Debug)]
pub struct Symbolic {
    pub coeff: RealBall,
    pub log_power: u32,
}

impl Symbolic {
    pub fn constant(coeff: RealBall) -> Self {
        Symbolic {
            coeff,
            log_power: 0,
        }
    }

    pub fn with_power(coeff: RealBall, log_power: u32) -> Self {
        Symbolic { coeff, log_power }
    }
}

/// The exponent-size parameter `D` of the theorem.
#[derive(Clone, Debug)]
pub enum DegreeParam {
    /// `D = n`; the factor `1 + ln D` stays symbolic.
    Symbolic,
    Value(BigInt),
}

/// Data for one application of the lower bound.
#[derive(Clone, Debug)]
pub struct LinearFormSpec {
    pub label: String,
    /// number of multiplicands `l`
    pub terms: u32,
    pub field_degree: u32,
    pub d: DegreeParam,
    /// `A_1..A_l`; leave empty to get the bare base factor
    pub heights: Vec<Symbolic>,
}

impl LinearFormSpec {
    fn validate(&self, prec: u32) -> Result<()> {
        if self.terms < 2 {
            return Err(Error::Domain(format!(
                "{}: need at least two logarithms",
                self.label
            )));
        }
        if self.field_degree < 1 {
            return Err(Error::Domain(format!(
                "{}: field degree must be positive",
                self.label
            )));
        }
        if !self.heights.is_empty() && self.heights.len() != self.terms as usize {
            return Err(Error::Domain(format!(
                "{}: expected {} heights",
                self.label, self.terms
            )));
        }
        // h' ≥ 0.16, and (1 + ln n) ≥ 1 keeps symbolic coefficients above it
        let floor =
            RealBall::from_ratio(&num_rational::BigRational::new(4.into(), 25.into()), prec);
        for (j, a) in self.heights.iter().enumerate() {
            if !floor.certainly_le(&a.coeff) {
                return Err(Error::Domain(format!(
                    "{}: A_{} below 0.16",
                    self.label,
                    j + 1
                )));
            }
        }
        if let DegreeParam::Value(d) = &self.d {
            if d < &BigInt::from(3) {
                return Err(Error::Domain(format!(
                    "{}: D must be at least 3",
                    self.label
                )));
            }
        }
        Ok(())
    }
}

/// `1.4 · 30^{l+3} · l^{4.5} · d² · (1 + ln d)`.
pub fn base_factor(terms: u32, field_degree: u32, prec: u32) -> RealBall {
    let r = |n: i64, d: i64| {
        RealBall::from_ratio(&num_rational::BigRational::new(n.into(), d.into()), prec)
    };
    let l = RealBall::from_int(terms, prec);
    let l_pow = &l.powi(4) * &l.sqrt().expect("l > 0");
    let d = RealBall::from_int(field_degree, prec);
    let one = RealBall::from_int(1, prec);
    let log_d = d.ln().expect("d > 0");
    let thirty = RealBall::from_int(30, prec).powi(terms + 3);
    &(&(&(&r(7, 5) * &thirty) * &l_pow) * &d.powi(2)) * &(&one + &log_d)
}

/// Certified `C` with `log|Λ| > −C` (symbolic in `1 + ln n` when needed).
pub fn matveev_constant(spec: &LinearFormSpec, prec: u32) -> Result<Symbolic> {
    spec.validate(prec)?;
    let mut coeff = base_factor(spec.terms, spec.field_degree, prec);
    let mut power = 0;
    match &spec.d {
        DegreeParam::Symbolic => power += 1,
        DegreeParam::Value(d) => {
            let one = RealBall::from_int(1, prec);
            coeff = &coeff * &(&one + &RealBall::from_int(d.clone(), prec).ln()?);
        }
    }
    for a in &spec.heights {
        coeff = &coeff * &a.coeff;
        power += a.log_power;
    }
    Ok(Symbolic {
        coeff,
        log_power: power,
    })
}

/// `½ ln(2√5 α^k)`, the Case-1 height bound.
pub fn height_bound_eta1_case1(k: u64, prec: u32) -> RealBall {
    let two_sqrt5 = &RealBall::from_int(2, prec) * &sqrt5(prec);
    let v = &two_sqrt5.ln().expect("positive") + &ln_alpha(prec).mul_int(&BigInt::from(k));
    &v * &RealBall::exact(Dyadic::pow2(-1), prec)
}

/// Case-2 height: the exact `ln(√5(2^l − 1))` and the relaxation `(l + 3) ln 2`.
#[derive(Clone, Debug)]
pub struct Case2Height {
    pub exact: RealBall,
    pub relaxed: RealBall,
}

pub fn height_bound_eta1_case2(l: u64, prec: u32) -> Case2Height {
    let m = RealBall::from_int((BigInt::one() << l) - 1, prec);
    let exact = (&sqrt5(prec) * &m).ln().expect("positive");
    let relaxed = ln2(prec).mul_int(&BigInt::from(l + 3));
    Case2Height { exact, relaxed }
}

/// `k ln α + l ln 2 + ln(2√5) + 1`.
pub fn height_bound_eta1_combined(k: u64, l: u64, prec: u32) -> RealBall {
    let two_sqrt5 = &RealBall::from_int(2, prec) * &sqrt5(prec);
    let parts = [
        ln_alpha(prec).mul_int(&BigInt::from(k)),
        ln2(prec).mul_int(&BigInt::from(l)),
        two_sqrt5.ln().expect("positive"),
        RealBall::from_int(1, prec),
    ];
    parts
        .iter()
        .skip(1)
        .fold(parts[0].clone(), |acc, p| &acc + p)
}

// (n − shift) ln α − c3 (1 + ln n)^3
fn excess(n: &BigInt, shift: u32, c3: &RealBall, la: &RealBall) -> Result<RealBall> {
    let prec = c3.prec();
    let nb = RealBall::from_int(n.clone(), prec);
    let lhs = la.mul_int(&(n - shift));
    let one = RealBall::from_int(1, prec);
    let lg = (&one + &nb.ln()?).powi(3);
    Ok(&lhs - &(c3 * &lg))
}

fn certainly_contradicted(n: &BigInt, shift: u32, c3: &RealBall, la: &RealBall) -> Result<bool> {
    Ok(excess(n, shift, c3, la)?.sign_certain() == CertSign::Positive)
}

/// Smallest `N0` such that every `n ≥ N0` satisfies
/// `(n − 3) ln α ≥ C3 (1 + ln n)^3`.
pub fn solve_initial_bound(c3: &RealBall) -> Result<BigInt> {
    solve_initial_bound_shifted(c3, 3)
}

/// As [`solve_initial_bound`] with `n − shift` on the left.
///
/// The map `n ↦ (n − s) ln α − C (1 + ln n)^3` is convex for `n > e` and
/// negative at `n = s`, so once it is certified positive at some `n` it stays
/// positive beyond. Bisection keeps a certified-positive upper end.
pub fn solve_initial_bound_shifted(c3: &RealBall, shift: u32) -> Result<BigInt> {
    if c3.sign_certain() != CertSign::Positive {
        return Err(Error::Domain("initial bound needs C3 > 0".into()));
    }
    if shift < 3 {
        return Err(Error::Domain(
            "shift must be at least 3 (convexity needs n > e)".into(),
        ));
    }
    let la = ln_alpha(c3.prec());
    let mut lo = BigInt::from(shift);
    let mut hi = BigInt::from(2 * shift);
    while !certainly_contradicted(&hi, shift, c3, &la)? {
        lo = hi.clone();
        hi <<= 1;
        if hi.bits() > 4096 {
            return Err(Error::PrecisionInsufficient(
                "initial bound search diverged".into(),
            ));
        }
    }
    while &hi - &lo > BigInt::one() {
        let mid: BigInt = (&lo + &hi) >> 1;
        if certainly_contradicted(&mid, shift, c3, &la)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    debug_assert!(hi.is_positive());
    Ok(hi)
}

/// Every constant of the Matveev stage, recomputed from scratch.
#[derive(Clone, Debug)]
pub struct MatveevChain {
    /// `1.4·30^6·3^{4.5}·2²·(1 + ln 2)`
    pub base: RealBall,
    /// coefficient for Λ on `(1 + ln n)`, with `A = (ln 5, ln α, 2 ln 2)`
    pub lambda: RealBall,
    /// the same with `2 ln α` in place of `ln α`, the displayed reference variant
    pub lambda_displayed_variant: RealBall,
    /// min{(n − n₁) ln α, (m − m₁) ln 2} < c_min (1 + ln n)
    pub c_min: RealBall,
    /// A₁ coefficient for Λ₁/Λ₂ on `(1 + ln n)`
    pub a1_case12: RealBall,
    /// Λ₁/Λ₂ coefficient on `(1 + ln n)²`
    pub lambda12: RealBall,
    /// max{(n − n₁) ln α, (m − m₁) ln 2} < c_max (1 + ln n)²
    pub c_max: RealBall,
    /// A₁ coefficient for Λ₃ on `(1 + ln n)²`
    pub a1_case3: RealBall,
    /// Λ₃ coefficient on `(1 + ln n)³`
    pub lambda3: RealBall,
    /// every n ≥ n0 is contradicted
    pub n0: BigInt,
}

/// Offset in `(n − 4) ln α < C₃ (1 + ln n)³`, read off `|Λ₃| < α^{4−n}`.
pub const LAMBDA3_SHIFT: u32 = 4;

pub fn derive_matveev_chain(prec: u32) -> Result<MatveevChain> {
    let l2 = ln2(prec);
    let la = ln_alpha(prec);
    let ln5 = RealBall::from_int(5, prec).ln()?;
    let two_l2 = l2.mul_int(&BigInt::from(2));
    let one = RealBall::from_int(1, prec);
    let spec = |label: &str, heights: Vec<Symbolic>| LinearFormSpec {
        label: label.to_string(),
        terms: 3,
        field_degree: 2,
        d: DegreeParam::Symbolic,
        heights,
    };

    let base = matveev_constant(&spec("base", vec![]), prec)?.coeff;

    // Λ = √5^{-1} α^n 2^{-m} − 1
    let lambda = matveev_constant(
        &spec(
            "Λ",
            vec![
                Symbolic::constant(ln5.clone()),
                Symbolic::constant(la.clone()),
                Symbolic::constant(two_l2.clone()),
            ],
        ),
        prec,
    )?;
    let lambda_displayed_variant = matveev_constant(
        &spec(
            "Λ (2 ln α)",
            vec![
                Symbolic::constant(ln5),
                Symbolic::constant(la.mul_int(&BigInt::from(2))),
                Symbolic::constant(two_l2.clone()),
            ],
        ),
        prec,
    )?;
    // from |Λ| < max{α^{n₁−n+6}, 2^{m₁−m+1}}, absorbing 6 ln α ≤ 6 ln α (1 + ln n)
    let six_la = la.mul_int(&BigInt::from(6));
    let c_min = &lambda.coeff + &six_la.max(&l2);

    // Case 1: 2h ≤ (k + 4) ln α; Case 2: 2h ≤ 2(l + 3) ln 2, both with the min-bound
    let case1 = &c_min + &la.mul_int(&BigInt::from(4));
    let case2 = (&c_min + &l2.mul_int(&BigInt::from(3))).mul_int(&BigInt::from(2));
    let a1_case12 = case1.max(&case2);
    let lambda12 = matveev_constant(
        &spec(
            "Λ₁/Λ₂",
            vec![
                Symbolic::with_power(a1_case12.clone(), 1),
                Symbolic::constant(la.clone()),
                Symbolic::constant(two_l2.clone()),
            ],
        ),
        prec,
    )?;
    // (m − m₁ − 1) ln 2 < C or (n − n₁ − 6) ln α < C
    let c_max = &lambda12.coeff + &six_la.max(&l2);

    // h(η₁) ≤ k ln α + l ln 2 + ln(2√5) + 1 ≤ (c_min + c_max + ln(2√5) + 1)(1 + ln n)²
    let two_sqrt5 = (&RealBall::from_int(2, prec) * &sqrt5(prec)).ln()?;
    let h3 = &(&(&c_min + &c_max) + &two_sqrt5) + &one;
    let a1_case3 = h3.mul_int(&BigInt::from(2));
    let lambda3 = matveev_constant(
        &spec(
            "Λ₃",
            vec![
                Symbolic::with_power(a1_case3.clone(), 2),
                Symbolic::constant(la.clone()),
                Symbolic::constant(two_l2),
            ],
        ),
        prec,
    )?;
    let n0 = solve_initial_bound_shifted(&lambda3.coeff, LAMBDA3_SHIFT)?;

    Ok(MatveevChain {
        base,
        lambda: lambda.coeff,
        lambda_displayed_variant: lambda_displayed_variant.coeff,
        c_min,
        a1_case12,
        lambda12: lambda12.coeff,
        c_max,
        a1_case3,
        lambda3: lambda3.coeff,
        n0,
    })
}

/// Serializable snapshot of the chain's headline numbers.
#[derive(Clone, Debug, Serialize)]
pub struct ChainSummary {
    pub lambda: f64,
    pub lambda12: f64,
    pub lambda3: f64,
    pub n0: String,
}

impl MatveevChain {
    pub fn summary(&self) -> ChainSummary {
        ChainSummary {
            lambda: self.lambda.to_f64(),
            lambda12: self.lambda12.to_f64(),
            lambda3: self.lambda3.to_f64(),
            n0: self.n0.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadfield::{eta1_case1, eta1_case1_poly};
    use num_integer::Integer;

    const P: u32 = 256;

    fn sym(v: f64, p: u32) -> Symbolic {
        let b = RealBall::from_ratio(&num_rational::BigRational::from_float(v).unwrap(), P);
        Symbolic::with_power(b, p)
    }

    fn spec(heights: Vec<Symbolic>) -> LinearFormSpec {
        LinearFormSpec {
            label: "t".into(),
            terms: 3,
            field_degree: 2,
            d: DegreeParam::Symbolic,
            heights,
        }
    }

    #[test]
    fn base_factor_value() {
        // 1.4 · 30^6 · 3^4.5 · 4 · (1 + ln 2) ≈ 9.697e11
        let b = matveev_constant(&spec(vec![]), P).unwrap();
        assert_eq!(b.log_power, 1);
        let v = b.coeff.to_f64();
        assert!((v / 9.6966e11 - 1.0).abs() < 1e-4, "{v}");
    }

    #[test]
    fn reference_scale_coefficients() {
        let la = ln_alpha(P);
        let two_l2 = ln2(P).mul_int(&BigInt::from(2));
        let c12 = matveev_constant(
            &spec(vec![
                sym(2.6e12, 1),
                Symbolic::constant(la.clone()),
                Symbolic::constant(two_l2.clone()),
            ]),
            P,
        )
        .unwrap();
        assert_eq!(c12.log_power, 2);
        assert!(c12.coeff.to_f64() <= 1.7e24);
        let c3 = matveev_constant(
            &spec(vec![
                sym(4e24, 2),
                Symbolic::constant(la),
                Symbolic::constant(two_l2),
            ]),
            P,
        )
        .unwrap();
        assert_eq!(c3.log_power, 3);
        assert!(c3.coeff.to_f64() <= 3e36);
    }

    #[test]
    fn monotone_in_inputs() {
        let h = |a: f64| vec![sym(a, 0), sym(1.0, 0), sym(1.0, 0)];
        let small = matveev_constant(&spec(h(1.0)), P).unwrap().coeff;
        let large = matveev_constant(&spec(h(2.0)), P).unwrap().coeff;
        assert!(small.certainly_lt(&large));
        let with_d = |d: i64| LinearFormSpec {
            d: DegreeParam::Value(d.into()),
            ..spec(h(1.0))
        };
        let d10 = matveev_constant(&with_d(10), P).unwrap().coeff;
        let d100 = matveev_constant(&with_d(100), P).unwrap().coeff;
        assert!(d10.certainly_lt(&d100));
        let l2 = LinearFormSpec {
            terms: 2,
            heights: vec![sym(1.0, 0), sym(1.0, 0)],
            ..spec(vec![])
        };
        let l3 = spec(h(1.0));
        let c2 = matveev_constant(&l2, P).unwrap().coeff;
        let c3 = matveev_constant(&l3, P).unwrap().coeff;
        assert!(c2.certainly_lt(&c3));
    }

    #[test]
    fn invalid_specs() {
        assert!(matveev_constant(&spec(vec![sym(0.1, 0), sym(1.0, 0), sym(1.0, 0)]), P).is_err());
        assert!(matveev_constant(
            &LinearFormSpec {
                terms: 1,
                ..spec(vec![])
            },
            P
        )
        .is_err());
        assert!(matveev_constant(&spec(vec![sym(1.0, 0)]), P).is_err());
    }

    #[test]
    fn case_heights() {
        let h1 = height_bound_eta1_case1(1, P).to_f64();
        assert!((h1 - 0.98954).abs() < 1e-4, "{h1}");
        let h4 = height_bound_eta1_case1(4, P).to_f64();
        assert!((h4 - 1.71136).abs() < 1e-4, "{h4}");
        for k in 1..50 {
            assert!(height_bound_eta1_case1(k, P).certainly_lt(&height_bound_eta1_case1(k + 1, P)));
        }
        let c = height_bound_eta1_case2(1, P);
        assert!((c.exact.to_f64() - 0.80472).abs() < 1e-4);
        assert!((c.relaxed.to_f64() - 2.77259).abs() < 1e-4);
        assert!(c.exact.certainly_le(&c.relaxed));
        let c10 = height_bound_eta1_case2(10, P);
        assert!((c10.exact.to_f64() - 7.73521).abs() < 1e-4, "{}", c10.exact);
        for l in 1..200 {
            let c = height_bound_eta1_case2(l, P);
            assert!(c.exact.certainly_le(&c.relaxed));
        }
        let hc = height_bound_eta1_combined(1, 1, P).to_f64();
        assert!((hc - 3.6723).abs() < 1e-3, "{hc}");
        let big = height_bound_eta1_combined(379, 259, P).to_f64();
        assert!((big - 364.402).abs() < 1e-3, "{big}");
        let d = &height_bound_eta1_combined(11, 7, P) - &height_bound_eta1_combined(10, 7, P);
        assert!(d.overlaps(&ln_alpha(P)));
    }

    // h(η) from the primitive minimal polynomial and both real conjugates
    fn exact_height_case1(k: u64) -> RealBall {
        let (c2, c1, c0) = eta1_case1_poly(k);
        let g = c2.gcd(&c1).gcd(&c0);
        let lead = (c2 / g).abs();
        let eta = eta1_case1(k);
        let one = RealBall::from_int(1, P);
        let mut h = RealBall::from_int(lead, P).ln().unwrap();
        for root in [eta.clone(), eta.conj()] {
            let r = RealBall::from_quadrat(&root, P).abs();
            h = &h + &r.max(&one).ln().unwrap();
        }
        &h * &RealBall::exact(Dyadic::pow2(-1), P)
    }

    #[test]
    fn case1_bound_dominates_true_height() {
        for k in 1..=20 {
            let exact = exact_height_case1(k);
            assert!(
                exact.certainly_le(&height_bound_eta1_case1(k, P)),
                "k = {k}: {exact}"
            );
        }
    }

    #[test]
    fn initial_bound_at_reference_constant() {
        let c3 = RealBall::from_int(3, P).mul_int(&num_traits::pow(BigInt::from(10), 36));
        let n0 = solve_initial_bound(&c3).unwrap();
        let e42 = num_traits::pow(BigInt::from(10), 42);
        assert!(n0 <= BigInt::from(7) * &e42);
        let approx = n0.to_string().len();
        assert_eq!(approx, 43);
        assert!(n0 > BigInt::from(6) * &e42);
        // the crossing is tight: n0 - 1 is not certified contradicted
        let la = ln_alpha(P);
        assert!(!certainly_contradicted(&(&n0 - 1), 3, &c3, &la).unwrap());
    }

    #[test]
    fn initial_bound_constructed_crossing() {
        // C3 = ln α · 7 / (1 + ln 10)^3 puts the crossing exactly at n = 10;
        // shave it so the crossing is certifiable
        let one = RealBall::from_int(1, P);
        let denom = (&one + &RealBall::from_int(10, P).ln().unwrap()).powi(3);
        let c3 = ln_alpha(P).mul_int(&BigInt::from(7)).div(&denom).unwrap();
        let shave = RealBall::from_ratio(
            &num_rational::BigRational::new(999_999.into(), 1_000_000.into()),
            P,
        );
        let n0 = solve_initial_bound(&(&c3 * &shave)).unwrap();
        assert!(n0 <= BigInt::from(10), "{n0}");
    }

    #[test]
    fn chain_against_reference_values() {
        let ch = derive_matveev_chain(P).unwrap();
        let s = ch.summary();
        assert!((1.0e12..=2.5e12).contains(&s.lambda), "{}", s.lambda);
        assert!(ch.lambda_displayed_variant.to_f64() > 2.0e12);
        assert!(s.lambda12 <= 1.8e24, "{}", s.lambda12);
        assert!(s.lambda3 <= 3.0e36, "{}", s.lambda3);
        let bound = num_traits::pow(BigInt::from(10), 43);
        assert!(ch.n0 <= bound);
        assert!(ch.n0 > num_traits::pow(BigInt::from(10), 42));
    }
}
