//! End-to-end proof: search, the Matveev stage, the four reduction passes
//! and the closing verdict.
//!
//! Stages, in order:
//!
//! | id   | content                                                        |
//! |------|----------------------------------------------------------------|
//! | S0   | exhaustive search on the configured rectangle                  |
//! | S1   | Matveev constants for Λ, Λ₁/Λ₂, Λ₃ and the absolute bound `N0`  |
//! | S2.n | Γ with `(A, B) = (A_Γ, α)`: bounds `n − n₁`                     |
//! | S2.m | Γ with `(A, B) = (A_Γ₁, 2)`: bounds `m − m₁`                    |
//! | S3   | Γ₁ over `k = n − n₁ ≤ S2.n`: bounds `m − m₁`                    |
//! | S4   | Γ₂ over `l = m − m₁ ≤ S2.m`: bounds `n − n₁`                    |
//! | S5   | window `K = max(S2.n, S4)`, `L = max(S3, S2.m)`                 |
//! | S6   | Γ₃ over `[1, K] × [1, L]`: bounds `n`                           |
//! | S7   | verdict                                                        |

pub mod report;
mod verify;

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::bounds::{derive_matveev_chain, MatveevChain};
use crate::contfrac::{expand, CFExpansion, DEFAULT_DEPTH};
use crate::error::{Error, Result};
use crate::quadfield::{
    alpha_pow, detect_special_form, eta1_case2, lambda3_nonzero_check, match_power_product, QuadRat,
};
use crate::realball::{const_tau, ln2, sqrt5, RealBall, DEFAULT_PREC, MIN_PREC, PREC_CAP};
use crate::reduction::{
    degenerate_fallback, reduce_family, Bounded, Fallback, Family, FamilyResult, Reducer,
    ReductionResult, LEGENDRE_PAD,
};
use crate::search::{enumerate, CollisionTable};

pub use report::ProofReport;
pub use verify::{verify_report, verify_report_detailed, verify_value};

/// Environment variable overriding the default working precision.
pub const PREC_ENV: &str = "PILLAI_PREC";
pub const DEFAULT_NMAX: u32 = 400;
pub const DEFAULT_MMAX: u32 = 300;
/// The constants of S2–S6 use `n ≥ 400`.
pub const MIN_NMAX: u32 = 400;

const GUARD: u32 = 32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    pub prec: u32,
    pub depth: usize,
    pub n_max: u32,
    pub m_max: u32,
    /// also require reduction denominators `q > q_floor`
    pub q_floor: Option<BigInt>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            prec: DEFAULT_PREC,
            depth: DEFAULT_DEPTH,
            n_max: DEFAULT_NMAX,
            m_max: DEFAULT_MMAX,
            q_floor: Some(num_traits::pow(BigInt::from(10), 74)),
        }
    }
}

impl Config {
    /// Defaults, with the precision taken from `PILLAI_PREC` when set.
    pub fn from_env() -> Result<Self> {
        let mut c = Config::default();
        if let Ok(v) = std::env::var(PREC_ENV) {
            c.prec = v
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("{PREC_ENV}={v} is not a bit count")))?;
        }
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(MIN_PREC..=PREC_CAP).contains(&self.prec) {
            return Err(Error::Config(format!(
                "precision {} outside [{MIN_PREC}, {PREC_CAP}]",
                self.prec
            )));
        }
        if self.depth < 2 {
            return Err(Error::Config("depth must be at least 2".into()));
        }
        if self.n_max < MIN_NMAX {
            return Err(Error::Config(format!(
                "n_max {} below {MIN_NMAX}",
                self.n_max
            )));
        }
        // the larger of two representations has 2^{m−1} < F_n ≤ α^{n−1}
        let need = m_cover(self.n_max);
        if self.m_max < need {
            return Err(Error::Config(format!(
                "m_max {} below {need}, needed to cover n_max {}",
                self.m_max, self.n_max
            )));
        }
        Ok(())
    }
}

// ⌊(n − 1)τ⌋ + 1, from a certified upper end
fn m_cover(n_max: u32) -> u32 {
    let x = const_tau(128).mul_int(&BigInt::from(n_max - 1));
    let f: u64 = x.upper().floor_int().try_into().expect("small");
    f as u32 + 1
}

pub fn tau_source(prec: u32) -> Result<RealBall> {
    Ok(const_tau(prec))
}

/// The `A` of each reduction, each rounded up from a certified enclosure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GammaConstants {
    /// `⌈α⁸/ln 2⌉`
    pub gamma: u32,
    /// `⌈4/ln 2⌉`
    pub gamma1: u32,
    /// `⌈2α⁶/ln 2⌉`
    pub gamma2: u32,
    /// `⌈2α³/ln 2⌉`
    pub gamma3: u32,
}

/// `|x| < 2|e^x − 1|` on `(−½, ½)` turns each `|Λ|` bound into one on `|Γ|`;
/// dividing by `ln 2` gives these.
pub fn gamma_constants(prec: u32) -> GammaConstants {
    let l2 = ln2(prec);
    let over_ln2 = |q: QuadRat| -> u32 {
        let v = RealBall::from_quadrat(&q, prec).div(&l2).expect("ln 2 > 0");
        v.upper().ceil_int().try_into().expect("small")
    };
    let two = QuadRat::from_int(2);
    GammaConstants {
        gamma: over_ln2(alpha_pow(8)),
        gamma1: over_ln2(QuadRat::from_int(4)),
        gamma2: over_ln2(&two * &alpha_pow(6)),
        gamma3: over_ln2(&two * &alpha_pow(3)),
    }
}

/// Logarithm tables behind every `μ`.
pub struct MuTables {
    prec: u32,
    neg_ln_sqrt5: RealBall,
    inv_ln2: RealBall,
    /// `ln(α^k − 1)`, index `k`
    ln_alpha_km1: Vec<RealBall>,
    /// `ln(2^l − 1)`, index `l`
    ln_2l_m1: Vec<RealBall>,
}

fn ln_alpha_km1(k: u64, prec: u32) -> Result<RealBall> {
    RealBall::from_quadrat(&(&alpha_pow(k as i64) - &QuadRat::one()), prec).ln()
}

fn ln_2l_m1(l: u64, prec: u32) -> Result<RealBall> {
    RealBall::from_int((BigInt::from(1) << l) - 1, prec).ln()
}

impl MuTables {
    /// Tables for `k ≤ k_hi`, `l ≤ l_hi`, serving requests at `prec`.
    pub fn new(prec: u32, k_hi: u64, l_hi: u64) -> Result<Self> {
        let wp = prec + GUARD;
        let ln_alpha_km1 = (0..=k_hi)
            .into_par_iter()
            .map(|k| {
                if k == 0 {
                    Ok(RealBall::from_int(0, wp))
                } else {
                    ln_alpha_km1(k, wp)
                }
            })
            .collect::<Result<_>>()?;
        let ln_2l_m1 = (0..=l_hi)
            .into_par_iter()
            .map(|l| {
                if l == 0 {
                    Ok(RealBall::from_int(0, wp))
                } else {
                    ln_2l_m1(l, wp)
                }
            })
            .collect::<Result<_>>()?;
        Ok(MuTables {
            prec,
            neg_ln_sqrt5: -sqrt5(wp).ln()?,
            inv_ln2: ln2(wp).inv()?,
            ln_alpha_km1,
            ln_2l_m1,
        })
    }

    fn base(&self, prec: u32) -> Result<(RealBall, RealBall)> {
        if prec == self.prec {
            return Ok((self.neg_ln_sqrt5.clone(), self.inv_ln2.clone()));
        }
        let wp = prec + GUARD;
        Ok((-sqrt5(wp).ln()?, ln2(wp).inv()?))
    }

    fn lk(&self, k: u64, prec: u32) -> Result<RealBall> {
        match self.ln_alpha_km1.get(k as usize) {
            Some(v) if prec == self.prec => Ok(v.clone()),
            _ => ln_alpha_km1(k, prec + GUARD),
        }
    }

    fn ll(&self, l: u64, prec: u32) -> Result<RealBall> {
        match self.ln_2l_m1.get(l as usize) {
            Some(v) if prec == self.prec => Ok(v.clone()),
            _ => ln_2l_m1(l, prec + GUARD),
        }
    }

    /// `ln(1/√5)/ln 2`
    pub fn gamma(&self, prec: u32) -> Result<RealBall> {
        let (s, inv) = self.base(prec)?;
        Ok((&s * &inv).with_prec(prec))
    }

    /// `ln((α^k − 1)/√5)/ln 2`
    pub fn gamma1(&self, k: u64, prec: u32) -> Result<RealBall> {
        let (s, inv) = self.base(prec)?;
        Ok((&(&self.lk(k, prec)? + &s) * &inv).with_prec(prec))
    }

    /// `ln(1/(√5(2^l − 1)))/ln 2`
    pub fn gamma2(&self, l: u64, prec: u32) -> Result<RealBall> {
        let (s, inv) = self.base(prec)?;
        Ok((&(&s - &self.ll(l, prec)?) * &inv).with_prec(prec))
    }

    /// `ln((α^k − 1)/(√5(2^l − 1)))/ln 2`
    pub fn gamma3(&self, k: u64, l: u64, prec: u32) -> Result<RealBall> {
        let (s, inv) = self.base(prec)?;
        let num = &(&self.lk(k, prec)? + &s) - &self.ll(l, prec)?;
        Ok((&num * &inv).with_prec(prec))
    }
}

/// `(s, t)` with `1/(√5(2^l − 1)) = 2^s α^t`; never found, by the norm.
pub fn detect_gamma2(l: u64, t_max: u64) -> Option<(i64, u64)> {
    let eta = eta1_case2(l).inv().ok()?;
    match_power_product(&eta, t_max, -(l as i64 + 3), 0)
}

/// A reduced family with its degenerate fallbacks.
#[derive(Clone, Debug)]
pub struct FamilyOutcome<I> {
    pub family: FamilyResult<I>,
    pub fallbacks: Vec<(I, Fallback)>,
    /// combined bound: max of the family `k_max` and every fallback
    pub bound: i64,
    pub seconds: f64,
}

/// Shared state of a proof run: convergents, `M` and the reducer.
pub struct Prover {
    pub config: Config,
    pub cf: CFExpansion,
    pub chain: MatveevChain,
    pub m: BigInt,
    pub constants: GammaConstants,
    pub reducer: Reducer<'static>,
    alpha: RealBall,
    two: RealBall,
}

/// Which reduction a stage runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pass {
    GammaN,
    GammaM,
    Gamma1,
    Gamma2,
    Gamma3,
}

impl Pass {
    pub fn id(&self) -> &'static str {
        match self {
            Pass::GammaN => "S2.n",
            Pass::GammaM => "S2.m",
            Pass::Gamma1 => "S3",
            Pass::Gamma2 => "S4",
            Pass::Gamma3 => "S6",
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Pass::GammaN | Pass::GammaM => "Γ",
            Pass::Gamma1 => "Γ₁",
            Pass::Gamma2 => "Γ₂",
            Pass::Gamma3 => "Γ₃",
        }
    }

    /// What `k_max` bounds.
    pub fn bounds(&self) -> &'static str {
        match self {
            Pass::GammaN | Pass::Gamma2 => "n - n1",
            Pass::GammaM | Pass::Gamma1 => "m - m1",
            Pass::Gamma3 => "n",
        }
    }

    pub fn base_is_alpha(&self) -> bool {
        !matches!(self, Pass::GammaM | Pass::Gamma1)
    }
}

impl Prover {
    pub fn new(config: Config) -> Result<Self> {
        config.validate()?;
        let cf = expand(&tau_source, config.depth, config.prec).map_err(|e| e.in_stage("S1"))?;
        let chain = derive_matveev_chain(config.prec).map_err(|e| e.in_stage("S1"))?;
        let m = chain.n0.clone();
        let reducer = Reducer::new(&tau_source, &cf, &m, config.q_floor.as_ref(), config.prec)
            .map_err(|e| e.in_stage("S2"))?;
        let constants = gamma_constants(config.prec);
        let alpha = RealBall::from_quadrat(&QuadRat::alpha(), config.prec);
        let two = RealBall::from_int(2, config.prec);
        Ok(Prover {
            config,
            cf,
            chain,
            m,
            constants,
            reducer,
            alpha,
            two,
        })
    }

    /// `(A, B)` of a pass.
    pub fn ab(&self, pass: Pass) -> (RealBall, RealBall) {
        let c = &self.constants;
        let a = match pass {
            Pass::GammaN => c.gamma,
            Pass::GammaM | Pass::Gamma1 => c.gamma1,
            Pass::Gamma2 => c.gamma2,
            Pass::Gamma3 => c.gamma3,
        };
        let b = if pass.base_is_alpha() {
            self.alpha.clone()
        } else {
            self.two.clone()
        };
        (RealBall::from_int(a, self.config.prec), b)
    }

    /// S2: the single Γ instance under both readings.
    pub fn gamma(&self, pass: Pass) -> Result<Bounded> {
        debug_assert!(matches!(pass, Pass::GammaN | Pass::GammaM));
        let tables = MuTables::new(self.config.prec, 0, 0)?;
        let mu = |p: u32| tables.gamma(p);
        let (a, b) = self.ab(pass);
        match self
            .reducer
            .reduce(&mu, &a, &b)
            .map_err(|e| e.in_stage(pass.id()))?
        {
            ReductionResult::Bounded(bd) => Ok(bd),
            ReductionResult::Degenerate { detail, .. } => {
                Err(Error::NonClosing(detail).in_stage(pass.id()))
            }
        }
    }

    fn finish<I>(
        &self,
        pass: Pass,
        family: Family<'_, I>,
        started: Instant,
    ) -> Result<FamilyOutcome<I>>
    where
        I: Clone + Ord + std::fmt::Debug + Send + Sync,
    {
        let (a, b) = self.ab(pass);
        let res =
            reduce_family(&self.reducer, &family, &a, &b).map_err(|e| e.in_stage(pass.id()))?;
        let mut bound = res.k_max;
        let mut fallbacks = Vec::new();
        for (idx, st) in &res.degenerate {
            let f = degenerate_fallback(*st, &a, &b, &self.m, &self.cf)
                .map_err(|e| e.in_stage(pass.id()))?;
            bound = bound.max(i64::try_from(&f.bound).expect("small"));
            fallbacks.push((idx.clone(), f));
        }
        Ok(FamilyOutcome {
            family: res,
            fallbacks,
            bound,
            seconds: started.elapsed().as_secs_f64(),
        })
    }

    /// S3: Γ₁ for `k ∈ [1, k_hi]`.
    pub fn gamma1(&self, k_hi: u64) -> Result<FamilyOutcome<u64>> {
        let t0 = Instant::now();
        let tables = MuTables::new(self.config.prec, k_hi, 0)?;
        let mu = |k: &u64, p: u32| tables.gamma1(*k, p);
        let detect = |k: &u64| detect_special_form(*k, 1);
        let indices: Vec<u64> = (1..=k_hi).collect();
        let expected = Some(
            indices
                .iter()
                .copied()
                .filter(|k| detect(k).is_some())
                .collect(),
        );
        let family = Family {
            label: "Γ₁".into(),
            indices,
            mu: &mu,
            detect: &detect,
            expected_skip: expected,
        };
        self.finish(Pass::Gamma1, family, t0)
    }

    /// S4: Γ₂ for `l ∈ [1, l_hi]`.
    pub fn gamma2(&self, l_hi: u64) -> Result<FamilyOutcome<u64>> {
        let t0 = Instant::now();
        let tables = MuTables::new(self.config.prec, 0, l_hi)?;
        let mu = |l: &u64, p: u32| tables.gamma2(*l, p);
        let t_max = LEGENDRE_PAD;
        let detect = move |l: &u64| detect_gamma2(*l, t_max);
        let indices: Vec<u64> = (1..=l_hi).collect();
        let expected = Some(
            indices
                .iter()
                .copied()
                .filter(|l| detect(l).is_some())
                .collect(),
        );
        let family = Family {
            label: "Γ₂".into(),
            indices,
            mu: &mu,
            detect: &detect,
            expected_skip: expected,
        };
        self.finish(Pass::Gamma2, family, t0)
    }

    /// S6: Γ₃ over `[1, k_hi] × [1, l_hi]`.
    pub fn gamma3(&self, k_hi: u64, l_hi: u64) -> Result<FamilyOutcome<(u64, u64)>> {
        let t0 = Instant::now();
        let tables = MuTables::new(self.config.prec, k_hi, l_hi)?;
        let mu = |kl: &(u64, u64), p: u32| tables.gamma3(kl.0, kl.1, p);
        let detect = |kl: &(u64, u64)| detect_special_form(kl.0, kl.1);
        let indices: Vec<(u64, u64)> = (1..=k_hi)
            .flat_map(|k| (1..=l_hi).map(move |l| (k, l)))
            .collect();
        let expected = Some(
            special_forms(k_hi, l_hi)
                .into_iter()
                .map(|(kl, _)| kl)
                .collect(),
        );
        let family = Family {
            label: "Γ₃".into(),
            indices,
            mu: &mu,
            detect: &detect,
            expected_skip: expected,
        };
        self.finish(Pass::Gamma3, family, t0)
    }
}

/// Every `(k, l)` in `[1, k_hi] × [1, l_hi]` where `detect_special_form` succeeds.
pub fn special_forms(k_hi: u64, l_hi: u64) -> Vec<((u64, u64), (i64, u64))> {
    let grid: Vec<(u64, u64)> = (1..=k_hi)
        .flat_map(|k| (1..=l_hi).map(move |l| (k, l)))
        .collect();
    grid.into_par_iter()
        .filter_map(|(k, l)| detect_special_form(k, l).map(|st| ((k, l), st)))
        .collect()
}

/// Λ₃ nonvanishing spot check on a small grid; returns the number of cases.
pub fn lambda3_spot_check() -> Result<usize> {
    let mut count = 0;
    for k in 1..=24u64 {
        for l in 1..=12 {
            for n1 in [2u64, 3, 5, 8, 13] {
                for m1 in [1u64, 2, 4, 7] {
                    if !lambda3_nonzero_check(k, n1, m1, l) {
                        return Err(Error::NonClosing(format!(
                            "Λ₃ vanishes at k={k}, n₁={n1}, m₁={m1}, l={l}"
                        )));
                    }
                    count += 1;
                }
            }
        }
    }
    Ok(count)
}

fn timed<T>(
    timings: &mut BTreeMap<String, f64>,
    id: &str,
    f: impl FnOnce() -> Result<T>,
) -> Result<T> {
    let t0 = Instant::now();
    let out = f()?;
    timings.insert(id.to_string(), t0.elapsed().as_secs_f64());
    Ok(out)
}

/// Run every stage and assemble the report.
pub fn run_proof(config: &Config) -> Result<ProofReport> {
    let mut timings = BTreeMap::new();
    let config = config.clone();
    config.validate()?;

    let table: CollisionTable = timed(&mut timings, "S0", || {
        Ok(enumerate(config.n_max, config.m_max))
    })?;
    if !table.verify() {
        return Err(Error::NonClosing("search output fails its own recheck".into()).in_stage("S0"));
    }
    let prover = timed(&mut timings, "S1", || Prover::new(config.clone()))?;
    let spot = lambda3_spot_check().map_err(|e| e.in_stage("S1"))?;

    let gn = timed(&mut timings, "S2.n", || prover.gamma(Pass::GammaN))?;
    let gm = timed(&mut timings, "S2.m", || prover.gamma(Pass::GammaM))?;
    let s3 = timed(&mut timings, "S3", || prover.gamma1(gn.k_max as u64))?;
    let s4 = timed(&mut timings, "S4", || prover.gamma2(gm.k_max as u64))?;
    let k_win = gn.k_max.max(s4.bound);
    let l_win = s3.bound.max(gm.k_max);
    let s6 = timed(&mut timings, "S6", || {
        prover.gamma3(k_win as u64, l_win as u64)
    })?;

    if s6.bound >= config.n_max as i64 {
        return Err(Error::NonClosing(format!(
            "final bound n ≤ {} is not below {}",
            s6.bound, config.n_max
        ))
        .in_stage("S7"));
    }
    Ok(report::assemble(
        &prover,
        &table,
        spot,
        (&gn, &gm),
        &s3,
        &s4,
        (k_win, l_win),
        &s6,
        timings,
    ))
}

/// `"closed: n < N"`.
pub fn verdict_text(n_max: u32) -> String {
    format!("closed: n < {n_max}")
}
