//! Serialized proof report (`"schema": 1`).
//!
//! Big integers are decimal strings. A real is `{mid, rad, prec}`, where the
//! decimal ball encloses the computed one. Exact dyadic lower bounds are
//! `{man, exp}` meaning `man · 2^exp`.

use std::collections::BTreeMap;
use std::path::Path;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::contfrac::max_partial_quotient;
use crate::error::{Error, Result};
use crate::realball::{Dyadic, RealBall};
use crate::reduction::{Bounded, Fallback};
use crate::search::CollisionTable;

use super::{verdict_text, FamilyOutcome, Pass, Prover};

pub const SCHEMA: u32 = 1;
const DIGITS: u32 = 40;

/// Reference `p₁₄₉/q₁₄₉`, compared but never relied on.
pub const REFERENCE_P149: &str =
    "75583009274523299909961213530369339183941874844471761873846700783141852920";
pub const REFERENCE_Q149: &str =
    "108871285052861946543251595260369738218462010383323482629611084407107090003";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallRecord {
    pub mid: String,
    pub rad: String,
    pub prec: u32,
}

impl BallRecord {
    pub fn from_ball(b: &RealBall) -> Self {
        let (mid, rad) = b.to_decimal_parts(DIGITS);
        BallRecord {
            mid,
            rad,
            prec: b.prec(),
        }
    }

    pub fn to_ball(&self) -> Result<RealBall> {
        RealBall::from_decimal_parts(&self.mid, &self.rad, self.prec)
            .ok_or_else(|| Error::Malformed(format!("bad real {{{}, {}}}", self.mid, self.rad)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadicRecord {
    pub man: String,
    pub exp: i64,
}

impl DyadicRecord {
    pub fn from_dyadic(d: &Dyadic) -> Self {
        DyadicRecord {
            man: d.mantissa().to_string(),
            exp: d.exponent(),
        }
    }

    pub fn to_dyadic(&self) -> Result<Dyadic> {
        Ok(Dyadic::new(parse_int(&self.man)?, self.exp))
    }
}

pub(crate) fn parse_int(s: &str) -> Result<BigInt> {
    s.parse()
        .map_err(|_| Error::Malformed(format!("bad integer {s}")))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigRecord {
    pub prec: u32,
    pub depth: usize,
    pub n_max: u32,
    pub m_max: u32,
    pub q_floor: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvergentRecord {
    pub index: usize,
    pub q: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstantsRecord {
    pub a_gamma: u32,
    pub a_gamma1: u32,
    pub a_gamma2: u32,
    pub a_gamma3: u32,
    pub m: String,
    pub m_pad: String,
    pub convergents: Vec<ConvergentRecord>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatveevRecord {
    pub base: BallRecord,
    /// on `(1 + ln n)`
    pub lambda: BallRecord,
    pub lambda_displayed_variant: BallRecord,
    pub c_min: BallRecord,
    pub a1_case12: BallRecord,
    /// on `(1 + ln n)²`
    pub lambda12: BallRecord,
    pub c_max: BallRecord,
    pub a1_case3: BallRecord,
    /// on `(1 + ln n)³`
    pub lambda3: BallRecord,
    pub shift: u32,
    pub n0: String,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub index: Vec<u64>,
    pub k_max: i64,
    pub q_index: usize,
    pub q: String,
    pub epsilon: BallRecord,
    pub epsilon_lb: DyadicRecord,
}

impl InstanceRecord {
    fn new(index: Vec<u64>, b: &Bounded) -> Self {
        InstanceRecord {
            index,
            k_max: b.k_max,
            q_index: b.convergent_index,
            q: b.q_used.to_string(),
            epsilon: BallRecord::from_ball(&b.epsilon),
            epsilon_lb: DyadicRecord::from_dyadic(&b.epsilon_lb),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegenerateRecord {
    pub index: Vec<u64>,
    pub s: i64,
    pub t: u64,
    pub bound: String,
    pub legendre: String,
    pub threshold: String,
    pub amax: String,
    pub amax_upto: usize,
}

impl DegenerateRecord {
    fn new(index: Vec<u64>, f: &Fallback) -> Self {
        DegenerateRecord {
            index,
            s: f.special.0,
            t: f.special.1,
            bound: f.bound.to_string(),
            legendre: f.legendre.to_string(),
            threshold: f.threshold.to_string(),
            amax: f.amax.to_string(),
            amax_upto: f.amax_upto,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionStage {
    pub id: String,
    pub label: String,
    pub bounds: String,
    pub a: u32,
    /// `"alpha"` or `"2"`
    pub b: String,
    /// inclusive `[lo, hi]` per index coordinate; empty for a single instance
    pub ranges: Vec<[u64; 2]>,
    pub instances: usize,
    pub k_max: InstanceRecord,
    pub min_epsilon: InstanceRecord,
    pub degenerate: Vec<DegenerateRecord>,
    pub bound: i64,
    pub max_prec: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StageRecord {
    Search {
        id: String,
        n_max: u32,
        m_max: u32,
        values: Vec<String>,
    },
    Matveev {
        id: String,
        record: MatveevRecord,
    },
    Reduction(ReductionStage),
    Window {
        id: String,
        k: i64,
        l: i64,
        notes: Vec<String>,
    },
    Verdict {
        id: String,
        bound: i64,
        n_max: u32,
        closed: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrecisionRecord {
    pub stage: String,
    pub bits: u32,
}

/// Regression comparisons with reference values; not part of the proof.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceRecord {
    pub tau_prefix: Vec<String>,
    pub q149_exceeds_1e74: bool,
    pub p149_q149_match_reference: bool,
    pub max_quotient_upto_99: String,
    pub lambda_reference: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProofReport {
    pub schema: u32,
    pub config: ConfigRecord,
    pub solutions: serde_json::Value,
    pub constants: ConstantsRecord,
    pub stages: Vec<StageRecord>,
    pub nonvanishing: Vec<String>,
    pub precision_trace: Vec<PrecisionRecord>,
    pub references: ReferenceRecord,
    pub verdict: String,
    /// wall-clock seconds per stage; the only nondeterministic field
    pub timings: BTreeMap<String, f64>,
}

impl ProofReport {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }

    /// The report with timings cleared, for byte comparison.
    pub fn canonical_json(&self) -> String {
        let mut r = self.clone();
        r.timings.clear();
        r.to_json_string()
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json_string() + "\n")?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Malformed(e.to_string()))
    }

    pub fn solutions(&self) -> Result<CollisionTable> {
        CollisionTable::from_json(&self.solutions).map_err(|e| Error::Malformed(e.to_string()))
    }

    pub fn reduction(&self, id: &str) -> Option<&ReductionStage> {
        self.stages.iter().find_map(|s| match s {
            StageRecord::Reduction(r) if r.id == id => Some(r),
            _ => None,
        })
    }

    pub fn reduction_mut(&mut self, id: &str) -> Option<&mut ReductionStage> {
        self.stages.iter_mut().find_map(|s| match s {
            StageRecord::Reduction(r) if r.id == id => Some(r),
            _ => None,
        })
    }

    pub fn matveev(&self) -> Option<&MatveevRecord> {
        self.stages.iter().find_map(|s| match s {
            StageRecord::Matveev { record, .. } => Some(record),
            _ => None,
        })
    }

    pub fn window(&self) -> Option<(i64, i64)> {
        self.stages.iter().find_map(|s| match s {
            StageRecord::Window { k, l, .. } => Some((*k, *l)),
            _ => None,
        })
    }
}

/// Index as a list of integers.
pub trait IndexKey {
    fn key(&self) -> Vec<u64>;
}

impl IndexKey for u64 {
    fn key(&self) -> Vec<u64> {
        vec![*self]
    }
}

impl IndexKey for (u64, u64) {
    fn key(&self) -> Vec<u64> {
        vec![self.0, self.1]
    }
}

fn base_name(pass: Pass) -> String {
    if pass.base_is_alpha() { "alpha" } else { "2" }.to_string()
}

fn a_of(p: &Prover, pass: Pass) -> u32 {
    let c = &p.constants;
    match pass {
        Pass::GammaN => c.gamma,
        Pass::GammaM | Pass::Gamma1 => c.gamma1,
        Pass::Gamma2 => c.gamma2,
        Pass::Gamma3 => c.gamma3,
    }
}

pub(crate) fn single_stage(p: &Prover, pass: Pass, b: &Bounded) -> ReductionStage {
    let rec = InstanceRecord::new(vec![], b);
    ReductionStage {
        id: pass.id().into(),
        label: pass.label().into(),
        bounds: pass.bounds().into(),
        a: a_of(p, pass),
        b: base_name(pass),
        ranges: vec![],
        instances: 1,
        k_max: rec.clone(),
        min_epsilon: rec,
        degenerate: vec![],
        bound: b.k_max,
        max_prec: b.prec,
    }
}

pub(crate) fn family_stage<I>(
    p: &Prover,
    pass: Pass,
    ranges: Vec<[u64; 2]>,
    out: &FamilyOutcome<I>,
) -> ReductionStage
where
    I: IndexKey + PartialEq,
{
    let f = &out.family;
    let max_prec = f
        .records
        .iter()
        .filter_map(|(_, r)| r.bounded())
        .map(|b| b.prec)
        .max()
        .unwrap_or(0);
    ReductionStage {
        id: pass.id().into(),
        label: pass.label().into(),
        bounds: pass.bounds().into(),
        a: a_of(p, pass),
        b: base_name(pass),
        ranges,
        instances: f.records.len(),
        k_max: InstanceRecord::new(f.k_max_at.key(), f.k_max_record()),
        min_epsilon: InstanceRecord::new(f.min_epsilon_at.key(), f.min_epsilon()),
        degenerate: out
            .fallbacks
            .iter()
            .map(|(i, fb)| DegenerateRecord::new(i.key(), fb))
            .collect(),
        bound: out.bound,
        max_prec,
    }
}

pub(crate) fn matveev_record(p: &Prover) -> MatveevRecord {
    let c = &p.chain;
    let b = BallRecord::from_ball;
    MatveevRecord {
        base: b(&c.base),
        lambda: b(&c.lambda),
        lambda_displayed_variant: b(&c.lambda_displayed_variant),
        c_min: b(&c.c_min),
        a1_case12: b(&c.a1_case12),
        lambda12: b(&c.lambda12),
        c_max: b(&c.c_max),
        a1_case3: b(&c.a1_case3),
        lambda3: b(&c.lambda3),
        shift: crate::bounds::LAMBDA3_SHIFT,
        n0: c.n0.to_string(),
        notes: vec![
            "Λ uses A = (ln 5, ln α, 2 ln 2); lambda_displayed_variant uses 2 ln α for A₂".into(),
            "the reference Λ coefficient is 1.1e12; the product of the displayed factors is ≈ 2.1e12".into(),
            "Λ₃ is compared with |Λ₃| < α^{4−n}, so N0 solves (n − 4) ln α = C₃ (1 + ln n)³".into(),
        ],
    }
}

pub(crate) fn references(p: &Prover) -> ReferenceRecord {
    let cf = &p.cf;
    let prefix = cf
        .partial_quotients()
        .iter()
        .take(9)
        .map(|a| a.to_string())
        .collect();
    let e74 = num_traits::pow(BigInt::from(10), 74);
    let (q149_big, matches) = if cf.depth() >= 149 {
        (
            cf.q(149) > &e74,
            cf.p(149).to_string() == REFERENCE_P149 && cf.q(149).to_string() == REFERENCE_Q149,
        )
    } else {
        (false, false)
    };
    let amax = max_partial_quotient(cf, 99.min(cf.depth()))
        .map(|a| a.to_string())
        .unwrap_or_default();
    ReferenceRecord {
        tau_prefix: prefix,
        q149_exceeds_1e74: q149_big,
        p149_q149_match_reference: matches,
        max_quotient_upto_99: amax,
        lambda_reference: "1.1e12".into(),
    }
}

pub(crate) fn nonvanishing_notes(spot: usize) -> Vec<String> {
    vec![
        "Λ ≠ 0: Λ = 0 would give α^{2n} = 5·4^m ∈ Q".into(),
        "Λ₂ ≠ 0: Λ₂ = 0 would give α^{2n} ∈ Q".into(),
        "Λ₁ ≠ 0, Λ₃ ≠ 0: vanishing forces (α^k − 1)α^{n₁} = −(β^k − 1)β^{n₁}; the left side is ≥ α^{n−2}, the right < 2".into(),
        format!("Λ₃ nonvanishing checked exactly in Q(√5) on {spot} sampled (k, n₁, m₁, l)"),
        "β-tail bounds (|β|^{n−n₁} + 1)|β|^{n₁} < 2 and |x| < 2|e^x − 1| on (−½, ½) justify the A constants".into(),
    ]
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn assemble(
    p: &Prover,
    table: &CollisionTable,
    spot: usize,
    (gn, gm): (&Bounded, &Bounded),
    s3: &FamilyOutcome<u64>,
    s4: &FamilyOutcome<u64>,
    (k_win, l_win): (i64, i64),
    s6: &FamilyOutcome<(u64, u64)>,
    mut timings: BTreeMap<String, f64>,
) -> ProofReport {
    let cfg = &p.config;
    let values = table.values().map(|c| c.to_string()).collect();
    let stages = vec![
        StageRecord::Search {
            id: "S0".into(),
            n_max: cfg.n_max,
            m_max: cfg.m_max,
            values,
        },
        StageRecord::Matveev {
            id: "S1".into(),
            record: matveev_record(p),
        },
        StageRecord::Reduction(single_stage(p, Pass::GammaN, gn)),
        StageRecord::Reduction(single_stage(p, Pass::GammaM, gm)),
        StageRecord::Reduction(family_stage(
            p,
            Pass::Gamma1,
            vec![[1, gn.k_max as u64]],
            s3,
        )),
        StageRecord::Reduction(family_stage(
            p,
            Pass::Gamma2,
            vec![[1, gm.k_max as u64]],
            s4,
        )),
        StageRecord::Window {
            id: "S5".into(),
            k: k_win,
            l: l_win,
            notes: vec![
                "either n − n₁ ≤ S2.n, then m − m₁ ≤ S3; or m − m₁ ≤ S2.m, then n − n₁ ≤ S4".into(),
                "small differences (< 20) are covered because every family starts at index 1"
                    .into(),
            ],
        },
        StageRecord::Reduction(family_stage(
            p,
            Pass::Gamma3,
            vec![[1, k_win as u64], [1, l_win as u64]],
            s6,
        )),
        StageRecord::Verdict {
            id: "S7".into(),
            bound: s6.bound,
            n_max: cfg.n_max,
            closed: true,
        },
    ];
    let mut precision_trace = vec![PrecisionRecord {
        stage: "S1 continued fraction".into(),
        bits: p.cf.precision(),
    }];
    for s in &stages {
        if let StageRecord::Reduction(r) = s {
            precision_trace.push(PrecisionRecord {
                stage: r.id.clone(),
                bits: r.max_prec,
            });
        }
    }
    for (id, secs) in [
        ("S3 family", s3.seconds),
        ("S4 family", s4.seconds),
        ("S6 family", s6.seconds),
    ] {
        timings.insert(id.into(), secs);
    }
    let m_pad: BigInt = &p.m + crate::reduction::LEGENDRE_PAD;
    ProofReport {
        schema: SCHEMA,
        config: ConfigRecord {
            prec: cfg.prec,
            depth: cfg.depth,
            n_max: cfg.n_max,
            m_max: cfg.m_max,
            q_floor: cfg.q_floor.as_ref().map(|q| q.to_string()),
        },
        solutions: table.to_json(),
        constants: ConstantsRecord {
            a_gamma: p.constants.gamma,
            a_gamma1: p.constants.gamma1,
            a_gamma2: p.constants.gamma2,
            a_gamma3: p.constants.gamma3,
            m: p.m.to_string(),
            m_pad: m_pad.to_string(),
            convergents: p
                .reducer
                .candidates()
                .map(|(index, q)| ConvergentRecord {
                    index,
                    q: q.to_string(),
                })
                .collect(),
            notes: vec![
                "M = N0; M_pad = M + 10 bounds the τ-coefficient in every Legendre fallback".into(),
                "Γ₁ fallbacks use A = ⌈4/ln 2⌉, the same A as the Γ₁ family".into(),
            ],
        },
        stages,
        nonvanishing: nonvanishing_notes(spot),
        precision_trace,
        references: references(p),
        verdict: verdict_text(cfg.n_max),
        timings,
    }
}
