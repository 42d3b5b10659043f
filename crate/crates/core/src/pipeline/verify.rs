//! Independent recheck of a [`ProofReport`].

use std::path::Path;

use crate::error::Result;
use crate::quadfield::detect_special_form;
use crate::realball::RealBall;
use crate::reduction::{degenerate_fallback, k_bound, LEGENDRE_PAD};
use crate::search::enumerate;

use super::report::{
    parse_int, BallRecord, InstanceRecord, ProofReport, ReductionStage, StageRecord, SCHEMA,
};
use super::{detect_gamma2, special_forms, verdict_text, Config, MuTables, Pass, Prover};

const PASSES: [Pass; 5] = [
    Pass::GammaN,
    Pass::GammaM,
    Pass::Gamma1,
    Pass::Gamma2,
    Pass::Gamma3,
];

/// `true` iff every check passes. Malformed files are errors.
pub fn verify_report(path: &Path) -> Result<bool> {
    Ok(verify_report_detailed(path, true)?.is_empty())
}

/// Failed checks, one line each. `deep` also reruns every reduction.
pub fn verify_report_detailed(path: &Path, deep: bool) -> Result<Vec<String>> {
    let r = ProofReport::read(path)?;
    verify_value(&r, deep)
}

struct Checks(Vec<String>);

impl Checks {
    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.0.push(msg());
        }
    }
}

pub fn verify_value(r: &ProofReport, deep: bool) -> Result<Vec<String>> {
    let mut c = Checks(Vec::new());
    c.check(r.schema == SCHEMA, || {
        format!("schema {} is not {SCHEMA}", r.schema)
    });

    let config = Config {
        prec: r.config.prec,
        depth: r.config.depth,
        n_max: r.config.n_max,
        m_max: r.config.m_max,
        q_floor: r.config.q_floor.as_deref().map(parse_int).transpose()?,
    };
    if let Err(e) = config.validate() {
        c.0.push(format!("config: {e}"));
        return Ok(c.0);
    }

    // S0
    let table = r.solutions()?;
    c.check(table.verify(), || {
        "S0: a recorded representation is wrong".into()
    });
    c.check(table == enumerate(config.n_max, config.m_max), || {
        "S0: search does not reproduce".into()
    });
    let values: Vec<String> = table.values().map(|v| v.to_string()).collect();
    for s in &r.stages {
        if let StageRecord::Search {
            values: v,
            n_max,
            m_max,
            ..
        } = s
        {
            c.check(v == &values, || {
                "S0: value list disagrees with the table".into()
            });
            c.check((*n_max, *m_max) == (config.n_max, config.m_max), || {
                "S0: rectangle mismatch".into()
            });
        }
    }

    // S1
    let p = match Prover::new(config.clone()) {
        Ok(p) => p,
        Err(e) => {
            c.0.push(format!("S1: {e}"));
            return Ok(c.0);
        }
    };
    check_matveev(&mut c, r, &p)?;
    let k = &r.constants;
    let pc = &p.constants;
    c.check(
        (k.a_gamma, k.a_gamma1, k.a_gamma2, k.a_gamma3)
            == (pc.gamma, pc.gamma1, pc.gamma2, pc.gamma3),
        || "constants: A values do not reproduce".into(),
    );
    let m = parse_int(&k.m)?;
    c.check(m == p.m, || {
        format!("constants: M = {} but N0 = {}", k.m, p.m)
    });
    c.check(parse_int(&k.m_pad)? == &m + LEGENDRE_PAD, || {
        "constants: M_pad ≠ M + 10".into()
    });
    let cands: Vec<(usize, String)> = p
        .reducer
        .candidates()
        .map(|(i, q)| (i, q.to_string()))
        .collect();
    let recorded: Vec<(usize, String)> = k
        .convergents
        .iter()
        .map(|v| (v.index, v.q.clone()))
        .collect();
    c.check(cands == recorded, || {
        "constants: candidate convergents do not reproduce".into()
    });

    // S2–S6
    let mut stages = Vec::new();
    for pass in PASSES {
        match r.reduction(pass.id()) {
            Some(s) => {
                check_stage(&mut c, &p, pass, s)?;
                stages.push(s);
            }
            None => c.0.push(format!("{}: stage missing", pass.id())),
        }
    }
    if stages.len() != PASSES.len() {
        return Ok(c.0);
    }
    let (gn, gm, s3, s4, s6) = (stages[0], stages[1], stages[2], stages[3], stages[4]);
    c.check(s3.ranges == vec![[1, gn.bound as u64]], || {
        "S3: range is not [1, S2.n]".into()
    });
    c.check(s4.ranges == vec![[1, gm.bound as u64]], || {
        "S4: range is not [1, S2.m]".into()
    });
    let (kw, lw) = (gn.bound.max(s4.bound), s3.bound.max(gm.bound));
    c.check(r.window() == Some((kw, lw)), || {
        format!("S5: window should be ({kw}, {lw})")
    });
    c.check(s6.ranges == vec![[1, kw as u64], [1, lw as u64]], || {
        "S6: range is not the S5 window".into()
    });

    // S7
    let closes = s6.bound < config.n_max as i64;
    c.check(closes, || {
        format!(
            "S7: bound n ≤ {} does not close below {}",
            s6.bound, config.n_max
        )
    });
    let mut seen = false;
    for s in &r.stages {
        if let StageRecord::Verdict {
            bound,
            n_max,
            closed,
            ..
        } = s
        {
            seen = true;
            c.check(*bound == s6.bound && *n_max == config.n_max, || {
                "S7: verdict bound disagrees with S6".into()
            });
            c.check(*closed == closes, || "S7: closed flag is wrong".into());
        }
    }
    c.check(seen, || "S7: verdict missing".into());
    c.check(r.verdict == verdict_text(config.n_max) && closes, || {
        format!("S7: verdict '{}' not supported", r.verdict)
    });

    if deep {
        deep_rerun(&mut c, &p, gn, gm, s3, s4, s6, (kw, lw));
    }
    Ok(c.0)
}

fn check_matveev(c: &mut Checks, r: &ProofReport, p: &Prover) -> Result<()> {
    let Some(rec) = r.matveev() else {
        c.0.push("S1: Matveev record missing".into());
        return Ok(());
    };
    let ch = &p.chain;
    let pairs: [(&str, &BallRecord, &RealBall); 9] = [
        ("base", &rec.base, &ch.base),
        ("lambda", &rec.lambda, &ch.lambda),
        (
            "lambda_displayed_variant",
            &rec.lambda_displayed_variant,
            &ch.lambda_displayed_variant,
        ),
        ("c_min", &rec.c_min, &ch.c_min),
        ("a1_case12", &rec.a1_case12, &ch.a1_case12),
        ("lambda12", &rec.lambda12, &ch.lambda12),
        ("c_max", &rec.c_max, &ch.c_max),
        ("a1_case3", &rec.a1_case3, &ch.a1_case3),
        ("lambda3", &rec.lambda3, &ch.lambda3),
    ];
    for (name, recorded, fresh) in pairs {
        let b = recorded.to_ball()?;
        c.check(b.overlaps(fresh), || {
            format!("S1: {name} does not reproduce")
        });
    }
    c.check(rec.n0 == ch.n0.to_string(), || {
        format!("S1: N0 {} does not reproduce ({})", rec.n0, ch.n0)
    });
    c.check(rec.shift == crate::bounds::LAMBDA3_SHIFT, || {
        "S1: Λ₃ shift mismatch".into()
    });
    Ok(())
}

fn mu_for(pass: Pass, index: &[u64], prec: u32) -> Result<Option<RealBall>> {
    let t = MuTables::new(prec, 0, 0)?;
    Ok(match (pass, index) {
        (Pass::GammaN | Pass::GammaM, []) => Some(t.gamma(prec)?),
        (Pass::Gamma1, [k]) => Some(t.gamma1(*k, prec)?),
        (Pass::Gamma2, [l]) => Some(t.gamma2(*l, prec)?),
        (Pass::Gamma3, [k, l]) => Some(t.gamma3(*k, *l, prec)?),
        _ => None,
    })
}

fn in_ranges(index: &[u64], ranges: &[[u64; 2]]) -> bool {
    index.len() == ranges.len()
        && index
            .iter()
            .zip(ranges)
            .all(|(i, [lo, hi])| lo <= i && i <= hi)
}

fn check_instance(
    c: &mut Checks,
    p: &Prover,
    pass: Pass,
    s: &ReductionStage,
    inst: &InstanceRecord,
) -> Result<()> {
    let id = pass.id();
    let (a, b) = p.ab(pass);
    let eps = inst.epsilon.to_ball()?;
    let lb = inst.epsilon_lb.to_dyadic()?;
    c.check(eps.lower().is_positive(), || {
        format!("{id}: recorded ε at {:?} is not positive", inst.index)
    });
    c.check(lb.is_positive(), || {
        format!("{id}: ε lower bound at {:?} is not positive", inst.index)
    });
    c.check(in_ranges(&inst.index, &s.ranges), || {
        format!("{id}: index {:?} outside the stage range", inst.index)
    });
    let q = parse_int(&inst.q)?;
    let known = p
        .reducer
        .candidates()
        .any(|(i, cq)| i == inst.q_index && cq == &q);
    c.check(known, || {
        format!("{id}: q_{} is not an admissible convergent", inst.q_index)
    });
    if !known || !lb.is_positive() {
        return Ok(());
    }
    // fresh ε at twice the working precision
    let prec = 2 * p.config.prec;
    if let Some(mu) = mu_for(pass, &inst.index, prec)? {
        let fresh = p.reducer.epsilon_at(&q, &mu, prec)?;
        c.check(fresh.overlaps(&eps), || {
            format!("{id}: ε at {:?} does not reproduce", inst.index)
        });
        c.check(lb <= fresh.lower(), || {
            format!("{id}: ε lower bound at {:?} is not certified", inst.index)
        });
    } else {
        c.0.push(format!("{id}: index {:?} has the wrong shape", inst.index));
    }
    let k = k_bound(&a, &b, &q, &lb)?;
    c.check(k == inst.k_max, || {
        format!(
            "{id}: k_max at {:?} is {k}, recorded {}",
            inst.index, inst.k_max
        )
    });
    Ok(())
}

fn expected_specials(pass: Pass, ranges: &[[u64; 2]]) -> Vec<(Vec<u64>, (i64, u64))> {
    match (pass, ranges) {
        (Pass::Gamma1, [[lo, hi]]) => (*lo..=*hi)
            .filter_map(|k| detect_special_form(k, 1).map(|st| (vec![k], st)))
            .collect(),
        (Pass::Gamma2, [[lo, hi]]) => (*lo..=*hi)
            .filter_map(|l| detect_gamma2(l, LEGENDRE_PAD).map(|st| (vec![l], st)))
            .collect(),
        (Pass::Gamma3, [[1, k], [1, l]]) => special_forms(*k, *l)
            .into_iter()
            .map(|((k, l), st)| (vec![k, l], st))
            .collect(),
        _ => vec![],
    }
}

fn check_stage(c: &mut Checks, p: &Prover, pass: Pass, s: &ReductionStage) -> Result<()> {
    let id = pass.id();
    let (a, b) = p.ab(pass);
    let want_b = if pass.base_is_alpha() { "alpha" } else { "2" };
    let want_a = match pass {
        Pass::GammaN => p.constants.gamma,
        Pass::GammaM | Pass::Gamma1 => p.constants.gamma1,
        Pass::Gamma2 => p.constants.gamma2,
        Pass::Gamma3 => p.constants.gamma3,
    };
    c.check(s.a == want_a && s.b == want_b, || {
        format!("{id}: (A, B) = ({}, {}) is wrong", s.a, s.b)
    });
    let size: u64 = s
        .ranges
        .iter()
        .map(|[lo, hi]| hi.saturating_sub(*lo) + 1)
        .product();
    c.check(size == s.instances as u64, || {
        format!("{id}: instance count {} ≠ range size {size}", s.instances)
    });
    check_instance(c, p, pass, s, &s.k_max)?;
    check_instance(c, p, pass, s, &s.min_epsilon)?;
    c.check(s.min_epsilon.k_max <= s.k_max.k_max, || {
        format!("{id}: k_max is not the maximum")
    });

    let specials = expected_specials(pass, &s.ranges);
    let recorded: Vec<(Vec<u64>, (i64, u64))> = s
        .degenerate
        .iter()
        .map(|d| (d.index.clone(), (d.s, d.t)))
        .collect();
    let mut sorted = recorded.clone();
    sorted.sort();
    let mut want = specials;
    want.sort();
    c.check(sorted == want, || {
        format!("{id}: degenerate set {recorded:?} ≠ detected {want:?}")
    });

    let mut bound = s.k_max.k_max;
    for d in &s.degenerate {
        let f = degenerate_fallback((d.s, d.t), &a, &b, &p.m, &p.cf)?;
        let rb = parse_int(&d.bound)?;
        c.check(f.bound == rb, || {
            format!(
                "{id}: fallback at {:?} gives {}, recorded {}",
                d.index, f.bound, d.bound
            )
        });
        bound = bound.max(i64::try_from(&rb).unwrap_or(i64::MAX));
    }
    c.check(bound == s.bound, || {
        format!("{id}: stage bound {} ≠ max of parts {bound}", s.bound)
    });
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn deep_rerun(
    c: &mut Checks,
    p: &Prover,
    gn: &ReductionStage,
    gm: &ReductionStage,
    s3: &ReductionStage,
    s4: &ReductionStage,
    s6: &ReductionStage,
    (kw, lw): (i64, i64),
) {
    let same = |c: &mut Checks,
                s: &ReductionStage,
                bound: i64,
                k_max: i64,
                eps: &RealBall,
                degenerate: Vec<Vec<u64>>| {
        c.check(bound == s.bound, || {
            format!("{}: rerun bound {bound} ≠ {}", s.id, s.bound)
        });
        c.check(k_max == s.k_max.k_max, || {
            format!("{}: rerun k_max {k_max} ≠ {}", s.id, s.k_max.k_max)
        });
        let rec = s.min_epsilon.epsilon.to_ball();
        c.check(rec.map(|r| r.overlaps(eps)).unwrap_or(false), || {
            format!("{}: rerun minimum ε differs", s.id)
        });
        let idx: Vec<Vec<u64>> = s.degenerate.iter().map(|d| d.index.clone()).collect();
        c.check(degenerate == idx, || {
            format!("{}: rerun degenerate set differs", s.id)
        });
    };
    for (pass, s) in [(Pass::GammaN, gn), (Pass::GammaM, gm)] {
        match p.gamma(pass) {
            Ok(b) => same(c, s, b.k_max, b.k_max, &b.epsilon, vec![]),
            Err(e) => c.0.push(format!("{}: rerun failed: {e}", s.id)),
        }
    }
    match p.gamma1(gn.bound as u64) {
        Ok(o) => {
            let d = o.fallbacks.iter().map(|(i, _)| vec![*i]).collect();
            same(
                c,
                s3,
                o.bound,
                o.family.k_max,
                &o.family.min_epsilon().epsilon,
                d,
            )
        }
        Err(e) => c.0.push(format!("S3: rerun failed: {e}")),
    }
    match p.gamma2(gm.bound as u64) {
        Ok(o) => {
            let d = o.fallbacks.iter().map(|(i, _)| vec![*i]).collect();
            same(
                c,
                s4,
                o.bound,
                o.family.k_max,
                &o.family.min_epsilon().epsilon,
                d,
            )
        }
        Err(e) => c.0.push(format!("S4: rerun failed: {e}")),
    }
    match p.gamma3(kw.max(0) as u64, lw.max(0) as u64) {
        Ok(o) => {
            let d = o.fallbacks.iter().map(|((k, l), _)| vec![*k, *l]).collect();
            same(
                c,
                s6,
                o.bound,
                o.family.k_max,
                &o.family.min_epsilon().epsilon,
                d,
            )
        }
        Err(e) => c.0.push(format!("S6: rerun failed: {e}")),
    }
}
