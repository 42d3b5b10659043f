//! Exhaustive search for integers with two or more representations
//! `F_n − 2^m`, `2 ≤ n ≤ n_max`, `1 ≤ m ≤ m_max`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sequences::{fib, pow2, SequenceCache};

/// `(n, m)` with `n ≥ 2` (`F_1 = F_2`, so index 1 is never used).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Representation {
    pub n: u32,
    pub m: u32,
}

impl Representation {
    pub fn new(n: u32, m: u32) -> Result<Self> {
        if n < 2 || m < 1 {
            return Err(Error::Domain(format!(
                "representation ({n}, {m}) needs n ≥ 2, m ≥ 1"
            )));
        }
        Ok(Representation { n, m })
    }

    pub fn value(&self) -> BigInt {
        BigInt::from(fib(self.n as usize)) - BigInt::from(pow2(self.m as usize))
    }
}

/// Values with at least two representations, each list sorted by `(n, m)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CollisionTable {
    entries: BTreeMap<BigInt, Vec<Representation>>,
}

impl CollisionTable {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn values(&self) -> impl Iterator<Item = &BigInt> {
        self.entries.keys()
    }

    pub fn get(&self, c: &BigInt) -> Option<&[Representation]> {
        self.entries.get(c).map(Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BigInt, &[Representation])> {
        self.entries.iter().map(|(c, r)| (c, r.as_slice()))
    }

    /// Recheck `c = F_n − 2^m` for every entry.
    pub fn verify(&self) -> bool {
        self.iter()
            .all(|(c, reps)| reps.len() >= 2 && reps.iter().all(|r| &r.value() == c))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<JsonRow> = self
            .iter()
            .map(|(c, reps)| JsonRow {
                c: c.to_string(),
                reps: reps.to_vec(),
            })
            .collect();
        serde_json::to_value(rows).expect("plain data")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let rows: Vec<JsonRow> = serde_json::from_value(v.clone())?;
        let mut entries = BTreeMap::new();
        for row in rows {
            let c: BigInt = row
                .c
                .parse()
                .map_err(|_| Error::Malformed(format!("bad integer {}", row.c)))?;
            entries.insert(c, row.reps);
        }
        Ok(CollisionTable { entries })
    }
}

#[derive(Serialize, Deserialize)]
struct JsonRow {
    c: String,
    reps: Vec<Representation>,
}

/// Every `c` reached at least twice on the inclusive rectangle.
pub fn enumerate(n_max: u32, m_max: u32) -> CollisionTable {
    if n_max < 2 || m_max < 1 {
        return CollisionTable::default();
    }
    let cache = SequenceCache::global();
    cache.warm(n_max as usize);
    let powers: Vec<BigInt> = (1..=m_max)
        .map(|m| BigInt::from(pow2(m as usize)))
        .collect();
    let partial: Vec<BTreeMap<BigInt, Vec<Representation>>> = (2..=n_max)
        .into_par_iter()
        .map(|n| {
            let f = BigInt::from(cache.fib(n as usize));
            let mut t = BTreeMap::new();
            for (m, p) in (1..=m_max).zip(&powers) {
                t.entry(&f - p)
                    .or_insert_with(Vec::new)
                    .push(Representation { n, m });
            }
            t
        })
        .collect();
    let mut all: BTreeMap<BigInt, Vec<Representation>> = BTreeMap::new();
    for t in partial {
        for (c, mut reps) in t {
            all.entry(c).or_default().append(&mut reps);
        }
    }
    let entries = all
        .into_iter()
        .filter(|(_, r)| r.len() >= 2)
        .map(|(c, mut r)| {
            r.sort();
            (c, r)
        })
        .collect();
    CollisionTable { entries }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reps(v: &[(u32, u32)]) -> Vec<Representation> {
        v.iter().map(|&(n, m)| Representation { n, m }).collect()
    }

    // pairwise comparison over the flattened rectangle
    fn brute_force(n_max: u32, m_max: u32) -> CollisionTable {
        let mut pts = Vec::new();
        for n in 2..=n_max {
            let (mut f, mut g) = (BigInt::from(0), BigInt::from(1));
            for _ in 0..n {
                let next = &f + &g;
                f = std::mem::replace(&mut g, next);
            }
            for m in 1..=m_max {
                let mut p = BigInt::from(1);
                for _ in 0..m {
                    p *= 2;
                }
                pts.push((Representation { n, m }, &f - p));
            }
        }
        let mut entries: BTreeMap<BigInt, Vec<Representation>> = BTreeMap::new();
        for (i, (ri, ci)) in pts.iter().enumerate() {
            let mut group = vec![*ri];
            for (j, (rj, cj)) in pts.iter().enumerate() {
                if i != j && ci == cj {
                    group.push(*rj);
                }
            }
            if group.len() >= 2 {
                group.sort();
                entries.insert(ci.clone(), group);
            }
        }
        CollisionTable { entries }
    }

    #[test]
    fn main_rectangle() {
        let t = enumerate(400, 300);
        let cs: Vec<i64> = t.values().map(|c| c.try_into().unwrap()).collect();
        assert_eq!(cs, vec![-30, -11, -3, -1, 0, 1, 5, 85]);
        assert_eq!(
            t.get(&BigInt::from(-3)).unwrap(),
            &reps(&[(2, 2), (5, 3), (7, 4)])[..]
        );
        assert_eq!(
            t.get(&BigInt::from(85)).unwrap(),
            &reps(&[(11, 2), (19, 12)])[..]
        );
        assert!(t.verify());
    }

    #[test]
    fn tiny_rectangle_is_empty() {
        assert!(enumerate(3, 2).is_empty());
        assert!(enumerate(1, 5).is_empty());
    }

    #[test]
    fn agrees_with_brute_force() {
        for (n, m) in [(10, 10), (30, 25), (100, 80)] {
            assert_eq!(enumerate(n, m), brute_force(n, m), "{n} × {m}");
        }
    }

    #[test]
    fn stable_past_the_power_cutoff() {
        // 2^m outgrows every F_n once m > n log2 α + 2
        let base = enumerate(60, 45);
        assert_eq!(base, enumerate(60, 80));
    }

    #[test]
    fn json_round_trip() {
        let t = enumerate(40, 30);
        let v = t.to_json();
        assert_eq!(v[0]["c"], "-30");
        assert_eq!(v[0]["reps"][0]["n"], 3);
        assert_eq!(CollisionTable::from_json(&v).unwrap(), t);
    }

    #[test]
    fn representation_domain() {
        assert!(Representation::new(1, 1).is_err());
        assert!(Representation::new(2, 0).is_err());
        assert_eq!(
            Representation::new(19, 12).unwrap().value(),
            BigInt::from(85)
        );
    }
}
