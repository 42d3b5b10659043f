//! Exact Fibonacci, Lucas and power-of-two values.
//!
//! Both recurrences are memoized in a [`SequenceCache`] that only ever grows.
//! Reads take a shared lock; extension takes the write lock, so a cache can be
//! shared freely between reduction workers.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use parking_lot::RwLock;

#[derive(Debug)]
struct Tables {
    fib: Vec<BigUint>,
    lucas: Vec<BigUint>,
}

impl Tables {
    fn seeded() -> Self {
        Tables {
            fib: vec![BigUint::zero(), BigUint::one()],
            lucas: vec![BigUint::from(2u32), BigUint::one()],
        }
    }

    fn extend_to(&mut self, k: usize) {
        while self.fib.len() <= k {
            let n = self.fib.len();
            let f = &self.fib[n - 1] + &self.fib[n - 2];
            let l = &self.lucas[n - 1] + &self.lucas[n - 2];
            self.fib.push(f);
            self.lucas.push(l);
        }
    }
}

/// Memoized Fibonacci and Lucas numbers, indexed from 0.
#[derive(Debug)]
pub struct SequenceCache {
    inner: RwLock<Tables>,
}

impl Default for SequenceCache {
    fn default() -> Self {
        Self::new()
    }
}

impl SequenceCache {
    pub fn new() -> Self {
        SequenceCache {
            inner: RwLock::new(Tables::seeded()),
        }
    }

    /// The process-wide cache used by the free functions of this module.
    pub fn global() -> &'static SequenceCache {
        static CACHE: OnceLock<SequenceCache> = OnceLock::new();
        CACHE.get_or_init(SequenceCache::new)
    }

    /// Fill both tables up to and including index `k`.
    pub fn warm(&self, k: usize) {
        if self.inner.read().fib.len() > k {
            return;
        }
        self.inner.write().extend_to(k);
    }

    /// Highest index currently cached.
    pub fn high_water(&self) -> usize {
        self.inner.read().fib.len() - 1
    }

    pub fn fib(&self, k: usize) -> BigUint {
        self.warm(k);
        self.inner.read().fib[k].clone()
    }

    pub fn lucas(&self, k: usize) -> BigUint {
        self.warm(k);
        self.inner.read().lucas[k].clone()
    }
}

/// F_k.
pub fn fib(k: usize) -> BigUint {
    SequenceCache::global().fib(k)
}

/// L_k, with L_0 = 2 and L_1 = 1.
pub fn lucas(k: usize) -> BigUint {
    SequenceCache::global().lucas(k)
}

/// 2^m.
pub fn pow2(m: usize) -> BigUint {
    BigUint::one() << m
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn fib_values() {
        assert_eq!(fib(0), BigUint::zero());
        assert_eq!(fib(1), BigUint::one());
        assert_eq!(fib(7), BigUint::from(13u32));
        assert_eq!(fib(19), BigUint::from(4181u32));
    }

    #[test]
    fn lucas_values() {
        assert_eq!(lucas(0), BigUint::from(2u32));
        assert_eq!(lucas(1), BigUint::one());
        // 2, 1, 3, 4, 7, 11, 18, 29, 47, 76, 123
        assert_eq!(lucas(10), BigUint::from(123u32));
    }

    #[test]
    fn pow2_values() {
        assert_eq!(pow2(0), BigUint::one());
        assert_eq!(pow2(5), BigUint::from(32u32));
        assert_eq!(pow2(12), BigUint::from(4096u32));
    }

    #[test]
    fn lucas_fib_norm_identity() {
        // L_k^2 - 5 F_k^2 = 4 (-1)^k
        for k in 0..=2000 {
            let l = BigInt::from(lucas(k));
            let f = BigInt::from(fib(k));
            let lhs = &l * &l - BigInt::from(5) * &f * &f;
            let rhs = if k % 2 == 0 {
                BigInt::from(4)
            } else {
                BigInt::from(-4)
            };
            assert_eq!(lhs, rhs, "k = {k}");
        }
    }

    #[test]
    fn strictly_increasing() {
        for k in 2..500 {
            assert!(fib(k + 1) > fib(k));
        }
        for k in 1..500 {
            assert!(lucas(k + 1) > lucas(k));
        }
    }

    #[test]
    fn local_cache_matches_global() {
        let cache = SequenceCache::new();
        assert_eq!(cache.high_water(), 1);
        assert_eq!(cache.fib(300), fib(300));
        assert_eq!(cache.high_water(), 300);
        assert_eq!(cache.lucas(17), lucas(17));
        // reads below the high-water mark do not shrink it
        assert_eq!(cache.high_water(), 300);
    }

    #[test]
    fn concurrent_readers_agree() {
        let cache = SequenceCache::new();
        std::thread::scope(|s| {
            for t in 0..4 {
                let cache = &cache;
                s.spawn(move || {
                    for k in (t..400).step_by(4) {
                        assert_eq!(cache.fib(k), fib(k));
                    }
                });
            }
        });
    }
}
