//! Segmented sieve of Eratosthenes with optional residue-class filtering.
//!
//! Segments may be sieved on a worker pool, but [`Segments`] always yields
//! them in ascending order, so every consumer sees the same prime stream
//! regardless of the thread count.

mod cache;

use std::collections::VecDeque;
use std::path::PathBuf;
use std::sync::Arc;

use rayon::prelude::*;
use rayon::ThreadPool;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numutil::gcd;

pub use cache::SegmentCache;

/// Exclusive upper bound on every sieved range.
pub const RANGE_LIMIT: u64 = 1 << 63;

pub const DEFAULT_SEGMENT_LEN: u64 = 1 << 22;

pub const DEFAULT_BUDGET: u64 = 10_000_000_000;

/// The progression r, r + q, r + 2q, ... with gcd(q, r) = 1 and 1 <= r < q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawClass")]
pub struct ResidueClass {
    q: u64,
    r: u64,
}

#[derive(Deserialize)]
struct RawClass {
    q: u64,
    r: u64,
}

impl TryFrom<RawClass> for ResidueClass {
    type Error = Error;

    fn try_from(raw: RawClass) -> Result<Self> {
        Self::new(raw.q, raw.r)
    }
}

impl ResidueClass {
    pub fn new(q: u64, r: u64) -> Result<Self> {
        if q < 2 || r == 0 || r >= q {
            return Err(Error::InvalidClass { q, r, reason: "need 1 <= r < q" });
        }
        if gcd(q, r) != 1 {
            return Err(Error::InvalidClass { q, r, reason: "q and r must be coprime" });
        }
        Ok(Self { q, r })
    }

    /// Accepts r = 0 and gcd(q, r) > 1. Only the singular-product averaging uses this.
    pub(crate) fn relaxed(q: u64, r: u64) -> Self {
        debug_assert!(q >= 1 && r < q.max(1));
        Self { q, r }
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn contains(&self, n: u64) -> bool {
        n % self.q == self.r
    }

    /// All classes mod q with residues coprime to q, in increasing order of r.
    pub fn all_coprime(q: u64) -> Result<Vec<Self>> {
        if q < 2 {
            return Err(Error::InvalidClass { q, r: 0, reason: "need q >= 2" });
        }
        Ok((1..q).filter(|&r| gcd(q, r) == 1).map(|r| Self { q, r }).collect())
    }
}

impl std::fmt::Display for ResidueClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} mod {}", self.r, self.q)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeSegment {
    pub lo: u64,
    pub hi: u64,
    pub primes: Vec<u64>,
}

#[derive(Debug, Clone)]
pub struct SieveConfig {
    pub threads: usize,
    pub segment_len: u64,
    /// Maximum count of integers a single request may sieve.
    pub budget: u64,
    pub cache_dir: Option<PathBuf>,
}

impl Default for SieveConfig {
    fn default() -> Self {
        Self {
            threads: 1,
            segment_len: DEFAULT_SEGMENT_LEN,
            budget: DEFAULT_BUDGET,
            cache_dir: None,
        }
    }
}

impl SieveConfig {
    pub fn with_threads(threads: usize) -> Self {
        Self { threads: threads.max(1), ..Self::default() }
    }

    fn check_range(&self, lo: u64, hi: u64) -> Result<()> {
        if hi >= RANGE_LIMIT {
            return Err(Error::Range(format!("upper bound {hi} is not below 2^63")));
        }
        if lo == 0 || lo > hi {
            return Err(Error::Range(format!("need 1 <= lo <= hi, got [{lo}, {hi}]")));
        }
        let requested = hi - lo + 1;
        if requested > self.budget {
            return Err(Error::Budget { requested, budget: self.budget });
        }
        Ok(())
    }
}

pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= n) {
        r += 1;
    }
    r
}

/// All primes <= `limit` from a single monolithic sieve.
pub fn small_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut i = 2usize;
    while i * i <= n {
        if !composite[i] {
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
        i += 1;
    }
    (2..=n).filter(|&k| !composite[k]).map(|k| k as u64).collect()
}

/// Primes in [lo, hi]. `base` must hold every prime up to sqrt(hi).
fn sieve_segment(lo: u64, hi: u64, base: &[u64]) -> Vec<u64> {
    let mut out = Vec::new();
    if lo <= 2 && 2 <= hi {
        out.push(2);
    }
    let first_odd = if lo <= 3 { 3 } else { lo | 1 };
    if first_odd > hi {
        return out;
    }
    let len = ((hi - first_odd) / 2 + 1) as usize;
    let mut is_prime = vec![true; len];
    for &p in base.iter().skip_while(|&&p| p == 2) {
        let sq = p * p;
        if sq > hi {
            break;
        }
        let mut start = if sq >= first_odd { sq } else { first_odd.div_ceil(p) * p };
        if start % 2 == 0 {
            start += p;
        }
        let step = p as usize;
        let mut idx = ((start - first_odd) / 2) as usize;
        while idx < len {
            is_prime[idx] = false;
            idx += step;
        }
    }
    out.extend(
        is_prime
            .iter()
            .enumerate()
            .filter(|(_, &flag)| flag)
            .map(|(i, _)| first_odd + 2 * i as u64),
    );
    out
}

/// Ordered stream of sieved segments covering [lo, hi].
///
/// When `coprime_to` is q > 1, primes dividing q are dropped from every
/// segment; the remaining primes are exactly the union of the coprime classes mod q.
pub struct Segments {
    base: Arc<Vec<u64>>,
    next_lo: u64,
    hi: u64,
    coprime_to: u64,
    segment_len: u64,
    batch: usize,
    pool: Option<ThreadPool>,
    cache: Option<SegmentCache>,
    queue: VecDeque<Result<PrimeSegment>>,
}

impl Segments {
    pub fn new(lo: u64, hi: u64, coprime_to: u64, cfg: &SieveConfig) -> Result<Self> {
        cfg.check_range(lo, hi)?;
        let base = Arc::new(small_primes(isqrt(hi)));
        let pool = if cfg.threads > 1 {
            Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(cfg.threads)
                    .build()
                    .map_err(|e| Error::Io(std::io::Error::other(e)))?,
            )
        } else {
            None
        };
        let cache = cfg.cache_dir.as_ref().map(SegmentCache::new).transpose()?;
        Ok(Self {
            base,
            next_lo: lo,
            hi,
            coprime_to: coprime_to.max(1),
            segment_len: cfg.segment_len.max(64),
            batch: 2 * cfg.threads.max(1),
            pool,
            cache,
            queue: VecDeque::new(),
        })
    }

    fn produce(&self, lo: u64, hi: u64) -> Result<PrimeSegment> {
        let q = self.coprime_to;
        if let Some(cache) = &self.cache {
            if let Some(primes) = cache.load(q, lo, hi)? {
                return Ok(PrimeSegment { lo, hi, primes });
            }
        }
        let mut primes = sieve_segment(lo, hi, &self.base);
        if q > 1 {
            primes.retain(|&p| !q.is_multiple_of(p));
        }
        if let Some(cache) = &self.cache {
            cache.store(q, lo, hi, &primes)?;
        }
        Ok(PrimeSegment { lo, hi, primes })
    }

    fn refill(&mut self) {
        let mut bounds = Vec::with_capacity(self.batch);
        while bounds.len() < self.batch && self.next_lo <= self.hi {
            let lo = self.next_lo;
            let hi = lo.saturating_add(self.segment_len - 1).min(self.hi);
            bounds.push((lo, hi));
            self.next_lo = hi + 1;
        }
        let produced: Vec<Result<PrimeSegment>> = match &self.pool {
            Some(pool) => pool.install(|| {
                bounds.par_iter().map(|&(lo, hi)| self.produce(lo, hi)).collect()
            }),
            None => bounds.iter().map(|&(lo, hi)| self.produce(lo, hi)).collect(),
        };
        self.queue.extend(produced);
    }
}

impl Iterator for Segments {
    type Item = Result<PrimeSegment>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.queue.is_empty() && self.next_lo <= self.hi {
            self.refill();
        }
        self.queue.pop_front()
    }
}

/// Calls `f` on every prime in [lo, hi] coprime to `coprime_to`, in increasing order.
pub fn for_each_prime<F: FnMut(u64)>(
    lo: u64,
    hi: u64,
    coprime_to: u64,
    cfg: &SieveConfig,
    mut f: F,
) -> Result<()> {
    for seg in Segments::new(lo, hi, coprime_to, cfg)? {
        seg?.primes.into_iter().for_each(&mut f);
    }
    Ok(())
}

pub fn primes_in_class(cls: ResidueClass, lo: u64, hi: u64) -> Result<Vec<u64>> {
    primes_in_class_with(cls, lo, hi, &SieveConfig::default())
}

pub fn primes_in_class_with(
    cls: ResidueClass,
    lo: u64,
    hi: u64,
    cfg: &SieveConfig,
) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for_each_prime(lo, hi, cls.q(), cfg, |p| {
        if cls.contains(p) {
            out.push(p);
        }
    })?;
    Ok(out)
}

/// pi(x; q, r).
pub fn prime_count(cls: ResidueClass, x: u64) -> Result<u64> {
    prime_count_with(cls, x, &SieveConfig::default())
}

pub fn prime_count_with(cls: ResidueClass, x: u64, cfg: &SieveConfig) -> Result<u64> {
    let mut n = 0;
    for_each_prime(1, x.max(1), cls.q(), cfg, |p| n += cls.contains(p) as u64)?;
    Ok(n)
}

/// pi(x), all primes.
pub fn prime_pi(x: u64, cfg: &SieveConfig) -> Result<u64> {
    let mut n = 0;
    for seg in Segments::new(1, x.max(1), 1, cfg)? {
        n += seg?.primes.len() as u64;
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn trial_division(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
    }

    fn oracle_class(q: u64, r: u64, lo: u64, hi: u64) -> Vec<u64> {
        (lo..=hi).filter(|&n| n % q == r && trial_division(n)).collect()
    }

    #[test]
    fn class_examples() {
        let c65 = ResidueClass::new(6, 5).unwrap();
        let c21 = ResidueClass::new(2, 1).unwrap();
        assert_eq!(primes_in_class(c65, 1, 50).unwrap(), vec![5, 11, 17, 23, 29, 41, 47]);
        assert_eq!(oracle_class(6, 5, 1, 50), vec![5, 11, 17, 23, 29, 41, 47]);
        assert_eq!(primes_in_class(c21, 3, 20).unwrap(), vec![3, 5, 7, 11, 13, 17, 19]);
        assert!(primes_in_class(c65, 24, 28).unwrap().is_empty());
    }

    #[test]
    fn count_examples() {
        let c65 = ResidueClass::new(6, 5).unwrap();
        assert_eq!(prime_count(c65, 50).unwrap(), 7);
        assert_eq!(prime_count(c65, 4).unwrap(), 0);
        assert_eq!(prime_count(ResidueClass::new(2, 1).unwrap(), 100).unwrap(), 24);
    }

    #[test]
    fn class_validation() {
        assert!(ResidueClass::new(4, 2).is_err());
        assert!(ResidueClass::new(6, 0).is_err());
        assert!(ResidueClass::new(6, 7).is_err());
        assert!(ResidueClass::new(1, 0).is_err());
        assert_eq!(ResidueClass::all_coprime(12).unwrap().len(), 4);
    }

    #[test]
    fn range_errors() {
        let c = ResidueClass::new(6, 5).unwrap();
        assert!(matches!(primes_in_class(c, 1, 1 << 63), Err(Error::Range(_))));
        assert!(matches!(primes_in_class(c, 0, 10), Err(Error::Range(_))));
        let tight = SieveConfig { budget: 100, ..SieveConfig::default() };
        assert!(matches!(
            primes_in_class_with(c, 1, 1000, &tight),
            Err(Error::Budget { requested: 1000, budget: 100 })
        ));
    }

    #[test]
    fn matches_trial_division_near_boundaries() {
        let cfg = SieveConfig { segment_len: 100, ..SieveConfig::default() };
        for (q, r) in [(2, 1), (6, 1), (6, 5), (30, 7), (211, 1), (211, 100)] {
            let c = ResidueClass::new(q, r).unwrap();
            for (lo, hi) in [(1, 3000), (2, 2), (97, 101), (1000, 1999), (9_999_000, 10_000_000)] {
                assert_eq!(
                    primes_in_class_with(c, lo, hi, &cfg).unwrap(),
                    oracle_class(q, r, lo, hi),
                    "q={q} r={r} [{lo},{hi}]"
                );
            }
        }
    }

    #[test]
    fn partition_over_classes() {
        let x = 10_000_000;
        let cfg = SieveConfig::default();
        let total = prime_pi(x, &cfg).unwrap();
        assert_eq!(total, 664_579);
        for q in [2u64, 6, 211] {
            let mut counts = vec![0u64; q as usize];
            for_each_prime(1, x, 1, &cfg, |p| counts[(p % q) as usize] += 1).unwrap();
            let coprime: u64 = ResidueClass::all_coprime(q)
                .unwrap()
                .iter()
                .map(|c| counts[c.r() as usize])
                .sum();
            let dividing = crate::numutil::prime_factors(q).len() as u64;
            assert_eq!(coprime + dividing, total, "q={q}");
        }
    }

    #[test]
    fn threads_do_not_change_stream() {
        let one = SieveConfig { segment_len: 10_000, ..SieveConfig::with_threads(1) };
        let many = SieveConfig { segment_len: 10_000, ..SieveConfig::with_threads(4) };
        let a: Vec<_> = Segments::new(1, 2_000_000, 6, &one).unwrap().map(Result::unwrap).collect();
        let b: Vec<_> = Segments::new(1, 2_000_000, 6, &many).unwrap().map(Result::unwrap).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn isqrt_exact() {
        for n in [0u64, 1, 3, 4, 15, 16, 17, u32::MAX as u64, (1 << 63) - 1, u64::MAX] {
            let r = isqrt(n);
            assert!(r.checked_mul(r).unwrap() <= n);
            assert!((r + 1).checked_mul(r + 1).is_none_or(|s| s > n));
        }
    }

    proptest! {
        #[test]
        fn segment_independence(lo in 1u64..200_000, len in 0u64..50_000, cut in 0u64..50_000, seg in 50u64..5_000) {
            let hi = lo + len;
            let mid = lo + cut.min(len);
            let c = ResidueClass::new(30, 11).unwrap();
            let cfg = SieveConfig { segment_len: seg, ..SieveConfig::default() };
            let whole = primes_in_class_with(c, lo, hi, &cfg).unwrap();
            let mut parts = primes_in_class_with(c, lo, mid, &cfg).unwrap();
            if mid < hi {
                parts.extend(primes_in_class_with(c, mid + 1, hi, &cfg).unwrap());
            }
            prop_assert_eq!(whole, parts);
        }
    }
}
