//! Maximal and first-occurrence gaps between consecutive primes of a progression.
//!
//! A gap is *first-occurrence* when its size has not been seen earlier in the
//! progression, and *maximal* when it is strictly larger than every earlier
//! gap. Every maximal gap is a first occurrence. Scans stream primes and keep
//! only the set of distinct sizes seen so far.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numutil::{lcm2, totient};
use crate::sieve::{self, ResidueClass, SieveConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapKind {
    Maximal,
    FirstOccurrence,
}

impl GapKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            GapKind::Maximal => "maximal",
            GapKind::FirstOccurrence => "first_occurrence",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapEvent {
    pub start_prime: u64,
    pub end_prime: u64,
    pub size: u64,
    pub is_maximal: bool,
    pub is_first_occurrence: bool,
    /// n in R(n; q, r), 1-based.
    pub maximal_index: Option<u64>,
    /// n in S(n; q, r), 1-based.
    pub fo_index: Option<u64>,
    /// size / (phi(q) log^2 end_prime)
    pub csg: f64,
}

impl GapEvent {
    pub fn kind(&self) -> GapKind {
        if self.is_maximal {
            GapKind::Maximal
        } else {
            GapKind::FirstOccurrence
        }
    }
}

pub fn csg_ratio(size: u64, phi: u64, end_prime: u64) -> f64 {
    let l = (end_prime as f64).ln();
    size as f64 / (phi as f64 * l * l)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub cls: ResidueClass,
    pub x_max: u64,
    pub events: Vec<GapEvent>,
    pub n_maximal: u64,
    pub n_first_occurrence: u64,
}

impl ScanResult {
    pub fn maximal(&self) -> impl Iterator<Item = &GapEvent> {
        self.events.iter().filter(|e| e.is_maximal)
    }
}

/// Incremental gap detector for one residue class.
#[derive(Debug, Clone)]
pub struct GapTracker {
    cls: ResidueClass,
    phi: u64,
    prev: Option<u64>,
    seen: HashSet<u64>,
    record: u64,
    events: Vec<GapEvent>,
    n_maximal: u64,
}

impl GapTracker {
    pub fn new(cls: ResidueClass) -> Self {
        Self {
            cls,
            phi: totient(cls.q()),
            prev: None,
            seen: HashSet::new(),
            record: 0,
            events: Vec::new(),
            n_maximal: 0,
        }
    }

    /// Feeds the next prime of the class; primes must arrive in increasing order.
    pub fn push(&mut self, p: u64) {
        if let Some(prev) = self.prev.replace(p) {
            debug_assert!(p > prev);
            let size = p - prev;
            if self.seen.insert(size) {
                let is_maximal = size > self.record;
                if is_maximal {
                    self.record = size;
                    self.n_maximal += 1;
                }
                self.events.push(GapEvent {
                    start_prime: prev,
                    end_prime: p,
                    size,
                    is_maximal,
                    is_first_occurrence: true,
                    maximal_index: is_maximal.then_some(self.n_maximal),
                    fo_index: Some(self.events.len() as u64 + 1),
                    csg: csg_ratio(size, self.phi, p),
                });
            }
        }
    }

    pub fn finish(self, x_max: u64) -> ScanResult {
        ScanResult {
            cls: self.cls,
            x_max,
            n_first_occurrence: self.events.len() as u64,
            n_maximal: self.n_maximal,
            events: self.events,
        }
    }
}

pub fn scan(cls: ResidueClass, x_max: u64) -> Result<ScanResult> {
    scan_with(cls, x_max, &SieveConfig::default())
}

pub fn scan_with(cls: ResidueClass, x_max: u64, cfg: &SieveConfig) -> Result<ScanResult> {
    Ok(scan_classes(&[cls], x_max, cfg)?.pop().expect("one class in, one result out"))
}

/// Scans several classes sharing a modulus in one sieve pass.
/// Results come back in the order of `classes`.
pub fn scan_classes(
    classes: &[ResidueClass],
    x_max: u64,
    cfg: &SieveConfig,
) -> Result<Vec<ScanResult>> {
    let Some(first) = classes.first() else {
        return Ok(Vec::new());
    };
    let q = first.q();
    if classes.iter().any(|c| c.q() != q) {
        return Err(Error::Domain("all classes in one scan must share q".into()));
    }
    let mut slot: Vec<Option<usize>> = vec![None; q as usize];
    for (i, c) in classes.iter().enumerate() {
        if slot[c.r() as usize].replace(i).is_some() {
            return Err(Error::Domain(format!("class {c} listed twice")));
        }
    }
    let mut trackers: Vec<GapTracker> = classes.iter().map(|&c| GapTracker::new(c)).collect();
    if x_max >= 2 {
        sieve::for_each_prime(1, x_max, q, cfg, |p| {
            if let Some(i) = slot[(p % q) as usize] {
                trackers[i].push(p);
            }
        })?;
    }
    Ok(trackers.into_iter().map(|t| t.finish(x_max)).collect())
}

/// d_{q,r}(x): the first-occurrence event with the largest end prime <= x.
pub fn latest_first_occurrence(result: &ScanResult, x: u64) -> Result<&GapEvent> {
    let idx = result.events.partition_point(|e| e.end_prime <= x);
    if idx == 0 {
        return Err(Error::NotFound(format!(
            "no first-occurrence gap in {} ends by {x}",
            result.cls
        )));
    }
    Ok(&result.events[idx - 1])
}

/// True when `d` can occur as a gap between odd primes of a class mod q.
pub fn admissible_gap(q: u64, d: u64) -> bool {
    d.is_multiple_of(2) && d.is_multiple_of(q)
}

/// tau_{q,r}(d, x): consecutive pairs p < p' <= x in the class with p' - p = d.
pub fn tau(cls: ResidueClass, d: u64, x: u64) -> Result<u64> {
    tau_with(cls, d, x, &SieveConfig::default())
}

pub fn tau_with(cls: ResidueClass, d: u64, x: u64, cfg: &SieveConfig) -> Result<u64> {
    if !admissible_gap(cls.q(), d) {
        return Ok(0);
    }
    Ok(tau_table_with(cls, x, cfg)?.get(&d).copied().unwrap_or(0))
}

/// Counts of every gap size occurring between consecutive class primes <= x.
pub fn tau_table_with(cls: ResidueClass, x: u64, cfg: &SieveConfig) -> Result<BTreeMap<u64, u64>> {
    let mut table = BTreeMap::new();
    if x < 2 {
        return Ok(table);
    }
    let mut prev: Option<u64> = None;
    sieve::for_each_prime(1, x, cls.q(), cfg, |p| {
        if cls.contains(p) {
            if let Some(a) = prev {
                *table.entry(p - a).or_insert(0) += 1;
            }
            prev = Some(p);
        }
    })?;
    Ok(table)
}

/// Per-interval means over all coprime residues mod q.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalCount {
    pub j: u32,
    pub mean_first_occurrence: f64,
    pub mean_maximal: f64,
}

/// Largest integer scanned for intervals up to j_max: floor(e^(j_max + 1)).
pub fn interval_x_max(j_max: u32) -> u64 {
    ((j_max + 1) as f64).exp().floor() as u64
}

/// Mean numbers of first-occurrence and maximal gaps with end prime in
/// (e^j, e^(j+1)], for j = 1..=j_max. Records are defined over the full scan
/// from 1 and then bucketed by end prime.
pub fn interval_counts(q: u64, j_max: u32, cfg: &SieveConfig) -> Result<Vec<IntervalCount>> {
    if j_max == 0 {
        return Err(Error::Domain("j_max must be at least 1".into()));
    }
    let x_max = interval_x_max(j_max);
    if x_max > cfg.budget {
        return Err(Error::Budget { requested: x_max, budget: cfg.budget });
    }
    let classes = ResidueClass::all_coprime(q)?;
    let results = scan_classes(&classes, x_max, cfg)?;
    Ok(bucket_means(&results, j_max))
}

pub fn bucket_means(results: &[ScanResult], j_max: u32) -> Vec<IntervalCount> {
    let n = results.len().max(1) as f64;
    let mut fo = vec![0u64; j_max as usize + 1];
    let mut mx = vec![0u64; j_max as usize + 1];
    for res in results {
        for e in &res.events {
            let end = e.end_prime as f64;
            // bucket j holds (e^j, e^(j+1)]
            let mut j = end.ln().ceil() as i64 - 1;
            if j >= 0 && (j as f64).exp() >= end {
                j -= 1;
            }
            if ((j + 1) as f64).exp() < end {
                j += 1;
            }
            if j >= 1 && j <= j_max as i64 {
                fo[j as usize] += 1;
                mx[j as usize] += e.is_maximal as u64;
            }
        }
    }
    (1..=j_max)
        .map(|j| IntervalCount {
            j,
            mean_first_occurrence: fo[j as usize] as f64 / n,
            mean_maximal: mx[j as usize] as f64 / n,
        })
        .collect()
}

/// (j, mean count) for one kind of event.
pub fn interval_record_counts(
    q: u64,
    j_max: u32,
    kind: GapKind,
    cfg: &SieveConfig,
) -> Result<Vec<(u32, f64)>> {
    Ok(interval_counts(q, j_max, cfg)?
        .into_iter()
        .map(|c| {
            let v = match kind {
                GapKind::Maximal => c.mean_maximal,
                GapKind::FirstOccurrence => c.mean_first_occurrence,
            };
            (c.j, v)
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundViolation {
    pub kind: GapKind,
    pub n: u64,
    pub size: u64,
    pub lower: f64,
    pub upper: f64,
}

/// Bounds on R(n): phi n^2 / 6 < R(n) < phi n^2 + (n + 2) q log^2 q (strict).
pub fn record_bounds(q: u64, n: u64) -> (f64, f64) {
    let phi = totient(q) as f64;
    let n = n as f64;
    let lq = (q as f64).ln();
    (phi * n * n / 6.0, phi * n * n + (n + 2.0) * q as f64 * lq * lq)
}

/// Bounds on S(n): n <= S(n) <= 2 n q ceil(log^2 q) (inclusive).
pub fn first_occurrence_bounds(q: u64, n: u64) -> (f64, f64) {
    let lq = (q as f64).ln();
    let n = n as f64;
    (n, 2.0 * n * q as f64 * (lq * lq).ceil())
}

/// Every event whose size breaks the R(n) or S(n) double inequality.
pub fn check_record_bounds(result: &ScanResult) -> Vec<BoundViolation> {
    let q = result.cls.q();
    let mut out = Vec::new();
    for e in &result.events {
        let size = e.size as f64;
        if let Some(n) = e.maximal_index {
            let (lower, upper) = record_bounds(q, n);
            if !(lower < size && size < upper) {
                out.push(BoundViolation { kind: GapKind::Maximal, n, size: e.size, lower, upper });
            }
        }
        if let Some(n) = e.fo_index {
            let (lower, upper) = first_occurrence_bounds(q, n);
            if !(lower <= size && size <= upper) {
                out.push(BoundViolation {
                    kind: GapKind::FirstOccurrence,
                    n,
                    size: e.size,
                    lower,
                    upper,
                });
            }
        }
    }
    out
}

/// Whether `event` is the largest gap among class gaps starting in
/// [p, p + p / (log p)^(1 + eps)], p being its start prime. Inspection only.
pub fn dominates_window(
    cls: ResidueClass,
    event: &GapEvent,
    eps: f64,
    cfg: &SieveConfig,
) -> Result<bool> {
    let p = event.start_prime as f64;
    let width = (p / p.ln().powf(1.0 + eps)).max(0.0) as u64;
    let window_end = event.start_prime.saturating_add(width);
    // One extra stretch past the window so the last gap starting inside it closes.
    let hi = window_end.saturating_add(event.size.max(cls.q()) * 64);
    let mut prev: Option<u64> = None;
    let mut largest = 0u64;
    sieve::for_each_prime(event.start_prime, hi, cls.q(), cfg, |x| {
        if cls.contains(x) {
            if let Some(a) = prev {
                if a <= window_end {
                    largest = largest.max(x - a);
                }
            }
            prev = Some(x);
        }
    })?;
    Ok(largest <= event.size)
}

/// Sanity check: every event past q has size divisible by lcm(2, q).
pub fn lattice_violations(result: &ScanResult) -> Result<Vec<&GapEvent>> {
    let step = lcm2(result.cls.q())?;
    Ok(result
        .events
        .iter()
        .filter(|e| e.start_prime > result.cls.q() && e.size % step != 0)
        .collect())
}
