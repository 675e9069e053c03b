//! Generalized Brun constants for consecutive primes of a progression, and the
//! singular product S(d) = prod over odd primes p | d of (p - 1)/(p - 2),
//! including its exact mean along an arbitrary progression r + nq.

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gapscan::admissible_gap;
use crate::numutil::{lcm2, log_integral, prime_factors, totient, CONSTANTS};
use crate::sieve::{self, isqrt, small_primes, ResidueClass, SieveConfig};
use crate::trend;

pub type Rational = Ratio<u64>;

fn odd_prime_factors(n: u64) -> impl Iterator<Item = u64> {
    prime_factors(n).into_iter().filter(|&p| p > 2)
}

pub fn singular_product(d: u64) -> f64 {
    odd_prime_factors(d).map(|p| (p - 1) as f64 / (p - 2) as f64).product()
}

pub fn singular_product_exact(d: u64) -> Rational {
    odd_prime_factors(d).fold(Rational::from_integer(1), |acc, p| acc * Rational::new(p - 1, p - 2))
}

/// Mean of S(d) over d = r + nq, as an exact multiple of 1 / twin prime constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularMean {
    pub q: u64,
    pub r: u64,
    pub multiplier: Rational,
    pub value: f64,
}

/// Mean of S(d) along r + nq. q and r need not be coprime.
///
/// Each odd prime p | q contributes p/(p-1) when p | r (every term carries p)
/// and p(p-2)/(p-1)^2 otherwise (no term does). Other primes average out.
pub fn mean_singular_product(q: u64, r: u64) -> Result<SingularMean> {
    if q == 0 || r >= q {
        return Err(Error::Domain(format!("need q >= 1 and 0 <= r < q, got q={q}, r={r}")));
    }
    let cls = ResidueClass::relaxed(q, r);
    let mut multiplier = Rational::from_integer(1);
    for p in odd_prime_factors(cls.q()) {
        let factor = if cls.r().is_multiple_of(p) {
            Rational::new(p, p - 1)
        } else {
            Rational::new(p * (p - 2), (p - 1) * (p - 1))
        };
        multiplier = multiplier
            .checked_mul(&factor)
            .ok_or(Error::Overflow("singular mean multiplier"))?;
    }
    let value = multiplier.to_f64().unwrap_or(f64::NAN) * CONSTANTS.pi2_inv;
    Ok(SingularMean { q, r, multiplier, value })
}

/// Average of the multipliers over all residues mod q; 1 for every q.
pub fn residue_average(q: u64) -> Result<Rational> {
    let mut sum = Rational::from_integer(0);
    for r in 0..q {
        let m = mean_singular_product(q, r)?.multiplier;
        sum = sum.checked_add(&m).ok_or(Error::Overflow("residue average"))?;
    }
    Ok(sum / q)
}

fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
    }
    (old_r == 1).then(|| old_s.rem_euclid(m as i128) as u64)
}

/// (1/N) sum_{n=1..N} S(r + nq), factoring the whole progression by sieving
/// with odd primes up to sqrt of its last term.
pub fn empirical_singular_mean(q: u64, r: u64, n_max: u64) -> Result<f64> {
    if q == 0 || n_max == 0 {
        return Err(Error::Domain("need q >= 1 and n_max >= 1".into()));
    }
    let last = n_max
        .checked_mul(q)
        .and_then(|v| v.checked_add(r))
        .ok_or(Error::Overflow("progression term"))?;
    let n = n_max as usize;
    // index i holds the term with n = i + 1
    let mut rest: Vec<u64> = (1..=n_max).map(|k| r + k * q).collect();
    let mut product = vec![1.0f64; n];

    for p in small_primes(isqrt(last)).into_iter().filter(|&p| p > 2) {
        let first = if q.is_multiple_of(p) {
            if !r.is_multiple_of(p) {
                continue;
            }
            1
        } else {
            // r + nq = 0 (mod p)  <=>  n = -r q^-1 (mod p)
            let inv = mod_inverse(q % p, p).expect("p does not divide q");
            let k = ((p - r % p) % p) * inv % p;
            if k == 0 {
                p
            } else {
                k
            }
        };
        let step = if q.is_multiple_of(p) { 1 } else { p as usize };
        let factor = (p - 1) as f64 / (p - 2) as f64;
        let mut i = first as usize - 1;
        while i < n {
            let v = &mut rest[i];
            while (*v).is_multiple_of(p) {
                *v /= p;
            }
            product[i] *= factor;
            i += step;
        }
    }
    let mut total = 0.0;
    for (v, s) in rest.iter_mut().zip(product.iter_mut()) {
        *v >>= v.trailing_zeros();
        if *v > 1 {
            // a single odd prime factor above the sieving bound remains
            *s *= (*v - 1) as f64 / (*v - 2) as f64;
        }
        total += *s;
    }
    Ok(total / n_max as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BrunSum {
    pub d: u64,
    pub cls: ResidueClass,
    pub x: u64,
    pub partial_sum: f64,
    pub pair_count: u64,
}

/// B_d(x; q, r): the sum of 1/p + 1/p' over consecutive class primes with
/// p' - p = d and p' <= x. A prime in the middle of two such pairs counts twice.
pub fn brun_partial_sum(d: u64, cls: ResidueClass, x: u64) -> Result<BrunSum> {
    brun_partial_sum_with(d, cls, x, &SieveConfig::default())
}

pub fn brun_partial_sum_with(d: u64, cls: ResidueClass, x: u64, cfg: &SieveConfig) -> Result<BrunSum> {
    let curve = brun_growth(d, cls, &[x], cfg)?;
    Ok(curve[0].sum)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BrunPoint {
    pub x: u64,
    pub sum: BrunSum,
    pub estimate: f64,
}

/// Partial sums at each checkpoint from one pass. Summation runs in
/// increasing prime order so the result is reproducible bit for bit.
pub fn brun_growth(
    d: u64,
    cls: ResidueClass,
    checkpoints: &[u64],
    cfg: &SieveConfig,
) -> Result<Vec<BrunPoint>> {
    if d == 0 {
        return Err(Error::Domain("gap size must be positive".into()));
    }
    let mut xs = checkpoints.to_vec();
    xs.sort_unstable();
    xs.dedup();
    let x_max = xs.last().copied().unwrap_or(0);
    let mut sums = vec![(0.0f64, 0u64); xs.len()];

    if admissible_gap(cls.q(), d) && x_max >= 2 {
        let mut acc = 0.0f64;
        let mut pairs = 0u64;
        let mut slot = 0usize;
        let mut prev: Option<u64> = None;
        sieve::for_each_prime(1, x_max, cls.q(), cfg, |p| {
            if !cls.contains(p) {
                return;
            }
            while slot < xs.len() && xs[slot] < p {
                sums[slot] = (acc, pairs);
                slot += 1;
            }
            if let Some(a) = prev {
                if p - a == d {
                    acc += 1.0 / a as f64 + 1.0 / p as f64;
                    pairs += 1;
                }
            }
            prev = Some(p);
        })?;
        for s in &mut sums[slot..] {
            *s = (acc, pairs);
        }
    }
    xs.iter()
        .zip(sums)
        .map(|(&x, (partial_sum, pair_count))| {
            let estimate = if x > 1 {
                brun_estimate(d, cls.q(), Some(x as f64), EstimateForm::Simplified)?
            } else {
                0.0
            };
            Ok(BrunPoint {
                x,
                sum: BrunSum { d, cls, x, partial_sum, pair_count },
                estimate,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateForm {
    /// (A/d) e^(-d/(phi log x)) with A = 2 lcm(2,q) / phi(q).
    Simplified,
    /// (2 C2 / (phi d)) S(d) e^(-d/(phi log x)) with C2 = lcm(2,q) / s.
    FullProduct,
}

/// A = 2 lcm(2, q) / phi(q).
pub fn brun_amplitude(q: u64) -> Result<f64> {
    Ok(2.0 * lcm2(q)? as f64 / totient(q) as f64)
}

/// s: mean of S(d) over multiples of lcm(2, q).
pub fn lattice_singular_mean(q: u64) -> f64 {
    odd_prime_factors(q).map(|p| p as f64 / (p - 1) as f64).product::<f64>() * CONSTANTS.pi2_inv
}

/// C2 = lcm(2, q) / s.
pub fn c2(q: u64) -> Result<f64> {
    Ok(lcm2(q)? as f64 / lattice_singular_mean(q))
}

/// r-independent estimate of B_d(x; q); `None` gives the limit x -> infinity.
pub fn brun_estimate(d: u64, q: u64, x: Option<f64>, form: EstimateForm) -> Result<f64> {
    if d == 0 || q < 2 {
        return Err(Error::Domain(format!("need d >= 1 and q >= 2, got d={d}, q={q}")));
    }
    let phi = totient(q) as f64;
    let decay = match x {
        Some(x) if !(x > 1.0) => {
            return Err(Error::Domain(format!("estimate needs x > 1, got {x}")));
        }
        Some(x) => (-(d as f64) / (phi * x.ln())).exp(),
        None => 1.0,
    };
    let amplitude = match form {
        EstimateForm::Simplified => brun_amplitude(q)? / d as f64,
        EstimateForm::FullProduct => 2.0 * c2(q)? / (phi * d as f64) * singular_product(d),
    };
    Ok(amplitude * decay)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrimeCountMode {
    /// pi(x) replaced by li(x)
    Smooth,
    /// exact pi(x) from the sieve
    Exact,
}

/// Heuristic count of gaps of size d with end prime <= x:
/// C2 S(d) pi(x)^2 / (phi^2 x) e^(-d pi(x) / (phi x)); 0 for inadmissible d.
pub fn tau_estimate(d: u64, cls: ResidueClass, x: f64, mode: PrimeCountMode) -> Result<f64> {
    tau_estimate_with(d, cls, x, mode, &SieveConfig::default())
}

pub fn tau_estimate_with(
    d: u64,
    cls: ResidueClass,
    x: f64,
    mode: PrimeCountMode,
    cfg: &SieveConfig,
) -> Result<f64> {
    if !admissible_gap(cls.q(), d) || d == 0 {
        return Ok(0.0);
    }
    if !(x >= 1e3) {
        return Err(Error::Domain(format!("tau estimate needs x >= 1000, got {x}")));
    }
    let pi = match mode {
        PrimeCountMode::Smooth => log_integral(x)?,
        PrimeCountMode::Exact => sieve::prime_pi(x as u64, cfg)? as f64,
    };
    let phi = totient(cls.q()) as f64;
    let density = pi / (phi * x);
    Ok(c2(cls.q())? * singular_product(d) * pi * density / phi * (-(d as f64) * density).exp())
}

/// Approximate log of the first-occurrence location: t = log(d)/2 + sqrt(d/phi(q)).
pub fn first_occurrence_log_heuristic(d: u64, q: u64) -> f64 {
    trend::ln_predict_first_occurrence(d as f64, q)
}

/// Positive root of t^2 - t log d - d/phi(q) = 0.
pub fn first_occurrence_log_exact(d: u64, q: u64) -> f64 {
    let l = (d as f64).ln();
    let c = d as f64 / totient(q) as f64;
    0.5 * (l + (l * l + 4.0 * c).sqrt())
}

/// e^t with the approximate root; +inf when that overflows.
pub fn first_occurrence_heuristic(d: u64, q: u64) -> f64 {
    let t = first_occurrence_log_heuristic(d, q);
    if t > 709.0 {
        f64::INFINITY
    } else {
        t.exp()
    }
}
