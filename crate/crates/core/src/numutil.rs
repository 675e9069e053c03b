//! Integer and special-function helpers shared by the rest of the crate.

use crate::error::{Error, Result};
use crate::sieve;

/// Constants used throughout the gap statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumConstants {
    /// Twin prime constant, the product over odd primes of p(p-2)/(p-1)^2.
    pub pi2: f64,
    pub pi2_inv: f64,
    pub euler_gamma: f64,
    /// li(2), the offset between the principal-value integral from 0 and the integral from 2.
    pub li_offset: f64,
}

pub const CONSTANTS: NumConstants = NumConstants {
    pi2: 0.660_161_815_846_869_6,
    pi2_inv: 1.514_780_128_137_491_3,
    euler_gamma: 0.577_215_664_901_532_9,
    li_offset: 1.045_163_780_117_493,
};

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Distinct prime factors of `n` in increasing order, by trial division.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    if n.is_multiple_of(2) {
        out.push(2);
        n >>= n.trailing_zeros();
    }
    let mut p = 3u64;
    while p.saturating_mul(p) <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 2;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && prime_factors(n) == [n]
}

/// Euler's totient. Panics on `q == 0`.
pub fn totient(q: u64) -> u64 {
    assert!(q > 0, "totient is undefined for 0");
    prime_factors(q)
        .into_iter()
        .fold(q, |acc, p| acc / p * (p - 1))
}

/// lcm(2, q): the lattice step of gap sizes between odd primes in a class mod q.
pub fn lcm2(q: u64) -> Result<u64> {
    if q == 0 {
        return Err(Error::Domain("lcm2 requires q >= 1".into()));
    }
    if q.is_multiple_of(2) {
        Ok(q)
    } else {
        q.checked_mul(2).ok_or(Error::Overflow("lcm2"))
    }
}

// 10-point Gauss-Legendre rule on [-1, 1].
const GL_NODES: [f64; 5] = [
    0.148_874_338_981_631_2,
    0.433_395_394_129_247_2,
    0.679_409_568_299_024_4,
    0.865_063_366_688_984_5,
    0.973_906_528_517_171_7,
];
const GL_WEIGHTS: [f64; 5] = [
    0.295_524_224_714_752_9,
    0.269_266_719_309_996_3,
    0.219_086_362_515_982,
    0.149_451_349_150_580_6,
    0.066_671_344_308_688_1,
];

fn gauss_legendre<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    GL_NODES
        .iter()
        .zip(GL_WEIGHTS.iter())
        .map(|(&x, &w)| w * (f(mid - half * x) + f(mid + half * x)))
        .sum::<f64>()
        * half
}

fn adaptive_gl<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let left = gauss_legendre(f, a, m);
    let right = gauss_legendre(f, m, b);
    let split = left + right;
    if depth == 0 || (split - whole).abs() <= tol * split.abs().max(f64::MIN_POSITIVE) {
        return split;
    }
    adaptive_gl(f, a, m, left, tol, depth - 1) + adaptive_gl(f, m, b, right, tol, depth - 1)
}

/// Exponential integral Ei(y) for y in (-1, 1] by its power series.
fn ei_series(y: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 1..200 {
        term *= y / k as f64;
        let add = term / k as f64;
        sum += add;
        if add.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    CONSTANTS.euler_gamma + y.abs().ln() + sum
}

/// E1(z) for z >= 1 by Lentz's continued fraction.
fn e1_continued_fraction(z: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = z + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h * (-z).exp()
}

/// Principal-value logarithmic integral li(x) = ∫₀ˣ dt / log t.
///
/// For x >= 2 this integrates e^s/s over s in [log 2, log x] with adaptive
/// Gauss-Legendre and adds li(2). Below 2 it goes through Ei(log x).
pub fn log_integral(x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("li(x) requires finite x >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Err(Error::Domain("li(x) diverges at x = 1".into()));
    }
    if x < 2.0 {
        let y = x.ln();
        return Ok(if y > -1.0 {
            ei_series(y)
        } else {
            -e1_continued_fraction(-y)
        });
    }
    if x == 2.0 {
        return Ok(CONSTANTS.li_offset);
    }
    let f = |s: f64| s.exp() / s;
    let a = std::f64::consts::LN_2;
    let b = x.ln();
    let whole = gauss_legendre(&f, a, b);
    Ok(adaptive_gl(&f, a, b, whole, 1e-14, 40) + CONSTANTS.li_offset)
}

/// Twin prime constant truncated to odd primes p <= `prime_cutoff`.
pub fn twin_prime_constant(prime_cutoff: u64) -> f64 {
    assert!(prime_cutoff >= 3, "cutoff must be at least 3");
    sieve::small_primes(prime_cutoff)
        .into_iter()
        .filter(|&p| p > 2)
        .map(|p| {
            let m = (p - 1) as f64;
            (-1.0 / (m * m)).ln_1p()
        })
        .sum::<f64>()
        .exp()
}
