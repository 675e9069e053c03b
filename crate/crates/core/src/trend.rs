//! Trend curves for large gaps in a progression mod q, the rescaling that
//! feeds distribution fitting, and the first-occurrence location predictor.
//!
//! With a(q, x) = x phi(q) / li x:
//!
//! * baseline  T0 = a log(li x / a)
//! * maximal   Tm = T0 + b1 log(phi(q)) / (log log x)^b2 * a
//! * first occ Tf = T0 + (c0 - c1 log log x) * a
//!
//! The x argument is always the end-of-gap prime.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gapscan::GapEvent;
use crate::numutil::{is_prime, lcm2, log_integral, totient};
use crate::sieve::ResidueClass;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamSource {
    DefaultFormula,
    UserSupplied,
    Fitted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrendParams {
    pub b1: f64,
    pub b2: f64,
    pub c0: f64,
    pub c1: f64,
    pub source: ParamSource,
    /// Set when q is outside the families the default formulas were calibrated on.
    pub extrapolated: bool,
}

impl TrendParams {
    pub fn user(b1: f64, b2: f64, c0: f64, c1: f64) -> Result<Self> {
        let p = Self { b1, b2, c0, c1, source: ParamSource::UserSupplied, extrapolated: false };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.b1 >= 0.0) || !(self.b2 > 0.0) || !self.c0.is_finite() || !self.c1.is_finite() {
            return Err(Error::Domain(format!(
                "trend parameters need b1 >= 0, b2 > 0 and finite c0, c1 (got {self:?})"
            )));
        }
        Ok(())
    }
}

fn is_even_semiprime_from_10(q: u64) -> bool {
    q >= 10 && q.is_multiple_of(2) && is_prime(q / 2)
}

/// Default b1, b2, c0, c1 for modulus q.
///
/// q = 2 uses (c0, c1) = (3, 1.58) and no maximal-gap correction. Primes q >= 5
/// and even semiprimes q >= 10 use c0 = 2.18 L^0.58, c1 = 1.18 L^0.364 with
/// L = log lcm(2, q). Any other q gets the same formulas marked as extrapolated.
pub fn default_params(q: u64) -> TrendParams {
    if q <= 2 {
        return TrendParams {
            b1: 0.0,
            b2: 2.7,
            c0: 3.0,
            c1: 1.58,
            source: ParamSource::DefaultFormula,
            extrapolated: q < 2,
        };
    }
    let l = (lcm2(q).unwrap_or(u64::MAX) as f64).ln();
    TrendParams {
        b1: 4.0,
        b2: 2.7,
        c0: 2.18 * l.powf(0.58),
        c1: 1.18 * l.powf(0.364),
        source: ParamSource::DefaultFormula,
        extrapolated: !((q >= 5 && is_prime(q)) || is_even_semiprime_from_10(q)),
    }
}

/// Trend evaluator for a fixed modulus.
#[derive(Debug, Clone, Copy)]
pub struct Trend {
    q: u64,
    phi: f64,
    params: TrendParams,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrendPoint {
    pub x: f64,
    pub avg_gap: f64,
    pub baseline: f64,
    pub maximal: f64,
    pub first_occurrence: f64,
}

impl Trend {
    pub fn new(q: u64, params: TrendParams) -> Result<Self> {
        if q < 1 {
            return Err(Error::Domain("q must be positive".into()));
        }
        params.validate()?;
        Ok(Self { q, phi: totient(q) as f64, params })
    }

    pub fn with_defaults(q: u64) -> Result<Self> {
        Self::new(q, default_params(q))
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn params(&self) -> &TrendParams {
        &self.params
    }

    pub fn avg_gap(&self, x: f64) -> Result<f64> {
        if !(x > 2.0) {
            return Err(Error::Domain(format!("a(q, x) needs x > 2, got {x}")));
        }
        Ok(x * self.phi / log_integral(x)?)
    }

    fn baseline_parts(&self, x: f64) -> Result<(f64, f64)> {
        let a = self.avg_gap(x)?;
        let li = x * self.phi / a;
        if !(li / a > 1.0) {
            return Err(Error::Domain(format!("T0 needs li(x)/a(q,x) > 1 at x = {x}")));
        }
        Ok((a, a * (li / a).ln()))
    }

    pub fn baseline(&self, x: f64) -> Result<f64> {
        self.baseline_parts(x).map(|(_, t0)| t0)
    }

    /// T0 through the expanded form a (2 log(li x / phi) - log(x / phi)).
    pub fn baseline_expanded(&self, x: f64) -> Result<f64> {
        self.baseline(x)?;
        let li = log_integral(x)?;
        let phi = self.phi;
        Ok(x * phi / li * (2.0 * (li / phi).ln() - (x / phi).ln()))
    }

    fn loglog(x: f64) -> Result<f64> {
        if !(x > std::f64::consts::E) {
            return Err(Error::Domain(format!("log log x needs x > e, got {x}")));
        }
        Ok(x.ln().ln())
    }

    pub fn maximal_correction(&self, x: f64) -> Result<f64> {
        let ll = Self::loglog(x)?;
        let a = self.avg_gap(x)?;
        let p = &self.params;
        Ok(p.b1 * self.phi.ln() / ll.powf(p.b2) * a)
    }

    pub fn maximal(&self, x: f64) -> Result<f64> {
        let corr = self.maximal_correction(x)?;
        Ok(self.baseline(x)? + corr)
    }

    pub fn first_occurrence_correction(&self, x: f64) -> Result<f64> {
        let ll = Self::loglog(x)?;
        let a = self.avg_gap(x)?;
        Ok((self.params.c0 - self.params.c1 * ll) * a)
    }

    pub fn first_occurrence(&self, x: f64) -> Result<f64> {
        let corr = self.first_occurrence_correction(x)?;
        Ok(self.baseline(x)? + corr)
    }

    pub fn point(&self, x: f64) -> Result<TrendPoint> {
        let (a, t0) = self.baseline_parts(x)?;
        Ok(TrendPoint {
            x,
            avg_gap: a,
            baseline: t0,
            maximal: t0 + self.maximal_correction(x)?,
            first_occurrence: t0 + self.first_occurrence_correction(x)?,
        })
    }

    /// u = (d - Tf(q, x)) / a(q, x).
    pub fn rescale(&self, size: f64, x: f64) -> Result<f64> {
        let p = self.point(x)?;
        Ok((size - p.first_occurrence) / p.avg_gap)
    }

    /// log log x at which the first-occurrence correction changes sign.
    pub fn fo_sign_flip_loglog(&self) -> f64 {
        self.params.c0 / self.params.c1
    }
}

pub fn avg_gap(q: u64, x: f64) -> Result<f64> {
    Trend::with_defaults(q)?.avg_gap(x)
}

pub fn baseline_trend(q: u64, x: f64) -> Result<f64> {
    Trend::with_defaults(q)?.baseline(x)
}

pub fn maximal_trend(q: u64, x: f64, params: TrendParams) -> Result<f64> {
    Trend::new(q, params)?.maximal(x)
}

pub fn fo_trend(q: u64, x: f64, params: TrendParams) -> Result<f64> {
    Trend::new(q, params)?.first_occurrence(x)
}

/// Rescaled size of a gap event, evaluated at its end prime.
pub fn rescale(event: &GapEvent, cls: ResidueClass, params: TrendParams) -> Result<f64> {
    Trend::new(cls.q(), params)?.rescale(event.size as f64, event.end_prime as f64)
}

/// log of sqrt(d) e^sqrt(d / phi(q)).
pub fn ln_predict_first_occurrence(d: f64, q: u64) -> f64 {
    0.5 * d.ln() + (d / totient(q) as f64).sqrt()
}

/// sqrt(d) e^sqrt(d / phi(q)); +inf once the exponent passes 700.
pub fn predict_first_occurrence(d: u64, q: u64) -> f64 {
    let d = d as f64;
    let expo = (d / totient(q) as f64).sqrt();
    if expo > 700.0 {
        return f64::INFINITY;
    }
    ln_predict_first_occurrence(d, q).exp()
}

/// Multipliers C0 < C1 around the predicted first-occurrence start prime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictorBounds {
    pub c_lower: f64,
    pub c_upper: f64,
}

impl Default for PredictorBounds {
    fn default() -> Self {
        Self { c_lower: 0.1, c_upper: 10.0 }
    }
}

impl PredictorBounds {
    pub fn new(c_lower: f64, c_upper: f64) -> Result<Self> {
        if !(0.0 < c_lower && c_lower < c_upper) {
            return Err(Error::Domain(format!("need 0 < C0 < C1, got {c_lower}, {c_upper}")));
        }
        Ok(Self { c_lower, c_upper })
    }

    pub fn interval(&self, d: u64, q: u64) -> (f64, f64) {
        let p = predict_first_occurrence(d, q);
        (self.c_lower * p, self.c_upper * p)
    }

    pub fn contains(&self, d: u64, q: u64, start_prime: u64) -> bool {
        let (lo, hi) = self.interval(d, q);
        let p = start_prime as f64;
        lo < p && p < hi
    }
}

/// P~(T0(q, x), q) / x for each x, computed in log space.
pub fn inverse_limit_probe(q: u64, xs: &[f64]) -> Result<Vec<f64>> {
    let trend = Trend::with_defaults(q)?;
    xs.iter()
        .map(|&x| {
            let t0 = trend.baseline(x)?;
            Ok((ln_predict_first_occurrence(t0, q) - x.ln()).exp())
        })
        .collect()
}

/// The value the probe ratios tend to, e^(-1/2).
pub fn inverse_limit() -> f64 {
    (-0.5f64).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn avg_gap_examples() {
        let x = 10f64.exp();
        let li = log_integral(x).unwrap();
        assert!((avg_gap(2, x).unwrap() - x / li).abs() < 1e-9);
        assert!((avg_gap(211, x).unwrap() - 210.0 * avg_gap(2, x).unwrap()).abs() < 1e-9);
        let ratio = avg_gap(211, 1e12).unwrap() / (210.0 * 1e12f64.ln());
        assert!(ratio > 0.8 && ratio < 1.0);
        assert!(avg_gap(2, 2.0).is_err());
    }

    #[test]
    fn baseline_forms_agree() {
        for q in [2u64, 5, 211, 100_000] {
            let t = Trend::with_defaults(q).unwrap();
            let mut x = 1e3;
            while x <= 1e14 {
                if let Ok(a) = t.baseline(x) {
                    let b = t.baseline_expanded(x).unwrap();
                    assert!(((a - b) / a).abs() < 1e-9, "q={q} x={x}");
                }
                x *= 10.0;
            }
        }
        let t = Trend::with_defaults(211).unwrap();
        let v = t.baseline(1e10).unwrap();
        assert!(v / (210.0 * 1e10f64.ln().powi(2)) < 1.0);
    }

    #[test]
    fn baseline_q2_at_100() {
        let li100 = log_integral(100.0).unwrap();
        assert!((li100 - 30.126).abs() < 1e-3);
        let a = 100.0 / li100;
        let expect = a * (li100 / a).ln();
        assert!((baseline_trend(2, 100.0).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn baseline_domain() {
        // li(x)/a = li(x)^2/(x phi) <= 1 for small x relative to phi
        assert!(matches!(baseline_trend(100_003, 1000.0), Err(Error::Domain(_))));
    }

    #[test]
    fn maximal_trend_examples() {
        let p2 = default_params(2);
        for x in [10.0, 1e6, 1e12] {
            assert_eq!(maximal_trend(2, x, p2).unwrap(), baseline_trend(2, x).unwrap());
        }
        let p = default_params(211);
        let x = 1e10;
        let expect = baseline_trend(211, x).unwrap()
            + 4.0 * 210f64.ln() / x.ln().ln().powf(2.7) * avg_gap(211, x).unwrap();
        assert!((maximal_trend(211, x, p).unwrap() - expect).abs() < 1e-9 * expect);
        assert!(maximal_trend(211, 2.5, p).is_err());
    }

    #[test]
    fn fo_trend_examples() {
        let p = default_params(211);
        let l = 422f64.ln();
        assert!((p.c0 - 2.18 * l.powf(0.58)).abs() < 1e-15);
        assert!((p.c1 - 1.18 * l.powf(0.364)).abs() < 1e-15);
        let t = Trend::new(2, default_params(2)).unwrap();
        let x = 1e10;
        let corr = t.first_occurrence_correction(x).unwrap();
        let a = t.avg_gap(x).unwrap();
        assert!((corr / a - (3.0 - 1.58 * x.ln().ln())).abs() < 1e-12);
        assert!((corr / a + 1.955).abs() < 0.01);
        // Sign flips at log log x = c0 / c1.
        let flip = t.fo_sign_flip_loglog().exp().exp();
        assert!(t.first_occurrence_correction(flip * 0.99).unwrap() > 0.0);
        assert!(t.first_occurrence_correction(flip * 1.01).unwrap() < 0.0);
    }

    #[test]
    fn default_params_families() {
        let p2 = default_params(2);
        assert_eq!((p2.c0, p2.c1, p2.b1), (3.0, 1.58, 0.0));
        let p11 = default_params(11);
        assert!((p11.c0 - 2.18 * 22f64.ln().powf(0.58)).abs() < 1e-15);
        assert!(!p11.extrapolated);
        assert_eq!(default_params(22), p11);
        assert_eq!((p11.b1, p11.b2), (4.0, 2.7));
        assert!(default_params(3).extrapolated);
        assert!(default_params(30).extrapolated);
        assert!(!default_params(1009).extrapolated);
    }

    #[test]
    fn rescale_on_trend_is_zero() {
        let t = Trend::with_defaults(211).unwrap();
        let x = 1e8;
        let tf = t.first_occurrence(x).unwrap();
        assert!(t.rescale(tf, x).unwrap().abs() < 1e-12);
        let a = t.avg_gap(x).unwrap();
        assert!((t.rescale(tf + 2.5 * a, x).unwrap() - 2.5).abs() < 1e-12);
    }

    #[test]
    fn trends_order_and_growth() {
        for q in [2u64, 211, 1009] {
            let t = Trend::with_defaults(q).unwrap();
            let mut prev = 0.0;
            let mut x = 1e6;
            while x <= 1e14 {
                let p = t.point(x).unwrap();
                let norm = totient(q) as f64 * x.ln().powi(2);
                assert!(p.maximal >= p.baseline);
                for v in [p.baseline, p.maximal, p.first_occurrence] {
                    assert!(v / norm > 0.0 && v / norm <= 1.2, "q={q} x={x}");
                }
                assert!(p.baseline / norm > prev);
                prev = p.baseline / norm;
                if x.ln().ln() > t.fo_sign_flip_loglog() {
                    assert!(p.first_occurrence < p.baseline);
                }
                x *= 10.0;
            }
        }
    }

    #[test]
    fn predictor_examples() {
        for q in [2u64, 7, 211] {
            let phi = totient(q);
            let v = predict_first_occurrence(phi, q);
            assert!((v - (phi as f64).sqrt() * std::f64::consts::E).abs() < 1e-9 * v);
        }
        let v = predict_first_occurrence(100, 2);
        assert!((v - 10.0 * 10f64.exp()).abs() < 1e-6);
        assert!((v - 220_264.657_948).abs() < 1e-3);
        assert_eq!(predict_first_occurrence(1_000_000, 2), f64::INFINITY);
        let (lo, hi) = PredictorBounds::default().interval(100, 2);
        assert!((lo - 0.1 * v).abs() < 1e-6 && (hi - 10.0 * v).abs() < 1e-3);
        assert!(PredictorBounds::new(1.0, 0.5).is_err());
    }

    #[test]
    fn probe_approaches_limit() {
        assert!((inverse_limit() - 0.60653).abs() < 1e-5);
        for q in [2u64, 211] {
            let r = inverse_limit_probe(q, &[1e6, 1e9, 1e12]).unwrap();
            let lim = inverse_limit();
            assert!((r[2] - lim).abs() < (r[0] - lim).abs());
        }
    }

    proptest! {
        #[test]
        fn rescale_shift(x in 1e5f64..1e13, c in -5.0f64..5.0, d in 100.0f64..5000.0) {
            let t = Trend::with_defaults(211).unwrap();
            let a = t.avg_gap(x).unwrap();
            let u0 = t.rescale(d, x).unwrap();
            let u1 = t.rescale(d + c * a, x).unwrap();
            prop_assert!((u1 - u0 - c).abs() < 1e-9);
        }

        #[test]
        fn maximal_correction_nonnegative(q in 2u64..100_000, x in 3.0f64..1e14) {
            let t = Trend::with_defaults(q).unwrap();
            prop_assert!(t.maximal_correction(x).unwrap() >= 0.0);
        }
    }
}
