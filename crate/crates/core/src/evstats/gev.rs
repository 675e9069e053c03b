use serde::{Deserialize, Serialize};

use super::{fit_gumbel, ks_statistic, simplex};
use crate::error::{Error, Result};

/// Below this |shape| the Gumbel limit formulas are used.
const SHAPE_EPS: f64 = 1e-10;

/// Generalized extreme value distribution, cdf exp(-(1 + shape z)^(-1/shape))
/// with z = (x - location) / scale. Negative shape means bounded above.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gev {
    pub scale: f64,
    pub location: f64,
    pub shape: f64,
}

impl Gev {
    pub fn new(scale: f64, location: f64, shape: f64) -> Result<Self> {
        if !(scale > 0.0) || !location.is_finite() || !shape.is_finite() {
            return Err(Error::Domain(format!("GEV needs scale > 0, got {scale}")));
        }
        Ok(Self { scale, location, shape })
    }

    /// -log(cdf) in the interior of the support, None outside it.
    fn tail(&self, x: f64) -> Option<f64> {
        let z = (x - self.location) / self.scale;
        if self.shape.abs() < SHAPE_EPS {
            return Some((-z).exp());
        }
        let t = self.shape * z;
        if t <= -1.0 {
            return None;
        }
        Some((-t.ln_1p() / self.shape).exp())
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self.tail(x) {
            Some(t) => (-t).exp(),
            None if self.shape > 0.0 => 0.0,
            None => 1.0,
        }
    }

    pub fn log_pdf(&self, x: f64) -> f64 {
        let z = (x - self.location) / self.scale;
        if self.shape.abs() < SHAPE_EPS {
            return -self.scale.ln() - z - (-z).exp();
        }
        let t = self.shape * z;
        if t <= -1.0 {
            return f64::NEG_INFINITY;
        }
        let l = t.ln_1p();
        -self.scale.ln() - (1.0 + 1.0 / self.shape) * l - (-l / self.shape).exp()
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.log_pdf(x).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GevFit {
    pub scale: f64,
    pub location: f64,
    pub shape: f64,
    pub ks: f64,
}

impl GevFit {
    pub fn distribution(&self) -> Gev {
        Gev { scale: self.scale, location: self.location, shape: self.shape }
    }
}

fn neg_log_likelihood(samples: &[f64], p: &[f64; 3]) -> f64 {
    let (location, log_scale, shape) = (p[0], p[1], p[2]);
    // Outside (-1, 1) the likelihood is irregular or unbounded.
    if !(shape > -1.0 && shape < 1.0) || !log_scale.is_finite() {
        return f64::INFINITY;
    }
    let dist = Gev { scale: log_scale.exp(), location, shape };
    let mut total = 0.0;
    for &x in samples {
        let lp = dist.log_pdf(x);
        if !lp.is_finite() {
            // sample outside the candidate support
            return f64::INFINITY;
        }
        total -= lp;
    }
    total
}

/// Maximum-likelihood GEV fit by Nelder-Mead over (location, log scale, shape),
/// started from the Gumbel fit with zero shape. Candidates whose support
/// excludes a sample get infinite cost.
pub fn fit_gev(samples: &[f64]) -> Result<GevFit> {
    if samples.len() < 50 {
        return Err(Error::InsufficientSample { got: samples.len(), need: 50 });
    }
    let seed = fit_gumbel(samples)?;
    let cost = |p: &[f64; 3]| neg_log_likelihood(samples, p);
    let mut start = [seed.mode, seed.scale.ln(), 0.0];
    let mut steps = [0.1 * seed.scale, 0.1, 0.05];
    let mut best = simplex::minimize(cost, start, steps, 1e-13, 4000);
    // Restarts guard against a prematurely collapsed simplex.
    for _ in 0..3 {
        start = best.point;
        steps = [0.02 * best.point[1].exp(), 0.02, 0.01];
        let again = simplex::minimize(cost, start, steps, 1e-13, 4000);
        let improved = again.value < best.value - 1e-9 * best.value.abs();
        best = if again.value <= best.value { again } else { best };
        if !improved {
            break;
        }
    }
    if !best.converged || !best.value.is_finite() {
        return Err(Error::NonConvergence {
            what: "GEV likelihood",
            iterations: best.iterations,
            last: best.point[2],
        });
    }
    let [location, log_scale, shape] = best.point;
    let dist = Gev { scale: log_scale.exp(), location, shape };
    let ks = ks_statistic(samples, |x| dist.cdf(x))?;
    Ok(GevFit { scale: dist.scale, location, shape, ks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evstats::Gumbel;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn reduces_to_gumbel_at_zero_shape() {
        let g = Gumbel::new(0.9, 0.1).unwrap();
        let zero = Gev::new(0.9, 0.1, 0.0).unwrap();
        let tiny = Gev::new(0.9, 0.1, 1e-7).unwrap();
        for x in [-2.0, 0.0, 0.5, 3.0] {
            assert!((zero.cdf(x) - g.cdf(x)).abs() < 1e-15);
            assert!((tiny.cdf(x) - g.cdf(x)).abs() < 1e-6);
            assert!((zero.pdf(x) - g.pdf(x)).abs() < 1e-15);
        }
    }

    #[test]
    fn support_edges() {
        let bounded = Gev::new(1.0, 0.0, -0.5).unwrap();
        assert_eq!(bounded.cdf(2.5), 1.0);
        assert_eq!(bounded.log_pdf(2.5), f64::NEG_INFINITY);
        let heavy = Gev::new(1.0, 0.0, 0.5).unwrap();
        assert_eq!(heavy.cdf(-2.5), 0.0);
    }

    #[test]
    fn gumbel_data_gives_near_zero_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = Gumbel::new(1.0, 0.0).unwrap();
        let xs: Vec<f64> = (0..20_000).map(|_| g.quantile(rng.gen_range(f64::EPSILON..1.0))).collect();
        let fit = fit_gev(&xs).unwrap();
        assert!(fit.shape.abs() <= 0.05, "{fit:?}");
        assert!((fit.scale - 1.0).abs() < 0.05);
    }

    #[test]
    fn bounded_above_data_gives_negative_shape() {
        // Negated exponential draws: bounded above by 0.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let xs: Vec<f64> = (0..5_000).map(|_| rng.gen_range(f64::EPSILON..1.0f64).ln()).collect();
        let fit = fit_gev(&xs).unwrap();
        assert!(fit.shape < 0.0, "{fit:?}");
    }

    #[test]
    fn recovers_known_negative_shape() {
        let truth = Gev::new(1.0, 0.0, -0.2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        // inverse cdf: x = loc + scale ((-ln p)^(-shape) - 1) / shape
        let xs: Vec<f64> = (0..20_000)
            .map(|_| {
                let p: f64 = rng.gen_range(f64::EPSILON..1.0);
                ((-p.ln()).powf(-truth.shape) - 1.0) / truth.shape
            })
            .collect();
        let fit = fit_gev(&xs).unwrap();
        assert!((fit.shape + 0.2).abs() < 0.03, "{fit:?}");
    }

    #[test]
    fn too_few_samples() {
        assert!(matches!(fit_gev(&[0.0; 20]), Err(Error::InsufficientSample { got: 20, need: 50 })));
    }
}
