use serde::{Deserialize, Serialize};

use super::ks_statistic;
use crate::error::{Error, Result};

/// Gumbel (maximum) distribution with cdf exp(-exp(-(x - mode) / scale)).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gumbel {
    pub scale: f64,
    pub mode: f64,
}

impl Gumbel {
    pub fn new(scale: f64, mode: f64) -> Result<Self> {
        if !(scale > 0.0) || !mode.is_finite() {
            return Err(Error::Domain(format!("Gumbel needs scale > 0, got {scale}")));
        }
        Ok(Self { scale, mode })
    }

    pub fn cdf(&self, x: f64) -> f64 {
        (-(-(x - self.mode) / self.scale).exp()).exp()
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let z = (x - self.mode) / self.scale;
        (-z - (-z).exp()).exp() / self.scale
    }

    pub fn quantile(&self, p: f64) -> f64 {
        self.mode - self.scale * (-p.ln()).ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GumbelFit {
    pub scale: f64,
    pub mode: f64,
    pub ks: f64,
    pub sample_size: usize,
}

impl GumbelFit {
    pub fn distribution(&self) -> Gumbel {
        Gumbel { scale: self.scale, mode: self.mode }
    }
}

const MAX_ITER: usize = 200;

/// Weighted mean and variance of `u` under weights exp(-(u - min) / alpha).
fn weighted_moments(u: &[f64], min: f64, alpha: f64) -> (f64, f64, f64) {
    let (mut sw, mut swu, mut swu2) = (0.0, 0.0, 0.0);
    for &x in u {
        let c = x - min;
        let w = (-c / alpha).exp();
        sw += w;
        swu += w * c;
        swu2 += w * c * c;
    }
    let m = swu / sw;
    (sw, m + min, (swu2 / sw - m * m).max(0.0))
}

/// Maximum-likelihood Gumbel fit.
///
/// The scale solves alpha = mean(u) - sum(u e^(-u/alpha)) / sum(e^(-u/alpha)) by
/// Newton iteration from the moment estimate; the mode then follows in closed
/// form. Weights are taken relative to min(u) so nothing overflows.
pub fn fit_gumbel(samples: &[f64]) -> Result<GumbelFit> {
    if samples.len() < 10 {
        return Err(Error::InsufficientSample { got: samples.len(), need: 10 });
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("samples must be finite".into()));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    if !(var > 0.0) {
        return Err(Error::Domain("samples have zero spread".into()));
    }
    let min = samples.iter().copied().fold(f64::INFINITY, f64::min);

    let mut alpha = var.sqrt() * 6f64.sqrt() / std::f64::consts::PI;
    let mut converged = false;
    for _ in 0..MAX_ITER {
        let (_, wmean, wvar) = weighted_moments(samples, min, alpha);
        let g = alpha - mean + wmean;
        let dg = 1.0 + wvar / (alpha * alpha);
        let mut next = alpha - g / dg;
        if !(next > 0.0) {
            next = 0.5 * alpha;
        }
        let step = (next - alpha).abs();
        alpha = next;
        if step <= 1e-13 * alpha {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence { what: "Gumbel scale", iterations: MAX_ITER, last: alpha });
    }
    let (sw, _, _) = weighted_moments(samples, min, alpha);
    let mode = min - alpha * (sw / n).ln();
    let dist = Gumbel { scale: alpha, mode };
    let ks = ks_statistic(samples, |x| dist.cdf(x))?;
    Ok(GumbelFit { scale: alpha, mode, ks, sample_size: samples.len() })
}
