use crate::error::{Error, Result};

/// Kolmogorov-Smirnov distance between the empirical cdf of `samples` and `cdf`.
///
/// D = max_i max(i/n - F(x_i), F(x_i) - (i-1)/n) over the sorted sample,
/// which is the exact supremum for a right-continuous step ECDF.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        let above = (i + 1) as f64 / n - f;
        let below = f - i as f64 / n;
        d = d.max(above).max(below);
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn logistic(x: f64) -> f64 {
        1.0 / (1.0 + (-x).exp())
    }

    fn logistic_inv(p: f64) -> f64 {
        (p / (1.0 - p)).ln()
    }

    /// O(n^2): evaluate the ECDF and its left limit at every sample point by counting.
    fn brute_force<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
        let n = samples.len() as f64;
        let mut d = 0.0f64;
        for &x in samples {
            let le = samples.iter().filter(|&&y| y <= x).count() as f64;
            let lt = samples.iter().filter(|&&y| y < x).count() as f64;
            let f = cdf(x);
            d = d.max(le / n - f).max(f - lt / n);
        }
        d
    }

    #[test]
    fn singleton_at_median() {
        assert_eq!(ks_statistic(&[logistic_inv(0.5)], logistic).unwrap(), 0.5);
    }

    #[test]
    fn evenly_spaced_quantiles() {
        let n = 40;
        let xs: Vec<f64> = (1..=n).map(|i| logistic_inv((i as f64 - 0.5) / n as f64)).collect();
        let d = ks_statistic(&xs, logistic).unwrap();
        assert!((d - 0.5 / n as f64).abs() < 1e-12);
    }

    #[test]
    fn empty_rejected() {
        assert!(matches!(ks_statistic(&[], logistic), Err(Error::EmptySample)));
    }

    #[test]
    fn matches_brute_force_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let n = rng.gen_range(1..=50);
            // coarse grid so ties show up
            let xs: Vec<f64> = (0..n).map(|_| (rng.gen_range(-30..30) as f64) / 10.0).collect();
            assert_eq!(ks_statistic(&xs, logistic).unwrap(), brute_force(&xs, logistic));
        }
    }
}
