//! Extreme-value statistics for rescaled gap sizes: histograms, Gumbel and
//! GEV maximum-likelihood fits, and the Kolmogorov-Smirnov distance.

mod gev;
mod gumbel;
mod histogram;
mod ks;
mod simplex;

pub use gev::{fit_gev, Gev, GevFit};
pub use gumbel::{fit_gumbel, Gumbel, GumbelFit};
pub use histogram::{build_histogram, Histogram};
pub use ks::ks_statistic;
