//! Maximal and first-occurrence gaps between primes in arithmetic progressions:
//! a segmented sieve, gap scanners, trend curves, extreme-value fits, Brun sums
//! and mean singular products.

// Negated float comparisons are used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod brun;
pub mod cli;
pub mod error;
pub mod evstats;
pub mod export;
pub mod gapscan;
pub mod numutil;
pub mod sieve;
pub mod trend;

pub use error::{Error, Result};
pub use gapscan::{scan, scan_classes, scan_with, GapEvent, GapKind, ScanResult};
pub use sieve::{ResidueClass, SieveConfig};
pub use trend::{Trend, TrendParams};
