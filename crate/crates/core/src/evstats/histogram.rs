use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub total: u64,
}

/// Equal-width bins over [min, max]. Bins are closed on the left and open on the
/// right, except the last, which also takes the maximum. An all-equal sample is
/// widened by 1e-9 max(1, |v|) on each side.
pub fn build_histogram(samples: &[f64], bin_count: usize) -> Result<Histogram> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    if bin_count == 0 {
        return Err(Error::Domain("bin_count must be at least 1".into()));
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("histogram samples must be finite".into()));
    }
    let (mut lo, mut hi) = samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if lo == hi {
        let pad = 1e-9 * lo.abs().max(1.0);
        lo -= pad;
        hi += pad;
    }
    let width = (hi - lo) / bin_count as f64;
    let mut bin_edges: Vec<f64> = (0..bin_count).map(|i| lo + width * i as f64).collect();
    bin_edges.push(hi);

    let mut counts = vec![0u64; bin_count];
    for &v in samples {
        let mut idx = (((v - lo) / width) as usize).min(bin_count - 1);
        while idx > 0 && v < bin_edges[idx] {
            idx -= 1;
        }
        while idx + 1 < bin_count && v >= bin_edges[idx + 1] {
            idx += 1;
        }
        counts[idx] += 1;
    }
    Ok(Histogram { bin_edges, counts, total: samples.len() as u64 })
}

impl Histogram {
    pub fn bin_width(&self, i: usize) -> f64 {
        self.bin_edges[i + 1] - self.bin_edges[i]
    }

    pub fn density(&self, i: usize) -> f64 {
        self.counts[i] as f64 / (self.total as f64 * self.bin_width(i))
    }

    /// CSV with columns bin_lo,bin_hi,count,density.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["bin_lo", "bin_hi", "count", "density"])?;
        for i in 0..self.counts.len() {
            w.write_record([
                crate::export::fmt_sig(self.bin_edges[i], 10),
                crate::export::fmt_sig(self.bin_edges[i + 1], 10),
                self.counts[i].to_string(),
                crate::export::fmt_sig(self.density(i), 10),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}
