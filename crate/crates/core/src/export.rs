//! CSV and JSON writers. CSV values carry 10 significant digits; JSON keeps the
//! shortest representation that round-trips.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::brun::BrunPoint;
use crate::error::Result;
use crate::gapscan::{GapEvent, ScanResult};

pub const CSV_DIGITS: usize = 10;

/// `x` rounded to `digits` significant digits, printed in its shortest form.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{:.*e}", digits.max(1) - 1, x).parse().unwrap_or(x);
    rounded.to_string()
}

pub fn round_sig(x: f64, digits: usize) -> f64 {
    fmt_sig(x, digits).parse().unwrap_or(x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub q: u64,
    pub r: u64,
    pub kind: String,
    pub n: u64,
    pub start_prime: u64,
    pub end_prime: u64,
    pub size: u64,
    pub csg: f64,
}

impl EventRecord {
    pub fn from_event(q: u64, r: u64, e: &GapEvent) -> Self {
        Self {
            q,
            r,
            kind: e.kind().as_str().to_string(),
            n: e.fo_index.unwrap_or(0),
            start_prime: e.start_prime,
            end_prime: e.end_prime,
            size: e.size,
            csg: e.csg,
        }
    }
}

pub const EVENT_HEADER: [&str; 8] = ["q", "r", "kind", "n", "start_prime", "end_prime", "size", "csg"];

pub fn event_records<'a, I>(results: I) -> Vec<EventRecord>
where
    I: IntoIterator<Item = &'a ScanResult>,
{
    results
        .into_iter()
        .flat_map(|res| {
            let (q, r) = (res.cls.q(), res.cls.r());
            res.events.iter().map(move |e| EventRecord::from_event(q, r, e))
        })
        .collect()
}

pub fn write_events_csv<W: Write>(out: W, records: &[EventRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(EVENT_HEADER)?;
    for e in records {
        w.write_record([
            e.q.to_string(),
            e.r.to_string(),
            e.kind.clone(),
            e.n.to_string(),
            e.start_prime.to_string(),
            e.end_prime.to_string(),
            e.size.to_string(),
            fmt_sig(e.csg, CSV_DIGITS),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_events_csv<R: std::io::Read>(input: R) -> Result<Vec<EventRecord>> {
    let mut rd = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for row in rd.deserialize() {
        out.push(row?);
    }
    Ok(out)
}

pub fn write_json<W: Write, T: Serialize + ?Sized>(mut out: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Generic numeric table: header plus rows of f64 printed at CSV precision.
pub fn write_table_csv<W: Write>(out: W, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|&v| fmt_sig(v, CSV_DIGITS)))?;
    }
    w.flush()?;
    Ok(())
}

/// x,pdf rows for overlaying a fitted density on a histogram.
pub fn write_pdf_csv<W: Write, F: Fn(f64) -> f64>(out: W, lo: f64, hi: f64, points: usize, pdf: F) -> Result<()> {
    let points = points.max(2);
    let rows: Vec<Vec<f64>> = (0..points)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / (points - 1) as f64;
            vec![x, pdf(x)]
        })
        .collect();
    write_table_csv(out, &["x", "pdf"], &rows)
}

pub fn write_brun_csv<W: Write>(out: W, curve: &[BrunPoint]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "partial_sum", "estimate"])?;
    for p in curve {
        w.write_record([
            p.x.to_string(),
            fmt_sig(p.sum.partial_sum, CSV_DIGITS),
            fmt_sig(p.estimate, CSV_DIGITS),
        ])?;
    }
    w.flush()?;
    Ok(())
}
