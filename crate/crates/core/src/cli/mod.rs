//! `apgaps` command line: scans, fits, interval counts, Brun sums, singular
//! product means, first-occurrence predictions and the inverse-trend probe.
//!
//! Exit codes: 0 ok, 2 bad input, 3 sieve budget exceeded, 4 computation error.

mod table;

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::brun::{self, EstimateForm};
use crate::error::{Error, Result};
use crate::evstats::{build_histogram, fit_gev, fit_gumbel, Gumbel};
use crate::export::{self, event_records};
use crate::gapscan::{interval_counts, scan_classes, ScanResult};
use crate::numutil::totient;
use crate::sieve::{ResidueClass, SieveConfig};
use crate::trend::{self, default_params, PredictorBounds, Trend, TrendParams};

pub use table::{Cell, Table};

#[derive(Debug, Parser)]
#[command(name = "apgaps", version, about = "Gaps between primes in arithmetic progressions")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Directory for output files (created if missing).
    #[arg(long, global = true, default_value = ".")]
    pub output_dir: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 1, value_parser = parse_threads)]
    pub threads: usize,
    /// Largest count of integers a single sieve request may cover.
    #[arg(long, global = true, default_value = "1e10", value_parser = parse_count)]
    pub budget: u64,
    /// Optional on-disk cache of sieved segments.
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate maximal and first-occurrence gaps.
    Scan(ScanArgs),
    /// Fit Gumbel and GEV laws to rescaled first-occurrence gaps.
    Fit(FitArgs),
    /// Mean gap counts per interval [e^j, e^(j+1)].
    Counts(CountsArgs),
    /// Partial sums of generalized Brun constants.
    Brun(BrunArgs),
    /// Exact mean of the singular product over a progression.
    Meanprod(MeanprodArgs),
    /// Predicted location of the first gap of size d.
    Predict(PredictArgs),
    /// Ratios P~(T0(x)) / x approaching e^(-1/2).
    Probe(ProbeArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct TrendOverrides {
    #[arg(long)]
    pub b1: Option<f64>,
    #[arg(long)]
    pub b2: Option<f64>,
    #[arg(long)]
    pub c0: Option<f64>,
    #[arg(long)]
    pub c1: Option<f64>,
}

impl TrendOverrides {
    pub fn params(&self, q: u64) -> Result<TrendParams> {
        let base = default_params(q);
        if self.b1.is_none() && self.b2.is_none() && self.c0.is_none() && self.c1.is_none() {
            return Ok(base);
        }
        TrendParams::user(
            self.b1.unwrap_or(base.b1),
            self.b2.unwrap_or(base.b2),
            self.c0.unwrap_or(base.c0),
            self.c1.unwrap_or(base.c1),
        )
    }
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[arg(long)]
    pub q: u64,
    /// Residues: "all", a list "1,5,7", or inclusive ranges "1..20".
    #[arg(long, default_value = "all")]
    pub r: ResidueSet,
    #[arg(long, value_parser = parse_count)]
    pub x_max: u64,
    #[command(flatten)]
    pub trend: TrendOverrides,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    #[arg(long, default_value_t = 2)]
    pub q: u64,
    #[arg(long, default_value = "all")]
    pub r: ResidueSet,
    /// Smallest end prime included.
    #[arg(long, default_value = "1e7", value_parser = parse_count)]
    pub window_lo: u64,
    /// Largest end prime included; also the scan limit.
    #[arg(long, default_value = "1e9", value_parser = parse_count)]
    pub window_hi: u64,
    #[arg(long, default_value_t = 53)]
    pub bins: usize,
    /// Fit this many Gumbel draws (seeded by --seed) instead of scanned gaps.
    #[arg(long)]
    pub synthetic_n: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub synthetic_alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    pub synthetic_mu: f64,
    #[command(flatten)]
    pub trend: TrendOverrides,
}

#[derive(Debug, Clone, Args)]
pub struct CountsArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub j_max: u32,
    /// Also fit 2 - kappa / (log x + delta) to the maximal counts.
    #[arg(long)]
    pub hyperbola: bool,
}

#[derive(Debug, Clone, Args)]
pub struct BrunArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long, default_value = "1")]
    pub r: ResidueSet,
    #[arg(long)]
    pub d: u64,
    /// Checkpoints for the growth curve.
    #[arg(long, value_delimiter = ',', value_parser = parse_count, required = true)]
    pub x: Vec<u64>,
    /// Use the singular-product form of the estimate.
    #[arg(long)]
    pub full_product: bool,
}

#[derive(Debug, Clone, Args)]
pub struct MeanprodArgs {
    #[arg(long)]
    pub q: u64,
    /// Residues 0 <= r < q; need not be coprime to q.
    #[arg(long, default_value = "all")]
    pub r: ResidueSet,
    /// Also average S(r + nq) directly over n = 1..n_max.
    #[arg(long, value_parser = parse_count)]
    pub n_max: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long, value_delimiter = ',', required = true)]
    pub d: Vec<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct ProbeArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long, value_delimiter = ',', default_value = "1e6,1e9,1e12")]
    pub x: Vec<f64>,
}

/// Residues named on the command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ResidueSet {
    All,
    List(Vec<u64>),
}

impl FromStr for ResidueSet {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("all") {
            return Ok(ResidueSet::All);
        }
        let num = |t: &str| t.trim().parse::<u64>().map_err(|e| format!("bad residue {t:?}: {e}"));
        let mut out = Vec::new();
        for part in s.split(',').filter(|p| !p.trim().is_empty()) {
            if let Some((a, b)) = part.split_once("..") {
                let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
                if a > b {
                    return Err(format!("empty residue range {part:?}"));
                }
                out.extend(a..=b);
            } else {
                out.push(num(part)?);
            }
        }
        if out.is_empty() {
            return Err("no residues given".into());
        }
        out.sort_unstable();
        out.dedup();
        Ok(ResidueSet::List(out))
    }
}

impl ResidueSet {
    /// Classes coprime to q, sorted by r.
    pub fn coprime_classes(&self, q: u64) -> Result<Vec<ResidueClass>> {
        match self {
            ResidueSet::All => ResidueClass::all_coprime(q),
            ResidueSet::List(rs) => rs.iter().map(|&r| ResidueClass::new(q, r)).collect(),
        }
    }

    /// Any residues in [0, q), sorted.
    pub fn any_residues(&self, q: u64) -> Result<Vec<u64>> {
        match self {
            ResidueSet::All => Ok((0..q).collect()),
            ResidueSet::List(rs) => {
                if let Some(&r) = rs.iter().find(|&&r| r >= q) {
                    return Err(Error::InvalidClass { q, r, reason: "need 0 <= r < q" });
                }
                Ok(rs.clone())
            }
        }
    }
}

/// Accepts plain integers and scientific forms such as "1e9".
pub fn parse_count(s: &str) -> std::result::Result<u64, String> {
    let s = s.trim();
    if let Ok(v) = s.parse::<u64>() {
        return check_count(v);
    }
    let f: f64 = s.parse().map_err(|_| format!("not a number: {s:?}"))?;
    if !(f >= 0.0) || f.fract() != 0.0 || f >= 9_223_372_036_854_775_808.0 {
        return Err(format!("{s:?} is not an integer in [0, 2^63)"));
    }
    check_count(f as u64)
}

fn check_count(v: u64) -> std::result::Result<u64, String> {
    if v > i64::MAX as u64 {
        return Err(format!("{v} exceeds 2^63 - 1"));
    }
    Ok(v)
}

fn parse_threads(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("threads must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Budget { .. } => 3,
        Error::Domain(_)
        | Error::Range(_)
        | Error::InvalidClass { .. }
        | Error::NotFound(_)
        | Error::EmptySample
        | Error::InsufficientSample { .. } => 2,
        Error::Overflow(_)
        | Error::NonConvergence { .. }
        | Error::Cache(_)
        | Error::Io(_)
        | Error::Csv(_)
        | Error::Json(_) => 4,
    }
}

pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// Runs one command; returns the files written.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>> {
    let mut out = Output::new(&cli.common)?;
    let cfg = SieveConfig {
        budget: cli.common.budget,
        cache_dir: cli.common.cache_dir.clone(),
        ..SieveConfig::with_threads(cli.common.threads)
    };
    match &cli.command {
        Command::Scan(a) => cmd_scan(a, &cfg, &mut out)?,
        Command::Fit(a) => cmd_fit(a, cli.common.seed, &cfg, &mut out)?,
        Command::Counts(a) => cmd_counts(a, &cfg, &mut out)?,
        Command::Brun(a) => cmd_brun(a, &cfg, &mut out)?,
        Command::Meanprod(a) => cmd_meanprod(a, &mut out)?,
        Command::Predict(a) => cmd_predict(a, &mut out)?,
        Command::Probe(a) => cmd_probe(a, &mut out)?,
    }
    Ok(out.written)
}

struct Output {
    dir: PathBuf,
    format: Format,
    written: Vec<PathBuf>,
}

impl Output {
    fn new(common: &CommonArgs) -> Result<Self> {
        fs::create_dir_all(&common.output_dir)?;
        Ok(Self { dir: common.output_dir.clone(), format: common.format, written: Vec::new() })
    }

    fn create(&mut self, name: &str) -> Result<BufWriter<File>> {
        let path = self.dir.join(name);
        let file = File::create(&path)?;
        self.written.push(path);
        Ok(BufWriter::new(file))
    }

    fn table(&mut self, stem: &str, table: &Table) -> Result<()> {
        let format = self.format;
        let mut w = self.create(&format!("{stem}.{}", format.ext()))?;
        match format {
            Format::Csv => table.write_csv(&mut w)?,
            Format::Json => export::write_json(&mut w, table)?,
        }
        w.flush()?;
        Ok(())
    }

    fn json<T: Serialize>(&mut self, stem: &str, value: &T) -> Result<()> {
        let mut w = self.create(&format!("{stem}.json"))?;
        export::write_json(&mut w, value)?;
        w.flush()?;
        Ok(())
    }

    fn events(&mut self, stem: &str, results: &[&ScanResult]) -> Result<()> {
        let records = event_records(results.iter().copied());
        let format = self.format;
        let mut w = self.create(&format!("{stem}.{}", format.ext()))?;
        match format {
            Format::Csv => export::write_events_csv(&mut w, &records)?,
            Format::Json => export::write_json(&mut w, &records)?,
        }
        w.flush()?;
        Ok(())
    }
}

fn cmd_scan(a: &ScanArgs, cfg: &SieveConfig, out: &mut Output) -> Result<()> {
    let classes = a.r.coprime_classes(a.q)?;
    let params = a.trend.params(a.q)?;
    let results = scan_classes(&classes, a.x_max, cfg)?;
    for res in &results {
        out.events(&format!("events_q{}_r{}", a.q, res.cls.r()), &[res])?;
    }
    let all: Vec<&ScanResult> = results.iter().collect();
    out.events(&format!("events_q{}", a.q), &all)?;

    let trend = Trend::new(a.q, params)?;
    let phi = totient(a.q) as f64;
    let mut ends: Vec<u64> = results
        .iter()
        .flat_map(|r| r.events.iter().map(|e| e.end_prime))
        .filter(|&p| p > 2)
        .collect();
    ends.sort_unstable();
    ends.dedup();
    let mut curves = Table::new(&["x", "baseline", "first_occurrence", "phi_log2"]);
    for &p in &ends {
        let x = p as f64;
        // Below the point where li x exceeds a(q, x) the trends are undefined.
        let pt = match trend.point(x) {
            Ok(pt) => pt,
            Err(Error::Domain(_)) => continue,
            Err(e) => return Err(e),
        };
        let l = x.ln();
        curves.push(vec![Cell::U(p), Cell::F(pt.baseline), Cell::F(pt.first_occurrence), Cell::F(phi * l * l)]);
    }
    out.table(&format!("trend_q{}", a.q), &curves)?;

    let n_events: usize = results.iter().map(|r| r.events.len()).sum();
    let n_max: u64 = results.iter().map(|r| r.n_maximal).sum();
    println!(
        "q={} classes={} x_max={} events={} maximal={}",
        a.q,
        results.len(),
        a.x_max,
        n_events,
        n_max
    );
    Ok(())
}

/// Fit report; keys are part of the output contract.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub alpha: f64,
    pub mu: f64,
    pub ks_all: f64,
    pub ks_maximal_only: Option<f64>,
    pub gev_shape: Option<f64>,
    pub n_samples: usize,
    pub window: Option<[u64; 2]>,
}

/// Rescaled sizes of every first-occurrence event, and of the maximal ones,
/// whose end prime lies in [lo, hi].
pub fn rescaled_window(results: &[ScanResult], trend: &Trend, lo: u64, hi: u64) -> Result<(Vec<f64>, Vec<f64>)> {
    let (mut all, mut maximal) = (Vec::new(), Vec::new());
    for res in results {
        for e in res.events.iter().filter(|e| e.end_prime >= lo && e.end_prime <= hi) {
            let u = trend.rescale(e.size as f64, e.end_prime as f64)?;
            all.push(u);
            if e.is_maximal {
                maximal.push(u);
            }
        }
    }
    Ok((all, maximal))
}

fn cmd_fit(a: &FitArgs, seed: u64, cfg: &SieveConfig, out: &mut Output) -> Result<()> {
    let (samples, maximal, window) = match a.synthetic_n {
        Some(n) => {
            let dist = Gumbel::new(a.synthetic_alpha, a.synthetic_mu)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let xs: Vec<f64> = (0..n).map(|_| dist.quantile(rng.gen_range(f64::EPSILON..1.0))).collect();
            (xs, Vec::new(), None)
        }
        None => {
            if a.window_lo < 3 || a.window_lo > a.window_hi {
                return Err(Error::Domain(format!(
                    "need 3 <= window lo <= window hi, got [{}, {}]",
                    a.window_lo, a.window_hi
                )));
            }
            let classes = a.r.coprime_classes(a.q)?;
            let trend = Trend::new(a.q, a.trend.params(a.q)?)?;
            let results = scan_classes(&classes, a.window_hi, cfg)?;
            let (all, maximal) = rescaled_window(&results, &trend, a.window_lo, a.window_hi)?;
            (all, maximal, Some([a.window_lo, a.window_hi]))
        }
    };
    let fit = fit_gumbel(&samples)?;
    let ks_maximal_only = if maximal.len() >= 10 { Some(fit_gumbel(&maximal)?.ks) } else { None };
    let gev_shape = if samples.len() >= 50 {
        match fit_gev(&samples) {
            Ok(g) => Some(g.shape),
            Err(Error::NonConvergence { .. }) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let report = FitReport {
        alpha: fit.scale,
        mu: fit.mode,
        ks_all: fit.ks,
        ks_maximal_only,
        gev_shape,
        n_samples: samples.len(),
        window,
    };
    out.json(&format!("fit_q{}", a.q), &report)?;

    let hist = build_histogram(&samples, a.bins)?;
    let mut t = Table::new(&["bin_lo", "bin_hi", "count", "density"]);
    for i in 0..hist.counts.len() {
        t.push(vec![
            Cell::F(hist.bin_edges[i]),
            Cell::F(hist.bin_edges[i + 1]),
            Cell::U(hist.counts[i]),
            Cell::F(hist.density(i)),
        ]);
    }
    out.table(&format!("hist_q{}", a.q), &t)?;

    let dist = fit.distribution();
    let (lo, hi) = (hist.bin_edges[0], hist.bin_edges[hist.counts.len()]);
    let mut pdf = Table::new(&["x", "pdf"]);
    for i in 0..200 {
        let x = lo + (hi - lo) * i as f64 / 199.0;
        pdf.push(vec![Cell::F(x), Cell::F(dist.pdf(x))]);
    }
    out.table(&format!("pdf_q{}", a.q), &pdf)?;

    println!(
        "q={} n={} alpha={} mu={} ks_all={}",
        a.q,
        report.n_samples,
        export::fmt_sig(report.alpha, 6),
        export::fmt_sig(report.mu, 6),
        export::fmt_sig(report.ks_all, 6)
    );
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HyperbolaFit {
    pub kappa: f64,
    pub delta: f64,
    pub points_used: usize,
}

/// Least-squares fit of y = 2 - kappa / (t + delta) through the linearization
/// 1 / (2 - y) = t / kappa + delta / kappa, using only points with y < 2.
pub fn fit_hyperbola(points: &[(f64, f64)]) -> Option<HyperbolaFit> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(_, y)| y < 2.0)
        .map(|&(t, y)| (t, 1.0 / (2.0 - y)))
        .collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return None;
    }
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mz = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let stt: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let stz: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - mz)).sum();
    if stt == 0.0 || stz == 0.0 {
        return None;
    }
    let slope = stz / stt;
    let intercept = mz - slope * mt;
    Some(HyperbolaFit { kappa: 1.0 / slope, delta: intercept / slope, points_used: pts.len() })
}

fn cmd_counts(a: &CountsArgs, cfg: &SieveConfig, out: &mut Output) -> Result<()> {
    let counts = interval_counts(a.q, a.j_max, cfg)?;
    let mut t = Table::new(&["j", "mean_fo_count", "mean_max_count"]);
    for c in &counts {
        t.push(vec![Cell::U(c.j as u64), Cell::F(c.mean_first_occurrence), Cell::F(c.mean_maximal)]);
    }
    out.table(&format!("counts_q{}", a.q), &t)?;
    if a.hyperbola {
        // log x at the middle of bucket j is j + 1/2
        let pts: Vec<(f64, f64)> = counts.iter().map(|c| (c.j as f64 + 0.5, c.mean_maximal)).collect();
        out.json(&format!("counts_fit_q{}", a.q), &fit_hyperbola(&pts))?;
    }
    for c in &counts {
        println!("j={} fo={} max={}", c.j, export::fmt_sig(c.mean_first_occurrence, 6), export::fmt_sig(c.mean_maximal, 6));
    }
    Ok(())
}

fn cmd_brun(a: &BrunArgs, cfg: &SieveConfig, out: &mut Output) -> Result<()> {
    if a.q < 2 {
        return Err(Error::Domain("q must be at least 2".into()));
    }
    for r in a.r.any_residues(a.q)? {
        // A class sharing a factor with q holds at most one prime, so its sum is 0.
        let cls = ResidueClass::relaxed(a.q, r);
        let curve = brun::brun_growth(a.d, cls, &a.x, cfg)?;
        let mut t = Table::new(&["x", "partial_sum", "estimate"]);
        for p in &curve {
            let estimate = if a.full_product && p.x > 1 {
                brun::brun_estimate(a.d, a.q, Some(p.x as f64), EstimateForm::FullProduct)?
            } else {
                p.estimate
            };
            t.push(vec![Cell::U(p.x), Cell::F(p.sum.partial_sum), Cell::F(estimate)]);
        }
        out.table(&format!("brun_q{}_r{}_d{}", a.q, r, a.d), &t)?;
        if let Some(last) = curve.last() {
            println!(
                "q={} r={} d={} x={} partial_sum={} pairs={}",
                a.q,
                r,
                a.d,
                last.x,
                export::fmt_sig(last.sum.partial_sum, 10),
                last.sum.pair_count
            );
        }
    }
    Ok(())
}

fn cmd_meanprod(a: &MeanprodArgs, out: &mut Output) -> Result<()> {
    let mut columns = vec!["q", "r", "multiplier", "value"];
    if a.n_max.is_some() {
        columns.push("empirical");
    }
    let mut t = Table::new(&columns);
    for r in a.r.any_residues(a.q)? {
        let m = brun::mean_singular_product(a.q, r)?;
        let mut row = vec![Cell::U(a.q), Cell::U(r), Cell::S(m.multiplier.to_string()), Cell::F(m.value)];
        let mut line = format!("q={} r={} multiplier={} value={}", a.q, r, m.multiplier, export::fmt_sig(m.value, 10));
        if let Some(n) = a.n_max {
            let e = brun::empirical_singular_mean(a.q, r, n)?;
            row.push(Cell::F(e));
            line.push_str(&format!(" empirical={}", export::fmt_sig(e, 10)));
        }
        t.push(row);
        println!("{line}");
    }
    out.table(&format!("meanprod_q{}", a.q), &t)
}

fn cmd_predict(a: &PredictArgs, out: &mut Output) -> Result<()> {
    if a.q < 1 {
        return Err(Error::Domain("q must be positive".into()));
    }
    let bounds = PredictorBounds::default();
    let mut t = Table::new(&["d", "predicted", "ln_predicted", "lower", "upper"]);
    for &d in &a.d {
        if d == 0 {
            return Err(Error::Domain("gap size must be positive".into()));
        }
        let p = trend::predict_first_occurrence(d, a.q);
        let (lo, hi) = bounds.interval(d, a.q);
        t.push(vec![
            Cell::U(d),
            Cell::F(p),
            Cell::F(trend::ln_predict_first_occurrence(d as f64, a.q)),
            Cell::F(lo),
            Cell::F(hi),
        ]);
        println!("q={} d={} predicted={}", a.q, d, export::fmt_sig(p, 10));
    }
    out.table(&format!("predict_q{}", a.q), &t)
}

fn cmd_probe(a: &ProbeArgs, out: &mut Output) -> Result<()> {
    let ratios = trend::inverse_limit_probe(a.q, &a.x)?;
    let limit = trend::inverse_limit();
    let mut t = Table::new(&["x", "ratio", "limit"]);
    for (&x, &r) in a.x.iter().zip(&ratios) {
        t.push(vec![Cell::F(x), Cell::F(r), Cell::F(limit)]);
        println!("q={} x={} ratio={}", a.q, export::fmt_sig(x, 10), export::fmt_sig(r, 10));
    }
    out.table(&format!("probe_q{}", a.q), &t)
}

/// Parses `args` (without the program name) and runs them, for embedding and tests.
pub fn run_args<I, T>(args: I) -> Result<Vec<PathBuf>>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv = std::iter::once(OsString::from("apgaps")).chain(args.into_iter().map(Into::into));
    let cli = Cli::try_parse_from(argv).map_err(|e| Error::Domain(e.to_string()))?;
    run(&cli)
}

pub fn output_path(dir: &Path, stem: &str, format: Format) -> PathBuf {
    dir.join(format!("{stem}.{}", format.ext()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residue_sets() {
        assert_eq!("all".parse::<ResidueSet>().unwrap(), ResidueSet::All);
        assert_eq!("1..4,7,3".parse::<ResidueSet>().unwrap(), ResidueSet::List(vec![1, 2, 3, 4, 7]));
        assert_eq!("2..=3".parse::<ResidueSet>().unwrap(), ResidueSet::List(vec![2, 3]));
        assert!("5..2".parse::<ResidueSet>().is_err());
        assert!("x".parse::<ResidueSet>().is_err());
        let classes = "1..20".parse::<ResidueSet>().unwrap().coprime_classes(211).unwrap();
        assert_eq!(classes.len(), 20);
        assert!(ResidueSet::List(vec![2]).coprime_classes(4).is_err());
    }

    #[test]
    fn counts_parse() {
        assert_eq!(parse_count("1e9"), Ok(1_000_000_000));
        assert_eq!(parse_count("50"), Ok(50));
        assert_eq!(parse_count("9223372036854775807"), Ok(i64::MAX as u64));
        assert!(parse_count("9223372036854775808").is_err());
        assert!(parse_count("1.5").is_err());
        assert!(parse_count("-1").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Budget { requested: 2, budget: 1 }), 3);
        assert_eq!(exit_code(&Error::InvalidClass { q: 4, r: 2, reason: "" }), 2);
        assert_eq!(exit_code(&Error::Overflow("x")), 4);
    }

    #[test]
    fn hyperbola_recovers_parameters() {
        let pts: Vec<(f64, f64)> = (1..12).map(|t| (t as f64, 2.0 - 3.0 / (t as f64 + 1.5))).collect();
        let fit = fit_hyperbola(&pts).unwrap();
        assert!((fit.kappa - 3.0).abs() < 1e-9 && (fit.delta - 1.5).abs() < 1e-9);
        assert!(fit_hyperbola(&[(1.0, 2.5)]).is_none());
    }
}
