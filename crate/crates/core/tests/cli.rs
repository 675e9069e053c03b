use std::path::Path;
use std::process::{Command, Output};

use apgaps::export::{read_events_csv, round_sig, CSV_DIGITS};
use apgaps::gapscan::interval_counts;
use apgaps::{scan_classes, ResidueClass, SieveConfig};

fn apgaps(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_apgaps"))
        .arg("--output-dir")
        .arg(dir)
        .args(args)
        .output()
        .expect("run apgaps")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn scan_small_class_writes_two_events() {
    let dir = tempfile::tempdir().unwrap();
    let out = apgaps(dir.path(), &["scan", "--q", "6", "--r", "5", "--x-max", "50"]);
    assert!(out.status.success());
    let text = read(dir.path(), "events_q6_r5.csv");
    assert_eq!(
        text,
        "q,r,kind,n,start_prime,end_prime,size,csg\n\
         6,5,maximal,1,5,11,6,0.5217480465\n\
         6,5,maximal,2,29,41,12,0.4350784149\n"
    );
    assert_eq!(read(dir.path(), "events_q6.csv"), text);
    assert!(read(dir.path(), "trend_q6.csv").starts_with("x,baseline,first_occurrence,phi_log2\n"));
}

#[test]
fn scan_files_match_library_q211() {
    let dir = tempfile::tempdir().unwrap();
    let out = apgaps(dir.path(), &["scan", "--q", "211", "--r", "1..20", "--x-max", "1e9"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let classes: Vec<_> = (1..=20).map(|r| ResidueClass::new(211, r).unwrap()).collect();
    let results = scan_classes(&classes, 1_000_000_000, &SieveConfig::default()).unwrap();
    let merged = read_events_csv(std::fs::File::open(dir.path().join("events_q211.csv")).unwrap()).unwrap();
    let mut i = 0;
    for res in &results {
        let per_r = read_events_csv(std::fs::File::open(dir.path().join(format!("events_q211_r{}.csv", res.cls.r()))).unwrap()).unwrap();
        assert_eq!(per_r.len(), res.events.len());
        for (rec, e) in per_r.iter().zip(&res.events) {
            assert_eq!((rec.start_prime, rec.end_prime, rec.size), (e.start_prime, e.end_prime, e.size));
            assert_eq!(rec.kind, e.kind().as_str());
            assert_eq!(Some(rec.n), e.fo_index);
            assert_eq!(rec.csg, round_sig(e.csg, CSV_DIGITS));
            assert_eq!(&merged[i], rec);
            i += 1;
        }
    }
    assert_eq!(i, merged.len());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad_class = apgaps(dir.path(), &["scan", "--q", "4", "--r", "2", "--x-max", "100"]);
    assert_eq!(bad_class.status.code(), Some(2));
    let over = apgaps(dir.path(), &["--budget", "1000", "scan", "--q", "2", "--x-max", "1e6"]);
    assert_eq!(over.status.code(), Some(3));
    let counts_over = apgaps(dir.path(), &["--budget", "1e4", "counts", "--q", "6", "--j-max", "10"]);
    assert_eq!(counts_over.status.code(), Some(3));
    let too_big = apgaps(dir.path(), &["scan", "--q", "2", "--x-max", "1e19"]);
    assert_eq!(too_big.status.code(), Some(2));
    let unknown = apgaps(dir.path(), &["frobnicate"]);
    assert_eq!(unknown.status.code(), Some(2));
    let zero_threads = apgaps(dir.path(), &["--threads", "0", "probe", "--q", "2"]);
    assert_eq!(zero_threads.status.code(), Some(2));
}

#[test]
fn fit_needs_ten_events() {
    let dir = tempfile::tempdir().unwrap();
    // only the gaps 2, 4 and 6 first occur with end prime <= 30
    let out = apgaps(dir.path(), &["fit", "--q", "2", "--window-lo", "3", "--window-hi", "30"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("insufficient sample"));
}

#[test]
fn fit_synthetic_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = apgaps(dir.path(), &["--seed", "7", "fit", "--synthetic-n", "20000"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&read(dir.path(), "fit_q2.json")).unwrap();
    let keys: Vec<&str> = report.as_object().unwrap().keys().map(|k| k.as_str()).collect();
    for k in ["alpha", "mu", "ks_all", "ks_maximal_only", "gev_shape", "n_samples", "window"] {
        assert!(keys.contains(&k), "{k}");
    }
    assert!((report["alpha"].as_f64().unwrap() - 1.0).abs() < 0.03);
    assert_eq!(report["n_samples"], 20000);
    let hist = read(dir.path(), "hist_q2.csv");
    assert!(hist.starts_with("bin_lo,bin_hi,count,density\n"));
    assert_eq!(hist.lines().count(), 54);
    assert!(read(dir.path(), "pdf_q2.csv").starts_with("x,pdf\n"));
}

#[test]
fn counts_table_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let out = apgaps(dir.path(), &["counts", "--q", "6", "--j-max", "10", "--hyperbola"]);
    assert!(out.status.success());
    let text = read(dir.path(), "counts_q6.csv");
    let lib = interval_counts(6, 10, &SieveConfig::default()).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "j,mean_fo_count,mean_max_count");
    assert_eq!(lines.len(), 11);
    for (line, c) in lines[1..].iter().zip(&lib) {
        let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(v, vec![c.j as f64, round_sig(c.mean_first_occurrence, 10), round_sig(c.mean_maximal, 10)]);
        assert!(c.mean_maximal <= 2.5);
    }
    // (e^10, e^11] holds four maximal gaps of 1 mod 6 and one of 5 mod 6
    assert_eq!(lib[9].mean_maximal, 2.5);
    assert!(dir.path().join("counts_fit_q6.json").exists());
}

#[test]
fn thin_wrappers() {
    let dir = tempfile::tempdir().unwrap();
    let out = apgaps(dir.path(), &["meanprod", "--q", "30", "--r", "3"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("multiplier=45/32"));
    assert!(read(dir.path(), "meanprod_q30.csv").contains("30,3,45/32,"));

    let out = apgaps(dir.path(), &["predict", "--q", "2", "--d", "100"]);
    assert!(out.status.success());
    let row = read(dir.path(), "predict_q2.csv");
    let predicted: f64 = row.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert_eq!(predicted, round_sig(10.0 * 10f64.exp(), 10));

    let out = apgaps(dir.path(), &["probe", "--q", "2", "--x", "1e6,1e9,1e12"]);
    assert!(out.status.success());
    let ratios: Vec<f64> = read(dir.path(), "probe_q2.csv")
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(ratios.windows(2).all(|w| w[0] < w[1] && w[1] < 0.60653));

    let out = apgaps(dir.path(), &["brun", "--q", "2", "--r", "1", "--d", "2", "--x", "13,1e5"]);
    assert!(out.status.success());
    let brun = read(dir.path(), "brun_q2_r1_d2.csv");
    assert!(brun.starts_with("x,partial_sum,estimate\n13,1.044022644,"));

    // gcd(q, r) > 1 is allowed for Brun sums and gives an empty sum
    let out = apgaps(dir.path(), &["brun", "--q", "6", "--r", "3", "--d", "6", "--x", "1000"]);
    assert!(out.status.success());
    assert!(read(dir.path(), "brun_q6_r3_d6.csv").contains("\n1000,0,"));
}

#[test]
fn json_format_round_trips_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let out = apgaps(dir.path(), &["--format", "json", "scan", "--q", "6", "--r", "1,5", "--x-max", "1e5"]);
    assert!(out.status.success());
    let recs: Vec<apgaps::export::EventRecord> = serde_json::from_str(&read(dir.path(), "events_q6.json")).unwrap();
    let lib = scan_classes(&ResidueClass::all_coprime(6).unwrap(), 100_000, &SieveConfig::default()).unwrap();
    let want = apgaps::export::event_records(lib.iter());
    assert_eq!(recs, want);
}
