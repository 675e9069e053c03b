//! On-disk cache of sieved segments.
//!
//! Layout: six little-endian u64 header words (magic, version, q, lo, hi, count),
//! followed by `count` LEB128 varints. The first varint is `p0 - lo`, each later
//! one is the gap to the previous prime. A segment keyed by q holds the primes
//! in [lo, hi] that do not divide q.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

pub const MAGIC: u64 = u64::from_le_bytes(*b"APGSIEVE");
pub const VERSION: u64 = 1;
const HEADER_LEN: usize = 48;

#[derive(Debug, Clone)]
pub struct SegmentCache {
    dir: PathBuf,
}

impl SegmentCache {
    pub fn new(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir)?;
        Ok(Self { dir })
    }

    pub fn path_for(&self, q: u64, lo: u64, hi: u64) -> PathBuf {
        self.dir.join(format!("q{q}_{lo}_{hi}.apgc"))
    }

    pub fn load(&self, q: u64, lo: u64, hi: u64) -> Result<Option<Vec<u64>>> {
        let path = self.path_for(q, lo, hi);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        decode(&bytes, q, lo, hi).map(Some)
    }

    pub fn store(&self, q: u64, lo: u64, hi: u64, primes: &[u64]) -> Result<()> {
        let path = self.path_for(q, lo, hi);
        // Write-then-rename so a concurrent reader never sees a partial file.
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        {
            let mut w = BufWriter::new(fs::File::create(&tmp)?);
            w.write_all(&encode(q, lo, hi, primes))?;
            w.flush()?;
        }
        fs::rename(&tmp, &path)?;
        Ok(())
    }
}

fn put_varint(out: &mut Vec<u8>, mut v: u64) {
    while v >= 0x80 {
        out.push((v as u8) | 0x80);
        v >>= 7;
    }
    out.push(v as u8);
}

fn get_varint(bytes: &[u8], pos: &mut usize) -> Result<u64> {
    let mut v = 0u64;
    let mut shift = 0;
    loop {
        let b = *bytes.get(*pos).ok_or_else(|| Error::Cache("truncated varint".into()))?;
        *pos += 1;
        if shift >= 64 {
            return Err(Error::Cache("varint too long".into()));
        }
        v |= ((b & 0x7f) as u64) << shift;
        if b & 0x80 == 0 {
            return Ok(v);
        }
        shift += 7;
    }
}

pub fn encode(q: u64, lo: u64, hi: u64, primes: &[u64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + primes.len() * 2);
    for word in [MAGIC, VERSION, q, lo, hi, primes.len() as u64] {
        out.extend_from_slice(&word.to_le_bytes());
    }
    let mut prev = lo;
    for &p in primes {
        put_varint(&mut out, p - prev);
        prev = p;
    }
    out
}

pub fn decode(bytes: &[u8], q: u64, lo: u64, hi: u64) -> Result<Vec<u64>> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Cache("short header".into()));
    }
    let word = |i: usize| u64::from_le_bytes(bytes[8 * i..8 * i + 8].try_into().unwrap());
    if word(0) != MAGIC {
        return Err(Error::Cache("bad magic".into()));
    }
    if word(1) != VERSION {
        return Err(Error::Cache(format!("unsupported version {}", word(1))));
    }
    if (word(2), word(3), word(4)) != (q, lo, hi) {
        return Err(Error::Cache("key mismatch".into()));
    }
    let count = word(5) as usize;
    let mut pos = HEADER_LEN;
    let mut out = Vec::with_capacity(count);
    let mut prev = lo;
    for _ in 0..count {
        prev = prev
            .checked_add(get_varint(bytes, &mut pos)?)
            .ok_or_else(|| Error::Cache("delta overflow".into()))?;
        if prev > hi {
            return Err(Error::Cache("prime beyond segment".into()));
        }
        out.push(prev);
    }
    if pos != bytes.len() {
        return Err(Error::Cache("trailing bytes".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sieve::{primes_in_class_with, ResidueClass, SieveConfig};
    use proptest::prelude::*;

    #[test]
    fn header_layout() {
        let bytes = encode(6, 100, 200, &[101, 103, 107]);
        assert_eq!(&bytes[0..8], b"APGSIEVE");
        assert_eq!(u64::from_le_bytes(bytes[8..16].try_into().unwrap()), VERSION);
        assert_eq!(u64::from_le_bytes(bytes[40..48].try_into().unwrap()), 3);
        assert_eq!(&bytes[48..], &[1, 2, 4]);
    }

    #[test]
    fn rejects_corruption() {
        let good = encode(6, 100, 200, &[101, 103, 107]);
        assert!(decode(&good[..good.len() - 1], 6, 100, 200).is_err());
        assert!(decode(&good, 6, 100, 201).is_err());
        let mut bad = good.clone();
        bad[0] ^= 1;
        assert!(decode(&bad, 6, 100, 200).is_err());
    }

    #[test]
    fn cached_results_identical() {
        let dir = tempfile::tempdir().unwrap();
        let plain = SieveConfig { segment_len: 4096, ..SieveConfig::default() };
        let cached = SieveConfig { cache_dir: Some(dir.path().to_path_buf()), ..plain.clone() };
        let c = ResidueClass::new(30, 7).unwrap();
        let expect = primes_in_class_with(c, 1, 100_000, &plain).unwrap();
        // First pass populates, second pass reads back.
        assert_eq!(primes_in_class_with(c, 1, 100_000, &cached).unwrap(), expect);
        assert!(std::fs::read_dir(dir.path()).unwrap().count() > 10);
        assert_eq!(primes_in_class_with(c, 1, 100_000, &cached).unwrap(), expect);
    }

    proptest! {
        #[test]
        fn encode_decode(mut v in proptest::collection::vec(0u64..1 << 40, 0..200), lo in 0u64..1000) {
            v.sort_unstable();
            v.dedup();
            let primes: Vec<u64> = v.iter().map(|x| x + lo).collect();
            let hi = primes.last().copied().unwrap_or(lo);
            let bytes = encode(7, lo, hi, &primes);
            prop_assert_eq!(decode(&bytes, 7, lo, hi).unwrap(), primes);
        }
    }
}
