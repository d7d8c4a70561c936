//! Shared binary layout for grid snapshots and CSV helpers.
//!
//! Binary layout (all integers and floats little-endian):
//!
//! | bytes | content |
//! |---|---|
//! | 8 | magic `QLBEGRID` |
//! | 4 | format version (1), u32 |
//! | 4 | rank r (2 or 3), u32 |
//! | 4 | complex flag (0 real, 1 complex), u32 |
//! | 4 | reserved, zero |
//! | 8·r | axis lengths, u64 |
//! | 16·r | axis ranges (min, max), f64 |
//! | 8 | time stamp, f64 |
//! | 24 | coherence vector K, f64 × 3 (zero for real fields) |
//! | 8·N or 16·N | values, row-major with the first axis slowest; complex values as (re, im) |

use std::io::{Read, Write};

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"QLBEGRID";
pub const VERSION: u32 = 1;

/// Refuse to allocate more than this many values when decoding.
pub const MAX_DECODED_VALUES: usize = 1 << 28;

/// Decoded contents of a grid file.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFile {
    pub dims: Vec<usize>,
    pub ranges: Vec<(f64, f64)>,
    pub time: f64,
    pub k: [f64; 3],
    pub complex: bool,
    /// Real values, or interleaved (re, im) pairs when `complex`.
    pub values: Vec<f64>,
}

impl GridFile {
    pub fn value_count(&self) -> usize {
        self.dims.iter().product::<usize>() * if self.complex { 2 } else { 1 }
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(80 + 8 * self.values.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(self.dims.len() as u32).to_le_bytes());
        out.extend_from_slice(&(self.complex as u32).to_le_bytes());
        out.extend_from_slice(&0u32.to_le_bytes());
        for &d in &self.dims {
            out.extend_from_slice(&(d as u64).to_le_bytes());
        }
        for &(lo, hi) in &self.ranges {
            out.extend_from_slice(&lo.to_le_bytes());
            out.extend_from_slice(&hi.to_le_bytes());
        }
        out.extend_from_slice(&self.time.to_le_bytes());
        for k in self.k {
            out.extend_from_slice(&k.to_le_bytes());
        }
        for v in &self.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        w.write_all(&self.encode())?;
        Ok(())
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let mut buf = Vec::new();
        r.read_to_end(&mut buf)?;
        GridFile::decode(&buf)
    }

    /// Parse and validate a grid file. Never panics on malformed input.
    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let mut cur = Cursor { bytes, pos: 0 };
        if cur.take(8)? != MAGIC {
            return Err(Error::Decode("bad magic".into()));
        }
        let version = cur.u32()?;
        if version != VERSION {
            return Err(Error::Decode(format!("unsupported version {version}")));
        }
        let rank = cur.u32()? as usize;
        if !(2..=3).contains(&rank) {
            return Err(Error::Decode(format!("unsupported rank {rank}")));
        }
        let complex = match cur.u32()? {
            0 => false,
            1 => true,
            other => return Err(Error::Decode(format!("bad complex flag {other}"))),
        };
        if cur.u32()? != 0 {
            return Err(Error::Decode("reserved header field is not zero".into()));
        }
        let mut dims = Vec::with_capacity(rank);
        let mut count: usize = if complex { 2 } else { 1 };
        for _ in 0..rank {
            let d = cur.u64()?;
            if d == 0 {
                return Err(Error::Decode("zero axis length".into()));
            }
            let d = usize::try_from(d).map_err(|_| Error::Decode("axis length overflows".into()))?;
            count = count
                .checked_mul(d)
                .filter(|&c| c <= MAX_DECODED_VALUES)
                .ok_or_else(|| Error::Decode("grid too large".into()))?;
            dims.push(d);
        }
        let mut ranges = Vec::with_capacity(rank);
        for _ in 0..rank {
            let lo = cur.f64()?;
            let hi = cur.f64()?;
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::Decode(format!("bad axis range [{lo}, {hi}]")));
            }
            ranges.push((lo, hi));
        }
        let time = cur.f64()?;
        let k = [cur.f64()?, cur.f64()?, cur.f64()?];
        if !time.is_finite() || k.iter().any(|v| !v.is_finite()) {
            return Err(Error::Decode("non-finite time or coherence vector".into()));
        }
        let remaining = bytes.len() - cur.pos;
        if remaining != 8 * count {
            return Err(Error::Decode(format!(
                "expected {} value bytes, found {remaining}",
                8 * count
            )));
        }
        let values = bytes[cur.pos..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
            .collect();
        Ok(GridFile {
            dims,
            ranges,
            time,
            k,
            complex,
            values,
        })
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::Decode("truncated header".into()))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}

/// Format a float for CSV output with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Write a CSV table with a header row.
pub fn write_csv(mut w: impl Write, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        let line: Vec<String> = row.into_iter().map(fmt_f64).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(complex: bool) -> GridFile {
        let dims = vec![2, 3];
        let n = 6 * if complex { 2 } else { 1 };
        GridFile {
            dims,
            ranges: vec![(-1.0, 1.0), (0.0, 3.0)],
            time: 0.5,
            k: [0.0, 0.1, 0.0],
            complex,
            values: (0..n).map(|i| i as f64 * 0.25).collect(),
        }
    }

    #[test]
    fn round_trip() {
        for complex in [false, true] {
            let g = sample(complex);
            let bytes = g.encode();
            assert_eq!(GridFile::decode(&bytes).unwrap(), g);
        }
    }

    #[test]
    fn rejects_truncation_and_garbage() {
        let bytes = sample(true).encode();
        for cut in [0, 7, 20, 40, bytes.len() - 1] {
            assert!(GridFile::decode(&bytes[..cut]).is_err());
        }
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(GridFile::decode(&extra).is_err());
        let mut bad = bytes;
        bad[0] = b'X';
        assert!(GridFile::decode(&bad).is_err());
    }

    #[test]
    fn huge_dimensions_rejected_without_allocating() {
        let mut g = sample(false).encode();
        // first axis length
        g[24..32].copy_from_slice(&u64::MAX.to_le_bytes());
        assert!(GridFile::decode(&g).is_err());
    }

    #[test]
    fn csv_uses_seventeen_digits() {
        let mut out = Vec::new();
        write_csv(&mut out, &["a", "b"], vec![vec![0.1, 1.0 / 3.0]]).unwrap();
        let s = String::from_utf8(out).unwrap();
        let row = s.lines().nth(1).unwrap();
        let parsed: Vec<f64> = row.split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(parsed, vec![0.1, 1.0 / 3.0]);
        assert!(row.starts_with("1.0000000000000001e-1"));
    }
}
