//! Row-per-sample data matrix and its on-disk formats.
//!
//! Two formats are supported: headerless CSV (one sample per line) and a
//! little-endian binary layout:
//!
//! ```text
//! b"SPMEAN01" | n: u64 | d: u64 | n*d f64 values, row-major
//! ```

use std::io::{BufRead, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const BINARY_MAGIC: &[u8; 8] = b"SPMEAN01";

/// An `n x d` sample set stored row-major. Every entry is finite.
#[derive(Clone, Debug, PartialEq)]
pub struct DataMatrix {
    n: usize,
    d: usize,
    values: Vec<f64>,
}

impl DataMatrix {
    pub fn new(n: usize, d: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::Input(format!("empty data matrix ({n} x {d})")));
        }
        if values.len() != n * d {
            return Err(Error::Input(format!(
                "expected {} values for a {n} x {d} matrix, got {}",
                n * d,
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Input(format!("non-finite entry at row {}, column {}", pos / d, pos % d)));
        }
        Ok(Self { n, d, values })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::Input("rows have differing lengths".into()));
        }
        Self::new(rows.len(), d, rows.concat())
    }

    /// `n` copies of `row`.
    pub fn constant(n: usize, row: &[f64]) -> Result<Self> {
        let mut values = Vec::with_capacity(n * row.len());
        for _ in 0..n {
            values.extend_from_slice(row);
        }
        Self::new(n, row.len(), values)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.d)
    }

    /// Builds a new matrix from the given row indices, in order.
    pub fn select_rows(&self, idx: &[usize]) -> Result<Self> {
        let mut values = Vec::with_capacity(idx.len() * self.d);
        for &i in idx {
            values.extend_from_slice(self.row(i));
        }
        Self::new(idx.len(), self.d, values)
    }

    /// Applies `f` to every row in place. Used by generators and tests;
    /// callers must keep entries finite.
    pub(crate) fn rows_mut(&mut self) -> impl Iterator<Item = &mut [f64]> {
        self.values.chunks_exact_mut(self.d)
    }

    /// Returns a copy with `shift` added to every row.
    pub fn shifted(&self, shift: &[f64]) -> Result<Self> {
        check_dim(shift.len(), self.d)?;
        let mut out = self.clone();
        for row in out.rows_mut() {
            for (x, s) in row.iter_mut().zip(shift) {
                *x += s;
            }
        }
        Self::new(out.n, out.d, out.values)
    }

    /// Returns a copy with every entry multiplied by `scale`.
    pub fn scaled(&self, scale: f64) -> Result<Self> {
        Self::new(self.n, self.d, self.values.iter().map(|v| v * scale).collect())
    }

    /// Plain (unweighted) sample mean.
    pub fn mean(&self) -> Vec<f64> {
        let anchor = self.row(0);
        let mut acc = vec![0.0; self.d];
        for row in self.rows() {
            for ((a, x), c) in acc.iter_mut().zip(row).zip(anchor) {
                *a += x - c;
            }
        }
        let n = self.n as f64;
        acc.iter().zip(anchor).map(|(a, c)| c + a / n).collect()
    }

    pub fn read_csv<R: BufRead>(reader: R) -> Result<Self> {
        let mut values = Vec::new();
        let mut d = None;
        let mut n = 0;
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let before = values.len();
            for field in line.split(',') {
                let v: f64 = field
                    .trim()
                    .parse()
                    .map_err(|_| Error::Input(format!("line {}: cannot parse {:?} as a number", lineno + 1, field)))?;
                values.push(v);
            }
            let width = values.len() - before;
            match d {
                None => d = Some(width),
                Some(d) if d != width => {
                    return Err(Error::Input(format!("line {}: expected {d} fields, found {width}", lineno + 1)))
                }
                _ => {}
            }
            n += 1;
        }
        Self::new(n, d.unwrap_or(0), values)
    }

    pub fn write_csv<W: Write>(&self, mut writer: W) -> Result<()> {
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            writeln!(writer, "{}", line.join(","))?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut reader: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        reader.read_exact(&mut magic)?;
        if &magic != BINARY_MAGIC {
            return Err(Error::Input("bad magic, not a SPMEAN01 file".into()));
        }
        let mut word = [0u8; 8];
        reader.read_exact(&mut word)?;
        let n = u64::from_le_bytes(word) as usize;
        reader.read_exact(&mut word)?;
        let d = u64::from_le_bytes(word) as usize;
        let count = n.checked_mul(d).ok_or_else(|| Error::Input("header dimensions overflow".into()))?;
        let mut bytes = Vec::new();
        reader.read_to_end(&mut bytes)?;
        if bytes.len() != count * 8 {
            return Err(Error::Input(format!("payload has {} bytes, header promises {}", bytes.len(), count * 8)));
        }
        let values = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk"))).collect();
        Self::new(n, d, values)
    }

    pub fn write_binary<W: Write>(&self, mut writer: W) -> Result<()> {
        writer.write_all(BINARY_MAGIC)?;
        writer.write_all(&(self.n as u64).to_le_bytes())?;
        writer.write_all(&(self.d as u64).to_le_bytes())?;
        for v in &self.values {
            writer.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    /// Loads CSV or binary, sniffing the magic bytes.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        if bytes.starts_with(BINARY_MAGIC) {
            Self::read_binary(bytes.as_slice())
        } else {
            Self::read_csv(bytes.as_slice())
        }
    }
}

pub(crate) fn check_dim(got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(Error::Input(format!("dimension mismatch: got {got}, expected {want}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite() {
        assert!(DataMatrix::new(1, 2, vec![1.0, f64::NAN]).is_err());
        assert!(DataMatrix::new(1, 2, vec![1.0, f64::INFINITY]).is_err());
        assert!(DataMatrix::new(0, 2, vec![]).is_err());
    }

    #[test]
    fn binary_layout_is_bit_exact() {
        let m = DataMatrix::new(2, 2, vec![1.0, -2.5, 3.0, 0.125]).unwrap();
        let mut buf = Vec::new();
        m.write_binary(&mut buf).unwrap();
        assert_eq!(&buf[..8], b"SPMEAN01");
        assert_eq!(u64::from_le_bytes(buf[8..16].try_into().unwrap()), 2);
        assert_eq!(u64::from_le_bytes(buf[16..24].try_into().unwrap()), 2);
        assert_eq!(f64::from_le_bytes(buf[24..32].try_into().unwrap()), 1.0);
        assert_eq!(f64::from_le_bytes(buf[32..40].try_into().unwrap()), -2.5);
        assert_eq!(buf.len(), 24 + 4 * 8);
        assert_eq!(DataMatrix::read_binary(buf.as_slice()).unwrap(), m);
    }

    #[test]
    fn truncated_binary_is_an_error() {
        let m = DataMatrix::new(1, 2, vec![1.0, 2.0]).unwrap();
        let mut buf = Vec::new();
        m.write_binary(&mut buf).unwrap();
        buf.pop();
        assert!(DataMatrix::read_binary(buf.as_slice()).is_err());
    }

    #[test]
    fn csv_parse_errors() {
        assert!(DataMatrix::read_csv("1,2\n3\n".as_bytes()).is_err());
        assert!(DataMatrix::read_csv("1,abc\n".as_bytes()).is_err());
        assert!(DataMatrix::read_csv("".as_bytes()).is_err());
        let m = DataMatrix::read_csv("1, 2\n\n3,4\n".as_bytes()).unwrap();
        assert_eq!((m.n(), m.d()), (2, 2));
        assert_eq!(m.row(1), &[3.0, 4.0]);
    }

    #[test]
    fn mean_of_constant_rows_is_exact() {
        let m = DataMatrix::constant(7, &[0.1, -0.3, 1e-7]).unwrap();
        assert_eq!(m.mean(), vec![0.1, -0.3, 1e-7]);
    }
}
