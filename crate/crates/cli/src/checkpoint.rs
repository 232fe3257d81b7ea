//! Binary snapshot files: `"SQGF"`, version byte, dimension byte, one
//! little-endian `u32` size per axis, `α` and `t` as `f64`, then the
//! row-major little-endian `f64` samples.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use sqg_core::{GridSpec, RealField};

pub const MAGIC: [u8; 4] = *b"SQGF";
pub const VERSION: u8 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CheckpointError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad magic {found:?}, expected \"SQGF\"")]
    BadMagic { found: [u8; 4] },
    #[error("unsupported checkpoint version {0}")]
    UnsupportedVersion(u8),
    #[error("unsupported dimension {0}")]
    BadDimension(u8),
    #[error("truncated payload: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("{0} trailing bytes after payload")]
    TrailingBytes(usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
}

/// In-memory image of a checkpoint file.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub sizes: Vec<u32>,
    pub alpha: f64,
    pub t: f64,
    pub samples: Vec<f64>,
}

impl Checkpoint {
    pub fn from_field(field: &RealField, t: f64) -> Self {
        let g = field.grid();
        Self { sizes: vec![g.n() as u32; g.dim()], alpha: g.alpha(), t, samples: field.samples().to_vec() }
    }

    /// The stored samples on a torus of side `length` (not part of the file).
    pub fn to_field(&self, length: f64) -> Result<RealField, CheckpointError> {
        let n = self.sizes[0];
        if self.sizes.iter().any(|&s| s != n) {
            return Err(CheckpointError::Shape(format!("non-cubic sizes {:?}", self.sizes)));
        }
        let grid = GridSpec::new(self.sizes.len(), n as usize, length, self.alpha)
            .map_err(|e| CheckpointError::Shape(e.to_string()))?;
        RealField::new(grid, self.samples.clone()).map_err(|e| CheckpointError::Shape(e.to_string()))
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<(), CheckpointError> {
        let expected: usize = self.sizes.iter().map(|&s| s as usize).product();
        if expected != self.samples.len() {
            return Err(CheckpointError::Shape(format!("{} samples for sizes {:?}", self.samples.len(), self.sizes)));
        }
        let dim = u8::try_from(self.sizes.len()).map_err(|_| CheckpointError::BadDimension(u8::MAX))?;
        w.write_all(&MAGIC)?;
        w.write_all(&[VERSION, dim])?;
        for s in &self.sizes {
            w.write_all(&s.to_le_bytes())?;
        }
        w.write_all(&self.alpha.to_le_bytes())?;
        w.write_all(&self.t.to_le_bytes())?;
        for v in &self.samples {
            w.write_all(&v.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_from(mut r: impl Read) -> Result<Self, CheckpointError> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        Self::parse(&bytes)
    }

    pub fn parse(bytes: &[u8]) -> Result<Self, CheckpointError> {
        let need = |len: usize| -> Result<(), CheckpointError> {
            if bytes.len() < len {
                Err(CheckpointError::Truncated { expected: len, found: bytes.len() })
            } else {
                Ok(())
            }
        };
        need(6)?;
        let magic: [u8; 4] = bytes[..4].try_into().expect("four bytes");
        if magic != MAGIC {
            return Err(CheckpointError::BadMagic { found: magic });
        }
        if bytes[4] != VERSION {
            return Err(CheckpointError::UnsupportedVersion(bytes[4]));
        }
        let dim = bytes[5];
        if !(1..=3).contains(&dim) {
            return Err(CheckpointError::BadDimension(dim));
        }
        let header = 6 + 4 * dim as usize + 16;
        need(header)?;
        let sizes: Vec<u32> =
            (0..dim as usize).map(|i| u32::from_le_bytes(bytes[6 + 4 * i..10 + 4 * i].try_into().expect("u32"))).collect();
        let f64_at = |off: usize| f64::from_le_bytes(bytes[off..off + 8].try_into().expect("f64"));
        let alpha = f64_at(header - 16);
        let t = f64_at(header - 8);
        let count = sizes.iter().try_fold(1usize, |acc, &s| acc.checked_mul(s as usize));
        let total = count.and_then(|c| c.checked_mul(8)).and_then(|b| b.checked_add(header));
        let Some(total) = total else {
            return Err(CheckpointError::Shape(format!("sizes {sizes:?} overflow")));
        };
        need(total)?;
        if bytes.len() > total {
            return Err(CheckpointError::TrailingBytes(bytes.len() - total));
        }
        let samples = bytes[header..].chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("f64"))).collect();
        Ok(Self { sizes, alpha, t, samples })
    }
}

pub fn write_checkpoint(path: &Path, field: &RealField, t: f64) -> Result<(), CheckpointError> {
    Checkpoint::from_field(field, t).write_to(BufWriter::new(File::create(path)?))
}

pub fn read_checkpoint(path: &Path) -> Result<Checkpoint, CheckpointError> {
    Checkpoint::read_from(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Checkpoint {
        Checkpoint { sizes: vec![2, 2], alpha: 0.75, t: 0.5, samples: vec![1.0, -0.0, f64::MIN_POSITIVE, 3.5e300] }
    }

    #[test]
    fn header_layout() {
        let mut buf = Vec::new();
        sample().write_to(&mut buf).unwrap();
        assert_eq!(&buf[..6], b"SQGF\x01\x02");
        assert_eq!(&buf[6..14], &[2, 0, 0, 0, 2, 0, 0, 0]);
        assert_eq!(&buf[14..22], &0.75f64.to_le_bytes());
        assert_eq!(buf.len(), 6 + 8 + 16 + 32);
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let c = sample();
        let mut buf = Vec::new();
        c.write_to(&mut buf).unwrap();
        let back = Checkpoint::parse(&buf).unwrap();
        assert_eq!(back.sizes, c.sizes);
        for (a, b) in back.samples.iter().zip(&c.samples) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        let mut again = Vec::new();
        back.write_to(&mut again).unwrap();
        assert_eq!(buf, again);
    }

    #[test]
    fn corrupt_files_are_typed_errors() {
        let mut buf = Vec::new();
        sample().write_to(&mut buf).unwrap();
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(Checkpoint::parse(&bad), Err(CheckpointError::BadMagic { .. })));
        let mut bad = buf.clone();
        bad[4] = 2;
        assert!(matches!(Checkpoint::parse(&bad), Err(CheckpointError::UnsupportedVersion(2))));
        assert!(matches!(Checkpoint::parse(&buf[..buf.len() - 3]), Err(CheckpointError::Truncated { .. })));
        assert!(matches!(Checkpoint::parse(&buf[..10]), Err(CheckpointError::Truncated { .. })));
        let mut long = buf.clone();
        long.push(0);
        assert!(matches!(Checkpoint::parse(&long), Err(CheckpointError::TrailingBytes(1))));
    }
}
