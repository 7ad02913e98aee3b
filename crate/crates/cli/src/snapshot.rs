//! Binary snapshot of one scalar field.
//!
//! Layout (little-endian): `"IPMS"`, version `u16`, dim `u8`, n `u32`,
//! period, t, nu, alpha as `f64`, then `n^dim` row-major `f64` samples.

use ipm_core::{Field, Grid};
use thiserror::Error;

pub const MAGIC: &[u8; 4] = b"IPMS";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 4 + 2 + 1 + 4 + 4 * 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapshotMeta {
    pub t: f64,
    pub nu: f64,
    pub alpha: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum SnapshotError {
    #[error("bad magic: expected \"IPMS\"")]
    Magic,
    #[error("unsupported version {0}")]
    Version(u16),
    #[error("truncated header")]
    Header,
    #[error("payload length {got} bytes, expected {expected}")]
    PayloadLength { got: usize, expected: usize },
    #[error("invalid field: {0}")]
    Field(String),
}

pub fn save_snapshot(f: &Field, meta: SnapshotMeta) -> Vec<u8> {
    let g = f.grid();
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * g.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(g.dim() as u8);
    out.extend_from_slice(&(g.n() as u32).to_le_bytes());
    for v in [g.period(), meta.t, meta.nu, meta.alpha] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for v in f.samples() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

fn f64_at(b: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(b[at..at + 8].try_into().expect("8 bytes"))
}

pub fn load_snapshot(bytes: &[u8]) -> Result<(Field, SnapshotMeta), SnapshotError> {
    if bytes.len() < 4 || &bytes[..4] != MAGIC {
        return Err(SnapshotError::Magic);
    }
    if bytes.len() < HEADER_LEN {
        return Err(SnapshotError::Header);
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != VERSION {
        return Err(SnapshotError::Version(version));
    }
    let dim = bytes[6] as usize;
    let n = u32::from_le_bytes(bytes[7..11].try_into().expect("4 bytes")) as usize;
    let period = f64_at(bytes, 11);
    let meta = SnapshotMeta {
        t: f64_at(bytes, 19),
        nu: f64_at(bytes, 27),
        alpha: f64_at(bytes, 35),
    };
    let grid = Grid::new(dim, n, period).map_err(|e| SnapshotError::Field(e.to_string()))?;
    let expected = 8 * grid.len();
    let got = bytes.len() - HEADER_LEN;
    if got != expected {
        return Err(SnapshotError::PayloadLength { got, expected });
    }
    let data = bytes[HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    let field = Field::new(grid, data).map_err(|e| SnapshotError::Field(e.to_string()))?;
    Ok((field, meta))
}
